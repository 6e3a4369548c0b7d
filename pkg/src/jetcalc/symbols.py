"""Graded algebra of homogeneous polynomial vector fields.

The objects here model the symbol spaces attached to a volume-preserving
family: divergence-free fields h^k with homogeneous degree-(k+1) components
in the fiber variables x (h^{-1} being the constant fields), and bigraded
model spaces g^{k,l} = (s-monomials of degree l) x h^{k-l} obtained by
letting the fields depend polynomially on transverse variables s.  Brackets
differentiate in x only, so bidegrees add.  The two constructive facts the
module certifies by exact linear algebra are the transvection lemma (every
X in h^k is [d/dx_1, Y] for a divergence-free Y) and the surjectivity of
bracketing with the s-linear constant fields a = g^{0,1} onto the next
s-valuation level.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Sequence

from .exactalg import Monomial, Polynomial, Q, _raw

DIMENSION_CAP_ENV = "JETCALC_DIMENSION_CAP"
DEFAULT_DIMENSION_CAP = 2000


def _x_names(m: int) -> tuple[str, ...]:
    return tuple(f"x{i}" for i in range(1, m + 1))


def _s_names(q: int) -> tuple[str, ...]:
    return tuple(f"s{i}" for i in range(1, q + 1))


class HomogeneousField:
    """Polynomial vector field in the x-directions, bihomogeneous in (x, s)."""

    __slots__ = ("x_names", "s_names", "components", "x_degree", "s_degree")

    def __init__(
        self,
        x_names: Sequence[str],
        s_names: Sequence[str],
        components: Sequence[Polynomial],
    ):
        self.x_names = tuple(x_names)
        self.s_names = tuple(s_names)
        universe = self.x_names + self.s_names
        comps = []
        for p in components:
            comps.append(p.remap_universe(universe))
        self.components = tuple(comps)
        if len(self.components) != len(self.x_names):
            raise ValueError("one component per x-direction is required")
        xdeg = sdeg = None
        n_x = len(self.x_names)
        for p in self.components:
            for mono, _ in p.terms.items():
                xd = sum(e for i, e in mono.exps if i < n_x)
                sd = mono.degree - xd
                if xdeg is None:
                    xdeg, sdeg = xd, sd
                elif (xd, sd) != (xdeg, sdeg):
                    raise ValueError("components are not bihomogeneous of one bidegree")
        self.x_degree = xdeg  # None for the zero field
        self.s_degree = sdeg

    @property
    def universe(self) -> tuple[str, ...]:
        return self.x_names + self.s_names

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self.components)

    def __eq__(self, other):
        if not isinstance(other, HomogeneousField):
            return NotImplemented
        return (
            self.x_names == other.x_names
            and self.s_names == other.s_names
            and self.components == other.components
        )

    def __add__(self, other: "HomogeneousField") -> "HomogeneousField":
        return HomogeneousField(
            self.x_names,
            self.s_names,
            [a + b for a, b in zip(self.components, other.components)],
        )

    def __sub__(self, other: "HomogeneousField") -> "HomogeneousField":
        return HomogeneousField(
            self.x_names,
            self.s_names,
            [a - b for a, b in zip(self.components, other.components)],
        )

    def __mul__(self, scalar) -> "HomogeneousField":
        return HomogeneousField(
            self.x_names, self.s_names, [p * scalar for p in self.components]
        )

    __rmul__ = __mul__

    def __neg__(self) -> "HomogeneousField":
        return self * Q(-1)

    def with_s(self, s_names: Sequence[str]) -> "HomogeneousField":
        return HomogeneousField(self.x_names, s_names, self.components)

    def divergence(self) -> Polynomial:
        total = Polynomial.zero(self.universe)
        for name, p in zip(self.x_names, self.components):
            total = total + p.diff(name)
        return total

    def __repr__(self):
        parts = [
            f"({p})*d/d{v}"
            for v, p in zip(self.x_names, self.components)
            if not p.is_zero()
        ]
        return " + ".join(parts) if parts else "0"


def divergence_free(v: HomogeneousField) -> bool:
    return v.divergence().is_zero()


def graded_bracket(u: HomogeneousField, v: HomogeneousField) -> HomogeneousField:
    """Bracket of the x-components, treating s as constants.  Bidegrees add."""
    if u.x_names != v.x_names or u.s_names != v.s_names:
        raise ValueError("fields live on different (x, s) universes")
    comps = []
    for i in range(len(u.x_names)):
        acc = Polynomial.zero(u.universe)
        for j, name in enumerate(u.x_names):
            uj = u.components[j]
            vj = v.components[j]
            if not uj.is_zero():
                d = v.components[i].diff(name)
                if not d.is_zero():
                    acc = acc + uj * d
            if not vj.is_zero():
                d = u.components[i].diff(name)
                if not d.is_zero():
                    acc = acc - vj * d
        comps.append(acc)
    return HomogeneousField(u.x_names, u.s_names, comps)


# ---------------------------------------------------------------------------
# exact linear algebra over Q
# ---------------------------------------------------------------------------


def exact_rank(rows: list[list[Fraction]]) -> int:
    """Rank by fraction-free (Bareiss) elimination on a cleared integer matrix."""
    if not rows or not rows[0]:
        return 0
    mat: list[list[int]] = []
    for row in rows:
        den_lcm = 1
        for c in row:
            c = Q(c)
            den_lcm = den_lcm * c.denominator // _gcd_int(den_lcm, c.denominator)
        mat.append([int(c * den_lcm) for c in row])
    n, m = len(mat), len(mat[0])
    rank = 0
    prev = 1
    row = 0
    for col in range(m):
        piv = next((r for r in range(row, n) if mat[r][col] != 0), None)
        if piv is None:
            continue
        mat[row], mat[piv] = mat[piv], mat[row]
        pivot = mat[row][col]
        for r in range(row + 1, n):
            factor = mat[r][col]
            for c in range(col, m):
                mat[r][c] = (pivot * mat[r][c] - factor * mat[row][c]) // prev
        prev = pivot
        rank += 1
        row += 1
        if row == n:
            break
    return rank


def _gcd_int(a: int, b: int) -> int:
    from math import gcd

    return gcd(a, b)


def nullspace(rows: list[list[Fraction]], ncols: int) -> list[list[Fraction]]:
    """Canonical basis of the kernel via reduced row echelon form."""
    mat = [list(map(Q, row)) for row in rows]
    n = len(mat)
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, n) if mat[i][col] != 0), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = Q(1) / mat[r][col]
        mat[r] = [x * inv for x in mat[r]]
        for i in range(n):
            if i != r and mat[i][col] != 0:
                f = mat[i][col]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r])]
        pivots.append(col)
        r += 1
        if r == n:
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Q(0)] * ncols
        vec[fc] = Q(1)
        for prow, pcol in enumerate(pivots):
            vec[pcol] = -mat[prow][fc]
        basis.append(vec)
    return basis


# ---------------------------------------------------------------------------
# model spaces
# ---------------------------------------------------------------------------


@dataclass
class GradedSpace:
    """A bidegree slot with an explicit, independent basis of fields."""

    x_degree_index: int  # the k of h^k / g^{k,l}
    s_valuation: int  # the l
    basis: list[HomogeneousField]

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def verify_independent(self) -> bool:
        if not self.basis:
            return True
        coords = [_field_coordinates(f) for f in self.basis]
        keys = sorted(
            {k for c in coords for k in c}, key=lambda k: (k[0], k[1].sort_key())
        )
        rows = [[c.get(k, Q(0)) for k in keys] for c in coords]
        return exact_rank(rows) == len(self.basis)


def _monomials_of_degree(universe: tuple[str, ...], names: Sequence[str], degree: int):
    """All monomials of the given total degree in ``names``, descending grlex."""
    idx = [universe.index(n) for n in names]
    out: list[Monomial] = []

    def rec(pos: int, remaining: int, acc: list[tuple[int, int]]):
        if pos == len(idx) - 1:
            if remaining:
                out.append(Monomial(acc + [(idx[pos], remaining)]))
            else:
                out.append(Monomial(acc))
            return
        for e in range(remaining, -1, -1):
            rec(pos + 1, remaining - e, acc + ([(idx[pos], e)] if e else []))

    if degree == 0:
        return [Monomial()]
    rec(0, degree, [])
    return out


def _field_coordinates(f: HomogeneousField) -> dict[tuple[int, Monomial], Fraction]:
    out = {}
    for i, p in enumerate(f.components):
        for mono, c in p.terms.items():
            out[(i, mono)] = c
    return out


def h_dimension(m: int, k: int) -> int:
    """Closed-form dimension of h^k: m*C(m+k, m-1) - C(m+k-1, m-1); m for k = -1."""
    if k == -1:
        return m
    return m * comb(m + k, m - 1) - comb(m + k - 1, m - 1)


def h_basis(m: int, k: int) -> GradedSpace:
    """Exact basis of the divergence-free fields of homogeneous degree k+1."""
    if m < 1 or k < -1:
        raise ValueError("need m >= 1 and k >= -1")
    x = _x_names(m)
    universe = x
    if k == -1:
        basis = [
            HomogeneousField(
                x,
                (),
                [
                    Polynomial.const(universe, 1 if i == j else 0)
                    for j in range(m)
                ],
            )
            for i in range(m)
        ]
        return GradedSpace(k, 0, basis)
    monos = _monomials_of_degree(universe, x, k + 1)
    ambient: list[tuple[int, Monomial]] = [
        (i, mono) for i in range(m) for mono in monos
    ]
    target = _monomials_of_degree(universe, x, k)
    target_index = {mono: r for r, mono in enumerate(target)}
    # divergence matrix: rows = degree-k monomials, columns = ambient fields
    rows = [[Q(0)] * len(ambient) for _ in target]
    for col, (i, mono) in enumerate(ambient):
        p = _raw(universe, {mono: Q(1)}).diff(x[i])
        for m2, c in p.terms.items():
            rows[target_index[m2]][col] = c
    kernel = nullspace(rows, len(ambient))
    basis = []
    for vec in kernel:
        comps = [dict() for _ in range(m)]
        for col, coeff in enumerate(vec):
            if coeff:
                i, mono = ambient[col]
                comps[i][mono] = coeff
        basis.append(
            HomogeneousField(x, (), [_raw(universe, t) for t in comps])
        )
    return GradedSpace(k, 0, basis)


def model_space(m: int, q: int, k: int, l: int) -> GradedSpace:
    """The bigraded model g^{k,l}: s-monomials of degree l times h^{k-l}."""
    if l < 0 or k - l < -1:
        raise ValueError("need l >= 0 and k - l >= -1")
    x, s = _x_names(m), _s_names(q)
    universe = x + s
    h = h_basis(m, k - l)
    smonos = _monomials_of_degree(universe, s, l) if l else [Monomial()]
    basis = []
    for smono in smonos:
        spoly = _raw(universe, {smono: Q(1)})
        for f in h.basis:
            basis.append(
                HomogeneousField(
                    x, s, [spoly * p.remap_universe(universe) for p in f.components]
                )
            )
    return GradedSpace(k, l, basis)


# ---------------------------------------------------------------------------
# the two constructive lemmas
# ---------------------------------------------------------------------------


def transvection_solve(x_field: HomogeneousField) -> HomogeneousField:
    """Divergence-free Y with [d/dx_1, Y] = X, for divergence-free homogeneous X.

    Construction: antidifferentiate each component along x_1, then correct the
    divergence with the Euler-type field E = sum_{j>=2} x_j d/dx_j, using that
    the defect R is homogeneous of degree k+1 with E R = (k+1) R and
    div(R E) = (k+m) R.
    """
    X = x_field
    if X.s_names:
        raise ValueError("the transvection construction applies to s-independent fields")
    if not divergence_free(X):
        raise ValueError("input field must be divergence-free")
    if X.is_zero():
        return X
    k = X.x_degree - 1
    m = len(X.x_names)
    universe = X.universe
    x1 = X.x_names[0]
    i1 = universe.index(x1)

    def x1_antiderivative(p: Polynomial) -> Polynomial:
        out = {}
        for mono, c in p.terms.items():
            e = mono.exp_of(i1)
            pairs = [(i, x) for i, x in mono.exps if i != i1]
            pairs.append((i1, e + 1))
            out[Monomial(pairs)] = c / (e + 1)
        return _raw(universe, out)

    y0 = HomogeneousField(
        X.x_names, (), [x1_antiderivative(p) for p in X.components]
    )
    r = y0.divergence()
    if r.is_zero():
        y = y0
    else:
        e_comps = [
            Polynomial.variable(universe, name) if j >= 1 else Polynomial.zero(universe)
            for j, name in enumerate(X.x_names)
        ]
        correction = [p * r * Q(-1, k + m) for p in e_comps]
        y = HomogeneousField(
            X.x_names, (), [a + b for a, b in zip(y0.components, correction)]
        )
    d_dx1 = HomogeneousField(
        X.x_names,
        (),
        [Polynomial.const(universe, 1 if j == 0 else 0) for j in range(m)],
    )
    if graded_bracket(d_dx1, y) != X or not divergence_free(y):
        raise AssertionError("transvection construction failed to verify")
    return y


@dataclass
class SurjectivityReport:
    m: int
    q: int
    k: int
    l: int
    target_dimension: int
    image_rank: int

    @property
    def surjective(self) -> bool:
        return self.image_rank == self.target_dimension


def dimension_cap() -> int:
    value = os.environ.get(DIMENSION_CAP_ENV)
    return int(value) if value else DEFAULT_DIMENSION_CAP


def bracket_surjectivity_check(
    m: int, q: int, k: int, l: int, cap: int | None = None
) -> SurjectivityReport:
    """Exact rank of [a, g^{k,l}] inside g^{k,l+1}, a = span{s_i d/dx_j}.

    Brackets of the a-basis with the g^{k,l} model basis are flattened onto
    the monomial coordinate space of bidegree (k-l, l+1) fields; surjectivity
    holds iff the rank equals dim g^{k,l+1}.
    """
    if l > k:
        raise ValueError("the surjectivity statement needs l <= k")
    if m < 2 or q < 1:
        raise ValueError("need m >= 2 and q >= 1")
    cap = dimension_cap() if cap is None else cap
    x, s = _x_names(m), _s_names(q)
    universe = x + s
    a_basis = []
    for sname in s:
        spoly = Polynomial.variable(universe, sname)
        for j in range(m):
            comps = [
                spoly if j2 == j else Polynomial.zero(universe) for j2 in range(m)
            ]
            a_basis.append(HomogeneousField(x, s, comps))
    g_kl = model_space(m, q, k, l)
    target = model_space(m, q, k, l + 1)
    # coordinate space: component index x monomial of x-degree k-l, s-degree l+1
    coord_keys: list[tuple[int, Monomial]] = []
    xmonos = _monomials_of_degree(universe, x, k - l) if k - l >= 0 else [Monomial()]
    smonos = _monomials_of_degree(universe, s, l + 1)
    for i in range(m):
        for xm in xmonos:
            for sm in smonos:
                coord_keys.append((i, xm.mul(sm)))
    key_index = {key: pos for pos, key in enumerate(coord_keys)}
    n_rows = len(a_basis) * g_kl.dimension
    if max(n_rows, len(coord_keys)) > cap:
        raise ValueError(
            f"bracket matrix side {max(n_rows, len(coord_keys))} exceeds the cap {cap}"
        )
    rows = []
    for a_f in a_basis:
        for b_f in g_kl.basis:
            br = graded_bracket(a_f, b_f)
            row = [Q(0)] * len(coord_keys)
            for key, c in _field_coordinates(br).items():
                row[key_index[key]] = c
            rows.append(row)
    rank = exact_rank(rows)
    return SurjectivityReport(m, q, k, l, target.dimension, rank)