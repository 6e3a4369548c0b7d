"""Jet coordinates and truncated jets of maps.

Two views of jets live here.

*Jet charts* extend a base chart by coordinates ``x:e1e2`` (the derivative of
``x`` along source parameters 1 and 2), supporting total derivative operators,
prolongation of vector fields, and differential-invariant checks.  Raising the
order returns values on an extended chart whose variable list has the lower
order's list as a prefix, so re-interpreting a function on a deeper chart is
free.

*Truncated map jets* are Taylor polynomials of a pointed map of the chart into
itself: one polynomial per target coordinate in the displacement variables
(same names as the chart) plus an optional formal deformation parameter ``t``
for one-parameter families such as flows.  Composition, inversion, pullback of
forms and pushforward of fields all truncate to the declared orders.

Truncation discipline: a displacement series with no constant term has
combined valuation >= 1, where combined degree = space degree + t degree.
Expanding a rational function for composition therefore needs Taylor terms up
to combined degree space_cap + t_cap, and intermediate products in a
substitution may be truncated at (space <= space_cap, t <= t_cap) because both
gradings only grow along a product.  Before composing with a further jet
(pushforward does this) only the combined cap may be applied: drift terms that
are pure in ``t`` can lower the space degree of a term.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, combinations_with_replacement
from math import comb, factorial
from typing import Mapping, Sequence

from .cartan import Chart, ChartMismatchError, DifferentialForm, QuotientContext, VectorField
from .exactalg import (
    Monomial,
    PoleError,
    Polynomial,
    Q,
    RationalFunction,
    Scalar,
    _raw,
)

T_NAME = "t"


# ---------------------------------------------------------------------------
# jet charts, total derivatives, prolongation
# ---------------------------------------------------------------------------


def _multi_indices(m: int, degree: int):
    """Sorted tuples over parameters 1..m, in lexicographic order."""
    return combinations_with_replacement(range(1, m + 1), degree)


def _alpha_name(base: str, alpha: tuple[int, ...]) -> str:
    if not alpha:
        return base
    return base + ":" + "".join(f"e{i}" for i in alpha)


class JetChart:
    """Coordinates of the order-k jets of parametrizations of a base chart."""

    def __init__(self, base: Chart, order: int):
        if order < 0:
            raise ValueError("jet order must be non-negative")
        for name in base.variables:
            if ":" in name:
                raise ValueError("base chart names must not contain ':'")
        self.base = base
        self.order = order
        names = list(base.variables)
        decode: dict[str, tuple[str, tuple[int, ...]]] = {
            name: (name, ()) for name in base.variables
        }
        m = base.dim
        for level in range(1, order + 1):
            for alpha in _multi_indices(m, level):
                for b in base.variables:
                    name = _alpha_name(b, alpha)
                    names.append(name)
                    decode[name] = (b, alpha)
        self.chart = Chart(names)
        self._decode = decode

    @property
    def params(self) -> int:
        return self.base.dim

    def extended(self, by: int = 1) -> "JetChart":
        return JetChart(self.base, self.order + by)

    def variable(self, base_name: str, alpha: Sequence[int] = ()) -> RationalFunction:
        return self.chart.rf(self.name_of(base_name, alpha))

    def name_of(self, base_name: str, alpha: Sequence[int] = ()) -> str:
        if base_name not in self.base.variables:
            raise ValueError(f"unknown base variable {base_name!r}")
        alpha = tuple(sorted(alpha))
        if len(alpha) > self.order:
            raise ValueError("multi-index exceeds jet order")
        return _alpha_name(base_name, alpha)

    def decode(self, name: str) -> tuple[str, tuple[int, ...]]:
        return self._decode[name]

    def lift(self, f: RationalFunction) -> RationalFunction:
        """Reinterpret a function from the base chart or a shallower jet chart."""
        u = self.chart.variables
        return RationalFunction._wrap(
            f.num.with_universe(u), f.den.with_universe(u)
        )


def total_derivative(jc: JetChart, f: RationalFunction, i: int) -> RationalFunction:
    """Total derivative along source parameter ``i`` (1-based); lives one order up."""
    if not 1 <= i <= jc.params:
        raise ValueError(f"parameter index {i} out of range")
    up = jc.extended()
    f = up.lift(jc.lift(f))
    total = up.chart.zero_rf()
    present = set(f.num.variables_present()) | set(f.den.variables_present())
    for name in jc.chart.variables:
        if name not in present:
            continue
        df = f.diff(name)
        if df.is_zero():
            continue
        base_name, alpha = jc.decode(name)
        bumped = up.variable(base_name, tuple(sorted(alpha + (i,))))
        total = total + df * bumped
    return total


def total_derivative_alpha(
    jc: JetChart, f: RationalFunction, alpha: Sequence[int]
) -> RationalFunction:
    """Iterated total derivative for a multi-index (order rises by its length)."""
    g = f
    cur = jc
    for i in sorted(alpha):
        g = total_derivative(cur, g, i)
        cur = cur.extended()
    return g


def prolong(v: VectorField, order: int) -> VectorField:
    """Canonical lift of a base vector field to the order-k jet chart.

    Component at (j, alpha) is the iterated total derivative of the j-th base
    component; total derivatives commute, so peeling the smallest index of
    alpha is a legitimate canonical choice.
    """
    base = v.chart
    jc = JetChart(base, order)
    # components stored at their natural order; lifted to order k at the end
    comps: dict[tuple[str, tuple[int, ...]], RationalFunction] = {}
    for name, f in zip(base.variables, v.components):
        comps[(name, ())] = f
    m = base.dim
    for level in range(1, order + 1):
        lower = JetChart(base, level - 1)
        for alpha in _multi_indices(m, level):
            head, rest = alpha[0], alpha[1:]
            for name in base.variables:
                comps[(name, alpha)] = total_derivative(lower, comps[(name, rest)], head)
    ordered = []
    for jet_name in jc.chart.variables:
        bname, alpha = jc.decode(jet_name)
        ordered.append(jc.lift(comps[(bname, alpha)]))
    return VectorField(jc.chart, ordered)


def check_invariant(v: VectorField, f: RationalFunction, order: int) -> bool:
    """True iff the order-k prolongation of v annihilates the jet expression f."""
    x = prolong(v, order)
    jc = JetChart(v.chart, order)
    return x.apply(jc.lift(f)).is_zero()


def frame_volume_invariant(f: RationalFunction, chart: Chart) -> RationalFunction:
    """First-order jet expression det(x_{i:e_j}) * f(x); scales linearly with f."""
    if f.is_zero():
        raise ValueError("the volume density must be nonzero")
    jc = JetChart(chart, 1)
    m = chart.dim
    rows = [
        [jc.variable(name, (j,)) for j in range(1, m + 1)] for name in chart.variables
    ]
    return _rf_det(rows, jc.chart) * jc.lift(f)


def _rf_det(rows, chart: Chart) -> RationalFunction:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = chart.zero_rf()
    for j in range(n):
        minor = [r[:j] + r[j + 1 :] for r in rows[1:]]
        term = rows[0][j] * _rf_det(minor, chart)
        total = total + (term if j % 2 == 0 else -term)
    return total


# ---------------------------------------------------------------------------
# truncated polynomial helpers (displacement + formal parameter t)
# ---------------------------------------------------------------------------


def _space_degree(m: Monomial, t_index: int) -> int:
    return m.degree - m.exp_of(t_index)


def truncate_poly(
    p: Polynomial,
    t_index: int,
    space_cap: int | None,
    t_cap: int | None,
    combined_cap: int | None = None,
) -> Polynomial:
    out = {}
    for m, c in p.terms.items():
        te = m.exp_of(t_index)
        se = m.degree - te
        if space_cap is not None and se > space_cap:
            continue
        if t_cap is not None and te > t_cap:
            continue
        if combined_cap is not None and m.degree > combined_cap:
            continue
        out[m] = c
    if len(out) == len(p.terms):
        return p
    return _raw(p.universe, out)


def _mul_trunc(
    a: Polynomial,
    b: Polynomial,
    t_index: int,
    space_cap: int | None,
    t_cap: int | None,
    combined_cap: int | None = None,
) -> Polynomial:
    if len(a.terms) < len(b.terms):
        a, b = b, a
    out: dict[Monomial, Fraction] = {}
    for mb, cb in b.terms.items():
        for ma, ca in a.terms.items():
            m = ma.mul(mb)
            te = m.exp_of(t_index)
            se = m.degree - te
            if space_cap is not None and se > space_cap:
                continue
            if t_cap is not None and te > t_cap:
                continue
            if combined_cap is not None and m.degree > combined_cap:
                continue
            s = out.get(m, 0) + ca * cb
            if s:
                out[m] = s
            else:
                out.pop(m, None)
    return _raw(a.universe, out)


def taylor_shift_poly(
    p: Polynomial, point: Mapping[str, Fraction], universe: tuple[str, ...], cap: int
) -> Polynomial:
    """Expand p(point + d) as a polynomial in the displacements d, total degree <= cap."""
    out: dict[Monomial, Fraction] = {}
    uni_index = {name: i for i, name in enumerate(universe)}
    powers: dict[tuple[int, int], Fraction] = {}
    for m, c in p.terms.items():
        # partial expansions: list of (displacement monomial pairs, coefficient)
        acc: list[tuple[tuple[tuple[int, int], ...], Fraction]] = [((), c)]
        ok = True
        for i, e in m.exps:
            name = p.universe[i]
            val = point.get(name)
            if val is None:
                raise ValueError(f"no base value for variable {name!r}")
            val = Q(val)
            ti = uni_index[name]
            nxt: list[tuple[tuple[tuple[int, int], ...], Fraction]] = []
            for pairs, coef in acc:
                used = sum(x for _, x in pairs)
                top = min(e, cap - used)
                for g in range(top + 1):
                    if e - g:
                        key = (i, e - g)
                        pw = powers.get(key)
                        if pw is None:
                            pw = val ** (e - g)
                            powers[key] = pw
                        c2 = coef * comb(e, g) * pw
                    else:
                        c2 = coef * comb(e, g)
                    if c2 == 0:
                        continue
                    nxt.append((pairs + ((ti, g),) if g else pairs, c2))
            acc = nxt
            if not acc:
                ok = False
                break
        if not ok:
            continue
        for pairs, coef in acc:
            mono = Monomial(pairs)
            s = out.get(mono, 0) + coef
            if s:
                out[mono] = s
            else:
                out.pop(mono, None)
    return _raw(universe, out)


def taylor_shift_rf(
    f: RationalFunction,
    point: Mapping[str, Fraction],
    universe: tuple[str, ...],
    cap: int,
    t_index: int,
) -> Polynomial:
    """Taylor expansion of a rational function at a regular point, degree <= cap."""
    num = taylor_shift_poly(f.num, point, universe, cap)
    den = taylor_shift_poly(f.den, point, universe, cap)
    c0 = den.terms.get(Monomial(), Q(0))
    if c0 == 0:
        raise PoleError("expansion point is a pole")
    if den.is_const():
        return num * (Q(1) / c0)
    u = Polynomial.const(universe, 1) - den * (Q(1) / c0)
    inv = Polynomial.const(universe, 1)
    one = Polynomial.const(universe, 1)
    for _ in range(cap):
        inv = one + _mul_trunc(u, inv, t_index, None, None, cap)
    res = _mul_trunc(num, inv, t_index, None, None, cap)
    return res * (Q(1) / c0)


def substitute_truncated(
    base: Polynomial,
    bindings: Mapping[str, Polynomial],
    t_index: int,
    space_cap: int | None,
    t_cap: int | None,
    combined_cap: int | None = None,
) -> Polynomial:
    """Simultaneous substitution of displacement series with valuation >= 1.

    Every binding must have zero constant term; unbound variables (``t`` in
    particular) pass through untouched.
    """
    universe = base.universe
    idx_val: dict[int, Polynomial] = {}
    for name, v in bindings.items():
        if name in universe:
            idx_val[universe.index(name)] = v.remap_universe(universe)
    one = Polynomial.const(universe, 1)
    out = Polynomial.zero(universe)
    powers: dict[tuple[int, int], Polynomial] = {}
    for m, c in base.terms.items():
        factor = one * c
        plain = []
        dead = False
        for i, e in m.exps:
            if i in idx_val:
                key = (i, e)
                p = powers.get(key)
                if p is None:
                    p = one
                    for _ in range(e):
                        p = _mul_trunc(
                            p, idx_val[i], t_index, space_cap, t_cap, combined_cap
                        )
                    powers[key] = p
                if p.is_zero():
                    dead = True
                    break
                factor = _mul_trunc(factor, p, t_index, space_cap, t_cap, combined_cap)
            else:
                plain.append((i, e))
        if dead or factor.is_zero():
            continue
        if plain:
            factor = _mul_trunc(
                factor,
                _raw(universe, {Monomial(plain): Q(1)}),
                t_index,
                space_cap,
                t_cap,
                combined_cap,
            )
        out = out + factor
    return truncate_poly(out, t_index, space_cap, t_cap, combined_cap)


# ---------------------------------------------------------------------------
# truncated map jets
# ---------------------------------------------------------------------------


class TruncatedMapJet:
    """Truncated Taylor data of a pointed map of a chart into itself.

    ``components[name]`` is a polynomial in the displacement variables (named
    after the chart coordinates) and optionally the formal parameter ``t``;
    its value at displacement zero and t = 0 is the target coordinate.
    """

    __slots__ = ("chart", "source", "order", "t_order", "components")

    def __init__(
        self,
        chart: Chart,
        source: Mapping[str, Scalar],
        order: int,
        components: Mapping[str, Polynomial],
        t_order: int | None = None,
    ):
        if order < 0:
            raise ValueError("jet order must be non-negative")
        if T_NAME in chart.variables:
            raise ValueError(f"chart variable {T_NAME!r} collides with the flow parameter")
        self.chart = chart
        self.order = order
        self.t_order = t_order
        self.source = {name: Q(source[name]) for name in chart.variables}
        universe = self.universe
        t_index = len(chart.variables)
        comps = {}
        for name in chart.variables:
            p = components[name].remap_universe(universe)
            if t_order is None and p.degree_in(T_NAME) > 0:
                raise ValueError("components carry the flow parameter but t_order is None")
            p = truncate_poly(p, t_index, order, t_order)
            comps[name] = p
        self.components = comps

    @property
    def universe(self) -> tuple[str, ...]:
        return self.chart.variables + (T_NAME,)

    @property
    def t_index(self) -> int:
        return len(self.chart.variables)

    @classmethod
    def identity(
        cls, chart: Chart, point: Mapping[str, Scalar], order: int, t_order: int | None = None
    ) -> "TruncatedMapJet":
        universe = chart.variables + (T_NAME,)
        comps = {}
        for name in chart.variables:
            comps[name] = Polynomial.const(universe, Q(point[name])) + Polynomial.variable(
                universe, name
            )
        return cls(chart, point, order, comps, t_order)

    @classmethod
    def affine(
        cls,
        chart: Chart,
        source: Mapping[str, Scalar],
        target: Mapping[str, Scalar],
        matrix: Sequence[Sequence[Scalar]],
        order: int,
        t_order: int | None = None,
    ) -> "TruncatedMapJet":
        """Jet of the affine map target + matrix . displacement."""
        universe = chart.variables + (T_NAME,)
        comps = {}
        for i, name in enumerate(chart.variables):
            p = Polynomial.const(universe, Q(target[name]))
            for j, other in enumerate(chart.variables):
                c = Q(matrix[i][j])
                if c:
                    p = p + c * Polynomial.variable(universe, other)
            comps[name] = p
        return cls(chart, source, order, comps, t_order)

    def component(self, name: str) -> Polynomial:
        return self.components[name]

    def target_point(self) -> dict[str, Fraction]:
        """Target coordinates at displacement zero and t = 0."""
        return {
            name: self.components[name].terms.get(Monomial(), Q(0))
            for name in self.chart.variables
        }

    def centered(self, name: str) -> Polynomial:
        return self.components[name] - Polynomial.const(
            self.universe, self.target_point()[name]
        )

    def linear_matrix(self) -> list[list[Fraction]]:
        """Jacobian of the map at the source, with t frozen to 0."""
        n = self.chart.dim
        mat = [[Q(0)] * n for _ in range(n)]
        for i, name in enumerate(self.chart.variables):
            for j in range(n):
                mono = Monomial(((j, 1),))
                mat[i][j] = self.components[name].terms.get(mono, Q(0))
        return mat

    def project(self, order: int) -> "TruncatedMapJet":
        """The lower-order jet obtained by forgetting higher displacement degrees."""
        if order > self.order:
            raise ValueError("cannot project to a higher order")
        return TruncatedMapJet(self.chart, self.source, order, self.components, self.t_order)

    def reparametrize_t(self, scale: Scalar) -> "TruncatedMapJet":
        """Replace t by scale*t (reverses a flow for scale = -1)."""
        if self.t_order is None:
            return self
        scale = Q(scale)
        t_index = self.t_index
        comps = {}
        for name, p in self.components.items():
            terms = {}
            for m, c in p.terms.items():
                e = m.exp_of(t_index)
                terms[m] = c * scale**e if e else c
            comps[name] = _raw(p.universe, terms)
        return TruncatedMapJet(self.chart, self.source, self.order, comps, self.t_order)

    def at_time_zero(self) -> "TruncatedMapJet":
        t_index = self.t_index
        comps = {
            name: truncate_poly(p, t_index, None, 0)
            for name, p in self.components.items()
        }
        return TruncatedMapJet(self.chart, self.source, self.order, comps, None)

    def __eq__(self, other):
        if not isinstance(other, TruncatedMapJet):
            return NotImplemented
        return (
            self.chart == other.chart
            and self.source == other.source
            and self.order == other.order
            and self.t_order == other.t_order
            and self.components == other.components
        )

    def __repr__(self):
        lines = [f"jet(order={self.order}, t_order={self.t_order})"]
        for name in self.chart.variables:
            lines.append(f"  {name} -> {self.components[name]!r}")
        return "\n".join(lines)


def _combined_t_order(a: TruncatedMapJet, b: TruncatedMapJet) -> int | None:
    if a.t_order is None:
        return b.t_order
    if b.t_order is None:
        return a.t_order
    return max(a.t_order, b.t_order)


def jet_compose(g: TruncatedMapJet, f: TruncatedMapJet) -> TruncatedMapJet:
    """The jet of g o f; f's target point must equal g's source point.

    Exact to the declared orders for drift-free jets.  When the inner jet's
    target drifts with t, the outer jet's discarded space degrees beyond k
    would have fed terms of combined degree > k, so the result is exact on
    combined degree (space + t) <= k; building the factors with a larger
    space order extends the exact region accordingly.
    """
    if g.chart != f.chart:
        raise ChartMismatchError("jets live on different charts")
    if g.order != f.order:
        raise ValueError("jet orders must match for composition")
    if f.target_point() != g.source:
        raise ValueError("target of the inner jet must equal the source of the outer jet")
    t_order = _combined_t_order(g, f)
    t_index = f.t_index
    bindings = {
        name: f.components[name]
        - Polynomial.const(f.universe, g.source[name])
        for name in f.chart.variables
    }
    comps = {}
    for name in g.chart.variables:
        comps[name] = substitute_truncated(
            g.components[name], bindings, t_index, g.order, t_order
        )
    return TruncatedMapJet(g.chart, f.source, g.order, comps, t_order)


def jet_invert(f: TruncatedMapJet) -> TruncatedMapJet:
    """Compositional inverse to the declared truncation orders.

    Same caveat as :func:`jet_compose`: with a drifting target the data of f
    only determine the inverse on combined degree <= the space order (the
    flow of a field is inverted exactly by reparametrize_t(-1) instead).
    """
    chart = f.chart
    n = chart.dim
    a = f.linear_matrix()
    a_inv = _mat_inv(a)
    if a_inv is None:
        raise ValueError("jet has a singular linear part")
    universe = f.universe
    t_index = f.t_index
    target0 = f.target_point()
    combined = f.order + (f.t_order or 0)
    disp = [Polynomial.variable(universe, v) for v in chart.variables]
    centered_f = {v: f.centered(v) for v in chart.variables}
    # fixed point: G <- G + A^{-1} (dy - F_centered(G))
    g_centered = {v: Polynomial.zero(universe) for v in chart.variables}
    for _ in range(max(combined, 1)):
        errs = []
        for i, v in enumerate(chart.variables):
            fg = substitute_truncated(
                centered_f[v], g_centered, t_index, f.order, f.t_order
            )
            errs.append(disp[i] - fg)
        new = {}
        for i, v in enumerate(chart.variables):
            acc = g_centered[v]
            for j in range(n):
                if a_inv[i][j]:
                    acc = acc + a_inv[i][j] * errs[j]
            new[v] = truncate_poly(acc, t_index, f.order, f.t_order)
        if new == g_centered:
            g_centered = new
            break
        g_centered = new
    comps = {
        v: Polynomial.const(universe, f.source[v]) + g_centered[v]
        for v in chart.variables
    }
    return TruncatedMapJet(chart, target0, f.order, comps, f.t_order)


def _mat_inv(mat: Sequence[Sequence[Fraction]]):
    n = len(mat)
    aug = [list(row) + [Q(1) if i == j else Q(0) for j in range(n)] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = Q(1) / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                factor = aug[r][col]
                aug[r] = [x - factor * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def compose_rf_with_jet(
    f: RationalFunction,
    jet: TruncatedMapJet,
    space_cap: int,
    t_cap: int | None = None,
) -> Polynomial:
    """Taylor expansion of f o jet around the jet's source point."""
    t_cap = jet.t_order if t_cap is None else t_cap
    target0 = jet.target_point()
    combined = space_cap + (t_cap or 0)
    base = taylor_shift_rf(f, target0, jet.universe, combined, jet.t_index)
    bindings = {v: jet.centered(v) for v in jet.chart.variables}
    return substitute_truncated(base, bindings, jet.t_index, space_cap, t_cap, combined)


# ---------------------------------------------------------------------------
# jets of tensors along a map jet
# ---------------------------------------------------------------------------


@dataclass
class FormJet:
    """Truncated Taylor data of a differential form at a point."""

    chart: Chart
    point: dict[str, Fraction]
    degree: int
    coeffs: dict[tuple[int, ...], Polynomial]
    space_order: int
    t_order: int | None

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self.coeffs.values())

    def __sub__(self, other: "FormJet") -> "FormJet":
        if (
            self.chart != other.chart
            or self.degree != other.degree
            or self.point != other.point
        ):
            raise ValueError("form jets are not comparable")
        keys = set(self.coeffs) | set(other.coeffs)
        universe = self.chart.variables + (T_NAME,)
        zero = Polynomial.zero(universe)
        out = {}
        for k in sorted(keys):
            d = self.coeffs.get(k, zero) - other.coeffs.get(k, zero)
            if not d.is_zero():
                out[k] = d
        return FormJet(self.chart, self.point, self.degree, out, self.space_order, self.t_order)

    def reduce_mod(self, ctx: QuotientContext) -> "FormJet":
        dropped = ctx.dropped_indices()
        kept = {
            idx: p for idx, p in self.coeffs.items() if not (set(idx) & dropped)
        }
        return FormJet(self.chart, self.point, self.degree, kept, self.space_order, self.t_order)

    def __repr__(self):
        if self.is_zero():
            return "0"
        names = self.chart.variables
        parts = []
        for idx in sorted(self.coeffs):
            basis = "^".join(f"d{names[i]}" for i in idx) if idx else "1"
            parts.append(f"({self.coeffs[idx]!r}) {basis}")
        return " + ".join(parts)


@dataclass
class FieldJet:
    """Truncated Taylor data of a vector field at a point."""

    chart: Chart
    point: dict[str, Fraction]
    components: dict[str, Polynomial]
    space_order: int
    t_order: int | None

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self.components.values())

    def __sub__(self, other: "FieldJet") -> "FieldJet":
        if self.chart != other.chart or self.point != other.point:
            raise ValueError("field jets are not comparable")
        out = {
            v: self.components[v] - other.components[v] for v in self.chart.variables
        }
        return FieldJet(self.chart, self.point, out, self.space_order, self.t_order)

    def __repr__(self):
        parts = [
            f"({p!r})*d/d{v}" for v, p in self.components.items() if not p.is_zero()
        ]
        return " + ".join(parts) if parts else "0"


def form_jet_of(
    omega: DifferentialForm,
    point: Mapping[str, Fraction],
    space_cap: int,
    t_cap: int | None,
) -> FormJet:
    """Expansion of an exact form at a point (no t dependence)."""
    chart = omega.chart
    universe = chart.variables + (T_NAME,)
    t_index = len(chart.variables)
    coeffs = {}
    for idx, c in omega.coeffs.items():
        p = taylor_shift_rf(c, point, universe, space_cap, t_index)
        if not p.is_zero():
            coeffs[idx] = p
    return FormJet(chart, dict(point), omega.degree, coeffs, space_cap, t_cap)


def field_jet_of(
    v: VectorField,
    point: Mapping[str, Fraction],
    space_cap: int,
    t_cap: int | None,
) -> FieldJet:
    chart = v.chart
    universe = chart.variables + (T_NAME,)
    t_index = len(chart.variables)
    comps = {}
    for name, c in zip(chart.variables, v.components):
        comps[name] = taylor_shift_rf(c, point, universe, space_cap, t_index)
    return FieldJet(chart, dict(point), comps, space_cap, t_cap)


def jet_pullback_form(f: TruncatedMapJet, omega: DifferentialForm) -> FormJet:
    """Pullback of a form through a map jet, truncated to order k-1 at the source."""
    if f.order < 1:
        raise ValueError("pullback needs a jet of order at least 1")
    if omega.chart != f.chart:
        raise ChartMismatchError("form lives on a different chart")
    chart = f.chart
    space_cap = f.order - 1
    t_cap = f.t_order
    t_index = f.t_index
    universe = f.universe
    grads = {
        name: [f.components[name].diff(v) for v in chart.variables]
        for name in chart.variables
    }
    out: dict[tuple[int, ...], Polynomial] = {}
    for idx, c in omega.coeffs.items():
        pulled_c = compose_rf_with_jet(c, f, space_cap, t_cap)
        if pulled_c.is_zero():
            continue
        rows = [grads[chart.variables[i]] for i in idx]
        for j_idx in _increasing(chart.dim, omega.degree):
            minor = [[rows[r][j] for j in j_idx] for r in range(len(idx))]
            det = _poly_det(minor, universe, t_index, space_cap, t_cap)
            if det.is_zero():
                continue
            term = _mul_trunc(pulled_c, det, t_index, space_cap, t_cap)
            if term.is_zero():
                continue
            cur = out.get(j_idx)
            cur = term if cur is None else cur + term
            if cur.is_zero():
                out.pop(j_idx, None)
            else:
                out[j_idx] = cur
    return FormJet(chart, dict(f.source), omega.degree, out, space_cap, t_cap)


def _increasing(n: int, k: int):
    return combinations(range(n), k)


def _poly_det(rows, universe, t_index, space_cap, t_cap) -> Polynomial:
    n = len(rows)
    if n == 0:
        return Polynomial.const(universe, 1)
    if n == 1:
        return rows[0][0]
    total = Polynomial.zero(universe)
    for j in range(n):
        if rows[0][j].is_zero():
            continue
        minor = [r[:j] + r[j + 1 :] for r in rows[1:]]
        sub = _poly_det(minor, universe, t_index, space_cap, t_cap)
        term = _mul_trunc(rows[0][j], sub, t_index, space_cap, t_cap)
        total = total + (term if j % 2 == 0 else -term)
    return total


def jet_pushforward_field(f: TruncatedMapJet, v: VectorField) -> FieldJet:
    """Pushforward of a field through a map jet, truncated to order k-1 at the target.

    Components are (Jacobian . v) composed with the jet inverse, so the
    drifting-jet caveat of :func:`jet_invert` applies; membership checks use
    the inversion-free source-side residual instead.
    """
    if f.order < 1:
        raise ValueError("pushforward needs a jet of order at least 1")
    if v.chart != f.chart:
        raise ChartMismatchError("field lives on a different chart")
    chart = f.chart
    space_cap = f.order - 1
    t_cap = f.t_order
    t_index = f.t_index
    universe = f.universe
    combined = space_cap + (t_cap or 0)
    # components of (Jacobian . v) at the source, kept to the combined cap only:
    # composing with the inverse jet below can trade space degree for t degree.
    v_exp = {
        name: taylor_shift_rf(comp, f.source, universe, combined, t_index)
        for name, comp in zip(chart.variables, v.components)
    }
    w = {}
    for name in chart.variables:
        acc = Polynomial.zero(universe)
        for jname in chart.variables:
            dfi = f.components[name].diff(jname)
            if dfi.is_zero():
                continue
            acc = acc + _mul_trunc(
                dfi, v_exp[jname], t_index, None, t_cap, combined
            )
        w[name] = truncate_poly(acc, t_index, None, t_cap, combined)
    g = jet_invert(f)
    bindings = {name: g.centered(name) for name in chart.variables}
    comps = {}
    for name in chart.variables:
        comps[name] = substitute_truncated(
            w[name], bindings, t_index, space_cap, t_cap, combined
        )
    return FieldJet(chart, f.target_point(), comps, space_cap, t_cap)


# ---------------------------------------------------------------------------
# frames: map jets as points of the jet chart
# ---------------------------------------------------------------------------


def jet_variable_values(jet: TruncatedMapJet) -> dict[str, Fraction]:
    """Values of the jet-chart coordinates on a map jet regarded as a frame.

    The i-th chart variable plays the role of the i-th source parameter, and
    ``x:e1e2`` evaluates to the corresponding Taylor coefficient times the
    multi-index factorial.  Only meaningful for jets without a t parameter.
    """
    if jet.t_order is not None:
        raise ValueError("frames must not carry a flow parameter")
    jc = JetChart(jet.chart, jet.order)
    values: dict[str, Fraction] = {}
    for name in jc.chart.variables:
        bname, alpha = jc.decode(name)
        mono = Monomial(
            (i - 1, c) for i, c in _multiplicities(alpha).items()
        )
        coeff = jet.components[bname].terms.get(mono, Q(0))
        values[name] = coeff * _alpha_factorial(alpha)
    return values


def _multiplicities(alpha: tuple[int, ...]) -> dict[int, int]:
    out: dict[int, int] = {}
    for i in alpha:
        out[i] = out.get(i, 0) + 1
    return out


def _alpha_factorial(alpha: tuple[int, ...]) -> int:
    out = 1
    for c in _multiplicities(alpha).values():
        out *= factorial(c)
    return out


# ---------------------------------------------------------------------------
# flows as one-parameter families of jets
# ---------------------------------------------------------------------------


def flow_of_field(
    v: VectorField,
    point: Mapping[str, Scalar],
    space_order: int,
    t_order: int,
) -> TruncatedMapJet:
    """The time-t flow of a rational field as a jet with formal parameter t.

    Built from the exponential series: the i-th component is
    sum_n t^n/n! (v^n x_i) expanded at the base point to the space order.
    The iterated derivatives are carried as numerators over a power of a
    common denominator, so no gcd is ever taken; the series solves
    d/dt Phi = v o Phi identically to the truncation orders and is the
    identity jet at t = 0.
    """
    from .exactalg import exact_div, poly_lcm

    chart = v.chart
    if space_order < 1 or t_order < 1:
        raise ValueError("flow orders must be at least 1")
    point = {name: Q(point[name]) for name in chart.variables}
    universe = chart.variables + (T_NAME,)
    t_index = len(chart.variables)

    den = Polynomial.const(chart.variables, 1)
    for comp in v.components:
        den = poly_lcm(den, comp.den)
    if den.eval_at(point) == 0:
        raise PoleError("base point is a pole of the field")
    nums = [comp.num * exact_div(den, comp.den) for comp in v.components]

    # truncated inverse powers of the shifted denominator
    c0 = den.eval_at(point)
    dsh = taylor_shift_poly(den, point, universe, space_order)
    u = Polynomial.const(universe, 1) - dsh * (Q(1) / c0)
    inv1 = Polynomial.const(universe, 1)
    one = Polynomial.const(universe, 1)
    for _ in range(space_order):
        inv1 = one + _mul_trunc(u, inv1, t_index, space_order, 0)

    def shifted(num: Polynomial, e: int) -> Polynomial:
        s = taylor_shift_poly(num, point, universe, space_order)
        if e == 0:
            return s
        inv = one
        for _ in range(e):
            inv = _mul_trunc(inv, inv1, t_index, space_order, 0)
        return _mul_trunc(s, inv, t_index, space_order, 0) * (Q(1) / c0**e)

    t_poly = Polynomial.variable(universe, T_NAME)
    comps: dict[str, Polynomial] = {}
    for name in chart.variables:
        num = Polynomial.variable(chart.variables, name)
        exp = 0
        total = shifted(num, 0)
        t_power = one
        fact = 1
        for n in range(1, t_order + 1):
            # X (num / den^exp) = sum_j A_j (den * d num/dx_j - exp * num * d den/dx_j) / den^(exp+2)
            new = Polynomial.zero(chart.variables)
            for a_j, var in zip(nums, chart.variables):
                if a_j.is_zero():
                    continue
                dn = num.diff(var)
                term = den * dn if not dn.is_zero() else Polynomial.zero(chart.variables)
                if exp:
                    dd = den.diff(var)
                    if not dd.is_zero():
                        term = term - (exp * num) * dd
                if not term.is_zero():
                    new = new + a_j * term
            num, exp = new, exp + 2
            fact *= n
            t_power = _mul_trunc(t_power, t_poly, t_index, space_order, t_order)
            if num.is_zero():
                break
            coeff = shifted(num, exp) * Q(1, fact)
            if not coeff.is_zero():
                total = total + _mul_trunc(coeff, t_power, t_index, space_order, t_order)
        comps[name] = total
    return TruncatedMapJet(chart, point, space_order, comps, t_order)
