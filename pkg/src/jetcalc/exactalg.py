"""Exact sparse multivariate polynomial and rational-function arithmetic over Q.

Conventions used throughout the package:

* Coefficients are ``fractions.Fraction`` (arbitrary precision, exact).
  Algebraic-number coefficients are deliberately out of scope.
* A polynomial lives over an ordered *universe* of variable names; terms are
  kept in a sparse map from exponent vectors to nonzero coefficients.
* The canonical term order is graded lexicographic with respect to the
  declared variable order (total degree first, then lex on exponents).
* A rational function is stored fully reduced: gcd(numerator, denominator)
  is 1 and the denominator is a primitive integer polynomial whose leading
  coefficient (in the canonical order) is positive.  Equality is therefore a
  plain comparison of term maps.
* The zero polynomial has an empty term map; its degree is the sentinel
  ``-inf`` so degree bookkeeping needs no special cases.

Everything here is immutable after construction and all operations are pure.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd as _int_gcd
from typing import Iterable, Mapping, Union

Q = Fraction

Scalar = Union[int, Fraction]

NEG_INF = float("-inf")


class PoleError(ZeroDivisionError):
    """Evaluation or substitution ran into a vanishing denominator."""


def _q(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


class Monomial:
    """Sparse exponent vector: pairs (variable index, exponent > 0), sorted by index."""

    __slots__ = ("exps", "_hash", "_degree")

    def __init__(self, exps: Iterable[tuple[int, int]] = ()):
        pairs = tuple(sorted((i, e) for i, e in exps if e != 0))
        for i, e in pairs:
            if e < 0 or i < 0:
                raise ValueError(f"bad exponent pair ({i}, {e})")
        self.exps = pairs
        self._hash = hash(pairs)
        self._degree = sum(e for _, e in pairs)

    @property
    def degree(self) -> int:
        return self._degree

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return isinstance(other, Monomial) and self.exps == other.exps

    def is_one(self) -> bool:
        return not self.exps

    def exp_of(self, index: int) -> int:
        for i, e in self.exps:
            if i == index:
                return e
            if i > index:
                return 0
        return 0

    def indices(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.exps)

    def mul(self, other: "Monomial") -> "Monomial":
        a, b = self.exps, other.exps
        if not a:
            return other
        if not b:
            return self
        out = []
        ia = ib = 0
        la, lb = len(a), len(b)
        while ia < la and ib < lb:
            i1, e1 = a[ia]
            i2, e2 = b[ib]
            if i1 == i2:
                out.append((i1, e1 + e2))
                ia += 1
                ib += 1
            elif i1 < i2:
                out.append((i1, e1))
                ia += 1
            else:
                out.append((i2, e2))
                ib += 1
        out.extend(a[ia:])
        out.extend(b[ib:])
        m = Monomial.__new__(Monomial)
        m.exps = tuple(out)
        m._hash = hash(m.exps)
        m._degree = self._degree + other._degree
        return m

    def divides(self, other: "Monomial") -> bool:
        it = dict(other.exps)
        return all(it.get(i, 0) >= e for i, e in self.exps)

    def div(self, other: "Monomial") -> "Monomial":
        """Exact quotient self / other; other must divide self."""
        it = dict(self.exps)
        for i, e in other.exps:
            r = it.get(i, 0) - e
            if r < 0:
                raise ValueError("monomial division is not exact")
            if r == 0:
                it.pop(i, None)
            else:
                it[i] = r
        return Monomial(it.items())

    def gcd(self, other: "Monomial") -> "Monomial":
        ot = dict(other.exps)
        return Monomial((i, min(e, ot[i])) for i, e in self.exps if i in ot)

    def remap(self, index_map: Mapping[int, int]) -> "Monomial":
        return Monomial((index_map[i], e) for i, e in self.exps)

    def sort_key(self):
        """Ascending sort by this key lists monomials in descending graded-lex order."""
        return (-self._degree, tuple((i, -e) for i, e in self.exps))

    def __repr__(self):
        return f"Monomial({self.exps!r})"


_ONE_MONO = Monomial()


class Polynomial:
    """Sparse polynomial over Q with an ordered variable universe."""

    __slots__ = ("universe", "terms")

    def __init__(self, universe: tuple[str, ...], terms: Mapping[Monomial, Fraction]):
        self.universe = tuple(universe)
        clean: dict[Monomial, Fraction] = {}
        n = len(self.universe)
        for m, c in terms.items():
            c = _q(c)
            if c == 0:
                continue
            if m.exps and m.exps[-1][0] >= n:
                raise ValueError("monomial index outside the variable universe")
            clean[m] = c
        self.terms = clean

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, universe) -> "Polynomial":
        return cls(universe, {})

    @classmethod
    def const(cls, universe, value) -> "Polynomial":
        value = _q(value)
        return cls(universe, {_ONE_MONO: value} if value else {})

    @classmethod
    def variable(cls, universe, name: str) -> "Polynomial":
        universe = tuple(universe)
        try:
            i = universe.index(name)
        except ValueError:
            raise ValueError(f"unknown variable {name!r}") from None
        return cls(universe, {Monomial(((i, 1),)): Q(1)})

    # -- basic queries ------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and _ONE_MONO in self.terms)

    def const_value(self) -> Fraction:
        if not self.terms:
            return Q(0)
        if self.is_const():
            return self.terms[_ONE_MONO]
        raise ValueError("polynomial is not constant")

    def degree(self):
        if not self.terms:
            return NEG_INF
        return max(m.degree for m in self.terms)

    def degree_in(self, name: str) -> int:
        i = self.universe.index(name)
        return max((m.exp_of(i) for m in self.terms), default=0)

    def variables_present(self) -> tuple[str, ...]:
        seen: set[int] = set()
        for m in self.terms:
            seen.update(m.indices())
        return tuple(self.universe[i] for i in sorted(seen))

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        """Terms in descending graded-lex order (canonical iteration order)."""
        return sorted(self.terms.items(), key=lambda t: t[0].sort_key())

    def leading(self) -> tuple[Monomial, Fraction]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        m = min(self.terms, key=Monomial.sort_key)
        return m, self.terms[m]

    # -- universe management -----------------------------------------

    def with_universe(self, universe: tuple[str, ...]) -> "Polynomial":
        """Reinterpret over a universe that extends the current one as a prefix."""
        universe = tuple(universe)
        if universe == self.universe:
            return self
        if universe[: len(self.universe)] != self.universe:
            raise ValueError("universe is not a prefix extension")
        p = Polynomial.__new__(Polynomial)
        p.universe = universe
        p.terms = self.terms
        return p

    def remap_universe(self, universe: tuple[str, ...]) -> "Polynomial":
        """Re-express over an arbitrary universe containing all used variables."""
        universe = tuple(universe)
        if universe[: len(self.universe)] == self.universe:
            return self.with_universe(universe)
        index_map = {}
        for i, name in enumerate(self.universe):
            try:
                index_map[i] = universe.index(name)
            except ValueError:
                index_map[i] = -1
        terms = {}
        for m, c in self.terms.items():
            for i, _ in m.exps:
                if index_map[i] < 0:
                    raise ValueError(
                        f"variable {self.universe[i]!r} missing from target universe"
                    )
            terms[m.remap(index_map)] = c
        p = Polynomial.__new__(Polynomial)
        p.universe = universe
        p.terms = terms
        return p

    # -- arithmetic ---------------------------------------------------

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        return Polynomial.const(self.universe, other)

    def __add__(self, other):
        if isinstance(other, RationalFunction):
            return NotImplemented
        other = self._coerce(other)
        a, b = align(self, other)
        terms = dict(a.terms)
        for m, c in b.terms.items():
            s = terms.get(m, 0) + c
            if s:
                terms[m] = s
            else:
                terms.pop(m, None)
        return _raw(a.universe, terms)

    __radd__ = __add__

    def __neg__(self):
        return _raw(self.universe, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, RationalFunction):
            return NotImplemented
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, RationalFunction):
            return NotImplemented
        if isinstance(other, (int, Fraction)):
            c = _q(other)
            if c == 0:
                return Polynomial.zero(self.universe)
            return _raw(self.universe, {m: c * v for m, v in self.terms.items()})
        a, b = align(self, self._coerce(other))
        if len(a.terms) < len(b.terms):
            a, b = b, a
        out: dict[Monomial, Fraction] = {}
        for mb, cb in b.terms.items():
            for ma, ca in a.terms.items():
                m = ma.mul(mb)
                s = out.get(m, 0) + ca * cb
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        return _raw(a.universe, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial powers must be non-negative integers")
        result = Polynomial.const(self.universe, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base_needed = n > 1
            n >>= 1
            if base_needed and n:
                base = base * base
        return result

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            c = _q(other)
            if c == 0:
                raise ZeroDivisionError("division by zero")
            return self * (Q(1) / c)
        return RationalFunction(self, other)

    def __rtruediv__(self, other):
        return RationalFunction(self._coerce(other), self)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_const() and self.const_value() == other
        if isinstance(other, RationalFunction):
            return other == self
        if not isinstance(other, Polynomial):
            return NotImplemented
        a, b = align(self, other)
        return a.terms == b.terms

    def __hash__(self):
        if self.is_const():
            return hash(self.const_value())
        return hash((self.universe, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    # -- calculus and evaluation ---------------------------------------

    def diff(self, name: str) -> "Polynomial":
        try:
            i = self.universe.index(name)
        except ValueError:
            raise ValueError(f"unknown variable {name!r}") from None
        out: dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            e = m.exp_of(i)
            if e == 0:
                continue
            pairs = [(j, x) for j, x in m.exps if j != i]
            if e > 1:
                pairs.append((i, e - 1))
            m2 = Monomial(pairs)
            s = out.get(m2, 0) + c * e
            if s:
                out[m2] = s
            else:
                out.pop(m2, None)
        return _raw(self.universe, out)

    def eval_at(self, point: Mapping[str, Scalar]) -> Fraction:
        idx_val: dict[int, Fraction] = {}
        for name, v in point.items():
            if name in self.universe:
                idx_val[self.universe.index(name)] = _q(v)
        total = Q(0)
        powers: dict[tuple[int, int], Fraction] = {}
        for m, c in self.terms.items():
            factor = c
            for i, e in m.exps:
                if i not in idx_val:
                    raise ValueError(
                        f"no value supplied for variable {self.universe[i]!r}"
                    )
                key = (i, e)
                p = powers.get(key)
                if p is None:
                    p = idx_val[i] ** e
                    powers[key] = p
                factor *= p
            total += factor
        return total

    def substitute(self, bindings: Mapping[str, "Polynomial | Scalar"]) -> "Polynomial":
        """Simultaneous polynomial substitution; unbound variables persist."""
        idx_val: dict[int, Polynomial] = {}
        target = self.universe
        for name, v in bindings.items():
            if name not in self.universe:
                continue
            if not isinstance(v, Polynomial):
                v = Polynomial.const(self.universe, v)
            target = _merge_universes(target, v.universe)
            idx_val[self.universe.index(name)] = v
        if not idx_val:
            return self
        values = {i: v.remap_universe(target) for i, v in idx_val.items()}
        one = Polynomial.const(target, 1)
        total = Polynomial.zero(target)
        powers: dict[tuple[int, int], Polynomial] = {}
        for m, c in self.terms.items():
            factor = one * c
            plain = []
            for i, e in m.exps:
                if i in values:
                    key = (i, e)
                    p = powers.get(key)
                    if p is None:
                        p = values[i] ** e
                        powers[key] = p
                    factor = factor * p
                else:
                    plain.append((target.index(self.universe[i]), e))
            if plain:
                factor = factor * _raw(target, {Monomial(plain): Q(1)})
            total = total + factor
        return total

    # -- content and primitive parts -----------------------------------

    def signed_content(self) -> Fraction:
        """Rational c with self/c integer, coprime coefficients and positive leading one."""
        if not self.terms:
            return Q(1)
        num_gcd = 0
        den_lcm = 1
        for c in self.terms.values():
            num_gcd = _int_gcd(num_gcd, abs(c.numerator))
            den_lcm = den_lcm // _int_gcd(den_lcm, c.denominator) * c.denominator
        content = Q(num_gcd, den_lcm)
        if self.leading()[1] < 0:
            content = -content
        return content

    def primitive_part(self) -> "Polynomial":
        if not self.terms:
            return self
        return self * (Q(1) / self.signed_content())

    def monomial_content(self) -> Monomial:
        it = iter(self.terms)
        g = next(it)
        for m in it:
            if g.is_one():
                break
            g = g.gcd(m)
        return g

    def div_monomial(self, m: Monomial) -> "Polynomial":
        if m.is_one():
            return self
        return _raw(self.universe, {t.div(m): c for t, c in self.terms.items()})

    def coefficients_in(self, name: str) -> dict[int, "Polynomial"]:
        """View as univariate in ``name``: power -> coefficient polynomial."""
        i = self.universe.index(name)
        out: dict[int, dict[Monomial, Fraction]] = {}
        for m, c in self.terms.items():
            e = m.exp_of(i)
            rest = Monomial((j, x) for j, x in m.exps if j != i)
            out.setdefault(e, {})[rest] = c
        return {e: _raw(self.universe, t) for e, t in out.items()}

    def __repr__(self):
        return format_polynomial(self)


def _raw(universe: tuple[str, ...], terms: dict[Monomial, Fraction]) -> Polynomial:
    p = Polynomial.__new__(Polynomial)
    p.universe = universe
    p.terms = terms
    return p


def _merge_universes(a: tuple[str, ...], b: tuple[str, ...]) -> tuple[str, ...]:
    if a == b or b == a[: len(b)]:
        return a
    if a == b[: len(a)]:
        return b
    extra = tuple(v for v in b if v not in a)
    return a + extra


def align(a: Polynomial, b: Polynomial) -> tuple[Polynomial, Polynomial]:
    """Bring two polynomials onto a common universe."""
    if a.universe == b.universe:
        return a, b
    u = _merge_universes(a.universe, b.universe)
    return a.remap_universe(u), b.remap_universe(u)


# ---------------------------------------------------------------------------
# gcd machinery
# ---------------------------------------------------------------------------


def exact_div(f: Polynomial, g: Polynomial) -> Polynomial:
    """Exact polynomial quotient f/g; raises ValueError if g does not divide f."""
    f, g = align(f, g)
    if g.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    if g.is_const():
        return f * (Q(1) / g.const_value())
    gm, gc = g.leading()
    quot: dict[Monomial, Fraction] = {}
    rem = dict(f.terms)
    while rem:
        r = _raw(f.universe, rem)
        rm, rc = r.leading()
        if not gm.divides(rm):
            raise ValueError("polynomial division is not exact")
        qm = rm.div(gm)
        qc = rc / gc
        quot[qm] = qc
        for m, c in g.terms.items():
            key = m.mul(qm)
            s = rem.get(key, 0) - c * qc
            if s:
                rem[key] = s
            else:
                rem.pop(key, None)
    return _raw(f.universe, quot)


def _pseudo_rem(f: Polynomial, g: Polynomial, name: str) -> Polynomial:
    """A pseudo-remainder of f by g with respect to ``name`` (primitive PRS use)."""
    dg = g.degree_in(name)
    gcoeffs = g.coefficients_in(name)
    lg = gcoeffs[dg]
    i = f.universe.index(name)
    r = f
    while not r.is_zero():
        dr = r.degree_in(name)
        if dr < dg:
            break
        rcoeffs = r.coefficients_in(name)
        lr = rcoeffs[dr]
        shift = _raw(r.universe, {Monomial(((i, dr - dg),)) if dr > dg else _ONE_MONO: Q(1)})
        r = lg * r - lr * shift * g
    return r


def _content_pp(f: Polynomial, name: str) -> tuple[Polynomial, Polynomial]:
    coeffs = f.coefficients_in(name)
    items = [coeffs[e] for e in sorted(coeffs)]
    cont = items[0]
    for p in items[1:]:
        cont = poly_gcd(cont, p)
        if cont.is_const():
            break
    cont = cont.primitive_part() if not cont.is_const() else Polynomial.const(f.universe, 1)
    return cont, exact_div(f, cont)


def poly_gcd(f: Polynomial, g: Polynomial) -> Polynomial:
    """Primitive gcd over Q: integer coprime coefficients, positive leading one.

    Recursive content/primitive-part reduction with a primitive pseudo-remainder
    sequence in the innermost variable.  Trivial monomial content is split off
    first, and a one-variable operand (the usual shape of denominators) is
    handled by an evaluate-and-verify shortcut instead of the full recursion.
    """
    f, g = align(f, g)
    if f.is_zero():
        return g.primitive_part()
    if g.is_zero():
        return f.primitive_part()
    mf, mg = f.monomial_content(), g.monomial_content()
    mono = mf.gcd(mg)
    f = f.div_monomial(mf)
    g = g.div_monomial(mg)
    core = None
    vs_f, vs_g = f.variables_present(), g.variables_present()
    if len(vs_g) == 1 and not g.is_const():
        core = _gcd_one_var_side(f, g, vs_g[0], vs_f)
    elif len(vs_f) == 1 and not f.is_const():
        core = _gcd_one_var_side(g, f, vs_f[0], vs_g)
    if core is None:
        core = _gcd_primitive(f, g)
    if not mono.is_one():
        core = core * _raw(core.universe, {mono: Q(1)})
    return core


def _univ_divmod(a: dict[int, Fraction], b: dict[int, Fraction]) -> dict[int, Fraction]:
    """Remainder of univariate division, coefficients as sparse degree maps."""
    db = max(b)
    lb = b[db]
    r = dict(a)
    while r:
        dr = max(r)
        if dr < db:
            break
        factor = r[dr] / lb
        for e, c in b.items():
            key = e + dr - db
            s = r.get(key, 0) - factor * c
            if s:
                r[key] = s
            else:
                r.pop(key, None)
    return r


def _univ_gcd(a: dict[int, Fraction], b: dict[int, Fraction]) -> dict[int, Fraction]:
    while b:
        a, b = b, _univ_divmod(a, b)
    return a


def _as_univ(p: Polynomial, name: str) -> dict[int, Fraction]:
    i = p.universe.index(name)
    return {m.exp_of(i): c for m, c in p.terms.items()}


def _from_univ(universe: tuple[str, ...], name: str, coeffs: dict[int, Fraction]) -> Polynomial:
    i = universe.index(name)
    return _raw(
        universe,
        {Monomial(((i, e),)) if e else _ONE_MONO: c for e, c in coeffs.items() if c},
    )


_EVAL_SEED = (3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def _gcd_one_var_side(
    multi: Polynomial, uni: Polynomial, name: str, multi_vars: tuple[str, ...]
) -> Polynomial | None:
    """gcd when one operand involves a single variable.

    The gcd then divides the one-variable operand, so it is found by a
    univariate Euclid against an evaluation of the other operand, verified by
    exact division; bad evaluation points only ever enlarge the candidate, so
    verification failures shrink it with fresh points.  Returns None to fall
    back to the generic recursion (never expected in practice).
    """
    one = Polynomial.const(multi.universe, 1)
    if name not in multi_vars:
        return one
    others = [v for v in multi_vars if v != name]
    cand = _as_univ(uni, name)
    coeffs = multi.coefficients_in(name)
    for attempt in range(4):
        point = {
            v: Q(_EVAL_SEED[i % len(_EVAL_SEED)] + 100 * attempt + i)
            for i, v in enumerate(others)
        }
        evald = {e: c.eval_at(point) for e, c in coeffs.items()}
        evald = {e: c for e, c in evald.items() if c}
        if not evald:
            continue
        cand = _univ_gcd(cand, evald)
        if max(cand) == 0:
            return one
        cand_poly = _from_univ(multi.universe, name, cand).primitive_part()
        try:
            exact_div(multi, cand_poly)
            return cand_poly
        except ValueError:
            continue
    return None


def _gcd_primitive(f: Polynomial, g: Polynomial) -> Polynomial:
    one = Polynomial.const(f.universe, 1)
    if f.is_const() or g.is_const():
        return one
    if f.terms == g.terms:
        return f.primitive_part()
    vf = set(f.variables_present())
    vg = set(g.variables_present())
    common = vf & vg
    if not common:
        return one
    # innermost declared variable that appears in both
    name = next(v for v in reversed(f.universe) if v in common)
    cf, pf = _content_pp(f, name)
    cg, pg = _content_pp(g, name)
    c = poly_gcd(cf, cg)
    if pf.degree_in(name) < pg.degree_in(name):
        pf, pg = pg, pf
    a, b = pf, pg
    while True:
        r = _pseudo_rem(a, b, name)
        if r.is_zero():
            h = _content_pp(b, name)[1].primitive_part()
            break
        if r.degree_in(name) == 0:
            h = one
            break
        a, b = b, _content_pp(r, name)[1]
    return (c * h).primitive_part() if not (c.is_const() and h.is_const()) else one


def poly_lcm(f: Polynomial, g: Polynomial) -> Polynomial:
    if f.is_zero() or g.is_zero():
        return Polynomial.zero(f.universe)
    return exact_div(f * g, poly_gcd(f, g)).primitive_part()


# ---------------------------------------------------------------------------
# rational functions
# ---------------------------------------------------------------------------


class RationalFunction:
    """Reduced quotient of two polynomials over a shared variable universe."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if isinstance(num, RationalFunction):
            if den is not None:
                raise TypeError("cannot pair a RationalFunction numerator with a denominator")
            self.num, self.den = num.num, num.den
            return
        if not isinstance(num, Polynomial):
            raise TypeError("numerator must be a Polynomial")
        if den is None:
            den = Polynomial.const(num.universe, 1)
        elif not isinstance(den, Polynomial):
            den = Polynomial.const(num.universe, den)
        num, den = align(num, den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        self.num, self.den = _reduce(num, den)

    @classmethod
    def _wrap(cls, num: Polynomial, den: Polynomial) -> "RationalFunction":
        rf = cls.__new__(cls)
        rf.num, rf.den = num, den
        return rf

    @classmethod
    def const(cls, universe, value) -> "RationalFunction":
        return cls(Polynomial.const(universe, value))

    @classmethod
    def variable(cls, universe, name: str) -> "RationalFunction":
        return cls(Polynomial.variable(universe, name))

    @property
    def universe(self) -> tuple[str, ...]:
        return self.num.universe

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_const()

    def as_polynomial(self) -> Polynomial:
        if not self.den.is_const():
            raise ValueError("rational function has a nontrivial denominator")
        return self.num * (Q(1) / self.den.const_value())

    def is_const(self) -> bool:
        return self.num.is_const() and self.den.is_const()

    def const_value(self) -> Fraction:
        return self.num.const_value() / self.den.const_value()

    # -- arithmetic ---------------------------------------------------

    def _coerce(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Polynomial):
            return RationalFunction(other)
        return RationalFunction.const(self.universe, other)

    def __add__(self, other):
        b = self._coerce(other)
        a = self
        if a.num.is_zero():
            return b
        if b.num.is_zero():
            return a
        if a.den == b.den:
            return RationalFunction(a.num + b.num, a.den)
        d = poly_gcd(a.den, b.den)
        if d.is_const():
            num = a.num * b.den + b.num * a.den
            den = a.den * b.den
            c = den.signed_content()
            return RationalFunction._wrap(num * (Q(1) / c), den * (Q(1) / c))
        bq = exact_div(b.den, d)
        num = a.num * bq + b.num * exact_div(a.den, d)
        g = poly_gcd(num, d)
        if not g.is_const():
            num = exact_div(num, g)
            d2 = exact_div(a.den, g) * bq
        else:
            d2 = a.den * bq
        c = d2.signed_content()
        return RationalFunction._wrap(num * (Q(1) / c), d2 * (Q(1) / c))

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction._wrap(-self.num, self.den)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        b = self._coerce(other)
        g1 = poly_gcd(self.num, b.den)
        g2 = poly_gcd(b.num, self.den)
        n1 = self.num if g1.is_const() else exact_div(self.num, g1)
        d2 = b.den if g1.is_const() else exact_div(b.den, g1)
        n2 = b.num if g2.is_const() else exact_div(b.num, g2)
        d1 = self.den if g2.is_const() else exact_div(self.den, g2)
        num = n1 * n2
        den = d1 * d2
        if num.is_zero():
            return RationalFunction._wrap(num, Polynomial.const(num.universe, 1))
        c = den.signed_content()
        return RationalFunction._wrap(num * (Q(1) / c), den * (Q(1) / c))

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._coerce(other)
        if b.num.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return self * RationalFunction._wrap(b.den, b.num)._renormalize()

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def _renormalize(self) -> "RationalFunction":
        c = self.den.signed_content()
        return RationalFunction._wrap(self.num * (Q(1) / c), self.den * (Q(1) / c))

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise ValueError("rational-function powers must be integers")
        if n < 0:
            if self.num.is_zero():
                raise ZeroDivisionError("negative power of zero")
            return RationalFunction._wrap(self.den, self.num)._renormalize() ** (-n)
        return RationalFunction._wrap(self.num**n, self.den**n)._renormalize()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Polynomial)):
            other = self._coerce(other)
        if not isinstance(other, RationalFunction):
            return NotImplemented
        an, bn = align(self.num, other.num)
        ad, bd = align(self.den, other.den)
        return an.terms == bn.terms and ad.terms == bd.terms

    def __bool__(self):
        return not self.num.is_zero()

    def __hash__(self):
        return hash((self.num, self.den))

    # -- calculus and evaluation ---------------------------------------

    def diff(self, name: str) -> "RationalFunction":
        if name not in self.universe:
            raise ValueError(f"unknown variable {name!r}")
        if self.den.is_const():
            return RationalFunction(self.num.diff(name), self.den)
        dn = self.num.diff(name)
        dd = self.den.diff(name)
        if dd.is_zero():
            return RationalFunction(dn, self.den)
        g = poly_gcd(self.den, dd)
        if g.is_const():
            # num and den coprime and den coprime to den': the quotient-rule
            # fraction is already reduced, and den^2 is already canonical
            num = dn * self.den - self.num * dd
            if num.is_zero():
                return RationalFunction.const(self.universe, 0)
            return RationalFunction._wrap(num, self.den * self.den)
        u = exact_div(self.den, g)
        e = exact_div(dd, g)
        return RationalFunction(dn * u - self.num * e, self.den * u)

    def substitute(self, bindings: Mapping[str, "RationalFunction | Polynomial | Scalar"]) -> "RationalFunction":
        """Simultaneous substitution; raises PoleError if the denominator collapses."""
        num, den = self.substitute_raw(bindings)
        if den.is_zero():
            raise PoleError("substitution produced an identically zero denominator")
        return RationalFunction(num, den)

    def substitute_raw(
        self, bindings: Mapping[str, "RationalFunction | Polynomial | Scalar"]
    ) -> tuple[Polynomial, Polynomial]:
        """Substitution as an unreduced numerator/denominator pair.

        Denominators are cleared once per polynomial instead of per term, and
        no gcd is taken; callers that only need a zero test can cross-multiply.
        """
        rf_bindings: dict[str, RationalFunction] = {}
        for name, v in bindings.items():
            if name in self.universe:
                rf_bindings[name] = self._coerce(v)
        if not rf_bindings:
            return self.num, self.den
        n1, d1 = _poly_substitute_pair(self.num, rf_bindings)
        n2, d2 = _poly_substitute_pair(self.den, rf_bindings)
        if n2.is_zero():
            return n1 * d2, Polynomial.zero(n1.universe)
        return n1 * d2, d1 * n2

    def eval_at(self, point: Mapping[str, Scalar]) -> Fraction:
        d = self.den.eval_at(point)
        if d == 0:
            raise PoleError("pole at evaluation point")
        return self.num.eval_at(point) / d

    def __repr__(self):
        return format_rational(self)


def _reduce(num: Polynomial, den: Polynomial) -> tuple[Polynomial, Polynomial]:
    if num.is_zero():
        return num, Polynomial.const(num.universe, 1)
    if not den.is_const():
        g = poly_gcd(num, den)
        if not g.is_const():
            num = exact_div(num, g)
            den = exact_div(den, g)
    c = den.signed_content()
    if c != 1:
        num = num * (Q(1) / c)
        den = den * (Q(1) / c)
    return num, den


def _poly_substitute_pair(
    poly: Polynomial, bindings: Mapping[str, RationalFunction]
) -> tuple[Polynomial, Polynomial]:
    """poly with the bindings applied, as an unreduced (numerator, denominator).

    The denominator is the product of the binding denominators raised to the
    largest exponent of the corresponding variable, so each term contributes
    pure polynomial factors.
    """
    universe = poly.universe
    for v in bindings.values():
        universe = _merge_universes(universe, v.universe)
    idx_val: dict[int, RationalFunction] = {}
    for name, v in bindings.items():
        idx_val[poly.universe.index(name)] = v
    max_exp: dict[int, int] = {}
    for m, _ in poly.terms.items():
        for i, e in m.exps:
            if i in idx_val and not idx_val[i].den.is_const():
                max_exp[i] = max(max_exp.get(i, 0), e)
    num_pow: dict[tuple[int, int], Polynomial] = {}
    den_pow: dict[tuple[int, int], Polynomial] = {}
    one = Polynomial.const(universe, 1)

    def npow(i: int, e: int) -> Polynomial:
        key = (i, e)
        p = num_pow.get(key)
        if p is None:
            p = idx_val[i].num.remap_universe(universe) ** e
            num_pow[key] = p
        return p

    def dpow(i: int, e: int) -> Polynomial:
        key = (i, e)
        p = den_pow.get(key)
        if p is None:
            p = idx_val[i].den.remap_universe(universe) ** e
            den_pow[key] = p
        return p

    total = Polynomial.zero(universe)
    for m, c in poly.terms.items():
        factor = one * c
        plain = []
        exps = dict(m.exps)
        for i, e in exps.items():
            if i in idx_val:
                factor = factor * npow(i, e)
            else:
                plain.append((universe.index(poly.universe[i]), e))
        for i, top in max_exp.items():
            deficit = top - exps.get(i, 0)
            if deficit > 0:
                factor = factor * dpow(i, deficit)
        if plain:
            factor = factor * _raw(universe, {Monomial(plain): Q(1)})
        total = total + factor
    den = one
    for i, top in max_exp.items():
        den = den * dpow(i, top)
    return total, den


# ---------------------------------------------------------------------------
# printing (canonical; the expression parser round-trips this format)
# ---------------------------------------------------------------------------


def _format_coeff(c: Fraction) -> str:
    return str(c) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_monomial(m: Monomial, universe: tuple[str, ...]) -> str:
    if m.is_one():
        return "1"
    parts = []
    for i, e in m.exps:
        parts.append(universe[i] if e == 1 else f"{universe[i]}^{e}")
    return "*".join(parts)


def format_polynomial(p: Polynomial) -> str:
    if p.is_zero():
        return "0"
    chunks: list[str] = []
    for m, c in p.sorted_terms():
        neg = c < 0
        ac = -c if neg else c
        if m.is_one():
            body = _format_coeff(ac)
        elif ac == 1:
            body = format_monomial(m, p.universe)
        else:
            body = f"{_format_coeff(ac)}*{format_monomial(m, p.universe)}"
        if not chunks:
            chunks.append(f"-{body}" if neg else body)
        else:
            chunks.append(f"- {body}" if neg else f"+ {body}")
    return " ".join(chunks)


def format_rational(rf: RationalFunction) -> str:
    if rf.den.is_const() and rf.den.const_value() == 1:
        return format_polynomial(rf.num)
    return f"({format_polynomial(rf.num)})/({format_polynomial(rf.den)})"
