"""Coordinate differential calculus on an affine chart.

Vector fields and differential forms carry exact rational-function
coefficients.  Forms are stored only on strictly increasing index tuples; all
signs come from sorting permutations, so equality of forms is a comparison of
coefficient maps.  The Lie derivative is computed directly from the component
formula; the Cartan identity ``L_v = i_v d + d i_v`` is kept as an independent
cross-check (exercised by the test suite), not as the implementation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .exactalg import Polynomial, Q, RationalFunction, Scalar


class ChartMismatchError(ValueError):
    """Operands live on different charts."""


@dataclass(frozen=True)
class Chart:
    """An ordered tuple of coordinate names; the order is fixed for its lifetime."""

    variables: tuple[str, ...]

    def __init__(self, variables: Iterable[str]):
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise ValueError("chart variables must be pairwise distinct")
        object.__setattr__(self, "variables", variables)

    @property
    def dim(self) -> int:
        return len(self.variables)

    def index(self, name: str) -> int:
        return self.variables.index(name)

    def rf(self, name: str) -> RationalFunction:
        return RationalFunction.variable(self.variables, name)

    def const(self, value) -> RationalFunction:
        return RationalFunction.const(self.variables, value)

    def zero_rf(self) -> RationalFunction:
        return RationalFunction.const(self.variables, 0)


def _check_chart(a, b):
    if a.chart != b.chart:
        raise ChartMismatchError(
            f"chart mismatch: {a.chart.variables} vs {b.chart.variables}"
        )


def _as_rf(chart: Chart, value) -> RationalFunction:
    if isinstance(value, RationalFunction):
        return value
    if isinstance(value, Polynomial):
        return RationalFunction(value)
    return chart.const(value)


class VectorField:
    """A rational vector field: one coefficient per chart coordinate direction."""

    __slots__ = ("chart", "components")

    def __init__(self, chart: Chart, components: Sequence):
        components = tuple(_as_rf(chart, c) for c in components)
        if len(components) != chart.dim:
            raise ValueError("component count must equal the chart dimension")
        self.chart = chart
        self.components = components

    @classmethod
    def from_dict(cls, chart: Chart, components: Mapping[str, object]) -> "VectorField":
        return cls(
            chart,
            [components.get(v, chart.const(0)) for v in chart.variables],
        )

    @classmethod
    def coordinate(cls, chart: Chart, name: str) -> "VectorField":
        """The coordinate direction field for ``name``."""
        return cls.from_dict(chart, {name: chart.const(1)})

    def component(self, name: str) -> RationalFunction:
        return self.components[self.chart.index(name)]

    def apply(self, f: RationalFunction) -> RationalFunction:
        """Apply as a derivation: sum of components times partials."""
        total = self.chart.zero_rf()
        for name, comp in zip(self.chart.variables, self.components):
            if comp.is_zero():
                continue
            total = total + comp * f.diff(name)
        return total

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __add__(self, other: "VectorField") -> "VectorField":
        _check_chart(self, other)
        return VectorField(
            self.chart, [a + b for a, b in zip(self.components, other.components)]
        )

    def __sub__(self, other: "VectorField") -> "VectorField":
        _check_chart(self, other)
        return VectorField(
            self.chart, [a - b for a, b in zip(self.components, other.components)]
        )

    def __neg__(self) -> "VectorField":
        return VectorField(self.chart, [-c for c in self.components])

    def __mul__(self, scalar) -> "VectorField":
        scalar = _as_rf(self.chart, scalar)
        return VectorField(self.chart, [scalar * c for c in self.components])

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return self.chart == other.chart and self.components == other.components

    def __repr__(self):
        parts = [
            f"({c})*d/d{v}"
            for v, c in zip(self.chart.variables, self.components)
            if not c.is_zero()
        ]
        return " + ".join(parts) if parts else "0"


def _sort_with_sign(indices: Sequence[int]) -> tuple[tuple[int, ...], int]:
    """Sort an index tuple, returning (sorted tuple, permutation sign); 0 if repeated."""
    idx = list(indices)
    if len(set(idx)) != len(idx):
        return tuple(idx), 0
    sign = 1
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    return tuple(idx), sign


class DifferentialForm:
    """A degree-k form with coefficients on strictly increasing index tuples."""

    __slots__ = ("chart", "degree", "coeffs")

    def __init__(self, chart: Chart, degree: int, coeffs: Mapping[tuple[int, ...], object]):
        if degree < 0:
            raise ValueError("form degree must be non-negative")
        self.chart = chart
        self.degree = degree
        clean: dict[tuple[int, ...], RationalFunction] = {}
        for idx, c in coeffs.items():
            idx = tuple(idx)
            if len(idx) != degree:
                raise ValueError("index tuple length must equal the form degree")
            if any(idx[i] >= idx[i + 1] for i in range(len(idx) - 1)):
                raise ValueError("index tuples must be strictly increasing")
            if idx and (idx[0] < 0 or idx[-1] >= chart.dim):
                raise ValueError("index outside chart")
            c = _as_rf(chart, c)
            if not c.is_zero():
                clean[idx] = c
        self.coeffs = clean

    @classmethod
    def zero(cls, chart: Chart, degree: int) -> "DifferentialForm":
        return cls(chart, degree, {})

    @classmethod
    def function(cls, chart: Chart, f) -> "DifferentialForm":
        return cls(chart, 0, {(): _as_rf(chart, f)})

    @classmethod
    def d_coordinate(cls, chart: Chart, name: str) -> "DifferentialForm":
        """The coordinate differential of ``name``."""
        return cls(chart, 1, {(chart.index(name),): chart.const(1)})

    @classmethod
    def from_named(cls, chart: Chart, degree: int, coeffs: Mapping[tuple[str, ...], object]) -> "DifferentialForm":
        out: dict[tuple[int, ...], RationalFunction] = {}
        for names, c in coeffs.items():
            idx, sign = _sort_with_sign(tuple(chart.index(n) for n in names))
            if sign == 0:
                continue
            c = _as_rf(chart, c) * sign
            if idx in out:
                c = out[idx] + c
            out[idx] = c
        return cls(chart, degree, out)

    def coefficient(self, indices: Sequence[int]) -> RationalFunction:
        """Coefficient on an arbitrary index tuple, with antisymmetric sign."""
        idx, sign = _sort_with_sign(tuple(indices))
        if sign == 0:
            return self.chart.zero_rf()
        c = self.coeffs.get(idx)
        if c is None:
            return self.chart.zero_rf()
        return c if sign == 1 else -c

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "DifferentialForm") -> "DifferentialForm":
        _check_chart(self, other)
        if self.degree != other.degree:
            raise ValueError("cannot add forms of different degrees")
        out = dict(self.coeffs)
        for idx, c in other.coeffs.items():
            s = out.get(idx, self.chart.zero_rf()) + c
            if s.is_zero():
                out.pop(idx, None)
            else:
                out[idx] = s
        return DifferentialForm(self.chart, self.degree, out)

    def __sub__(self, other: "DifferentialForm") -> "DifferentialForm":
        return self + (-other)

    def __neg__(self) -> "DifferentialForm":
        return DifferentialForm(
            self.chart, self.degree, {i: -c for i, c in self.coeffs.items()}
        )

    def __mul__(self, scalar) -> "DifferentialForm":
        scalar = _as_rf(self.chart, scalar)
        return DifferentialForm(
            self.chart, self.degree, {i: scalar * c for i, c in self.coeffs.items()}
        )

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        return (
            self.chart == other.chart
            and self.degree == other.degree
            and self.coeffs == other.coeffs
        )

    def __repr__(self):
        if not self.coeffs:
            return "0"
        names = self.chart.variables
        parts = []
        for idx in sorted(self.coeffs):
            basis = "^".join(f"d{names[i]}" for i in idx) if idx else "1"
            parts.append(f"({self.coeffs[idx]}) {basis}")
        return " + ".join(parts)


@dataclass(frozen=True)
class QuotientContext:
    """Ideal of coordinate differentials: everything involving ``dropped`` is killed."""

    chart: Chart
    dropped: frozenset[str]

    def __init__(self, chart: Chart, dropped: Iterable[str]):
        dropped = frozenset(dropped)
        unknown = dropped - set(chart.variables)
        if unknown:
            raise ValueError(f"dropped names not on chart: {sorted(unknown)}")
        object.__setattr__(self, "chart", chart)
        object.__setattr__(self, "dropped", dropped)

    def dropped_indices(self) -> frozenset[int]:
        return frozenset(self.chart.index(n) for n in self.dropped)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def lie_bracket(v: VectorField, w: VectorField) -> VectorField:
    """[v, w], with components v(w_i) - w(v_i)."""
    _check_chart(v, w)
    return VectorField(
        v.chart, [v.apply(wc) - w.apply(vc) for vc, wc in zip(v.components, w.components)]
    )


def exterior_derivative(omega: DifferentialForm) -> DifferentialForm:
    chart = omega.chart
    k = omega.degree
    if k >= chart.dim:
        return DifferentialForm.zero(chart, k + 1)
    out: dict[tuple[int, ...], RationalFunction] = {}
    for idx, c in omega.coeffs.items():
        for j, name in enumerate(chart.variables):
            if j in idx:
                continue
            dc = c.diff(name)
            if dc.is_zero():
                continue
            new_idx, sign = _sort_with_sign((j,) + idx)
            term = dc if sign == 1 else -dc
            s = out.get(new_idx)
            s = term if s is None else s + term
            if s.is_zero():
                out.pop(new_idx, None)
            else:
                out[new_idx] = s
    return DifferentialForm(chart, k + 1, out)


def wedge(alpha: DifferentialForm, beta: DifferentialForm) -> DifferentialForm:
    _check_chart(alpha, beta)
    chart = alpha.chart
    k = alpha.degree + beta.degree
    if k > chart.dim:
        return DifferentialForm.zero(chart, k)
    out: dict[tuple[int, ...], RationalFunction] = {}
    for ia, ca in alpha.coeffs.items():
        for ib, cb in beta.coeffs.items():
            idx, sign = _sort_with_sign(ia + ib)
            if sign == 0:
                continue
            term = ca * cb * sign
            s = out.get(idx)
            s = term if s is None else s + term
            if s.is_zero():
                out.pop(idx, None)
            else:
                out[idx] = s
    return DifferentialForm(chart, k, out)


def interior_product(v: VectorField, omega: DifferentialForm) -> DifferentialForm:
    _check_chart(v, omega)
    if omega.degree == 0:
        raise ValueError("interior product needs a form of degree at least 1")
    chart = omega.chart
    out: dict[tuple[int, ...], RationalFunction] = {}
    for idx, c in omega.coeffs.items():
        for pos, i in enumerate(idx):
            comp = v.components[i]
            if comp.is_zero():
                continue
            rest = idx[:pos] + idx[pos + 1 :]
            term = comp * c
            if pos % 2:
                term = -term
            s = out.get(rest)
            s = term if s is None else s + term
            if s.is_zero():
                out.pop(rest, None)
            else:
                out[rest] = s
    return DifferentialForm(chart, omega.degree - 1, out)


def lie_derivative(v: VectorField, omega: DifferentialForm) -> DifferentialForm:
    """Component formula: v(w_I) plus one Jacobian contraction per index slot."""
    _check_chart(v, omega)
    chart = omega.chart
    k = omega.degree
    if k == 0:
        return DifferentialForm.function(chart, v.apply(omega.coefficient(())))
    partials = [
        [comp.diff(name) for comp in v.components] for name in chart.variables
    ]
    out: dict[tuple[int, ...], RationalFunction] = {}

    def add(idx, term):
        if term.is_zero():
            return
        s = out.get(idx)
        s = term if s is None else s + term
        if s.is_zero():
            out.pop(idx, None)
        else:
            out[idx] = s

    for idx, c in omega.coeffs.items():
        add(idx, v.apply(c))
    # contraction terms: sum_s sum_j (d v_j / d x_{i_s}) * w_{i_1 .. j .. i_k}
    for idx in _increasing_tuples(chart.dim, k):
        total = chart.zero_rf()
        for pos in range(k):
            i_s = idx[pos]
            for j in range(chart.dim):
                dvj = partials[i_s][j]
                if dvj.is_zero():
                    continue
                w = omega.coefficient(idx[:pos] + (j,) + idx[pos + 1 :])
                if w.is_zero():
                    continue
                total = total + dvj * w
        add(idx, total)
    return DifferentialForm(chart, k, out)


def _increasing_tuples(n: int, k: int):
    if k == 0:
        yield ()
        return
    idx = list(range(k))
    if k > n:
        return
    while True:
        yield tuple(idx)
        for pos in range(k - 1, -1, -1):
            if idx[pos] < n - (k - pos):
                idx[pos] += 1
                for p2 in range(pos + 1, k):
                    idx[p2] = idx[p2 - 1] + 1
                break
        else:
            return


def reduce_mod(omega: DifferentialForm, ctx: QuotientContext) -> DifferentialForm:
    """Project out every component whose index tuple meets the dropped coordinates."""
    if ctx.chart != omega.chart:
        raise ChartMismatchError("quotient context lives on a different chart")
    dropped = ctx.dropped_indices()
    kept = {
        idx: c for idx, c in omega.coeffs.items() if not (set(idx) & dropped)
    }
    return DifferentialForm(omega.chart, omega.degree, kept)


def divergence(v: VectorField, volume: DifferentialForm) -> RationalFunction:
    """div(v) with respect to a top-degree volume: Lie_v volume = div(v) * volume."""
    _check_chart(v, volume)
    chart = v.chart
    if volume.degree != chart.dim:
        raise ValueError("volume form must have top degree")
    idx = tuple(range(chart.dim))
    w = volume.coeffs.get(idx)
    if w is None:
        raise ValueError("volume form must be nowhere the zero form")
    lv = lie_derivative(v, volume)
    return lv.coefficient(idx) / w


def pushforward(
    v: VectorField,
    mapping: Mapping[str, RationalFunction],
    inverse: Mapping[str, RationalFunction],
) -> VectorField:
    """Transport v through an invertible rational coordinate change.

    ``mapping`` expresses the new coordinates in terms of the old ones and
    ``inverse`` the old in terms of the new; the composition is verified to be
    the identity before anything is transported.
    """
    chart = v.chart
    for name in chart.variables:
        if name not in mapping or name not in inverse:
            raise ValueError(f"coordinate change must cover variable {name!r}")
    for name in chart.variables:
        back = mapping[name].substitute(inverse)
        if back != chart.rf(name):
            raise ValueError(f"map and inverse do not compose to the identity on {name!r}")
    comps = []
    for name in chart.variables:
        pushed = v.apply(mapping[name]).substitute(inverse)
        comps.append(pushed)
    return VectorField(chart, comps)
