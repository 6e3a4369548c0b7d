"""Pseudogroups presented by their defining data, and jet membership checks.

A :class:`GroupoidSpec` lists what a transformation must preserve: functions
it fixes, forms it pulls back to themselves (possibly modulo an ideal of
coordinate differentials), and fields it transports to themselves.  Membership
of a truncated map jet is decided by computing each residual exactly and
reporting whether all of them vanish to the truncation orders: functions are
checked to the jet's order k, tensor conditions to order k-1 (one derivative
is spent on the Jacobian).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cartan import (
    Chart,
    ChartMismatchError,
    DifferentialForm,
    QuotientContext,
    VectorField,
    lie_bracket,
    lie_derivative,
    reduce_mod,
)
from .exactalg import RationalFunction
from .jets import (
    FieldJet,
    TruncatedMapJet,
    _mul_trunc,
    compose_rf_with_jet,
    form_jet_of,
    jet_pullback_form,
    taylor_shift_rf,
)


@dataclass
class GroupoidSpec:
    """Defining data of a pseudogroup on a chart."""

    chart: Chart
    fixed_functions: list[RationalFunction] = field(default_factory=list)
    preserved_forms: list[DifferentialForm] = field(default_factory=list)
    quotient_forms: list[tuple[DifferentialForm, QuotientContext]] = field(default_factory=list)
    preserved_fields: list[VectorField] = field(default_factory=list)

    def __post_init__(self):
        for omega in self.preserved_forms:
            if omega.chart != self.chart:
                raise ChartMismatchError("preserved form on a different chart")
        for omega, ctx in self.quotient_forms:
            if omega.chart != self.chart or ctx.chart != self.chart:
                raise ChartMismatchError("quotient form data on a different chart")
        for v in self.preserved_fields:
            if v.chart != self.chart:
                raise ChartMismatchError("preserved field on a different chart")

    def datum_count(self) -> int:
        return (
            len(self.fixed_functions)
            + len(self.preserved_forms)
            + len(self.preserved_fields)
            + len(self.quotient_forms)
        )


@dataclass
class DatumResidual:
    datum_id: str
    residual: object
    vanished: bool

    def summary(self, limit: int = 120) -> str:
        text = "0" if self.vanished else repr(self.residual)
        if len(text) > limit:
            text = text[: limit - 3] + "..."
        return text


@dataclass
class MembershipReport:
    verdict: bool
    residuals: list[DatumResidual]

    @classmethod
    def collect(cls, residuals: list[DatumResidual]) -> "MembershipReport":
        return cls(all(r.vanished for r in residuals), residuals)

    def __bool__(self):
        return self.verdict


def membership(spec: GroupoidSpec, phi: TruncatedMapJet) -> MembershipReport:
    """Does the map jet satisfy every defining datum, to its truncation orders?

    Residuals are exact truncated expressions; for jets carrying the formal
    flow parameter they must vanish identically in t.
    """
    if phi.chart != spec.chart:
        raise ChartMismatchError("jet lives on a different chart than the spec")
    if phi.order < 1:
        raise ValueError("membership needs a jet of order at least 1")
    k = phi.order
    t_cap = phi.t_order
    universe = phi.universe
    t_index = phi.t_index
    residuals: list[DatumResidual] = []

    for i, w in enumerate(spec.fixed_functions):
        lhs = compose_rf_with_jet(w, phi, k, t_cap)
        rhs = taylor_shift_rf(w, phi.source, universe, k, t_index)
        diff = lhs - rhs
        residuals.append(DatumResidual(f"fixed[{i}]", diff, diff.is_zero()))

    for i, omega in enumerate(spec.preserved_forms):
        pulled = jet_pullback_form(phi, omega)
        base = form_jet_of(omega, phi.source, k - 1, t_cap)
        diff = pulled - base
        residuals.append(DatumResidual(f"form[{i}]", diff, diff.is_zero()))

    for i, (omega, ctx) in enumerate(spec.quotient_forms):
        pulled = jet_pullback_form(phi, omega)
        base = form_jet_of(omega, phi.source, k - 1, t_cap)
        diff = (pulled - base).reduce_mod(ctx)
        residuals.append(DatumResidual(f"quotient_form[{i}]", diff, diff.is_zero()))

    for i, v in enumerate(spec.preserved_fields):
        diff = _field_residual(phi, v)
        residuals.append(DatumResidual(f"field[{i}]", diff, diff.is_zero()))

    return MembershipReport.collect(residuals)


def _field_residual(phi: TruncatedMapJet, v: VectorField):
    """Residual of the field condition in its source-side form.

    phi transports v to itself iff Dphi . v = v o phi as truncated data at
    the source.  This formulation needs no jet inversion, so it stays exact
    for one-parameter families whose target point drifts with t.
    """
    chart = phi.chart
    k = phi.order
    t_cap = phi.t_order
    t_index = phi.t_index
    universe = phi.universe
    space_cap = k - 1
    v_exp = {
        name: taylor_shift_rf(comp, phi.source, universe, space_cap + (t_cap or 0), t_index)
        for name, comp in zip(chart.variables, v.components)
    }
    comps = {}
    for name in chart.variables:
        acc = compose_rf_with_jet(v.component(name), phi, space_cap, t_cap)
        for jname in chart.variables:
            dfi = phi.components[name].diff(jname)
            if dfi.is_zero():
                continue
            acc = acc - _mul_trunc(dfi, v_exp[jname], t_index, space_cap, t_cap)
        comps[name] = acc
    return FieldJet(chart, dict(phi.source), comps, space_cap, t_cap)


def infinitesimal_membership(
    v: VectorField,
    fixed_functions: list[RationalFunction],
    volume: DifferentialForm,
    ctx: QuotientContext,
    frame_field: VectorField,
) -> MembershipReport:
    """Infinitesimal version: v kills the fixed functions, commutes with the
    frame field, and preserves the volume modulo the quotient ideal, exactly."""
    chart = v.chart
    if frame_field.chart != chart or volume.chart != chart or ctx.chart != chart:
        raise ChartMismatchError("infinitesimal data live on different charts")
    residuals: list[DatumResidual] = []
    for i, w in enumerate(fixed_functions):
        r = v.apply(w)
        residuals.append(DatumResidual(f"fixed[{i}]", r, r.is_zero()))
    br = lie_bracket(v, frame_field)
    residuals.append(DatumResidual("bracket", br, br.is_zero()))
    lv = reduce_mod(lie_derivative(v, volume), ctx)
    residuals.append(DatumResidual("volume", lv, lv.is_zero()))
    return MembershipReport.collect(residuals)


# ---------------------------------------------------------------------------
# stock examples
# ---------------------------------------------------------------------------


def volume_spec(chart: Chart, density: RationalFunction) -> GroupoidSpec:
    """Transformations preserving the volume form density * dx_1 ^ ... ^ dx_m."""
    m = chart.dim
    omega = DifferentialForm(chart, m, {tuple(range(m)): density})
    return GroupoidSpec(chart, preserved_forms=[omega])


def translation_spec(chart: Chart, axis: str) -> GroupoidSpec:
    """Translations along one axis: every coordinate differential is preserved
    and every other coordinate is fixed."""
    forms = [DifferentialForm.d_coordinate(chart, name) for name in chart.variables]
    fixed = [chart.rf(name) for name in chart.variables if name != axis]
    return GroupoidSpec(chart, fixed_functions=fixed, preserved_forms=forms)
