"""The Painlevé VI family on C^7, in Hamiltonian and second-order form.

The Hamiltonian chart carries (x, p, q, a, b, c, e) with the polynomial
Hamiltonian in Okamoto form (stored verbatim, including the (e-1) twist) and
the field X = d/dx + H_q d/dp - H_p d/dq.  The second-order chart carries
(x, u, v, a, b, c, e) with u'' = F(x, u, v, a, b, c, e).

Two presentations of F are kept.  ``F`` has the parameters entering linearly;
it is the presentation in which the dominant finite map

    (x, p, q, a, b, c, e) -> (x, p, dH/dq, c^2/2, a^2/2, b^2/2, e^2/2)

transports X onto Y = d/dx + v d/du + F d/dv (the map is 2^4 : 1 in the
parameters, whence "finite").  ``F_theta`` is the classical form in which the
parameters appear through their half-squares; it equals F composed with the
parameter squaring, and the parameter-identity map (x,p,q,a,b,c,e) ->
(x,p,dH/dq,a,b,c,e) transports X onto Y_theta.  Both factorizations are
verified exactly by check_conjugation / check_conjugation_theta.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .cartan import Chart, DifferentialForm, QuotientContext, VectorField, wedge
from .exactalg import PoleError, Q, RationalFunction, Scalar
from .groupoid import DatumResidual, GroupoidSpec, MembershipReport
from .jets import TruncatedMapJet, flow_of_field
from .parsing import parse_expression

CHART7_VARS = ("x", "p", "q", "a", "b", "c", "e")
ALT7_VARS = ("x", "u", "v", "a", "b", "c", "e")

_H_TEXT = (
    "(p*(p-1)*(p-x)*q^2"
    " - (a*(p-1)*(p-x) + b*p*(p-x) + (e-1)*p*(p-1))*q"
    " + ((a+b+e-1)^2 - c^2)*(p-x)/4)"
    " / (x*(x-1))"
)

_F_PREFIX = (
    "(1/u + 1/(u-1) + 1/(u-x))*v^2/2 - (1/x + 1/(x-1) + 1/(u-x))*v"
    " + (u*(u-1)*(u-x)/(x^2*(x-1)^2)) * "
)

_F_LINEAR_TEXT = _F_PREFIX + (
    "(a - b*x/u^2 + c*(x-1)/(u-1)^2 + (1/2 - e)*x*(x-1)/(u-x)^2)"
)

_F_THETA_TEXT = _F_PREFIX + (
    "(c^2/2 - (a^2/2)*x/u^2 + (b^2/2)*(x-1)/(u-1)^2 + ((1-e^2)/2)*x*(x-1)/(u-x)^2)"
)

DEFAULT_FLOW_BASE: dict[str, Fraction] = {
    "x": Q(2), "p": Q(3), "q": Q(1), "a": Q(1), "b": Q(1), "c": Q(1), "e": Q(1),
}


@dataclass
class PVIModel:
    chart7: Chart
    alt_chart7: Chart
    H: RationalFunction
    X: VectorField
    Y: VectorField
    F: RationalFunction
    Y_theta: VectorField
    F_theta: RationalFunction
    conj: dict[str, RationalFunction]
    conj_theta: dict[str, RationalFunction]
    pi_vars: tuple[str, ...]
    rhobar_vars: tuple[str, ...]

    def symplectic_form(self) -> DifferentialForm:
        return wedge(
            DifferentialForm.d_coordinate(self.chart7, "p"),
            DifferentialForm.d_coordinate(self.chart7, "q"),
        )


def build_model() -> PVIModel:
    """Construct the model and re-verify its structural identities."""
    chart7 = Chart(CHART7_VARS)
    alt7 = Chart(ALT7_VARS)
    H = parse_expression(_H_TEXT, chart7)
    Hq = H.diff("q")
    Hp = H.diff("p")
    X = VectorField.from_dict(chart7, {"x": chart7.const(1), "p": Hq, "q": -Hp})

    F = parse_expression(_F_LINEAR_TEXT, alt7)
    Y = VectorField.from_dict(alt7, {"x": alt7.const(1), "u": alt7.rf("v"), "v": F})
    F_theta = parse_expression(_F_THETA_TEXT, alt7)
    Y_theta = VectorField.from_dict(
        alt7, {"x": alt7.const(1), "u": alt7.rf("v"), "v": F_theta}
    )

    half = Q(1, 2)
    conj = {
        "x": chart7.rf("x"),
        "u": chart7.rf("p"),
        "v": Hq,
        "a": chart7.rf("c") ** 2 * half,
        "b": chart7.rf("a") ** 2 * half,
        "c": chart7.rf("b") ** 2 * half,
        "e": chart7.rf("e") ** 2 * half,
    }
    conj_theta = {
        "x": chart7.rf("x"),
        "u": chart7.rf("p"),
        "v": Hq,
        "a": chart7.rf("a"),
        "b": chart7.rf("b"),
        "c": chart7.rf("c"),
        "e": chart7.rf("e"),
    }
    model = PVIModel(
        chart7=chart7,
        alt_chart7=alt7,
        H=H,
        X=X,
        Y=Y,
        F=F,
        Y_theta=Y_theta,
        F_theta=F_theta,
        conj=conj,
        conj_theta=conj_theta,
        pi_vars=("x", "a", "b", "c", "e"),
        rhobar_vars=("a", "b", "c", "e"),
    )
    _verify_construction(model)
    return model


def _verify_construction(m: PVIModel):
    if not (m.X.apply(m.chart7.rf("x")) == 1):
        raise AssertionError("X x must be 1")
    for par in m.rhobar_vars:
        if not m.X.apply(m.chart7.rf(par)).is_zero():
            raise AssertionError(f"X must annihilate {par}")
    prefactor = parse_expression("x*(x-1)", m.chart7)
    poly = (prefactor * m.H).as_polynomial()
    q2 = poly.coefficients_in("q").get(2)
    expected = parse_expression("p*(p-1)*(p-x)", m.chart7).as_polynomial()
    if q2 != expected:
        raise AssertionError("q^2 coefficient of x(x-1)H must be p(p-1)(p-x)")
    # F in the half-square parameter chart, composed with the squaring, is the theta form
    sq = {
        "a": parse_expression("c^2/2", ALT7_VARS),
        "b": parse_expression("a^2/2", ALT7_VARS),
        "c": parse_expression("b^2/2", ALT7_VARS),
        "e": parse_expression("e^2/2", ALT7_VARS),
    }
    if not _cross_residual(m.F_theta, m.F.substitute_raw(sq)).is_zero():
        raise AssertionError("F composed with the parameter squaring must equal F_theta")


def _onto(rf: RationalFunction, universe: tuple[str, ...]) -> RationalFunction:
    return RationalFunction._wrap(
        rf.num.remap_universe(universe), rf.den.remap_universe(universe)
    )


def _cross_residual(lhs: RationalFunction, rhs_pair) -> "Polynomial":
    """Numerator of lhs - num/den by cross multiplication; zero iff they agree.

    Skipping the reduction keeps the conjugation checks purely polynomial.
    """
    num, den = rhs_pair
    return lhs.num * den - num * lhs.den


def _conjugation_residuals(
    m: PVIModel, conj: Mapping[str, RationalFunction], field: VectorField
) -> MembershipReport:
    residuals = []
    for name in m.alt_chart7.variables:
        lhs = m.X.apply(conj[name])
        rhs_pair = field.component(name).substitute_raw(conj)
        diff = _cross_residual(lhs, rhs_pair)
        residuals.append(DatumResidual(f"conj[{name}]", diff, diff.is_zero()))
    return MembershipReport.collect(residuals)


def check_conjugation(m: PVIModel) -> MembershipReport:
    """X (w o conj) = (Y w) o conj for all seven target coordinates, exactly."""
    return _conjugation_residuals(m, m.conj, m.Y)


def check_conjugation_theta(m: PVIModel) -> MembershipReport:
    """Same check through the parameter-identity map and the theta-form field."""
    return _conjugation_residuals(m, m.conj_theta, m.Y_theta)


def malgrange_spec(m: PVIModel) -> GroupoidSpec:
    """Defining data of the Malgrange-Galois groupoid of the family:
    parameters fixed, dx preserved, X preserved, dp^dq preserved modulo
    the differentials of the basic variables (x, a, b, c, e)."""
    chart = m.chart7
    return GroupoidSpec(
        chart,
        fixed_functions=[chart.rf(v) for v in m.rhobar_vars],
        preserved_forms=[DifferentialForm.d_coordinate(chart, "x")],
        quotient_forms=[
            (m.symplectic_form(), QuotientContext(chart, m.pi_vars))
        ],
        preserved_fields=[m.X],
    )


def fiberwise_spec(m: PVIModel, params: Mapping[str, Scalar]) -> GroupoidSpec:
    """The fixed-parameter groupoid on (x, p, q): dx and the restricted field
    preserved, dp^dq preserved modulo dx.  The defining data of the fixed-
    parameter Malgrange groupoid for parameters outside the Picard set."""
    values = {name: Q(params[name]) for name in m.rhobar_vars}
    chart3 = Chart(("x", "p", "q"))
    h3 = _onto(m.H.substitute(values), chart3.variables)
    x3 = VectorField.from_dict(
        chart3, {"x": chart3.const(1), "p": h3.diff("q"), "q": -h3.diff("p")}
    )
    dpdq = wedge(
        DifferentialForm.d_coordinate(chart3, "p"),
        DifferentialForm.d_coordinate(chart3, "q"),
    )
    return GroupoidSpec(
        chart3,
        preserved_forms=[DifferentialForm.d_coordinate(chart3, "x")],
        quotient_forms=[(dpdq, QuotientContext(chart3, ("x",)))],
        preserved_fields=[x3],
    )


def picard_predicate(a: Scalar, b: Scalar, c: Scalar, e: Scalar) -> bool:
    """All four parameters half-integers, or all integers with even sum."""
    vals = [Q(v) for v in (a, b, c, e)]
    if all(v.denominator == 1 for v in vals):
        return sum(v.numerator for v in vals) % 2 == 0
    return all((v - Q(1, 2)).denominator == 1 for v in vals)


def flow_jet(
    m: PVIModel,
    base: Mapping[str, Scalar] | None = None,
    space_order: int = 2,
    t_order: int = 4,
) -> TruncatedMapJet:
    """Exact truncated flow of X from a rational base point (x outside {0,1})."""
    if base is None:
        base = DEFAULT_FLOW_BASE
    return flow_of_field(m.X, base, space_order, t_order)


# ---------------------------------------------------------------------------
# Backlund fixtures
# ---------------------------------------------------------------------------


@dataclass
class BacklundFixture:
    """Externally supplied candidate symmetry of the family.

    The translation symmetries of the family are catalogued in the literature
    rather than derived here, so they enter as data: seven forward components
    on the Hamiltonian chart, four claimed integer parameter shifts, and
    optionally the inverse components.
    """

    name: str
    forward: dict[str, RationalFunction]
    shifts: dict[str, int]
    inverse: dict[str, RationalFunction] | None = None


def verify_backlund(m: PVIModel, fx: BacklundFixture) -> MembershipReport:
    """Exact checks: x is fixed, parameters shift by the claimed integers,
    and the map transports X to X as rational identities."""
    chart = m.chart7
    residuals = []
    rx = fx.forward["x"] - chart.rf("x")
    residuals.append(DatumResidual("fixes[x]", rx, rx.is_zero()))
    for par in m.rhobar_vars:
        shift = fx.shifts.get(par)
        if shift is None or not isinstance(shift, int):
            raise ValueError(f"fixture must declare an integer shift for {par!r}")
        r = fx.forward[par] - (chart.rf(par) + chart.const(shift))
        residuals.append(DatumResidual(f"shift[{par}]", r, r.is_zero()))
    for name in chart.variables:
        lhs = m.X.apply(fx.forward[name])
        rhs_pair = m.X.component(name).substitute_raw(fx.forward)
        diff = _cross_residual(lhs, rhs_pair)
        residuals.append(DatumResidual(f"transport[{name}]", diff, diff.is_zero()))
    if fx.inverse is not None:
        for name in chart.variables:
            n, d = fx.forward[name].substitute_raw(fx.inverse)
            diff = n - chart.rf(name).num.remap_universe(n.universe) * d
            residuals.append(DatumResidual(f"inverse[{name}]", diff, diff.is_zero()))
    return MembershipReport.collect(residuals)


def identity_fixture(m: PVIModel) -> BacklundFixture:
    chart = m.chart7
    return BacklundFixture(
        name="identity",
        forward={name: chart.rf(name) for name in chart.variables},
        shifts={par: 0 for par in m.rhobar_vars},
        inverse={name: chart.rf(name) for name in chart.variables},
    )
