"""Command-line entry point: named check suites with deterministic reports.

Each suite re-runs one family of exact verifications and emits one line per
check.  Output is deterministic: in machine mode (``--machine``) the bytes
depend only on the flags, and the human format differs only by an optional
timestamp header (``--no-timestamp`` drops it).  The process exits 0 exactly
when every check of the requested suite passes.
"""

from __future__ import annotations

import argparse
import random
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import painleve
from .cartan import Chart, DifferentialForm, VectorField, lie_bracket, lie_derivative, reduce_mod
from .exactalg import Polynomial, Q, RationalFunction
from .groupoid import membership, translation_spec, volume_spec
from .jets import (
    JetChart,
    TruncatedMapJet,
    flow_of_field,
    frame_volume_invariant,
    jet_compose,
    jet_variable_values,
    prolong,
    check_invariant,
    total_derivative,
)
from .parsing import ParseError, parse_expression
from .symbols import bracket_surjectivity_check, h_basis, transvection_solve

SUITE_NAMES = (
    "pvi-invariants",
    "pvi-conjugation",
    "pvi-flow-membership",
    "airy",
    "volume-groupoid",
    "integrable",
    "kiso-transvection",
    "kiso-surjectivity",
    "jets-core",
    "backlund-fixtures",
)


@dataclass
class SuiteOptions:
    order: int = 2
    torder: int = 4
    base: dict[str, Fraction] | None = None
    m: int | None = None
    q: int | None = None
    kmax: int = 2
    fixtures: str = "fixtures"
    seed: int = 0
    trials: int = 50


@dataclass
class CheckResult:
    check_id: str
    passed: bool
    detail: str = ""


@dataclass
class SuiteReport:
    suite: str
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> int:
        return sum(1 for c in self.checks if c.passed)

    @property
    def exit_status(self) -> int:
        return 0 if all(c.passed for c in self.checks) else 1

    def render(self, machine: bool = False, timestamp: bool = True) -> str:
        lines: list[str] = []
        if machine:
            for c in self.checks:
                status = "pass" if c.passed else "fail"
                detail = c.detail.replace(" ", "-") if c.detail else "-"
                lines.append(
                    f"suite={self.suite} check={c.check_id} status={status} detail={detail}"
                )
            overall = "pass" if self.exit_status == 0 else "fail"
            lines.append(
                f"suite={self.suite} result={overall} passed={self.passed} total={len(self.checks)}"
            )
        else:
            lines.append(f"# jetcalc suite: {self.suite}")
            if timestamp:
                lines.append(f"# timestamp: {time.strftime('%Y-%m-%dT%H:%M:%S')}")
            width = max((len(c.check_id) for c in self.checks), default=10) + 2
            for c in self.checks:
                status = "pass" if c.passed else "FAIL"
                lines.append(f"{c.check_id:<{width}}{status:<6}{c.detail}")
            overall = "pass" if self.exit_status == 0 else "FAIL"
            lines.append(f"# result: {overall} ({self.passed}/{len(self.checks)})")
        return "\n".join(lines) + "\n"


def _residual_check(check_id: str, vanished: bool) -> CheckResult:
    return CheckResult(check_id, vanished, "residual 0" if vanished else "residual nonzero")


def _verdict_check(check_id: str, verdict: bool, expected: bool) -> CheckResult:
    detail = f"verdict {str(verdict).lower()} expected {str(expected).lower()}"
    return CheckResult(check_id, verdict == expected, detail)


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------


def _suite_pvi_invariants(options: SuiteOptions) -> SuiteReport:
    from .cartan import QuotientContext, exterior_derivative, interior_product

    m = painleve.build_model()
    report = SuiteReport("pvi-invariants")
    chart = m.chart7
    dx = DifferentialForm.d_coordinate(chart, "x")
    report.checks.append(_residual_check("lie-x-dx", lie_derivative(m.X, dx).is_zero()))
    for par in m.rhobar_vars:
        report.checks.append(
            _residual_check(f"x-kills-{par}", m.X.apply(chart.rf(par)).is_zero())
        )
    ld = lie_derivative(m.X, m.symplectic_form())
    ctx = QuotientContext(chart, m.pi_vars)
    report.checks.append(_residual_check("lie-x-dpdq-mod-base", reduce_mod(ld, ctx).is_zero()))
    cartan_route = exterior_derivative(interior_product(m.X, m.symplectic_form()))
    report.checks.append(_residual_check("cartan-identity-route", ld == cartan_route))
    return report


def _suite_pvi_conjugation(options: SuiteOptions) -> SuiteReport:
    m = painleve.build_model()
    report = SuiteReport("pvi-conjugation")
    rep = painleve.check_conjugation(m)
    for r in rep.residuals:
        report.checks.append(_residual_check(r.datum_id, r.vanished))
    theta = painleve.check_conjugation_theta(m)
    report.checks.append(
        _residual_check("theta-route-all", all(r.vanished for r in theta.residuals))
    )
    return report


def _suite_pvi_flow_membership(options: SuiteOptions) -> SuiteReport:
    m = painleve.build_model()
    report = SuiteReport("pvi-flow-membership")
    base = options.base or painleve.DEFAULT_FLOW_BASE
    fl = painleve.flow_jet(m, base, options.order, options.torder)
    ident = TruncatedMapJet.identity(m.chart7, base, options.order, None)
    report.checks.append(
        CheckResult(
            "flow-at-t0-is-identity",
            fl.at_time_zero() == ident,
            f"base order {options.order} t-order {options.torder}",
        )
    )
    rep = membership(painleve.malgrange_spec(m), fl)
    for r in rep.residuals:
        report.checks.append(_residual_check(r.datum_id, r.vanished))
    return report


def _airy_data():
    chart = Chart(("x", "u11", "u12", "u21", "u22"))
    x = chart.rf("x")
    X = VectorField.from_dict(
        chart,
        {
            "x": chart.const(1),
            "u11": chart.rf("u21"),
            "u12": chart.rf("u22"),
            "u21": x * chart.rf("u11"),
            "u22": x * chart.rf("u12"),
        },
    )
    delta = parse_expression("u11*u22 - u12*u21", chart)
    return chart, X, delta


def _suite_airy(options: SuiteOptions) -> SuiteReport:
    report = SuiteReport("airy")
    chart, X, delta = _airy_data()
    report.checks.append(
        _verdict_check("determinant-invariant", check_invariant(X, delta, 0), True)
    )
    jc0 = JetChart(chart, 0)
    for j in range(1, chart.dim + 1):
        dj = total_derivative(jc0, delta, j)
        report.checks.append(
            _verdict_check(f"d{j}-determinant-invariant", check_invariant(X, dj, 1), True)
        )
    report.checks.append(
        _verdict_check("x-not-invariant", check_invariant(X, chart.rf("x"), 0), False)
    )
    return report


def _suite_volume_groupoid(options: SuiteOptions) -> SuiteReport:
    report = SuiteReport("volume-groupoid")
    ch2 = Chart(("x1", "x2"))
    spec = volume_spec(ch2, ch2.const(1))
    origin = {"x1": Q(0), "x2": Q(0)}
    det1 = TruncatedMapJet.affine(ch2, origin, origin, [[1, 1], [0, 1]], 2)
    det2 = TruncatedMapJet.affine(ch2, origin, origin, [[2, 0], [0, 1]], 2)
    report.checks.append(_verdict_check("det-1-linear-accepted", membership(spec, det1).verdict, True))
    report.checks.append(_verdict_check("det-2-linear-rejected", membership(spec, det2).verdict, False))

    ch1 = Chart(("x",))
    spec1 = volume_spec(ch1, 1 / ch1.rf("x"))
    u = ch1.variables + ("t",)
    xd = Polynomial.variable(u, "x")
    doubling = TruncatedMapJet(ch1, {"x": Q(1)}, 3, {"x": Polynomial.const(u, 2) + 2 * xd})
    report.checks.append(
        _verdict_check("y-2x-density-1-over-x-accepted", membership(spec1, doubling).verdict, True)
    )
    shifted = TruncatedMapJet(ch1, {"x": Q(1)}, 3, {"x": Polynomial.const(u, 2) + xd})
    report.checks.append(
        _verdict_check("translation-density-1-over-x-rejected", membership(spec1, shifted).verdict, False)
    )

    # frame invariant: det(x_{i:e_j}) f(x) takes equal values on a frame and
    # its composition with a volume-preserving jet based at the frame target
    lam = frame_volume_invariant(ch2.const(1), ch2)
    target = {"x1": Q(1), "x2": Q(2)}
    frame = TruncatedMapJet.affine(ch2, origin, target, [[1, 2], [1, 3]], 1)
    sigma = TruncatedMapJet.affine(ch2, target, {"x1": Q(4), "x2": Q(-1)}, [[3, 1], [5, 2]], 1)
    composed = jet_compose(sigma, frame)
    v1 = lam.eval_at(jet_variable_values(frame))
    v2 = lam.eval_at(jet_variable_values(composed))
    report.checks.append(
        CheckResult("frame-invariant-constant-on-orbit", v1 == v2, f"value {v1}")
    )
    return report


def _suite_integrable(options: SuiteOptions) -> SuiteReport:
    report = SuiteReport("integrable")
    chart = Chart(tuple(f"x{i}" for i in range(1, 8)))
    X = VectorField.coordinate(chart, "x1")
    lifted = prolong(X, 2)
    trivial = all(
        comp.is_zero() for name, comp in zip(lifted.chart.variables, lifted.components) if name != "x1"
    ) and lifted.component("x1") == 1
    report.checks.append(
        CheckResult("prolongation-has-no-higher-components", trivial, "order 2")
    )
    spec = translation_spec(chart, "x1")
    origin = {name: Q(0) for name in chart.variables}
    eye = [[1 if i == j else 0 for j in range(7)] for i in range(7)]
    shift1 = dict(origin)
    shift1["x1"] = Q(5)
    translation = TruncatedMapJet.affine(chart, origin, shift1, eye, 2)
    report.checks.append(
        _verdict_check("x1-translation-accepted", membership(spec, translation).verdict, True)
    )
    off_axis = dict(origin)
    off_axis["x2"] = Q(1)
    report.checks.append(
        _verdict_check(
            "x2-translation-rejected",
            membership(spec, TruncatedMapJet.affine(chart, origin, off_axis, eye, 2)).verdict,
            False,
        )
    )
    scale = [row[:] for row in eye]
    scale[0][0] = 2
    report.checks.append(
        _verdict_check(
            "x1-scaling-rejected",
            membership(spec, TruncatedMapJet.affine(chart, origin, origin, scale, 2)).verdict,
            False,
        )
    )
    u = chart.variables + ("t",)
    comps = {
        name: Polynomial.variable(u, name) for name in chart.variables
    }
    comps["x1"] = comps["x1"] + Polynomial.variable(u, "x1") ** 2
    report.checks.append(
        _verdict_check(
            "quadratic-jet-rejected",
            membership(spec, TruncatedMapJet(chart, origin, 2, comps)).verdict,
            False,
        )
    )
    return report


def _suite_kiso_transvection(options: SuiteOptions) -> SuiteReport:
    report = SuiteReport("kiso-transvection")
    ms = (options.m,) if options.m else (2, 3)
    for m in ms:
        for k in range(0, options.kmax + 1):
            basis = h_basis(m, k).basis
            ok = True
            for x_field in basis:
                try:
                    transvection_solve(x_field)
                except AssertionError:
                    ok = False
                    break
            report.checks.append(
                CheckResult(f"m{m}-k{k}", ok, f"{len(basis)} basis elements")
            )
    return report


def _suite_kiso_surjectivity(options: SuiteOptions) -> SuiteReport:
    report = SuiteReport("kiso-surjectivity")
    ms = (options.m,) if options.m else (2, 3)
    qs = (options.q,) if options.q else (1, 2)
    for m in ms:
        for q in qs:
            for k in range(0, options.kmax + 1):
                for l in range(0, k + 1):
                    rep = bracket_surjectivity_check(m, q, k, l)
                    report.checks.append(
                        CheckResult(
                            f"m{m}-q{q}-k{k}-l{l}",
                            rep.surjective,
                            f"target {rep.target_dimension} rank {rep.image_rank}",
                        )
                    )
    return report


def _random_polynomial(rng: random.Random, universe, max_degree=2, terms=3) -> Polynomial:
    total = Polynomial.zero(universe)
    for _ in range(terms):
        mono = Polynomial.const(universe, rng.randint(-3, 3))
        for _ in range(rng.randint(0, max_degree)):
            mono = mono * Polynomial.variable(universe, rng.choice(universe))
        total = total + mono
    return total


def _random_field(rng: random.Random, chart: Chart) -> VectorField:
    return VectorField(
        chart, [_random_polynomial(rng, chart.variables) for _ in chart.variables]
    )


def _suite_jets_core(options: SuiteOptions) -> SuiteReport:
    report = SuiteReport("jets-core")
    rng = random.Random(options.seed)
    chart = Chart(("x1", "x2"))
    trials = options.trials

    ok = 0
    jc1 = JetChart(chart, 1)
    for _ in range(trials):
        f = RationalFunction(_random_polynomial(rng, jc1.chart.variables, 2, 3))
        d12 = total_derivative(jc1.extended(), total_derivative(jc1, f, 1), 2)
        d21 = total_derivative(jc1.extended(), total_derivative(jc1, f, 2), 1)
        if d12 == d21:
            ok += 1
    report.checks.append(
        CheckResult("total-derivatives-commute", ok == trials, f"{ok}/{trials} instances")
    )

    ok = 0
    for _ in range(trials):
        v = _random_field(rng, chart)
        f = RationalFunction(_random_polynomial(rng, jc1.chart.variables, 2, 3))
        j = rng.randint(1, 2)
        lhs = prolong(v, 2).apply(JetChart(chart, 2).lift(total_derivative(jc1, f, j)))
        rhs = total_derivative(jc1, prolong(v, 1).apply(f), j)
        if lhs == JetChart(chart, 2).lift(rhs):
            ok += 1
    report.checks.append(
        CheckResult(
            "prolongation-commutes-with-total-derivatives", ok == trials, f"{ok}/{trials} instances"
        )
    )

    ok = 0
    for _ in range(trials):
        v = _random_field(rng, chart)
        w = _random_field(rng, chart)
        lhs = prolong(lie_bracket(v, w), 1)
        rhs = lie_bracket(prolong(v, 1), prolong(w, 1))
        if lhs == rhs:
            ok += 1
    report.checks.append(
        CheckResult("prolongation-respects-brackets", ok == trials, f"{ok}/{trials} instances")
    )
    return report


def _suite_backlund_fixtures(options: SuiteOptions) -> SuiteReport:
    report = SuiteReport("backlund-fixtures")
    m = painleve.build_model()
    root = Path(options.fixtures)
    if not root.is_dir():
        raise FileNotFoundError(f"fixture directory not found: {root}")
    for path in sorted(root.glob("*.fixture")):
        fx = load_fixture(path)
        rep = painleve.verify_backlund(m, fx)
        report.checks.append(_verdict_check(f"fixture-{fx.name}", rep.verdict, True))
    xfail = root / "xfail"
    if xfail.is_dir():
        for path in sorted(xfail.glob("*.fixture")):
            fx = load_fixture(path)
            rep = painleve.verify_backlund(m, fx)
            report.checks.append(
                _verdict_check(f"fixture-{fx.name}-rejected", rep.verdict, False)
            )
    return report


_SUITES = {
    "pvi-invariants": _suite_pvi_invariants,
    "pvi-conjugation": _suite_pvi_conjugation,
    "pvi-flow-membership": _suite_pvi_flow_membership,
    "airy": _suite_airy,
    "volume-groupoid": _suite_volume_groupoid,
    "integrable": _suite_integrable,
    "kiso-transvection": _suite_kiso_transvection,
    "kiso-surjectivity": _suite_kiso_surjectivity,
    "jets-core": _suite_jets_core,
    "backlund-fixtures": _suite_backlund_fixtures,
}


def run_suite(name: str, options: SuiteOptions | None = None) -> SuiteReport:
    if name not in _SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITE_NAMES)}")
    return _SUITES[name](options or SuiteOptions())


# ---------------------------------------------------------------------------
# fixture files
# ---------------------------------------------------------------------------


def load_fixture(path) -> "painleve.BacklundFixture":
    """Parse a declarative fixture file.

    Lines: ``name: <word>``, seven ``map <var> = <expr>``, four
    ``shift <param> = <int>``, optional seven ``inverse <var> = <expr>``;
    blank lines and ``#`` comments are ignored.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"missing fixture file: {path}")
    chart = Chart(painleve.CHART7_VARS)
    name = None
    forward: dict[str, RationalFunction] = {}
    inverse: dict[str, RationalFunction] = {}
    shifts: dict[str, int] = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("name:"):
            name = line.split(":", 1)[1].strip()
            continue
        parts = line.split("=", 1)
        if len(parts) != 2:
            raise ParseError("expected 'keyword target = value'", lineno, 1)
        head = parts[0].split()
        if len(head) != 2 or head[0] not in ("map", "shift", "inverse"):
            raise ParseError(f"unknown directive {parts[0].strip()!r}", lineno, 1)
        kind, target = head
        if target not in chart.variables:
            raise ParseError(f"unknown coordinate {target!r}", lineno, 1)
        if kind == "shift":
            if target not in ("a", "b", "c", "e"):
                raise ParseError(f"shifts apply to parameters only, not {target!r}", lineno, 1)
            try:
                shifts[target] = int(parts[1].strip())
            except ValueError:
                raise ParseError("shift must be an integer", lineno, 1) from None
            continue
        try:
            expr = parse_expression(parts[1].strip(), chart)
        except ParseError as err:
            raise ParseError(f"in fixture value: {err}", lineno, 1) from None
        if kind == "map":
            forward[target] = expr
        else:
            inverse[target] = expr
    if name is None:
        raise ValueError(f"{path}: fixture has no name")
    if len(forward) != 7:
        raise ValueError(f"{path}: expected 7 forward maps, found {len(forward)}")
    if len(shifts) != 4:
        raise ValueError(f"{path}: expected 4 parameter shifts, found {len(shifts)}")
    if inverse and len(inverse) != 7:
        raise ValueError(f"{path}: inverse maps must cover all 7 coordinates")
    return painleve.BacklundFixture(
        name=name, forward=forward, shifts=shifts, inverse=inverse or None
    )


# ---------------------------------------------------------------------------
# argument handling
# ---------------------------------------------------------------------------


def _parse_base(text: str) -> dict[str, Fraction]:
    out: dict[str, Fraction] = {}
    for item in text.split(","):
        if not item.strip():
            continue
        key, _, value = item.partition("=")
        if not _:
            raise argparse.ArgumentTypeError(f"bad base assignment {item!r}")
        out[key.strip()] = Fraction(value.strip())
    return out


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jetcalc", description="exact jet-calculus verification suites"
    )
    sub = parser.add_subparsers(dest="suite", required=True, metavar="suite")
    for name in SUITE_NAMES:
        p = sub.add_parser(name, help=f"run the {name} checks")
        p.add_argument("--order", type=int, default=2, help="space truncation order")
        p.add_argument("--torder", type=int, default=4, help="t truncation order")
        p.add_argument("--base", type=_parse_base, default=None, help="base point, e.g. x=2,p=3,q=1,a=1,b=1,c=1,e=1")
        p.add_argument("--m", type=int, default=None, help="fiber dimension (kiso suites)")
        p.add_argument("--q", type=int, default=None, help="transverse dimension (kiso-surjectivity)")
        p.add_argument("--kmax", type=int, default=2, help="largest symbol degree (kiso suites)")
        p.add_argument("--fixtures", default="fixtures", help="fixture directory")
        p.add_argument("--seed", type=int, default=0, help="seed for randomized property checks")
        p.add_argument("--trials", type=int, default=50, help="instances per randomized check")
        p.add_argument("--machine", action="store_true", help="line-oriented key=value output")
        p.add_argument("--no-timestamp", action="store_true", help="suppress the timestamp header")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_arg_parser().parse_args(argv)
    options = SuiteOptions(
        order=args.order,
        torder=args.torder,
        base=args.base,
        m=args.m,
        q=args.q,
        kmax=args.kmax,
        fixtures=args.fixtures,
        seed=args.seed,
        trials=args.trials,
    )
    try:
        report = run_suite(args.suite, options)
    except (FileNotFoundError, ValueError) as err:
        print(f"jetcalc: {err}", file=sys.stderr)
        return 2
    sys.stdout.write(report.render(machine=args.machine, timestamp=not args.no_timestamp))
    return report.exit_status


if __name__ == "__main__":
    sys.exit(main())
