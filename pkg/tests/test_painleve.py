"""The Painlevé VI model: invariants, conjugation, flow, fixtures."""

from fractions import Fraction as Q

import pytest

from jetcalc.cartan import (
    DifferentialForm,
    QuotientContext,
    exterior_derivative,
    interior_product,
    lie_bracket,
    lie_derivative,
    reduce_mod,
)
from jetcalc.exactalg import PoleError
from jetcalc.groupoid import infinitesimal_membership, membership
from jetcalc.jets import TruncatedMapJet, compose_rf_with_jet, jet_compose, truncate_poly
from jetcalc.painleve import (
    BacklundFixture,
    DEFAULT_FLOW_BASE,
    build_model,
    check_conjugation,
    check_conjugation_theta,
    fiberwise_spec,
    flow_jet,
    identity_fixture,
    malgrange_spec,
    picard_predicate,
    verify_backlund,
)
from jetcalc.parsing import parse_expression

import jetcalc.painleve


@pytest.fixture(scope="module")
def model():
    return build_model()


class TestModel:
    def test_field_structure(self, model):
        chart = model.chart7
        assert model.X.apply(chart.rf("x")) == 1
        for par in ("a", "b", "c", "e"):
            assert model.X.apply(chart.rf(par)).is_zero()
        assert model.X.component("p") == model.H.diff("q")
        assert model.X.component("q") == -model.H.diff("p")

    def test_hamiltonian_coefficients_verbatim(self, model):
        chart = model.chart7
        poly = (parse_expression("x*(x-1)", chart) * model.H).as_polynomial()
        by_q = poly.coefficients_in("q")
        assert by_q[2] == parse_expression("p*(p-1)*(p-x)", chart).as_polynomial()
        linear = parse_expression(
            "-(a*(p-1)*(p-x) + b*p*(p-x) + (e-1)*p*(p-1))", chart
        ).as_polynomial()
        assert by_q[1] == linear
        const = parse_expression("((a+b+e-1)^2 - c^2)*(p-x)/4", chart).as_polynomial()
        assert by_q[0] == const

    def test_second_order_field_structure(self, model):
        alt = model.alt_chart7
        assert model.Y.component("x") == 1
        assert model.Y.component("u") == alt.rf("v")
        assert model.Y.component("v") == model.F
        for par in ("a", "b", "c", "e"):
            assert model.Y.component(par).is_zero()

    def test_parameters_enter_f_linearly(self, model):
        for par in ("a", "b", "c", "e"):
            assert model.F.num.degree_in(par) <= 1
            assert model.F.den.degree_in(par) == 0

    def test_theta_form_is_f_after_squaring(self, model):
        sq = {
            "a": parse_expression("c^2/2", model.alt_chart7),
            "b": parse_expression("a^2/2", model.alt_chart7),
            "c": parse_expression("b^2/2", model.alt_chart7),
            "e": parse_expression("e^2/2", model.alt_chart7),
        }
        assert model.F.substitute(sq) == model.F_theta

    def test_conjugating_map_components(self, model):
        chart = model.chart7
        assert model.conj["u"] == chart.rf("p")
        assert model.conj["v"] == model.H.diff("q")
        assert model.conj["a"] == chart.rf("c") ** 2 / 2
        assert model.conj["b"] == chart.rf("a") ** 2 / 2
        assert model.conj["c"] == chart.rf("b") ** 2 / 2
        assert model.conj["e"] == chart.rf("e") ** 2 / 2


class TestInvariants:
    def test_lie_x_dx(self, model):
        dx = DifferentialForm.d_coordinate(model.chart7, "x")
        assert lie_derivative(model.X, dx).is_zero()

    def test_symplectic_form_mod_base(self, model):
        ld = lie_derivative(model.X, model.symplectic_form())
        assert not ld.is_zero()
        ctx = QuotientContext(model.chart7, model.pi_vars)
        assert reduce_mod(ld, ctx).is_zero()

    def test_cartan_route_agreement(self, model):
        ld = lie_derivative(model.X, model.symplectic_form())
        route = exterior_derivative(interior_product(model.X, model.symplectic_form()))
        assert ld == route


class TestConjugation:
    def test_half_square_route(self, model):
        report = check_conjugation(model)
        assert report.verdict
        assert len(report.residuals) == 7
        assert [r.datum_id for r in report.residuals] == [
            f"conj[{w}]" for w in model.alt_chart7.variables
        ]

    def test_theta_route(self, model):
        report = check_conjugation_theta(model)
        assert report.verdict
        assert len(report.residuals) == 7

    def test_x_residual_trivial_structure(self, model):
        # X (x o conj) = X x = 1 = (Y x) o conj
        lhs = model.X.apply(model.conj["x"])
        assert lhs == 1

    def test_wrong_pairing_fails(self, model):
        # swapping which half-square lands on a and b breaks the conjugation
        chart = model.chart7
        bad = dict(model.conj)
        bad["a"], bad["b"] = bad["b"], bad["a"]
        lhs = model.X.apply(bad["v"])
        num, den = model.Y.component("v").substitute_raw(bad)
        residual = lhs.num * den - num * lhs.den
        assert not residual.is_zero()


class TestMalgrangeSpec:
    def test_datum_counts(self, model):
        spec = malgrange_spec(model)
        assert len(spec.fixed_functions) == 4
        assert len(spec.preserved_forms) == 1
        assert len(spec.preserved_fields) == 1
        assert len(spec.quotient_forms) == 1
        assert spec.datum_count() == 7

    def test_identity_passes(self, model):
        spec = malgrange_spec(model)
        ident = TruncatedMapJet.identity(model.chart7, DEFAULT_FLOW_BASE, 2)
        assert membership(spec, ident).verdict

    def test_quotient_context_names(self, model):
        spec = malgrange_spec(model)
        _, ctx = spec.quotient_forms[0]
        assert ctx.dropped == frozenset({"x", "a", "b", "c", "e"})

    def test_infinitesimal_coordinate_field_fails(self, model):
        spec = malgrange_spec(model)
        from jetcalc.cartan import VectorField

        v = VectorField.coordinate(model.chart7, "q")
        report = infinitesimal_membership(
            v,
            spec.fixed_functions + [model.chart7.rf("x")],
            model.symplectic_form(),
            QuotientContext(model.chart7, model.pi_vars),
            model.X,
        )
        assert not report.verdict
        bracket = [r for r in report.residuals if r.datum_id == "bracket"][0]
        assert not bracket.vanished

    def test_infinitesimal_zero_field_passes(self, model):
        spec = malgrange_spec(model)
        from jetcalc.cartan import VectorField

        zero = VectorField(model.chart7, [model.chart7.const(0)] * 7)
        report = infinitesimal_membership(
            zero,
            spec.fixed_functions,
            model.symplectic_form(),
            QuotientContext(model.chart7, model.pi_vars),
            model.X,
        )
        assert report.verdict


class TestFiberwiseSpec:
    def test_structure_and_identity(self, model):
        spec = fiberwise_spec(model, {"a": Q(1, 3), "b": Q(1, 5), "c": Q(2), "e": Q(0)})
        assert spec.chart.variables == ("x", "p", "q")
        assert not spec.fixed_functions
        assert len(spec.preserved_forms) == 1 and len(spec.preserved_fields) == 1
        (_, ctx), = spec.quotient_forms
        assert ctx.dropped == frozenset({"x"})
        ident = TruncatedMapJet.identity(spec.chart, {"x": Q(2), "p": Q(3), "q": Q(1)}, 2)
        assert membership(spec, ident).verdict

    def test_restricted_flow_passes(self, model):
        from jetcalc.jets import flow_of_field

        spec = fiberwise_spec(model, {"a": Q(1, 3), "b": Q(1, 5), "c": Q(2), "e": Q(0)})
        fl = flow_of_field(spec.preserved_fields[0], {"x": Q(2), "p": Q(3), "q": Q(1)}, 2, 3)
        assert membership(spec, fl).verdict


class TestPicardPredicate:
    def test_half_integer_branch(self):
        assert picard_predicate(Q(1, 2), Q(1, 2), Q(1, 2), Q(1, 2))
        assert picard_predicate(Q(1, 2), Q(-1, 2), Q(3, 2), Q(5, 2))

    def test_integer_branch_even_sum(self):
        assert picard_predicate(0, 0, 1, 1)
        assert not picard_predicate(0, 0, 1, 2)

    def test_algebraic_solution_parameter_outside(self):
        assert not picard_predicate(Q(1, 12), Q(1, 12), Q(1, 12), Q(11, 12))

    def test_mixed_cases(self):
        assert not picard_predicate(Q(1, 2), 0, 0, 0)
        assert picard_predicate(-2, 4, 3, 1)


class TestFlow:
    def test_trivial_components(self, model):
        fl = flow_jet(model, space_order=1, t_order=2)
        u = fl.universe
        from jetcalc.exactalg import Polynomial

        assert fl.components["x"] == (
            Polynomial.const(u, 2) + Polynomial.variable(u, "x") + Polynomial.variable(u, "t")
        )
        for par, value in (("a", 1), ("b", 1), ("c", 1), ("e", 1)):
            assert fl.components[par] == Polynomial.const(u, value) + Polynomial.variable(u, par)

    def test_identity_at_time_zero(self, model):
        fl = flow_jet(model, space_order=1, t_order=2)
        assert fl.at_time_zero() == TruncatedMapJet.identity(model.chart7, DEFAULT_FLOW_BASE, 1)

    def test_flow_solves_ode(self, model):
        fl = flow_jet(model, space_order=1, t_order=3)
        t_index = fl.t_index
        from jetcalc.exactalg import Monomial, _raw

        for name, comp in zip(model.chart7.variables, model.X.components):
            terms = {}
            for mono, c in fl.components[name].terms.items():
                e = mono.exp_of(t_index)
                if e:
                    pairs = [(i, x) for i, x in mono.exps if i != t_index]
                    if e > 1:
                        pairs.append((t_index, e - 1))
                    terms[Monomial(pairs)] = c * e
            lhs = _raw(fl.components[name].universe, terms)
            rhs = compose_rf_with_jet(comp, fl, 1, 2)
            assert lhs == rhs

    def test_membership_small_orders(self, model):
        fl = flow_jet(model, space_order=1, t_order=2)
        assert membership(malgrange_spec(model), fl).verdict

    def test_reversal_on_determined_window(self, model):
        k, n = 2, 4
        fl = flow_jet(model, space_order=k, t_order=n)
        comp = jet_compose(fl.reparametrize_t(-1), fl)
        ident = TruncatedMapJet.identity(model.chart7, DEFAULT_FLOW_BASE, k, n)
        t_index = comp.t_index
        for name in model.chart7.variables:
            got = truncate_poly(comp.components[name], t_index, None, None, k)
            want = truncate_poly(ident.components[name], t_index, None, None, k)
            assert got == want

    def test_base_at_pole_rejected(self, model):
        bad = dict(DEFAULT_FLOW_BASE)
        bad["x"] = Q(1)
        with pytest.raises(PoleError):
            flow_jet(model, bad, 1, 1)


class TestBacklund:
    def test_identity_fixture(self, model):
        report = verify_backlund(model, identity_fixture(model))
        assert report.verdict

    def test_shift_without_transport_fails(self, model):
        chart = model.chart7
        fx = BacklundFixture(
            name="broken",
            forward={
                **{name: chart.rf(name) for name in chart.variables},
                "a": chart.rf("a") + 1,
            },
            shifts={"a": 1, "b": 0, "c": 0, "e": 0},
        )
        report = verify_backlund(model, fx)
        assert not report.verdict
        failing = {r.datum_id for r in report.residuals if not r.vanished}
        assert any(d.startswith("transport") for d in failing)
        assert "fixes[x]" not in failing

    def test_wrong_shift_declaration_fails(self, model):
        chart = model.chart7
        fx = BacklundFixture(
            name="misdeclared",
            forward={name: chart.rf(name) for name in chart.variables},
            shifts={"a": 1, "b": 0, "c": 0, "e": 0},
        )
        report = verify_backlund(model, fx)
        assert not report.verdict
        failing = {r.datum_id for r in report.residuals if not r.vanished}
        assert failing == {"shift[a]"}

    def test_non_integer_shift_rejected(self, model):
        chart = model.chart7
        fx = BacklundFixture(
            name="bad",
            forward={name: chart.rf(name) for name in chart.variables},
            shifts={"a": Q(1, 2), "b": 0, "c": 0, "e": 0},
        )
        with pytest.raises(ValueError):
            verify_backlund(model, fx)

    def test_inverse_maps_checked(self, model):
        chart = model.chart7
        fx = identity_fixture(model)
        fx.inverse["p"] = chart.rf("p") + 1  # wrong inverse
        report = verify_backlund(model, fx)
        assert not report.verdict
        failing = {r.datum_id for r in report.residuals if not r.vanished}
        assert failing == {"inverse[p]"}
