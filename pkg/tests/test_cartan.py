"""Exterior calculus on charts: brackets, derivatives, divergence, quotients."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from jetcalc.cartan import (
    Chart,
    ChartMismatchError,
    DifferentialForm,
    QuotientContext,
    VectorField,
    divergence,
    exterior_derivative,
    interior_product,
    lie_bracket,
    lie_derivative,
    pushforward,
    reduce_mod,
    wedge,
)
from jetcalc.exactalg import Polynomial, Q, RationalFunction

CH = Chart(("x", "y"))
CH3 = Chart(("x", "y", "z"))
X, Y = CH.rf("x"), CH.rf("y")
DX = DifferentialForm.d_coordinate(CH, "x")
DY = DifferentialForm.d_coordinate(CH, "y")


coeff = st.integers(-3, 3)


@st.composite
def poly_fields(draw, chart=CH, max_exp=2):
    comps = []
    for _ in chart.variables:
        terms = {}
        for _ in range(draw(st.integers(0, 3))):
            mono = []
            for i in range(chart.dim):
                e = draw(st.integers(0, max_exp))
                if e:
                    mono.append((i, e))
            c = draw(coeff)
            from jetcalc.exactalg import Monomial

            m = Monomial(mono)
            terms[m] = terms.get(m, 0) + c
        comps.append(
            RationalFunction(
                Polynomial(chart.variables, {m: c for m, c in terms.items() if c})
            )
        )
    return VectorField(chart, comps)


@st.composite
def one_forms(draw, chart=CH):
    coeffs = {}
    for i in range(chart.dim):
        f = draw(poly_fields(chart))
        coeffs[(i,)] = f.components[0]
    return DifferentialForm(chart, 1, coeffs)


class TestBracket:
    def test_coordinate_bracket(self):
        ddx = VectorField.coordinate(CH, "x")
        xddx = VectorField.from_dict(CH, {"x": X})
        assert lie_bracket(ddx, xddx) == ddx

    def test_antisymmetry_self(self):
        v = VectorField(CH, [X * Y, X + Y])
        assert lie_bracket(v, v).is_zero()

    def test_cross_terms(self):
        u = VectorField.from_dict(CH, {"y": X})  # x d/dy
        w = VectorField.from_dict(CH, {"x": Y})  # y d/dx
        expected = VectorField(CH, [X, -Y])
        assert lie_bracket(u, w) == expected

    def test_chart_mismatch(self):
        v = VectorField.coordinate(CH, "x")
        w = VectorField.coordinate(CH3, "x")
        with pytest.raises(ChartMismatchError):
            lie_bracket(v, w)

    @given(poly_fields(), poly_fields(), poly_fields())
    @settings(max_examples=20, deadline=None)
    def test_jacobi(self, u, v, w):
        total = (
            lie_bracket(u, lie_bracket(v, w))
            + lie_bracket(v, lie_bracket(w, u))
            + lie_bracket(w, lie_bracket(u, v))
        )
        assert total.is_zero()


class TestExteriorDerivative:
    def test_d_of_function_times_dy(self):
        assert exterior_derivative(DY * X) == wedge(DX, DY)

    def test_dd_zero_on_dx(self):
        assert exterior_derivative(DX).is_zero()

    def test_d_squared_random(self):
        from jetcalc.exactalg import Monomial

        rng = random.Random(7)
        for _ in range(20):
            coeffs = {
                (i,): Polynomial(
                    CH3.variables,
                    {Monomial((j, rng.randint(0, 2)) for j in range(3)): Q(rng.randint(-3, 3))},
                )
                for i in range(3)
            }
            omega = DifferentialForm(CH3, 1, coeffs)
            assert exterior_derivative(exterior_derivative(omega)).is_zero()

    def test_top_degree_returns_zero_form(self):
        omega = wedge(DX, DY)
        d = exterior_derivative(omega)
        assert d.degree == 3 and d.is_zero()


class TestWedgeInterior:
    def test_wedge_orientation(self):
        assert wedge(DX, DY).coefficient((0, 1)) == 1
        assert wedge(DX, DX).is_zero()

    def test_wedge_sign_bookkeeping(self):
        # (p dq) ^ (q dp) = -pq dp^dq with p = x, q = y
        lhs = wedge(DY * X, DX * Y)
        assert lhs.coefficient((0, 1)) == -(X * Y)

    @given(one_forms(), one_forms())
    @settings(max_examples=20, deadline=None)
    def test_graded_antisymmetry(self, a, b):
        assert wedge(a, b) == -wedge(b, a)

    def test_interior_product_basics(self):
        dpdq = wedge(DX, DY)
        assert interior_product(VectorField.coordinate(CH, "x"), dpdq) == DY
        assert interior_product(VectorField.coordinate(CH, "y"), dpdq) == -DX

    def test_interior_on_missing_direction(self):
        ch3 = CH3
        dp = DifferentialForm.d_coordinate(ch3, "y")
        dq = DifferentialForm.d_coordinate(ch3, "z")
        v = VectorField.coordinate(ch3, "x")
        assert interior_product(v, wedge(dp, dq)).is_zero()

    def test_interior_squared_zero(self):
        ch3 = CH3
        omega = wedge(
            wedge(
                DifferentialForm.d_coordinate(ch3, "x"),
                DifferentialForm.d_coordinate(ch3, "y"),
            ),
            DifferentialForm.d_coordinate(ch3, "z"),
        )
        v = VectorField(ch3, [ch3.rf("y"), ch3.rf("z"), ch3.rf("x")])
        assert interior_product(v, interior_product(v, omega)).is_zero()

    def test_interior_rejects_functions(self):
        with pytest.raises(ValueError):
            interior_product(VectorField.coordinate(CH, "x"), DifferentialForm.function(CH, X))


class TestLieDerivative:
    def test_scaling_field_on_dx(self):
        xddx = VectorField.from_dict(CH, {"x": X})
        assert lie_derivative(xddx, DX) == DX

    def test_translation_invariant_volume(self):
        assert lie_derivative(VectorField.coordinate(CH, "x"), wedge(DX, DY)).is_zero()

    @given(poly_fields(), one_forms())
    @settings(max_examples=20, deadline=None)
    def test_cartan_identity(self, v, omega):
        lhs = lie_derivative(v, omega)
        rhs = interior_product(v, exterior_derivative(omega)) + exterior_derivative(
            interior_product(v, omega)
        )
        assert lhs == rhs

    @given(poly_fields())
    @settings(max_examples=20, deadline=None)
    def test_cartan_identity_top_degree(self, v):
        omega = wedge(DX, DY) * (X + Y * Y + 1)
        lhs = lie_derivative(v, omega)
        rhs = exterior_derivative(interior_product(v, omega))
        assert lhs == rhs


class TestQuotient:
    def test_projection_drops_and_keeps(self):
        ctx = QuotientContext(CH3, ("x",))
        dxdy = wedge(
            DifferentialForm.d_coordinate(CH3, "x"),
            DifferentialForm.d_coordinate(CH3, "y"),
        )
        dydz = wedge(
            DifferentialForm.d_coordinate(CH3, "y"),
            DifferentialForm.d_coordinate(CH3, "z"),
        )
        assert reduce_mod(dxdy, ctx).is_zero()
        assert reduce_mod(dydz, ctx) == dydz

    def test_idempotent_linear(self):
        ctx = QuotientContext(CH3, ("z",))
        omega = wedge(
            DifferentialForm.d_coordinate(CH3, "x"),
            DifferentialForm.d_coordinate(CH3, "z"),
        ) + wedge(
            DifferentialForm.d_coordinate(CH3, "x"),
            DifferentialForm.d_coordinate(CH3, "y"),
        ) * CH3.rf("z")
        once = reduce_mod(omega, ctx)
        assert reduce_mod(once, ctx) == once
        eta = wedge(
            DifferentialForm.d_coordinate(CH3, "y"),
            DifferentialForm.d_coordinate(CH3, "z"),
        )
        assert reduce_mod(omega + eta, ctx) == once + reduce_mod(eta, ctx)

    def test_commutes_with_wedge_by_clean_forms(self):
        ctx = QuotientContext(CH3, ("z",))
        omega = DifferentialForm.d_coordinate(CH3, "z") + DifferentialForm.d_coordinate(
            CH3, "x"
        )
        clean = DifferentialForm.d_coordinate(CH3, "y") * CH3.rf("x")
        assert reduce_mod(wedge(omega, clean), ctx) == wedge(reduce_mod(omega, ctx), clean)

    def test_unknown_dropped_name(self):
        with pytest.raises(ValueError):
            QuotientContext(CH, ("nope",))


class TestDivergence:
    def test_euler_field(self):
        vol = wedge(DX, DY)
        e = VectorField(CH, [X, Y])
        assert divergence(e, vol) == 2

    def test_hamiltonian_fields_are_divergence_free(self):
        ch = Chart(("p", "q"))
        p, q = ch.rf("p"), ch.rf("q")
        h = p**3 * q**2 + p * q / (p - 1)
        v = VectorField(ch, [h.diff("q"), -h.diff("p")])
        vol = wedge(
            DifferentialForm.d_coordinate(ch, "p"),
            DifferentialForm.d_coordinate(ch, "q"),
        )
        assert divergence(v, vol).is_zero()

    def test_radial_correction_identity(self):
        # div of R(x) E with E = x2 d2 + x3 d3 and R = x2^2 is (k+m) R = 4 x2^2
        ch = Chart(("x1", "x2", "x3"))
        x2, x3 = ch.rf("x2"), ch.rf("x3")
        r = x2**2
        field = VectorField.from_dict(ch, {"x2": r * x2, "x3": r * x3})
        vol = wedge(
            wedge(
                DifferentialForm.d_coordinate(ch, "x1"),
                DifferentialForm.d_coordinate(ch, "x2"),
            ),
            DifferentialForm.d_coordinate(ch, "x3"),
        )
        assert divergence(field, vol) == 4 * r

    @given(poly_fields(), poly_fields())
    @settings(max_examples=15, deadline=None)
    def test_naturality(self, u, v):
        vol = wedge(DX, DY)
        lhs = divergence(lie_bracket(u, v), vol)
        rhs = u.apply(divergence(v, vol)) - v.apply(divergence(u, vol))
        assert lhs == rhs

    def test_zero_volume_rejected(self):
        with pytest.raises(ValueError):
            divergence(VectorField.coordinate(CH, "x"), DifferentialForm.zero(CH, 2))


class TestPushforward:
    def test_identity(self):
        v = VectorField(CH, [X * Y, Y])
        ident = {"x": X, "y": Y}
        assert pushforward(v, ident, ident) == v

    def test_translation_invariance(self):
        ch = Chart(("x",))
        x = ch.rf("x")
        v = VectorField.coordinate(ch, "x")
        assert pushforward(v, {"x": x + 1}, {"x": x - 1}) == v

    def test_scaling_covariance(self):
        ch = Chart(("x",))
        x = ch.rf("x")
        v = VectorField(ch, [x])
        assert pushforward(v, {"x": 2 * x}, {"x": x / 2}) == v

    def test_rejects_non_inverse(self):
        ch = Chart(("x",))
        x = ch.rf("x")
        with pytest.raises(ValueError):
            pushforward(VectorField(ch, [x]), {"x": 2 * x}, {"x": x})
