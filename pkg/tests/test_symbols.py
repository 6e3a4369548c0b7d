"""Divergence-free symbol spaces, transvection, bracket surjectivity."""

import itertools
import os
from fractions import Fraction as Q

import pytest

from jetcalc.exactalg import Polynomial
from jetcalc.symbols import (
    HomogeneousField,
    SurjectivityReport,
    bracket_surjectivity_check,
    divergence_free,
    exact_rank,
    graded_bracket,
    h_basis,
    h_dimension,
    model_space,
    transvection_solve,
)

X2 = ("x1", "x2")
X3 = ("x1", "x2", "x3")


def field2(c1, c2):
    return HomogeneousField(X2, (), [c1, c2])


def v(universe, name):
    return Polynomial.variable(universe, name)


class TestHBasis:
    def test_constant_fields(self):
        sp = h_basis(2, -1)
        assert sp.dimension == 2
        assert sp.basis[0].components[0] == 1
        assert sp.basis[1].components[1] == 1

    def test_linear_trace_free(self):
        assert h_basis(2, 0).dimension == 3
        assert h_basis(3, 0).dimension == 8

    def test_closed_form_dimensions(self):
        for m in (2, 3, 4):
            for k in (-1, 0, 1, 2, 3):
                sp = h_basis(m, k)
                assert sp.dimension == h_dimension(m, k)
                assert sp.verify_independent()
                for f in sp.basis:
                    assert divergence_free(f)
                    if k >= 0:
                        assert f.x_degree == k + 1 and f.s_degree == 0

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            h_basis(0, 1)
        with pytest.raises(ValueError):
            h_basis(2, -2)


class TestDivergence:
    def test_rotation(self):
        f = field2(v(X2, "x2"), -v(X2, "x1"))
        assert divergence_free(f)

    def test_radial_not_free(self):
        f = field2(v(X2, "x1"), Polynomial.zero(X2))
        assert not divergence_free(f)

    def test_trace_free_diagonal(self):
        f = field2(v(X2, "x1"), -v(X2, "x2"))
        assert divergence_free(f)

    def test_bihomogeneity_enforced(self):
        with pytest.raises(ValueError):
            HomogeneousField(X2, (), [v(X2, "x1") + v(X2, "x1") ** 2, Polynomial.zero(X2)])


class TestTransvection:
    def test_zero(self):
        z = HomogeneousField(X2, (), [Polynomial.zero(X2)] * 2)
        assert transvection_solve(z).is_zero()

    def test_rotation_hand_value(self):
        f = field2(v(X2, "x2"), -v(X2, "x1"))
        y = transvection_solve(f)
        x1, x2 = v(X2, "x1"), v(X2, "x2")
        assert y.components[0] == x1 * x2
        assert y.components[1] == -(x1**2 + x2**2) / Q(2)

    def test_diagonal_hand_value(self):
        f = field2(v(X2, "x1"), -v(X2, "x2"))
        y = transvection_solve(f)
        x1, x2 = v(X2, "x1"), v(X2, "x2")
        assert y.components[0] == x1**2 / Q(2)
        assert y.components[1] == -(x1 * x2)

    def test_all_bases(self):
        for m in (2, 3):
            x = X2 if m == 2 else X3
            d1 = HomogeneousField(
                x, (), [Polynomial.const(x, 1 if j == 0 else 0) for j in range(m)]
            )
            for k in (0, 1, 2):
                for f in h_basis(m, k).basis:
                    y = transvection_solve(f)
                    assert divergence_free(y)
                    assert graded_bracket(d1, y) == f
                    assert y.x_degree == f.x_degree + 1

    def test_rejects_divergent_input(self):
        f = field2(v(X2, "x1"), Polynomial.zero(X2))
        with pytest.raises(ValueError):
            transvection_solve(f)

    def test_rejects_s_dependence(self):
        u = X2 + ("s1",)
        f = HomogeneousField(X2, ("s1",), [v(u, "s1"), Polynomial.zero(u)])
        with pytest.raises(ValueError):
            transvection_solve(f)


class TestGradedBracket:
    def test_spec_example(self):
        u = X2 + ("s1",)
        s1d1 = HomogeneousField(X2, ("s1",), [v(u, "s1"), Polynomial.zero(u)])
        sl = HomogeneousField(X2, ("s1",), [v(u, "x1"), -v(u, "x2")])
        assert graded_bracket(s1d1, sl) == s1d1

    def test_constants_commute(self):
        sp = h_basis(2, -1)
        assert graded_bracket(sp.basis[0], sp.basis[1]).is_zero()

    def test_s_linear_constants_commute(self):
        u = X2 + ("s1", "s2")
        s = ("s1", "s2")
        a = HomogeneousField(X2, s, [v(u, "s1"), Polynomial.zero(u)])
        b = HomogeneousField(X2, s, [Polynomial.zero(u), v(u, "s2")])
        assert graded_bracket(a, b).is_zero()

    def test_antisymmetry_and_jacobi_on_model_bases(self):
        fields = model_space(2, 1, 1, 0).basis + model_space(2, 1, 1, 1).basis
        for f, g in itertools.product(fields[:4], fields[:4]):
            assert graded_bracket(f, g) == -(graded_bracket(g, f))
        for f, g, h in itertools.combinations(fields[:5], 3):
            total = (
                graded_bracket(f, graded_bracket(g, h))
                + graded_bracket(g, graded_bracket(h, f))
                + graded_bracket(h, graded_bracket(f, g))
            )
            assert total.is_zero()

    def test_bidegree_additivity(self):
        a = model_space(2, 1, 0, 1).basis[0]
        b = model_space(2, 1, 2, 1).basis[0]
        br = graded_bracket(a, b)
        if not br.is_zero():
            assert br.x_degree == (a.x_degree + b.x_degree) - 1
            assert br.s_degree == a.s_degree + b.s_degree

    def test_universe_mismatch(self):
        u = X2 + ("s1",)
        a = HomogeneousField(X2, ("s1",), [v(u, "s1"), Polynomial.zero(u)])
        b = h_basis(2, 0).basis[0]
        with pytest.raises(ValueError):
            graded_bracket(a, b)


class TestModelSpaces:
    def test_dimension_formula(self):
        from math import comb

        for m, q, k, l in itertools.product((2, 3), (1, 2), (0, 1, 2), (0, 1, 2)):
            if l > k + 1:
                continue
            sp = model_space(m, q, k, l)
            assert sp.dimension == comb(q - 1 + l, q - 1) * h_dimension(m, k - l)
            assert sp.verify_independent()


class TestSurjectivity:
    def test_base_cell(self):
        rep = bracket_surjectivity_check(2, 1, 0, 0)
        assert rep.target_dimension == 2
        assert rep.image_rank == 2
        assert rep.surjective

    def test_full_grid(self):
        for m in (2, 3):
            for q in (1, 2):
                for k in (0, 1, 2):
                    for l in range(0, k + 1):
                        rep = bracket_surjectivity_check(m, q, k, l)
                        assert rep.surjective, (m, q, k, l)

    def test_l_beyond_k_rejected(self):
        with pytest.raises(ValueError):
            bracket_surjectivity_check(2, 1, 1, 2)

    def test_cap_enforced(self):
        with pytest.raises(ValueError):
            bracket_surjectivity_check(3, 2, 2, 1, cap=10)

    def test_env_cap_override(self, monkeypatch):
        monkeypatch.setenv("JETCALC_DIMENSION_CAP", "5")
        with pytest.raises(ValueError):
            bracket_surjectivity_check(2, 1, 1, 1)
        monkeypatch.setenv("JETCALC_DIMENSION_CAP", "500")
        assert bracket_surjectivity_check(2, 1, 1, 1).surjective


class TestExactRank:
    def test_known_rank(self):
        rows = [
            [Q(1, 2), Q(1), Q(0)],
            [Q(1), Q(2), Q(0)],
            [Q(0), Q(0), Q(3)],
        ]
        assert exact_rank(rows) == 2

    def test_zero_matrix(self):
        assert exact_rank([[Q(0), Q(0)]]) == 0
        assert exact_rank([]) == 0

    def test_big_fractions_exact(self):
        # entries engineered to cancel only with exact arithmetic
        eps = Q(1, 10**20)
        rows = [[Q(1), Q(1)], [Q(1), Q(1) + eps]]
        assert exact_rank(rows) == 2
        rows2 = [[Q(1), Q(1)], [Q(1), Q(1)]]
        assert exact_rank(rows2) == 1
