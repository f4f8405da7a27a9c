"""Fundamental solution matrices on both fibers."""

from fractions import Fraction

import pytest

from padicgrowth import (FieldConfig, ModulePresentation, TruncatedSeries,
                         solve_generic, solve_special, to_generic,
                         verify_package)
from padicgrowth.corpus import build_presentation, load_corpus
from padicgrowth.dsl import generator_xmu
from padicgrowth.linalg import mat_mul

CFG = FieldConfig(5, 2, 5)
CORPUS = {e.label: e for e in load_corpus()}
DEPTH = 200


@pytest.fixture(scope="module")
def m_mu():
    return build_presentation(CORPUS["m_mu"], depth=DEPTH)


@pytest.fixture(scope="module")
def m_mu_sol(m_mu):
    return solve_special(m_mu, DEPTH)


class TestSpecialFiber:
    def test_trivial_solution_is_identity(self):
        M = ModulePresentation(CFG, [[1]], [[0]])
        S = solve_special(M, 50)
        assert S.Y[0][0].part(0).constant_term() == CFG.one()
        assert S.C[0][0] == CFG.one()

    def test_m_mu_off_diagonal_integrates_g(self, m_mu_sol):
        # row solution (1, x) with x' = g, so x has the unit-exponent
        # coefficients q^(-mu i) at t-degree q^i
        x = m_mu_sol.Y[0][1].part(0)
        want = generator_xmu(CFG, Fraction(1, 2), DEPTH)
        assert (x - want).truncate(DEPTH).is_zero()

    def test_m_mu_frobenius_matrix(self, m_mu_sol):
        C = m_mu_sol.C
        assert C[0][0] == CFG.one()
        assert C[1][1] == CFG.pi_power(-1)
        assert C[0][1].is_zero() and C[1][0].is_zero()

    def test_normalization_is_identity_at_origin(self, m_mu_sol):
        for i in range(2):
            for j in range(2):
                c0 = m_mu_sol.Y[i][j].part(0).constant_term()
                want = CFG.one() if i == j else CFG.zero()
                assert c0 == want

    def test_verify_package(self, m_mu, m_mu_sol):
        assert verify_package(m_mu, m_mu_sol).ok

    def test_dlog_module_has_log_layer(self):
        # unipotent module t y' = y G with constant nilpotent G
        M = ModulePresentation(CFG, [[1, 0], [0, 5]], [[0, 1], [0, 0]],
                               omega="dt/t")
        assert M.validate().ok
        S = solve_special(M, 50)
        degrees = {k for row in S.Y for e in row for k in e.parts
                   if not e.part(k).is_zero()}
        assert 1 in degrees
        assert verify_package(M, S).ok

    def test_residual_order_covers_window(self, m_mu_sol):
        assert m_mu_sol.residual_order is not None
        assert m_mu_sol.residual_order >= 150


class TestGenericFiber:
    def test_trivial_expansion_vanishes(self):
        M = ModulePresentation(CFG, [[1]], [[0]])
        E = solve_generic(to_generic(M), 6)
        assert E.exact
        assert E.U[0][0][0].num == TruncatedSeries.monomial(CFG, 0)
        for k in range(1, 6):
            assert all(e.is_zero() for row in E.U[k] for e in row)

    def test_recursion_truncated_lane(self, m_mu):
        E = solve_generic(to_generic(m_mu, allow_truncated=True), 8)
        G = to_generic(m_mu, allow_truncated=True).G_E
        for k in range(7):
            dU = [[e.derivative() for e in row] for row in E.U[k]]
            GU = mat_mul(G, E.U[k])
            for i in range(2):
                for j in range(2):
                    lhs = E.U[k + 1][i][j].scalar_mul(Fraction(k + 1))
                    rhs = dU[i][j] + GU[i][j]
                    diff = lhs - rhs
                    assert diff.truncate(diff.trunc).is_zero()

    def test_exact_lane_on_polynomial_module(self):
        # rank-2 module with polynomial entries: expansion stays exact
        G = [[0, TruncatedSeries.monomial(CFG, 0)], [0, 0]]
        M = ModulePresentation(CFG, [[1, 0], [0, 1]], G)
        E = solve_generic(to_generic(M), 5)
        assert E.exact
        # U_k[0][1] = t-derivative pattern of the nilpotent block: 1, 0...
        assert E.U[1][0][1].num == TruncatedSeries.monomial(CFG, 0)
        assert E.U[2][0][1].is_zero()

    def test_row_valuations_shape(self, m_mu):
        E = solve_generic(to_generic(m_mu, allow_truncated=True), 30)
        vals = E.row_valuations(1)
        assert vals[0] == (0, 0)
        assert all(v <= 0 for _, v in vals)
