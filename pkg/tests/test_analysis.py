"""Slopes, polygons, growth filtrations, purity, and the comparison
checks."""

from fractions import Fraction

import pytest

from padicgrowth import (FieldConfig, ModulePresentation, b_nabla, gap_check,
                         frobenius_slopes_special, growth_filtration_generic,
                         growth_filtration_special, newton_polygon,
                         np_compare, pbq_test, semicontinuity_check,
                         solve_generic, solve_special, to_generic, verify_ct)
from padicgrowth.analysis import (frobenius_slopes_generic,
                                  frobenius_slopes_special_oracle,
                                  triangular_slopes_oracle)
from padicgrowth.corpus import build_presentation, load_corpus
from padicgrowth.series import GenericCoefficient, TruncatedSeries

CFG = FieldConfig(5, 2, 5)
CORPUS = {e.label: e for e in load_corpus()}
F = Fraction


@pytest.fixture(scope="module")
def m_mu():
    return build_presentation(CORPUS["m_mu"], depth=200)


@pytest.fixture(scope="module")
def m_mu_delta():
    return build_presentation(CORPUS["m_mu_delta"], depth=200)


def diag(config, *scalars):
    n = len(scalars)
    return [[scalars[i] if i == j else config.zero() for j in range(n)]
            for i in range(n)]


class TestSpecialSlopes:
    def test_diagonal_matrix(self):
        C = diag(CFG, CFG.one(), CFG.pi_power(-1), CFG.rational(5))
        assert frobenius_slopes_special(C, CFG) == [F(-1, 2), 0, 1]

    def test_oracle_agrees_on_random_uppertriangular(self):
        import random
        rng = random.Random(7)
        for _ in range(10):
            n = rng.randint(1, 3)
            C = [[CFG.zero()] * n for _ in range(n)]
            for i in range(n):
                C[i][i] = CFG.pi_power(rng.randint(-3, 3))
                for j in range(i + 1, n):
                    C[i][j] = CFG.rational(rng.randint(-4, 4))
            assert frobenius_slopes_special(C, CFG) == \
                frobenius_slopes_special_oracle(C, CFG)

    def test_q25_normalization(self):
        cfg = FieldConfig(5, 2, 25)
        C = diag(cfg, cfg.rational(5))
        # v(p) = 1 but log_p q = 2: slope is 1/2 in q-units
        assert frobenius_slopes_special(C, cfg) == [F(1, 2)]


class TestGenericSlopes:
    def test_constant_diagonal(self):
        pi = TruncatedSeries.from_scalar(CFG, CFG.pi_power(1))
        A = [[GenericCoefficient(CFG, pi), GenericCoefficient.zero(CFG)],
             [GenericCoefficient.zero(CFG), GenericCoefficient.one(CFG)]]
        assert frobenius_slopes_generic(A, CFG) == [0, F(1, 2)]

    def test_triangular_oracle_with_t_units(self):
        one = TruncatedSeries.from_scalar(CFG, CFG.one())
        t = TruncatedSeries.monomial(CFG, 1)
        A = [[GenericCoefficient(CFG, one + t.scalar_mul(CFG.rational(5))),
              GenericCoefficient(CFG, t)],
             [GenericCoefficient.zero(CFG),
              GenericCoefficient(CFG, t.scalar_mul(CFG.pi_power(2)))]]
        want = triangular_slopes_oracle(A, CFG)
        assert frobenius_slopes_generic(A, CFG) == want
        assert want == [0, 1]


class TestNewtonPolygon:
    def test_vertices_collapse_collinear(self):
        np1 = newton_polygon([0, 0, 1])
        assert np1.vertices == [(0, 0), (2, 0), (3, 1)]
        assert np1.width() == 3 and np1.height() == 1

    def test_evaluate_interpolates(self):
        np1 = newton_polygon([0, 1])
        assert np1.evaluate(F(3, 2)) == F(1, 2)

    def test_compare_equal_and_above(self):
        a = newton_polygon([0, 1])
        b = newton_polygon([F(1, 2), F(1, 2)])
        assert np_compare(a, a) == "equal"
        assert np_compare(b, a) == "above_same_endpoints"
        assert np_compare(a, b) == "crossing"

    def test_compare_endpoint_mismatch(self):
        a = newton_polygon([0, 1])
        c = newton_polygon([0, 2])
        assert np_compare(a, c) == "endpoint_mismatch"

    def test_gap_check(self):
        assert gap_check(newton_polygon([0, F(1, 2), 1]))
        assert not gap_check(newton_polygon([0, 2]))


class TestSpecialGrowth:
    def test_m_mu_breaks(self, m_mu):
        S = solve_special(m_mu, 200)
        rep = growth_filtration_special(S)
        assert rep.slope_multiset == [0, F(1, 2)]
        assert b_nabla(rep) == F(1, 2)
        assert rep.dim_at(0) == 1 and rep.dim_at(F(1, 2)) == 2

    def test_m_mu_delta_dims(self, m_mu_delta):
        S = solve_special(m_mu_delta, 200)
        rep = growth_filtration_special(S)
        assert rep.slope_multiset == [0, 0, F(3, 4)]
        # dims 0, 2, 3 below, at, and above the break
        assert rep.dim_at(F(-1, 8)) == 0 or rep.dim_at(0) == 2
        assert rep.dim_at(0) == 2
        assert rep.dim_at(F(3, 4)) == 3


class TestGenericGrowth:
    def test_unipotent_exact_lane(self):
        M = ModulePresentation(CFG, [[1, 0], [0, 5]], [[0, 1], [0, 0]],
                               omega="dt/t")
        E = solve_generic(to_generic(M), 130)
        rep = growth_filtration_generic(E)
        assert rep.slope_multiset == [0, 1]

    def test_m_mu_truncated_lane(self, m_mu):
        E = solve_generic(to_generic(m_mu, allow_truncated=True), 130)
        rep = growth_filtration_generic(E)
        assert rep.slope_multiset == [0, F(1, 2)]


class TestPbq:
    def test_m_mu_is_pure(self, m_mu):
        Mg = to_generic(m_mu, allow_truncated=True)
        E = solve_generic(Mg, 130)
        verdict = pbq_test(E, Mg.A_E, m_mu.config)
        assert verdict.is_pbq
        assert verdict.bounded_solution_dim == 1
        assert verdict.bounded_slope_multiset == [F(1, 2)]
        assert verdict.lambda_max_generic == F(1, 2)

    def test_m_mu_delta_is_not_pure(self, m_mu_delta):
        Mg = to_generic(m_mu_delta, allow_truncated=True)
        E = solve_generic(Mg, 130)
        verdict = pbq_test(E, Mg.A_E, m_mu_delta.config)
        assert not verdict.is_pbq
        assert verdict.bounded_slope_multiset == [F(1, 4), F(3, 4)]


class TestComparisons:
    def test_verify_ct_pure_case(self, m_mu):
        S = solve_special(m_mu, 200)
        rep = growth_filtration_special(S)
        c_slopes = frobenius_slopes_special(S.C, m_mu.config)
        check = verify_ct(c_slopes, rep, F(1, 2), True)
        assert check.ok
        names = {c["name"]: c for c in check.checks}
        assert names["containment"]["witnesses"]["strict_at"] == []

    def test_verify_ct_impure_case(self, m_mu_delta):
        S = solve_special(m_mu_delta, 200)
        rep = growth_filtration_special(S)
        c_slopes = frobenius_slopes_special(S.C, m_mu_delta.config)
        check = verify_ct(c_slopes, rep, F(3, 4), False)
        assert check.ok  # containment holds, inequality matches non-purity
        names = {c["name"]: c for c in check.checks}
        strict = names["containment"]["witnesses"]["strict_at"]
        assert strict and min(strict) == 0
        assert max(s for s in strict) < F(3, 4) - F(1, 4) + F(1, 4)

    def test_semicontinuity(self):
        ok, rel = semicontinuity_check([F(1, 2), F(1, 2)], [0, 1])
        assert ok and rel == "above_same_endpoints"
        ok2, rel2 = semicontinuity_check([0, 1], [F(1, 2), F(1, 2)])
        assert not ok2 and rel2 == "crossing"
