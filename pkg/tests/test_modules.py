"""Matrix presentations: validation, functors, and the boundary-fiber
view."""

from fractions import Fraction

import pytest

from padicgrowth import (FieldConfig, FieldMismatch, FormMismatch,
                         ModulePresentation, NonPolynomialEntry,
                         TruncatedSeries, ZeroTwist, direct_sum, dual,
                         parse_module_document, pushforward, tensor,
                         to_generic, twist)
from padicgrowth.corpus import build_presentation, load_corpus

CFG = FieldConfig(5, 2, 5)

CORPUS = {e.label: e for e in load_corpus()}


def trivial(config=CFG, omega="dt"):
    return ModulePresentation(config, [[1]], [[0]], omega, label="triv")


@pytest.fixture(scope="module")
def m_mu():
    return build_presentation(CORPUS["m_mu"], depth=200)


@pytest.fixture(scope="module")
def m_mu_delta():
    return build_presentation(CORPUS["m_mu_delta"], depth=200)


class TestConstruction:
    def test_entry_coercion(self):
        M = ModulePresentation(CFG, [[Fraction(1, 2)]], [[CFG.pi_power(1)]])
        assert isinstance(M.A[0][0], TruncatedSeries)
        assert M.A[0][0].constant_term() == CFG.rational(Fraction(1, 2))

    def test_default_frobenius_lift_is_t_to_q(self):
        M = trivial()
        assert M.phi_t == TruncatedSeries.monomial(CFG, 5)

    def test_bad_omega_rejected(self):
        with pytest.raises(FormMismatch):
            ModulePresentation(CFG, [[1]], [[0]], omega="ds")


class TestValidation:
    def test_trivial_validates(self):
        for omega in ("dt", "dt/t"):
            assert trivial(omega=omega).validate().ok

    def test_m_mu_validates(self, m_mu):
        assert m_mu.validate().ok

    def test_incompatible_pair_fails(self, m_mu):
        bad = ModulePresentation(m_mu.config, m_mu.A,
                                 [[e + e for e in row] for row in m_mu.G],
                                 m_mu.omega, m_mu.phi_t)
        rep = bad.validate()
        assert not rep.ok
        assert any(name == "compatibility" for name, _ in rep.failures)

    def test_singular_a_fails(self):
        M = ModulePresentation(CFG, [[0]], [[0]])
        rep = M.validate()
        assert any(name == "invertible" for name, _ in rep.failures)

    def test_non_nilpotent_residue_fails(self):
        M = ModulePresentation(CFG, [[1]], [[1]], omega="dt/t")
        rep = M.validate()
        assert any(name == "nilpotent_residue" for name, _ in rep.failures)


class TestFunctors:
    def test_tensor_shapes_and_validates(self, m_mu):
        T = tensor(m_mu, m_mu)
        assert T.rank == 4
        assert T.validate().ok

    def test_direct_sum_validates(self, m_mu):
        S = direct_sum(m_mu, trivial(m_mu.config))
        assert S.rank == 3
        assert S.validate().ok

    def test_twist_validates_and_scales_a(self, m_mu):
        W = twist(m_mu, 5)
        assert W.validate().ok
        assert W.A[1][1] == m_mu.A[1][1].scalar_mul(CFG.rational(5))

    def test_twist_by_zero_rejected(self, m_mu):
        with pytest.raises(ZeroTwist):
            twist(m_mu, 0)

    def test_dual_validates(self, m_mu):
        D = dual(m_mu)
        assert D.validate(tol_order=150).ok
        assert D.G[0][1].is_zero() and D.G[1][0] == -m_mu.G[0][1]

    def test_double_dual_g_restores(self, m_mu):
        DD = dual(dual(m_mu))
        for i in range(2):
            for j in range(2):
                diff = DD.G[i][j] - m_mu.G[i][j]
                assert diff.truncate(150).is_zero()

    def test_pushforward_widens_q(self, m_mu):
        P = pushforward(m_mu, 2)
        assert P.config.q == 25 and P.config.p == 5
        assert P.validate(tol_order=100).ok

    def test_mismatched_configs_rejected(self, m_mu):
        other = trivial(FieldConfig(5, 4, 5))
        with pytest.raises(FieldMismatch):
            tensor(m_mu, other)


class TestGenericView:
    def test_polynomial_entries_give_exact_lane(self):
        M = trivial()
        E = to_generic(M)
        assert E.exact

    def test_dlog_divides_connection_by_t(self):
        G = [[0, TruncatedSeries.monomial(CFG, 1)], [0, 0]]
        M = ModulePresentation(CFG, [[1, 0], [0, 1]], G, omega="dt/t")
        E = to_generic(M)
        assert E.G_E[0][1].num == TruncatedSeries.monomial(CFG, 0)

    def test_truncated_entries_need_opt_in(self, m_mu):
        with pytest.raises(NonPolynomialEntry):
            to_generic(m_mu)
        E = to_generic(m_mu, allow_truncated=True)
        assert not E.exact


class TestDocumentParsing:
    def test_roundtrip_minimal_document(self):
        doc = """{
          "field": {"p": 5, "m": 2, "q": 5},
          "omega": "dt",
          "rank": 1,
          "A": [["q^(1/2)"]],
          "G": [["0"]],
          "label": "unit"
        }"""
        M = parse_module_document(doc, depth=50)
        assert M.rank == 1 and M.label == "unit"
        assert M.A[0][0].constant_term() == CFG.pi_power(1)
