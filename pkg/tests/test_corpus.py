"""Worked-example corpus: fixtures, runner plumbing, and the composite
generator."""

from fractions import Fraction

import pytest

from padicgrowth import FieldConfig
from padicgrowth.corpus import (CorpusOptions, build_presentation,
                                composite_presentations,
                                default_special_depth, load_corpus,
                                run_entry, u_plus_series, u_term,
                                u_term_valuation)

F = Fraction

ENTRIES = load_corpus()
LABELS = [e.label for e in ENTRIES]


class TestFixtures:
    def test_expected_labels(self):
        assert LABELS == sorted(LABELS)
        assert set(LABELS) == {"trivial", "twist_q", "direct_sum_unit_q",
                               "m_mu", "m_mu_delta", "tensor_rank4",
                               "bessel0"}

    def test_golden_keys_complete(self):
        required = {"validate", "c_slopes", "special_growth",
                    "generic_growth", "generic_frobenius", "lambda_max",
                    "pbq", "pbq_slopes", "b_nabla_special",
                    "b_nabla_generic", "np_compare", "gap_ok",
                    "ct_containment", "ct_equal_everywhere", "ct_strict_at"}
        for e in ENTRIES:
            assert required <= set(e.golden), e.label

    def test_only_filter(self):
        sub = load_corpus(only="m_mu")
        assert [e.label for e in sub] == ["m_mu"]

    def test_presentations_validate(self):
        for e in ENTRIES:
            if e.label == "bessel0":
                continue  # exercised separately; construction is heavy
            M = build_presentation(e, depth=150)
            assert M.validate().ok, e.label


class TestRunner:
    @pytest.mark.parametrize("label", ["trivial", "twist_q"])
    def test_fast_entries_match_golden(self, label):
        entry = [e for e in ENTRIES if e.label == label][0]
        opts = CorpusOptions(depth_special=150, depth_generic=60)
        result = run_entry(entry, opts)
        assert result["ok"], result["diffs"]

    def test_default_special_depth(self):
        assert default_special_depth(FieldConfig(5, 2, 5)) == 1250
        assert default_special_depth(FieldConfig(2, 1, 2)) == 32


class TestUSeries:
    def test_u_term_valuation_matches_exact_term(self):
        # the double-factorial term lives over K with v(pi) = 1/(p-1)
        cfg = FieldConfig(5, 4, 5)
        for i in (1, 2, 5, 12, 25, 62, 125):
            assert u_term(cfg, i).valuation() == u_term_valuation(i, 5)

    def test_u_plus_series_growth(self):
        from padicgrowth.growth import measure_series_growth
        cfg = FieldConfig(5, 4, 5)
        s = u_plus_series(cfg, 625)
        assert measure_series_growth(s, window=(16, 625)) == F(1, 2)


class TestComposites:
    def test_deterministic_for_seed(self):
        a = composite_presentations(seed=11, count=5, depth=80)
        b = composite_presentations(seed=11, count=5, depth=80)
        assert [m.label for m in a] == [m.label for m in b]

    def test_composites_validate(self):
        for M in composite_presentations(seed=3, count=6, depth=80):
            assert M.rank <= 4
            assert M.validate(tol_order=60).ok, M.label
