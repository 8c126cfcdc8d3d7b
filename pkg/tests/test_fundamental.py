import pytest

from gpk.fundamental import (
    SUITE_FORMULAS,
    SUITE_SCHEMES,
    agrees,
    composition_suite,
    contexts,
    exhaustive_suite,
    random_suite,
    small_structures,
    suite_formulas,
    suite_schemes,
)
from gpk.utils import Budget


def test_suite_is_complete():
    assert [s.name for s in suite_schemes()] == list(SUITE_SCHEMES)
    assert set(suite_formulas()) == set(SUITE_FORMULAS)


def test_small_structures_include_both_orders():
    structures = small_structures(2)
    assert any(len(s) == 0 for s in structures)
    universes = {s.universe for s in structures}
    assert ("v1", "e1") in universes and ("e1", "v1") in universes


def test_contexts_range_over_the_universe():
    structure = small_structures(2)[-1]
    schemes = {s.name: s for s in suite_schemes()}
    assert list(contexts(schemes["identity"], structure)) == [{}]
    assert len(list(contexts(schemes["delete-edge"], structure))) == len(structure)


def test_fixed_suite_on_structures_up_to_three_elements():
    report = exhaustive_suite(max_elements=3)
    assert report.checked > 0
    assert report.disagreements == []
    assert report.passed


@pytest.mark.slow
def test_fixed_suite_on_structures_up_to_four_elements():
    assert exhaustive_suite(max_elements=4).passed


def test_random_triples_agree():
    report = random_suite(trials=60, max_elements=3, seed=11)
    assert report.checked == 60
    assert report.to_dict()["agreed"] == 60


def test_composition_is_coherent():
    report = composition_suite(trials=40, max_elements=3, seed=5)
    assert report.checked == 40
    assert report.passed


@pytest.mark.slow
def test_random_triples_agree_at_full_scale():
    report = random_suite(trials=500, max_elements=4, seed=7)
    assert report.checked == 500
    assert report.passed


@pytest.mark.slow
def test_composition_is_coherent_at_full_scale():
    report = composition_suite(trials=100, max_elements=4, seed=7)
    assert report.checked == 100
    assert report.passed


def test_expired_budget_truncates():
    budget = Budget(1)
    budget.started -= 10
    report = random_suite(trials=5, max_elements=2, budget=budget)
    assert report.truncated
    assert not report.passed


def test_agrees_on_a_contraction():
    schemes = {s.name: s for s in suite_schemes()}
    formulas = suite_formulas()
    structure = next(s for s in small_structures(3) if s.universe == ("v1", "v2", "e1"))
    assert agrees(schemes["contract-edge"], formulas["has-edge"], structure, {"x": "e1"})
