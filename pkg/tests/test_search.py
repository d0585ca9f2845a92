import pytest
from hypothesis import given, settings, strategies as st

import oracle
from lenslab.errors import BudgetExceeded
from lenslab.implication import ImplicationRule, closure_set, rule_database
from lenslab.laws import ALL_LAWS, FiniteLens, Law, from_mask, law_profile, law_set, verify_witness
from lenslab.search import (
    Counterexample,
    LensIndex,
    NoneFound,
    batch_masks,
    candidate_survey,
    clear_cache,
    enumerate_lenses,
    find_counterexample,
    profile_census,
    random_search,
    scan_order,
    soundness_sweep,
    space_masks,
    space_size,
)

# First hits in scan order, computed by the brute-force oracle.
GOLDEN_FIRST_HITS = {
    ("GP", "SG"): (2, 1, [0, 0], [[0], [1]]),
    ("SS", "GP"): (2, 2, [0, 0], [[1, 0], [1, 0]]),
    ("PS", "SS"): (2, 1, [0, 0], [[1], [0]]),
    ("UD", "SG"): (2, 1, [0, 0], [[1], [0]]),
    ("PS", "UD"): (3, 1, [0, 0, 0], [[1], [2], [0]]),
    ("WP", "UD"): (2, 1, [0, 0], [[0], [0]]),
    ("VD", "PG"): (2, 2, [0, 0], [[1, 0], [1, 0]]),
    ("PI", "VD"): (2, 2, [0, 0], [[0, 1], [1, 0]]),
    ("PT", "PP"): (2, 2, [0, 0], [[0, 0], [1, 0]]),
    ("WP", "PG"): (1, 2, [0], [[0, 0]]),
    ("GP", "UD"): (2, 2, [0, 0], [[0, 0], [1, 0]]),
    ("UD", "GP"): (2, 1, [0, 0], [[1], [0]]),
    ("SG", "PP"): (2, 3, [1, 0], [[1, 0, 1], [1, 0, 0]]),
    ("GP PG", "PP"): (3, 2, [1, 0, 0], [[1, 0], [1, 0], [2, 0]]),
    ("WP", "GP"): (2, 1, [0, 0], [[0], [0]]),
}


@pytest.mark.parametrize("n, m, count", [(1, 1, 1), (2, 2, 64), (3, 3, 531441), (2, 3, 576), (3, 2, 5832)])
def test_space_size(n, m, count):
    assert space_size(n, m) == count


@pytest.mark.parametrize("n, m", [(1, 1), (1, 3), (2, 1), (2, 2), (3, 1)])
def test_enumeration_matches_oracle_order(n, m):
    ours = [(list(l.get), [list(r) for r in l.put]) for l in enumerate_lenses(n, m)]
    assert ours == list(oracle.lenses(n, m))
    assert len(ours) == space_size(n, m)


@settings(max_examples=200)
@given(st.integers(1, 4), st.integers(1, 4), st.data())
def test_index_bijection(n, m, data):
    get_code = data.draw(st.integers(0, m**n - 1))
    put_code = data.draw(st.integers(0, n ** (n * m) - 1))
    idx = LensIndex(n, m, get_code, put_code)
    assert LensIndex.encode(idx.decode()) == idx
    assert LensIndex.from_flat(n, m, idx.flat) == idx


def test_index_range_checked():
    with pytest.raises(ValueError):
        LensIndex(2, 2, 4, 0)


def test_enumeration_budget():
    with pytest.raises(BudgetExceeded):
        next(enumerate_lenses(3, 3, budget=1000))


def test_scan_order():
    assert scan_order(3, 3) == [(1, 1), (1, 2), (2, 1), (1, 3), (3, 1), (2, 2), (2, 3), (3, 2), (3, 3)]


@pytest.mark.parametrize("n, m", scan_order(2, 3) + [(3, 1)])
def test_vector_masks_match_scalar_profiles(n, m):
    masks = space_masks(n, m)
    for i, lens in enumerate(enumerate_lenses(n, m)):
        assert from_mask(int(masks[i])) == law_profile(lens)


def test_vector_masks_match_oracle_sampled_at_3_3():
    import random

    rnd = random.Random(3)
    masks = space_masks(3, 3)
    for _ in range(1500):
        i = rnd.randrange(len(masks))
        lens = LensIndex.from_flat(3, 3, i).decode()
        names = {law.name for law in from_mask(int(masks[i]))}
        assert names == oracle.profile(3, 3, list(lens.get), [list(r) for r in lens.put])


def test_batch_masks_on_random_tables():
    import numpy as np

    rng = np.random.default_rng(0)
    gets = rng.integers(0, 3, size=(400, 4))
    puts = rng.integers(0, 4, size=(400, 4, 3))
    masks = batch_masks(gets, puts, chunk=64)
    for g, p, mask in zip(gets, puts, masks):
        lens = FiniteLens(4, 3, g.tolist(), p.tolist())
        assert from_mask(int(mask)) == law_profile(lens)


@pytest.mark.parametrize("key", sorted(GOLDEN_FIRST_HITS))
def test_first_hits_are_golden(key):
    premises, conclusion = key
    found = find_counterexample(premises.split(), conclusion, 3, 3)
    assert isinstance(found, Counterexample)
    n, m, get, put = GOLDEN_FIRST_HITS[key]
    assert found.lens == FiniteLens(n, m, get, put)
    profile = law_profile(found.lens)
    assert law_set(premises.split()) <= profile
    assert Law[conclusion] not in profile
    assert found.witness.law is Law[conclusion]
    assert verify_witness(found.lens, found.witness)


def test_sound_rule_has_no_counterexample():
    found = find_counterexample(["SS", "WP"], "GP", 3, 3)
    assert isinstance(found, NoneFound)
    assert found.max_scale == (3, 3)
    assert len(found.searched) == 9


def test_find_counterexample_budget_records_partial_scale():
    with pytest.raises(BudgetExceeded) as info:
        find_counterexample(["SS", "WP"], "GP", 3, 3, budget=10_000)
    assert info.value.searched == [(1, 1), (1, 2), (2, 1), (1, 3), (3, 1), (2, 2), (2, 3), (3, 2)]


def test_conclusion_in_premises_rejected():
    with pytest.raises(ValueError):
        find_counterexample(["GP"], "GP")


def test_sweep_small():
    report = soundness_sweep(2, 2)
    assert report.total == 1 + 2 + 4 + 64
    assert report.violations == 0


def test_sweep_catches_injected_unsound_rule():
    bogus = ImplicationRule(19, frozenset({Law.GP}), Law.SG, "injected")
    report = soundness_sweep(2, 2, rules=rule_database() + [bogus])
    assert report.violations > 0
    assert set(report.first_violations) == {"R19"}
    cx = report.first_violations["R19"]
    assert cx.lens == FiniteLens(2, 1, [0, 0], [[0], [1]])


def test_sweep_budget():
    with pytest.raises(BudgetExceeded):
        soundness_sweep(3, 3, budget=1000)


def test_rules_sound_on_oracle_profiles():
    # Independent of the vectorised path: oracle profiles, every lens to (2, 2).
    for n, m in scan_order(2, 2):
        for get, put in oracle.lenses(n, m):
            prof = oracle.profile(n, m, get, put)
            for rule in rule_database():
                if {l.name for l in rule.premises} <= prof:
                    assert rule.conclusion.name in prof


def test_census_examples():
    assert profile_census(1, 1) == {frozenset(ALL_LAWS): 1}
    census = profile_census(2, 2)
    assert sum(census.values()) == 64
    assert sum(c for prof, c in census.items() if Law.SG in prof) == 2


def test_census_matches_oracle():
    from collections import Counter

    expected = Counter(oracle.profile(2, 2, g, p) for g, p in oracle.lenses(2, 2))
    census = profile_census(2, 2)
    assert {frozenset(l.name for l in prof): c for prof, c in census.items()} == dict(expected)


def test_survey_examples():
    reports = {(r.premises, r.conclusion): r for r in candidate_survey(2, 3, 3)}
    for law in ALL_LAWS:
        if law not in (Law.SG, Law.PG):
            assert reports[frozenset({Law.SG, Law.PG}), law].status == "derivable"
    assert reports[frozenset({Law.GP, Law.PG}), Law.PP].status == "refuted"
    assert reports[frozenset({Law.WP}), Law.GP].status == "refuted"


def test_survey_layout_and_order():
    reports = candidate_survey(2, 2, 2)
    assert len(reports) == 11 * 10 + 55 * 9
    keys = [(len(r.premises), sorted(l.index for l in r.premises), r.conclusion.index) for r in reports]
    assert keys == sorted(keys)


def test_survey_statuses_are_consistent():
    for r in candidate_survey(2, 3, 3):
        derivable = r.conclusion in closure_set(r.premises)
        assert (r.status == "derivable") == derivable
        if r.status == "refuted":
            profile = law_profile(r.counterexample.lens)
            assert r.premises <= profile and r.conclusion not in profile


def test_parallel_masks_identical():
    serial = space_masks(3, 2).copy()
    clear_cache()
    parallel = space_masks(3, 2, workers=3)
    assert (serial == parallel).all()
    clear_cache()


def test_parallel_sweep_report_identical():
    serial = soundness_sweep(3, 2).to_dict()
    clear_cache()
    parallel = soundness_sweep(3, 2, workers=4).to_dict()
    assert serial == parallel


def test_random_search_deterministic():
    a = random_search(["GP"], "SG", 3, 3, 10_000, 7)
    b = random_search(["GP"], "SG", 3, 3, 10_000, 7)
    assert a == b
    assert isinstance(a, Counterexample)
    assert verify_witness(a.lens, a.witness)
    assert {Law.GP} <= law_profile(a.lens)


def test_random_search_sound_rule():
    found = random_search(["SS", "WP"], "GP", 4, 3, 200_000, 42)
    assert isinstance(found, NoneFound) and found.samples == 200_000


def test_random_search_needs_samples():
    with pytest.raises(ValueError):
        random_search(["GP"], "SG", 2, 2, 0, 1)
