import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from thermoset import (
    EmptySubshift,
    SubshiftSpec,
    build_follower_graph,
    cut_cylinder,
    enumerate_words,
    is_admissible_periodic,
    repair_complete_invariance,
    transitive_components,
)
from thermoset.symbolic import FollowerGraph

from oracles import adjacency_word_counts, brute_force_prefixes


def golden():
    return SubshiftSpec(2, [(1, 1)])


# === follower graph ===

def test_graph_golden_mean():
    g = build_follower_graph(golden())
    assert g.nodes == ((1,), (2,))
    assert g.edge_pairs() == {((1,), (2,)), ((2,), (1,)), ((2,), (2,))}


def test_graph_full_shift_sentinel():
    g = build_follower_graph(SubshiftSpec(2))
    assert g.order == 0
    assert g.nodes == ((),)
    assert g.succ[()] == ((1, ()), (2, ()))


def test_graph_prunes_dead_windows():
    g = build_follower_graph(SubshiftSpec(2, [(1, 2), (2, 2)]))
    assert g.nodes == ((1,), (2,))
    assert g.edge_pairs() == {((1,), (1,)), ((2,), (1,))}


def test_graph_paths_avoid_forbidden_words():
    rng = random.Random(7)
    for forbidden in [[(1, 1)], [(1, 2), (2, 2)], [(1, 2, 1)], [(2,), (1, 1, 1)]]:
        try:
            spec = SubshiftSpec(2, forbidden)
        except EmptySubshift:
            continue
        g = build_follower_graph(spec)
        for _ in range(50):
            node = rng.choice(g.nodes)
            symbols = list(node)
            for _ in range(12):
                b, node = rng.choice(g.succ[node])
                symbols.append(b)
            text = tuple(symbols)
            for q in spec.forbidden:
                for i in range(len(text) - len(q) + 1):
                    assert text[i:i + len(q)] != q


def test_everything_forbidden_raises_at_construction():
    with pytest.raises(EmptySubshift):
        SubshiftSpec(2, [(1,), (2,)])


def test_normalization_drops_redundant_words():
    spec = SubshiftSpec(2, [(1, 1), (2, 1, 1), (1, 1, 2)])
    assert spec.forbidden == frozenset({(1, 1)})
    assert spec.max_len == 2


# === complete-invariance repair ===

def test_repair_collapses_to_single_fixed_stream():
    repaired = repair_complete_invariance(SubshiftSpec(2, [(1, 2), (2, 2)]))
    assert enumerate_words(repaired, 12) == [(1,) * 12]


def test_repair_noop_on_golden_mean():
    spec = golden()
    assert repair_complete_invariance(spec) is spec


def test_repair_noop_on_full_shift():
    spec = SubshiftSpec(3)
    assert repair_complete_invariance(spec) is spec


def test_repair_idempotent():
    for forbidden in [[(1, 2), (2, 2)], [(1, 1)], [(1, 2, 2), (2, 1, 1)], [(2, 1)]]:
        once = repair_complete_invariance(SubshiftSpec(2, forbidden))
        twice = repair_complete_invariance(once)
        assert once == twice


# === transitive components ===

def test_components_golden_mean_single():
    comps = transitive_components(build_follower_graph(golden()))
    assert len(comps) == 1
    assert enumerate_words(comps[0], 4) == enumerate_words(golden(), 4)


def test_components_two_fixed_streams():
    comps = transitive_components(build_follower_graph(SubshiftSpec(2, [(1, 2), (2, 1)])))
    assert len(comps) == 2
    assert enumerate_words(comps[0], 5) == [(1,) * 5]
    assert enumerate_words(comps[1], 5) == [(2,) * 5]


def test_components_empty_graph():
    empty = FollowerGraph(2, frozenset(), 1, {})
    assert transitive_components(empty) == []


# === word enumeration ===

def test_enumerate_golden_mean_depth3():
    words = enumerate_words(golden(), 3)
    assert words == [(1, 2, 1), (1, 2, 2), (2, 1, 2), (2, 2, 1), (2, 2, 2)]


def test_enumerate_full_shift_depth2():
    assert len(enumerate_words(SubshiftSpec(2), 2)) == 4


@pytest.mark.parametrize("forbidden", [[(1, 1)], [(1, 2)], [(2, 2), (1, 1)]])
def test_enumeration_counts_match_transition_matrix(forbidden):
    spec = SubshiftSpec(2, forbidden)
    counts = adjacency_word_counts(2, forbidden, 9)
    for n in range(1, 10):
        assert len(enumerate_words(spec, n)) == counts[n]


def test_enumeration_matches_string_oracle_small_cases():
    cases = [[], [(1, 1)], [(1, 2), (2, 2)], [(1, 2, 1)], [(2, 2, 2), (1, 1)], [(1,)]]
    for forbidden in cases:
        try:
            spec = repair_complete_invariance(SubshiftSpec(2, forbidden))
        except EmptySubshift:
            assert brute_force_prefixes(2, forbidden, 12) == []
            continue
        assert enumerate_words(spec, 12) == brute_force_prefixes(2, forbidden, 12)


# === periodic admissibility ===

def test_periodic_admissibility_golden_mean():
    spec = golden()
    assert is_admissible_periodic(spec, (1, 2))
    assert is_admissible_periodic(spec, (2, 1))
    assert not is_admissible_periodic(spec, (1,))
    assert is_admissible_periodic(spec, (2,))


def test_periodic_admissibility_full_shift():
    spec = SubshiftSpec(2)
    for n in (1, 2, 3):
        for w in itertools.product((1, 2), repeat=n):
            assert is_admissible_periodic(spec, w)


def test_periodic_wraparound_detection():
    # 212 periodically contains 221 across the seam
    spec = SubshiftSpec(2, [(2, 2, 1)])
    assert not is_admissible_periodic(spec, (2, 1, 2))


# === cylinder cutting ===

def test_cut_full_shift_gives_golden_mean():
    cut = cut_cylinder(SubshiftSpec(2), (1, 1))
    assert cut == golden()


def test_cut_chain_terminates_empty():
    step1 = cut_cylinder(golden(), (2, 2))
    assert sorted(enumerate_words(step1, 4)) == [(1, 2, 1, 2), (2, 1, 2, 1)]
    with pytest.raises(EmptySubshift):
        cut_cylinder(step1, (1, 2))


def test_cut_already_forbidden_is_identity():
    spec = golden()
    assert cut_cylinder(spec, (1, 1, 2)) is spec


def test_cut_word_shorter_than_stored_words_rejected():
    with pytest.raises(ValueError):
        cut_cylinder(golden(), (1,))


def test_cut_output_words_subset_of_input():
    spec = SubshiftSpec(2)
    cut = cut_cylinder(spec, (1, 1))
    for n in range(1, 9):
        assert set(enumerate_words(cut, n)) <= set(enumerate_words(spec, n))


# === randomized brute-force equivalence (small sample; the full sweep is acceptance) ===

WORD_POOL = [w for k in (1, 2, 3) for w in itertools.product((1, 2), repeat=k)]


@settings(max_examples=60, deadline=None)
@given(st.sets(st.sampled_from(WORD_POOL), max_size=5))
def test_repair_matches_string_oracle(forbidden):
    try:
        repaired = repair_complete_invariance(SubshiftSpec(2, forbidden))
    except EmptySubshift:
        assert brute_force_prefixes(2, sorted(forbidden), 12) == []
        return
    assert enumerate_words(repaired, 12) == brute_force_prefixes(2, sorted(forbidden), 12)
    again = repair_complete_invariance(repaired)
    assert again == repaired
