"""Admissible cuts, level profiles, and the limit shape of the profile."""

import math

import mpmath as mp
import pytest

import oracles
from mergeruns import counts, profiles, trees


def star(n):
    return trees.SyntaxTree.from_degree_word([n - 1] + [0] * (n - 1), None)


def path(n):
    return trees.SyntaxTree.from_degree_word([1] * (n - 1) + [0], None)


# -- admissible cuts ----------------------------------------------------------

def test_cut_count_reference(ref_tree):
    # the count includes the empty cut; the enumeration lists nonempty ones
    assert profiles.count_admissible_cuts(ref_tree) == 12
    assert len(profiles.enumerate_admissible_cuts(ref_tree)) == 11


def test_cut_count_extremes():
    for n in (2, 5, 9):
        assert profiles.count_admissible_cuts(path(n)) == n + 1
        assert profiles.count_admissible_cuts(star(n)) == 2 ** (n - 1) + 1


def test_cut_count_matches_oracle():
    for n in range(1, 8):
        for shape in oracles.all_shapes(n):
            t = trees.parse_process(oracles.to_term(shape))
            assert profiles.count_admissible_cuts(t) == oracles.cut_count(shape) + 1


def test_enumerate_cuts_matches_oracle():
    for n in range(1, 7):
        for shape in oracles.all_shapes(n):
            t = trees.parse_process(oracles.to_term(shape))
            cuts = profiles.enumerate_admissible_cuts(t)
            assert {c.nodes for c in cuts} == set(oracles.all_cuts(shape))
            for c in cuts:
                want = oracles.induced_shape(shape, c.nodes)
                assert c.shape.degree_word() == oracles.degree_word(want)
                assert c.labellings == oracles.run_count(want)
                assert c.size == len(c.nodes)


def test_enumerate_cuts_order_and_labels(ref_tree):
    cuts = profiles.enumerate_admissible_cuts(ref_tree)
    sizes = [c.size for c in cuts]
    assert sizes == sorted(sizes, reverse=True)
    assert cuts[0].nodes == (1, 2, 3, 4, 5, 6)
    assert cuts[0].labellings == 8
    assert cuts[-1].nodes == (1,)
    # induced shapes keep the source labels
    assert cuts[0].shape.labels == ("a", "b", "c", "d", "e", "f")


def test_enumerate_cuts_budget():
    with pytest.raises(trees.BudgetError) as e:
        profiles.enumerate_admissible_cuts(star(20))
    assert e.value.predicted == 2 ** 19


def test_cut_labellings_sum_to_semantic_size():
    for n in range(1, 7):
        for shape in oracles.all_shapes(n):
            t = trees.parse_process(oracles.to_term(shape))
            total = sum(c.labellings for c in profiles.enumerate_admissible_cuts(t))
            assert total == oracles.semantic_size_via_trie(shape)


# -- the cut-count sequence -----------------------------------------------------

def test_cut_count_sequence_values():
    want = [0, 1, 2, 7, 29, 131, 625, 3099, 15818, 82595, 439259]
    assert profiles.cut_count_sequence(10, method="brute") == want
    assert profiles.cut_count_sequence(10, method="recurrence") == want


def test_cut_count_sequence_matches_oracle():
    got = profiles.cut_count_sequence(7, method="brute")
    for n in range(1, 8):
        total = sum(oracles.cut_count(s) for s in oracles.all_shapes(n))
        assert got[n] == total


def test_cut_count_sequence_domains():
    with pytest.raises(ValueError):
        profiles.cut_count_sequence(11, method="brute")
    with pytest.raises(ValueError):
        profiles.cut_count_sequence(3, method="recurrence")
    with pytest.raises(ValueError):
        profiles.cut_count_sequence(8, method="nope")
    assert profiles.cut_count_sequence(4, method="recurrence")[4] == 29


def test_cut_count_sequence_long():
    seq = profiles.cut_count_sequence(60)
    assert len(seq) == 61
    assert all(isinstance(v, int) for v in seq)
    ratios = [seq[n + 1] / seq[n] for n in range(10, 60)]
    assert all(a < b for a, b in zip(ratios, ratios[1:]))
    assert 5.0 < ratios[0] and ratios[-1] < 7.0


# -- level profiles -------------------------------------------------------------

def test_profile_reference(ref_tree):
    prof = profiles.level_profile(ref_tree)
    assert prof == (1, 1, 2, 4, 8, 8)
    assert prof[3] == 4  # run prefixes of length four


def test_profile_shapes():
    assert profiles.level_profile(star(4)) == (1, 3, 6, 6)
    assert profiles.level_profile(path(6)) == (1,) * 6
    assert profiles.level_profile(trees.parse_process("a")) == (1,)


def test_profile_routes_agree():
    for n in range(1, 8):
        for shape in oracles.all_shapes(n):
            t = trees.parse_process(oracles.to_term(shape))
            fast = profiles.level_profile(t, method="fast")
            assert fast == profiles.level_profile(t, method="oracle")
            assert fast == oracles.profile_via_trie(shape)


def test_profile_oracle_size_limit():
    with pytest.raises(trees.BudgetError):
        profiles.level_profile(path(19), method="oracle")
    assert profiles.level_profile(path(19), method="fast") == (1,) * 19


def test_profile_ends():
    for n in range(1, 8):
        for shape in oracles.all_shapes(n):
            t = trees.parse_process(oracles.to_term(shape))
            prof = profiles.level_profile(t)
            assert prof[0] == 1
            assert prof[-1] == counts.hook_count(t)


def test_profile_monotone():
    for n in range(1, 9):
        for t in trees.enumerate_trees(n):
            prof = profiles.level_profile(t)
            assert profiles.profile_is_monotone(t)
            assert all(a <= b for a, b in zip(prof, prof[1:]))


def test_profile_sums_match_level_means():
    for n in range(1, 9):
        c = counts.catalan(n)
        acc = [0] * n
        for t in trees.enumerate_trees(n):
            for l, v in enumerate(profiles.level_profile(t)):
                acc[l] += v
        for l in range(n):
            assert acc[l] == counts.mean_level_width(n, n - 1 - l) * c


# -- semantic size ----------------------------------------------------------------

def test_semantic_size_reference(ref_tree):
    assert profiles.semantic_size(ref_tree) == 24


def test_semantic_size_matches_oracle():
    for n in range(1, 8):
        for shape in oracles.all_shapes(n):
            t = trees.parse_process(oracles.to_term(shape))
            assert profiles.semantic_size(t) == oracles.semantic_size_via_trie(shape)


def test_semantic_size_path():
    assert profiles.semantic_size(path(25)) == 25


def test_semantic_size_big_star_exact():
    # sum over k <= 39 of 39!/k!, a 47-digit integer
    got = profiles.semantic_size(star(40))
    want = sum(math.factorial(39) // math.factorial(k) for k in range(40))
    assert got == want
    assert got == 55447192200369381342665835466328897344361743780
    assert got > 2.03e46


# -- profile limit shape ------------------------------------------------------

def test_limit_profile_domain():
    with pytest.raises(ValueError):
        profiles.limit_profile(0.5, 3)
    with pytest.raises(ValueError):
        profiles.limit_profile(0.001, 100)
    with pytest.raises(ValueError):
        profiles.limit_profile(0.999, 100)
    profiles.limit_profile(2 / 100, 100)
    profiles.limit_profile(1 - 2 / 100, 100)


def test_limit_profile_decreasing_in_c():
    vals = [profiles.limit_profile(c / 20, 200) for c in range(2, 19)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def ln_fraction(q):
    return float(mp.log(mp.mpf(q.numerator)) - mp.log(mp.mpf(q.denominator)))


def test_limit_profile_error_bound_holds():
    # c measures the level from the deep end: i = c * n
    for n in (20, 50, 100, 200):
        for tenth in range(1, 10):
            if (n * tenth) % 10:
                continue
            c = tenth / 10
            i = n * tenth // 10
            dev = abs(profiles.limit_profile(c, n) -
                      ln_fraction(counts.mean_level_width(n, i)))
            assert dev <= profiles.limit_profile_error_bound(c, n), (n, c)


def test_limit_profile_example_point():
    dev = abs(profiles.limit_profile(0.5, 200) -
              ln_fraction(counts.mean_level_width(200, 100)))
    assert dev <= profiles.limit_profile_error_bound(0.5, 200) == \
        profiles.LIMIT_PROFILE_ERROR_FACTOR / (0.25 * 200)


def test_limit_profile_converges():
    devs = []
    for n in (100, 200, 400):
        i = int(0.3 * n)
        devs.append(abs(profiles.limit_profile(0.3, n) -
                        ln_fraction(counts.mean_level_width(n, i))))
    assert devs[0] > devs[1] > devs[2]
