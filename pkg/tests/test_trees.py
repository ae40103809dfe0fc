"""Syntax layer: parsing, conversions, contraction, semantic trees."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from mergeruns import counts, trees


# -- parsing ------------------------------------------------------------------

@pytest.mark.parametrize("text,term", [
    ("a", "a"),
    ("a.b.c", "a.b.c"),
    ("a.(b || c)", "a.(b || c)"),
    ("  a .( b||c )  ", "a.(b || c)"),
    ("x1.(y_2 || z)", "x1.(y_2 || z)"),
    ("a.b.(c || d.(e || f))", "a.b.(c || d.(e || f))"),
])
def test_parse_accepts(text, term):
    assert trees.parse_process(text).to_term() == term


@pytest.mark.parametrize("text", [
    "", "   ", ".", "a.", "a.(b", "a.(b || )", "a || b", "(a || b)",
    "a.()", "a.(b |) ", "a b", "a.(b || c))", "a..b", "#root", "1a",
    "a.(b || c).d", "a.((b || c))",
])
def test_parse_rejects(text):
    with pytest.raises(trees.ParseError):
        trees.parse_process(text)


def test_parse_error_positions():
    with pytest.raises(trees.ParseError) as e:
        trees.parse_process("a.(b || ")
    assert e.value.position == 8
    with pytest.raises(trees.ParseError) as e:
        trees.parse_process("a | b")
    assert e.value.position == 2
    with pytest.raises(trees.ParseError) as e:
        trees.parse_process("a || b")
    assert "forest" in str(e.value)


def test_forest_mode():
    t = trees.parse_process("a || b.c", allow_forest=True)
    assert t.size == 4
    assert t.label(1) == trees.FOREST_ROOT_LABEL
    assert t.to_term() == "a || b.c"
    # single term stays unwrapped even in forest mode
    assert trees.parse_process("a.b", allow_forest=True).size == 2


def test_reference_structure(ref_tree):
    t = ref_tree
    assert t.size == 6
    assert t.labels == ("a", "b", "c", "d", "e", "f")
    assert [t.parent(v) for v in range(1, 7)] == [0, 1, 2, 2, 4, 4]
    assert t.children(2) == (3, 4)
    assert t.degree_word() == (1, 2, 0, 2, 0, 0)
    assert t.subtree_sizes() == (6, 5, 1, 3, 1, 1)


# -- conversions --------------------------------------------------------------

def test_term_round_trip_all_small_shapes():
    for n in range(1, 8):
        for shape in oracles.all_shapes(n):
            term = oracles.to_term(shape)
            t = trees.parse_process(term)
            assert t.to_term() == term
            assert t.degree_word() == oracles.degree_word(shape)


def test_nested_round_trip(ref_tree):
    doc = ref_tree.to_nested()
    assert doc["label"] == "a"
    assert trees.SyntaxTree.from_nested(doc) == ref_tree


def test_degree_word_round_trip(ref_tree):
    t = trees.SyntaxTree.from_degree_word(ref_tree.degree_word(), ref_tree.labels)
    assert t == ref_tree


@pytest.mark.parametrize("word,position", [
    ((2, 0), 2),        # word ends before the tree is complete
    ((1, 0, 0), 3),     # trailing entries after completion
    ((0, 1), 2),
])
def test_degree_word_errors(word, position):
    with pytest.raises(ValueError) as e:
        trees.SyntaxTree.from_degree_word(word, ["x"] * len(word))
    assert f"position {position}" in str(e.value)


def test_degree_sequence_round_trip_small():
    for n in range(1, 8):
        for shape in oracles.all_shapes(n):
            t = trees.parse_process(oracles.to_term(shape))
            u = trees.degree_sequence_of_tree(t)
            assert len(u) == n
            assert u[-1] == 0
            assert trees.tree_from_degree_sequence(u, t.labels) == t


def test_degree_sequence_reference(ref_tree):
    u = trees.degree_sequence_of_tree(ref_tree)
    assert u == (1, 2, 1, 2, 1, 0)
    assert trees.tree_from_degree_sequence(u, ref_tree.labels) == ref_tree


def test_degree_sequence_single_node():
    t = trees.parse_process("a")
    assert trees.degree_sequence_of_tree(t) == (0,)
    assert trees.tree_from_degree_sequence((0,), ("a",)) == t


@pytest.mark.parametrize("u", [
    (),                  # empty
    (0, 0),              # zero with nodes left
    (1, 2, 0),           # hits zero with a node unaccounted for
    (2, 1, 1, 1),        # never reaches zero
    (1, 3, 1, 2, 1, 0),  # drop of two between consecutive entries
])
def test_degree_sequence_errors(u):
    with pytest.raises(ValueError):
        trees.tree_from_degree_sequence(u, None)


def test_degree_sequence_rises_are_unconstrained():
    u = (1, 3, 2, 1, 1, 0)
    t = trees.tree_from_degree_sequence(u, None)
    assert trees.degree_sequence_of_tree(t) == u


def test_degree_sequence_drop_error_indexed():
    with pytest.raises(ValueError) as e:
        trees.tree_from_degree_sequence((2, 0, 0, 0), None)
    assert "3" in str(e.value) or "2" in str(e.value)


# -- labels and lookup --------------------------------------------------------

def test_label_lookup(ref_tree):
    assert ref_tree.node_by_label("d") == 4
    assert ref_tree.nodes_by_label("d") == (4,)
    with pytest.raises(KeyError):
        ref_tree.node_by_label("zz")


def test_ambiguous_label():
    t = trees.parse_process("a.(b || b)")
    assert t.nodes_by_label("b") == (2, 3)
    with pytest.raises(KeyError) as e:
        t.node_by_label("b")
    assert "ambiguous" in str(e.value)


def test_default_labels():
    labels = trees.default_labels(30)
    assert labels[:3] == ["a", "b", "c"]
    assert labels[25] == "z"
    assert labels[26] == "aa"
    assert labels[27] == "ab"


# -- contraction --------------------------------------------------------------

def test_contract_reference(ref_tree):
    t1 = trees.contract(ref_tree, 1)
    assert t1.to_term() == "b.(c || d.(e || f))"
    t2 = trees.contract(t1, 2)
    assert t2.to_term() == "d.(c || e || f)"


def test_contract_splices_in_place():
    t = trees.parse_process("a.(b || c.(e || f) || d)")
    assert trees.contract(t, 2).to_term() == "c.(b || e || f || d)"


def test_contract_matches_oracle():
    for n in range(2, 7):
        for shape in oracles.all_shapes(n):
            t = trees.parse_process(oracles.to_term(shape))
            for i, v in enumerate(t.children(1), start=1):
                got = trees.contract(t, i)
                want = oracles.contract_shape(shape, v)
                assert got.degree_word() == oracles.degree_word(want)
                assert got.size == n - 1


def test_contract_errors(ref_tree):
    with pytest.raises(ValueError):
        trees.contract(trees.parse_process("a"), 1)
    with pytest.raises(ValueError):
        trees.contract(ref_tree, 2)  # root has a single child


# -- enumeration --------------------------------------------------------------

def test_enumerate_counts_and_order():
    for n in range(1, 9):
        words = [t.degree_word() for t in trees.enumerate_trees(n)]
        assert len(words) == counts.catalan(n)
        assert len(set(words)) == len(words)
        assert words == sorted(words)


def test_enumerate_matches_oracle():
    for n in range(1, 8):
        got = {t.degree_word() for t in trees.enumerate_trees(n)}
        want = {oracles.degree_word(s) for s in oracles.all_shapes(n)}
        assert got == want


def test_enumerate_limit():
    with pytest.raises(trees.BudgetError):
        next(trees.enumerate_trees(trees.ENUMERATION_LIMIT + 1))
    assert next(trees.enumerate_trees(13, oracle_limit=13)).size == 13


# -- weights ------------------------------------------------------------------

def test_annotate_weights(ref_tree):
    w = trees.annotate_weights(ref_tree)
    assert [w.weight(v) for v in range(1, 7)] == [6, 5, 1, 3, 1, 1]


def test_weighted_tree_validation(ref_tree):
    with pytest.raises(ValueError):
        trees.WeightedTree(ref_tree, (6, 5, 1, 3, 1, 2))


# -- run prefixes and suspension ----------------------------------------------

def test_validate_run_prefix(ref_tree):
    assert trees.validate_run_prefix(ref_tree, [1, 2, 4]) == (1, 2, 4)
    for bad, idx_hint in [
        ([], "index 1"),
        ([2], "index 1"),
        ([1, 1], "index 2"),
        ([1, 5], "index 2"),      # e before d
        ([1, 2, 4, 4], "index 4"),
        ([1, 2, 9], "index 3"),
    ]:
        with pytest.raises(ValueError) as e:
            trees.validate_run_prefix(ref_tree, bad)
        assert idx_hint in str(e.value)


def test_suspended_view(ref_tree):
    w = trees.annotate_weights(ref_tree)
    view = trees.suspended_view(w, [1, 2, 4])
    assert view.frontier == (3, 5, 6)
    assert [ref_tree.label(v) for v in view.frontier] == ["c", "e", "f"]
    assert view.root == 4


def test_poset(ref_tree):
    assert trees.tree_to_poset(ref_tree) == [(1, 2), (2, 3), (2, 4), (4, 5), (4, 6)]


# -- semantic trees -----------------------------------------------------------

def test_semantic_reference(ref_tree):
    sem = trees.build_semantic_tree(ref_tree)
    assert sem.node_count == 24
    assert sem.leaf_count() == 8
    assert sem.level_counts() == (1, 1, 2, 4, 8, 8)


def test_semantic_branches_are_runs():
    for n in range(1, 7):
        for shape in oracles.all_shapes(n):
            t = trees.parse_process(oracles.to_term(shape))
            sem = trees.build_semantic_tree(t)
            branches = list(sem.branches())
            assert len(branches) == len(set(branches))
            assert sorted(branches) == sorted(oracles.all_runs(shape))


def test_semantic_levels_are_prefix_counts():
    for n in range(1, 7):
        for shape in oracles.all_shapes(n):
            t = trees.parse_process(oracles.to_term(shape))
            sem = trees.build_semantic_tree(t)
            assert sem.level_counts() == oracles.profile_via_trie(shape)


def test_semantic_budget():
    t = trees.parse_process(oracles.to_term(((),) * 10, None))  # star, 11 nodes
    with pytest.raises(trees.BudgetError) as e:
        trees.build_semantic_tree(t, node_budget=100)
    assert e.value.predicted == 9864101
    assert e.value.budget == 100


def test_semantic_leftmost_branch(ref_tree):
    sem = trees.build_semantic_tree(ref_tree)
    degrees = sem.leftmost_branch_degrees()
    assert len(degrees) == 6
    assert degrees[0] == 1 and degrees[-1] == 0


def test_semantic_dot_output(ref_tree):
    dot = trees.build_semantic_tree(ref_tree).to_dot()
    assert dot.startswith("digraph") and dot.rstrip().endswith("}")
    assert dot.count("->") == 23


# -- property tests -----------------------------------------------------------

@st.composite
def degree_words(draw, max_size=40):
    n = draw(st.integers(min_value=1, max_value=max_size))
    word = []
    open_slots = 1
    remaining = n
    while remaining:
        cap = remaining - open_slots  # keep the word completable
        d = draw(st.integers(min_value=0, max_value=max(cap, 0)))
        word.append(d)
        open_slots += d - 1
        remaining -= 1
        if not open_slots:
            break
    return tuple(word)


@given(degree_words())
@settings(max_examples=80, deadline=None)
def test_term_round_trip_property(word):
    t = trees.SyntaxTree.from_degree_word(word, None)
    assert trees.parse_process(t.to_term()) == t
    assert t.degree_word() == word


@given(degree_words())
@settings(max_examples=80, deadline=None)
def test_degree_sequence_round_trip_property(word):
    t = trees.SyntaxTree.from_degree_word(word, None)
    u = trees.degree_sequence_of_tree(t)
    assert trees.tree_from_degree_sequence(u, t.labels) == t
