"""Syntax trees of sequential-parallel process terms.

A term like ``a.b.(c || d.(e || f))`` denotes a process whose actions form a
plane rooted tree: prefixing adds a child, parallel composition adds several.
Nodes are addressed by preorder id 1..n, which is stable under relabelling and
is the identity used by every other module.  This module provides the parser,
child contraction, the explicit semantic-tree expansion (the small-size
oracle), degree-sequence encoding, and exhaustive enumeration.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Sequence

ENUMERATION_LIMIT = 12
SEMANTIC_NODE_BUDGET = 10 ** 6
FOREST_ROOT_LABEL = "#root"


class ParseError(ValueError):
    """Malformed term text; carries the character position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class BudgetError(RuntimeError):
    """A construction would exceed its configured size budget."""

    def __init__(self, message: str, predicted, budget):
        super().__init__(message)
        self.predicted = predicted
        self.budget = budget


class SyntaxTree:
    """Immutable plane rooted tree; node v carries a text label.

    Node ids are 1..n in prefix-traversal order, so the subtree rooted at v
    occupies the contiguous id range [v, v + subtree_size(v)).
    """

    __slots__ = ("_labels", "_parents", "_children", "_sizes", "_by_label")

    def __init__(self, labels: Sequence[str], parents: Sequence[int]):
        labels = tuple(labels)
        parents = tuple(parents)
        n = len(labels)
        if n == 0:
            raise ValueError("a tree has at least one node")
        if len(parents) != n:
            raise ValueError("labels and parents must have equal length")
        if parents[0] != 0:
            raise ValueError("the root (id 1) must have parent 0")
        kids = [[] for _ in range(n + 1)]
        for v in range(2, n + 1):
            p = parents[v - 1]
            if not 1 <= p < v:
                raise ValueError(f"parent of node {v} must be an earlier node id")
            kids[p].append(v)
        # ids must be a genuine preorder numbering
        order = []
        stack = [1]
        while stack:
            v = stack.pop()
            order.append(v)
            stack.extend(reversed(kids[v]))
        if order != list(range(1, n + 1)):
            raise ValueError("node ids are not in prefix-traversal order")
        self._labels = labels
        self._parents = parents
        self._children = tuple(tuple(k) for k in kids[1:])
        self._sizes = None
        self._by_label = None

    # -- construction -----------------------------------------------------

    @classmethod
    def from_degree_word(cls, degrees: Sequence[int], labels: Sequence[str] | None = None) -> "SyntaxTree":
        """Build the tree whose prefix-traversal node degrees are ``degrees``.

        Raises ValueError naming the first offending position if the word is
        not a valid Lukasiewicz degree word.
        """
        degrees = list(degrees)
        n = len(degrees)
        if n == 0:
            raise ValueError("empty degree word")
        if labels is None:
            labels = default_labels(n)
        parents = [0] * n
        stack = [(1, degrees[0])]
        if degrees[0] < 0:
            raise ValueError("negative degree at position 1")
        for v in range(2, n + 1):
            d = degrees[v - 1]
            if d < 0:
                raise ValueError(f"negative degree at position {v}")
            while stack and stack[-1][1] == 0:
                stack.pop()
            if not stack:
                raise ValueError(f"degree word closes early at position {v}")
            p, remaining = stack[-1]
            stack[-1] = (p, remaining - 1)
            parents[v - 1] = p
            stack.append((v, d))
        while stack and stack[-1][1] == 0:
            stack.pop()
        if stack:
            raise ValueError(f"degree word leaves {sum(r for _, r in stack)} unfilled child slots at position {n}")
        return cls(labels, parents)

    @classmethod
    def from_nested(cls, record) -> "SyntaxTree":
        """Build from the nested record form {"label": str, "children": [...]}."""
        labels: list[str] = []
        parents: list[int] = []
        stack = [(record, 0)]
        while stack:
            rec, parent = stack.pop()
            if not isinstance(rec, dict) or "label" not in rec:
                raise ValueError("each node record needs a 'label' field")
            children = rec.get("children", [])
            if not isinstance(children, list):
                raise ValueError("'children' must be a list")
            labels.append(str(rec["label"]))
            parents.append(parent)
            vid = len(labels)
            for child in reversed(children):
                stack.append((child, vid))
        return cls(labels, parents)

    # -- basic accessors ---------------------------------------------------

    @property
    def size(self) -> int:
        return len(self._labels)

    @property
    def root(self) -> int:
        return 1

    def label(self, v: int) -> str:
        return self._labels[v - 1]

    def parent(self, v: int) -> int:
        """Parent id of v, 0 for the root."""
        return self._parents[v - 1]

    def children(self, v: int) -> tuple[int, ...]:
        return self._children[v - 1]

    def degree(self, v: int) -> int:
        return len(self._children[v - 1])

    @property
    def labels(self) -> tuple[str, ...]:
        return self._labels

    def subtree_sizes(self) -> tuple[int, ...]:
        """|T(v)| for every v, indexed by v - 1; computed once and cached."""
        if self._sizes is None:
            n = self.size
            sizes = [1] * (n + 1)
            for v in range(n, 1, -1):
                sizes[self._parents[v - 1]] += sizes[v]
            self._sizes = tuple(sizes[1:])
        return self._sizes

    def subtree_size(self, v: int) -> int:
        return self.subtree_sizes()[v - 1]

    def subtree_slice(self, v: int) -> tuple[int, int]:
        """Half-open id range [v, v + |T(v)|) covered by the subtree at v."""
        return v, v + self.subtree_size(v)

    def nodes_by_label(self, label: str) -> tuple[int, ...]:
        if self._by_label is None:
            by = {}
            for v, lab in enumerate(self._labels, start=1):
                by.setdefault(lab, []).append(v)
            self._by_label = {lab: tuple(vs) for lab, vs in by.items()}
        return self._by_label.get(label, ())

    def node_by_label(self, label: str) -> int:
        """Unique node with the given label; errors on missing or ambiguous."""
        ids = self.nodes_by_label(label)
        if not ids:
            raise KeyError(f"no action labelled {label!r}")
        if len(ids) > 1:
            raise KeyError(f"label {label!r} is ambiguous (ids {', '.join(map(str, ids))}); use label#id")
        return ids[0]

    def degree_word(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self._children)

    def __eq__(self, other) -> bool:
        return (isinstance(other, SyntaxTree)
                and self._labels == other._labels
                and self._parents == other._parents)

    def __hash__(self) -> int:
        return hash((self._labels, self._parents))

    def __repr__(self) -> str:
        return f"SyntaxTree({self.to_term()!r})"

    # -- serialization -----------------------------------------------------

    def structural_key(self) -> str:
        """Label-independent canonical form, nested parentheses."""
        parts = []
        stack: list[int] = []
        for d in self.degree_word():
            parts.append("(")
            stack.append(d)
            while stack and stack[-1] == 0:
                stack.pop()
                parts.append(")")
                if stack:
                    stack[-1] -= 1
        return "".join(parts)

    def to_term(self) -> str:
        """Render as a term string parseable by parse_process."""
        out: list[str] = []
        root_kids = self._children[0]
        work: list = []
        if self._labels[0] == FOREST_ROOT_LABEL:
            for k in reversed(root_kids):
                work.append(k)
                work.append(" || ")
            if work:
                work.pop()  # separator only between components
        else:
            work = [1]
        while work:
            item = work.pop()
            if isinstance(item, str):
                out.append(item)
                continue
            v = item
            out.append(self._labels[v - 1])
            kids = self._children[v - 1]
            if not kids:
                continue
            if len(kids) == 1:
                out.append(".")
                work.append(kids[0])
            else:
                out.append(".(")
                work.append(")")
                for k in reversed(kids[1:]):
                    work.append(k)
                    work.append(" || ")
                work.append(kids[0])
        return "".join(out)

    def to_nested(self) -> dict:
        """Nested record form {"label": ..., "children": [...]}."""
        n = self.size
        recs: list[dict | None] = [None] * (n + 1)
        for v in range(n, 0, -1):
            recs[v] = {"label": self._labels[v - 1],
                       "children": [recs[k] for k in self._children[v - 1]]}
        return recs[1]

    def to_dot(self, graph_name: str = "syntax_tree") -> str:
        lines = [f"digraph {graph_name} {{"]
        for v in range(1, self.size + 1):
            lines.append(f'  n{v} [label="{self._labels[v - 1]}"];')
        for v in range(2, self.size + 1):
            lines.append(f"  n{self._parents[v - 1]} -> n{v};")
        lines.append("}")
        return "\n".join(lines)


class WeightedTree:
    """A syntax tree together with weight(v) = |T(v)| for every node."""

    __slots__ = ("tree", "weights")

    def __init__(self, tree: SyntaxTree, weights: Sequence[int]):
        weights = tuple(weights)
        n = tree.size
        if len(weights) != n:
            raise ValueError("one weight per node required")
        for v in range(1, n + 1):
            expected = 1 + sum(weights[c - 1] for c in tree.children(v))
            if weights[v - 1] != expected:
                raise ValueError(f"weight of node {v} must equal 1 + children weights")
        self.tree = tree
        self.weights = weights

    @property
    def size(self) -> int:
        return self.tree.size

    def weight(self, v: int) -> int:
        return self.weights[v - 1]

    def __repr__(self) -> str:
        return f"WeightedTree({self.tree.to_term()!r})"


def annotate_weights(t: SyntaxTree) -> WeightedTree:
    """Attach subtree sizes as node weights (single traversal)."""
    return WeightedTree(t, t.subtree_sizes())


class SemanticTree:
    """Explicit computation tree: every branch is one complete run.

    Nodes carry the label and preorder id of the syntax-tree action they
    consume, plus a depth index (level 0 = root).  Built only by
    build_semantic_tree; sizes grow like (n-1)! so this is an oracle, not a
    scalable representation.
    """

    __slots__ = ("labels", "parents", "levels", "source_ids", "_children")

    def __init__(self, labels, parents, levels, source_ids):
        self.labels = tuple(labels)
        self.parents = tuple(parents)
        self.levels = tuple(levels)
        self.source_ids = tuple(source_ids)
        self._children = None

    @property
    def node_count(self) -> int:
        return len(self.labels)

    def level_counts(self) -> tuple[int, ...]:
        depth = max(self.levels)
        counts = [0] * (depth + 1)
        for lv in self.levels:
            counts[lv] += 1
        return tuple(counts)

    def children_counts(self) -> tuple[int, ...]:
        if self._children is None:
            deg = [0] * len(self.labels)
            for p in self.parents:
                if p:
                    deg[p - 1] += 1
            self._children = tuple(deg)
        return self._children

    def leaf_count(self) -> int:
        return sum(1 for d in self.children_counts() if d == 0)

    def branches(self) -> Iterator[tuple[int, ...]]:
        """Yield each root-to-leaf branch as the consumed syntax-node ids."""
        deg = self.children_counts()
        for i, d in enumerate(deg):
            if d:
                continue
            path = []
            v = i + 1
            while v:
                path.append(self.source_ids[v - 1])
                v = self.parents[v - 1]
            yield tuple(reversed(path))

    def leftmost_branch_degrees(self) -> tuple[int, ...]:
        """Node degrees along the leftmost root-to-leaf branch."""
        kids: list[list[int]] = [[] for _ in self.labels]
        for v, p in enumerate(self.parents, start=1):
            if p:
                kids[p - 1].append(v)
        out = []
        v = 1
        while True:
            out.append(len(kids[v - 1]))
            if not kids[v - 1]:
                return tuple(out)
            v = kids[v - 1][0]

    def to_dot(self, graph_name: str = "semantic_tree") -> str:
        lines = [f"digraph {graph_name} {{"]
        for v in range(1, self.node_count + 1):
            lines.append(f'  n{v} [label="{self.labels[v - 1]}"];')
        for v in range(1, self.node_count + 1):
            if self.parents[v - 1]:
                lines.append(f"  n{self.parents[v - 1]} -> n{v};")
        lines.append("}")
        return "\n".join(lines)


# -- parsing ----------------------------------------------------------------

_TOKEN = re.compile(r"(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<dot>\.)|(?P<open>\()|(?P<close>\))|(?P<par>\|\|)")


def _tokenize(text: str):
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos == len(text):
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            if text[pos] == "|":
                raise ParseError("single '|' is not an operator, expected '||'", pos)
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


def parse_process(text: str, allow_forest: bool = False) -> SyntaxTree:
    """Parse a process term into its syntax tree.

    Grammar:
        process  := prefixed
        prefixed := action [ "." tail ]
        tail     := prefixed | "(" parallel ")"
        parallel := prefixed { "||" prefixed }
        action   := [A-Za-z_][A-Za-z0-9_]*

    Whitespace is insignificant.  A bare parallel composition at top level is
    a syntax error unless allow_forest is set, in which case the components
    are attached under a synthetic root labelled "#root" (that label is
    reserved and cannot be written in input).
    """
    tokens = _tokenize(text)
    if tokens[0][0] == "end":
        raise ParseError("empty input", 0)

    # detect a parallel bar at paren depth 0 so the synthetic root gets id 1
    depth = 0
    top_par_pos = None
    for kind, _, pos in tokens:
        if kind == "open":
            depth += 1
        elif kind == "close":
            depth = max(0, depth - 1)
        elif kind == "par" and depth == 0 and top_par_pos is None:
            top_par_pos = pos
    wrapped = False
    labels: list[str] = []
    parents: list[int] = []
    if top_par_pos is not None:
        if not allow_forest:
            raise ParseError("parallel composition at top level needs forest mode", top_par_pos)
        labels.append(FOREST_ROOT_LABEL)
        parents.append(0)
        wrapped = True

    NEED_TERM, NEED_TAIL, AFTER_NAME, AFTER_GROUP = range(4)
    state = NEED_TERM
    pending = 1 if wrapped else 0   # parent id for the next created node
    current = 0                     # most recent plain action node
    frames: list[int] = []          # parent ids of open parallel groups

    for kind, value, pos in tokens:
        if state == NEED_TERM:
            if kind != "name":
                raise ParseError("expected an action name", pos)
            labels.append(value)
            parents.append(pending)
            current = len(labels)
            state = AFTER_NAME
        elif state == NEED_TAIL:
            if kind == "name":
                labels.append(value)
                parents.append(pending)
                current = len(labels)
                state = AFTER_NAME
            elif kind == "open":
                frames.append(pending)
                state = NEED_TERM
            else:
                raise ParseError("expected an action name or '('", pos)
        else:  # AFTER_NAME or AFTER_GROUP
            if kind == "dot":
                if state == AFTER_GROUP:
                    raise ParseError("'.' cannot follow a closed parallel group", pos)
                pending = current
                state = NEED_TAIL
            elif kind == "par":
                pending = frames[-1] if frames else 1
                state = NEED_TERM
            elif kind == "close":
                if not frames:
                    raise ParseError("unmatched ')'", pos)
                frames.pop()
                state = AFTER_GROUP
            elif kind == "end":
                if frames:
                    raise ParseError("unclosed '('", pos)
                return SyntaxTree(labels, parents)
            else:
                raise ParseError(f"unexpected {value!r}", pos)
    raise AssertionError("tokenizer guarantees an end token")


# -- structural operations ---------------------------------------------------

def contract(t: SyntaxTree, i: int) -> SyntaxTree:
    """The i-contraction of t (children of the root are numbered 1..r).

    The new root is the i-th child v_i of the old root; its children are the
    untouched sibling subtrees with v_i's own children spliced in between.
    Size shrinks by exactly one.
    """
    root_kids = t.children(1)
    r = len(root_kids)
    if r == 0:
        raise ValueError("cannot contract a single-node tree")
    if not 1 <= i <= r:
        raise ValueError(f"child index {i} out of range 1..{r}")
    v = root_kids[i - 1]
    degrees: list[int] = [t.degree(v) + r - 1]
    labels: list[str] = [t.label(v)]
    old_deg = [t.degree(w) for w in range(1, t.size + 1)]
    old_lab = t.labels

    def emit(a: int, b: int):
        degrees.extend(old_deg[a - 1:b - 1])
        labels.extend(old_lab[a - 1:b - 1])

    for w in root_kids[:i - 1]:
        emit(*t.subtree_slice(w))
    for c in t.children(v):
        emit(*t.subtree_slice(c))
    for w in root_kids[i:]:
        emit(*t.subtree_slice(w))
    return SyntaxTree.from_degree_word(degrees, labels)


def build_semantic_tree(t: SyntaxTree, node_budget: int = SEMANTIC_NODE_BUDGET) -> SemanticTree:
    """Explicitly expand the semantic tree of t.

    The root consumes t's root; every node's children consume, left to right,
    the enabled actions of the remaining term (repeated child contraction).
    The expansion is refused up front when the predicted node count exceeds
    node_budget, since sizes grow factorially.
    """
    from .profiles import semantic_size  # deferred: profiles builds on this module

    predicted = semantic_size(t)
    if predicted > node_budget:
        raise BudgetError(
            f"semantic tree has exactly {predicted} nodes, over the budget of {node_budget}",
            predicted, node_budget)
    labels: list[str] = []
    parents: list[int] = []
    levels: list[int] = []
    source: list[int] = []

    def new_node(v: int, parent: int, level: int) -> int:
        labels.append(t.label(v))
        parents.append(parent)
        levels.append(level)
        source.append(v)
        return len(labels)

    # stack entries: (semantic parent, level, consumed node, frontier before it)
    stack = [(0, 0, 1, (1,))]
    while stack:
        parent_sem, level, v, frontier = stack.pop()
        sem = new_node(v, parent_sem, level)
        remaining = [w for w in frontier if w != v]
        remaining.extend(t.children(v))
        remaining.sort()
        nxt = tuple(remaining)
        for w in reversed(nxt):
            stack.append((sem, level + 1, w, nxt))
    return SemanticTree(labels, parents, levels, source)


def degree_sequence_of_tree(t: SyntaxTree) -> tuple[int, ...]:
    """Branch encoding u of the tree: u_p = (sum of first p degrees) - (p-1).

    Equals the node degrees read along the leftmost branch of the semantic
    tree, without building it.  The single node yields the degenerate (0,).
    """
    u = []
    acc = 0
    for p, d in enumerate(t.degree_word()):
        acc += d
        u.append(acc - p)
    return tuple(u)


def tree_from_degree_sequence(u: Sequence[int], labels: Sequence[str] | None = None) -> SyntaxTree:
    """Inverse of degree_sequence_of_tree; validates and reports the failing index."""
    u = tuple(u)
    n = len(u)
    if n == 0:
        raise ValueError("empty degree sequence")
    if n == 1:
        if u != (0,):
            raise ValueError("a single-node tree has degree sequence (0,) (index 1)")
        return SyntaxTree.from_degree_word((0,), labels)
    if u[0] <= 0:
        raise ValueError("u_1 must be positive (index 1)")
    for p in range(1, n):
        if u[p] < u[p - 1] - 1:
            raise ValueError(f"u may drop by at most 1 per step (index {p + 1})")
    for p in range(n - 1):
        if u[p] == 0:
            raise ValueError(f"only the final term may be 0 (index {p + 1})")
    if u[n - 1] != 0:
        raise ValueError(f"the final term must be 0 (index {n})")
    degrees = [u[0]] + [u[p] - u[p - 1] + 1 for p in range(1, n)]
    return SyntaxTree.from_degree_word(degrees, labels)


def default_labels(n: int) -> list[str]:
    """Spreadsheet-style action names: a..z, aa, ab, ..."""
    out = []
    for k in range(1, n + 1):
        s = ""
        while k:
            k, r = divmod(k - 1, 26)
            s = chr(97 + r) + s
        out.append(s)
    return out


def enumerate_trees(n: int, oracle_limit: int = ENUMERATION_LIMIT) -> Iterator[SyntaxTree]:
    """Yield every plane rooted tree of size n exactly once.

    Canonical order: lexicographic on the prefix-traversal degree word, which
    makes index-range partitioning of sweeps deterministic.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if n > oracle_limit:
        raise BudgetError(f"enumeration of size {n} exceeds the oracle limit {oracle_limit}",
                          n, oracle_limit)
    labels = default_labels(n)
    word: list[int] = []

    def rec(open_slots: int) -> Iterator[SyntaxTree]:
        placed = len(word)
        if placed == n:
            if open_slots == 0:
                yield SyntaxTree.from_degree_word(word, labels)
            return
        remaining = n - placed
        for d in range(0, remaining):
            new_open = open_slots - 1 + d
            if new_open < 0 or new_open > remaining - 1:
                continue
            if new_open == 0 and remaining > 1:
                continue
            word.append(d)
            yield from rec(new_open)
            word.pop()

    yield from rec(1)


def validate_run_prefix(t: SyntaxTree, sigma: Sequence[int]) -> tuple[int, ...]:
    """Check that sigma is a run prefix of t; ValueError names the bad index."""
    sigma = tuple(sigma)
    if not sigma:
        raise ValueError("a run prefix has at least the root (index 1)")
    if len(sigma) > t.size:
        raise ValueError(f"prefix longer than the tree (index {t.size + 1})")
    if sigma[0] != 1:
        raise ValueError("a run starts at the root (index 1)")
    seen = {1}
    for k, v in enumerate(sigma[1:], start=2):
        if not 1 <= v <= t.size:
            raise ValueError(f"unknown node id {v} (index {k})")
        if v in seen:
            raise ValueError(f"action {v} repeated (index {k})")
        if t.parent(v) not in seen:
            raise ValueError(f"action {v} is not enabled yet (index {k})")
        seen.add(v)
    return sigma


@dataclass(frozen=True)
class SuspendedView:
    """What remains of a weighted tree after consuming a run prefix."""

    source: WeightedTree
    prefix: tuple[int, ...]
    frontier: tuple[int, ...]

    @property
    def root(self) -> int:
        """The last consumed action, the root of the suspended tree."""
        return self.prefix[-1]


def suspended_view(t: WeightedTree, sigma: Sequence[int]) -> SuspendedView:
    """Enabled actions after consuming sigma, in prefix-traversal order of t."""
    sigma = validate_run_prefix(t.tree, sigma)
    consumed = set(sigma)
    frontier = sorted(c for v in sigma for c in t.tree.children(v) if c not in consumed)
    return SuspendedView(t, sigma, tuple(frontier))


def tree_to_poset(t: SyntaxTree) -> list[tuple[int, int]]:
    """Covering relation of the tree order: one (parent, child) pair per edge."""
    return [(t.parent(v), v) for v in range(2, t.size + 1)]
