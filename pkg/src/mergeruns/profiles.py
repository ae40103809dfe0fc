"""Run-prefix profiles and admissible cuts of a syntax tree.

A run prefix of length p stops the process with some set of actions done;
the done set is always a root-containing "cut" closed under parents.  The
level profile counts prefixes per length, the cut machinery enumerates the
underlying sets, and semantic_size predicts the full computation-tree size
without building it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .counts import hook_count
from .trees import BudgetError, SyntaxTree

CUT_ENUMERATION_LIMIT = 18
PROFILE_FAST_LIMIT = 5000


@dataclass(frozen=True)
class AdmissibleCut:
    """What is left of the syntax tree after recursively removing leaves.

    Equivalently a root-containing, parent-closed node set.  shape is the
    induced tree itself (source labels kept), nodes the member source ids
    ascending, labellings the number of run prefixes consuming exactly this
    set, which is the hook count of the shape.
    """

    shape: SyntaxTree
    nodes: tuple[int, ...]
    labellings: int

    @property
    def size(self) -> int:
        return len(self.nodes)


def count_admissible_cuts(t: SyntaxTree) -> int:
    """Number of admissible cuts, the empty one included.

    count(v) = 1 + prod over children of count(c); reverse id order visits
    children first, no recursion.
    """
    n = t.size
    acc = [1] * (n + 1)  # acc[v] = product over children already visited
    for v in range(n, 1, -1):
        acc[t.parent(v)] *= 1 + acc[v]
    return 1 + acc[1]


def enumerate_admissible_cuts(t: SyntaxTree, size_limit: int = CUT_ENUMERATION_LIMIT) -> list[AdmissibleCut]:
    """All nonempty admissible cuts, largest first, then shape, then ids.

    Refuses trees above size_limit before doing any work; the refusal
    carries the exact number of cuts it would have produced.
    """
    if t.size > size_limit:
        predicted = count_admissible_cuts(t) - 1
        raise BudgetError(
            f"tree size {t.size} over the cut enumeration limit {size_limit}; "
            f"it has {predicted} nonempty cuts",
            predicted, size_limit)

    def cuts_of(v: int) -> list[frozenset[int]]:
        # nonempty cuts of the subtree at v; each child independently
        # contributes nothing or one of its own cuts
        options = [frozenset((v,))]
        for c in t.children(v):
            sub_options = cuts_of(c)
            extended = []
            for base in options:
                for sub in sub_options:
                    extended.append(base | sub)
            options.extend(extended)
        return options

    decorated = []
    for members in cuts_of(1):
        nodes = tuple(sorted(members))
        # member ids ascending are exactly the prefix-traversal order of the
        # induced subtree, so its degree word reads off directly
        degrees = tuple(sum(1 for c in t.children(v) if c in members) for v in nodes)
        shape = SyntaxTree.from_degree_word(degrees, [t.label(v) for v in nodes])
        decorated.append(AdmissibleCut(shape, nodes, hook_count(shape)))
    decorated.sort(key=lambda c: (-c.size, c.shape.degree_word(), c.nodes))
    return decorated


_M_CACHE: list[int] = [0, 1, 2, 7, 29, 131, 625]


def cut_count_sequence(N: int, method: str = "recurrence") -> list[int]:
    """Total admissible cuts (nonempty) over all shapes, sizes 0..N.

    method="brute" enumerates every shape and only goes up to N = 10;
    method="recurrence" unrolls the five-term linear recurrence from the
    stored seed terms and needs N >= 4.  Both agree on the overlap.
    """
    if method == "brute":
        if not 0 <= N <= 10:
            raise ValueError("brute cut counting needs 0 <= N <= 10")
        from .trees import enumerate_trees
        out = [0]
        for n in range(1, N + 1):
            out.append(sum(count_admissible_cuts(t) - 1 for t in enumerate_trees(n)))
        return out
    if method != "recurrence":
        raise ValueError("method must be 'brute' or 'recurrence'")
    if N < 4:
        raise ValueError("recurrence method needs N >= 4")
    seq = list(_M_CACHE)
    while len(seq) <= N:
        k = len(seq) - 4  # next index is k + 4
        c0 = -500 * k + 2000 * k ** 3
        c1 = 120 - 220 * k - 1380 * k ** 2 - 920 * k ** 3
        c2 = -(1488 + 1626 * k + 387 * k ** 2 - 21 * k ** 3)
        c3 = 1104 + 1088 * k + 351 * k ** 2 + 37 * k ** 3
        c4 = 168 + 146 * k + 42 * k ** 2 + 4 * k ** 3
        if c4 == 0:
            raise ArithmeticError(f"vanishing leading coefficient at index {k + 4}")
        num = c0 * seq[k] + c1 * seq[k + 1] + c2 * seq[k + 2] + c3 * seq[k + 3]
        q, r = divmod(num, c4)
        if r:
            raise ArithmeticError(f"cut recurrence produced a non-integer at index {k + 4}")
        seq.append(q)
    del seq[N + 1:]
    return seq


def level_profile(t: SyntaxTree, method: str = "fast") -> tuple[int, ...]:
    """Number of run prefixes of each length; entry at depth l counts l + 1.

    Indexing: depth 0 = the bare root (always count 1); the deepest entry,
    depth n - 1, equals the complete-run count.  Counting i levels up from
    the deepest one instead, the entry at depth l has i = n - 1 - l.

    method="fast" runs the binomial-convolution pass in O(n^2) big-integer
    ops; method="oracle" enumerates admissible cuts and adds up their
    labellings per size, exponential and for cross-checking only.
    """
    if method == "oracle":
        out = [0] * t.size
        for cut in enumerate_admissible_cuts(t):
            out[cut.size - 1] += cut.labellings
        return tuple(out)
    if method != "fast":
        raise ValueError("method must be 'fast' or 'oracle'")
    if t.size > PROFILE_FAST_LIMIT:
        raise BudgetError(f"profile computation capped at {PROFILE_FAST_LIMIT} nodes",
                          t.size, PROFILE_FAST_LIMIT)
    return tuple(_prefix_counts(t))


def _prefix_counts(t: SyntaxTree) -> list[int]:
    """counts[p] = number of run prefixes of length p + 1.

    Bottom-up. For each node, index m of its working vector counts the
    interleaved prefix sequences drawing m actions from its children's
    subtrees (two disjoint sequences of lengths i and j interleave in
    binom(i + j, i) ways); prepending 1 shifts in the node itself.
    """
    n = t.size
    vecs: list[list[int] | None] = [None] * (n + 1)
    for v in range(n, 0, -1):
        acc = [1]
        for c in t.children(v):
            other = vecs[c]
            vecs[c] = None  # free as we go, vectors get long
            merged = [0] * (len(acc) + len(other) - 1)
            for i, a in enumerate(acc):
                if not a:
                    continue
                for j, b in enumerate(other):
                    merged[i + j] += a * b * math.comb(i + j, j)
            acc = merged
        vecs[v] = [1] + acc
    return vecs[1][1:]


def semantic_size(t: SyntaxTree) -> int:
    """Exact node count of the computation tree, without building it.

    Same size cap as the fast profile route it sums.
    """
    return sum(level_profile(t, method="fast"))


def limit_profile(c: float, n: int) -> float:
    """Large-n approximation of ln(profile) at relative depth c.

    Valid for c in [2/n, 1 - 2/n].  The absolute error in the log decays
    like 1/n; see limit_profile_error_bound for the calibrated constant.
    """
    if n < 4:
        raise ValueError("n must be at least 4")
    if not 2.0 / n <= c <= 1.0 - 2.0 / n:
        raise ValueError("c must lie in [2/n, 1 - 2/n]")
    lin = (c - 1 + math.log((2 - 2 * c) ** (1 - c) / (c ** c * (2 - c) ** (2 - c))))
    return ((1 - c) * n * math.log(n) + lin * n
            + math.log(math.sqrt(4 - 2 * c) / math.sqrt(c)))


# worst measured value of |error| * c * (1-c) * n over the grid
# c in {0.1, .., 0.9}, n in {20, 50, 100, 200, 400} is 0.0681; the
# published factor carries a ~1.5x safety margin on top of that
LIMIT_PROFILE_ERROR_FACTOR = 0.1


def limit_profile_error_bound(c: float, n: int) -> float:
    """Calibrated absolute bound for limit_profile's log-scale error."""
    return LIMIT_PROFILE_ERROR_FACTOR / (c * (1.0 - c) * n)


def profile_is_monotone(t: SyntaxTree) -> bool:
    """Whether the level profile never decreases with depth."""
    prof = level_profile(t)
    return all(a <= b for a, b in zip(prof, prof[1:]))
