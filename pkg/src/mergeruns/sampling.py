"""Run probabilities and random generation.

Two exact tools (prefix probabilities and the run count recovered from
them) and two samplers: uniform complete runs of a fixed tree via weighted
action choice, and uniform tree shapes via the cycle construction.  All
randomness flows through Rng so every byte of output is reproducible from
the seed, and weighted choices use an updatable partial-sum tree instead of
rebuilding cumulative arrays.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .trees import (BudgetError, SyntaxTree, WeightedTree, annotate_weights,
                    default_labels, validate_run_prefix)

RNG_ALGORITHM = "mt19937"
NAIVE_SAMPLE_LIMIT = 10 ** 7


class Rng:
    """Seeded source of uniform integers (Mersenne Twister underneath).

    randrange rejects by getrandbits, so draws are unbiased at any size;
    stream(i) derives an independent child generator deterministically.
    """

    __slots__ = ("seed", "_r")

    def __init__(self, seed: int):
        self.seed = seed
        self._r = random.Random(seed)

    def uniform_int(self, upper: int) -> int:
        """Uniform integer in 1..upper inclusive."""
        if upper < 1:
            raise ValueError("upper must be at least 1")
        return self._r.randrange(upper) + 1

    def subset(self, population: int, k: int) -> list[int]:
        """Sorted uniform k-subset of {0, ..., population - 1}.

        Partial Fisher-Yates over the full pool: the draw sequence is fixed
        by the seed alone, independent of interpreter version.
        """
        if not 0 <= k <= population:
            raise ValueError("need 0 <= k <= population")
        pool = list(range(population))
        for i in range(k):
            j = i + self._r.randrange(population - i)
            pool[i], pool[j] = pool[j], pool[i]
        return sorted(pool[:k])

    def stream(self, index: int) -> "Rng":
        """Deterministic derived generator for parallel or indexed use."""
        return Rng((self.seed << 32) ^ index)

    def __repr__(self) -> str:
        return f"Rng(seed={self.seed}, algorithm={RNG_ALGORITHM})"


class PartialSumTree:
    """Weighted sampling structure over a fixed entry list.

    Entries sit in a complete binary heap layout in their given order
    (children of slot i are 2i+1 and 2i+2); every slot caches its subtree's
    weight sum, so sampling and weight updates both walk one root path.
    Zero-weight entries stay in place and are simply never drawn.
    """

    __slots__ = ("keys", "weights", "below", "slot_of")

    def __init__(self, entries: Iterable[tuple[object, int]]):
        items = list(entries)
        self.keys = tuple(k for k, _ in items)
        self.slot_of = {k: i for i, k in enumerate(self.keys)}
        if len(self.slot_of) != len(self.keys):
            raise ValueError("duplicate entry keys")
        self.weights = []
        for k, w in items:
            if w < 0:
                raise ValueError(f"negative weight for {k!r}")
            self.weights.append(w)
        m = len(items)
        self.below = list(self.weights)
        for i in range(m - 1, 0, -1):
            self.below[(i - 1) >> 1] += self.below[i]

    def __len__(self) -> int:
        return len(self.keys)

    @property
    def total_weight(self) -> int:
        return self.below[0] if self.below else 0

    def weight(self, key) -> int:
        return self.weights[self.slot_of[key]]

    def left_sum(self, slot: int = 0) -> int:
        child = 2 * slot + 1
        return self.below[child] if child < len(self.keys) else 0

    def right_sum(self, slot: int = 0) -> int:
        child = 2 * slot + 2
        return self.below[child] if child < len(self.keys) else 0

    def depth(self) -> int:
        return len(self.keys).bit_length()

    def update(self, key, weight: int) -> int:
        """Set an entry's weight; returns how many slots were touched."""
        if weight < 0:
            raise ValueError(f"negative weight for {key!r}")
        slot = self.slot_of[key]
        delta = weight - self.weights[slot]
        self.weights[slot] = weight
        touched = 1
        i = slot
        self.below[i] += delta
        while i:
            i = (i - 1) >> 1
            self.below[i] += delta
            touched += 1
        return touched

    def sample(self, rng: Rng):
        """Draw a key with probability weight / total_weight."""
        total = self.total_weight
        if total <= 0:
            raise ValueError("total weight is zero, nothing to sample")
        x = rng.uniform_int(total)
        i = 0
        while True:
            left = self.left_sum(i)
            if x <= left:
                i = 2 * i + 1
                continue
            x -= left
            if x <= self.weights[i]:
                return self.keys[i]
            x -= self.weights[i]
            i = 2 * i + 2

    def audit(self) -> bool:
        """Recompute every cached sum; True when all of them check out."""
        m = len(self.keys)
        fresh = list(self.weights)
        for i in range(m - 1, 0, -1):
            fresh[(i - 1) >> 1] += fresh[i]
        return fresh == self.below


def pst_build(entries: Iterable[tuple[object, int]]) -> PartialSumTree:
    return PartialSumTree(entries)


def pst_sample(pst: PartialSumTree, rng: Rng):
    return pst.sample(rng)


def pst_update(pst: PartialSumTree, key, weight: int) -> PartialSumTree:
    pst.update(key, weight)
    return pst


def naive_sample(entries: Sequence[tuple[object, int]], rng: Rng):
    """One weighted draw the dumb way: materialize the multiset flat.

    Every key is repeated weight times in one array and a single position
    is drawn, so the cost per draw is the total weight, which is therefore
    capped.  Kept as the differential-testing oracle for the tree sampler.
    """
    total = 0
    for k, w in entries:
        if w < 0:
            raise ValueError(f"negative weight for {k!r}")
        total += w
    if total <= 0:
        raise ValueError("total weight is zero, nothing to sample")
    if total > NAIVE_SAMPLE_LIMIT:
        raise BudgetError("flat multiset array would be too large",
                          total, NAIVE_SAMPLE_LIMIT)
    flat = []
    for k, w in entries:
        flat.extend([k] * w)
    return flat[rng.uniform_int(total) - 1]


# -- exact probabilities ------------------------------------------------------

def prefix_probability(t: SyntaxTree | WeightedTree, sigma: Sequence[int]) -> Fraction:
    """Probability that weighted sampling begins with exactly this prefix.

    Exact: the k-th consumed action is chosen among the enabled ones with
    probability (its subtree size) / (actions still pending), and the
    pending count at step k is always n - k + 1 regardless of history.
    """
    rho, _ = _prefix_probability_steps(t, sigma)
    return rho


def _prefix_probability_steps(t, sigma) -> tuple[Fraction, int]:
    # instrumented twin: also reports the number of multiply steps taken
    if isinstance(t, WeightedTree):
        tree, sizes = t.tree, t.weights
    else:
        tree, sizes = t, t.subtree_sizes()
    sigma = validate_run_prefix(tree, sigma)
    n = tree.size
    rho = Fraction(1)
    steps = 0
    for k in range(2, len(sigma) + 1):
        rho *= Fraction(sizes[sigma[k - 1] - 1], n - k + 1)
        steps += 1
    return rho, steps


def count_runs_via_probability(t: SyntaxTree | WeightedTree) -> int:
    """Complete-run count recovered as 1 / probability of one fixed run.

    Uses the prefix-traversal run (ids ascending), which every tree has:
    1/rho is the product of the per-step ratios (n - k + 1) / |T(sigma_k)|
    inverted.  The product is regrouped associatively (balanced pairing) so
    huge trees stay fast, but the multiplication count is still linear; the
    Fraction route through prefix_probability gives the same value and the
    tests hold the two, and hook_count, against each other.
    """
    count, _ = _count_runs_steps(t)
    return count


def _count_runs_steps(t) -> tuple[int, int]:
    # instrumented twin: also reports the multiplication/division step count
    from .counts import _product

    if isinstance(t, WeightedTree):
        tree, sizes = t.tree, t.weights
    else:
        tree, sizes = t, t.subtree_sizes()
    n = tree.size
    # steps k = 2..n of the probability product, inverted; the k = 1 ratio
    # is n/n and contributes nothing either way
    num_factors = [n - k + 1 for k in range(2, n + 1)]
    den_factors = [sizes[k - 1] for k in range(2, n + 1) if sizes[k - 1] > 1]
    steps = max(len(num_factors) - 1, 0) + max(len(den_factors) - 1, 0) + 1
    q, r = divmod(_product(num_factors), _product(den_factors))
    assert r == 0
    return q, steps


# -- samplers -----------------------------------------------------------------

def sample_run(t: SyntaxTree | WeightedTree, rng: Rng,
               observer: Callable[[int, int, int], None] | None = None) -> tuple[int, ...]:
    """One complete run of t, uniform over all its runs.

    A fresh weighted multiset (one partial-sum tree spanning all node ids,
    disabled ids at weight 0) starts with just the root at weight n.  The
    root is appended outright since it is forced; each of the n - 1 later
    rounds samples an enabled action with probability weight/total, zeroes
    it and enables its children at their subtree sizes.  Before the p-th
    action is chosen the total pending weight is always n - p + 1.
    observer, when given, sees (step, pending_total, enabled_count) before
    every step.
    """
    if isinstance(t, WeightedTree):
        tree, sizes = t.tree, t.weights
    else:
        tree, sizes = t, t.subtree_sizes()
    n = tree.size
    # complete layout over all n ids up front; ids not yet enabled sit at 0
    pst = PartialSumTree((v, 0) for v in range(1, n + 1))
    pst.update(1, n)
    if observer is not None:
        observer(1, pst.total_weight, 1)
    run = [1]  # the root is the only enabled action, no randomness spent
    pst.update(1, 0)
    enabled = 0
    for c in tree.children(1):
        pst.update(c, sizes[c - 1])
        enabled += 1
    for p in range(2, n + 1):
        total = pst.total_weight
        assert total == n - p + 1
        if observer is not None:
            observer(p, total, enabled)
        v = pst.sample(rng)
        pst.update(v, 0)
        enabled -= 1
        for c in tree.children(v):
            pst.update(c, sizes[c - 1])
            enabled += 1
        run.append(v)
    return tuple(run)


def uniform_random_tree(n: int, rng: Rng, labels: Sequence[str] | None = None) -> SyntaxTree:
    """A shape of size n drawn uniformly from all catalan(n) shapes.

    A uniform (n-1)-subset of 2n-2 slots encodes a degree word summing to
    n-1; exactly one cyclic rotation of any such word is valid, found after
    the first prefix-sum minimum, and distinct words have disjoint rotation
    classes, so validity correction costs nothing and the result is exact.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if labels is None:
        labels = default_labels(n)
    if n == 1:
        return SyntaxTree.from_degree_word((0,), labels)
    stars = rng.subset(2 * n - 2, n - 1)
    degrees = [0] * n
    block = 0  # bars seen so far = index of the current block
    prev = -1
    for pos in stars:
        block += pos - prev - 1
        degrees[block] += 1
        prev = pos
    # rotate to the unique valid word: start right after the first minimum
    # of the running sum of (degree - 1)
    best = 0
    acc = 0
    cut = n - 1
    for i, d in enumerate(degrees):
        acc += d - 1
        if acc < best:
            best = acc
            cut = i
    rotated = degrees[cut + 1:] + degrees[:cut + 1]
    return SyntaxTree.from_degree_word(rotated, labels)
