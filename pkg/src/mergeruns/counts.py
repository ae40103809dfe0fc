"""Counting sequences and asymptotics for interleaved runs.

Everything exact is integer or Fraction arithmetic; everything approximate
returns an Approx carrying a certified or heuristic error bound.  The
factorially large values here (run counts easily exceed 10^36 by n = 40)
stay exact, which is the point of the package.

gmpy2 is used for the big multiply/divide hot spots when available and
silently skipped otherwise; results are identical either way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import mpmath as mp
import numpy as np

try:
    from gmpy2 import mpz
except ImportError:  # pragma: no cover - exercised only without gmpy2
    mpz = int

from .trees import SyntaxTree, WeightedTree


@dataclass(frozen=True)
class Approx:
    """A floating estimate with an absolute error bound.

    certified=True means the bound is proven (interval reasoning), otherwise
    it is the truncation-order heuristic of an asymptotic series.
    """

    value: float
    abs_error: float
    certified: bool = False

    def __contains__(self, x) -> bool:
        return abs(float(x) - self.value) <= self.abs_error

    def __str__(self) -> str:
        tag = "+-" if self.certified else "~"
        return f"{self.value:.12g} ({tag}{self.abs_error:.3g})"


def _product(factors: Iterable[int]) -> int:
    """Balanced product; keeps operand sizes comparable for big integers."""
    items = [mpz(f) for f in factors]
    if not items:
        return 1
    while len(items) > 1:
        nxt = [items[i] * items[i + 1] for i in range(0, len(items) - 1, 2)]
        if len(items) % 2:
            nxt.append(items[-1])
        items = nxt
    return int(items[0])


def catalan(n: int) -> int:
    """Number of distinct process shapes with n actions: Catalan(n-1)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return math.comb(2 * n - 2, n - 1) // n


def increasing_count(n: int) -> int:
    """Total runs over all shapes of size n: (2n-2)! / (2^(n-1) (n-1)!)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return math.factorial(2 * n - 2) // (2 ** (n - 1) * math.factorial(n - 1))


def hook_count(t: SyntaxTree | WeightedTree) -> int:
    """Number of complete runs of t: n! divided by the product of subtree sizes.

    The division is exact; the subtree of every action must finish after its
    root starts, and the hook formula counts the valid interleavings.
    """
    if isinstance(t, WeightedTree):
        sizes = t.weights
    else:
        sizes = t.subtree_sizes()
    n = len(sizes)
    num = _product(range(2, n + 1))
    den = _product(s for s in sizes if s > 1)
    q, r = divmod(num, den)
    assert r == 0
    return q


def mean_width(n: int) -> Fraction:
    """Average run count over the uniform shape of size n: n! / 2^(n-1)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return Fraction(math.factorial(n), 2 ** (n - 1))


def mean_width_asymptotic(n: int) -> Approx:
    """Stirling estimate 2 sqrt(2 pi n) (n / 2e)^n of the average run count."""
    if n < 1:
        raise ValueError("n must be at least 1")
    x = mp.mpf(n)
    val = 2 * mp.sqrt(2 * mp.pi * x) * (x / (2 * mp.e)) ** x
    # Stirling underestimates by the factor exp(theta/12n), theta in (0, 1),
    # and exp(1/12n) - 1 < 1/(11n) for every n >= 1, so this bound is proven
    return Approx(float(val), float(val / (11 * n)), certified=True)


def mean_level_width(n: int, i: int) -> Fraction:
    """Average number of run prefixes that leave exactly i actions pending.

    i counts levels from the deepest one: i = 0 is complete runs, i = n - 1
    is the single starting prefix.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if not 0 <= i <= n - 1:
        raise ValueError("level index must be in 0..n-1")
    num = (2 ** i * math.factorial(2 * n - 2 * i - 1)
           * math.factorial(n - 1) * math.factorial(n))
    den = (math.factorial(2 * n - i - 1) * math.factorial(n - i - 1)
           * 2 ** (n - 1) * math.factorial(i))
    return Fraction(num, den)


_MEAN_SIZE_CACHE: list[Fraction] = [Fraction(0), Fraction(1), Fraction(2)]


def mean_size(n: int, method: str = "recurrence") -> Fraction:
    """Average node count of the computation tree over shapes of size n.

    method="exact_sum" adds the per-level averages (n terms of factorials),
    method="recurrence" unrolls a four-term linear recurrence with the cached
    prefix; the two agree and the tests hold each against the other.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if method == "exact_sum":
        if n == 0:
            return Fraction(0)
        return sum((mean_level_width(n, i) for i in range(n)), Fraction(0))
    if method != "recurrence":
        raise ValueError("method must be 'exact_sum' or 'recurrence'")
    cache = _MEAN_SIZE_CACHE
    while len(cache) <= n:
        k = len(cache) - 3  # recurrence offset: computes term k+3
        a0 = 2 * k ** 4 + 12 * k ** 3 + 22 * k ** 2 + 12 * k
        a1 = 4 * k ** 4 + 32 * k ** 3 + 87 * k ** 2 + 87 * k + 18
        a2 = 2 * k ** 4 + 24 * k ** 3 + 85 * k ** 2 + 106 * k + 39
        a3 = 4 * k ** 3 + 20 * k ** 2 + 31 * k + 15
        cache.append((a0 * cache[k] - a1 * cache[k + 1] + a2 * cache[k + 2]) / a3)
    return cache[n]


def cumulative_size(n: int) -> int:
    """Total computation-tree nodes summed over all shapes of size n (integer)."""
    if n < 1:
        return 0
    total = mean_size(n) * catalan(n)
    assert total.denominator == 1
    return total.numerator


def r_sequence(N: int) -> list[Fraction]:
    """Normalized sizes R_n = mean_size(n) 2^(n-1) / n! for n = 0..N.

    Computed by its own recurrence, not by normalizing mean_size, so the two
    routes can be checked against each other.
    """
    if N < 3:
        raise ValueError("need N >= 3")
    r = [Fraction(0), Fraction(1), Fraction(2)]
    for k in range(0, N - 2):
        b0 = -16 * k
        b1 = 4 * (4 * k ** 2 + 12 * k + 3)
        b2 = -2 * (2 * k ** 3 + 18 * k ** 2 + 31 * k + 13)
        b3 = 4 * k ** 3 + 20 * k ** 2 + 31 * k + 15
        r.append(-(b0 * r[k] + b1 * r[k + 1] + b2 * r[k + 2]) / b3)
    return r


def asymptotic_size(n: int) -> Approx:
    """Third-order asymptotic for the average computation-tree size."""
    if n < 1:
        raise ValueError("n must be at least 1")
    x = mp.mpf(n)
    series = 2 + mp.mpf(2) / (3 * x) + mp.mpf(49) / (36 * x ** 2) + mp.mpf(27449) / (6480 * x ** 3)
    val = mp.e * mp.sqrt(2 * mp.pi * x) * (x / (2 * mp.e)) ** x * series
    # heuristic: next omitted term of the bracket, empirically ~20/n^4
    err = float(val / series * 20 / x ** 4)
    return Approx(float(val), err, certified=False)


def geometric_mean_width(n: int, precision: int = 80) -> mp.mpf:
    """Geometric mean of run counts over shapes of size n.

    Product over k of k^(1 - e_k) where e_k is the expected number of
    subtrees of size k hanging in a uniform shape; exact identity with the
    brute-force geometric mean, evaluated to the given bit precision.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    with mp.workprec(precision + 20):
        cn = catalan(n)
        total = mp.mpf(0)
        for k in range(2, n):
            expected = Fraction((n + 1 - k) * catalan(k) * catalan(n - k + 1), 2 * cn)
            exponent = 1 - mp.mpf(expected.numerator) / expected.denominator
            total += exponent * mp.log(k)
        return mp.exp(total)


def _catalan_weight_bounds(x: mp.mpf) -> tuple[mp.mpf, mp.mpf]:
    """Proven lower/upper bounds for ln(x) C_x 4^(-x) at integer x >= 2.

    Uses two-sided central binomial bounds 4^m/sqrt(pi (m + 1/3)) <
    binom(2m, m) <= 4^m/sqrt(pi (m + 1/4)) with m = x - 1.
    """
    lo = mp.log(x) / (4 * x * mp.sqrt(mp.pi * (x - mp.mpf(2) / 3)))
    hi = mp.log(x) / (4 * x * mp.sqrt(mp.pi * (x - mp.mpf(3) / 4)))
    return lo, hi


def log_constant_L(target_abs_error: float = 1e-6) -> Approx:
    """The run-count log-scale constant: sum over n >= 2 of ln(n) C_n 4^(-n).

    Returns a certified enclosure midpoint. The head is summed exactly with
    the term ratio recurrence; the tail is trapped between integrals of the
    proven per-term bounds (both bounds are decreasing past the cutoff, so
    the integral comparison brackets the discrete tail from both sides).
    """
    if target_abs_error < 1e-7:
        raise ValueError("target_abs_error below 1e-7 is not supported")
    with mp.workprec(200):
        head = mp.mpf(0)
        g = mp.mpf(1) / 16  # the n = 2 weight C_2 4^(-2)
        n = 2
        for cutoff in (10_000, 40_000, 160_000):
            while n <= cutoff:
                head += mp.log(n) * g
                g = g * (2 * n - 1) / (2 * (n + 1))
                n += 1
            tail_lo = mp.quad(lambda x: _catalan_weight_bounds(x)[0],
                              [cutoff + 1, 4 * cutoff, mp.inf])
            tail_hi = mp.quad(lambda x: _catalan_weight_bounds(x)[1],
                              [cutoff, 4 * cutoff, mp.inf])
            mid = head + (tail_lo + tail_hi) / 2
            half = (tail_hi - tail_lo) / 2 * mp.mpf("1.000001")  # quadrature slack
            if half <= target_abs_error:
                return Approx(float(mid), float(half), certified=True)
    raise ArithmeticError(
        f"enclosure width {float(half):.3g} misses target {target_abs_error:.3g}")


def log_constant_partial_sum(terms: int) -> float:
    """Direct partial sum of the same series, chunked numpy in log space.

    Converges like ln(n)/sqrt(n), so tens of millions of terms still sit
    about 1e-3 away; kept as the slow cross-check route.
    """
    if terms < 2:
        raise ValueError("need at least the n = 2 term")
    total = 0.0
    log_g = math.log(1.0 / 16.0)
    lo = 2
    chunk = 1 << 20
    while lo <= terms:
        hi = min(terms, lo + chunk - 1)
        ns = np.arange(lo, hi + 1, dtype=np.float64)
        # weight ratio g(n+1)/g(n) = (2n - 1) / (2n + 2), walked in log space
        steps = np.log(2.0 * ns - 1.0) - np.log(2.0 * ns + 2.0)
        logs = log_g + np.concatenate(([0.0], np.cumsum(steps[:-1])))
        total += float(np.sum(np.log(ns) * np.exp(logs)))
        log_g += float(np.sum(steps))
        lo = hi + 1
    return total


def nonplane_count(n: int) -> int:
    """Shapes of size n when sibling order is ignored (unordered trees)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    t = _nonplane_table(n)
    return t[n]


def _nonplane_table(n: int) -> list[int]:
    # Euler transform of itself: the classic rooted unordered tree recurrence
    t = [0, 1]
    c = [0]
    for m in range(1, n):
        c.append(sum(d * t[d] for d in range(1, m + 1) if m % d == 0))
        s = sum(c[k] * t[m + 1 - k] for k in range(1, m + 1))
        t.append(s // m)
    return t


def nonplane_mean_width(n: int) -> Fraction:
    """Average run count over unordered shapes: (n-1)! / t_n."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return Fraction(math.factorial(n - 1), nonplane_count(n))


def catalan_power_coeff(n: int, k: int) -> int:
    """Coefficient of z^(n+k) in the k-th power of the shape series."""
    if k < 1 or n < 1:
        raise ValueError("need n >= 1 and k >= 1")
    return k * math.comb(k + 2 * n - 1, n - 1) // n


def level_bounds_check(n: int, i: int) -> bool:
    """Verify 1 <= mean_level_width(n,i) 2^(n-1) i!/n! <= 1/(1 - i^2/2n).

    Exact rational arithmetic throughout; the upper bound is only claimed
    while i^2 < 2n, so that is a precondition.
    """
    if not 0 <= i <= n - 1:
        raise ValueError("level index must be in 0..n-1")
    if i * i >= 2 * n:
        raise ValueError("bound requires i^2 < 2n")
    value = mean_level_width(n, i) * 2 ** (n - 1) * math.factorial(i) / math.factorial(n)
    bound = 1 / (1 - Fraction(i * i, 2 * n))
    return 1 <= value <= bound
