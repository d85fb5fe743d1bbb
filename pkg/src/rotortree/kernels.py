"""Exact walk kernels on the k-regular tree.

Everything here is a function of distance x and time t only, by symmetry.

path_count n(x, t): the number of length-t walks from a fixed vertex at
distance x to a fixed target vertex, so that n(x, t) / k^t is the simple
random walk's hitting probability.  Recurrences:

    n(0, 0) = 1,  n(x, 0) = 0 for x >= 1,
    n(0, t) = k * n(1, t-1),
    n(x, t) = n(x-1, t-1) + (k-1) * n(x+1, t-1)   (x, t >= 1),

and n(x, t) = 0 whenever x > t or x and t differ in parity.

ballot_kernel i(x, t) := k * n(x-1, t-1) - n(x, t) measures how much an
inward step now beats staying put, scaled by k^t.  It obeys the same
recurrence with seeds i(x, 0) = 0, i(0, t) = 0, i(1, 1) = k - 1, and has
the closed form

    i(x, t) = (k-1)^((t-x)/2 + 1) * (x/t) * C(t, (t+x)/2),

where (x/t) * C(t, (t+x)/2) is the Ballot count of +-1 paths from x that
first reach 0 at step t.  Both kernels are plain big integers; derived
probabilities are ExactAmount values with power-of-k denominators.
"""

from __future__ import annotations

import math
from decimal import Decimal, localcontext
from fractions import Fraction

from .errors import BudgetExceeded
from .exact import ExactAmount
from .tree import TreeParams

# 50 decimal places, for the factorial bracket comparators only.
PI_50 = Decimal("3.14159265358979323846264338327950288419716939937510")


def _in_support(x: int, t: int) -> bool:
    return 0 <= x <= t and (x + t) % 2 == 0


class KernelTable:
    """Memoized n(x, t) and i(x, t) for one tree degree.

    Values are built on demand by an explicit worklist (no recursion depth
    limit).  Construction is single-writer; freeze() afterwards makes any
    cache miss an error, so a frozen table can be shared read-only.
    """

    def __init__(self, params: TreeParams):
        self.params = params
        self._paths: dict[tuple[int, int], int] = {}
        self._ballot: dict[tuple[int, int], int] = {}
        self._frozen = False

    def freeze(self) -> None:
        self._frozen = True

    def _run(self, memo, x, t, seed, combine):
        """Fill memo up to (x, t) given seed(x, t) for t == 0 rows handled
        inside combine's dependency walk; returns memo[x, t]."""
        stack = [(x, t)]
        while stack:
            cx, ct = stack[-1]
            if (cx, ct) in memo:
                stack.pop()
                continue
            if self._frozen:
                raise RuntimeError("KernelTable is frozen; value not cached")
            base = seed(cx, ct)
            if base is not None:
                memo[cx, ct] = base
                stack.pop()
                continue
            missing = []
            deps = []
            for dx in ((1,) if cx == 0 else (cx - 1, cx + 1)):
                if not _in_support(dx, ct - 1):
                    deps.append(0)
                elif (dx, ct - 1) in memo:
                    deps.append(memo[dx, ct - 1])
                else:
                    missing.append((dx, ct - 1))
            if missing:
                stack.extend(missing)
                continue
            memo[cx, ct] = combine(cx, deps)
            stack.pop()
        return memo[x, t]

    def path_count(self, x: int, t: int) -> int:
        if x < 0 or t < 0:
            raise ValueError(f"need x, t >= 0, got ({x}, {t})")
        if not _in_support(x, t):
            return 0
        k = self.params.k

        def seed(cx, ct):
            if ct == 0:
                return 1 if cx == 0 else 0
            return None

        def combine(cx, deps):
            if cx == 0:
                return k * deps[0]
            return deps[0] + (k - 1) * deps[1]

        return self._run(self._paths, x, t, seed, combine)

    def ballot(self, x: int, t: int) -> int:
        if x < 0 or t < 0:
            raise ValueError(f"need x, t >= 0, got ({x}, {t})")
        if x == 0 or t == 0 or not _in_support(x, t):
            return 0
        k = self.params.k

        def seed(cx, ct):
            if ct == 0 or cx == 0:
                return 0
            if cx == 1 and ct == 1:
                return k - 1
            return None

        def combine(cx, deps):
            return deps[0] + (k - 1) * deps[1]

        return self._run(self._ballot, x, t, seed, combine)


def path_count(x: int, t: int, table: KernelTable) -> int:
    return table.path_count(x, t)


def hit_probability(x: int, t: int, table: KernelTable) -> ExactAmount:
    """Probability that the simple random walk sits on a fixed vertex at
    distance x after exactly t steps: n(x, t) / k^t."""
    return ExactAmount(table.params.k, table.path_count(x, t), t)


def ballot_kernel(x: int, t: int, table: KernelTable) -> int:
    return table.ballot(x, t)


def ballot_kernel_closed(x: int, t: int, params: TreeParams) -> int:
    """Closed form (k-1)^((t-x)/2 + 1) * (x/t) * C(t, (t+x)/2).

    Returns 0 outside the support (x or t nonpositive, x > t, or parity
    mismatch).  The Ballot count x * C(t, (t+x)/2) / t is always integral.
    """
    if x <= 0 or t <= 0 or not _in_support(x, t):
        return 0
    k = params.k
    paths = x * math.comb(t, (t + x) // 2)
    assert paths % t == 0
    return (k - 1) ** ((t - x) // 2 + 1) * (paths // t)


def path_count_oracle(x: int, t: int, params: TreeParams, cap: int = 2_100_000) -> int:
    """Independent check for n(x, t): enumerate every one of the k^t walks
    from a depth-x start vertex and count arrivals at the origin.

    Deliberately brute force, no pruning or memoization; the budget cap
    rejects calls whose enumeration would not finish promptly.
    """
    if x < 0 or t < 0:
        raise ValueError(f"need x, t >= 0, got ({x}, {t})")
    k = params.k
    if k**t > cap:
        raise BudgetExceeded(f"k^t = {k**t} exceeds enumeration cap {cap}")
    start = tuple(i % 2 for i in range(x))  # any reduced word of length x

    def walk(word: tuple, steps: int) -> int:
        if steps == 0:
            return 1 if not word else 0
        total = 0
        for d in range(k):
            if word and word[-1] == d:
                total += walk(word[:-1], steps - 1)
            else:
                total += walk(word + (d,), steps - 1)
        return total

    return walk(start, t)


def ballot_oracle(x: int, t: int, params: TreeParams, cap: int = 1_000_000) -> int:
    """Independent check for i(x, t): enumerate +-1 lattice paths from
    height x with (t-x)/2 upsteps and (t+x)/2 downsteps that stay strictly
    positive until the final step lands on 0 (first passage at time t),
    each weighted by (k-1)^(upsteps + 1)."""
    if x <= 0 or t <= 0 or not _in_support(x, t):
        return 0
    ups = (t - x) // 2
    downs = (t + x) // 2
    if math.comb(t, ups) > cap:
        raise BudgetExceeded(f"C({t},{ups}) exceeds enumeration cap {cap}")

    def paths(h: int, u: int, d: int) -> int:
        if u == 0 and d == 0:
            return 1
        total = 0
        if u:
            total += paths(h + 1, u - 1, d)
        if d:
            if h > 1:
                total += paths(h - 1, u, d - 1)
            elif u == 0 and d == 1:
                total += 1  # final step lands exactly on 0
        return total

    return (params.k - 1) ** (ups + 1) * paths(x, ups, downs)


def influence(x: int, a: int, t: int, table: KernelTable) -> ExactAmount:
    """Exact effect on the time-t hitting probability of one chip stepping
    from distance x in direction a (-1 inward, +1 outward) versus staying:

        INF(x, a, t) = H(x + a, t - 1) - H(x, t)
                     = (k * n(x + a, t - 1) - n(x, t)) / k^t.

    Equals i(x, t) / k^t for a = -1 and -i(x, t) / ((k-1) k^t) for a = +1.
    """
    if a not in (-1, 1):
        raise ValueError(f"direction sign must be -1 or +1, got {a}")
    if x < 1 or t < 1:
        raise ValueError(f"need x, t >= 1, got ({x}, {t})")
    k = table.params.k
    num = k * table.path_count(x + a, t - 1) - table.path_count(x, t)
    return ExactAmount(k, num, t)


def influence_peak_time(x: int, params: TreeParams) -> int:
    """The time t (same parity as x, t >= x) maximizing i(x, t) / k^t,
    smallest such t on a plateau.

    Seeds at the root of the rational function's numerator,

        r(x) = (sqrt(8k^3 - 4k^2 - 8k + 4 + k^2 (k-2)^2 x^2)
                - 2k^2 + 2k - 2) / (k-2)^2,

    then walks the exact value sequence to the peak, so the answer never
    depends on the analytic estimate being on the right side.
    """
    if x < 1:
        raise ValueError(f"need x >= 1, got {x}")
    k = params.k
    a_coef = (k - 2) ** 2
    c_coef = 2 * k * k - 2 * k + 2
    s_val = 8 * k**3 - 4 * k**2 - 8 * k + 4 + k * k * a_coef * x * x
    t0 = max(0, (math.isqrt(s_val) - c_coef) // a_coef - 2)
    while (a_coef * t0 + c_coef) ** 2 < s_val:
        t0 += 1
    t = max(x, t0)
    if (t - x) % 2:
        t += 1
    kk = k * k
    while ballot_kernel_closed(x, t + 2, params) > kk * ballot_kernel_closed(x, t, params):
        t += 2
    while t - 2 >= x and kk * ballot_kernel_closed(x, t - 2, params) >= ballot_kernel_closed(x, t, params):
        t -= 2
    return t


def _as_decimal(n) -> Decimal:
    frac = Fraction(n)
    return Decimal(frac.numerator) / Decimal(frac.denominator)


def factorial_bounds(n, digits: int = 50) -> tuple[Decimal, Decimal]:
    """Bracket (5/2) sqrt(n) (n/e)^n < n! < sqrt(15/2) sqrt(n) (n/e)^n,
    evaluated at `digits` significant decimal digits.

    n may be a positive integer or half-integer (Gamma(n+1) then plays the
    role of n!).  The bracket is a comparator for bound reports only; the
    containment itself holds for n >= 1.
    """
    frac = Fraction(n)
    if frac <= 0 or (2 * frac).denominator != 1:
        raise ValueError(f"need a positive integer or half-integer, got {n!r}")
    with localcontext() as ctx:
        ctx.prec = digits
        nd = _as_decimal(frac)
        body = nd.sqrt() * (nd * (nd.ln() - 1)).exp()
        low = Decimal("2.5") * body
        high = Decimal("7.5").sqrt() * body
        return +low, +high


def gamma_factorial(n, digits: int = 50) -> Decimal:
    """n! for integer n, Gamma(n+1) for half-integer n, to `digits` digits.

    Half-integer case: Gamma(m + 3/2) = sqrt(pi) * prod_{j=0..m} (j + 1/2).
    """
    frac = Fraction(n)
    if frac < 0 or (2 * frac).denominator != 1:
        raise ValueError(f"need a nonnegative integer or half-integer, got {n!r}")
    with localcontext() as ctx:
        ctx.prec = digits
        if frac.denominator == 1:
            return +Decimal(math.factorial(frac.numerator))
        prod = Fraction(1)
        term = frac
        while term > 0:
            prod *= term
            term -= 1
        return +(_as_decimal(prod) * PI_50.sqrt())
