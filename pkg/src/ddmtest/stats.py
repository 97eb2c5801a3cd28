"""One-tailed exact binomial tests, Holm step-down, and minimum sample size.

Success probabilities are exact rationals; conversion to floating point
happens only inside the tail computation. The production tail runs in log
space so p-values stay meaningful at corpus scale (m in the tens of
thousands); an exact big-integer oracle is shipped alongside for testing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

_LOG_STOP = math.log(1e-18)  # geometric remainder below this of the sum: stop
_EXACT_COMB_LIMIT = 1024  # up to here, log C(m,f) comes from the exact integer


@dataclass(frozen=True)
class BinomialTestInput:
    """Successes g out of m trials with exact success probability p."""

    g: int
    m: int
    p: Fraction
    alpha: float = 0.05

    def __post_init__(self):
        object.__setattr__(self, "p", Fraction(self.p))
        if not 0 <= self.g <= self.m:
            raise ValueError(f"need 0 <= g <= m, got g={self.g}, m={self.m}")
        if not 0 < self.p < 1:
            raise ValueError(f"need 0 < p < 1, got p={self.p}")
        if not 0 < self.alpha < 1:
            raise ValueError(f"need 0 < alpha < 1, got alpha={self.alpha}")


@dataclass(frozen=True)
class AdjustedPValues:
    """Holm step-down output, in the input order."""

    raw: tuple[float, ...]
    adjusted: tuple[float, ...]
    rejected: tuple[bool, ...]


@lru_cache(maxsize=1 << 20)
def _log_comb(m: int, f: int) -> float:
    if m <= _EXACT_COMB_LIMIT:
        return math.log(math.comb(m, f))
    return math.lgamma(m + 1) - math.lgamma(f + 1) - math.lgamma(m - f + 1)


def _two_prod(a: float, b: float) -> tuple[float, float]:
    # Dekker: a*b as a rounded product plus its exact rounding error
    prod = a * b
    c = 134217729.0 * a
    ahi = c - (c - a)
    alo = a - ahi
    c = 134217729.0 * b
    bhi = c - (c - b)
    blo = b - bhi
    err = ((ahi * bhi - prod) + ahi * blo + alo * bhi) + alo * blo
    return prod, err


def _log_add(a: float, b: float) -> float:
    if a == -math.inf:
        return b
    if b == -math.inf:
        return a
    if a < b:
        a, b = b, a
    return a + math.log1p(math.exp(b - a))


def log_binomial_upper_tail(g: int, m: int, p: Fraction) -> float:
    """Natural log of P(X >= g) for X ~ Binomial(m, p), in log space.

    Terms are summed from f = g upward; once past the distribution mode the
    remainder is bounded by a geometric series and the sum stops when that
    bound is negligible, so large m stays cheap without losing accuracy.
    """
    if g <= 0:
        return 0.0
    if g > m:
        return -math.inf
    p = Fraction(p)
    lp = math.log(float(p))
    lq = math.log(float(1 - p))
    ratio = float(p / (1 - p))
    mode = (m + 1) * float(p)
    acc = -math.inf
    for f in range(g, m + 1):
        t1, e1 = _two_prod(float(f), lp)
        t2, e2 = _two_prod(float(m - f), lq)
        lt = math.fsum((_log_comb(m, f), t1, e1, t2, e2))
        acc = _log_add(acc, lt)
        if f >= mode and f < m:
            r = (m - f) / (f + 1) * ratio
            if r < 1.0 and lt + math.log(r / (1.0 - r)) < acc + _LOG_STOP:
                break
    return min(acc, 0.0)


def binomial_upper_tail(test: BinomialTestInput) -> float:
    """P(X >= g), the p-value of the one-tailed test against 'at most chance'."""
    return math.exp(log_binomial_upper_tail(test.g, test.m, test.p))


def binomial_lower_tail(g: int, m: int, p: Fraction) -> float:
    """P(X <= g); the upper tail of the mirrored binomial."""
    if g < 0:
        return 0.0
    if g >= m:
        return 1.0
    return math.exp(log_binomial_upper_tail(m - g, m, 1 - Fraction(p)))


def binomial_upper_tail_exact(g: int, m: int, p: Fraction) -> Fraction:
    """Exact rational P(X >= g); the big-integer oracle for the log-space path."""
    if g <= 0:
        return Fraction(1)
    if g > m:
        return Fraction(0)
    p = Fraction(p)
    num, den = p.numerator, p.denominator
    comp = den - num
    total = sum(math.comb(m, f) * num ** f * comp ** (m - f) for f in range(g, m + 1))
    return Fraction(total, den ** m)


def holm_adjust(raw, alpha: float = 0.05) -> AdjustedPValues:
    """Holm step-down adjustment, valid without independence assumptions.

    Sorted ascending, the i-th smallest p-value is multiplied by (count - i),
    capped at 1, and made monotone by a running maximum; results are mapped
    back to the input order. rejected[i] iff adjusted[i] <= alpha.
    """
    raw = tuple(float(x) for x in raw)
    if not raw:
        raise ValueError("need at least one p-value")
    for x in raw:
        if not 0.0 <= x <= 1.0:
            raise ValueError(f"p-value {x} outside [0, 1]")
    lam = len(raw)
    order = sorted(range(lam), key=raw.__getitem__)
    adjusted = [0.0] * lam
    running = 0.0
    for rank, idx in enumerate(order):
        running = max(running, min(1.0, (lam - rank) * raw[idx]))
        adjusted[idx] = running
    return AdjustedPValues(
        raw=raw,
        adjusted=tuple(adjusted),
        rejected=tuple(a <= alpha for a in adjusted),
    )


def holm_adjust_log10(raw_log10, alpha: float = 0.05) -> tuple[list[float], list[bool]]:
    """Holm step-down on log10 p-values; immune to float underflow.

    Returns (adjusted log10 p-values, rejected flags) in input order.
    """
    raw_log10 = [float(x) for x in raw_log10]
    if not raw_log10:
        raise ValueError("need at least one p-value")
    lam = len(raw_log10)
    log_alpha = math.log10(alpha)
    order = sorted(range(lam), key=raw_log10.__getitem__)
    adjusted = [0.0] * lam
    running = -math.inf
    for rank, idx in enumerate(order):
        running = max(running, min(0.0, math.log10(lam - rank) + raw_log10[idx]))
        adjusted[idx] = running
    return adjusted, [a <= log_alpha for a in adjusted]


def min_sample_size(p: Fraction, alpha: float | Fraction = 0.05) -> int:
    """Smallest m where significance is attainable: p^m <= alpha.

    Seeded by ceil(log alpha / log p), then pinned down with exact rational
    power comparisons so boundary cases never fall to floating-point logs.
    A float alpha is compared at its exact binary value.
    """
    p = Fraction(p)
    if not 0 < p < 1:
        raise ValueError(f"need 0 < p < 1, got p={p}")
    a = alpha if isinstance(alpha, Fraction) else Fraction(alpha)
    if not 0 < a < 1:
        raise ValueError(f"need 0 < alpha < 1, got alpha={alpha}")
    m = max(1, math.ceil(math.log(float(a)) / math.log(float(p))))
    while p ** m > a:
        m += 1
    while m > 1 and p ** (m - 1) <= a:
        m -= 1
    return m
