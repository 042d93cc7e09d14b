"""Pooled-variance unpaired Student t-test.

The two-sided p-value comes from the t CDF evaluated through the
regularized incomplete beta function, computed with the classic
continued-fraction expansion (Lentz's method), so no external stats
dependency is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ContractError

__all__ = ["SignificanceReport", "t_test_unpaired", "betainc_reg", "t_sf_two_sided"]


@dataclass(frozen=True)
class SignificanceReport:
    a_name: str
    b_name: str
    t: float
    df: int
    p: float
    a_mean: float
    a_std: float
    b_mean: float
    b_std: float
    degenerate: bool = False


def _betacf(a: float, b: float, x: float) -> float:
    # continued fraction for the incomplete beta (Numerical-Recipes style)
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 300):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-14:
            break
    return h


def betainc_reg(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if not 0.0 <= x <= 1.0:
        raise ContractError(f"x must be in [0, 1], got {x}")
    if x == 0.0 or x == 1.0:
        return x
    ln_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def t_sf_two_sided(t: float, df: int) -> float:
    """P(|T| >= |t|) for Student's t with ``df`` degrees of freedom."""
    if df < 1:
        raise ContractError("degrees of freedom must be >= 1")
    return betainc_reg(df / 2.0, 0.5, df / (df + t * t))


def _mean_std(xs):
    n = len(xs)
    m = sum(xs) / n
    var = sum((v - m) ** 2 for v in xs) / (n - 1) if n > 1 else 0.0
    return m, math.sqrt(var)


def t_test_unpaired(a, b, a_name: str = "A", b_name: str = "B") -> SignificanceReport:
    """Pooled-variance two-sample t-test on equal-or-unequal sized samples."""
    a, b = list(map(float, a)), list(map(float, b))
    if len(a) < 2 or len(b) < 2:
        raise ContractError("each sample needs at least 2 observations")
    na, nb = len(a), len(b)
    ma, sa = _mean_std(a)
    mb, sb = _mean_std(b)
    df = na + nb - 2
    pooled = ((na - 1) * sa * sa + (nb - 1) * sb * sb) / df
    if pooled == 0.0:
        if ma == mb:
            return SignificanceReport(a_name, b_name, 0.0, df, 1.0, ma, sa, mb, sb)
        # identical within-group values but different means: p collapses to 0
        t = math.copysign(math.inf, ma - mb)
        return SignificanceReport(a_name, b_name, t, df, 0.0, ma, sa, mb, sb,
                                  degenerate=True)
    t = (ma - mb) / math.sqrt(pooled * (1.0 / na + 1.0 / nb))
    return SignificanceReport(a_name, b_name, t, df, t_sf_two_sided(t, df),
                              ma, sa, mb, sb)
