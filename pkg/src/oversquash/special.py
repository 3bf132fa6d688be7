"""Tail probabilities and rank utilities for the significance tests."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

_TINY = 1e-300
_MAX_ITER = 300
_TOL = 1e-15


@dataclass(frozen=True)
class TailResult:
    p: float
    converged: bool = True
    iterations: int = 0

    def __float__(self) -> float:
        return self.p


def _beta_cf(a: float, b: float, x: float) -> tuple[float, bool, int]:
    """Continued fraction for the incomplete beta function (modified Lentz)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _TOL:
            return h, True, m
    return h, False, _MAX_ITER


def regularized_incomplete_beta(x: float, a: float, b: float, xc: float | None = None) -> TailResult:
    """``I_x(a, b)`` for ``a, b > 0`` and ``0 <= x <= 1``.

    Pass ``xc = 1 - x`` when it is known more accurately than the subtraction.
    """
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x={x} outside [0, 1]")
    if xc is None:
        xc = 1.0 - x
    if x == 0.0 or xc == 0.0:
        return TailResult(1.0 if xc == 0.0 else 0.0)
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log(xc)
    )
    front = math.exp(log_front)
    # the fraction converges fast only below the mean; use the symmetry otherwise
    if x < (a + 1.0) / (a + b + 2.0):
        cf, ok, it = _beta_cf(a, b, x)
        p = front * cf / a
    else:
        cf, ok, it = _beta_cf(b, a, xc)
        p = 1.0 - front * cf / b
    return TailResult(min(1.0, max(0.0, p)), ok, it)


def student_t_two_tailed(t: float, df: float) -> TailResult:
    """Two-tailed p-value ``P(|T| >= |t|)`` for Student's t with ``df`` degrees of freedom."""
    if not df >= 1:
        raise ValueError(f"degrees of freedom must be >= 1, got {df}")
    if math.isnan(t):
        raise ValueError("t is NaN")
    if math.isinf(t):
        return TailResult(0.0)
    t2 = t * t
    if t2 == 0.0:
        return TailResult(1.0)
    return regularized_incomplete_beta(df / (df + t2), df / 2.0, 0.5, xc=t2 / (df + t2))


def chi_square_sf_df1(x: float) -> TailResult:
    """Upper tail of the chi-square distribution with one degree of freedom."""
    if x < 0 or math.isnan(x):
        raise ValueError(f"chi-square statistic must be >= 0, got {x}")
    return TailResult(math.erfc(math.sqrt(x / 2.0)))


def average_ranks(values: Sequence[float]) -> list[float]:
    """1-based ranks; tied values share the mean of the positions they occupy."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        # positions i..j (0-based) hold ranks i+1..j+1
        r = (i + j + 2) / 2.0
        for idx in order[i : j + 1]:
            ranks[idx] = r
        i = j + 1
    return ranks
