"""Standard normal tail, its inverse, and the Berry-Esseen remainder."""
from __future__ import annotations

import math

BERRY_ESSEEN_CONSTANT = 0.5600
_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def q_function(x: float) -> float:
    """Upper tail P(Z > x) of a standard normal."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("x must be finite")
    # libm erfc is a rational approximation accurate to a few ulp; no cancellation for x > 0
    return 0.5 * math.erfc(x / _SQRT2)


def _density(x: float) -> float:
    return _INV_SQRT_2PI * math.exp(-0.5 * x * x)


def q_inverse(p: float) -> float:
    """Inverse of :func:`q_function` on (0, 1): bisection, then guarded Newton steps."""
    p = float(p)
    if not 0.0 < p < 1.0:
        raise ValueError(f"q_inverse needs 0 < p < 1, got {p!r}")
    if p == 0.5:
        return 0.0
    lo, hi = -40.0, 40.0
    while hi - lo > 1e-6:
        mid = 0.5 * (lo + hi)
        if q_function(mid) > p:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    for _ in range(50):
        f = q_function(x) - p
        dens = _density(x)
        if dens == 0.0:
            break
        step = f / dens
        nxt = x + step
        if not lo <= nxt <= hi:
            nxt = 0.5 * (lo + hi)
        if q_function(nxt) > p:
            lo = max(lo, nxt)
        else:
            hi = min(hi, nxt)
        if abs(nxt - x) <= 1e-15 * max(1.0, abs(x)):
            x = nxt
            break
        x = nxt
    return x


def berry_esseen_gamma(variance: float, third_abs_central: float, n: int) -> float:
    """Uniform bound on |P(normalized sum <= x) - Phi(x)| for n i.i.d. terms."""
    if not variance > 0:
        raise ValueError("Berry-Esseen remainder needs positive variance")
    if third_abs_central < 0:
        raise ValueError("third absolute central moment must be nonnegative")
    return BERRY_ESSEEN_CONSTANT * third_abs_central / (variance**1.5 * math.sqrt(n))
