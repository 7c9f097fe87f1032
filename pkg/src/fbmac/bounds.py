"""Converse bounds on ln M1, ln M2 and ln M1M2 at blocklength n and average error eps.

Explicit bounds follow the non-asymptotic chain

    ln M <= n (I - delta) - ln eps - 2 ln beta + ln(1 + beta)

where delta is any threshold with P(S <= n (I - delta)) >= eps (1 + 2 beta),
S being the n-fold i.i.d. sum of the relevant information density. delta is
found either from the (exact or rounded-up lattice) law of S, or from the
Berry-Esseen certificate. The normal approximation drops the O(1) remainder.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .channel import DmMac
from .gaussian import berry_esseen_gamma, q_function, q_inverse  # noqa: F401  (re-exported)
from .measures import WHICH, moments, table_for
from .tails import (
    InfeasibleTarget,
    TailTarget,
    composition_count,
    solve_delta,
)

# composition budget above which the explicit bounds switch to the lattice tail
EXACT_BUDGET = 2 * 10**6


@dataclass(frozen=True)
class BetaSchedule:
    beta1: float
    beta2: float
    beta12: float

    def as_dict(self) -> dict:
        return {"d1": self.beta1, "d2": self.beta2, "d12": self.beta12}


@dataclass(frozen=True)
class BoundTriple:
    """Upper bounds (nats) on ln M1, ln M2 and ln M1M2."""

    b1: float
    b2: float
    b12: float
    mode: str
    diagnostics: dict = field(default_factory=dict, compare=False)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.b1, self.b2, self.b12)


@dataclass(frozen=True)
class Pentagon:
    """{0 <= R1 <= a, 0 <= R2 <= b, R1 + R2 <= c}, rates in nats per channel use."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, max(0.0, float(getattr(self, name))))

    @classmethod
    def from_triple(cls, triple: BoundTriple, n: int) -> "Pentagon":
        return cls(triple.b1 / n, triple.b2 / n, triple.b12 / n)

    def padded(self, pa: float, pb: float, pc: float) -> "Pentagon":
        return Pentagon(self.a + pa, self.b + pb, self.c + pc)

    def contains(self, r1: float, r2: float, tol: float = 1e-9) -> bool:
        return (
            -tol <= r1 <= self.a + tol
            and -tol <= r2 <= self.b + tol
            and r1 + r2 <= self.c + tol
        )


def _check_eps(eps: float) -> None:
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps!r}")


def beta_schedule(v1: float, v2: float, v12: float, eps: float, n: int, policy: str = "strict") -> BetaSchedule:
    """beta = sqrt(-ln eps / n) / sqrt(V), or sqrt(-ln eps / n) when V = 0.

    ``policy="clip"`` caps each beta at (1 - eps) / (2 eps), the largest value
    for which eps (1 + 2 beta) <= 1; ``"strict"`` raises instead.
    """
    _check_eps(eps)
    base = math.sqrt(-math.log(eps) / n)
    betas = [base / math.sqrt(v) if v > 0 else base for v in (v1, v2, v12)]
    cap = (1.0 - eps) / (2.0 * eps)
    bad = [name for name, b in zip(WHICH, betas) if eps * (1.0 + 2.0 * b) > 1.0 + 1e-12]
    if bad:
        if policy == "strict":
            raise InfeasibleTarget(
                "eps*(1+2*beta) > 1 for " + ", ".join(f"{w} (beta={b:.6g})" for w, b in zip(WHICH, betas) if w in bad)
            )
        if policy != "clip":
            raise ValueError(f"unknown beta policy {policy!r}")
        betas = [min(b, cap) for b in betas]
    return BetaSchedule(*betas)


def delta_normal(variance: float, eps: float, beta: float, gamma: float, n: int) -> float:
    """Threshold certified through the Berry-Esseen bound: sqrt(V/n) Q^-1(eps(1+2 beta) + gamma)."""
    arg = eps * (1.0 + 2.0 * beta) + gamma
    if arg >= 1.0:
        raise InfeasibleTarget(
            f"eps*(1+2*beta)+gamma = {arg:.6g} >= 1; use the exact tail or a larger n"
        )
    return math.sqrt(variance / n) * q_inverse(arg)


def _chain(n: int, mean: float, delta: float, eps: float, beta: float) -> float:
    return n * (mean - delta) - math.log(eps) - 2.0 * math.log(beta) + math.log1p(beta)


def _tail_delta(per, mean, target, n, tail, exact_budget, step):
    if tail == "auto":
        tail = "exact" if composition_count(n, len(per)) <= exact_budget else "lattice"
    return solve_delta(per, mean, TailTarget(target, n), mode=tail, step=step), tail


def explicit_bound_triple(
    channel: DmMac,
    inputs,
    n: int,
    eps: float,
    mode: str = "exact",
    *,
    tail: str = "auto",
    beta_policy: str = "strict",
    exact_budget: int = EXACT_BUDGET,
    step: float | None = None,
) -> BoundTriple:
    """Explicit converse triple for one (possibly time-shared) input distribution.

    mode ``"exact"`` takes delta from the law of the sum (``tail`` picks exact
    enumeration, the rounded-up lattice, or ``"auto"``); mode ``"be"`` takes it
    from :func:`delta_normal`. Constant densities use delta = 0 in both modes.
    With ``beta_policy="clip"``, a vacuous Berry-Esseen certificate falls back
    to the tail computation instead of raising.
    """
    _check_eps(eps)
    if mode not in ("exact", "be"):
        raise ValueError(f"unknown explicit mode {mode!r}")
    table = table_for(channel, inputs)
    pers = {w: table.per_letter(w) for w in WHICH}
    moms = {w: moments(table, w) for w in WHICH}
    variances = [0.0 if len(pers[w]) == 1 else moms[w].variance for w in WHICH]
    betas = beta_schedule(*variances, eps, n, policy=beta_policy).as_dict()

    bounds, diag = [], {"eps": eps, "n": n, "beta_policy": beta_policy}
    for w, var in zip(WHICH, variances):
        per, mom, beta = pers[w], moms[w], betas[w]
        target = eps * (1.0 + 2.0 * beta)
        gamma = None
        if len(per) == 1:
            delta, method = mom.mean - float(per.values[0]), "constant"
        elif mode == "exact":
            delta, method = _tail_delta(per, mom.mean, target, n, tail, exact_budget, step)
        else:
            gamma = berry_esseen_gamma(var, mom.third_abs_central, n)
            try:
                delta, method = delta_normal(var, eps, beta, gamma, n), "berry_esseen"
            except InfeasibleTarget:
                if beta_policy != "clip":
                    raise
                delta, method = _tail_delta(per, mom.mean, target, n, tail, exact_budget, step)
                method = f"{method}_fallback"
        bounds.append(_chain(n, mom.mean, delta, eps, beta))
        diag[w] = {
            "mean": mom.mean,
            "variance": var,
            "third_abs_central": mom.third_abs_central,
            "beta": beta,
            "target": target,
            "gamma": gamma,
            "delta": delta,
            "method": method,
        }
    return BoundTriple(*bounds, mode=f"explicit_{mode}", diagnostics=diag)


def normal_approx_triple(channel: DmMac, inputs, n: int, eps: float) -> BoundTriple:
    """n I - sqrt(n V) Q^-1(eps) + (1/2) ln n per constraint, with the O(1) term set to 0."""
    _check_eps(eps)
    table = table_for(channel, inputs)
    qi = q_inverse(eps)
    bounds, diag = [], {"eps": eps, "n": n, "label": "approximation"}
    for w in WHICH:
        mom = moments(table, w)
        var = max(mom.variance, 0.0)
        bounds.append(n * mom.mean - math.sqrt(n * var) * qi + 0.5 * math.log(n))
        diag[w] = {"mean": mom.mean, "variance": var}
    return BoundTriple(*bounds, mode="normal_approx", diagnostics=diag)


def bound_triple(channel: DmMac, inputs, n: int, eps: float, mode: str, **kwargs) -> BoundTriple:
    """Dispatch on the CLI mode names ``explicit-exact``, ``explicit-be`` and ``normal``."""
    if mode == "explicit-exact":
        return explicit_bound_triple(channel, inputs, n, eps, "exact", **kwargs)
    if mode == "explicit-be":
        return explicit_bound_triple(channel, inputs, n, eps, "be", **kwargs)
    if mode == "normal":
        return normal_approx_triple(channel, inputs, n, eps)
    raise ValueError(f"unknown bound mode {mode!r}")


def pentagon_support(p: Pentagon, lam: float) -> tuple[float, float, float]:
    """max lam R1 + (1 - lam) R2 over the pentagon, as (value, R1, R2).

    The optimum sits on one of the two corner points of the sum-rate facet;
    ties go to the corner with the larger R1.
    """
    r1a = min(p.a, p.c)
    r2a = min(p.b, p.c - r1a)
    r2b = min(p.b, p.c)
    r1b = min(p.a, p.c - r2b)
    va = lam * r1a + (1.0 - lam) * r2a
    vb = lam * r1b + (1.0 - lam) * r2b
    if vb > va:
        return vb, r1b, r2b
    return va, r1a, r2a
