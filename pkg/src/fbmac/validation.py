"""Oracle battery for the tail engine, shared by ``fbmac validate`` and the tests."""
from __future__ import annotations

import itertools
import math

import numpy as np

from .tails import (
    AtomicDistribution,
    TailTarget,
    cdf,
    exact_sum_distribution,
    lattice_sum_distribution,
    solve_delta,
)


FP_SLACK = 1e-12


def brute_force_sum(per_letter: AtomicDistribution, n: int) -> AtomicDistribution:
    """Law of the n-fold sum by walking all k**n sequences."""
    vals, probs = [], []
    for seq in itertools.product(range(len(per_letter)), repeat=n):
        vals.append(math.fsum(per_letter.values[list(seq)]))
        probs.append(math.prod(per_letter.probs[list(seq)]))
    return AtomicDistribution(vals, probs)


def random_law(rng: np.random.Generator, max_atoms: int = 4) -> AtomicDistribution:
    k = int(rng.integers(1, max_atoms + 1))
    values = rng.normal(0.0, 1.5, size=k)
    probs = rng.dirichlet(np.ones(k))
    probs /= math.fsum(probs)
    return AtomicDistribution(values, probs)


def tail_battery(seed: int = 0, cases: int = 40, thresholds: int = 1000) -> list[dict]:
    rng = np.random.default_rng(seed)
    worst_atom = 0.0
    worst_moment = 0.0
    sandwich_bad = 0
    delta_bad = 0
    atoms_ok = True
    for _ in range(cases):
        law = random_law(rng)
        n = int(rng.integers(1, 7))
        exact = exact_sum_distribution(law, n)
        brute = brute_force_sum(law, n)
        if len(exact) != len(brute):
            atoms_ok = False
        else:
            worst_atom = max(
                worst_atom,
                float(np.max(np.abs(exact.values - brute.values))),
                float(np.max(np.abs(exact.probs - brute.probs))),
            )
        worst_moment = max(
            worst_moment,
            abs(exact.mean - n * law.mean) / n,
            abs(exact.variance - n * law.variance) / n,
        )
        spread = float(law.values[-1] - law.values[0]) or 1.0
        step = spread / float(rng.integers(3, 200))
        up = lattice_sum_distribution(law, n, step, "round_up")
        down = lattice_sum_distribution(law, n, step, "round_down")
        lo, hi = n * law.values[0] - 1.0, n * law.values[-1] + 1.0
        for t in rng.uniform(lo, hi, size=thresholds // cases + 1):
            c = cdf(exact, t)
            # equal CDFs can differ by a few ulps through summation order
            if not (cdf(up, t) <= c + FP_SLACK and c <= cdf(down, t) + FP_SLACK):
                sandwich_bad += 1
        for target in rng.uniform(0.01, 0.99, size=3):
            tt = TailTarget(float(target), n)
            for mode in ("exact", "lattice"):
                d = solve_delta(law, law.mean, tt, mode=mode, step=step)
                if cdf(exact, n * (law.mean - d)) < target:
                    delta_bad += 1
    return [
        {"check": "exact_vs_bruteforce", "cases": cases, "passed": atoms_ok and worst_atom <= 1e-12, "worst": worst_atom},
        {"check": "mean_variance_additivity", "cases": cases, "passed": worst_moment <= 1e-9, "worst": worst_moment},
        {"check": "lattice_sandwich", "cases": cases, "passed": sandwich_bad == 0, "worst": sandwich_bad},
        {"check": "solve_delta_soundness", "cases": cases, "passed": delta_bad == 0, "worst": delta_bad},
    ]
