"""Laws of n-fold i.i.d. sums of per-letter densities and their lower tails.

Two ways to get the law of S = X_1 + ... + X_n:

* exact: enumerate multiset counts (compositions) of the k support points with
  multinomial weights, C(n+k-1, k-1) terms;
* lattice: round every support point onto a grid of width `step` in a fixed
  direction and convolve. Rounding up makes the surrogate sum dominate the true
  one, so its CDF is a lower bound everywhere; rounding down gives an upper bound.

Thresholds may be the explicit sentinel :data:`UNBOUNDED` instead of a float.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .gaussian import q_inverse

ATOM_TOL = 1e-12
EXACT_GUARD = 10**8
LATTICE_GUARD = 5 * 10**7
JOINT_GUARD = 2 * 10**7
DEFAULT_LATTICE_BINS = 4096


class GuardExceeded(RuntimeError):
    """The requested computation is larger than the configured budget."""


class InfeasibleTarget(ValueError):
    """A tail target above 1 cannot be met by any threshold."""


class _Unbounded:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNBOUNDED"


UNBOUNDED = _Unbounded()


def _check_threshold(t):
    if t is UNBOUNDED:
        return t
    t = float(t)
    if not math.isfinite(t):
        raise ValueError("thresholds must be finite floats; use UNBOUNDED for +infinity")
    return t


class AtomicDistribution:
    """Finite law with strictly increasing support; atoms closer than 1e-12 are merged."""

    __slots__ = ("values", "probs", "_cum")

    def __init__(self, values, probs, *, _canonical: bool = False):
        v = np.asarray(values, dtype=np.float64).reshape(-1)
        p = np.asarray(probs, dtype=np.float64).reshape(-1)
        if v.shape != p.shape:
            raise ValueError("values and probs differ in length")
        if not _canonical:
            if np.any(p < 0) or not np.all(np.isfinite(p)) or not np.all(np.isfinite(v)):
                raise ValueError("probabilities must be finite and nonnegative, values finite")
            keep = p > 0
            v, p = v[keep], p[keep]
            order = np.argsort(v, kind="stable")
            v, p = kernels.merge_sorted(v[order], p[order], ATOM_TOL)
        if v.size == 0:
            raise ValueError("empty support")
        total = math.fsum(p)
        if abs(total - 1.0) > ATOM_TOL:
            raise ValueError(f"probabilities sum to {total!r}")
        v.setflags(write=False)
        p.setflags(write=False)
        self.values = v
        self.probs = p
        self._cum = None

    def __len__(self) -> int:
        return self.values.size

    def __repr__(self) -> str:
        return f"AtomicDistribution(atoms={len(self)}, mean={self.mean:.6g})"

    @property
    def mean(self) -> float:
        return math.fsum(self.values * self.probs)

    @property
    def variance(self) -> float:
        dev = self.values - self.mean
        return math.fsum(self.probs * dev * dev)

    @property
    def cumulative(self) -> np.ndarray:
        if self._cum is None:
            cum = np.cumsum(self.probs)
            cum[-1] = 1.0
            cum.setflags(write=False)
            self._cum = cum
        return self._cum


@dataclass(frozen=True, eq=False)
class LatticeDistribution:
    """Law supported on ``(base_index + j) * step`` for j = 0 .. len(pmf) - 1."""

    step: float
    base_index: int
    pmf: np.ndarray
    direction: str

    @property
    def offset(self) -> float:
        return self.base_index * self.step

    @property
    def values(self) -> np.ndarray:
        return (self.base_index + np.arange(self.pmf.size)) * self.step

    @property
    def probs(self) -> np.ndarray:
        return self.pmf

    @property
    def cumulative(self) -> np.ndarray:
        cum = np.cumsum(self.pmf)
        cum[-1] = 1.0
        return cum


@dataclass(frozen=True)
class TailTarget:
    target_prob: float
    n: int

    def __post_init__(self):
        if not self.target_prob > 0:
            raise ValueError("target probability must be positive")
        if self.target_prob > 1 + ATOM_TOL:
            raise InfeasibleTarget(f"tail target {self.target_prob!r} exceeds 1")
        if self.n < 1:
            raise ValueError("n must be a positive integer")


def composition_count(n: int, k: int) -> int:
    return math.comb(n + k - 1, k - 1)


def exact_sum_distribution(per_letter: AtomicDistribution, n: int, guard: int = EXACT_GUARD) -> AtomicDistribution:
    if n < 1:
        raise ValueError("n must be a positive integer")
    if n == 1:
        return per_letter
    k = len(per_letter)
    count = composition_count(n, k)
    if count > guard:
        raise GuardExceeded(f"{count} compositions exceed the exact-mode guard {guard}")
    sums, logw = kernels.composition_sums(per_letter.values, np.log(per_letter.probs), n)
    probs = np.exp(logw - logw.max())
    probs /= math.fsum(probs)
    order = np.argsort(sums, kind="stable")
    v, p = kernels.merge_sorted(sums[order], probs[order], ATOM_TOL)
    keep = p > 0
    return AtomicDistribution(v[keep], p[keep], _canonical=True)


def lattice_indices(values: np.ndarray, step: float, direction: str) -> np.ndarray:
    """Grid index of each value; values within 1e-12 of a grid point snap onto it."""
    if direction not in ("round_up", "round_down"):
        raise ValueError(f"unknown rounding direction {direction!r}")
    ratio = np.asarray(values, dtype=np.float64) / step
    nearest = np.rint(ratio)
    on_grid = np.abs(values - nearest * step) <= ATOM_TOL
    rounded = np.ceil(ratio) if direction == "round_up" else np.floor(ratio)
    return np.where(on_grid, nearest, rounded).astype(np.int64)


def default_step(per_letter: AtomicDistribution) -> float:
    spread = float(per_letter.values[-1] - per_letter.values[0])
    return spread / DEFAULT_LATTICE_BINS if spread > 0 else 1.0


def lattice_sum_distribution(
    per_letter: AtomicDistribution,
    n: int,
    step: float,
    direction: str = "round_up",
    guard: int = LATTICE_GUARD,
) -> LatticeDistribution:
    if not step > 0:
        raise ValueError("step must be positive")
    if n < 1:
        raise ValueError("n must be a positive integer")
    idx = lattice_indices(per_letter.values, step, direction)
    lo = int(idx.min())
    shifts = idx - lo
    width = n * int(shifts.max()) + 1
    if width > guard:
        raise GuardExceeded(f"lattice width {width} exceeds guard {guard}; use a coarser step")
    # merge letters that land on the same grid point before convolving
    uniq, inv = np.unique(shifts, return_inverse=True)
    probs = np.zeros(uniq.size)
    np.add.at(probs, inv, per_letter.probs)
    pmf = kernels.lattice_power(uniq, probs, n)
    pmf.setflags(write=False)
    return LatticeDistribution(float(step), n * lo, pmf, direction)


def cdf(dist, t) -> float:
    """P(S <= t), counting atoms within 1e-12 above t as included."""
    t = _check_threshold(t)
    if t is UNBOUNDED:
        return 1.0
    values = dist.values
    i = int(np.searchsorted(values, t + ATOM_TOL, side="right"))
    if i == 0:
        return 0.0
    if i == values.size:
        return 1.0
    return float(min(1.0, dist.cumulative[i - 1]))


def solve_delta(
    per_letter: AtomicDistribution,
    mean: float,
    tt: TailTarget,
    mode: str = "exact",
    step: float | None = None,
    guard: int | None = None,
) -> float:
    """Largest delta with P(S <= n (mean - delta)) >= target under the computed CDF.

    ``mode="lattice"`` always rounds up, so the returned delta is sound for the
    true law as well.
    """
    if len(per_letter) == 0:
        raise ValueError("empty support")
    target = min(tt.target_prob, 1.0)
    n = tt.n
    if mode == "exact":
        dist = exact_sum_distribution(per_letter, n, guard or EXACT_GUARD)
    elif mode == "lattice":
        step = step if step is not None else default_step(per_letter)
        dist = lattice_sum_distribution(per_letter, n, step, "round_up", guard or LATTICE_GUARD)
    else:
        raise ValueError(f"unknown tail mode {mode!r}")
    cum = dist.cumulative
    j = int(np.searchsorted(cum, target, side="left"))
    j = min(j, cum.size - 1)
    t_star = float(dist.values[j])
    return mean - t_star / n


def joint_tail(table, n: int, t1, t2, t12, step: float, guard: int = JOINT_GUARD) -> float:
    """Certified lower bound on P(S1 <= t1, S2 <= t2, S12 <= t12).

    Each coordinate is rounded up onto the grid; unbounded coordinates are
    marginalized out instead of convolved.
    """
    if not step > 0:
        raise ValueError("step must be positive")
    thresholds = {"d1": _check_threshold(t1), "d2": _check_threshold(t2), "d12": _check_threshold(t12)}
    active = [w for w, t in thresholds.items() if t is not UNBOUNDED]
    if not active:
        return 1.0
    cols, box = [], []
    for w in active:
        idx = lattice_indices(table.density(w), step, "round_up")
        lo = int(idx.min())
        shifts = idx - lo
        # largest j with (n*lo + j) * step <= t + tol
        limit = math.floor((thresholds[w] + ATOM_TOL) / step) - n * lo
        while (n * lo + limit + 1) * step <= thresholds[w] + ATOM_TOL:
            limit += 1
        while limit >= 0 and (n * lo + limit) * step > thresholds[w] + ATOM_TOL:
            limit -= 1
        if limit < 0:
            return 0.0
        cols.append(shifts)
        box.append(min(limit, n * int(shifts.max())) + 1)
    while len(cols) < 3:
        cols.append(np.zeros(len(table), dtype=np.int64))
        box.append(1)
    cells = box[0] * box[1] * box[2]
    if cells > guard:
        raise GuardExceeded(f"joint lattice of {cells} cells exceeds guard {guard}")
    triples = np.stack(cols, axis=1)
    uniq, inv = np.unique(triples, axis=0, return_inverse=True)
    probs = np.zeros(uniq.shape[0])
    np.add.at(probs, inv.reshape(-1), table.prob)
    pmf = kernels.lattice_power_3d(np.ascontiguousarray(uniq), probs, n, tuple(box))
    return float(min(1.0, math.fsum(pmf.ravel())))


def monte_carlo_tail(table, which: str, n: int, t, samples: int, seed: int, chunk: int = 1 << 20):
    """Empirical P(S <= t) with the half-width of a 99% normal confidence interval."""
    if samples < 100:
        raise ValueError("at least 100 samples are required")
    t = _check_threshold(t)
    if t is UNBOUNDED:
        return 1.0, 0.0
    d = table.density(which)
    p = table.prob / table.prob.sum()
    rng = np.random.default_rng(seed)
    per_chunk = max(1, chunk // n)
    hits = 0
    done = 0
    while done < samples:
        m = min(per_chunk, samples - done)
        idx = rng.choice(d.size, size=(m, n), p=p)
        hits += int(np.count_nonzero(d[idx].sum(axis=1) <= t + ATOM_TOL))
        done += m
    est = hits / samples
    z = q_inverse(0.005)
    return est, z * math.sqrt(est * (1.0 - est) / samples)
