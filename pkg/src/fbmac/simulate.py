"""Tiny random MAC codes, their exact ML error probabilities, and converse checks."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .bounds import bound_triple
from .channel import DmMac, InputPair
from .gaussian import q_inverse
from .region import grid_inputs

ENUMERATION_GUARD = 10**8
TIE_RTOL = 1e-12
EPS_MARGIN = 1e-12


class EnumerationTooLarge(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class Codebook:
    n: int
    m1: int
    m2: int
    cw1: np.ndarray  # [m1, n]
    cw2: np.ndarray  # [m2, n]
    seed: int | None = None

    def __post_init__(self):
        if self.cw1.shape != (self.m1, self.n) or self.cw2.shape != (self.m2, self.n):
            raise ValueError("codeword tables do not match (m1, n) and (m2, n)")

    def check(self, channel: DmMac) -> None:
        if self.cw1.min() < 0 or self.cw1.max() >= channel.x1_size:
            raise ValueError("codebook 1 uses symbols outside X1")
        if self.cw2.min() < 0 or self.cw2.max() >= channel.x2_size:
            raise ValueError("codebook 2 uses symbols outside X2")


@dataclass(frozen=True, eq=False)
class ErrorReport:
    epsilon: float
    eps_pair: np.ndarray  # [m1, m2]
    eps_row: np.ndarray  # eps_{m1}, averaged over m2
    eps_col: np.ndarray  # eps_{m2}, averaged over m1
    total_mass: np.ndarray  # sum over y^n of p(y^n | pair); 1 up to rounding


@dataclass(frozen=True)
class Verdict:
    passed: bool
    epsilon: float
    ln_m1: float
    ln_m2: float
    b1: float
    b2: float
    b12: float
    slack1: float
    slack2: float
    slack12: float
    mode: str
    grid_resolution: int


def random_codebook(channel: DmMac, inputs: InputPair, m1: int, m2: int, n: int, seed: int) -> Codebook:
    """Codeword symbols drawn i.i.d. from p1 and p2."""
    if m1 < 1 or m2 < 1 or n < 1:
        raise ValueError("m1, m2 and n must be positive")
    inputs.check(channel)
    rng = np.random.default_rng(seed)
    cw1 = rng.choice(channel.x1_size, size=(m1, n), p=inputs.p1)
    cw2 = rng.choice(channel.x2_size, size=(m2, n), p=inputs.p2)
    return Codebook(n, m1, m2, cw1, cw2, seed)


def _likelihood_table(channel: DmMac, code: Codebook) -> np.ndarray:
    # lik[m1, m2, i, y] = W(y | cw1[m1, i], cw2[m2, i])
    return np.ascontiguousarray(channel.w[code.cw1[:, None, :], code.cw2[None, :, :], :])


def exact_error(channel: DmMac, code: Codebook, guard: int = ENUMERATION_GUARD) -> ErrorReport:
    """Average and conditional error probabilities of the ML decoder, by enumerating y^n.

    Ties between message pairs go to the lexicographically smallest pair, with
    likelihoods within a relative 1e-12 of the maximum counted as tied.
    """
    code.check(channel)
    work = channel.y_size**code.n * code.m1 * code.m2
    if work > guard:
        raise EnumerationTooLarge(f"{work} kernel evaluations exceed the enumeration guard {guard}")
    err, total = kernels.ml_error_masses(_likelihood_table(channel, code), TIE_RTOL)
    eps_pair = np.clip(err, 0.0, 1.0)
    return ErrorReport(
        epsilon=math.fsum(eps_pair.ravel()) / eps_pair.size,
        eps_pair=eps_pair,
        eps_row=eps_pair.mean(axis=1),
        eps_col=eps_pair.mean(axis=0),
        total_mass=total,
    )


def monte_carlo_error(channel: DmMac, code: Codebook, trials: int, seed: int, chunk: int = 20000,
                      alpha: float = 0.01):
    """Sampled-decoding estimate of the average error, with a (1 - alpha) CI half-width."""
    code.check(channel)
    rng = np.random.default_rng(seed)
    lik = _likelihood_table(channel, code).reshape(code.m1 * code.m2, code.n, channel.y_size)
    cum = np.cumsum(channel.w, axis=2)
    errors = 0
    done = 0
    while done < trials:
        m = min(chunk, trials - done)
        a = rng.integers(code.m1, size=m)
        b = rng.integers(code.m2, size=m)
        u = rng.random((m, code.n))
        rows = cum[code.cw1[a], code.cw2[b]]  # [m, n, y]
        ys = np.minimum((u[:, :, None] >= rows).sum(axis=2), channel.y_size - 1)
        like = np.ones((m, lik.shape[0]))
        for i in range(code.n):
            like *= lik[:, i, :][:, ys[:, i]].T
        best = like.max(axis=1)
        decoded = np.argmax(like >= best[:, None] * (1.0 - TIE_RTOL), axis=1)
        errors += int(np.count_nonzero(decoded != a * code.m2 + b))
        done += m
    est = errors / trials
    return est, q_inverse(alpha / 2) * math.sqrt(est * (1.0 - est) / trials)


def converse_check(
    ln_m1: float,
    ln_m2: float,
    n: int,
    report: ErrorReport,
    channel: DmMac,
    mode: str = "explicit-exact",
    grid_resolution: int = 16,
) -> Verdict:
    """Compare a code's (ln M1, ln M2) with the converse at its exact error probability.

    Each bound is maximized separately over the product-input grid, matching
    the per-constraint suprema that time sharing over three values combines.
    """
    eps = report.epsilon
    if not EPS_MARGIN < eps < 1.0 - EPS_MARGIN:
        raise ValueError(f"converse check needs 0 < eps < 1 strictly, got {eps!r}")
    kwargs = {"beta_policy": "clip"} if mode.startswith("explicit") else {}
    best = [-math.inf, -math.inf, -math.inf]
    for inp in grid_inputs(channel, grid_resolution):
        t = bound_triple(channel, inp, n, eps, mode, **kwargs)
        best = [max(x, y) for x, y in zip(best, t.as_tuple())]
    b1, b2, b12 = best
    s1, s2, s12 = b1 - ln_m1, b2 - ln_m2, b12 - (ln_m1 + ln_m2)
    return Verdict(
        passed=min(s1, s2, s12) >= 0,
        epsilon=eps,
        ln_m1=ln_m1,
        ln_m2=ln_m2,
        b1=b1,
        b2=b2,
        b12=b12,
        slack1=s1,
        slack2=s2,
        slack12=s12,
        mode=mode,
        grid_resolution=grid_resolution,
    )
