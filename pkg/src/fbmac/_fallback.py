"""Pure numpy versions of the hot loops. Signatures mirror ``_speedups.pyx``."""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=64)
def _compositions(n: int, k: int) -> np.ndarray:
    # same order as the compiled enumerator: first count descending, recursively
    if k == 1:
        return np.array([[n]], dtype=np.int64)
    blocks = []
    for first in range(n, -1, -1):
        rest = _compositions(n - first, k - 1)
        block = np.empty((rest.shape[0], k), dtype=np.int64)
        block[:, 0] = first
        block[:, 1:] = rest
        blocks.append(block)
    out = np.vstack(blocks)
    out.setflags(write=False)
    return out


def composition_sums(values, logp, n):
    """Sum value and log multinomial weight of every composition of n into len(values) parts."""
    values = np.asarray(values, dtype=np.float64)
    logp = np.asarray(logp, dtype=np.float64)
    comps = _compositions(int(n), values.size)
    lg = np.array([math.lgamma(c + 1.0) for c in range(int(n) + 1)])
    sums = np.zeros(comps.shape[0])
    logw = np.full(comps.shape[0], lg[n])
    for i in range(values.size):
        c = comps[:, i]
        sums += c * values[i]
        logw += c * logp[i] - lg[c]
    return sums, logw


def merge_sorted(values, probs, tol):
    """Merge runs of sorted values lying within `tol` of the run's first value."""
    values = np.asarray(values, dtype=np.float64)
    probs = np.asarray(probs, dtype=np.float64)
    if values.size == 0:
        return values.copy(), probs.copy()
    starts = [0]
    anchor = values[0]
    # group boundaries depend on the running anchor, so this stays a scan
    gaps = np.diff(values) > tol
    if gaps.all():
        return values.copy(), probs.copy()
    for i in range(1, values.size):
        if values[i] - anchor > tol:
            starts.append(i)
            anchor = values[i]
    starts.append(values.size)
    out_v = np.empty(len(starts) - 1)
    out_p = np.empty(len(starts) - 1)
    for g in range(len(starts) - 1):
        a, b = starts[g], starts[g + 1]
        out_v[g] = values[a]
        out_p[g] = probs[a] if b - a == 1 else math.fsum(probs[a:b])
    return out_v, out_p


def lattice_power(shifts, probs, n):
    """n-fold convolution of a sparse pmf given by nonnegative integer shifts."""
    shifts = np.asarray(shifts, dtype=np.int64)
    probs = np.asarray(probs, dtype=np.float64)
    top = int(shifts.max())
    cur = np.ones(1)
    for _ in range(int(n)):
        nxt = np.zeros(cur.size + top)
        for s, p in zip(shifts, probs):
            nxt[s : s + cur.size] += p * cur
        cur = nxt
    return cur


def lattice_power_3d(shifts, probs, n, box):
    """n-fold convolution on a 3-d lattice, discarding mass outside ``[0, box)``.

    Shifts are nonnegative, so discarded mass never returns inside the box.
    """
    shifts = np.asarray(shifts, dtype=np.int64)
    probs = np.asarray(probs, dtype=np.float64)
    b0, b1, b2 = (int(b) for b in box)
    cur = np.zeros((b0, b1, b2))
    cur[0, 0, 0] = 1.0
    for _ in range(int(n)):
        nxt = np.zeros_like(cur)
        for (s0, s1, s2), p in zip(shifts, probs):
            if s0 >= b0 or s1 >= b1 or s2 >= b2:
                continue
            nxt[s0:, s1:, s2:] += p * cur[: b0 - s0, : b1 - s1, : b2 - s2]
        cur = nxt
    return cur


def ml_error_masses(lik, tie_rtol, chunk=1 << 14):
    """Exhaustive ML decoding over every output sequence.

    ``lik[m1, m2, i, y]`` is W(y | x1_i(m1), x2_i(m2)). Returns the error mass and
    the total mass per message pair; ties go to the lexicographically first pair.
    """
    lik = np.asarray(lik, dtype=np.float64)
    m1, m2, n, ysz = lik.shape
    pairs = m1 * m2
    flat = lik.reshape(pairs, n, ysz)
    err = np.zeros(pairs)
    total = np.zeros(pairs)
    count = ysz**n
    radix = ysz ** np.arange(n - 1, -1, -1, dtype=np.int64)
    for start in range(0, count, chunk):
        idx = np.arange(start, min(start + chunk, count), dtype=np.int64)
        ys = (idx[:, None] // radix[None, :]) % ysz  # first symbol most significant
        like = np.ones((idx.size, pairs))
        for i in range(n):
            like *= flat[:, i, :][:, ys[:, i]].T
        best_val = like.max(axis=1)
        winners = np.argmax(like >= best_val[:, None] * (1.0 - tie_rtol), axis=1)
        wrong = np.ones_like(like, dtype=bool)
        wrong[np.arange(idx.size), winners] = False
        total += like.sum(axis=0)
        err += np.where(wrong, like, 0.0).sum(axis=0)
    return err.reshape(m1, m2), total.reshape(m1, m2)
