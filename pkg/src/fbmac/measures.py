"""Per-letter information densities of a MAC and their moments.

Three densities are tracked for every atom (x1, x2, y, u) of the joint law:

    d1  = ln W(y|x1,x2) / P(y|x2,u)
    d2  = ln W(y|x1,x2) / P(y|x1,u)
    d12 = ln W(y|x1,x2) / P(y|u)

All quantities are in nats.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import DmMac, InputPair, TimeSharedInput, induced_laws
from .tails import AtomicDistribution

WHICH = ("d1", "d2", "d12")


@dataclass(frozen=True, eq=False)
class DensityTable:
    """Atoms with positive probability, stored column-wise."""

    x1: np.ndarray
    x2: np.ndarray
    y: np.ndarray
    u: np.ndarray
    prob: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    d12: np.ndarray

    def __len__(self) -> int:
        return self.prob.size

    def density(self, which: str) -> np.ndarray:
        if which not in WHICH:
            raise ValueError(f"unknown density {which!r}; expected one of {WHICH}")
        return getattr(self, which)

    def per_letter(self, which: str) -> AtomicDistribution:
        """Law of one density with equal values merged, ready for the tail engine."""
        return AtomicDistribution(self.density(which), self.prob)

    def records(self):
        for i in range(len(self)):
            yield (
                int(self.x1[i]), int(self.x2[i]), int(self.y[i]), int(self.u[i]),
                float(self.prob[i]), float(self.d1[i]), float(self.d2[i]), float(self.d12[i]),
            )


@dataclass(frozen=True)
class Moments:
    mean: float
    variance: float
    third_abs_central: float


def _component_atoms(channel: DmMac, inputs: InputPair, weight: float, u: int):
    laws = induced_laws(channel, inputs)
    prob = weight * laws.joint
    x1, x2, y = np.nonzero(prob > 0)
    w = channel.w[x1, x2, y]
    lw = np.log(w)
    d1 = lw - np.log(laws.p_y_given_x2[x2, y])
    d2 = lw - np.log(laws.p_y_given_x1[x1, y])
    d12 = lw - np.log(laws.p_y[y])
    return x1, x2, y, np.full(x1.size, u), prob[x1, x2, y], d1, d2, d12


def _table(parts) -> DensityTable:
    cols = [np.concatenate(c) for c in zip(*parts)]
    for c in cols:
        c.setflags(write=False)
    return DensityTable(*cols)


def density_table(channel: DmMac, inputs: InputPair) -> DensityTable:
    return _table([_component_atoms(channel, inputs, 1.0, 0)])


def time_shared_density_table(channel: DmMac, ts: TimeSharedInput) -> DensityTable:
    """Densities under a time-shared input, each conditioned on its own U value."""
    ts.check(channel)
    parts = [
        _component_atoms(channel, comp, float(wt), u)
        for u, (wt, comp) in enumerate(zip(ts.weights, ts.components))
        if wt > 0
    ]
    return _table(parts)


def table_for(channel: DmMac, inputs) -> DensityTable:
    if isinstance(inputs, TimeSharedInput):
        return time_shared_density_table(channel, inputs)
    return density_table(channel, inputs)


def moments(table: DensityTable, which: str) -> Moments:
    d = table.density(which)
    p = table.prob
    mean = math.fsum(p * d)
    dev = d - mean
    var = math.fsum(p * dev * dev)
    third = math.fsum(p * np.abs(dev) ** 3)
    return Moments(mean, var, third)


def all_moments(table: DensityTable) -> dict[str, Moments]:
    return {w: moments(table, w) for w in WHICH}
