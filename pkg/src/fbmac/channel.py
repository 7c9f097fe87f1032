"""Two-user discrete memoryless MACs, input distributions and induced output laws."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

INPUT_TOL = 1e-9
INTERNAL_TOL = 1e-12


class ChannelError(ValueError):
    """Invalid channel description or mismatched input distribution."""


def _as_prob_vector(p, name: str) -> np.ndarray:
    arr = np.array(p, dtype=np.float64).reshape(-1)
    if arr.size == 0:
        raise ChannelError(f"{name} is empty")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise ChannelError(f"{name} has negative or non-finite entries")
    if abs(arr.sum() - 1.0) > INTERNAL_TOL:
        raise ChannelError(f"{name} sums to {arr.sum()!r}, not 1")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class DmMac:
    """Kernel ``w[x1, x2, y] = W(y | x1, x2)``.

    Construct through :func:`parse_channel` or :meth:`from_array`; the
    constructor itself expects an already validated array.
    """

    w: np.ndarray

    @classmethod
    def from_array(cls, w, tol: float = INPUT_TOL) -> "DmMac":
        arr = np.array(w, dtype=np.float64)
        if arr.ndim != 3 or 0 in arr.shape:
            raise ChannelError(f"kernel must be a non-empty 3-index table, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ChannelError("kernel has non-finite entries")
        neg = np.argwhere(arr < 0)
        if neg.size:
            x1, x2, y = neg[0]
            raise ChannelError(f"negative entry w[{x1}][{x2}][{y}] = {arr[x1, x2, y]!r}")
        if np.any(arr > 1):
            raise ChannelError("kernel entries must lie in [0, 1]")
        sums = arr.sum(axis=2)
        bad = np.argwhere(np.abs(sums - 1.0) > tol)
        if bad.size:
            x1, x2 = bad[0]
            raise ChannelError(
                f"row (x1={x1}, x2={x2}) sums to {sums[x1, x2]!r}, deviation exceeds {tol:g}"
            )
        # rounded decimals in files are accepted up to `tol`, then renormalized
        arr = arr / sums[:, :, None]
        arr.setflags(write=False)
        return cls(arr)

    @property
    def x1_size(self) -> int:
        return self.w.shape[0]

    @property
    def x2_size(self) -> int:
        return self.w.shape[1]

    @property
    def y_size(self) -> int:
        return self.w.shape[2]

    def swapped(self) -> "DmMac":
        """The same channel with the roles of the two senders exchanged."""
        w = np.ascontiguousarray(self.w.transpose(1, 0, 2))
        w.setflags(write=False)
        return DmMac(w)

    def to_dict(self) -> dict:
        return {
            "x1_size": self.x1_size,
            "x2_size": self.x2_size,
            "y_size": self.y_size,
            "w": self.w.tolist(),
        }


@dataclass(frozen=True, eq=False)
class InputPair:
    p1: np.ndarray
    p2: np.ndarray

    def __init__(self, p1, p2):
        object.__setattr__(self, "p1", _as_prob_vector(p1, "p1"))
        object.__setattr__(self, "p2", _as_prob_vector(p2, "p2"))

    @classmethod
    def uniform(cls, channel: DmMac) -> "InputPair":
        return cls(
            np.full(channel.x1_size, 1.0 / channel.x1_size),
            np.full(channel.x2_size, 1.0 / channel.x2_size),
        )

    def check(self, channel: DmMac) -> None:
        if self.p1.size != channel.x1_size or self.p2.size != channel.x2_size:
            raise ChannelError(
                f"input sizes ({self.p1.size}, {self.p2.size}) do not match channel "
                f"alphabets ({channel.x1_size}, {channel.x2_size})"
            )


@dataclass(frozen=True, eq=False)
class TimeSharedInput:
    """Mixture over a time-sharing variable U with at most three values."""

    weights: np.ndarray
    components: tuple

    def __init__(self, weights, components: Sequence[InputPair]):
        wts = _as_prob_vector(weights, "weights")
        comps = tuple(components)
        if len(comps) != wts.size:
            raise ChannelError(f"{wts.size} weights but {len(comps)} components")
        if wts.size > 3:
            raise ChannelError("time-sharing alphabet is limited to 3 values")
        object.__setattr__(self, "weights", wts)
        object.__setattr__(self, "components", comps)

    def check(self, channel: DmMac) -> None:
        for comp in self.components:
            comp.check(channel)


@dataclass(frozen=True, eq=False)
class InducedLaws:
    p_y_given_x2: np.ndarray  # [x2, y]
    p_y_given_x1: np.ndarray  # [x1, y]
    p_y: np.ndarray
    joint: np.ndarray  # [x1, x2, y]


def parse_channel(text: str) -> DmMac:
    """Parse the JSON channel format: ``x1_size``, ``x2_size``, ``y_size`` and ``w[x1][x2][y]``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ChannelError(f"malformed channel file: {exc}") from None
    if not isinstance(doc, dict):
        raise ChannelError("channel file must hold an object")
    missing = [k for k in ("x1_size", "x2_size", "y_size", "w") if k not in doc]
    if missing:
        raise ChannelError(f"channel file lacks fields: {', '.join(missing)}")
    sizes = []
    for key in ("x1_size", "x2_size", "y_size"):
        val = doc[key]
        if not isinstance(val, int) or isinstance(val, bool) or val < 1:
            raise ChannelError(f"{key} must be a positive integer, got {val!r}")
        sizes.append(val)
    try:
        w = np.array(doc["w"], dtype=np.float64)
    except (TypeError, ValueError):
        raise ChannelError("w must be a rectangular nested array of numbers") from None
    if w.shape != tuple(sizes):
        raise ChannelError(f"w has shape {w.shape}, declared sizes are {tuple(sizes)}")
    return DmMac.from_array(w)


def load_channel(path) -> DmMac:
    return parse_channel(Path(path).read_text())


def induced_laws(channel: DmMac, inputs: InputPair) -> InducedLaws:
    inputs.check(channel)
    w = channel.w
    p1, p2 = inputs.p1, inputs.p2
    p_y_given_x2 = np.einsum("a,aby->by", p1, w)
    p_y_given_x1 = np.einsum("b,aby->ay", p2, w)
    p_y = p2 @ p_y_given_x2
    joint = p1[:, None, None] * p2[None, :, None] * w
    return InducedLaws(p_y_given_x2, p_y_given_x1, p_y, joint)


def simplex_grid(size: int, resolution: int) -> np.ndarray:
    """All probability vectors of length `size` whose entries are multiples of 1/resolution.

    Rows are in lexicographic order of the integer counts, largest first
    coordinate first, so grids at resolution r embed in grids at 2r.
    """
    if resolution < 1:
        raise ValueError("resolution must be positive")
    rows: list[list[int]] = []

    def rec(prefix: list[int], remaining: int, slots: int) -> None:
        if slots == 1:
            rows.append(prefix + [remaining])
            return
        for first in range(remaining, -1, -1):
            rec(prefix + [first], remaining - first, slots - 1)

    rec([], resolution, size)
    return np.array(rows, dtype=np.float64) / resolution


# small builders used by tests, the CLI and the docs


def adder_mac() -> DmMac:
    """Binary adder MAC, Y = X1 + X2 over the integers."""
    w = np.zeros((2, 2, 3))
    for a in range(2):
        for b in range(2):
            w[a, b, a + b] = 1.0
    return DmMac.from_array(w)


def parallel_mac(w1, w2) -> DmMac:
    """Y = (Y1, Y2) with X1 -> Y1 through `w1` and X2 -> Y2 through `w2`, independently."""
    w1 = np.asarray(w1, dtype=np.float64)
    w2 = np.asarray(w2, dtype=np.float64)
    w = np.einsum("ay,bz->abyz", w1, w2).reshape(w1.shape[0], w2.shape[0], -1)
    return DmMac.from_array(w)
