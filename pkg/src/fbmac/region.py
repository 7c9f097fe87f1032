"""Support-function sweeps of outer regions and of the first-order capacity region.

For a direction lam in [0, 1] the sweep maximizes lam R1 + (1 - lam) R2 over
the union of the pentagons induced by every candidate input distribution. The
candidates are product inputs on a simplex grid and, when more than one
time-sharing value is allowed, mixtures of the best grid candidates.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .bounds import BoundTriple, Pentagon, bound_triple, pentagon_support
from .channel import DmMac, InputPair, TimeSharedInput, simplex_grid
from .measures import density_table, moments


@dataclass(frozen=True, eq=False)
class RegionPoint:
    lam: float
    r1: float
    r2: float
    value: float
    pentagon: Pentagon
    source: int
    inputs: object
    bound: BoundTriple | None = None


@dataclass(eq=False)
class RegionBoundary:
    points: list
    metadata: dict = field(default_factory=dict)

    def values(self) -> np.ndarray:
        return np.array([p.value for p in self.points])

    def lambdas(self) -> np.ndarray:
        return np.array([p.lam for p in self.points])


def lambda_grid(count: int) -> np.ndarray:
    if count < 3:
        raise ValueError("lambda_count must be at least 3")
    return np.linspace(0.0, 1.0, count)


def grid_inputs(channel: DmMac, resolution: int) -> list:
    if resolution < 2:
        raise ValueError("grid_resolution must be at least 2")
    g1 = simplex_grid(channel.x1_size, resolution)
    g2 = simplex_grid(channel.x2_size, resolution)
    return [InputPair(a, b) for a in g1 for b in g2]


def _sweep(pentagons: list, sources: list, inputs: list, bounds: list, lams: np.ndarray) -> list:
    sides = np.array([[p.a, p.b, p.c] for p in pentagons])
    a, b, c = sides[:, 0], sides[:, 1], sides[:, 2]
    # same corner arithmetic as pentagon_support, vectorized over candidates
    r1a = np.minimum(a, c)
    r2a = np.minimum(b, c - r1a)
    r2b = np.minimum(b, c)
    r1b = np.minimum(a, c - r2b)
    points = []
    for lam in lams:
        lam = float(lam)
        va = lam * r1a + (1.0 - lam) * r2a
        vb = lam * r1b + (1.0 - lam) * r2b
        vals = np.maximum(va, vb)
        # argmax returns the first maximizer: lowest candidate index wins ties
        i = int(np.argmax(vals))
        val, r1, r2 = pentagon_support(pentagons[i], lam)
        points.append(
            RegionPoint(lam, r1, r2, val, pentagons[i], sources[i], inputs[i], bounds[i])
        )
    return points


def _lipschitz_padding(resolution: int, channel: DmMac, pentagons: list) -> tuple[float, float, float]:
    """Largest change of each pentagon side between neighbouring grid points.

    A neighbour moves 1/resolution of mass between two letters of one sender,
    so this is a finite-difference Lipschitz constant times the grid step.
    """
    g1 = np.rint(simplex_grid(channel.x1_size, resolution) * resolution).astype(int)
    g2 = np.rint(simplex_grid(channel.x2_size, resolution) * resolution).astype(int)
    n2 = len(g2)
    pos1 = {tuple(r): i for i, r in enumerate(g1)}
    pos2 = {tuple(r): i for i, r in enumerate(g2)}
    sides = np.array([[p.a, p.b, p.c] for p in pentagons])
    pad = np.zeros(3)

    def moves(counts, pos):
        for i, j in itertools.permutations(range(len(counts)), 2):
            if counts[i] > 0:
                nb = list(counts)
                nb[i] -= 1
                nb[j] += 1
                yield pos[tuple(nb)]

    for i1, c1 in enumerate(g1):
        for i2, c2 in enumerate(g2):
            here = sides[i1 * n2 + i2]
            for j1 in moves(c1, pos1):
                pad = np.maximum(pad, np.abs(sides[j1 * n2 + i2] - here))
            for j2 in moves(c2, pos2):
                pad = np.maximum(pad, np.abs(sides[i1 * n2 + j2] - here))
    return tuple(float(x) for x in pad)


def _weight_grid(parts: int, resolution: int) -> list:
    grid = simplex_grid(parts, resolution)
    return [w for w in grid if np.all(w > 0)]


def outer_region(
    channel: DmMac,
    n: int,
    eps: float,
    grid_resolution: int = 32,
    lambda_count: int = 101,
    mode: str = "explicit-exact",
    u_cardinality: int = 1,
    *,
    pad: bool = False,
    weight_resolution: int = 4,
    **bound_kwargs,
) -> RegionBoundary:
    """Outer region at blocklength n and error eps, traced by its support function.

    Each candidate contributes the pentagon (b1, b2, b12) / n. Explicit modes
    clip infeasible beta values (any feasible beta keeps the chain valid), so
    grid points with tiny dispersion still yield a finite bound.
    """
    if u_cardinality not in (1, 2, 3):
        raise ValueError("u_cardinality must be 1, 2 or 3")
    lams = lambda_grid(lambda_count)
    if mode.startswith("explicit"):
        bound_kwargs.setdefault("beta_policy", "clip")

    def evaluate(inp):
        triple = bound_triple(channel, inp, n, eps, mode, **bound_kwargs)
        return triple, Pentagon.from_triple(triple, n)

    inputs = grid_inputs(channel, grid_resolution)
    bounds, pentagons = [], []
    for inp in inputs:
        t, p = evaluate(inp)
        bounds.append(t)
        pentagons.append(p)

    padding = (0.0, 0.0, 0.0)
    if pad:
        padding = _lipschitz_padding(grid_resolution, channel, pentagons)
        pentagons = [p.padded(*padding) for p in pentagons]

    sources = list(range(len(inputs)))
    points = _sweep(pentagons, sources, inputs, bounds, lams)

    if u_cardinality > 1:
        pool = sorted(
            {pt.source for pt in points}
            | {int(np.argmax([getattr(b, attr) for b in bounds])) for attr in ("b1", "b2", "b12")}
        )
        for size in range(2, u_cardinality + 1):
            weights = _weight_grid(size, weight_resolution)
            for combo in itertools.combinations(pool, size):
                for wts in weights:
                    ts = TimeSharedInput(wts, [inputs[i] for i in combo])
                    t, p = evaluate(ts)
                    inputs.append(ts)
                    bounds.append(t)
                    pentagons.append(p.padded(*padding) if pad else p)
                    sources.append(len(sources))
        points = _sweep(pentagons, sources, inputs, bounds, lams)

    meta = {
        "n": n,
        "eps": eps,
        "mode": mode,
        "label": "approximation" if mode == "normal" else "bound",
        "grid_resolution": grid_resolution,
        "lambda_count": lambda_count,
        "u_cardinality": u_cardinality,
        "candidates": len(pentagons),
        "padding": list(padding),
    }
    return RegionBoundary(points, meta)


def capacity_region(channel: DmMac, grid_resolution: int = 32, lambda_count: int = 101) -> RegionBoundary:
    """First-order region: pentagons (I1, I2, I12) over the product-input grid.

    Time sharing needs no extra search here: the support function of the convex
    hull of a union is the maximum of the individual support functions.
    """
    lams = lambda_grid(lambda_count)
    inputs = grid_inputs(channel, grid_resolution)
    pentagons = []
    for inp in inputs:
        table = density_table(channel, inp)
        pentagons.append(Pentagon(*(moments(table, w).mean for w in ("d1", "d2", "d12"))))
    points = _sweep(pentagons, list(range(len(inputs))), inputs, [None] * len(inputs), lams)
    meta = {
        "mode": "first_order",
        "grid_resolution": grid_resolution,
        "lambda_count": lambda_count,
        "candidates": len(pentagons),
    }
    return RegionBoundary(points, meta)
