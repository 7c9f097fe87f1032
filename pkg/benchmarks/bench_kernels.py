"""Time the compiled kernels against the numpy fallback on representative inputs.

    python benchmarks/bench_kernels.py [--repeat 5]

Each kernel runs on both backends; outputs are compared before timing so a
speedup never hides a wrong answer.
"""
import argparse
import time
from pathlib import Path

import numpy as np

from fbmac import InputPair, load_channel
from fbmac.kernels import backends
from fbmac.simulate import TIE_RTOL, _likelihood_table, random_codebook

CHANNELS = Path(__file__).resolve().parents[1] / "channels"


def cases():
    rng = np.random.default_rng(0)
    vals = np.sort(rng.normal(size=6))
    logp = np.log(rng.dirichlet(np.ones(6)))
    yield "composition_sums k=6 n=40", "composition_sums", (vals, logp, 40)

    m = 200_000
    v = np.sort(np.round(rng.normal(size=m), 5))
    p = rng.dirichlet(np.ones(m))
    yield "merge_sorted 2e5 atoms", "merge_sorted", (v, p, 1e-12)

    shifts = np.array([0, 3, 17, 40])
    probs = np.array([0.1, 0.2, 0.3, 0.4])
    yield "lattice_power 4 atoms n=400", "lattice_power", (shifts, probs, 400)

    s3 = rng.integers(0, 6, size=(8, 3))
    p3 = rng.dirichlet(np.ones(8))
    yield "lattice_power_3d box 60^3 n=40", "lattice_power_3d", (s3, p3, 40, (60, 60, 60))

    ch = load_channel(CHANNELS / "noisy_identity.json")
    code = random_codebook(ch, InputPair.uniform(ch), 4, 4, 7, seed=1)
    yield "ml_error_masses |Y|=4 n=7 M=4x4", "ml_error_masses", (_likelihood_table(ch, code), TIE_RTOL)


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return np.allclose(a, b, rtol=1e-12, atol=1e-14)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    impls = backends()
    if "cython" not in impls:
        print("compiled extension not built; only the fallback is available")
    print(f"{'kernel':34s} " + " ".join(f"{name:>10s}" for name in impls) + "   speedup")
    for label, fn, fargs in cases():
        ref = None
        times = {}
        for name, mod in impls.items():
            out = getattr(mod, fn)(*fargs)
            if ref is None:
                ref = out
            elif not _same(ref, out):
                raise SystemExit(f"{label}: backends disagree")
            best = float("inf")
            for _ in range(args.repeat):
                t0 = time.perf_counter()
                getattr(mod, fn)(*fargs)
                best = min(best, time.perf_counter() - t0)
            times[name] = best
        speed = times["python"] / times["cython"] if "cython" in times else float("nan")
        print(f"{label:34s} " + " ".join(f"{t * 1e3:9.2f}ms" for t in times.values()) + f"   {speed:7.1f}x")


if __name__ == "__main__":
    main()
