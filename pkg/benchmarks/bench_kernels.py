"""Benchmark the compiled kernels against the pure-numpy fallback.

Usage:
    python benchmarks/bench_kernels.py [--repeats N]

Reports best-of-N wall time per kernel and the speedup ratio. The two
backends compute identical outputs (asserted here on every input), so the
table is purely about speed.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from vesselkit._kernels import pure
from vesselkit.phantoms import random_blob_mask, synthetic_angiogram

try:
    from vesselkit._kernels import _cykernels as compiled
except ImportError:
    compiled = None


def best_of(repeats: int, fn, *args) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    if compiled is None:
        raise SystemExit("compiled extension not built; nothing to compare")

    vessel = synthetic_angiogram(seed=3).vessel_mask.pixels
    blob = random_blob_mask(seed=1, width=256, height=256).pixels
    rng = np.random.default_rng(0)
    noise = rng.random((512, 512)) < 0.5

    cases = [
        ("edt 386x448 vessel", "edt", vessel),
        ("edt 512x512 noise", "edt", noise),
        ("thin 386x448 vessel", "thin", vessel.astype(np.uint8)),
        ("thin 256x256 blob", "thin", blob.astype(np.uint8)),
        ("label 512x512 noise", "label", noise),
    ]

    print(f"{'case':<24} {'pure':>10} {'compiled':>10} {'speedup':>8}")
    print("-" * 56)
    for name, kernel, arg in cases:
        pure_fn = getattr(pure, kernel)
        comp_fn = getattr(compiled, kernel)
        if kernel == "label":
            assert np.array_equal(pure_fn(arg)[0], comp_fn(arg)[0])
        else:
            assert np.array_equal(pure_fn(arg), comp_fn(arg))
        t_pure = best_of(args.repeats, pure_fn, arg)
        t_comp = best_of(args.repeats, comp_fn, arg)
        print(
            f"{name:<24} {t_pure * 1e3:>8.2f}ms {t_comp * 1e3:>8.2f}ms "
            f"{t_pure / t_comp:>7.1f}x"
        )


if __name__ == "__main__":
    main()
