"""Compiled vs pure-Python kernel timings.

    python benchmarks/bench_kernels.py [--repeat N]

Prints one line per kernel with the best-of-N wall time of each backend
and the speed-up.  Backends missing from the install are skipped.
"""

import argparse
import math
import timeit

import numpy as np

from lgbec import kernels


def cases():
    rng = np.random.default_rng(0)
    psi, w = rng.standard_normal((2, 256, 512))
    kr = rng.standard_normal((256, 7))
    kz = rng.standard_normal((512, 7))
    out = np.empty_like(psi)
    z = rng.uniform(0, 0.49, 4096)
    phi = 0.82
    lg = math.log1p(-phi)
    return {
        "bose_head(s=2.5, m=31)": lambda k: k.bose_head(2.5, 0.9, 31),
        "bose_direct(z=0.45)": lambda k: k.bose_direct(1.5, 0.45, 1e-17, 10_000),
        "bose_direct_array(4096)": lambda k: k.bose_direct_array(1.5, z, 1e-17, 10_000),
        "growth_series(x=0.999)": lambda k: k.growth_series(lg, phi, 0.999, 1e-12, 10**6),
        "growth_series_fixed(1e4)": lambda k: k.growth_series_fixed(lg, phi, 0.999, 10_000),
        "apply_hamiltonian(256x512)": lambda k: k.apply_hamiltonian(psi, w, kr, kz, out),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = kernels.backends()
    print(f"backends: {', '.join(sorted(backends))}")
    print(f"{'kernel':28s} {'python':>12s} {'cython':>12s} {'speed-up':>9s}")
    for name, fn in cases().items():
        times = {}
        for b, mod in backends.items():
            number = 1 if b == "python" and "array" in name else 3
            times[b] = min(timeit.repeat(lambda: fn(mod), number=number, repeat=args.repeat)) / number
        py = times["python"]
        cy = times.get("cython", math.nan)
        print(f"{name:28s} {py * 1e6:10.1f}us {cy * 1e6:10.1f}us {py / cy:8.1f}x")


if __name__ == "__main__":
    main()
