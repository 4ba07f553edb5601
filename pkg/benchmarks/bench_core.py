"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_core.py [--repeat 3]
"""
import argparse
import timeit

import numpy as np

from casimir_restrict import _core_py

try:
    from casimir_restrict import _core
except ImportError:  # extension not built
    _core = None


def cases():
    rng = np.random.default_rng(0)
    modes = np.arange(-2048, 2048, 2, dtype=float)
    coeffs = rng.normal(size=modes.size) + 1j * rng.normal(size=modes.size)
    xs = np.linspace(0, np.pi, 512)
    r, w = np.polynomial.legendre.leggauss(20)
    edges = 0.5 * 0.7 ** np.arange(80)[::-1]
    lo, hi = edges[:-1, None], edges[1:, None]
    ref_r = ((lo + hi) / 2 + (hi - lo) / 2 * r).ravel()
    ref_w = ((hi - lo) / 2 * w).ravel()
    lengths = np.linspace(0.05, np.pi - 0.05, 64)
    e = complex(-0.5, 3.0)
    return {
        "trig_series 2048 modes x 512 pts": lambda m: m.trig_series(modes, coeffs, xs),
        "legendre_column m=0..400 at x=0": lambda m: [m.legendre_column(k, 400, 0.0) for k in range(401)],
        "arc_integrals 64 arcs x 1580 nodes": lambda m: m.arc_integrals(lengths, ref_r, ref_w, e, e.conjugate(), 1e-9),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"{'kernel':40s} {'python [s]':>12s} {'compiled [s]':>13s} {'speedup':>8s}")
    for name, fn in cases().items():
        t_py = min(timeit.repeat(lambda: fn(_core_py), number=1, repeat=args.repeat))
        if _core is None:
            print(f"{name:40s} {t_py:12.4f} {'n/a':>13s}")
            continue
        t_c = min(timeit.repeat(lambda: fn(_core), number=1, repeat=args.repeat))
        print(f"{name:40s} {t_py:12.4f} {t_c:13.4f} {t_py / t_c:8.1f}x")


if __name__ == "__main__":
    main()
