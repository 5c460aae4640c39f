"""Compare the compiled and numpy integrator backends on the hub example.

    python3 benchmarks/bench_abm.py [--t-end 300] [--h 0.01] [--repeat 3]
"""

import argparse
import time

import numpy as np

from fraccvnn import catalog, fde


def best_time(backend: str, cfg: fde.SimConfig, form: str, repeat: int) -> tuple[float, np.ndarray]:
    spec = catalog.ex_hub()
    z0 = 0.1 * (1 + 1j) * np.ones(spec.n)
    best, states = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        states = fde.abm_simulate(spec, z0, cfg, form=form, backend=backend).states
        best = min(best, time.perf_counter() - t0)
    return best, states


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--t-end", type=float, default=300.0)
    ap.add_argument("--h", type=float, default=0.01)
    ap.add_argument("--q", type=float, default=0.87)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    cfg = fde.SimConfig(args.q, args.h, args.t_end)
    print(f"ex.hub, q={cfg.q}, N={cfg.steps} steps, best of {args.repeat}")
    ref = None
    for form in ("complex", "split"):
        for backend in sorted(fde.KERNELS):
            dt, states = best_time(backend, cfg, form, args.repeat)
            ref = states if ref is None else ref
            gap = float(np.max(np.abs(states - ref)))
            print(f"  {form:8s} {backend:7s} {dt:8.3f} s   max |diff| vs first run {gap:.2e}")
    if "cython" not in fde.KERNELS:
        print("  (compiled extension not built; only the numpy backend ran)")


if __name__ == "__main__":
    main()
