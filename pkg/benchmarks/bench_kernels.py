"""Compare the compiled and pure-NumPy amplitude kernels.

Times the three kernel primitives plus a full Fourier-transform gate
network at several register sizes, once per backend, and prints the
speedup.  The high-level timings swap the backend the simulator
dispatches through, so they measure exactly what users get.

Usage:
    python3 benchmarks/bench_kernels.py [--sizes 10,14,18] [--repeats 5]
"""

import argparse
import math
import time

import numpy as np

from qscatter import _kernels
from qscatter.statevector import iqft, qft, random_state

INV_SQRT2 = 1.0 / math.sqrt(2.0)


def best_time(fn, repeats):
    """Best wall-clock time of ``fn`` over ``repeats`` runs (one warmup)."""
    fn()
    best = math.inf
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_primitives(backend, n, amps, repeats):
    """Per-call times for the raw kernel contract at register size n."""

    def hadamard_sweep():
        for target in range(1, n + 1):
            backend.apply_1q(amps, n, target,
                             INV_SQRT2, INV_SQRT2, INV_SQRT2, -INV_SQRT2)

    def controlled_ladder():
        for target in range(2, n + 1):
            cmask = 1 << (n - 1)
            phase = complex(math.cos(0.3 * target), math.sin(0.3 * target))
            backend.apply_ctrl_1q(amps, n, target, cmask, cmask,
                                  1.0, 0.0, 0.0, phase)

    def swap_all():
        for q1 in range(1, n // 2 + 1):
            backend.swap_pair(amps, n, q1, n + 1 - q1)

    return {
        "apply_1q": best_time(hadamard_sweep, repeats) / n,
        "apply_ctrl_1q": best_time(controlled_ladder, repeats) / (n - 1),
        "swap_pair": best_time(swap_all, repeats) / (n // 2),
    }


def bench_qft(backend, n, repeats):
    """Round-trip Fourier network through the public simulator path."""
    state = random_state(n, seed=3)
    saved = _kernels.active
    _kernels.active = backend
    try:
        def round_trip():
            qft(state)
            iqft(state)

        gates = 2 * (n * (n + 1) // 2 + n // 2)
        return best_time(round_trip, repeats) / gates
    finally:
        _kernels.active = saved


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="10,14,18",
                        help="comma-separated register sizes (default 10,14,18)")
    parser.add_argument("--repeats", type=int, default=5,
                        help="timing repeats, best is kept (default 5)")
    args = parser.parse_args()
    sizes = [int(tok) for tok in args.sizes.split(",") if tok.strip()]

    names = _kernels.available_backends()
    print(f"backends: {', '.join(names)} (auto picks {_kernels.backend_name()})")
    if "compiled" not in names:
        print("extension not built; showing the python backend alone")

    header = (f"{'n':>3} {'kernel':>14} " +
              " ".join(f"{name:>12}" for name in names) +
              ("  speedup" if len(names) > 1 else ""))
    print(header)
    print("-" * len(header))
    for n in sizes:
        rows = {}
        for name in names:
            backend = _kernels.get_backend(name)
            amps = random_state(n, seed=1).amps
            rows[name] = bench_primitives(backend, n, amps, args.repeats)
            rows[name]["qft round trip"] = bench_qft(backend, n, args.repeats)
        for kernel in ("apply_1q", "apply_ctrl_1q", "swap_pair",
                       "qft round trip"):
            cells = " ".join(f"{rows[name][kernel] * 1e6:>10.2f}us"
                             for name in names)
            line = f"{n:>3} {kernel:>14} {cells}"
            if len(names) > 1:
                ratio = rows["python"][kernel] / rows["compiled"][kernel]
                line += f"  {ratio:>6.2f}x"
            print(line)
    print("\ntimes are per gate application; 2**n complex amplitudes")


if __name__ == "__main__":
    main()
