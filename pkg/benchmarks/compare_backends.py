"""Timing comparison of the compiled and numpy stride kernels.

Runs the same single-qubit sweep through every backend and execution mode
and prints a table of median per-gate times. Reports only; nothing here
asserts, the correctness tests live under tests/.

    python3 benchmarks/compare_backends.py --qubits 16 20 22 --repeat 9
"""

import argparse
import statistics
import time

import numpy as np

from svsim import ExecStrategy, StateVector, apply_single, available_backends, standard_gate

MODES = ("sequential", "parallel_outer", "parallel_inner", "parallel_collapsed")


def _strategy(mode: str, workers: int) -> ExecStrategy:
    if mode == "sequential":
        return ExecStrategy("sequential", 1)
    return ExecStrategy(mode, workers)


def _median_gate_time(n, target, backend, strat, repeat):
    rng = np.random.default_rng(7)
    amps = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    amps = (amps / np.linalg.norm(amps)).astype(np.complex128)
    s = StateVector(n, amps)
    h = standard_gate("h")
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        apply_single(s, h, target, strat=strat, backend=backend)
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--qubits", type=int, nargs="+", default=[14, 16, 18])
    ap.add_argument("--workers", type=int, default=4)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    backends = available_backends()
    print(f"backends: {', '.join(backends)}   workers: {args.workers}   "
          f"repeat: {args.repeat} (median)")
    if "compiled" not in backends:
        print("note: compiled kernel not built, numpy fallback only")
    print()

    header = f"{'n':>3} {'target':>6} {'backend':>9}" + "".join(
        f" {m:>19}" for m in MODES
    )
    print(header)
    print("-" * len(header))
    for n in args.qubits:
        for target in (0, n - 1):
            for backend in backends:
                row = f"{n:>3} {target:>6} {backend:>9}"
                for mode in MODES:
                    t = _median_gate_time(
                        n, target, backend, _strategy(mode, args.workers), args.repeat
                    )
                    row += f" {t * 1e3:>16.3f} ms"
                print(row)
        print()

    # headline single number: sequential compiled vs numpy at the largest size
    if len(backends) == 2:
        n = max(args.qubits)
        seq = ExecStrategy("sequential", 1)
        t_py = _median_gate_time(n, 0, "python", seq, args.repeat)
        t_cy = _median_gate_time(n, 0, "compiled", seq, args.repeat)
        print(f"sequential speedup at n={n}: {t_py / t_cy:.2f}x "
              f"(numpy {t_py * 1e3:.3f} ms, compiled {t_cy * 1e3:.3f} ms)")


if __name__ == "__main__":
    main()
