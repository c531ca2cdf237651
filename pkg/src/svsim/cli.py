"""Command-line driver.

Subcommands:

    run      simulate a circuit file, write final amplitudes + per-gate stats
    verify   run engine and dense reference side by side, report max deviation
    mem      per-rank memory table for a (qubits, ranks, scheme) configuration
    pairs    rank pairing for a gate on one qubit
    bench    apply one gate to every qubit repeatedly, time it, emit stats CSV
    layout   show the gate histogram and the chosen qubit relabeling

Exit codes: 0 success; 1 verify deviation above tolerance; 2 parse or
validation error (parse errors carry the offending line number); 3 capacity.
"""

from __future__ import annotations

import argparse
import sys
from statistics import median

import numpy as np

from .circuit_io import _fmt_real, parse_circuit_file
from .core import Circuit, GateOp, standard_gate
from .engine import GateStats, gather, run_circuit
from .errors import CapacityError, ContractViolation, ParseError, ValidationError
from .layout import gate_histogram, identity_perm, optimize_layout, permute_state
from .oracle import oracle_run
from .partition import (
    SCHEME_A,
    SCHEME_B,
    CommScheme,
    PartitionPlan,
    chunked,
    comm_pairs,
    comm_ratio,
    mem_estimate,
    needs_comm,
)

STATS_HEADER = (
    "gate_index,qubit,control,comm_required,messages_per_rank,bytes_per_rank,"
    "wall_time_s"
)

VERIFY_TOL = 1e-10
FULL_DUMP_MAX_QUBITS = 20
# in-process allocation guard for run/bench; all simulated ranks live in
# this one process, so the budget covers their combined slabs and buffers
DEFAULT_MEM_LIMIT = 2**33
# hypothetical node size for the mem table
DEFAULT_NODE_BYTES = 2**37


def _ranks_to_k(ranks: int) -> int:
    if ranks < 1 or ranks & (ranks - 1):
        raise ValidationError(f"rank count must be a power of two, got {ranks}")
    return ranks.bit_length() - 1


def _parse_scheme(text: str, allow_none: bool = False) -> CommScheme | None:
    t = text.strip().lower()
    if t == "none":
        if allow_none:
            return None
        raise ValidationError("a concrete scheme is required (a, b, or chunked:m)")
    if t == "a":
        return SCHEME_A
    if t == "b":
        return SCHEME_B
    if t.startswith("chunked:"):
        try:
            m = int(t.split(":", 1)[1], 10)
        except ValueError:
            raise ValidationError(f"bad chunk size in scheme {text!r}") from None
        return chunked(m)
    raise ValidationError(f"unknown scheme {text!r} (expected a, b, or chunked:m)")


def _scheme_name(scheme: CommScheme | None) -> str:
    if scheme is None:
        return "none"
    if scheme.kind == "chunked":
        return f"chunked:{scheme.m}"
    return scheme.kind


def _check_mem_limit(plan: PartitionPlan, scheme: CommScheme | None, limit: int) -> None:
    est = mem_estimate(plan, scheme)
    total = plan.p * est.total_bytes
    if total > limit:
        raise CapacityError(
            f"simulation needs {total} bytes across {plan.p} ranks, over the "
            f"{limit}-byte limit (raise --mem-limit to override)"
        )


def _stats_csv(stats: list[GateStats]) -> str:
    lines = [STATS_HEADER]
    for idx, st in enumerate(stats):
        control = "" if st.control is None else str(st.control)
        comm = "true" if st.comm_required else "false"
        lines.append(
            f"{idx},{st.qubit},{control},{comm},{st.messages_sent_per_rank},"
            f"{st.bytes_sent_per_rank},{_fmt_real(st.wall_time)}"
        )
    return "\n".join(lines) + "\n"


def _state_lines(amps: np.ndarray, top: int | None) -> list[str]:
    if top is None:
        indices = range(len(amps))
    else:
        # largest magnitudes; stable sort keeps ties in ascending index order
        order = np.argsort(-np.abs(amps), kind="stable")[:top]
        indices = sorted(int(i) for i in order)
    return [
        f"{i},{_fmt_real(amps[i].real)},{_fmt_real(amps[i].imag)}" for i in indices
    ]


# ---------------------------------------------------------------------------
# subcommands


def cmd_run(args) -> int:
    circuit = parse_circuit_file(args.circuit)
    k = _ranks_to_k(args.ranks)
    plan = PartitionPlan(circuit.n, k)
    scheme = _parse_scheme(args.scheme)
    if circuit.n > FULL_DUMP_MAX_QUBITS and args.top_amplitudes is None:
        raise CapacityError(
            f"full dumps stop at {FULL_DUMP_MAX_QUBITS} qubits; pass "
            f"--top-amplitudes to write a filtered state"
        )
    if args.top_amplitudes is not None and args.top_amplitudes < 1:
        raise ValidationError("--top-amplitudes must be >= 1")
    _check_mem_limit(plan, scheme, args.mem_limit)

    if args.layout == "auto" and k >= 1:
        perm = optimize_layout(gate_histogram(circuit), k)
    else:
        perm = identity_perm(circuit.n)

    ds, stats = run_circuit(circuit, plan, scheme, perm=perm, norm_tol=VERIFY_TOL)
    state = gather(ds)
    if perm.phys_to_logical != tuple(range(circuit.n)):
        state = permute_state(state, perm.inverse())

    lines = _state_lines(state.amps, args.top_amplitudes)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    with open(args.out + ".stats.csv", "w", encoding="utf-8") as fh:
        fh.write(_stats_csv(stats))
    return 0


def cmd_verify(args) -> int:
    circuit = parse_circuit_file(args.circuit)
    k = _ranks_to_k(args.ranks)
    plan = PartitionPlan(circuit.n, k)
    scheme = _parse_scheme(args.scheme)
    expected = oracle_run(circuit)  # enforces the dense-reference qubit cap
    ds, _ = run_circuit(circuit, plan, scheme)
    got = gather(ds)
    dev = float(np.max(np.abs(got.amps - expected.amps)))
    print(f"max deviation = {dev:.3e}")
    return 0 if dev <= VERIFY_TOL else 1


def cmd_mem(args) -> int:
    k = _ranks_to_k(args.ranks)
    plan = PartitionPlan(args.qubits, k)
    scheme = _parse_scheme(args.scheme, allow_none=True)
    est = mem_estimate(plan, scheme)
    print(
        f"qubits {plan.n}  ranks {plan.p} (k = {plan.k})  "
        f"scheme {_scheme_name(scheme)}"
    )
    print(f"per-rank state bytes: {est.per_rank_state_bytes}")
    print(f"per-rank buffer bytes: {est.per_rank_buffer_bytes}")
    print(f"per-rank total bytes: {est.total_bytes}")
    print(
        f"max qubits for {args.node_bytes} node bytes: "
        f"{est.max_qubits_for(args.node_bytes)}"
    )
    return 0


def cmd_pairs(args) -> int:
    k = _ranks_to_k(args.ranks)
    plan = PartitionPlan(args.qubits, k)
    if not 0 <= args.qubit < plan.n:
        raise ValidationError(
            f"qubit {args.qubit} out of range for n={plan.n}"
        )
    if not needs_comm(plan, args.qubit):
        print("no communication")
        return 0
    for lo, hi in comm_pairs(plan, args.qubit).pairs():
        print(f"{lo} <-> {hi}")
    return 0


def cmd_bench(args) -> int:
    k = _ranks_to_k(args.ranks)
    plan = PartitionPlan(args.qubits, k)
    scheme = _parse_scheme(args.scheme)
    gate = standard_gate(args.gate)
    if args.repeat < 1:
        raise ValidationError("--repeat must be >= 1")

    print(
        f"qubits {plan.n}  ranks {plan.p} (k = {plan.k})  "
        f"scheme {_scheme_name(scheme)}  gate {args.gate.lower()}  "
        f"repeat {args.repeat}"
    )
    if plan.k == 0:
        print("c = no communication")
    else:
        print(f"c = {float(comm_ratio(plan)):.2f}")
    _check_mem_limit(plan, scheme, args.mem_limit)

    ops = tuple(
        GateOp("single", gate, q) for q in range(plan.n) for _ in range(args.repeat)
    )
    _, stats = run_circuit(Circuit(plan.n, ops), plan, scheme)

    comm_times: list[float] = []
    local_times: list[float] = []
    for q in range(plan.n):
        chunk = stats[q * args.repeat : (q + 1) * args.repeat]
        times = [st.wall_time for st in chunk]
        (comm_times if chunk[0].comm_required else local_times).extend(times)
        print(
            f"qubit {q}: median {median(times):.3e} s  "
            f"messages {chunk[0].messages_sent_per_rank}  "
            f"bytes {chunk[0].bytes_sent_per_rank}"
        )
    if comm_times and local_times:
        print(f"T = {median(comm_times) / median(local_times):.6g}")
    else:
        print("T = n/a")
    print()
    sys.stdout.write(_stats_csv(stats))
    return 0


def cmd_layout(args) -> int:
    circuit = parse_circuit_file(args.circuit)
    k = _ranks_to_k(args.ranks)
    plan = PartitionPlan(circuit.n, k)
    if k < 1:
        raise ValidationError("layout needs at least 2 ranks (k >= 1)")
    counts = gate_histogram(circuit)
    perm = optimize_layout(counts, k)
    before = sum(counts[q] for q in range(plan.n - k, plan.n))
    after = sum(counts[perm.phys_to_logical[b]] for b in range(plan.n - k, plan.n))
    print("histogram: " + " ".join(str(c) for c in counts))
    print("phys_to_logical: " + " ".join(str(q) for q in perm.phys_to_logical))
    print(f"communicated before: {before}")
    print(f"communicated after: {after}")
    return 0


# ---------------------------------------------------------------------------
# argument wiring


def _add_ranks(p: argparse.ArgumentParser) -> None:
    p.add_argument("--ranks", type=int, default=1, help="rank count, a power of two")


def _add_scheme(p: argparse.ArgumentParser, default: str, extra: str = "") -> None:
    p.add_argument(
        "--scheme",
        default=default,
        help=f"communication scheme: a, b, chunked:m{extra} (default {default})",
    )


def _add_mem_limit(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--mem-limit",
        type=int,
        default=DEFAULT_MEM_LIMIT,
        help=f"in-process allocation budget in bytes (default {DEFAULT_MEM_LIMIT})",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="svsim", description="distributed state-vector circuit simulator"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate a circuit file")
    p.add_argument("circuit", help="circuit file path")
    _add_ranks(p)
    _add_scheme(p, "b")
    p.add_argument(
        "--layout",
        choices=("identity", "auto"),
        default="identity",
        help="qubit relabeling: identity or histogram-driven auto",
    )
    p.add_argument("--out", required=True, help="state output path")
    p.add_argument(
        "--top-amplitudes",
        type=int,
        default=None,
        metavar="M",
        help="write only the M largest-magnitude amplitudes",
    )
    _add_mem_limit(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify", help="compare engine against the dense reference")
    p.add_argument("circuit", help="circuit file path")
    _add_ranks(p)
    _add_scheme(p, "b")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("mem", help="per-rank memory table")
    p.add_argument("--qubits", type=int, required=True)
    _add_ranks(p)
    _add_scheme(p, "none", extra=", none")
    p.add_argument(
        "--node-bytes",
        type=int,
        default=DEFAULT_NODE_BYTES,
        help=f"node size used for the max-qubits row (default {DEFAULT_NODE_BYTES})",
    )
    p.set_defaults(func=cmd_mem)

    p = sub.add_parser("pairs", help="rank pairing for a gate on one qubit")
    p.add_argument("--qubits", type=int, required=True)
    _add_ranks(p)
    p.add_argument("--qubit", type=int, required=True, help="gate target qubit")
    p.set_defaults(func=cmd_pairs)

    p = sub.add_parser("bench", help="per-qubit gate timing sweep")
    p.add_argument("--qubits", type=int, required=True)
    _add_ranks(p)
    _add_scheme(p, "b")
    p.add_argument("--gate", default="x", help="standard gate name (default x)")
    p.add_argument("--repeat", type=int, default=3, help="applications per qubit")
    _add_mem_limit(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("layout", help="show the histogram-driven qubit relabeling")
    p.add_argument("circuit", help="circuit file path")
    _add_ranks(p)
    p.set_defaults(func=cmd_layout)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValidationError, ContractViolation) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
