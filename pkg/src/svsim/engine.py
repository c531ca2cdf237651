"""Distributed execution over rank-partitioned amplitude slabs.

Each of the 2**k ranks owns a contiguous slab of 2**(n-k) amplitudes plus a
fixed scratch buffer. Gates on physical bits below n-k run rank-local
through the stride kernel. Higher bits pair ranks off (see partition) and
the pair trades data through one of three protocols:

* scheme a: the lower rank ships the top half of its slab, the higher rank
  ships its bottom half; each side computes both updated rows for the pairs
  it now holds and ships the partner's half back. Two messages per rank,
  2 * 16 * 2**(n-k-1) bytes per rank per gate, buffer of half a slab.
* scheme b: amplitude by amplitude, in lockstep. Each side sends local
  index j and receives the partner's j; the lower rank keeps the first row
  of the update, the higher keeps the second, so nothing is sent back.
  2**(n-k) messages and 16 * 2**(n-k) bytes per rank, buffer of one amplitude.
* chunked(m): scheme b batched m amplitudes per message. The tail chunk is
  zero-padded so every message carries exactly 16*m bytes:
  ceil(2**(n-k)/m) messages per rank.

Controlled gates fall into three regimes: control and target both local
(kernel handles the mask), communicating target with a local control (the
exchange is restricted to indices whose control bit is set; the control bit
of a pair is the same on both sides because pairing flips only the target
bit), and a communicating control (the control bit is constant across a
slab, so it selects which ranks act at all).

Rank programs are written as generators that yield the rank they need a
message from. The cooperative driver steps them round-robin on one thread;
the threaded driver gives each rank a thread with blocking receives. Per
channel, message order depends only on program order, so both drivers give
bit-identical results.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field

import numpy as np

from . import kernel as _kernel
from .core import Circuit, Gate2x2, StateVector
from .errors import CapacityError, ContractViolation, ValidationError
from .kernel import SEQUENTIAL, ExecStrategy
from .layout import QubitPermutation
from .partition import (
    SCHEME_A,
    SCHEME_B,
    CommScheme,
    PartitionPlan,
    comm_pairs,
    needs_comm,
)


class InMemoryTransport:
    """Deterministic in-process message fabric.

    Channels are per-(sender, receiver) FIFO queues; sends never block,
    receives block (or report empty, for the cooperative driver). Every send
    bumps the sender's message and byte counters; record_log additionally
    keeps the full (src, dst, nbytes) sequence.
    """

    def __init__(self, nranks: int, record_log: bool = False):
        if nranks < 1:
            raise ValidationError(f"need at least one rank, got {nranks}")
        self.nranks = nranks
        self.messages_sent = [0] * nranks
        self.bytes_sent = [0] * nranks
        self.log: list[tuple[int, int, int]] | None = [] if record_log else None
        self._queues: dict[tuple[int, int], list] = {}
        self._cond = threading.Condition()

    @staticmethod
    def _payload_bytes(payload) -> int:
        if isinstance(payload, np.ndarray):
            return payload.nbytes
        if isinstance(payload, complex):
            return 16
        raise ValidationError(f"unsupported payload type {type(payload).__name__}")

    def _check_rank(self, r: int) -> None:
        if not (0 <= r < self.nranks):
            raise ValidationError(f"rank {r} out of range for {self.nranks} ranks")

    def send(self, src: int, dst: int, payload) -> None:
        self._check_rank(src)
        self._check_rank(dst)
        if src == dst:
            raise ValidationError("a rank cannot message itself")
        nbytes = self._payload_bytes(payload)
        with self._cond:
            self._queues.setdefault((src, dst), []).append(payload)
            self.messages_sent[src] += 1
            self.bytes_sent[src] += nbytes
            if self.log is not None:
                self.log.append((src, dst, nbytes))
            self._cond.notify_all()

    def try_receive(self, dst: int, src: int):
        """Pop the next message on src -> dst, or None if none is queued."""
        with self._cond:
            q = self._queues.get((src, dst))
            if q:
                return q.pop(0)
            return None

    def receive_blocking(self, dst: int, src: int):
        with self._cond:
            q = self._queues.setdefault((src, dst), [])
            while not q:
                self._cond.wait()
            return q.pop(0)

    def pending(self) -> int:
        """Messages queued but not yet received."""
        with self._cond:
            return sum(len(q) for q in self._queues.values())


@dataclass
class RankState:
    """One rank's slab and its protocol scratch buffer."""

    rank: int
    local: np.ndarray
    buffer: np.ndarray


@dataclass
class DistState:
    plan: PartitionPlan
    transport: InMemoryTransport
    ranks: list[RankState]
    scheme: CommScheme | None
    execution: str
    strat: ExecStrategy
    kernel_backend: str | None


@dataclass(frozen=True)
class GateStats:
    """Per-gate accounting. Message and byte figures are the maximum over
    ranks of what each rank sent during the gate; symmetric protocols make
    that the common per-rank value."""

    qubit: int
    control: int | None
    comm_required: bool
    messages_sent_per_rank: int
    bytes_sent_per_rank: int
    wall_time: float


def dist_init(
    plan: PartitionPlan,
    transport: InMemoryTransport | None = None,
    scheme: CommScheme | None = None,
    execution: str = "cooperative",
    strat: ExecStrategy = SEQUENTIAL,
    kernel_backend: str | None = None,
) -> DistState:
    """Set up |0...0> across the plan's ranks.

    With a scheme given, each rank's buffer is exactly the scheme's scratch
    requirement; without one, buffers cover a full slab so any protocol can
    run. Amplitude 1 sits at global index 0, which is rank 0 slot 0.
    """
    if execution not in ("cooperative", "threads"):
        raise ValidationError(f"unknown execution mode {execution!r}")
    if transport is None:
        transport = InMemoryTransport(plan.p)
    elif transport.nranks != plan.p:
        raise ValidationError(
            f"transport has {transport.nranks} ranks, plan needs {plan.p}"
        )
    buf_amps = plan.local_len if scheme is None else max(scheme.buffer_amps(plan), 1)
    ranks = []
    for r in range(plan.p):
        local = np.zeros(plan.local_len, dtype=np.complex128)
        ranks.append(RankState(r, local, np.zeros(buf_amps, dtype=np.complex128)))
    ranks[0].local[0] = 1.0
    return DistState(plan, transport, ranks, scheme, execution, strat, kernel_backend)


def gather(ds: DistState) -> StateVector:
    """Concatenate the slabs back into one state, ascending by rank."""
    return StateVector(
        ds.plan.n, np.concatenate([rs.local for rs in ds.ranks]), validate=False
    )


# ---------------------------------------------------------------------------
# rank programs


def _mask_indices(lo: int, hi: int, cbit: int | None) -> np.ndarray:
    idx = np.arange(lo, hi, dtype=np.intp)
    if cbit is not None:
        idx = idx[((idx >> cbit) & 1) == 1]
    return idx


def _prog_scheme_a(ds: DistState, g: Gate2x2, r: int, q: int, cbit: int | None):
    plan = ds.plan
    rs = ds.ranks[r]
    a = rs.local
    half = plan.local_len >> 1
    low = r < q
    if low:
        ship = _mask_indices(half, plan.local_len, cbit)
        work = _mask_indices(0, half, cbit)
    else:
        ship = _mask_indices(0, half, cbit)
        work = _mask_indices(half, plan.local_len, cbit)
    # My work set and the partner's ship set cover the same local indices,
    # so each side knows every payload size without negotiation.
    if ship.size:
        ds.transport.send(r, q, a[ship])
    if work.size:
        theirs = yield q
        buf = rs.buffer[: work.size]
        buf[:] = theirs
        mine = a[work]
        if low:
            # mine holds bit i clear, buf holds the partner's bit-i-set values
            a[work] = g.q11 * mine + g.q12 * buf
            ds.transport.send(r, q, g.q21 * mine + g.q22 * buf)
        else:
            a[work] = g.q21 * buf + g.q22 * mine
            ds.transport.send(r, q, g.q11 * buf + g.q12 * mine)
    if ship.size:
        updated = yield q
        buf = rs.buffer[: ship.size]
        buf[:] = updated
        a[ship] = buf


def _prog_scheme_b(ds: DistState, g: Gate2x2, r: int, q: int, cbit: int | None):
    rs = ds.ranks[r]
    a = rs.local
    idx = _mask_indices(0, ds.plan.local_len, cbit)
    low = r < q
    send = ds.transport.send
    buf = rs.buffer
    q11, q12, q21, q22 = g.q11, g.q12, g.q21, g.q22
    for j in idx:
        mine = complex(a[j])
        send(r, q, mine)
        other = yield q
        buf[0] = other
        a[j] = q11 * mine + q12 * other if low else q21 * other + q22 * mine


def _prog_chunked(ds: DistState, g: Gate2x2, r: int, q: int, cbit: int | None, m: int):
    rs = ds.ranks[r]
    a = rs.local
    idx = _mask_indices(0, ds.plan.local_len, cbit)
    low = r < q
    for c0 in range(0, idx.size, m):
        sel = idx[c0 : c0 + m]
        payload = np.zeros(m, dtype=np.complex128)  # fixed-size message, tail padded
        payload[: sel.size] = a[sel]
        ds.transport.send(r, q, payload)
        other = yield q
        buf = rs.buffer[:m]
        buf[:] = other
        vals = buf[: sel.size]
        mine = a[sel]
        a[sel] = g.q11 * mine + g.q12 * vals if low else g.q21 * vals + g.q22 * mine


# ---------------------------------------------------------------------------
# drivers


def _drive_cooperative(transport: InMemoryTransport, progs: dict):
    active = dict(sorted(progs.items()))
    waiting: dict[int, int] = {}
    while active:
        progressed = False
        for r in list(active):
            gen = active[r]
            if r in waiting:
                payload = transport.try_receive(r, waiting[r])
                if payload is None:
                    continue
                del waiting[r]
            else:
                payload = None
            progressed = True
            while True:
                try:
                    src = gen.send(payload)
                except StopIteration:
                    del active[r]
                    break
                payload = transport.try_receive(r, src)
                if payload is None:
                    waiting[r] = src
                    break
        if active and not progressed:
            raise ContractViolation("communication deadlock: no rank can progress")


def _drive_threads(transport: InMemoryTransport, progs: dict):
    errors: dict[int, BaseException] = {}

    def runner(r, gen):
        payload = None
        try:
            while True:
                try:
                    src = gen.send(payload)
                except StopIteration:
                    return
                payload = transport.receive_blocking(r, src)
        except BaseException as exc:  # noqa: BLE001 - surfaced after join
            errors[r] = exc

    threads = [
        threading.Thread(target=runner, args=(r, gen), name=f"svsim-rank-{r}")
        for r, gen in sorted(progs.items())
    ]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    if errors:
        raise errors[min(errors)]


def _drive(ds: DistState, progs: dict) -> None:
    if not progs:
        return
    if ds.execution == "threads":
        _drive_threads(ds.transport, progs)
    else:
        _drive_cooperative(ds.transport, progs)


# ---------------------------------------------------------------------------
# gate application


def dist_apply_local(ds: DistState, g: Gate2x2, i: int, strat: ExecStrategy | None = None):
    """Apply g on rank-local qubit i: every rank sweeps its own slab."""
    if needs_comm(ds.plan, i):
        raise ContractViolation(
            f"qubit {i} spans ranks for n={ds.plan.n}, k={ds.plan.k}; use a scheme"
        )
    st = strat or ds.strat
    for rs in ds.ranks:
        _kernel.apply_single(rs.local, g, i, st, ds.kernel_backend)


def _exchange(
    ds: DistState,
    g: Gate2x2,
    i: int,
    scheme: CommScheme,
    cbit: int | None = None,
    participants: set[int] | None = None,
) -> None:
    plan = ds.plan
    if not needs_comm(plan, i):
        raise ContractViolation(
            f"qubit {i} is rank-local for n={plan.n}, k={plan.k}; use dist_apply_local"
        )
    need = scheme.buffer_amps(plan)
    have = ds.ranks[0].buffer.shape[0]
    if need > have:
        raise CapacityError(
            f"rank buffers hold {have} amplitudes, scheme needs {need}"
        )
    progs = {}
    for r, q in comm_pairs(plan, i).pairs():
        if participants is not None and r not in participants:
            continue
        for me, other in ((r, q), (q, r)):
            if scheme.kind == "a":
                progs[me] = _prog_scheme_a(ds, g, me, other, cbit)
            elif scheme.kind == "b":
                progs[me] = _prog_scheme_b(ds, g, me, other, cbit)
            else:
                progs[me] = _prog_chunked(ds, g, me, other, cbit, scheme.m)
    _drive(ds, progs)


def dist_apply_scheme_a(ds: DistState, g: Gate2x2, i: int) -> None:
    """Half-slab exchange with send-back on communicating qubit i."""
    _exchange(ds, g, i, SCHEME_A)


def dist_apply_scheme_b(ds: DistState, g: Gate2x2, i: int) -> None:
    """Per-amplitude lockstep exchange on communicating qubit i."""
    _exchange(ds, g, i, SCHEME_B)


def dist_apply_chunked(ds: DistState, g: Gate2x2, i: int, m: int) -> None:
    """Per-amplitude exchange batched m amplitudes per message."""
    _exchange(ds, g, i, CommScheme("chunked", m))


def _apply_comm_single(ds: DistState, g: Gate2x2, i: int) -> None:
    if ds.scheme is None:
        raise ValidationError(
            f"qubit {i} requires communication but no scheme was configured"
        )
    _exchange(ds, g, i, ds.scheme)


def dist_apply_controlled(
    ds: DistState,
    g: Gate2x2,
    c: int,
    t: int,
    scheme: CommScheme | None = None,
) -> None:
    """Controlled gate on physical bits c (control) and t (target)."""
    plan = ds.plan
    for name, idx in (("control", c), ("target", t)):
        if not (0 <= idx < plan.n):
            raise ValidationError(f"{name} bit {idx} out of range for n={plan.n}")
    if c == t:
        raise ValidationError("control and target must differ")
    scheme = scheme if scheme is not None else ds.scheme
    boundary = plan.n - plan.k

    if c >= boundary:
        # The control bit is a rank-id bit: constant across every slab, so it
        # just selects the ranks that act.
        participants = {r for r in range(plan.p) if (r >> (c - boundary)) & 1}
        if t >= boundary:
            if scheme is None:
                raise ValidationError("communicating target requires a scheme")
            _exchange(ds, g, t, scheme, cbit=None, participants=participants)
        else:
            st = ds.strat
            for r in sorted(participants):
                _kernel.apply_single(ds.ranks[r].local, g, t, st, ds.kernel_backend)
    elif t >= boundary:
        if scheme is None:
            raise ValidationError("communicating target requires a scheme")
        _exchange(ds, g, t, scheme, cbit=c)
    else:
        for rs in ds.ranks:
            _kernel.apply_controlled(rs.local, g, c, t, ds.strat, ds.kernel_backend)


def _dist_norm2(ds: DistState) -> float:
    return float(sum(np.vdot(rs.local, rs.local).real for rs in ds.ranks))


def run_circuit(
    circuit: Circuit,
    plan: PartitionPlan,
    scheme: CommScheme | None = None,
    strat: ExecStrategy = SEQUENTIAL,
    transport: InMemoryTransport | None = None,
    execution: str = "cooperative",
    perm: QubitPermutation | None = None,
    kernel_backend: str | None = None,
    norm_tol: float | None = None,
) -> tuple[DistState, list[GateStats]]:
    """Run a circuit across the plan's ranks, collecting per-gate stats.

    With a layout permutation, each op's logical qubits are routed to their
    physical bits; gather() then returns the physical storage order and the
    caller applies the inverse permutation to read logical amplitudes.
    norm_tol, when set, checks total squared norm against 1 after each gate.
    """
    if circuit.n != plan.n:
        raise ValidationError(f"circuit has {circuit.n} qubits, plan has {plan.n}")
    if perm is not None and perm.n != plan.n:
        raise ValidationError(f"layout is over {perm.n} qubits, plan has {plan.n}")
    ds = dist_init(plan, transport, scheme, execution, strat, kernel_backend)
    l2p = perm.logical_to_phys if perm is not None else tuple(range(plan.n))
    boundary = plan.n - plan.k
    stats: list[GateStats] = []
    for pos, op in enumerate(circuit.ops):
        tbit = l2p[op.target]
        before_m = list(ds.transport.messages_sent)
        before_b = list(ds.transport.bytes_sent)
        t0 = time.perf_counter()
        if op.kind == "single":
            if tbit < boundary:
                dist_apply_local(ds, op.gate, tbit)
            else:
                _apply_comm_single(ds, op.gate, tbit)
        else:
            dist_apply_controlled(ds, op.gate, l2p[op.control], tbit)
        wall = time.perf_counter() - t0
        msgs = max(
            after - before
            for after, before in zip(ds.transport.messages_sent, before_m)
        )
        nbytes = max(
            after - before for after, before in zip(ds.transport.bytes_sent, before_b)
        )
        stats.append(
            GateStats(op.target, op.control, tbit >= boundary, msgs, nbytes, wall)
        )
        if norm_tol is not None:
            drift = abs(_dist_norm2(ds) - 1.0)
            if drift > norm_tol:
                raise ValidationError(
                    f"norm drifted by {drift:.3e} after gate {pos}"
                )
    return ds, stats


def time_ratio(comm, nocomm) -> float:
    """Wall-time ratio T between a communicating and a local gate."""
    tc = comm.wall_time if isinstance(comm, GateStats) else float(comm)
    tn = nocomm.wall_time if isinstance(nocomm, GateStats) else float(nocomm)
    if tc <= 0.0 or tn <= 0.0:
        raise ValidationError("wall times must be positive to form a ratio")
    return tc / tn
