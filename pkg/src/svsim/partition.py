"""Amplitude partitioning across ranks, and what it costs.

2**k ranks split a 2**n-amplitude state into contiguous slabs: rank r owns
global indices [r * 2**(n-k), (r+1) * 2**(n-k)). A gate on qubit i stays
rank-local while 2**i is below the slab length; for i >= n-k the paired
amplitudes live on two different ranks, and those two ranks exchange data.

The partner of a rank flips exactly one bit of the rank id, so a
communicating gate induces a perfect matching on ranks. comm_pairs builds it
by walking ranks in increasing order; comm_pairs_walk exposes the walk's
amplitude cursor and a start_rank hook to show why the increasing order is
load-bearing.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import BYTES_PER_AMPLITUDE
from .errors import ContractViolation, ValidationError

_VALID_BPA = (8, 16)


@dataclass(frozen=True)
class PartitionPlan:
    """n qubits split across 2**k ranks."""

    n: int
    k: int

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError(f"need at least one qubit, got n={self.n}")
        if not (0 <= self.k <= self.n - 1):
            raise ValidationError(
                f"k must lie in [0, n-1] so each rank holds at least a pair, "
                f"got k={self.k} for n={self.n}"
            )

    @property
    def p(self) -> int:
        """Rank count."""
        return 1 << self.k

    @property
    def local_len(self) -> int:
        """Amplitudes per rank."""
        return 1 << (self.n - self.k)

    def rank_of(self, gindex: int) -> int:
        return gindex >> (self.n - self.k)

    def first_index(self, rank: int) -> int:
        return rank << (self.n - self.k)


@dataclass(frozen=True)
class CommScheme:
    """Exchange protocol selector: halves ("a"), per-amplitude ("b"), or
    per-amplitude batched into chunks of m ("chunked")."""

    kind: str
    m: int | None = None

    def __post_init__(self):
        if self.kind not in ("a", "b", "chunked"):
            raise ValidationError(f"unknown scheme kind {self.kind!r}")
        if self.kind == "chunked":
            if not isinstance(self.m, int) or self.m < 1:
                raise ValidationError(f"chunk size must be an int >= 1, got {self.m!r}")
        elif self.m is not None:
            raise ValidationError(f"scheme {self.kind!r} takes no chunk size")

    def buffer_amps(self, plan: PartitionPlan) -> int:
        """Scratch amplitudes each rank needs for this protocol."""
        if plan.k == 0:
            return 0
        if self.kind == "a":
            return plan.local_len // 2
        if self.kind == "b":
            return 1
        if self.m > plan.local_len:
            raise ValidationError(
                f"chunk size {self.m} exceeds slab length {plan.local_len}"
            )
        return self.m


SCHEME_A = CommScheme("a")
SCHEME_B = CommScheme("b")


def chunked(m: int) -> CommScheme:
    return CommScheme("chunked", m)


@dataclass(frozen=True)
class RankMatching:
    """Perfect matching on ranks: partner_of[r] is r's opposite number."""

    qubit: int
    partner_of: tuple[int, ...]

    def __post_init__(self):
        po = self.partner_of
        for r, q in enumerate(po):
            if q == r or not (0 <= q < len(po)) or po[q] != r:
                raise ValidationError(
                    f"not a fixed-point-free involution at rank {r}: partner {q}"
                )

    def pairs(self) -> list[tuple[int, int]]:
        """The matching as (low, high) pairs, ascending by low rank."""
        return [(r, q) for r, q in enumerate(self.partner_of) if r < q]


def needs_comm(plan: PartitionPlan, i: int) -> bool:
    """Does a gate on qubit i reach across rank boundaries?"""
    if not (0 <= i < plan.n):
        raise ValidationError(f"qubit {i} out of range for n={plan.n}")
    return i >= plan.n - plan.k


def comm_partner(plan: PartitionPlan, rank: int, i: int) -> int:
    """The rank holding the partner amplitudes of `rank` for qubit i.

    Flipping bit i of any owned global index lands every amplitude of the
    slab on the same other rank: (first_index ^ 2**i) // local_len, which is
    rank with bit (i - (n-k)) flipped.
    """
    if not (0 <= rank < plan.p):
        raise ValidationError(f"rank {rank} out of range for p={plan.p}")
    if not needs_comm(plan, i):
        raise ContractViolation(f"qubit {i} is rank-local for n={plan.n}, k={plan.k}")
    return (plan.first_index(rank) ^ (1 << i)) >> (plan.n - plan.k)


def comm_pairs(plan: PartitionPlan, i: int) -> RankMatching:
    """Pair every rank with its partner for qubit i.

    Walks ranks in increasing order; each unpaired rank computes its partner
    and both leave the pending set. The increasing order guarantees the
    current rank is always the lowest unpaired one.
    """
    if not needs_comm(plan, i):
        raise ContractViolation(f"qubit {i} is rank-local for n={plan.n}, k={plan.k}")
    partner_of = [-1] * plan.p
    pending = set(range(plan.p))
    for r in range(plan.p):
        if r not in pending:
            continue
        q = comm_partner(plan, r, i)
        partner_of[r] = q
        partner_of[q] = r
        pending.discard(r)
        pending.discard(q)
    return RankMatching(i, tuple(partner_of))


def comm_pairs_walk(plan: PartitionPlan, i: int, start_rank: int = 0) -> dict[int, int]:
    """The pairing walk with its amplitude cursor exposed.

    The walk keeps a cursor on the first amplitude that still needs a pair,
    which is the first amplitude of the lowest unpaired rank, and pairs the
    rank it is visiting with the owner of cursor + 2**i. When ranks are
    visited in increasing order the visited rank always owns the cursor and
    the result equals comm_pairs. Visiting any other rank first silently
    pairs it with somebody else's partner: start_rank=1 on (n=3, k=2, i=2)
    returns 1 paired with 2 instead of 3.

    Returns a rank -> partner dict; with a bad start order it is not a valid
    matching (that is the point). A paired rank leaves the pending set, so
    its entry is never re-decided: the first determination sticks. Partner
    arithmetic wraps into the rank count the way an unchecked array index
    would.
    """
    if not needs_comm(plan, i):
        raise ValidationError(f"qubit {i} is rank-local for n={plan.n}, k={plan.k}")
    if not (0 <= start_rank < plan.p):
        raise ValidationError(f"start rank {start_rank} out of range for p={plan.p}")
    order = [start_rank] + [r for r in range(plan.p) if r != start_rank]
    unpaired = set(range(plan.p))
    partner_of: dict[int, int] = {}
    for r in order:
        if r not in unpaired:
            continue
        cursor = plan.first_index(min(unpaired))  # assumes the visit is the minimum
        mate = ((cursor + (1 << i)) >> (plan.n - plan.k)) % plan.p
        partner_of.setdefault(r, mate)
        partner_of.setdefault(mate, r)
        unpaired.discard(r)
        unpaired.discard(mate)
    return partner_of


def comm_ratio(plan: PartitionPlan) -> Fraction:
    """Local-to-communicating qubit ratio c = (n - k) / k, exact."""
    if plan.k == 0:
        raise ValidationError("no communication with a single rank (k = 0)")
    return Fraction(plan.n - plan.k, plan.k)


@dataclass(frozen=True)
class MemEstimate:
    """Per-rank memory bill: slab plus protocol scratch."""

    n: int
    k: int
    scheme: CommScheme | None
    bytes_per_amplitude: int
    per_rank_state_bytes: int
    per_rank_buffer_bytes: int
    total_bytes: int

    def max_qubits_for(self, node_bytes: int) -> int:
        """Largest qubit count whose per-rank total fits in node_bytes,
        holding k, scheme, and amplitude width fixed."""
        if node_bytes < 1:
            raise ValidationError(f"node_bytes must be positive, got {node_bytes!r}")
        best = 0
        n = max(self.k + 1, 1)
        while True:
            est = mem_estimate(
                PartitionPlan(n, self.k), self.scheme, self.bytes_per_amplitude
            )
            if est.total_bytes > node_bytes:
                return best
            best = n
            n += 1


def mem_estimate(
    plan: PartitionPlan,
    scheme: CommScheme | None = None,
    bytes_per_amplitude: int = BYTES_PER_AMPLITUDE,
) -> MemEstimate:
    """Exact per-rank byte counts for a plan under a given protocol.

    With no scheme (or a single rank, where no exchange ever happens) the
    buffer is zero and the total is the slab alone: 2**(n-k) amplitudes at
    bytes_per_amplitude each.
    """
    if bytes_per_amplitude not in _VALID_BPA:
        raise ValidationError(
            f"bytes per amplitude must be one of {_VALID_BPA}, got {bytes_per_amplitude!r}"
        )
    state = plan.local_len * bytes_per_amplitude
    buf_amps = 0 if scheme is None else scheme.buffer_amps(plan)
    buf = buf_amps * bytes_per_amplitude
    return MemEstimate(
        n=plan.n,
        k=plan.k,
        scheme=scheme,
        bytes_per_amplitude=bytes_per_amplitude,
        per_rank_state_bytes=state,
        per_rank_buffer_bytes=buf,
        total_bytes=state + buf,
    )
