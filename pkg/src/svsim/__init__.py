"""Distributed state-vector circuit simulator.

Amplitudes of an n-qubit state live in a flat array of 2**n complex
numbers, qubit i owning the index bit of significance 2**i. The array is
split across 2**k simulated ranks; gates on the top k qubits pair
amplitudes across rank boundaries and go through one of three message
protocols, everything else is a local strided kernel sweep. A dense
matrix reference implementation serves as ground truth at small sizes.
"""

from .core import (
    BYTES_PER_AMPLITUDE,
    MAX_QUBITS,
    Circuit,
    Gate2x2,
    GateOp,
    StateVector,
    is_unitary,
    make_state,
    norm2,
    standard_gate,
    tensor_states,
)
from .errors import (
    CapacityError,
    ContractViolation,
    ParseError,
    SvsimError,
    ValidationError,
)
from .kernel import (
    BACKEND,
    SEQUENTIAL,
    ExecStrategy,
    apply_controlled,
    apply_single,
    available_backends,
    update_pair,
)
from .oracle import (
    MAX_DENSE_QUBITS,
    DenseUnitary,
    MatvecCostReport,
    embed_controlled,
    embed_single,
    matvec,
    matvec_cost,
    matvec_partitioned,
    oracle_run,
)
from .partition import (
    SCHEME_A,
    SCHEME_B,
    CommScheme,
    MemEstimate,
    PartitionPlan,
    RankMatching,
    chunked,
    comm_pairs,
    comm_pairs_walk,
    comm_partner,
    comm_ratio,
    mem_estimate,
    needs_comm,
)
from .layout import (
    QubitPermutation,
    gate_histogram,
    identity_perm,
    optimize_layout,
    permute_state,
    permuted_stride,
)
from .engine import (
    DistState,
    GateStats,
    InMemoryTransport,
    RankState,
    dist_apply_chunked,
    dist_apply_controlled,
    dist_apply_local,
    dist_apply_scheme_a,
    dist_apply_scheme_b,
    dist_init,
    gather,
    run_circuit,
    time_ratio,
)
from .circuit_io import format_circuit, parse_circuit, parse_circuit_file

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BYTES_PER_AMPLITUDE",
    "CapacityError",
    "Circuit",
    "CommScheme",
    "ContractViolation",
    "DenseUnitary",
    "DistState",
    "ExecStrategy",
    "Gate2x2",
    "GateOp",
    "GateStats",
    "InMemoryTransport",
    "MAX_DENSE_QUBITS",
    "MAX_QUBITS",
    "MatvecCostReport",
    "MemEstimate",
    "ParseError",
    "PartitionPlan",
    "QubitPermutation",
    "RankMatching",
    "RankState",
    "SCHEME_A",
    "SCHEME_B",
    "SEQUENTIAL",
    "StateVector",
    "SvsimError",
    "ValidationError",
    "apply_controlled",
    "apply_single",
    "available_backends",
    "chunked",
    "comm_pairs",
    "comm_pairs_walk",
    "comm_partner",
    "comm_ratio",
    "dist_apply_chunked",
    "dist_apply_controlled",
    "dist_apply_local",
    "dist_apply_scheme_a",
    "dist_apply_scheme_b",
    "dist_init",
    "embed_controlled",
    "embed_single",
    "format_circuit",
    "gate_histogram",
    "gather",
    "identity_perm",
    "is_unitary",
    "make_state",
    "matvec",
    "matvec_cost",
    "matvec_partitioned",
    "mem_estimate",
    "needs_comm",
    "norm2",
    "optimize_layout",
    "oracle_run",
    "parse_circuit",
    "parse_circuit_file",
    "permute_state",
    "permuted_stride",
    "run_circuit",
    "standard_gate",
    "tensor_states",
    "time_ratio",
    "update_pair",
]
