"""Distributed execution: protocols, accounting, determinism, drivers."""

import math

import numpy as np
import pytest

from svsim import (
    CapacityError,
    Circuit,
    ContractViolation,
    GateOp,
    InMemoryTransport,
    PartitionPlan,
    SCHEME_A,
    SCHEME_B,
    ValidationError,
    chunked,
    dist_apply_chunked,
    dist_apply_controlled,
    dist_apply_local,
    dist_apply_scheme_a,
    dist_apply_scheme_b,
    dist_init,
    gather,
    make_state,
    norm2,
    oracle_run,
    run_circuit,
    standard_gate,
    time_ratio,
)
from conftest import random_circuit, random_unitary2

SQ2 = 1.0 / math.sqrt(2.0)


def test_dist_init_slabs():
    ds = dist_init(PartitionPlan(3, 1))
    assert np.array_equal(ds.ranks[0].local, [1, 0, 0, 0])
    assert np.array_equal(ds.ranks[1].local, [0, 0, 0, 0])


def test_dist_init_single_rank():
    ds = dist_init(PartitionPlan(4, 0))
    assert np.array_equal(gather(ds).amps, make_state(4).amps)


def test_gather_is_make_state_for_all_plans():
    for n in range(2, 11):
        for k in range(0, min(4, n)):
            ds = dist_init(PartitionPlan(n, k))
            assert np.array_equal(gather(ds).amps, make_state(n).amps)


def test_local_apply_swaps_adjacent():
    ds = dist_init(PartitionPlan(3, 1))
    dist_apply_local(ds, standard_gate("x"), 0)
    want = np.zeros(8, dtype=np.complex128)
    want[1] = 1.0
    assert np.array_equal(gather(ds).amps, want)
    assert ds.transport.messages_sent == [0, 0]


def test_local_apply_rejects_comm_qubit():
    ds = dist_init(PartitionPlan(3, 1))
    with pytest.raises(ContractViolation):
        dist_apply_local(ds, standard_gate("x"), 2)


def test_local_apply_matches_oracle():
    rng = np.random.default_rng(31)
    for _ in range(100):
        n = int(rng.integers(2, 11))
        k = int(rng.integers(0, min(3, n - 1) + 1))
        ops = []
        for _ in range(5):
            ops.append(GateOp("single", random_unitary2(rng), int(rng.integers(n - k))))
        circuit = Circuit(n, tuple(ops))
        ds = dist_init(PartitionPlan(n, k))
        for op in circuit.ops:
            dist_apply_local(ds, op.gate, op.target)
        want = oracle_run(circuit)
        assert np.max(np.abs(gather(ds).amps - want.amps)) < 1e-12


def test_scheme_b_x_swaps_halves():
    # X on qubit 2 at n=3, k=2: global indices 0..3 trade with 4..7
    ds = dist_init(PartitionPlan(3, 2), scheme=SCHEME_B)
    for rank in range(4):
        ds.ranks[rank].local[:] = [complex(2 * rank), complex(2 * rank + 1)]
    dist_apply_scheme_b(ds, standard_gate("x"), 2)
    assert np.array_equal(
        gather(ds).amps, np.array([4, 5, 6, 7, 0, 1, 2, 3], dtype=np.complex128)
    )


def test_scheme_a_worked_pairing():
    # n=4, k=2, qubit 3: rank 0 exchanges with rank 2, covering global
    # pairs (0,8) (1,9) (2,10) (3,11)
    ds = dist_init(PartitionPlan(4, 2), scheme=SCHEME_A)
    for rank in range(4):
        ds.ranks[rank].local[:] = np.arange(4 * rank, 4 * rank + 4)
    dist_apply_scheme_a(ds, standard_gate("x"), 3)
    want = np.array(
        [8, 9, 10, 11, 12, 13, 14, 15, 0, 1, 2, 3, 4, 5, 6, 7],
        dtype=np.complex128,
    )
    assert np.array_equal(gather(ds).amps, want)


def test_scheme_a_identity_still_sends_full_volume():
    plan = PartitionPlan(5, 1)
    ds = dist_init(plan, scheme=SCHEME_A)
    dist_apply_scheme_a(ds, standard_gate("i"), 4)
    assert np.array_equal(gather(ds).amps, make_state(5).amps)
    assert all(m == 2 for m in ds.transport.messages_sent)
    assert all(b == 2 * 16 * 2**3 for b in ds.transport.bytes_sent)


def test_scheme_byte_accounting_formulas():
    for n in range(2, 11):
        for k in range(1, min(3, n - 1) + 1):
            plan = PartitionPlan(n, k)
            L = plan.local_len
            for i in range(n - k, n):
                ds = dist_init(plan, scheme=SCHEME_A)
                dist_apply_scheme_a(ds, standard_gate("h"), i)
                assert set(ds.transport.bytes_sent) == {2 * 16 * 2 ** (n - k - 1)}
                assert set(ds.transport.messages_sent) == {2}

                ds = dist_init(plan, scheme=SCHEME_B)
                dist_apply_scheme_b(ds, standard_gate("h"), i)
                assert set(ds.transport.bytes_sent) == {16 * 2 ** (n - k)}
                assert set(ds.transport.messages_sent) == {L}

                for m in (1, 2, L):
                    ds = dist_init(plan, scheme=chunked(m))
                    dist_apply_chunked(ds, standard_gate("h"), i, m)
                    assert set(ds.transport.bytes_sent) == {16 * m * math.ceil(L / m)}
                    assert set(ds.transport.messages_sent) == {math.ceil(L / m)}


def test_chunked_degenerate_chunk_matches_scheme_b_count():
    plan = PartitionPlan(6, 2)
    ds = dist_init(plan, scheme=chunked(1))
    dist_apply_chunked(ds, standard_gate("h"), 5, 1)
    b_ds = dist_init(plan, scheme=SCHEME_B)
    dist_apply_scheme_b(b_ds, standard_gate("h"), 5)
    assert ds.transport.messages_sent == b_ds.transport.messages_sent


def test_chunked_full_slab_single_round():
    plan = PartitionPlan(6, 2)
    ds = dist_init(plan, scheme=chunked(plan.local_len))
    dist_apply_chunked(ds, standard_gate("h"), 5, plan.local_len)
    assert set(ds.transport.messages_sent) == {1}


def test_schemes_agree_on_random_gates():
    rng = np.random.default_rng(32)
    for _ in range(100):
        n = int(rng.integers(2, 9))
        k = int(rng.integers(1, min(3, n - 1) + 1))
        plan = PartitionPlan(n, k)
        i = int(rng.integers(n - k, n))
        g = random_unitary2(rng)
        warm = random_circuit(rng, n, 6)
        results = []
        for scheme, fn in [
            (SCHEME_A, lambda d: dist_apply_scheme_a(d, g, i)),
            (SCHEME_B, lambda d: dist_apply_scheme_b(d, g, i)),
            (chunked(1), lambda d: dist_apply_chunked(d, g, i, 1)),
            (chunked(2), lambda d: dist_apply_chunked(d, g, i, 2)),
            (
                chunked(plan.local_len),
                lambda d: dist_apply_chunked(d, g, i, plan.local_len),
            ),
        ]:
            ds, _ = run_circuit(warm, plan, scheme)
            fn(ds)
            results.append(gather(ds).amps)
        for other in results[1:]:
            assert np.max(np.abs(results[0] - other)) < 1e-12


def test_controlled_comm_control_local_target():
    # control on a rank-id bit: only ranks with that bit set act, locally
    plan = PartitionPlan(4, 1)
    circuit = Circuit(4, (GateOp("controlled", standard_gate("x"), 0, 3),))
    ds, stats = run_circuit(circuit, plan, SCHEME_B)
    assert stats[0].messages_sent_per_rank == 0
    assert stats[0].bytes_sent_per_rank == 0
    assert np.array_equal(gather(ds).amps, oracle_run(circuit).amps)


def test_controlled_comm_control_fires():
    # start from |1000> (bit 3 set) so the rank-bit control fires
    plan = PartitionPlan(4, 1)
    prep = GateOp("single", standard_gate("x"), 3)
    cnot = GateOp("controlled", standard_gate("x"), 0, 3)
    circuit = Circuit(4, (prep, cnot))
    ds, _ = run_circuit(circuit, plan, SCHEME_B)
    assert np.array_equal(gather(ds).amps, oracle_run(circuit).amps)


def test_controlled_all_regimes_match_oracle():
    rng = np.random.default_rng(33)
    for _ in range(100):
        n = int(rng.integers(2, 10))
        k = int(rng.integers(0, min(3, n - 1) + 1))
        c, t = (int(v) for v in rng.choice(n, size=2, replace=False))
        g = random_unitary2(rng)
        warm = random_circuit(rng, n, 4)
        ops = warm.ops + (GateOp("controlled", g, t, c),)
        circuit = Circuit(n, ops)
        scheme = (SCHEME_A, SCHEME_B, chunked(2))[int(rng.integers(3))]
        ds, _ = run_circuit(circuit, PartitionPlan(n, k), scheme)
        assert np.max(np.abs(gather(ds).amps - oracle_run(circuit).amps)) < 1e-12


def test_run_circuit_empty():
    ds, stats = run_circuit(Circuit(3, ()), PartitionPlan(3, 1), SCHEME_B)
    assert stats == []
    assert np.array_equal(gather(ds).amps, make_state(3).amps)


def test_run_circuit_all_h():
    ops = tuple(GateOp("single", standard_gate("h"), q) for q in range(3))
    ds, stats = run_circuit(Circuit(3, ops), PartitionPlan(3, 1), SCHEME_A)
    assert np.allclose(gather(ds).amps, np.full(8, 1 / (2 * math.sqrt(2))), atol=1e-12)
    assert [st.comm_required for st in stats] == [False, False, True]


def test_run_circuit_norm_guard():
    # a non-unitary gate trips the per-gate norm check
    from svsim import Gate2x2

    bad = GateOp("single", Gate2x2(2.0, 0.0, 0.0, 0.5), 0)
    with pytest.raises(ValidationError):
        run_circuit(
            Circuit(2, (bad,)), PartitionPlan(2, 0), SCHEME_B, norm_tol=1e-10
        )


def test_no_comm_gates_record_zero():
    plan = PartitionPlan(6, 2)
    ops = tuple(GateOp("single", standard_gate("h"), q) for q in range(4))
    _, stats = run_circuit(Circuit(6, ops), plan, SCHEME_B)
    for st in stats:
        assert not st.comm_required
        assert st.messages_sent_per_rank == 0
        assert st.bytes_sent_per_rank == 0


def test_determinism_same_driver():
    rng = np.random.default_rng(34)
    circuit = random_circuit(rng, 6, 40)
    plan = PartitionPlan(6, 2)
    runs = []
    for _ in range(2):
        ds, stats = run_circuit(circuit, plan, SCHEME_B)
        runs.append((gather(ds).amps, [st.messages_sent_per_rank for st in stats]))
    assert np.array_equal(runs[0][0], runs[1][0])
    assert runs[0][1] == runs[1][1]


def test_determinism_across_drivers():
    rng = np.random.default_rng(35)
    circuit = random_circuit(rng, 7, 40)
    plan = PartitionPlan(7, 3)
    for scheme in (SCHEME_A, SCHEME_B, chunked(2)):
        coop, coop_stats = run_circuit(circuit, plan, scheme)
        thr, thr_stats = run_circuit(circuit, plan, scheme, execution="threads")
        assert np.array_equal(gather(coop).amps, gather(thr).amps)
        assert [st.messages_sent_per_rank for st in coop_stats] == [
            st.messages_sent_per_rank for st in thr_stats
        ]
        assert [st.bytes_sent_per_rank for st in coop_stats] == [
            st.bytes_sent_per_rank for st in thr_stats
        ]


def test_undersized_buffer_is_capacity_error():
    plan = PartitionPlan(5, 1)
    ds = dist_init(plan, scheme=SCHEME_B)  # one-amplitude scratch
    with pytest.raises(CapacityError):
        dist_apply_scheme_a(ds, standard_gate("h"), 4)


def test_transport_counts_and_log():
    t = InMemoryTransport(2, record_log=True)
    t.send(0, 1, np.zeros(3, dtype=np.complex128))
    t.send(0, 1, complex(1.0))
    assert t.messages_sent == [2, 0]
    assert t.bytes_sent == [48 + 16, 0]
    assert t.log == [(0, 1, 48), (0, 1, 16)]
    assert t.try_receive(1, 0) is not None


def test_transport_rejects_self_send():
    t = InMemoryTransport(2)
    with pytest.raises(ValidationError):
        t.send(0, 0, complex(1.0))


def test_transport_fifo_order():
    t = InMemoryTransport(2)
    for v in range(5):
        t.send(0, 1, complex(v))
    got = [t.try_receive(1, 0) for _ in range(5)]
    assert got == [complex(v) for v in range(5)]


def test_norm_preserved_through_engine():
    rng = np.random.default_rng(36)
    circuit = random_circuit(rng, 8, 60)
    ds, _ = run_circuit(circuit, PartitionPlan(8, 3), SCHEME_A, norm_tol=1e-10)
    assert abs(norm2(gather(ds)) - 1.0) < 1e-10


def test_time_ratio():
    assert time_ratio(1e2, 1e-4) == pytest.approx(1e6)
    assert time_ratio(0.5, 0.5) == 1.0
    with pytest.raises(ValidationError):
        time_ratio(0.0, 1.0)
