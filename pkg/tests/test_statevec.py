import math

import numpy as np
import pytest

from qdesk import gates, statevec
from qdesk.statevec import (
    CapacityError,
    StateVector,
    apply_diagonal,
    apply_gate,
    apply_permutation,
    derive_seed,
    distribution,
    extract_register,
    init_basis,
    measure_all,
    run_circuit,
)

from conftest import random_state, random_unitary

INV_SQRT2 = 1 / math.sqrt(2)


class TestInitBasis:
    def test_single_qubit_zero(self):
        state = init_basis(1, 0)
        assert np.allclose(state.amps, [1, 0])

    def test_two_qubit_last_index(self):
        # index 3 is the 11 string under the MSB-first convention
        state = init_basis(2, 3)
        assert np.allclose(state.amps, [0, 0, 0, 1])

    def test_wire_one_is_most_significant(self):
        # setting only wire 1 of three gives binary 100 = index 4
        state = init_basis(3, 4)
        assert state.amps[4] == 1.0
        assert np.count_nonzero(state.amps) == 1

    def test_index_out_of_range(self):
        with pytest.raises(ValueError):
            init_basis(2, 4)

    def test_qubit_cap(self):
        with pytest.raises(CapacityError):
            init_basis(statevec.MAX_QUBITS + 1, 0)


class TestStateVectorInvariants:
    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError, match="not normalized"):
            StateVector(1, np.array([1.0, 1.0]))

    def test_rejects_nan(self):
        with pytest.raises(ValueError, match="finite"):
            StateVector(1, np.array([np.nan, 0.0]))

    def test_rejects_wrong_length(self):
        with pytest.raises(ValueError):
            StateVector(2, np.array([1.0, 0.0]))

    def test_immutable(self):
        state = init_basis(1, 0)
        with pytest.raises((ValueError, AttributeError)):
            state.amps[0] = 0.5


class TestApplyGate:
    def test_hadamard_on_zero(self):
        state = apply_gate(init_basis(1, 0), gates.h_op(1))
        assert np.allclose(state.amps, [INV_SQRT2, INV_SQRT2], atol=1e-12)

    def test_cnot_flips_target(self):
        # control wire 1 is set, so the target wire 2 flips: 10 -> 11
        state = apply_gate(init_basis(2, 0b10), gates.cnot_op(1, 2))
        assert np.allclose(state.amps, [0, 0, 0, 1])

    def test_identity_gate(self, rng):
        eye = gates.GateOp(np.eye(2, dtype=complex), (2,), "I")
        state = random_state(rng, 3)
        assert np.allclose(apply_gate(state, eye).amps, state.amps)

    def test_cnot_creates_bell_pair(self):
        # oracle: multiply the 4x4 matrix against the input column directly
        amps = np.array([INV_SQRT2, 0, INV_SQRT2, 0], dtype=complex)
        expected = gates.cnot() @ amps
        state = apply_gate(StateVector(2, amps), gates.cnot_op(1, 2))
        assert np.allclose(state.amps, expected, atol=1e-12)
        assert np.allclose(state.amps, [INV_SQRT2, 0, 0, INV_SQRT2], atol=1e-12)

    def test_wire_out_of_range(self):
        with pytest.raises(ValueError, match="out of range"):
            apply_gate(init_basis(2, 0), gates.h_op(3))

    def test_repeated_wire_rejected(self):
        with pytest.raises(ValueError, match="repeated wire"):
            gates.GateOp(gates.cnot(), (1, 1))

    def test_non_unitary_rejected(self):
        with pytest.raises(ValueError, match="unitary"):
            gates.GateOp(np.array([[1, 0], [0, 2]], dtype=complex), (1,))

    def test_norm_preserved_on_random_circuits(self, rng):
        for _ in range(25):
            n = int(rng.integers(1, 7))
            state = random_state(rng, n)
            arity = int(rng.integers(1, min(3, n) + 1))
            wires = tuple(int(w) + 1 for w in rng.choice(n, arity, replace=False))
            gate = gates.GateOp(random_unitary(rng, 1 << arity), wires)
            out = apply_gate(state, gate)
            assert abs(np.vdot(out.amps, out.amps).real - 1.0) < 1e-10

    def test_linearity(self, rng):
        # apply(a*s1 + b*s2) = a*apply(s1) + b*apply(s2); s1, s2 built
        # orthonormal so the combination is itself a unit state
        for _ in range(10):
            n = int(rng.integers(2, 7))
            s1 = random_state(rng, n)
            raw = random_state(rng, n).amps
            raw = raw - np.vdot(s1.amps, raw) * s1.amps
            s2 = StateVector(n, raw / np.linalg.norm(raw))
            theta, phi = rng.uniform(0, np.pi / 2), rng.uniform(0, 2 * np.pi)
            alpha = math.cos(theta) * np.exp(1j * phi)
            beta = math.sin(theta)
            combo = StateVector(n, alpha * s1.amps + beta * s2.amps)
            wires = tuple(int(w) + 1 for w in rng.choice(n, 2, replace=False))
            gate = gates.GateOp(random_unitary(rng, 4), wires)
            lhs = apply_gate(combo, gate).amps
            rhs = alpha * apply_gate(s1, gate).amps + beta * apply_gate(s2, gate).amps
            assert np.max(np.abs(lhs - rhs)) < 1e-10

    def test_matches_dense_tensor_extension(self, rng):
        # strided kernel against the independently built full matrix
        for _ in range(40):
            n = int(rng.integers(1, 6))
            state = random_state(rng, n)
            arity = int(rng.integers(1, min(3, n) + 1))
            wires = tuple(int(w) + 1 for w in rng.choice(n, arity, replace=False))
            gate = gates.GateOp(random_unitary(rng, 1 << arity), wires)
            dense = gates.embed_in_full_matrix(gate.matrix, gate.wires, n) @ state.amps
            assert np.max(np.abs(apply_gate(state, gate).amps - dense)) < 1e-10


class TestDistribution:
    def test_bell_pair(self):
        amps = np.array([INV_SQRT2, 0, 0, INV_SQRT2])
        probs = distribution(StateVector(2, amps))
        assert np.allclose(probs, [0.5, 0, 0, 0.5])

    def test_basis_state(self):
        probs = distribution(init_basis(3, 5))
        assert probs[5] == 1.0 and probs.sum() == 1.0

    def test_double_hadamard_uniform(self):
        # oracle: expand H (x) H explicitly and apply to the zero column
        hh = np.kron(gates.hadamard(), gates.hadamard())
        expected = np.abs(hh @ np.array([1, 0, 0, 0])) ** 2
        state = init_basis(2, 0)
        for w in (1, 2):
            state = apply_gate(state, gates.h_op(w))
        assert np.allclose(distribution(state), expected, atol=1e-12)
        assert np.allclose(distribution(state), 0.25, atol=1e-12)

    def test_sums_to_one(self, rng):
        for n in (1, 3, 5):
            probs = distribution(random_state(rng, n))
            assert abs(probs.sum() - 1.0) < 1e-10


class TestMeasureAll:
    def test_deterministic_state(self):
        samples = measure_all(init_basis(2, 3), rng_seed=99, shots=10)
        assert samples == [3] * 10

    def test_seed_determinism(self, rng):
        state = random_state(rng, 4)
        assert measure_all(state, 7, 100) == measure_all(state, 7, 100)

    def test_equal_superposition_frequency(self):
        state = apply_gate(init_basis(1, 0), gates.h_op(1))
        samples = measure_all(state, rng_seed=5, shots=10_000)
        freq0 = samples.count(0) / 10_000
        assert 0.47 <= freq0 <= 0.53  # 3 sigma of binomial(1e4, 1/2)

    def test_uniform_two_qubit_frequencies(self):
        state = init_basis(2, 0)
        for w in (1, 2):
            state = apply_gate(state, gates.h_op(w))
        shots = 40_000
        samples = measure_all(state, rng_seed=13, shots=shots)
        for outcome in range(4):
            freq = samples.count(outcome) / shots
            assert 0.236 <= freq <= 0.264  # 3 sigma of binomial(4e4, 1/4)

    def test_empirical_matches_distribution(self, rng):
        # law of large numbers at 1e4 shots, 3 sigma per outcome
        state = random_state(rng, 3)
        probs = distribution(state)
        shots = 10_000
        samples = measure_all(state, rng_seed=3, shots=shots)
        for outcome, p in enumerate(probs):
            sigma = math.sqrt(p * (1 - p) / shots)
            assert abs(samples.count(outcome) / shots - p) <= 3 * sigma + 1e-9


class TestExtractRegister:
    def test_top_span(self):
        assert extract_register(0b1011, 4, 1, 2) == 2

    def test_bottom_span(self):
        assert extract_register(0b1011, 4, 3, 4) == 3

    def test_zero_index(self):
        assert extract_register(0, 6, 2, 5) == 0

    def test_empty_span_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            extract_register(3, 4, 3, 2)

    def test_out_of_range_span(self):
        with pytest.raises(ValueError):
            extract_register(3, 4, 1, 5)

    def test_index_width_checked(self):
        with pytest.raises(ValueError, match="basis index"):
            extract_register(16, 4, 1, 2)


class TestPermutationAndDiagonal:
    def test_permutation_moves_amplitudes(self):
        state = init_basis(2, 1)
        perm = np.array([3, 2, 1, 0])
        out = apply_permutation(state, perm)
        assert out.amps[2] == 1.0

    def test_permutation_must_be_bijection(self):
        with pytest.raises(ValueError, match="bijection"):
            apply_permutation(init_basis(2, 0), np.array([0, 0, 1, 2]))

    def test_diagonal_unit_modulus_enforced(self):
        with pytest.raises(ValueError, match="unit modulus"):
            apply_diagonal(init_basis(1, 0), np.array([0.5, 1.0]))

    def test_diagonal_phase(self, rng):
        state = random_state(rng, 2)
        phases = np.exp(1j * rng.standard_normal(4))
        out = apply_diagonal(state, phases)
        assert np.allclose(out.amps, state.amps * phases)


class TestRunCircuit:
    def test_matches_sequential_application(self, rng):
        circ = gates.Circuit(3, (gates.h_op(1), gates.cnot_op(1, 3), gates.h_op(2)))
        state = random_state(rng, 3)
        step = state
        for op in circ.ops:
            step = apply_gate(step, op)
        assert np.allclose(run_circuit(state, circ).amps, step.amps, atol=1e-12)

    def test_subcircuit_acts_on_top_wires(self):
        # one-wire circuit on a two-qubit state touches only wire 1
        circ = gates.Circuit(1, (gates.h_op(1),))
        out = run_circuit(init_basis(2, 0), circ)
        assert np.allclose(out.amps, [INV_SQRT2, 0, INV_SQRT2, 0], atol=1e-12)

    def test_circuit_wider_than_state_rejected(self):
        with pytest.raises(ValueError):
            run_circuit(init_basis(1, 0), gates.Circuit(2, (gates.h_op(2),)))


class TestSeeding:
    def test_derive_seed_deterministic(self):
        assert derive_seed(5, 1, 2) == derive_seed(5, 1, 2)

    def test_negative_seed_accepted(self):
        a = statevec.make_rng(-3).random(4)
        b = statevec.make_rng(-3).random(4)
        assert np.array_equal(a, b)

    def test_derive_seed_separates_paths(self):
        seeds = {derive_seed(5, i) for i in range(100)}
        assert len(seeds) == 100

    def test_streams_differ_between_seeds(self, rng):
        state = random_state(rng, 4)
        many = [tuple(measure_all(state, s, 20)) for s in range(8)]
        assert len(set(many)) > 1
