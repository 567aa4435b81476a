"""Dense state-vector core: gate application, probabilities, measurement.

Conventions
-----------
* Wires are numbered 1..n and wire 1 is the MOST significant bit of a basis
  index; the basis state labelled by the bit string ``b1 b2 ... bn`` has
  integer index ``int("b1b2...bn", 2)``.
* A :class:`StateVector` is an immutable value; every operation returns a
  new state.  Normalization is checked (tolerance 1e-10) and never silently
  repaired - an unnormalized array is an error.
* Randomness comes from numpy's PCG64 bit generator.  Measurement samples
  are drawn by inverse-CDF lookup of uniform variates on the cumulative
  distribution, so a fixed seed reproduces the exact sample sequence on any
  platform.  Sub-seeds for independent streams are derived with
  :func:`derive_seed` (a ``numpy.random.SeedSequence`` over the master seed
  and an index path).
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .gates import Circuit, GateOp

#: Hard cap on the simulated register: 2^24 complex doubles is ~256 MB.
MAX_QUBITS = 24

#: Tolerance on sum |amp|^2 = 1 and on unit-modulus diagonal factors.
NORM_TOL = 1e-10


class CapacityError(ValueError):
    """Raised when a request would exceed the qubit budget."""


def make_rng(seed: int) -> np.random.Generator:
    """Return the package-standard PCG64 generator for a given seed.

    Seeds are reduced modulo 2^64, so negative integers are accepted and
    map to a fixed stream.
    """
    return np.random.Generator(np.random.PCG64(int(seed) & 0xFFFFFFFFFFFFFFFF))


def derive_seed(master: int, *path: int) -> int:
    """Derive a deterministic 64-bit sub-seed from a master seed and indices.

    Uses ``numpy.random.SeedSequence`` on the entropy tuple
    ``(master, *path)``, which is documented, stable across platforms and
    collision-resistant between distinct paths.
    """
    entropy = [int(master) & 0xFFFFFFFFFFFFFFFF] + [int(p) & 0xFFFFFFFFFFFFFFFF for p in path]
    seq = np.random.SeedSequence(entropy)
    return int(seq.generate_state(1, np.uint64)[0])


class StateVector:
    """Normalized complex amplitudes over the 2^n computational basis states."""

    __slots__ = ("n_qubits", "amps")

    def __init__(self, n_qubits: int, amps: np.ndarray, *, copy: bool = True):
        n_qubits = int(n_qubits)
        if n_qubits < 1:
            raise ValueError(f"n_qubits must be positive, got {n_qubits}")
        if n_qubits > MAX_QUBITS:
            raise CapacityError(
                f"n_qubits={n_qubits} exceeds the simulator cap of {MAX_QUBITS}"
            )
        arr = np.array(amps, dtype=np.complex128, copy=copy)
        if arr.shape != (1 << n_qubits,):
            raise ValueError(
                f"amplitude array must have length 2^{n_qubits}, got shape {arr.shape}"
            )
        if not np.all(np.isfinite(arr.view(np.float64))):
            raise ValueError("amplitudes must be finite")
        norm_sq = float(np.vdot(arr, arr).real)
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise ValueError(
                f"state is not normalized: sum |amp|^2 = {norm_sq!r} "
                f"(tolerance {NORM_TOL}); states are never renormalized silently"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "n_qubits", n_qubits)
        object.__setattr__(self, "amps", arr)

    def __setattr__(self, name, value):
        raise AttributeError("StateVector is immutable")

    def __repr__(self) -> str:
        return f"StateVector(n_qubits={self.n_qubits})"


def init_basis(n_qubits: int, index: int) -> StateVector:
    """Return the basis state with amplitude 1 at ``index``.

    Wire 1 is the most significant bit of the index: ``init_basis(3, 4)``
    puts the excitation on wire 1 (binary 100).
    """
    if n_qubits < 1 or n_qubits > MAX_QUBITS:
        if n_qubits > MAX_QUBITS:
            raise CapacityError(
                f"n_qubits={n_qubits} exceeds the simulator cap of {MAX_QUBITS}"
            )
        raise ValueError(f"n_qubits must be positive, got {n_qubits}")
    dim = 1 << n_qubits
    index = int(index)
    if not 0 <= index < dim:
        raise ValueError(f"basis index {index} out of range [0, {dim})")
    amps = np.zeros(dim, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(n_qubits, amps, copy=False)


def _expand_group_indices(n: int, positions: Sequence[int]) -> np.ndarray:
    """Indices of all basis states whose bits at ``positions`` are zero.

    Enumerates the 2^(n-k) free-bit patterns and opens a zero gap at each
    target bit position (ascending), which costs O(k) vector operations.
    """
    g = np.arange(1 << (n - len(positions)), dtype=np.intp)
    for p in sorted(positions):
        low = g & ((1 << p) - 1)
        g = ((g >> p) << (p + 1)) | low
    return g


def _apply_matrix_inplace(amps: np.ndarray, matrix: np.ndarray, positions: Sequence[int]) -> None:
    """Apply a small unitary to the bit positions of ``amps`` (strided kernel).

    ``positions[0]`` is the high bit of the gate's own index.  Gathers each
    group of 2^k coupled amplitudes, multiplies by the gate matrix and
    scatters back; O(2^n) per gate instead of a 2^n x 2^n matrix product.
    """
    k = len(positions)
    base = _expand_group_indices(amps.size.bit_length() - 1, positions)
    offsets = np.zeros(1 << k, dtype=np.intp)
    for col, p in enumerate(positions):
        offsets |= ((np.arange(1 << k, dtype=np.intp) >> (k - 1 - col)) & 1) << p
    gathered = amps[base[np.newaxis, :] + offsets[:, np.newaxis]]
    transformed = matrix @ gathered
    for t in range(1 << k):
        amps[base + offsets[t]] = transformed[t]


def _check_wires(n_qubits: int, wires: tuple[int, ...]) -> list[int]:
    if len(set(wires)) != len(wires):
        raise ValueError(f"repeated wire index in {wires}")
    for w in wires:
        if not 1 <= w <= n_qubits:
            raise ValueError(f"wire {w} out of range [1, {n_qubits}]")
    return [n_qubits - w for w in wires]


def apply_gate(state: StateVector, gate: GateOp) -> StateVector:
    """Apply a gate to the wires it names, returning the new state.

    Implements the induced action of the tensor extension of the gate
    matrix without ever building the full 2^n x 2^n operator.
    """
    positions = _check_wires(state.n_qubits, gate.wires)
    amps = state.amps.copy()
    _apply_matrix_inplace(amps, gate.matrix, positions)
    return StateVector(state.n_qubits, amps, copy=False)


def run_circuit(state: StateVector, circuit: Circuit) -> StateVector:
    """Apply every op of a circuit in order.

    The circuit may have fewer wires than the state; its wires then act on
    the top (most significant) wires of the register, which is how a
    transform is applied to the leading register of a larger machine.
    """
    if circuit.n_wires > state.n_qubits:
        raise ValueError(
            f"circuit needs {circuit.n_wires} wires but state has {state.n_qubits}"
        )
    amps = state.amps.copy()
    positions = [_check_wires(state.n_qubits, op.wires) for op in circuit.ops]
    for op, pos in zip(circuit.ops, positions):
        _apply_matrix_inplace(amps, op.matrix, pos)
    return StateVector(state.n_qubits, amps, copy=False)


def apply_diagonal(state: StateVector, phases: np.ndarray) -> StateVector:
    """Multiply amplitudes entrywise by unit-modulus diagonal factors."""
    phases = np.asarray(phases)
    if phases.shape != state.amps.shape:
        raise ValueError(
            f"diagonal has shape {phases.shape}, state needs {state.amps.shape}"
        )
    if np.max(np.abs(np.abs(phases.astype(np.complex128)) - 1.0)) > NORM_TOL:
        raise ValueError("diagonal factors must have unit modulus")
    return StateVector(state.n_qubits, state.amps * phases, copy=False)


def apply_permutation(state: StateVector, perm: np.ndarray) -> StateVector:
    """Apply a classical reversible map on basis states: new[perm[s]] = old[s].

    The map must be a bijection of [0, 2^n); such a permutation of basis
    vectors is unitary, which is how classical oracles enter the machine.
    """
    perm = np.asarray(perm, dtype=np.intp)
    dim = state.amps.size
    if perm.shape != (dim,):
        raise ValueError(f"permutation must have length {dim}, got {perm.shape}")
    counts = np.bincount(perm, minlength=dim)
    if perm.min() < 0 or perm.max() >= dim or counts.max() != 1:
        raise ValueError("permutation is not a bijection of the basis indices")
    amps = np.empty_like(state.amps)
    amps[perm] = state.amps
    return StateVector(state.n_qubits, amps, copy=False)


def distribution(state: StateVector) -> np.ndarray:
    """Measurement probabilities |amp|^2 for every basis index."""
    probs = np.abs(state.amps) ** 2
    return probs


def measure_all(state: StateVector, rng_seed: int, shots: int) -> list[int]:
    """Draw ``shots`` independent basis-index samples from the state.

    Deterministic for a fixed seed: uniform variates from the seeded PCG64
    stream are mapped through the inverse CDF of the outcome distribution.
    """
    if shots < 1:
        raise ValueError(f"shots must be positive, got {shots}")
    probs = distribution(state)
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0  # guard the top bin against rounding
    u = make_rng(rng_seed).random(shots)
    idx = np.searchsorted(cdf, u, side="right")
    return [int(i) for i in np.minimum(idx, probs.size - 1)]


def extract_register(index: int, n_qubits: int, first_wire: int, last_wire: int) -> int:
    """Read the integer carried by a contiguous wire span of a basis index.

    The span is inclusive and MSB-first: wires (1, 2) of index 0b1011 on
    four qubits give 0b10 = 2.
    """
    if first_wire > last_wire:
        raise ValueError(f"empty wire span ({first_wire}, {last_wire})")
    if first_wire < 1 or last_wire > n_qubits:
        raise ValueError(
            f"wire span ({first_wire}, {last_wire}) outside [1, {n_qubits}]"
        )
    index = int(index)
    if not 0 <= index < (1 << n_qubits):
        raise ValueError(f"index {index} is not a {n_qubits}-qubit basis index")
    width = last_wire - first_wire + 1
    return (index >> (n_qubits - last_wire)) & ((1 << width) - 1)
