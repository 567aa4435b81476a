"""Amplitude-amplification search over 2^k items.

One search iteration applies the marking oracle (a diagonal sign flip on
the target indices) followed by inversion about the mean, which replaces
every amplitude a_i by 2m - a_i for the mean m.  The inversion is exactly
the composed operator -(H^k) Z0 (H^k) where Z0 flips the sign of index 0;
both forms are implemented and must agree, the mean formula being the fast
path and the composition the cross-check.

Sign bookkeeping: with the iteration fixed as (inversion about mean after
the oracle flip), starting from the uniform state with single-target
amplitudes (alpha, beta), one step maps

    m     = ((N - 1) * alpha - beta) / N
    alpha -> 2m - alpha        (unmarked)
    beta  -> 2m + beta         (marked, the oracle sign folded in)

and this closed two-variable recurrence tracks the full simulation
exactly; it is the independent check used by the tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import statevec
from .gates import h_op, phase_flip_target


@dataclass(frozen=True, eq=False)
class SearchProblem:
    """A k-qubit search space with a predicate marking the targets."""

    k: int
    predicate: Callable[[int], bool]
    target_count: int

    def __post_init__(self):
        if not 1 <= self.k <= statevec.MAX_QUBITS:
            raise ValueError(f"k must lie in [1, {statevec.MAX_QUBITS}], got {self.k}")
        signs = phase_flip_target(self.k, self.predicate)
        marked = tuple(int(i) for i in np.flatnonzero(signs < 0))
        if len(marked) != self.target_count:
            raise ValueError(
                f"predicate marks {len(marked)} indices, declared {self.target_count}"
            )
        signs.setflags(write=False)
        object.__setattr__(self, "marked", marked)
        object.__setattr__(self, "_signs", signs)

    @property
    def N(self) -> int:
        return 1 << self.k

    @property
    def oracle_signs(self) -> np.ndarray:
        return self._signs


def single_target(k: int, t: int) -> SearchProblem:
    """Search problem marking exactly the index t."""
    if not 0 <= t < (1 << k):
        raise ValueError(f"target {t} out of range [0, {1 << k})")
    return SearchProblem(k, lambda i: i == t, 1)


def uniform_state(k: int) -> statevec.StateVector:
    """Equal superposition of all 2^k indices, built from Hadamards."""
    state = statevec.init_basis(k, 0)
    for w in range(1, k + 1):
        state = statevec.apply_gate(state, h_op(w))
    return state


def inversion_about_mean(state: statevec.StateVector) -> statevec.StateVector:
    """Replace each amplitude a_i by 2m - a_i (m the mean amplitude)."""
    amps = state.amps
    m = amps.mean()
    return statevec.StateVector(state.n_qubits, 2.0 * m - amps, copy=False)


def inversion_about_mean_composed(state: statevec.StateVector) -> statevec.StateVector:
    """The same reflection as -(H^k) Z0 (H^k), gate by gate."""
    n = state.n_qubits
    for w in range(1, n + 1):
        state = statevec.apply_gate(state, h_op(w))
    signs = np.ones(1 << n)
    signs[0] = -1.0
    state = statevec.apply_diagonal(state, signs)
    for w in range(1, n + 1):
        state = statevec.apply_gate(state, h_op(w))
    return statevec.apply_diagonal(state, np.full(1 << n, -1.0))


def grover_iterate(state: statevec.StateVector, problem: SearchProblem) -> statevec.StateVector:
    """One full search iteration: oracle sign flip, then inversion about mean."""
    flipped = statevec.apply_diagonal(state, problem.oracle_signs)
    return inversion_about_mean(flipped)


def iteration_schedule(n_items: int, target_count: int) -> int:
    """Iteration count round(pi/4 * sqrt(N/t) - 1/2).

    This maximizes the single-shot success probability of the
    two-dimensional rotation the iteration performs.
    """
    if target_count < 1 or target_count >= n_items:
        raise ValueError(
            f"target_count must lie in [1, {n_items}), got {target_count}"
        )
    return round(math.pi / 4 * math.sqrt(n_items / target_count) - 0.5)


def marked_probability(state: statevec.StateVector, problem: SearchProblem) -> float:
    """Total probability mass on the marked indices."""
    probs = statevec.distribution(state)
    return float(sum(probs[i] for i in problem.marked))


@dataclass(frozen=True)
class GroverResult:
    """Outcome of a scheduled search run."""

    found: int
    success: bool
    success_probability: float
    iterations: int
    oracle_calls: int
    trace: tuple[float, ...]  # marked probability after 0, 1, ... iterations


def run_grover(problem: SearchProblem, rng_seed: int) -> GroverResult:
    """Run the scheduled number of iterations from uniform, then measure.

    ``oracle_calls`` counts applications of the marking transform - one per
    iteration - which is the quantity that scales like sqrt(N).
    """
    state = uniform_state(problem.k)
    iterations = iteration_schedule(problem.N, problem.target_count)
    trace = [marked_probability(state, problem)]
    oracle_calls = 0
    for _ in range(iterations):
        state = grover_iterate(state, problem)
        oracle_calls += 1
        trace.append(marked_probability(state, problem))
    outcome = statevec.measure_all(state, rng_seed, 1)[0]
    return GroverResult(
        found=outcome,
        success=bool(problem.predicate(outcome)),
        success_probability=trace[-1],
        iterations=iterations,
        oracle_calls=oracle_calls,
        trace=tuple(trace),
    )


@dataclass(frozen=True)
class AmplitudePair:
    """Single-target amplitudes: alpha off the target, beta on it."""

    alpha: float
    beta: float


def analytic_recurrence(n_items: int, iterations: int) -> list[AmplitudePair]:
    """Closed-form single-target amplitude track, one entry per step.

    Starts from the uniform pair (1/sqrt(N), 1/sqrt(N)); entry i is the
    state after i iterations.  Matches the full simulation exactly under
    the sign convention documented in the module docstring.
    """
    if iterations < 0:
        raise ValueError(f"iterations must be non-negative, got {iterations}")
    if n_items < 2:
        raise ValueError(f"need at least 2 items, got {n_items}")
    alpha = beta = 1.0 / math.sqrt(n_items)
    track = [AmplitudePair(alpha, beta)]
    for _ in range(iterations):
        m = ((n_items - 1) * alpha - beta) / n_items
        alpha, beta = 2 * m - alpha, 2 * m + beta
        track.append(AmplitudePair(alpha, beta))
    return track
