"""Order finding on the simulator plus the classical factoring pipeline.

The machine uses 3L qubits for an L-bit modulus N: a 2L-qubit exponent
register (wires 1..2L) and an L-qubit value register (wires 2L+1..3L).
After loading the uniform superposition of exponents, the oracle
(a, w) -> (a, w XOR x^a mod N) writes the modular powers, the Fourier
transform is applied to the exponent register, and measuring yields an
integer c concentrated near multiples of 2^(2L)/r where r is the
multiplicative order of x.  Continued-fraction convergents of c/2^(2L)
recover r, and gcd(x^(r/2) +- 1, N) splits N when r is even and
x^(r/2) is not congruent to -1.

The oracle is applied as a classical permutation of basis states; no
gate-level modular arithmetic is simulated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import statevec
from .gates import h_op
from .qft import QftSpec, build_qft_circuit

FAILURE_ODD_R = "odd r"
FAILURE_MINUS_ONE = "x^{r/2} == -1"
FAILURE_CF_MISS = "cf miss"

#: Widening of the convergent denominators: candidate orders are lam * q
#: for lam up to this bound, which recovers r when gcd(d, r) <= LAMBDA_MAX.
LAMBDA_MAX = 4


def modexp(x: int, a: int, n: int) -> int:
    """Modular power x^a mod n by square and multiply."""
    if n < 2:
        raise ValueError(f"modulus must be at least 2, got {n}")
    if a < 0:
        raise ValueError(f"exponent must be non-negative, got {a}")
    result = 1
    base = x % n
    while a:
        if a & 1:
            result = result * base % n
        base = base * base % n
        a >>= 1
    return result


def multiplicative_order(x: int, n: int) -> int:
    """Least positive r with x^r = 1 mod n, by exhaustive stepping."""
    if math.gcd(x, n) != 1:
        raise ValueError(f"x={x} is not invertible mod {n}")
    value = x % n
    r = 1
    while value != 1:
        value = value * x % n
        r += 1
    return r


def is_trivial_case(n: int) -> str:
    """Classify N as 'even', 'prime', 'prime power' or 'composite-ok'.

    The quantum pipeline only applies to the last class; the others have
    classical shortcuts (division by two, nothing to do, k-th root).
    """
    if n < 2:
        raise ValueError(f"N must be at least 2, got {n}")
    if n % 2 == 0:
        return "even"
    if _is_prime(n):
        return "prime"
    for k in range(2, n.bit_length() + 1):
        root = round(n ** (1.0 / k))
        for m in (root - 1, root, root + 1):
            if m >= 2 and m ** k == n:
                return "prime power"
    return "composite-ok"


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in range(2, math.isqrt(n) + 1):
        if n % p == 0:
            return False
    return True


@dataclass(frozen=True)
class FactoringInstance:
    """A modulus N together with a residue x coprime to it."""

    N: int
    x: int

    def __post_init__(self):
        if self.N < 15 or is_trivial_case(self.N) != "composite-ok":
            raise ValueError(
                f"N={self.N} must be an odd composite >= 15 with two or more "
                "distinct prime factors"
            )
        if not 1 <= self.x < self.N:
            raise ValueError(f"x={self.x} out of range [1, {self.N})")
        if math.gcd(self.x, self.N) != 1:
            raise ValueError(f"x={self.x} shares a factor with N={self.N}")

    @property
    def L(self) -> int:
        return self.N.bit_length()

    @property
    def n_qubits(self) -> int:
        return 3 * self.L


@dataclass(frozen=True)
class OrderResult:
    """A verified multiplicative order and how it was obtained."""

    r: int
    source: str  # "measured+cf" or "exhaustive oracle"


@dataclass(frozen=True)
class Convergent:
    """A reduced fraction p/q from a continued-fraction expansion."""

    p: int
    q: int


@dataclass(frozen=True)
class Attempt:
    """One pass of the factoring loop."""

    x: int
    measured_c: int | None
    recovered_r: int | None
    factors: tuple[int, int] | None
    failure: str | None
    lucky_gcd: bool = False


@dataclass(frozen=True)
class FactorReport:
    """Full record of a factoring run, attempt by attempt."""

    N: int
    attempts: tuple[Attempt, ...]

    @property
    def final(self) -> Attempt | None:
        for attempt in self.attempts:
            if attempt.factors is not None:
                return attempt
        return self.attempts[-1] if self.attempts else None

    @property
    def factors(self) -> tuple[int, int] | None:
        a = self.final
        return a.factors if a else None

    @property
    def x(self) -> int | None:
        a = self.final
        return a.x if a else None

    @property
    def measured_c(self) -> int | None:
        a = self.final
        return a.measured_c if a else None

    @property
    def recovered_r(self) -> int | None:
        a = self.final
        return a.recovered_r if a else None

    @property
    def failure(self) -> str | None:
        a = self.final
        return a.failure if a else None

    @property
    def succeeded(self) -> bool:
        return self.factors is not None


# ---------------------------------------------------------------------------
# circuit simulation
# ---------------------------------------------------------------------------

def _check_qubit_budget(inst: FactoringInstance) -> None:
    if inst.n_qubits > statevec.MAX_QUBITS:
        raise statevec.CapacityError(
            f"factoring N={inst.N} needs {inst.n_qubits} qubits "
            f"(cap {statevec.MAX_QUBITS})"
        )


def _power_table(x: int, n: int, length: int) -> np.ndarray:
    """x^a mod n for a in [0, length), tiled from one orbit period."""
    orbit = [1]
    value = x % n
    while value != 1:
        orbit.append(value)
        value = value * x % n
    reps = -(-length // len(orbit))
    return np.tile(np.asarray(orbit, dtype=np.int64), reps)[:length]


def pre_qft_state(inst: FactoringInstance) -> statevec.StateVector:
    """Machine state after the superposition load and the oracle.

    The exponent register holds every a with equal weight and the value
    register holds x^a mod N alongside it.
    """
    _check_qubit_budget(inst)
    L, two_l = inst.L, 2 * inst.L
    state = statevec.init_basis(inst.n_qubits, 0)
    for w in range(1, two_l + 1):
        state = statevec.apply_gate(state, h_op(w))
    a = np.arange(1 << two_l, dtype=np.intp)
    powers = _power_table(inst.x, inst.N, 1 << two_l).astype(np.intp)
    w_bits = np.arange(1 << L, dtype=np.intp)
    perm = ((a[:, np.newaxis] << L) | (w_bits[np.newaxis, :] ^ powers[:, np.newaxis])).ravel()
    return statevec.apply_permutation(state, perm)


@lru_cache(maxsize=16)
def _order_finding_state_cached(n: int, x: int) -> statevec.StateVector:
    inst = FactoringInstance(n, x)
    state = pre_qft_state(inst)
    circuit = build_qft_circuit(QftSpec(2 * inst.L))
    return statevec.run_circuit(state, circuit)


def order_finding_state(inst: FactoringInstance) -> statevec.StateVector:
    """Final machine state just before measurement (cached per N, x)."""
    return _order_finding_state_cached(inst.N, inst.x)


def run_order_finding_circuit(inst: FactoringInstance, rng_seed: int) -> int:
    """Run the full circuit once and return the measured exponent-register c."""
    state = order_finding_state(inst)
    outcome = statevec.measure_all(state, rng_seed, 1)[0]
    return statevec.extract_register(outcome, inst.n_qubits, 1, 2 * inst.L)


def first_register_distribution(inst: FactoringInstance) -> np.ndarray:
    """Exact measurement distribution of c (marginal over the value register)."""
    probs = statevec.distribution(order_finding_state(inst))
    return probs.reshape(1 << (2 * inst.L), 1 << inst.L).sum(axis=1)


# ---------------------------------------------------------------------------
# analytic outcome law
# ---------------------------------------------------------------------------

def analytic_outcome_probability(inst: FactoringInstance, c: int, a0: int) -> float:
    """Probability of measuring (c, x^a0 mod N), from the geometric sum.

    The exponents contributing to the value x^a0 are a0, a0+r, a0+2r, ...;
    there are floor(Q/r) + eta of them where Q = 2^(2L) and eta is 1
    exactly when a0 < Q mod r.  Their phases exp(2 pi i b r c / Q) are
    summed directly and the squared magnitude normalized by Q^2.
    """
    q_total = 1 << (2 * inst.L)
    if not 0 <= c < q_total:
        raise ValueError(f"c={c} out of range [0, {q_total})")
    r = multiplicative_order(inst.x, inst.N)
    if not 0 <= a0 < r:
        raise ValueError(f"a0={a0} is not a least exponent for order r={r}")
    eta = 1 if a0 < q_total % r else 0
    count = q_total // r + eta
    b = np.arange(count)
    angles = (b * r % q_total) * c % q_total  # phase numerators reduced mod Q
    amplitude = np.exp(2j * np.pi * angles / q_total).sum()
    return float(abs(amplitude) ** 2) / q_total**2


def analytic_distribution(inst: FactoringInstance) -> np.ndarray:
    """Analytic joint outcome distribution over the full 3L-qubit register."""
    L = inst.L
    q_total = 1 << (2 * L)
    r = multiplicative_order(inst.x, inst.N)
    probs = np.zeros(1 << inst.n_qubits)
    value = 1
    for a0 in range(r):
        for c in range(q_total):
            probs[(c << L) | value] = analytic_outcome_probability(inst, c, a0)
        value = value * inst.x % inst.N
    return probs


# ---------------------------------------------------------------------------
# continued fractions and order recovery
# ---------------------------------------------------------------------------

def continued_fraction_candidates(c: int, two_pow_2l: int, n: int) -> list[Convergent]:
    """Convergents p/q of c / two_pow_2l with q < n, in expansion order.

    Convergents are automatically in lowest terms; their denominators are
    the candidate orders (up to a small integer factor).
    """
    if not 0 <= c < two_pow_2l:
        raise ValueError(f"c={c} out of range [0, {two_pow_2l})")
    convergents: list[Convergent] = []
    num, den = c, two_pow_2l
    p_prev, p_cur = 0, 1  # numerator recurrence seeds h(-2), h(-1)
    q_prev, q_cur = 1, 0  # denominator recurrence seeds k(-2), k(-1)
    while den:
        quot, rem = divmod(num, den)
        p_prev, p_cur = p_cur, quot * p_cur + p_prev
        q_prev, q_cur = q_cur, quot * q_cur + q_prev
        if q_cur >= n:
            break
        convergents.append(Convergent(p_cur, q_cur))
        num, den = den, rem
    return convergents


def recover_order(inst: FactoringInstance, c: int) -> OrderResult | None:
    """Recover the order of x from a measured c, or None on a miss.

    Each convergent denominator q is widened to lam*q for lam up to
    LAMBDA_MAX (undoing a shared factor between the peak number d and r)
    and tested by modular exponentiation; a verified exponent is reduced
    to the least power giving 1, which is the exact order.  The order is
    accepted only when the measurement actually supports it, i.e. c/2^(2L)
    lies within 2^-(L+1) of a nonzero multiple d/r - otherwise an
    uninformative c (such as 0, whose only convergent has numerator 0)
    would be laundered into an answer it never witnessed.
    """
    q_total = 1 << (2 * inst.L)
    verified: list[int] = []
    for conv in continued_fraction_candidates(c, q_total, inst.N):
        if conv.p == 0:
            continue
        for lam in range(1, LAMBDA_MAX + 1):
            e = lam * conv.q
            if e >= inst.N:
                break
            if modexp(inst.x, e, inst.N) == 1:
                verified.append(e)
    if not verified:
        return None
    best = min(verified)
    # any verified exponent is a multiple of the order; take the least divisor
    r = next(
        div
        for div in range(1, best + 1)
        if best % div == 0 and modexp(inst.x, div, inst.N) == 1
    )
    # peak condition, in exact integers: |c/Q - d/r| <= 1/2^(L+1) for some d >= 1
    d = (2 * c * r + q_total) // (2 * q_total)  # nearest integer to c*r/Q
    half_width = 1 << (inst.L + 1)
    if d == 0 or abs(c * r - d * q_total) * half_width > q_total * r:
        return None
    return OrderResult(r, "measured+cf")


def extract_factors(n: int, x: int, r: int) -> tuple[tuple[int, int] | None, str | None]:
    """Split N from a known order r of x, or report why it cannot.

    Returns (factors, failure); exactly one of the two is set.  Requires r
    to be the exact order of x mod N.
    """
    if r < 1 or modexp(x, r, n) != 1 or multiplicative_order(x, n) != r:
        raise ValueError(f"r={r} is not the multiplicative order of {x} mod {n}")
    if r % 2 == 1:
        return None, FAILURE_ODD_R
    half = modexp(x, r // 2, n)
    if half == n - 1:
        return None, FAILURE_MINUS_ONE
    factors = (math.gcd(half + 1, n), math.gcd(half - 1, n))
    if not all(1 < f < n for f in factors):
        raise AssertionError(
            f"square root {half} of 1 mod {n} not in {{1, -1}} must split N"
        )
    return factors, None


def factor(n: int, max_attempts: int, rng_seed: int) -> FactorReport:
    """Repeatedly pick a random residue and try to split N through its order.

    A residue sharing a factor with N short-circuits to that factor
    ("lucky gcd").  Otherwise the circuit is run with a per-attempt
    sub-seed, the order recovered, and the congruence-of-squares split
    attempted; failed attempts are recorded and the loop retries.
    """
    if max_attempts < 1:
        raise ValueError(f"max_attempts must be positive, got {max_attempts}")
    if is_trivial_case(n) != "composite-ok":
        raise ValueError(
            f"N={n} is {is_trivial_case(n)}; the order-finding method needs an "
            "odd composite with two or more distinct prime factors"
        )
    if 3 * n.bit_length() > statevec.MAX_QUBITS:
        raise statevec.CapacityError(
            f"factoring N={n} needs {3 * n.bit_length()} qubits "
            f"(cap {statevec.MAX_QUBITS})"
        )
    rng = statevec.make_rng(rng_seed)
    attempts: list[Attempt] = []
    for i in range(max_attempts):
        x = int(rng.integers(2, n - 1))  # uniform over [2, N-2]
        shared = math.gcd(x, n)
        if shared > 1:
            attempts.append(
                Attempt(x, None, None, (shared, n // shared), None, lucky_gcd=True)
            )
            return FactorReport(n, tuple(attempts))
        inst = FactoringInstance(n, x)
        c = run_order_finding_circuit(inst, statevec.derive_seed(rng_seed, i))
        order = recover_order(inst, c)
        if order is None:
            attempts.append(Attempt(x, c, None, None, FAILURE_CF_MISS))
            continue
        factors, failure = extract_factors(n, x, order.r)
        attempts.append(Attempt(x, c, order.r, factors, failure))
        if factors is not None:
            return FactorReport(n, tuple(attempts))
    return FactorReport(n, tuple(attempts))
