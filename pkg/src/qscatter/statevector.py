"""Dense state-vector register with gates, Fourier transform and sampling.

Conventions
-----------
Qubits are numbered 1..n and qubit 1 is the most significant bit of the
basis index, so ``j = j1*2**(n-1) + j2*2**(n-2) + ... + jn``.  All gate
operations mutate the register in place and preserve its norm.

The Fourier transform implemented by :func:`qft` uses the minus-sign
kernel

    amps'[k] = 2**(-n/2) * sum_j exp(-2*pi*i*j*k / 2**n) * amps[j]

realized as the usual O(n^2) network of Hadamards and controlled phase
gates followed by a qubit-order reversal.

Concurrency: operations require exclusive access to the state they
mutate.  A state may be handed from one thread to another; independent
states may be processed concurrently.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError, ValidationError
from .tolerances import TOL

MAX_QUBITS = 26

# ------------------------------------------------------------------ gates

IDENTITY = np.eye(2, dtype=np.complex128)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2.0)
for _g in (IDENTITY, PAULI_X, PAULI_Y, PAULI_Z, HADAMARD):
    _g.setflags(write=False)

# Maps Y eigenvectors onto Z eigenvectors: measuring Z after this gate is
# the same as measuring Y before it.
_Y_TO_Z = HADAMARD @ np.diag([1.0, -1.0j]).astype(np.complex128)


def phase_gate(alpha):
    """diag(1, exp(i*alpha)): phase on the |1> component of one qubit."""
    return np.array([[1.0, 0.0], [0.0, np.exp(1j * alpha)]], dtype=np.complex128)


def is_unitary(gate, tol=TOL.gate_unitarity):
    """True if the 2x2 matrix is unitary within ``tol``."""
    gate = np.asarray(gate, dtype=np.complex128)
    if gate.shape != (2, 2):
        return False
    dev = gate.conj().T @ gate - IDENTITY
    return bool(np.max(np.abs(dev)) <= tol)


def _check_gate(gate):
    gate = np.asarray(gate, dtype=np.complex128)
    if gate.shape != (2, 2):
        raise ValidationError(f"gate must be 2x2, got shape {gate.shape}")
    if not is_unitary(gate):
        raise ValidationError("gate is not unitary within tolerance")
    return gate


# ------------------------------------------------------------------ state


class QuantumState:
    """2**n complex amplitudes over the computational basis."""

    __slots__ = ("n", "amps")

    def __init__(self, n, amps=None):
        if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_QUBITS:
            raise DomainError(f"qubit count must be in 1..{MAX_QUBITS}, got {n}")
        self.n = int(n)
        size = 1 << self.n
        if amps is None:
            self.amps = np.zeros(size, dtype=np.complex128)
            self.amps[0] = 1.0
        else:
            amps = np.ascontiguousarray(amps, dtype=np.complex128)
            if amps.shape != (size,):
                raise ValidationError(
                    f"amplitude array must have length {size}, got {amps.shape}"
                )
            self.amps = amps

    def copy(self):
        return QuantumState(self.n, self.amps.copy())

    def norm(self):
        return float(np.linalg.norm(self.amps))

    def probabilities(self):
        return np.abs(self.amps) ** 2

    def require_normalized(self, tol=TOL.norm):
        dev = abs(self.norm() - 1.0)
        if dev > tol:
            raise ValidationError(f"state norm deviates from 1 by {dev:.3e}")

    def __repr__(self):
        return f"QuantumState(n={self.n})"


def basis_state(n, j):
    """Computational basis state |j> on n qubits."""
    size = 1 << n
    if not 0 <= j < size:
        raise DomainError(f"basis index {j} out of range for n={n}")
    state = QuantumState(n)
    state.amps[0] = 0.0
    state.amps[j] = 1.0
    return state


def random_state(n, seed=0):
    """Haar-ish random normalized state (Gaussian amplitudes), seeded."""
    rng = np.random.default_rng(seed)
    amps = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    amps /= np.linalg.norm(amps)
    return QuantumState(n, amps)


# -------------------------------------------------------------- operations


def _check_target(state, target):
    if not isinstance(target, (int, np.integer)) or not 1 <= target <= state.n:
        raise DomainError(f"target qubit {target} out of range 1..{state.n}")
    return int(target)


def apply_single_qubit(state, target, gate, *, validate=True):
    """Apply a 2x2 unitary to one qubit, in place.  Returns the state."""
    target = _check_target(state, target)
    if validate:
        gate = _check_gate(gate)
    _kernels.active.apply_1q(
        state.amps, state.n, target,
        complex(gate[0, 0]), complex(gate[0, 1]),
        complex(gate[1, 0]), complex(gate[1, 1]),
    )
    return state


def apply_controlled(state, controls, target, gate, *, validate=True):
    """Apply a 2x2 unitary to ``target`` where every control matches.

    ``controls`` is a sequence of ``(qubit, required_bit)`` pairs; a
    control may require 0 or 1.  Control qubits must be distinct and must
    not include the target.
    """
    target = _check_target(state, target)
    if validate:
        gate = _check_gate(gate)
    cmask = 0
    cval = 0
    seen = set()
    for qubit, bit in controls:
        qubit = _check_target(state, qubit)
        if qubit == target or qubit in seen:
            raise DomainError(
                f"control qubit {qubit} duplicates the target or another control"
            )
        seen.add(qubit)
        if bit not in (0, 1):
            raise DomainError(f"control bit must be 0 or 1, got {bit}")
        pos = state.n - qubit
        cmask |= 1 << pos
        cval |= int(bit) << pos
    if cmask == 0:
        return apply_single_qubit(state, target, gate, validate=False)
    _kernels.active.apply_ctrl_1q(
        state.amps, state.n, target, cmask, cval,
        complex(gate[0, 0]), complex(gate[0, 1]),
        complex(gate[1, 0]), complex(gate[1, 1]),
    )
    return state


def swap_qubits(state, q1, q2):
    """Exchange two qubits (a relabeling of basis indices), in place."""
    q1 = _check_target(state, q1)
    q2 = _check_target(state, q2)
    if q1 == q2:
        return state
    _kernels.active.swap_pair(state.amps, state.n, q1, q2)
    return state


def qft(state):
    """Fourier transform with the minus-sign kernel, in place.

    Hadamard plus controlled-phase ladder on each qubit, then qubit-order
    reversal; 2*pi/2**m phase angles enter with a minus sign so that the
    matrix element is exp(-2*pi*i*j*k/2**n)/2**(n/2).
    """
    n = state.n
    for q in range(1, n + 1):
        apply_single_qubit(state, q, HADAMARD, validate=False)
        for m in range(2, n - q + 2):
            apply_controlled(
                state, [(q + m - 1, 1)], q,
                phase_gate(-2.0 * np.pi / (1 << m)), validate=False,
            )
    for q in range(1, n // 2 + 1):
        swap_qubits(state, q, n + 1 - q)
    return state


def iqft(state):
    """Inverse of :func:`qft`, in place (reversed gates, conjugate phases)."""
    n = state.n
    for q in range(n // 2, 0, -1):
        swap_qubits(state, q, n + 1 - q)
    for q in range(n, 0, -1):
        for m in range(n - q + 1, 1, -1):
            apply_controlled(
                state, [(q + m - 1, 1)], q,
                phase_gate(2.0 * np.pi / (1 << m)), validate=False,
            )
        apply_single_qubit(state, q, HADAMARD, validate=False)
    return state


def append_qubit(state, bit=0):
    """Return a new state with one extra qubit (index n+1, least
    significant) initialized to |bit>."""
    if bit not in (0, 1):
        raise DomainError(f"ancilla bit must be 0 or 1, got {bit}")
    if state.n + 1 > MAX_QUBITS:
        raise DomainError("cannot append: qubit limit reached")
    single = np.zeros(2, dtype=np.complex128)
    single[bit] = 1.0
    return QuantumState(state.n + 1, np.kron(state.amps, single))


# -------------------------------------------------------------- sampling


_BASIS_CHANGE = {"Z": None, "X": HADAMARD, "Y": _Y_TO_Z}


def qubit_marginal(state, qubit, basis="Z"):
    """Exact single-qubit marginal in the chosen Pauli basis.

    Returns ``(p_plus, p_minus)`` where plus is the +1 eigenvalue outcome
    (bit 0 after the basis change).
    """
    qubit = _check_target(state, qubit)
    if basis not in _BASIS_CHANGE:
        raise DomainError(f"basis must be one of Z, X, Y, got {basis!r}")
    work = state
    rot = _BASIS_CHANGE[basis]
    if rot is not None:
        work = state.copy()
        apply_single_qubit(work, qubit, rot, validate=False)
    stride = 1 << (work.n - qubit)
    probs = work.probabilities().reshape(-1, 2, stride)
    p_minus = float(probs[:, 1, :].sum())
    p_plus = float(probs[:, 0, :].sum())
    # guard against rounding drift; the two must sum to the squared norm
    total = p_plus + p_minus
    return p_plus / total, p_minus / total


@dataclass(frozen=True)
class ShotRecord:
    """Outcome counts of repeated single-qubit measurements."""

    basis: str
    qubit: int
    shots: int
    n_plus: int
    n_minus: int
    seed: int

    @property
    def mean(self):
        """Empirical expectation value of the measured Pauli operator."""
        return (self.n_plus - self.n_minus) / self.shots


def measure_shots(state, qubit, basis, shots, seed):
    """Sample one qubit ``shots`` times in a Pauli basis.

    Outcomes are drawn from the exact marginal distribution (the register
    is not collapsed), so a single binomial draw with the given seed fixes
    the counts.  Deterministic for equal seeds.
    """
    if shots < 1:
        raise DomainError(f"shots must be >= 1, got {shots}")
    p_plus, _ = qubit_marginal(state, qubit, basis)
    rng = np.random.default_rng(seed)
    n_plus = int(rng.binomial(shots, p_plus))
    return ShotRecord(
        basis=basis, qubit=int(qubit), shots=int(shots),
        n_plus=n_plus, n_minus=int(shots) - n_plus, seed=int(seed),
    )


def sector_probability(state, predicate):
    """Total probability of basis indices selected by ``predicate``.

    ``predicate`` maps basis indices to booleans; it is offered the whole
    index array first (vectorized use), falling back to per-index calls.
    """
    probs = state.probabilities()
    idx = np.arange(probs.size)
    try:
        mask = np.asarray(predicate(idx), dtype=bool)
        if mask.shape != idx.shape:
            raise TypeError
    except (TypeError, ValueError):
        mask = np.fromiter((bool(predicate(int(j))) for j in idx), bool, probs.size)
    return float(probs[mask].sum())
