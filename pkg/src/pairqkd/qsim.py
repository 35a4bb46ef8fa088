"""Minimal pure-state simulator for one and two qubits.

States are plain complex ndarrays: shape (2,) over the basis (|0>, |1>)
and shape (4,) over (|00>, |01>, |10>, |11>). Qubit 1 is the left tensor
factor, so amplitude index = b1 * 2 + b2 for bit values b1, b2. All
functions treat state arrays as immutable and return new arrays.

Measurement outcomes are bits tied to eigenstates: in Z, 0 -> |0> and
1 -> |1>; in X, 0 -> |-> and 1 -> |+> with |+-> = (|0> +- |1>)/sqrt(2).

Two numerical choices matter for callers that want exact protocol
statistics. Projection components are combined with elementwise
arithmetic (never BLAS dot kernels), so orthogonal branches cancel to a
weight of exactly zero; and outcome probabilities are ratios of
projection weights, so the half/zero/one probabilities this protocol
family produces are exact in double precision.

Noise is a depolarizing channel in trajectory form: with probability p a
uniformly chosen Pauli flip (bit, phase, or both) hits the selected qubit
of the pure state. The idealized protocols assume a noiseless channel;
the channel here is an optional extension for studying detection
thresholds, with statistics identical to the density-matrix treatment
for everything measured in this package.
"""

from __future__ import annotations

import enum
import math

import numpy as np

from .rng import RandomSource

SQRT_HALF = 1.0 / math.sqrt(2.0)

KET0 = np.array([1.0, 0.0], dtype=complex)
KET1 = np.array([0.0, 1.0], dtype=complex)
PLUS = np.array([SQRT_HALF, SQRT_HALF], dtype=complex)
MINUS = np.array([SQRT_HALF, -SQRT_HALF], dtype=complex)
for _arr in (KET0, KET1, PLUS, MINUS):
    _arr.setflags(write=False)

NORM_TOL = 1e-9
INPUT_NORM_TOL = 1e-6


class Basis(enum.Enum):
    Z = "Z"
    X = "X"


_Z = Basis.Z
_X = Basis.X

# Eigenvectors indexed by outcome bit.
_EIGENSTATES = {
    _Z: (KET0, KET1),
    _X: (MINUS, PLUS),
}

# Pauli flips used by the depolarizing channel: bit flip, phase flip, both.
PAULI_BIT = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_PHASE = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI_BOTH = PAULI_BIT @ PAULI_PHASE
_PAULIS = (PAULI_BIT, PAULI_PHASE, PAULI_BOTH)
for _arr in _PAULIS:
    _arr.setflags(write=False)


def basis_eigenstate(basis: Basis, outcome: int) -> np.ndarray:
    """Single-qubit eigenstate for an outcome bit in the given basis."""
    return _EIGENSTATES[basis][outcome].copy()


def _inner(a: np.ndarray, b: np.ndarray) -> complex:
    # Elementwise product plus short sum: unlike BLAS dot kernels this
    # cancels exactly for orthogonal states.
    return complex((np.conj(a) * b).sum())


def squared_norm(state: np.ndarray) -> float:
    state = np.asarray(state, dtype=complex)
    return float((state.real * state.real + state.imag * state.imag).sum())


def is_normalized(state: np.ndarray, tol: float = NORM_TOL) -> bool:
    return abs(squared_norm(state) - 1.0) <= tol


def _require_qubit_index(which: int) -> None:
    if which not in (1, 2):
        raise ValueError(f"qubit index must be 1 or 2, got {which}")


def _norm_error(total: float) -> ValueError:
    return ValueError(f"state norm deviates by {abs(total - 1.0):.3e}; upstream bug")


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Tensor product of two single-qubit states; qubit `a` is the left factor."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def states_equal(a: np.ndarray, b: np.ndarray, tol: float = 1e-12) -> bool:
    """Equality up to global phase: |<a|b>|^2 >= 1 - tol."""
    c = _inner(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))
    overlap = c.real * c.real + c.imag * c.imag
    return bool(overlap >= 1.0 - tol)


# Measurement kernels ------------------------------------------------------
#
# _components projects one qubit of a (2, 2) amplitude block onto the two
# basis eigenstates, returning one 2-vector over the untouched qubit per
# outcome. _weight is the squared norm of such a component as pure float
# arithmetic (no sqrt, no BLAS). _build_post reassembles the collapsed,
# renormalized two-qubit state for one outcome.


def _components(amps: np.ndarray, which: int, basis: Basis):
    if which == 1:
        r0, r1 = amps[0], amps[1]
    else:
        r0, r1 = amps[:, 0], amps[:, 1]
    if basis is _Z:
        return r0, r1
    return (r0 - r1) * SQRT_HALF, (r0 + r1) * SQRT_HALF


def _weight(comp: np.ndarray) -> float:
    a = complex(comp[0])
    b = complex(comp[1])
    return a.real * a.real + a.imag * a.imag + b.real * b.real + b.imag * b.imag


def _build_post(comp: np.ndarray, weight: float, which: int, basis: Basis, outcome: int):
    scaled = comp / math.sqrt(weight)
    post = np.zeros(4, dtype=complex)
    if basis is _Z:
        if which == 1:
            post[2 * outcome : 2 * outcome + 2] = scaled
        else:
            post[outcome::2] = scaled
    else:
        top = scaled * SQRT_HALF
        if which == 1:
            post[:2] = top
            post[2:] = top if outcome == 1 else -top
        else:
            post[0::2] = top
            post[1::2] = top if outcome == 1 else -top
    return post


def measurement_distribution(state: np.ndarray, which: int, basis: Basis) -> tuple[float, tuple]:
    """Outcome distribution of measuring one qubit of a two-qubit state.

    Returns (p(outcome=1), (post_state_0, post_state_1)) where the post
    states are the renormalized collapsed two-qubit states and None marks
    an impossible outcome. The two probabilities sum to exactly 1.
    Rejects states whose squared norm strays more than 1e-6 from 1.
    """
    state = np.asarray(state, dtype=complex)
    _require_qubit_index(which)
    amps = state.reshape(2, 2)
    c0, c1 = _components(amps, which, basis)
    w0, w1 = _weight(c0), _weight(c1)
    total = w0 + w1
    if abs(total - 1.0) > INPUT_NORM_TOL:
        raise _norm_error(total)
    posts = (
        None if w0 == 0.0 else _build_post(c0, w0, which, basis, 0),
        None if w1 == 0.0 else _build_post(c1, w1, which, basis, 1),
    )
    return w1 / total, posts


def measure_qubit(
    state: np.ndarray, which: int, basis: Basis, rng: RandomSource
) -> tuple[int, np.ndarray]:
    """Projective measurement of qubit `which` (1 or 2) of a two-qubit state.

    Draws the outcome from the Born rule (one uniform consumed) and
    returns (outcome, collapsed renormalized state). Sampling converges
    to `measurement_distribution` by construction.
    """
    state = np.asarray(state, dtype=complex)
    _require_qubit_index(which)
    amps = state.reshape(2, 2)
    c0, c1 = _components(amps, which, basis)
    w0, w1 = _weight(c0), _weight(c1)
    total = w0 + w1
    if abs(total - 1.0) > INPUT_NORM_TOL:
        raise _norm_error(total)
    if rng.uniform() < w1 / total:
        return 1, _build_post(c1, w1, which, basis, 1)
    return 0, _build_post(c0, w0, which, basis, 0)


def _single_components(state: np.ndarray, basis: Basis) -> tuple[complex, complex]:
    a, b = complex(state[0]), complex(state[1])
    if basis is _Z:
        return a, b
    return (a - b) * SQRT_HALF, (a + b) * SQRT_HALF


def single_distribution(state: np.ndarray, basis: Basis) -> tuple[float, tuple]:
    """Single-qubit analogue of `measurement_distribution`."""
    state = np.asarray(state, dtype=complex)
    c0, c1 = _single_components(state, basis)
    w0 = c0.real * c0.real + c0.imag * c0.imag
    w1 = c1.real * c1.real + c1.imag * c1.imag
    total = w0 + w1
    if abs(total - 1.0) > INPUT_NORM_TOL:
        raise _norm_error(total)
    posts = (
        None if w0 == 0.0 else _EIGENSTATES[basis][0] * (c0 / abs(c0)),
        None if w1 == 0.0 else _EIGENSTATES[basis][1] * (c1 / abs(c1)),
    )
    return w1 / total, posts


def measure_single(state: np.ndarray, basis: Basis, rng: RandomSource) -> tuple[int, np.ndarray]:
    """Projective measurement of a single qubit; returns (outcome, post state)."""
    state = np.asarray(state, dtype=complex)
    c0, c1 = _single_components(state, basis)
    w0 = c0.real * c0.real + c0.imag * c0.imag
    w1 = c1.real * c1.real + c1.imag * c1.imag
    total = w0 + w1
    if abs(total - 1.0) > INPUT_NORM_TOL:
        raise _norm_error(total)
    if rng.uniform() < w1 / total:
        return 1, _EIGENSTATES[basis][1] * (c1 / abs(c1))
    return 0, _EIGENSTATES[basis][0] * (c0 / abs(c0))


def apply_pauli(state: np.ndarray, which: int, pauli_index: int) -> np.ndarray:
    """Apply a Pauli flip (0 bit, 1 phase, 2 both) to one qubit of a pair state."""
    _require_qubit_index(which)
    m = _PAULIS[pauli_index]
    amps = np.asarray(state, dtype=complex).reshape(2, 2)
    out = m @ amps if which == 1 else amps @ m.T
    return out.reshape(4)


def apply_pauli_single(state: np.ndarray, pauli_index: int) -> np.ndarray:
    return _PAULIS[pauli_index] @ np.asarray(state, dtype=complex)


def depolarize(state: np.ndarray, which: int, p: float, rng: RandomSource) -> np.ndarray:
    """Depolarizing trajectory step on one qubit of a pair state.

    With probability p applies one of the three Pauli flips, chosen
    uniformly; otherwise returns the state unchanged. Consumes one
    uniform always, plus a second one when a flip is applied.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"flip probability must lie in [0, 1], got {p}")
    _require_qubit_index(which)
    if rng.uniform() < p:
        return apply_pauli(state, which, rng.choice(3))
    return state


def depolarize_single(state: np.ndarray, p: float, rng: RandomSource) -> np.ndarray:
    """Depolarizing trajectory step on a single-qubit state."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"flip probability must lie in [0, 1], got {p}")
    if rng.uniform() < p:
        return apply_pauli_single(state, rng.choice(3))
    return state
