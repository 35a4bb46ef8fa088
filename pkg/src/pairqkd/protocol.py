"""State machines for the qubit-pair key scheme and the BB84 baseline.

Pair scheme: Alice sends two-qubit states drawn from four labels, two in
the z basis (|1>|1>, |0>|0>) and two in the x basis (the even and odd
Bell-type combinations of |+->|+->). Bob picks one qubit of each pair for
his secure key, measuring it in a random basis, and measures the other
(auxiliary) qubit in X. After bases are announced and non-matching rounds
discarded, Bob adds his auxiliary key to his secure key bit by bit modulo
2, which reproduces Alice's key exactly on a clean channel.

Bit conventions used throughout:

- measured states map to bits as |1> -> 1, |0> -> 0, |+> -> 1, |-> -> 0,
  which is exactly the outcome-bit convention of the simulator;
- the auxiliary bit is the auxiliary X outcome when the secure
  measurement was in X, and is defined to be 0 when the secure
  measurement was in Z. Only this reading makes the final XOR reproduce
  Alice's key on z rounds; the resolved ambiguity is also noted in the
  README.

BB84 baseline: single qubits, same bit coding, sifting on matching bases.
Its sift result carries an all-zero auxiliary key so the downstream
combine step is shared between both protocols.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import qsim
from .qsim import Basis
from .rng import RandomSource


class PairStateLabel(enum.Enum):
    """Alice's four pair states; values are the wire names."""

    Z1 = "Z1"
    Z0 = "Z0"
    XPHI_PLUS = "XPHI+"
    XPHI_MINUS = "XPHI-"

    @property
    def basis(self) -> Basis:
        return Basis.Z if self in (PairStateLabel.Z1, PairStateLabel.Z0) else Basis.X

    @property
    def key_bit(self) -> int:
        return _LABEL_KEY_BITS[self]


_LABEL_KEY_BITS = {
    PairStateLabel.Z1: 1,
    PairStateLabel.Z0: 0,
    PairStateLabel.XPHI_PLUS: 0,
    PairStateLabel.XPHI_MINUS: 1,
}

# Emission order; alice_emit draws uniformly over this tuple.
PAIR_LABELS = (
    PairStateLabel.Z1,
    PairStateLabel.Z0,
    PairStateLabel.XPHI_PLUS,
    PairStateLabel.XPHI_MINUS,
)


def _build_pair_state(label: PairStateLabel) -> np.ndarray:
    if label is PairStateLabel.Z1:
        return qsim.tensor(qsim.KET1, qsim.KET1)
    if label is PairStateLabel.Z0:
        return qsim.tensor(qsim.KET0, qsim.KET0)
    if label is PairStateLabel.XPHI_PLUS:
        combo = qsim.tensor(qsim.PLUS, qsim.PLUS) + qsim.tensor(qsim.MINUS, qsim.MINUS)
    else:
        combo = qsim.tensor(qsim.PLUS, qsim.MINUS) + qsim.tensor(qsim.MINUS, qsim.PLUS)
    return combo * qsim.SQRT_HALF


def _freeze(state: np.ndarray) -> np.ndarray:
    state.setflags(write=False)
    return state


_PAIR_STATES = {label: _freeze(_build_pair_state(label)) for label in PairStateLabel}


def pair_state(label: PairStateLabel) -> np.ndarray:
    """Two-qubit state for a pair label, built from its defining expansion.

    Returns a shared read-only array; simulator operations never mutate
    their inputs.
    """
    return _PAIR_STATES[label]


def secure_bit_from_outcome(outcome: int) -> int:
    """Key bit of a secure-measurement outcome (identity under the bit coding)."""
    return int(outcome)


def aux_bit_from_outcome(secure_basis: Basis, aux_outcome: int) -> int:
    """Auxiliary key bit: the X outcome on x rounds, pinned to 0 on z rounds."""
    return int(aux_outcome) if secure_basis is Basis.X else 0


@dataclass(frozen=True)
class AliceRound:
    round_id: int
    label: PairStateLabel

    @property
    def basis(self) -> Basis:
        return self.label.basis

    @property
    def key_bit(self) -> int:
        return self.label.key_bit


@dataclass(frozen=True)
class BobRound:
    round_id: int
    secure_qubit: int  # 1 or 2; the other qubit feeds the auxiliary key
    secure_basis: Basis
    secure_outcome: int
    aux_outcome: int

    def __post_init__(self):
        if self.secure_qubit not in (1, 2):
            raise ValueError(f"secure qubit must be 1 or 2, got {self.secure_qubit}")

    @property
    def aux_qubit(self) -> int:
        return 3 - self.secure_qubit

    @property
    def secure_bit(self) -> int:
        return secure_bit_from_outcome(self.secure_outcome)

    @property
    def aux_bit(self) -> int:
        return aux_bit_from_outcome(self.secure_basis, self.aux_outcome)


@dataclass(frozen=True)
class Bb84Round:
    round_id: int
    basis: Basis
    bit: int


class Verdict(enum.Enum):
    CLEAN = "clean"
    SUSPECT = "suspect"


@dataclass
class SiftResult:
    kept_round_ids: list[int]
    alice_key: np.ndarray
    bob_secure_key: np.ndarray
    bob_aux_key: np.ndarray

    def __len__(self) -> int:
        return len(self.kept_round_ids)


@dataclass
class VerificationReport:
    disclosed_round_ids: list[int]
    disclosed_positions: list[int]
    mismatches: int
    qber_estimate: float
    verdict: Verdict


def alice_emit(rng: RandomSource, round_id: int = 0) -> tuple[AliceRound, np.ndarray]:
    """Draw one of the four pair labels uniformly; one uniform consumed."""
    label = PAIR_LABELS[rng.choice(4)]
    return AliceRound(round_id, label), pair_state(label)


def bob_choose(rng: RandomSource) -> tuple[int, Basis]:
    """Bob's per-round choices: secure qubit, then secure basis (two uniforms)."""
    secure_qubit = rng.choice(2) + 1
    secure_basis = Basis.Z if rng.choice(2) == 0 else Basis.X
    return secure_qubit, secure_basis


def bob_outcomes(
    state: np.ndarray, secure_qubit: int, secure_basis: Basis, rng: RandomSource
) -> tuple[int, int]:
    """Measure the secure qubit first, then the auxiliary qubit in X."""
    secure_outcome, state = qsim.measure_qubit(state, secure_qubit, secure_basis, rng)
    aux_outcome, _ = qsim.measure_qubit(state, 3 - secure_qubit, Basis.X, rng)
    return secure_outcome, aux_outcome


def bob_round_from_outcomes(
    round_id: int, secure_qubit: int, secure_basis: Basis, secure_outcome: int, aux_outcome: int
) -> BobRound:
    return BobRound(round_id, secure_qubit, secure_basis, secure_outcome, aux_outcome)


def bob_measure_pair(state: np.ndarray, rng: RandomSource, round_id: int = 0) -> BobRound:
    """Bob's full treatment of one incoming pair with a single random stream."""
    secure_qubit, secure_basis = bob_choose(rng)
    secure_outcome, aux_outcome = bob_outcomes(state, secure_qubit, secure_basis, rng)
    return bob_round_from_outcomes(round_id, secure_qubit, secure_basis, secure_outcome, aux_outcome)


def _check_synchronized(alice_rounds, bob_rounds) -> None:
    if len(alice_rounds) != len(bob_rounds):
        raise ValueError(
            f"desynchronized transcript: {len(alice_rounds)} Alice rounds "
            f"vs {len(bob_rounds)} Bob rounds"
        )
    for a, b in zip(alice_rounds, bob_rounds):
        if a.round_id != b.round_id:
            raise ValueError(f"desynchronized transcript: round {a.round_id} vs {b.round_id}")


def sift(alice_rounds: list[AliceRound], bob_rounds: list[BobRound]) -> SiftResult:
    """Keep the rounds where Alice's basis matches Bob's secure basis."""
    _check_synchronized(alice_rounds, bob_rounds)
    kept_ids, alice_bits, secure_bits, aux_bits = [], [], [], []
    for a, b in zip(alice_rounds, bob_rounds):
        if a.basis is b.secure_basis:
            kept_ids.append(a.round_id)
            alice_bits.append(a.key_bit)
            secure_bits.append(b.secure_bit)
            aux_bits.append(b.aux_bit)
    return SiftResult(
        kept_round_ids=kept_ids,
        alice_key=np.array(alice_bits, dtype=np.uint8),
        bob_secure_key=np.array(secure_bits, dtype=np.uint8),
        bob_aux_key=np.array(aux_bits, dtype=np.uint8),
    )


def combine_keys(secure, aux) -> np.ndarray:
    """Bitwise XOR of the secure and auxiliary keys."""
    secure = np.asarray(secure, dtype=np.uint8)
    aux = np.asarray(aux, dtype=np.uint8)
    if secure.shape != aux.shape:
        raise ValueError(f"key length mismatch: {secure.shape} vs {aux.shape}")
    return secure ^ aux


def verify_sample(
    alice_key,
    bob_final_key,
    fraction: float,
    rng: RandomSource,
    threshold: float = 0.0,
    round_ids: list[int] | None = None,
) -> VerificationReport:
    """Disclose a random key sample and estimate the error rate.

    Selects ceil(fraction * n) positions uniformly without replacement,
    compares the two keys there, and reports Suspect when the estimate
    exceeds the threshold. Disclosed positions are burned: callers must
    drop them from the final key.
    """
    alice_key = np.asarray(alice_key, dtype=np.uint8)
    bob_final_key = np.asarray(bob_final_key, dtype=np.uint8)
    n = len(alice_key)
    if n == 0 or len(bob_final_key) == 0:
        raise ValueError("cannot verify empty keys")
    if len(bob_final_key) != n:
        raise ValueError(f"key length mismatch: {n} vs {len(bob_final_key)}")
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"verify fraction must lie in (0, 1], got {fraction}")
    k = math.ceil(fraction * n)
    positions = rng.sample_indices(n, k)
    mismatches = int(np.sum(alice_key[positions] != bob_final_key[positions]))
    qber = mismatches / k
    verdict = Verdict.CLEAN if qber <= threshold else Verdict.SUSPECT
    disclosed_ids = [round_ids[i] for i in positions] if round_ids is not None else list(positions)
    return VerificationReport(
        disclosed_round_ids=disclosed_ids,
        disclosed_positions=list(positions),
        mismatches=mismatches,
        qber_estimate=qber,
        verdict=verdict,
    )


def remove_positions(key: np.ndarray, positions: list[int]) -> np.ndarray:
    """Final key after burning the disclosed sample positions."""
    return np.delete(np.asarray(key, dtype=np.uint8), positions)


# BB84 baseline ---------------------------------------------------------

# Emission order of the four single-qubit states: |0>, |1>, |+>, |->.
_BB84_STATES = ((Basis.Z, 0), (Basis.Z, 1), (Basis.X, 1), (Basis.X, 0))

_BB84_STATE_CACHE = {
    (basis, bit): _freeze(qsim.basis_eigenstate(basis, bit)) for basis, bit in _BB84_STATES
}


def bb84_state(basis: Basis, bit: int) -> np.ndarray:
    """Single-qubit state encoding a bit: |0> -> 0, |1> -> 1, |+> -> 1, |-> -> 0.

    Returns a shared read-only array.
    """
    return _BB84_STATE_CACHE[(basis, int(bit))]


def bb84_alice_emit(rng: RandomSource, round_id: int = 0) -> tuple[Bb84Round, np.ndarray]:
    """Draw one of the four single-qubit states uniformly; one uniform consumed."""
    basis, bit = _BB84_STATES[rng.choice(4)]
    return Bb84Round(round_id, basis, bit), bb84_state(basis, bit)


def bb84_bob_measure(state: np.ndarray, rng: RandomSource, round_id: int = 0) -> Bb84Round:
    """Measure in a uniformly chosen basis; the outcome bit is the key bit."""
    basis = Basis.Z if rng.choice(2) == 0 else Basis.X
    outcome, _ = qsim.measure_single(state, basis, rng)
    return Bb84Round(round_id, basis, outcome)


def bb84_sift(alice_rounds: list[Bb84Round], bob_rounds: list[Bb84Round]) -> SiftResult:
    """Keep matching-basis rounds; the auxiliary key is all zeros."""
    _check_synchronized(alice_rounds, bob_rounds)
    kept_ids, alice_bits, bob_bits = [], [], []
    for a, b in zip(alice_rounds, bob_rounds):
        if a.basis is b.basis:
            kept_ids.append(a.round_id)
            alice_bits.append(a.bit)
            bob_bits.append(b.bit)
    return SiftResult(
        kept_round_ids=kept_ids,
        alice_key=np.array(alice_bits, dtype=np.uint8),
        bob_secure_key=np.array(bob_bits, dtype=np.uint8),
        bob_aux_key=np.zeros(len(kept_ids), dtype=np.uint8),
    )


def otp_encrypt(message: bytes, key_bits) -> bytes:
    """One-time-pad XOR of a message with key material.

    Requires at least 8 key bits per message byte; the same call decrypts.
    Key bits map to pad bytes most significant bit first.
    """
    key_bits = np.asarray(key_bits, dtype=np.uint8)
    needed = 8 * len(message)
    if len(key_bits) < needed:
        raise ValueError(
            f"key exhausted: {len(key_bits)} bits for a {len(message)}-byte message; "
            "one-time-pad key material must never be reused"
        )
    if not message:
        return b""
    pad = np.packbits(key_bits[:needed])
    return (np.frombuffer(message, dtype=np.uint8) ^ pad).tobytes()
