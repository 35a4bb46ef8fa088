"""Eavesdropper models for the quantum channel.

All strategies are intercept-resend style: Eve measures in-flight qubits
and forwards the collapsed states, so no-cloning is honored implicitly.
Supported strategies, with their config strings:

- ``none``                         no interference;
- ``intercept-both:<policy>``      measure both qubits of a pair, each in
                                   a basis drawn per policy (``random``,
                                   ``z``, ``x``);
- ``intercept-one:<q>:<policy>``   measure only qubit q (1 or 2);
- ``role-oracle``                  an explicitly unphysical adversary who
                                   is told which qubit Bob will use for
                                   the auxiliary key and measures exactly
                                   that qubit in X.

Eve decodes her outcomes with the receiver's own bit conventions. For
intercept-both she assigns roles to her two outcomes by a uniform guess;
once bases are announced she applies the z-round rule (auxiliary bit
pinned to 0) like any listener, which is what `eve_final_key_bit` and
`eve_aux_key_bit` implement. On single-qubit (BB84-style) traffic her
decoded outcome is directly her key guess.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import qsim
from .qsim import Basis
from .rng import RandomSource


class EveKind(enum.Enum):
    NONE = "none"
    INTERCEPT_BOTH = "intercept-both"
    INTERCEPT_ONE = "intercept-one"
    ROLE_ORACLE = "role-oracle"


class BasisPolicy(enum.Enum):
    RANDOM_ZX = "random"
    ALWAYS_Z = "z"
    ALWAYS_X = "x"


@dataclass(frozen=True)
class EveStrategy:
    kind: EveKind
    policy: BasisPolicy | None = None
    which_qubit: int | None = None

    def __post_init__(self):
        needs_policy = self.kind in (EveKind.INTERCEPT_BOTH, EveKind.INTERCEPT_ONE)
        if needs_policy and self.policy is None:
            raise ValueError(f"{self.kind.value} requires a basis policy")
        if not needs_policy and self.policy is not None:
            raise ValueError(f"{self.kind.value} takes no basis policy")
        if self.kind is EveKind.INTERCEPT_ONE:
            if self.which_qubit not in (1, 2):
                raise ValueError("intercept-one requires a target qubit of 1 or 2")
        elif self.which_qubit is not None:
            raise ValueError(f"{self.kind.value} takes no target qubit")

    @classmethod
    def parse(cls, text: str) -> "EveStrategy":
        """Parse a config string such as ``intercept-both:random``."""
        parts = text.strip().lower().split(":")
        try:
            if parts[0] == "none" and len(parts) == 1:
                return cls(EveKind.NONE)
            if parts[0] == "role-oracle" and len(parts) == 1:
                return cls(EveKind.ROLE_ORACLE)
            if parts[0] == "intercept-both" and len(parts) == 2:
                return cls(EveKind.INTERCEPT_BOTH, BasisPolicy(parts[1]))
            if parts[0] == "intercept-one" and len(parts) == 3:
                return cls(EveKind.INTERCEPT_ONE, BasisPolicy(parts[2]), int(parts[1]))
        except ValueError as exc:
            raise ValueError(f"bad eavesdropper spec {text!r}: {exc}") from None
        raise ValueError(f"bad eavesdropper spec {text!r}")

    def spec_string(self) -> str:
        if self.kind is EveKind.INTERCEPT_BOTH:
            return f"intercept-both:{self.policy.value}"
        if self.kind is EveKind.INTERCEPT_ONE:
            return f"intercept-one:{self.which_qubit}:{self.policy.value}"
        return self.kind.value


NO_EVE = EveStrategy(EveKind.NONE)


@dataclass(frozen=True)
class EveRecord:
    """Eve's raw per-round guesses; None marks quantities she never measured."""

    round_id: int
    guessed_secure_bit: int | None = None
    guessed_aux_bit: int | None = None


def _policy_basis(policy: BasisPolicy, rng: RandomSource) -> Basis:
    if policy is BasisPolicy.ALWAYS_Z:
        return Basis.Z
    if policy is BasisPolicy.ALWAYS_X:
        return Basis.X
    return Basis.Z if rng.choice(2) == 0 else Basis.X


def eve_intercept(
    state: np.ndarray,
    strategy: EveStrategy,
    role_hint: int | None,
    rng: RandomSource,
    round_id: int = 0,
) -> tuple[np.ndarray, EveRecord]:
    """Apply Eve's pair-channel action; returns the forwarded state and her record.

    ``role_hint`` is Bob's secure-qubit index and must be given exactly
    when the strategy is the role oracle (it is that adversary's defining
    unphysical input).
    """
    if strategy.kind is EveKind.ROLE_ORACLE:
        if role_hint not in (1, 2):
            raise ValueError("role-oracle interception requires Bob's role as a hint")
    elif role_hint is not None:
        raise ValueError("role hints are only available to the role-oracle adversary")

    if strategy.kind is EveKind.NONE:
        return state, EveRecord(round_id)

    if strategy.kind is EveKind.ROLE_ORACLE:
        aux_qubit = 3 - role_hint
        outcome, state = qsim.measure_qubit(state, aux_qubit, Basis.X, rng)
        return state, EveRecord(round_id, guessed_aux_bit=outcome)

    if strategy.kind is EveKind.INTERCEPT_ONE:
        basis = _policy_basis(strategy.policy, rng)
        outcome, state = qsim.measure_qubit(state, strategy.which_qubit, basis, rng)
        return state, EveRecord(round_id, guessed_secure_bit=outcome)

    # intercept-both: bases for both qubits, measure 1 then 2, guess roles.
    basis1 = _policy_basis(strategy.policy, rng)
    basis2 = _policy_basis(strategy.policy, rng)
    outcome1, state = qsim.measure_qubit(state, 1, basis1, rng)
    outcome2, state = qsim.measure_qubit(state, 2, basis2, rng)
    guessed_secure_qubit = rng.choice(2) + 1
    if guessed_secure_qubit == 1:
        secure_guess, aux_guess = outcome1, outcome2
    else:
        secure_guess, aux_guess = outcome2, outcome1
    return state, EveRecord(round_id, guessed_secure_bit=secure_guess, guessed_aux_bit=aux_guess)


def eve_intercept_single(
    state: np.ndarray,
    strategy: EveStrategy,
    rng: RandomSource,
    round_id: int = 0,
) -> tuple[np.ndarray, EveRecord]:
    """Eve's action on single-qubit (BB84-style) traffic.

    Both intercept flavors collapse to measuring the one qubit in flight;
    the role oracle has no meaning without pairs and is rejected.
    """
    if strategy.kind is EveKind.NONE:
        return state, EveRecord(round_id)
    if strategy.kind is EveKind.ROLE_ORACLE:
        raise ValueError("role-oracle interception is undefined for single-qubit traffic")
    basis = _policy_basis(strategy.policy, rng)
    outcome, state = qsim.measure_single(state, basis, rng)
    return state, EveRecord(round_id, guessed_secure_bit=outcome)


def eve_final_key_bit(record: EveRecord, announced_basis: Basis) -> int | None:
    """Eve's guess of the shared key bit for a kept round, or None without one.

    Applies the receiver's combination rule to her guesses: on x rounds
    the auxiliary guess is XORed in, on z rounds it is dropped.
    """
    if record.guessed_secure_bit is None:
        return None
    if announced_basis is Basis.X and record.guessed_aux_bit is not None:
        return record.guessed_secure_bit ^ record.guessed_aux_bit
    return record.guessed_secure_bit


def eve_aux_key_bit(record: EveRecord, announced_basis: Basis) -> int | None:
    """Eve's reconstruction of Bob's auxiliary key bit, or None without one."""
    if record.guessed_aux_bit is None:
        return None
    return record.guessed_aux_bit if announced_basis is Basis.X else 0
