"""Eavesdropper model tests."""

import math

import pytest

from pairqkd import qsim
from pairqkd.adversary import (
    NO_EVE,
    BasisPolicy,
    EveKind,
    EveRecord,
    EveStrategy,
    eve_aux_key_bit,
    eve_final_key_bit,
    eve_intercept,
    eve_intercept_single,
)
from pairqkd.protocol import PairStateLabel, bb84_state, bob_outcomes, pair_state
from pairqkd.qsim import Basis
from pairqkd.rng import RandomSource


# Strategy parsing -------------------------------------------------------------


def test_parse_round_trips():
    for text in (
        "none",
        "role-oracle",
        "intercept-both:random",
        "intercept-both:z",
        "intercept-both:x",
        "intercept-one:1:random",
        "intercept-one:2:x",
    ):
        assert EveStrategy.parse(text).spec_string() == text


def test_parse_rejects_garbage():
    for text in ("", "evil", "intercept-both", "intercept-both:breidbart",
                 "intercept-one:3:random", "intercept-one:random", "role-oracle:x"):
        with pytest.raises(ValueError):
            EveStrategy.parse(text)


def test_strategy_field_validation():
    with pytest.raises(ValueError):
        EveStrategy(EveKind.INTERCEPT_BOTH)  # missing policy
    with pytest.raises(ValueError):
        EveStrategy(EveKind.NONE, BasisPolicy.ALWAYS_Z)
    with pytest.raises(ValueError):
        EveStrategy(EveKind.INTERCEPT_ONE, BasisPolicy.ALWAYS_Z, 5)
    with pytest.raises(ValueError):
        EveStrategy(EveKind.ROLE_ORACLE, which_qubit=1)


# No interference ----------------------------------------------------------------


def test_no_eve_is_identity():
    rng = RandomSource(1)
    for label in PairStateLabel:
        state = pair_state(label)
        out, record = eve_intercept(state, NO_EVE, None, rng, round_id=7)
        assert qsim.states_equal(out, state, tol=1e-12)
        assert record == EveRecord(7)
        assert record.guessed_secure_bit is None and record.guessed_aux_bit is None


def test_no_eve_single_is_identity():
    rng = RandomSource(2)
    state = bb84_state(Basis.X, 1)
    out, record = eve_intercept_single(state, NO_EVE, rng)
    assert qsim.states_equal(out, state, tol=1e-12)
    assert record.guessed_secure_bit is None


# Role hints ----------------------------------------------------------------------


def test_role_hint_required_for_role_oracle():
    rng = RandomSource(3)
    oracle = EveStrategy(EveKind.ROLE_ORACLE)
    with pytest.raises(ValueError, match="hint"):
        eve_intercept(pair_state(PairStateLabel.Z0), oracle, None, rng)


def test_role_hint_forbidden_otherwise():
    rng = RandomSource(4)
    with pytest.raises(ValueError, match="role-oracle"):
        eve_intercept(pair_state(PairStateLabel.Z0), NO_EVE, 1, rng)


def test_role_oracle_rejected_on_single_qubits():
    rng = RandomSource(5)
    with pytest.raises(ValueError, match="single-qubit"):
        eve_intercept_single(bb84_state(Basis.Z, 0), EveStrategy(EveKind.ROLE_ORACLE), rng)


# Role oracle physics ---------------------------------------------------------------


def test_role_oracle_aux_guess_always_matches_bob():
    # Eve measures the true auxiliary qubit in X before Bob; Bob's later X
    # measurement of the same qubit must reproduce her outcome every time.
    oracle = EveStrategy(EveKind.ROLE_ORACLE)
    rng = RandomSource(6)
    for trial in range(400):
        label = (PairStateLabel.XPHI_PLUS, PairStateLabel.XPHI_MINUS)[trial % 2]
        secure_qubit = 1 + (trial // 2) % 2
        state, record = eve_intercept(pair_state(label), oracle, secure_qubit, rng)
        assert record.guessed_secure_bit is None
        secure_out, aux_out = bob_outcomes(state, secure_qubit, Basis.X, rng)
        assert aux_out == record.guessed_aux_bit


def test_role_oracle_leaves_product_secure_qubit_untouched():
    oracle = EveStrategy(EveKind.ROLE_ORACLE)
    rng = RandomSource(7)
    for label, expect in ((PairStateLabel.Z0, 0), (PairStateLabel.Z1, 1)):
        for _ in range(50):
            state, _ = eve_intercept(pair_state(label), oracle, 1, rng)
            secure_out, _ = bob_outcomes(state, 1, Basis.Z, rng)
            assert secure_out == expect


# Intercept-resend ---------------------------------------------------------------------


def test_intercept_both_z_on_product_state_is_transparent():
    strategy = EveStrategy.parse("intercept-both:z")
    rng = RandomSource(8)
    state0 = pair_state(PairStateLabel.Z0)
    out, record = eve_intercept(state0, strategy, None, rng)
    assert qsim.states_equal(out, state0, tol=1e-12)
    assert record.guessed_secure_bit == 0 and record.guessed_aux_bit == 0


def test_intercept_forwards_collapsed_eigenstate():
    # Re-measuring the forwarded state in Eve's bases must reproduce her
    # outcomes with certainty (resend honors the collapse), and the two X
    # outcomes on the even combination stay perfectly correlated.
    strategy = EveStrategy.parse("intercept-both:x")
    rng = RandomSource(9)
    for _ in range(100):
        out, record = eve_intercept(pair_state(PairStateLabel.XPHI_PLUS), strategy, None, rng)
        p1_q1, _ = qsim.measurement_distribution(out, 1, Basis.X)
        p1_q2, _ = qsim.measurement_distribution(out, 2, Basis.X)
        assert {p1_q1, p1_q2} <= {0.0, 1.0}
        assert int(p1_q1) == int(p1_q2)
        assert {record.guessed_secure_bit, record.guessed_aux_bit} == {int(p1_q1)}


def test_intercept_both_records_both_guesses():
    strategy = EveStrategy.parse("intercept-both:random")
    rng = RandomSource(10)
    _, record = eve_intercept(pair_state(PairStateLabel.XPHI_MINUS), strategy, None, rng)
    assert record.guessed_secure_bit in (0, 1)
    assert record.guessed_aux_bit in (0, 1)


def test_intercept_one_records_single_guess():
    strategy = EveStrategy.parse("intercept-one:2:random")
    rng = RandomSource(11)
    out, record = eve_intercept(pair_state(PairStateLabel.Z1), strategy, None, rng)
    assert record.guessed_secure_bit in (0, 1)
    assert record.guessed_aux_bit is None
    assert abs(qsim.squared_norm(out) - 1.0) <= 1e-9


def test_single_qubit_intercept_sampled_error_rate():
    # Intercept-resend on single qubits: measuring |+> after a random-basis
    # interception errs with probability 1/4 when re-measured in X.
    strategy = EveStrategy.parse("intercept-both:random")
    rng = RandomSource(12)
    n = 20_000
    errors = 0
    for _ in range(n):
        out, _ = eve_intercept_single(bb84_state(Basis.X, 1), strategy, rng)
        bit, _ = qsim.measure_single(out, Basis.X, rng)
        errors += bit != 1
    sigma = math.sqrt(0.25 * 0.75 / n)
    assert abs(errors / n - 0.25) <= 4 * sigma


# Eve's decoders -----------------------------------------------------------------------


def test_eve_final_key_bit_conventions():
    rec = EveRecord(0, guessed_secure_bit=1, guessed_aux_bit=1)
    assert eve_final_key_bit(rec, Basis.X) == 0  # 1 xor 1
    assert eve_final_key_bit(rec, Basis.Z) == 1  # aux dropped on z rounds
    only_secure = EveRecord(0, guessed_secure_bit=1)
    assert eve_final_key_bit(only_secure, Basis.X) == 1
    assert eve_final_key_bit(EveRecord(0), Basis.Z) is None
    assert eve_final_key_bit(EveRecord(0, guessed_aux_bit=1), Basis.X) is None


def test_eve_aux_key_bit_conventions():
    rec = EveRecord(0, guessed_aux_bit=1)
    assert eve_aux_key_bit(rec, Basis.X) == 1
    assert eve_aux_key_bit(rec, Basis.Z) == 0  # public z-round convention
    assert eve_aux_key_bit(EveRecord(0, guessed_secure_bit=1), Basis.X) is None
