"""Oracle and experiment-runner tests.

The enumeration's headline marginals are asserted against independently
hand-derived branch counts (documented next to each constant), never
against the enumeration itself.
"""

import dataclasses
import json
import math

import numpy as np
import pytest

from pairqkd import analysis, protocol
from pairqkd.adversary import NO_EVE, EveStrategy
from pairqkd.analysis import (
    ExperimentConfig,
    Protocol,
    enumerate_exact,
    montecarlo_matches_oracle,
    run_experiment,
    run_experiment_full,
    stats_to_csv,
    stats_to_dict,
    stats_to_json,
    trace_csv,
    trace_table,
    wilson_halfwidth,
    _enumerate_pair,
)
from pairqkd.pinned import PINNED_ORACLE
from pairqkd.protocol import Verdict
from pairqkd.qsim import Basis

import worked_example

IB_RANDOM = EveStrategy.parse("intercept-both:random")
IO_ONE = EveStrategy.parse("intercept-one:1:random")
ROLE_ORACLE = EveStrategy.parse("role-oracle")


# Exact enumeration ------------------------------------------------------------


def test_pair_honest_marginals_exact():
    dist = enumerate_exact(Protocol.PAIR)
    assert dist.total_probability == 1.0
    assert dist.sift_rate == 0.5
    assert dist.qber_final == 0.0
    # Half the kept rounds are x rounds and half of those flip the secure
    # bit, so the pre-combination error rate is exactly 1/4.
    assert dist.qber_sifted == 0.25
    assert dist.eve_secure_agreement is None
    assert dist.eve_aux_agreement is None


def test_bb84_honest_marginals_exact():
    dist = enumerate_exact(Protocol.BB84)
    assert dist.total_probability == 1.0
    assert dist.sift_rate == 0.5
    assert dist.qber_final == 0.0


def test_bb84_intercept_resend_quarter():
    # Classic count: matching-basis interception is transparent (half the
    # kept rounds), mismatching interception randomizes Bob's outcome
    # (error 1/2), so the sifted error rate is exactly 1/4 and Eve's
    # agreement 1/2 + 1/4 = 3/4. Holds for random, always-z and always-x.
    for spec in ("intercept-both:random", "intercept-both:z", "intercept-both:x",
                 "intercept-one:1:random"):
        dist = enumerate_exact(Protocol.BB84, EveStrategy.parse(spec))
        assert dist.qber_sifted == 0.25
        assert dist.qber_final == 0.25
        assert dist.eve_secure_agreement == 0.75
        assert dist.sift_rate == 0.5


def test_pair_intercept_both_random():
    # Hand enumeration over Eve's four basis pairs: ZZ and XX cells err
    # 1/4 each, ZX and XZ err 3/8 each, averaging 5/16; Eve's key guesses
    # succeed at (3/4 + 3/4 + 5/8 + 5/8)/4 = 11/16.
    dist = enumerate_exact(Protocol.PAIR, IB_RANDOM)
    assert dist.qber_final == 5 / 16
    assert dist.eve_secure_agreement == 11 / 16


def test_pair_intercept_both_fixed_bases():
    # Always-Z: transparent on z rounds, x rounds collapse to products and
    # the combined bit goes fifty-fifty: error 1/2 * 1/2 = 1/4. Always-X
    # mirrors it: x rounds transparent, z rounds randomized.
    for spec in ("intercept-both:z", "intercept-both:x"):
        dist = enumerate_exact(Protocol.PAIR, EveStrategy.parse(spec))
        assert dist.qber_final == 0.25
        assert dist.eve_secure_agreement == 0.75


def test_pair_intercept_one():
    # One qubit measured in a random basis: z rounds err 1/8 (X-basis hit
    # on the measured qubit randomizes it half the time Bob uses it),
    # x rounds err 1/4 (Z-basis hit breaks the pair correlation), mean 3/16.
    dist = enumerate_exact(Protocol.PAIR, IO_ONE)
    assert dist.qber_final == 3 / 16
    assert dist.eve_secure_agreement == 5 / 8
    assert dist.eve_aux_agreement is None


def test_role_oracle_marginals():
    dist = enumerate_exact(Protocol.PAIR, ROLE_ORACLE)
    honest = enumerate_exact(Protocol.PAIR)
    assert dist.eve_aux_agreement == 1.0
    assert dist.eve_secure_agreement is None
    assert dist.qber_final == honest.qber_final == 0.0
    assert dist.sift_rate == honest.sift_rate


def test_role_oracle_rejected_for_bb84():
    with pytest.raises(ValueError):
        enumerate_exact(Protocol.BB84, ROLE_ORACLE)
    with pytest.raises(ValueError):
        ExperimentConfig(protocol=Protocol.BB84, rounds=10, seed=0, eve=ROLE_ORACLE)


def test_probability_mass_complete_across_config_grid():
    for proto in Protocol:
        for spec in ("none", "intercept-both:random", "intercept-both:z",
                     "intercept-both:x", "intercept-one:1:random"):
            for noise in (0.0, 0.05, 1.0):
                dist = enumerate_exact(proto, EveStrategy.parse(spec), noise)
                assert abs(dist.total_probability - 1.0) <= 1e-12
    dist = enumerate_exact(Protocol.PAIR, ROLE_ORACLE, 0.05)
    assert abs(dist.total_probability - 1.0) <= 1e-12


def test_entries_view_shape():
    dist = enumerate_exact(Protocol.PAIR, IB_RANDOM)
    entries = dist.entries
    assert abs(sum(entries.values()) - 1.0) <= 1e-12
    for (alice_bit, final_bit, guess, kept), p in entries.items():
        assert alice_bit in (0, 1)
        assert final_bit in (0, 1)
        assert guess in (0, 1)
        assert isinstance(kept, bool)
        assert 0.0 < p <= 1.0


_MARGINAL_ATTRS = ("sift_rate", "qber_final", "qber_sifted",
                   "eve_secure_agreement", "eve_aux_agreement")


def _assert_marginals_equal(a, b):
    for attr in _MARGINAL_ATTRS:
        va, vb = getattr(a, attr), getattr(b, attr)
        if va is None:
            assert vb is None, attr
        else:
            assert abs(va - vb) <= 1e-12, attr


def test_oracle_role_symmetry():
    # All four pair states are symmetric under qubit exchange, so forcing
    # Bob's secure qubit to 1 or to 2 leaves every marginal unchanged for
    # any adversary that treats the qubits symmetrically.
    for spec in ("none", "intercept-both:random", "intercept-both:z",
                 "intercept-both:x", "role-oracle"):
        eve = EveStrategy.parse(spec)
        one, two = (
            analysis.ExactDistribution(Protocol.PAIR, eve, 0.0, _enumerate_pair(eve, 0.0, roles=(r,)))
            for r in (1, 2)
        )
        _assert_marginals_equal(one, two)


def test_oracle_role_symmetry_intercept_one():
    # A one-qubit interception singles out a physical qubit, so the
    # exchange symmetry swaps Eve's target together with Bob's role:
    # target 1 with secure qubit 1 matches target 2 with secure qubit 2,
    # and the role-averaged marginals agree between the two targets.
    io1, io2 = (EveStrategy.parse(f"intercept-one:{q}:random") for q in (1, 2))
    for role in (1, 2):
        a = analysis.ExactDistribution(
            Protocol.PAIR, io1, 0.0, _enumerate_pair(io1, 0.0, roles=(role,))
        )
        b = analysis.ExactDistribution(
            Protocol.PAIR, io2, 0.0, _enumerate_pair(io2, 0.0, roles=(3 - role,))
        )
        _assert_marginals_equal(a, b)
    _assert_marginals_equal(
        enumerate_exact(Protocol.PAIR, io1), enumerate_exact(Protocol.PAIR, io2)
    )


def test_oracle_reproduces_correlation_rules():
    dist = enumerate_exact(Protocol.PAIR)
    for key, p in dist.joint.items():
        if not key.kept:
            continue
        # Final bit always equals Alice's bit, z rounds carry aux 0.
        assert key.bob_final_bit == key.alice_bit
        if key.bob_secure_bit == key.alice_bit:
            assert key.bob_aux_bit == 0


def test_noise_shifts_qber_by_known_amount():
    # Per qubit, two of three Pauli branches flip the relevant outcome:
    # flip probability f = 2p/3. Pair z rounds err with f (secure qubit
    # only); x rounds err when exactly one qubit flips: 2f(1-f).
    p = 0.3
    f = 2 * p / 3
    expected_pair = 0.5 * f + 0.5 * (2 * f * (1 - f))
    dist = enumerate_exact(Protocol.PAIR, NO_EVE, p)
    assert abs(dist.qber_final - expected_pair) <= 1e-12
    expected_bb84 = f
    dist = enumerate_exact(Protocol.BB84, NO_EVE, p)
    assert abs(dist.qber_final - expected_bb84) <= 1e-12


def test_pinned_constants_still_derived():
    for (proto_name, eve_spec), expected in PINNED_ORACLE.items():
        dist = enumerate_exact(Protocol(proto_name), EveStrategy.parse(eve_spec))
        for field, value in expected.items():
            got = getattr(dist, field)
            if value is None:
                assert got is None, (eve_spec, field)
            else:
                assert got == value, (eve_spec, field, got, value)


# Monte Carlo runner --------------------------------------------------------------


def test_run_experiment_honest_pair():
    cfg = ExperimentConfig(protocol=Protocol.PAIR, rounds=10_000, seed=42)
    result = run_experiment_full(cfg)
    stats = result.stats
    assert stats.rounds_sent == 10_000
    assert stats.qber_final == 0.0
    assert abs(stats.sift_rate - 0.5) <= 0.02
    assert stats.verdict is Verdict.CLEAN
    assert np.array_equal(result.alice_final_key, result.bob_final_key)
    disclosed = len(result.report.disclosed_positions)
    assert disclosed == math.ceil(0.1 * stats.rounds_kept)
    assert len(result.alice_final_key) == stats.rounds_kept - disclosed


def test_run_experiment_deterministic():
    cfg = ExperimentConfig(protocol=Protocol.PAIR, rounds=2000, seed=7, eve=IB_RANDOM,
                           qber_threshold=1.0)
    a = run_experiment_full(cfg)
    b = run_experiment_full(cfg)
    assert a.stats == b.stats
    assert np.array_equal(a.alice_final_key, b.alice_final_key)
    assert np.array_equal(a.bob_final_key, b.bob_final_key)
    c = run_experiment_full(dataclasses.replace(cfg, seed=8))
    assert not np.array_equal(a.bob_final_key, c.bob_final_key)


def test_run_experiment_bb84_intercept():
    cfg = ExperimentConfig(protocol=Protocol.BB84, rounds=20_000, seed=11, eve=IB_RANDOM)
    stats = run_experiment(cfg)
    sigma = math.sqrt(0.25 * 0.75 / stats.rounds_kept)
    assert abs(stats.qber_final - 0.25) <= 4 * sigma
    assert stats.verdict is Verdict.SUSPECT


def test_run_experiment_suspect_emits_no_key():
    cfg = ExperimentConfig(protocol=Protocol.BB84, rounds=5000, seed=13, eve=IB_RANDOM)
    result = run_experiment_full(cfg)
    assert result.stats.verdict is Verdict.SUSPECT
    assert result.alice_final_key is None
    assert result.bob_final_key is None


def test_run_experiment_noise_below_threshold_is_clean():
    cfg = ExperimentConfig(protocol=Protocol.PAIR, rounds=5000, seed=17, noise_p=0.05)
    stats = run_experiment(cfg)
    assert cfg.resolved_qber_threshold == 0.11
    assert stats.verdict is Verdict.CLEAN
    assert stats.qber_final > 0.0


def test_experiment_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(protocol=Protocol.PAIR, rounds=0, seed=0)
    with pytest.raises(ValueError):
        ExperimentConfig(protocol=Protocol.PAIR, rounds=10, seed=0, noise_p=1.5)
    with pytest.raises(ValueError):
        ExperimentConfig(protocol=Protocol.PAIR, rounds=10, seed=0, verify_fraction=0.0)
    with pytest.raises(ValueError):
        ExperimentConfig(protocol=Protocol.PAIR, rounds=10, seed=0, qber_threshold=2.0)
    assert ExperimentConfig(protocol=Protocol.PAIR, rounds=10, seed=0).resolved_qber_threshold == 0.0


def test_wilson_halfwidth_against_statsmodels():
    from statsmodels.stats.proportion import proportion_confint

    for successes, n in ((10, 100), (0, 50), (499, 1000), (3, 7)):
        p_hat = successes / n
        lo, hi = proportion_confint(successes, n, alpha=0.05, method="wilson")
        assert wilson_halfwidth(p_hat, n) == pytest.approx((hi - lo) / 2, abs=1e-9)
    assert wilson_halfwidth(0.5, 0) == 0.0


# Oracle vs Monte Carlo -------------------------------------------------------------


def test_montecarlo_matches_oracle_honest():
    cfg = ExperimentConfig(protocol=Protocol.PAIR, rounds=1, seed=1001, qber_threshold=1.0)
    assert montecarlo_matches_oracle(cfg, 20_000, 4.0)


def test_montecarlo_matches_oracle_bb84_attack():
    cfg = ExperimentConfig(protocol=Protocol.BB84, rounds=1, seed=1002, eve=IB_RANDOM,
                           qber_threshold=1.0)
    assert montecarlo_matches_oracle(cfg, 20_000, 4.0)


def test_montecarlo_detects_corrupted_decoder(monkeypatch):
    # Negative control: flip the auxiliary-bit convention in the sampled
    # pipeline only. Z rounds then XOR in a random bit, the oracle does
    # not, and the comparison must fail.
    def corrupted(secure_basis, aux_outcome):
        return int(aux_outcome)

    monkeypatch.setattr(protocol, "aux_bit_from_outcome", corrupted)
    cfg = ExperimentConfig(protocol=Protocol.PAIR, rounds=1, seed=1003, qber_threshold=1.0)
    assert not montecarlo_matches_oracle(cfg, 20_000, 4.0)


# Stats serialization -------------------------------------------------------------


def test_stats_json_field_names():
    cfg = ExperimentConfig(protocol=Protocol.PAIR, rounds=500, seed=3)
    stats = run_experiment(cfg)
    payload = json.loads(stats_to_json(stats))
    assert list(payload) == list(analysis.STATS_FIELDS)
    assert payload["verdict"] == "clean"
    assert payload["eve_secure_agreement"] is None
    assert payload["rounds_sent"] == 500


def test_stats_csv_shape():
    cfg = ExperimentConfig(protocol=Protocol.BB84, rounds=500, seed=3, eve=IB_RANDOM)
    stats = run_experiment(cfg)
    header, row = stats_to_csv(stats).strip().split("\n")
    assert header == ",".join(analysis.STATS_FIELDS)
    cells = row.split(",")
    assert len(cells) == len(analysis.STATS_FIELDS)
    assert cells[-2] == "suspect"
    assert cells[5] == ""  # absent aux agreement serializes empty


def test_stats_dict_round_trip_types():
    cfg = ExperimentConfig(protocol=Protocol.PAIR, rounds=200, seed=4, eve=ROLE_ORACLE)
    d = stats_to_dict(run_experiment(cfg))
    assert d["eve_aux_agreement"] == 1.0
    assert d["eve_secure_agreement"] is None


# Trace formatting ----------------------------------------------------------------


def test_trace_reference_columns():
    alice_rounds, bob_rounds = worked_example.build_rounds()
    cols = analysis.trace_columns(alice_rounds, bob_rounds)
    second = cols[1]
    assert (
        second.basis_symbol,
        second.alice_key_bit,
        second.secure_state,
        second.secure_key_bit,
        second.aux_state,
        second.aux_bit,
        second.combined_bit,
    ) == ("z", 1, "1", 1, "+", 0, 1)
    third = cols[2]
    assert (
        third.basis_symbol,
        third.alice_key_bit,
        third.secure_state,
        third.secure_key_bit,
        third.aux_state,
        third.aux_bit,
        third.combined_bit,
    ) == ("x", 1, "-", 0, "+", 1, 1)


def test_trace_z_round_with_minus_aux_prints_zero():
    alice = [protocol.AliceRound(0, protocol.PairStateLabel.Z1)]
    bob = [protocol.BobRound(0, 1, Basis.Z, secure_outcome=1, aux_outcome=0)]
    col = analysis.trace_columns(alice, bob)[0]
    assert col.aux_state == "-"
    assert col.aux_bit == 0


def test_trace_table_layout():
    alice_rounds, bob_rounds = worked_example.build_rounds()
    text = trace_table(alice_rounds, bob_rounds)
    lines = text.strip("\n").split("\n")
    assert len(lines) == 7
    for line, label in zip(lines, analysis.TRACE_ROW_LABELS):
        assert line.startswith(label)
    assert lines[0].split()[-15:] == list(worked_example.BASES)
    assert "".join(lines[6].split()[-15:]) == worked_example.COMBINED_BITS


def test_trace_last_row_is_xor_of_key_rows():
    # Row 7 = row 4 xor row 6 = row 2, on sampled data as well.
    alice_rounds, bob_rounds = [], []
    from pairqkd.rng import RandomSource
    rng_a, rng_b = RandomSource(88), RandomSource(89)
    for i in range(200):
        a_round, state = protocol.alice_emit(rng_a, i)
        alice_rounds.append(a_round)
        bob_rounds.append(protocol.bob_measure_pair(state, rng_b, i))
    for col in analysis.trace_columns(alice_rounds, bob_rounds, kept_only=True):
        assert col.combined_bit == col.secure_key_bit ^ col.aux_bit
        assert col.combined_bit == col.alice_key_bit


def test_trace_csv_header_and_rows():
    alice_rounds, bob_rounds = worked_example.build_rounds()
    text = trace_csv(alice_rounds, bob_rounds)
    lines = text.strip().split("\n")
    assert lines[0] == analysis.TRACE_CSV_HEADER
    assert len(lines) == 16
    assert lines[1] == "0,x,0,-,0,-,0,0"


def test_trace_rejects_desynchronized_rounds():
    alice_rounds, bob_rounds = worked_example.build_rounds()
    with pytest.raises(ValueError, match="desynchronized"):
        analysis.trace_columns(alice_rounds[:-1], bob_rounds)
