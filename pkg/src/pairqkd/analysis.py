"""Exact enumeration oracle and Monte Carlo experiment runner.

`enumerate_exact` walks every branch of one protocol round: Alice's four
states, Bob's role and basis choices, each eavesdropper decision and
measurement outcome, each noise trajectory. Branch probabilities come
from the simulator's measurement distributions, so in the noiseless case
every leaf probability is an exact dyadic rational and the aggregated
marginals (sift rate 1/2, attack error rates, agreement rates) are exact
in double precision. With noise enabled the p/3 trajectory weights limit
exactness to about 1e-12.

The oracle deliberately re-states the protocol's decode conventions
inline instead of calling the protocol module, so it stays an independent
check on the sampled pipeline: corrupting one side breaks the
`montecarlo_matches_oracle` comparison instead of silently shifting both.

`run_experiment` samples the same pipeline round by round with one
deterministic random stream per party (Alice, Bob, channel), derived from
the config seed. The draw ledger matches the multi-process peer mode
message for message, which is what makes peer sessions bit-identical to
in-process runs under the same seeds.
"""

from __future__ import annotations

import dataclasses
import enum
import json
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import protocol, qsim
from .adversary import (
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
from .protocol import (
    AliceRound,
    Bb84Round,
    BobRound,
    SiftResult,
    Verdict,
    VerificationReport,
    alice_emit,
    bb84_alice_emit,
    bb84_sift,
    bob_choose,
    bob_outcomes,
    bob_round_from_outcomes,
    combine_keys,
    pair_state,
    remove_positions,
    sift,
    verify_sample,
)
from .qsim import Basis
from .rng import RandomSource, derive_seeds

Z95 = 1.959963984540054  # two-sided 95% normal quantile


class Protocol(enum.Enum):
    PAIR = "pair"
    BB84 = "bb84"


@dataclass
class ExperimentConfig:
    protocol: Protocol
    rounds: int
    seed: int
    eve: EveStrategy = NO_EVE
    noise_p: float = 0.0
    verify_fraction: float = 0.1
    qber_threshold: float | None = None  # None: 0.0 noiseless, 0.11 with noise

    def __post_init__(self):
        if self.rounds < 1:
            raise ValueError(f"rounds must be at least 1, got {self.rounds}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must fit in an unsigned 64-bit integer, got {self.seed}")
        if not 0.0 <= self.noise_p <= 1.0:
            raise ValueError(f"noise probability must lie in [0, 1], got {self.noise_p}")
        if not 0.0 < self.verify_fraction <= 1.0:
            raise ValueError(
                f"verify fraction must lie in (0, 1], got {self.verify_fraction}"
            )
        if self.qber_threshold is not None and not 0.0 <= self.qber_threshold <= 1.0:
            raise ValueError(f"error threshold must lie in [0, 1], got {self.qber_threshold}")
        if self.protocol is Protocol.BB84 and self.eve.kind is EveKind.ROLE_ORACLE:
            raise ValueError("the role-oracle adversary requires the pair protocol")

    @property
    def resolved_qber_threshold(self) -> float:
        if self.qber_threshold is not None:
            return self.qber_threshold
        return 0.0 if self.noise_p == 0.0 else 0.11


@dataclass
class ExperimentStats:
    rounds_sent: int
    rounds_kept: int
    sift_rate: float
    qber_final: float
    eve_secure_agreement: float | None
    eve_aux_agreement: float | None
    verdict: Verdict
    wilson_ci_halfwidth: float


STATS_FIELDS = (
    "rounds_sent",
    "rounds_kept",
    "sift_rate",
    "qber_final",
    "eve_secure_agreement",
    "eve_aux_agreement",
    "verdict",
    "wilson_ci_halfwidth",
)


def stats_to_dict(stats: ExperimentStats) -> dict:
    out = {}
    for name in STATS_FIELDS:
        value = getattr(stats, name)
        out[name] = value.value if isinstance(value, Verdict) else value
    return out


def stats_to_json(stats: ExperimentStats) -> str:
    return json.dumps(stats_to_dict(stats))


def stats_to_csv(stats: ExperimentStats) -> str:
    d = stats_to_dict(stats)
    row = ",".join("" if d[k] is None else str(d[k]) for k in STATS_FIELDS)
    return ",".join(STATS_FIELDS) + "\n" + row + "\n"


def stats_to_table(stats: ExperimentStats) -> str:
    d = stats_to_dict(stats)
    width = max(len(k) for k in STATS_FIELDS)
    lines = [f"{k:<{width}}  {'-' if d[k] is None else d[k]}" for k in STATS_FIELDS]
    return "\n".join(lines) + "\n"


def wilson_halfwidth(p_hat: float, n: int, z: float = Z95) -> float:
    """Halfwidth of the Wilson score interval for a binomial proportion."""
    if n <= 0:
        return 0.0
    denom = 1.0 + z * z / n
    return (z * math.sqrt(p_hat * (1.0 - p_hat) / n + z * z / (4.0 * n * n))) / denom


# Exact enumeration ------------------------------------------------------


class RoundKey(NamedTuple):
    """Joint outcome of one enumerated round; None marks absent Eve guesses."""

    kept: bool
    alice_bit: int
    bob_secure_bit: int
    bob_aux_bit: int
    bob_final_bit: int
    eve_key_guess: int | None
    eve_aux_guess: int | None


@dataclass
class ExactDistribution:
    protocol: Protocol
    eve: EveStrategy
    noise_p: float
    joint: dict

    @property
    def total_probability(self) -> float:
        return float(sum(self.joint.values()))

    @property
    def entries(self) -> dict:
        """Marginal over (alice_bit, bob_final_bit, eve_key_guess, kept)."""
        out = defaultdict(float)
        for key, p in self.joint.items():
            out[(key.alice_bit, key.bob_final_bit, key.eve_key_guess, key.kept)] += p
        return dict(out)

    def _kept_mass(self) -> float:
        return sum(p for key, p in self.joint.items() if key.kept)

    @property
    def sift_rate(self) -> float:
        return self._kept_mass()

    @property
    def qber_final(self) -> float:
        kept = self._kept_mass()
        if kept == 0:
            return 0.0
        bad = sum(
            p for key, p in self.joint.items() if key.kept and key.bob_final_bit != key.alice_bit
        )
        return bad / kept

    @property
    def qber_sifted(self) -> float:
        """Error rate of the secure key before the auxiliary key is added."""
        kept = self._kept_mass()
        if kept == 0:
            return 0.0
        bad = sum(
            p for key, p in self.joint.items() if key.kept and key.bob_secure_bit != key.alice_bit
        )
        return bad / kept

    @property
    def eve_secure_agreement(self) -> float | None:
        num = den = 0.0
        for key, p in self.joint.items():
            if key.kept and key.eve_key_guess is not None:
                den += p
                if key.eve_key_guess == key.alice_bit:
                    num += p
        return None if den == 0 else num / den

    @property
    def eve_aux_agreement(self) -> float | None:
        num = den = 0.0
        for key, p in self.joint.items():
            if key.kept and key.eve_aux_guess is not None:
                den += p
                if key.eve_aux_guess == key.bob_aux_bit:
                    num += p
        return None if den == 0 else num / den

    def marginals(self) -> dict:
        return {
            "protocol": self.protocol.value,
            "eve": self.eve.spec_string(),
            "noise_p": self.noise_p,
            "sift_rate": self.sift_rate,
            "qber_sifted": self.qber_sifted,
            "qber_final": self.qber_final,
            "eve_secure_agreement": self.eve_secure_agreement,
            "eve_aux_agreement": self.eve_aux_agreement,
        }


def _policy_branches(policy: BasisPolicy):
    if policy is BasisPolicy.ALWAYS_Z:
        return ((1.0, Basis.Z),)
    if policy is BasisPolicy.ALWAYS_X:
        return ((1.0, Basis.X),)
    return ((0.5, Basis.Z), (0.5, Basis.X))


def _outcome_branches(p_one: float):
    for outcome, p in ((0, 1.0 - p_one), (1, p_one)):
        if p > 0.0:
            yield outcome, p


def _eve_branches_pair(state, strategy: EveStrategy, secure_qubit: int):
    """Yield (probability, forwarded state, secure guess, aux guess)."""
    if strategy.kind is EveKind.NONE:
        yield 1.0, state, None, None
        return
    if strategy.kind is EveKind.ROLE_ORACLE:
        p_one, posts = qsim.measurement_distribution(state, 3 - secure_qubit, Basis.X)
        for outcome, p in _outcome_branches(p_one):
            yield p, posts[outcome], None, outcome
        return
    if strategy.kind is EveKind.INTERCEPT_ONE:
        for weight, basis in _policy_branches(strategy.policy):
            p_one, posts = qsim.measurement_distribution(state, strategy.which_qubit, basis)
            for outcome, p in _outcome_branches(p_one):
                yield weight * p, posts[outcome], outcome, None
        return
    for weight1, basis1 in _policy_branches(strategy.policy):
        p_one, posts = qsim.measurement_distribution(state, 1, basis1)
        for outcome1, p1 in _outcome_branches(p_one):
            mid = posts[outcome1]
            for weight2, basis2 in _policy_branches(strategy.policy):
                q_one, posts2 = qsim.measurement_distribution(mid, 2, basis2)
                for outcome2, p2 in _outcome_branches(q_one):
                    final = posts2[outcome2]
                    for guessed_secure in (1, 2):
                        if guessed_secure == 1:
                            s_g, a_g = outcome1, outcome2
                        else:
                            s_g, a_g = outcome2, outcome1
                        yield weight1 * p1 * weight2 * p2 * 0.5, final, s_g, a_g


def _eve_branches_single(state, strategy: EveStrategy):
    if strategy.kind is EveKind.NONE:
        yield 1.0, state, None
        return
    if strategy.kind is EveKind.ROLE_ORACLE:
        raise ValueError("role-oracle interception is undefined for single-qubit traffic")
    for weight, basis in _policy_branches(strategy.policy):
        p_one, posts = qsim.single_distribution(state, basis)
        for outcome, p in _outcome_branches(p_one):
            yield weight * p, posts[outcome], outcome


_NOISE_IDENTITY = object()


def _noise_options(p: float):
    if p == 0.0:
        return ((1.0, _NOISE_IDENTITY),)
    options = [(p / 3.0, 0), (p / 3.0, 1), (p / 3.0, 2)]
    if p < 1.0:
        options.insert(0, (1.0 - p, _NOISE_IDENTITY))
    return tuple(options)


def _noise_branches_pair(state, p: float):
    options = _noise_options(p)
    for w1, k1 in options:
        mid = state if k1 is _NOISE_IDENTITY else qsim.apply_pauli(state, 1, k1)
        for w2, k2 in options:
            yield w1 * w2, (mid if k2 is _NOISE_IDENTITY else qsim.apply_pauli(mid, 2, k2))


def _noise_branches_single(state, p: float):
    for w, k in _noise_options(p):
        yield w, (state if k is _NOISE_IDENTITY else qsim.apply_pauli_single(state, k))


# Decode conventions restated inline: the oracle must not share them with
# the sampled pipeline it is checking.


def _oracle_aux_bit(secure_basis: Basis, aux_outcome: int) -> int:
    return aux_outcome if secure_basis is Basis.X else 0


def _oracle_eve_key(s_g, a_g, announced: Basis):
    if s_g is None:
        return None
    if announced is Basis.X and a_g is not None:
        return s_g ^ a_g
    return s_g


def _oracle_eve_aux(a_g, announced: Basis):
    if a_g is None:
        return None
    return a_g if announced is Basis.X else 0


def _enumerate_pair(eve: EveStrategy, noise_p: float, roles=(1, 2)) -> dict:
    acc: dict = defaultdict(float)
    role_weight = 1.0 / len(roles)
    for label in protocol.PAIR_LABELS:
        state0 = pair_state(label)
        announced = label.basis
        alice_bit = label.key_bit
        for secure_qubit in roles:
            for secure_basis in (Basis.Z, Basis.X):
                kept = announced is secure_basis
                base = 0.25 * role_weight * 0.5
                for ep, st1, s_g, a_g in _eve_branches_pair(state0, eve, secure_qubit):
                    eve_key = _oracle_eve_key(s_g, a_g, announced)
                    eve_aux = _oracle_eve_aux(a_g, announced)
                    for wn, st2 in _noise_branches_pair(st1, noise_p):
                        p_one, posts = qsim.measurement_distribution(
                            st2, secure_qubit, secure_basis
                        )
                        for s_out, ps in _outcome_branches(p_one):
                            post = posts[s_out]
                            q_one, _ = qsim.measurement_distribution(
                                post, 3 - secure_qubit, Basis.X
                            )
                            for a_out, pa in _outcome_branches(q_one):
                                aux_bit = _oracle_aux_bit(secure_basis, a_out)
                                key = RoundKey(
                                    kept=kept,
                                    alice_bit=alice_bit,
                                    bob_secure_bit=s_out,
                                    bob_aux_bit=aux_bit,
                                    bob_final_bit=s_out ^ aux_bit,
                                    eve_key_guess=eve_key,
                                    eve_aux_guess=eve_aux,
                                )
                                acc[key] += base * ep * wn * ps * pa
    return dict(acc)


# The four emitted single-qubit states with their key bits.
_BB84_ORACLE_STATES = (
    (Basis.Z, 0, qsim.KET0),
    (Basis.Z, 1, qsim.KET1),
    (Basis.X, 1, qsim.PLUS),
    (Basis.X, 0, qsim.MINUS),
)


def _enumerate_bb84(eve: EveStrategy, noise_p: float) -> dict:
    acc: dict = defaultdict(float)
    for basis, bit, state0 in _BB84_ORACLE_STATES:
        for bob_basis in (Basis.Z, Basis.X):
            kept = basis is bob_basis
            base = 0.25 * 0.5
            for ep, st1, guess in _eve_branches_single(state0, eve):
                for wn, st2 in _noise_branches_single(st1, noise_p):
                    p_one, _ = qsim.single_distribution(st2, bob_basis)
                    for outcome, p in _outcome_branches(p_one):
                        key = RoundKey(
                            kept=kept,
                            alice_bit=bit,
                            bob_secure_bit=outcome,
                            bob_aux_bit=0,
                            bob_final_bit=outcome,
                            eve_key_guess=guess,
                            eve_aux_guess=None,
                        )
                        acc[key] += base * ep * wn * p
    return dict(acc)


def enumerate_exact(
    proto: Protocol, eve: EveStrategy = NO_EVE, noise_p: float = 0.0
) -> ExactDistribution:
    """Exhaustive branch enumeration of one protocol round.

    Returns the exact joint distribution over (kept, Alice bit, Bob bits,
    Eve guesses); all Monte Carlo marginals converge to its marginals.
    """
    if not 0.0 <= noise_p <= 1.0:
        raise ValueError(f"noise probability must lie in [0, 1], got {noise_p}")
    if proto is Protocol.PAIR:
        joint = _enumerate_pair(eve, noise_p)
    else:
        joint = _enumerate_bb84(eve, noise_p)
    dist = ExactDistribution(protocol=proto, eve=eve, noise_p=noise_p, joint=joint)
    if abs(dist.total_probability - 1.0) > 1e-12:
        raise AssertionError(
            f"enumeration lost probability mass: total {dist.total_probability!r}"
        )
    return dist


# Monte Carlo runner ------------------------------------------------------


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    stats: ExperimentStats
    sifted: SiftResult
    alice_rounds: list
    bob_rounds: list
    eve_records: list
    report: VerificationReport | None
    alice_final_key: np.ndarray | None
    bob_final_key: np.ndarray | None


def _run_pair_rounds(config: ExperimentConfig, arng, brng, crng):
    alice_rounds, bob_rounds, eve_records = [], [], []
    role_oracle = config.eve.kind is EveKind.ROLE_ORACLE
    noisy = config.noise_p > 0.0
    for i in range(config.rounds):
        a_round, state = alice_emit(arng, i)
        secure_qubit, secure_basis = bob_choose(brng)
        state, record = eve_intercept(
            state, config.eve, secure_qubit if role_oracle else None, crng, i
        )
        if noisy:
            state = qsim.depolarize(state, 1, config.noise_p, crng)
            state = qsim.depolarize(state, 2, config.noise_p, crng)
        s_out, a_out = bob_outcomes(state, secure_qubit, secure_basis, crng)
        alice_rounds.append(a_round)
        bob_rounds.append(bob_round_from_outcomes(i, secure_qubit, secure_basis, s_out, a_out))
        eve_records.append(record)
    return alice_rounds, bob_rounds, eve_records


def _run_bb84_rounds(config: ExperimentConfig, arng, brng, crng):
    alice_rounds, bob_rounds, eve_records = [], [], []
    noisy = config.noise_p > 0.0
    for i in range(config.rounds):
        a_round, state = bb84_alice_emit(arng, i)
        bob_basis = Basis.Z if brng.choice(2) == 0 else Basis.X
        state, record = eve_intercept_single(state, config.eve, crng, i)
        if noisy:
            state = qsim.depolarize_single(state, config.noise_p, crng)
        outcome, _ = qsim.measure_single(state, bob_basis, crng)
        alice_rounds.append(a_round)
        bob_rounds.append(Bb84Round(i, bob_basis, outcome))
        eve_records.append(record)
    return alice_rounds, bob_rounds, eve_records


def run_experiment_full(config: ExperimentConfig) -> ExperimentResult:
    """Run the full pipeline: emit, eavesdrop, noise, measure, sift, verify, combine."""
    arng, brng, crng = (RandomSource(s) for s in derive_seeds(config.seed, 3))
    if config.protocol is Protocol.PAIR:
        alice_rounds, bob_rounds, eve_records = _run_pair_rounds(config, arng, brng, crng)
        sifted = sift(alice_rounds, bob_rounds)
    else:
        alice_rounds, bob_rounds, eve_records = _run_bb84_rounds(config, arng, brng, crng)
        sifted = bb84_sift(alice_rounds, bob_rounds)

    kept = len(sifted)
    combined = combine_keys(sifted.bob_secure_key, sifted.bob_aux_key)
    qber_final = float(np.mean(sifted.alice_key != combined)) if kept else 0.0

    eve_key_num = eve_key_den = eve_aux_num = eve_aux_den = 0
    for pos, rid in enumerate(sifted.kept_round_ids):
        announced = alice_rounds[rid].basis
        record = eve_records[rid]
        guess = eve_final_key_bit(record, announced)
        if guess is not None:
            eve_key_den += 1
            eve_key_num += int(guess == sifted.alice_key[pos])
        aux_guess = eve_aux_key_bit(record, announced)
        if aux_guess is not None:
            eve_aux_den += 1
            eve_aux_num += int(aux_guess == sifted.bob_aux_key[pos])

    report = None
    alice_final = np.array([], dtype=np.uint8)
    bob_final = np.array([], dtype=np.uint8)
    verdict = Verdict.CLEAN
    if kept:
        report = verify_sample(
            sifted.alice_key,
            combined,
            config.verify_fraction,
            arng,
            threshold=config.resolved_qber_threshold,
            round_ids=sifted.kept_round_ids,
        )
        verdict = report.verdict
        if verdict is Verdict.CLEAN:
            alice_final = remove_positions(sifted.alice_key, report.disclosed_positions)
            bob_final = remove_positions(combined, report.disclosed_positions)
        else:
            alice_final = None
            bob_final = None

    stats = ExperimentStats(
        rounds_sent=config.rounds,
        rounds_kept=kept,
        sift_rate=kept / config.rounds,
        qber_final=qber_final,
        eve_secure_agreement=(eve_key_num / eve_key_den) if eve_key_den else None,
        eve_aux_agreement=(eve_aux_num / eve_aux_den) if eve_aux_den else None,
        verdict=verdict,
        wilson_ci_halfwidth=wilson_halfwidth(qber_final, kept),
    )
    return ExperimentResult(
        config=config,
        stats=stats,
        sifted=sifted,
        alice_rounds=alice_rounds,
        bob_rounds=bob_rounds,
        eve_records=eve_records,
        report=report,
        alice_final_key=alice_final,
        bob_final_key=bob_final,
    )


def run_experiment(config: ExperimentConfig) -> ExperimentStats:
    return run_experiment_full(config).stats


def montecarlo_matches_oracle(
    config: ExperimentConfig, n_rounds: int, sigma_budget: float = 4.0
) -> bool:
    """True when every sampled marginal sits within the sigma budget of the oracle.

    Marginals with an exact value of 0 or 1 have zero binomial deviation
    and must match exactly; absent Eve marginals must be absent on both
    sides.
    """
    dist = enumerate_exact(config.protocol, config.eve, config.noise_p)
    result = run_experiment_full(dataclasses.replace(config, rounds=n_rounds))
    stats = result.stats

    checks = [(stats.sift_rate, dist.sift_rate, n_rounds)]
    kept = stats.rounds_kept
    checks.append((stats.qber_final, dist.qber_final, kept))
    for mc, exact in (
        (stats.eve_secure_agreement, dist.eve_secure_agreement),
        (stats.eve_aux_agreement, dist.eve_aux_agreement),
    ):
        if (mc is None) != (exact is None):
            return False
        if exact is not None:
            checks.append((mc, exact, kept))

    for mc, exact, n in checks:
        if n == 0:
            continue
        sigma = math.sqrt(exact * (1.0 - exact) / n)
        if abs(mc - exact) > sigma_budget * sigma:
            return False
    return True


# Trace formatting (seven-row layout) -------------------------------------


TRACE_ROW_LABELS = (
    "Basis",
    "Alice key bit",
    "Bob secure state",
    "Bob secure key bit",
    "Bob auxiliary state",
    "Bob auxiliary bit",
    "Bob secure + auxil",
)

TRACE_CSV_HEADER = (
    "round_id,basis,alice_key_bit,bob_secure_state,bob_secure_key_bit,"
    "bob_aux_state,bob_aux_bit,bob_secure_plus_aux"
)


def state_symbol(basis: Basis, outcome: int) -> str:
    """Eigenstate symbol for an outcome: 0/1 in Z, -/+ in X."""
    return "01"[outcome] if basis is Basis.Z else "-+"[outcome]


@dataclass(frozen=True)
class TraceColumn:
    round_id: int
    basis_symbol: str
    alice_key_bit: int
    secure_state: str
    secure_key_bit: int
    aux_state: str
    aux_bit: int
    combined_bit: int


def trace_columns(
    alice_rounds: list[AliceRound], bob_rounds: list[BobRound], kept_only: bool = True
) -> list[TraceColumn]:
    """Per-round trace data; the basis row shows Alice's preparation basis."""
    protocol._check_synchronized(alice_rounds, bob_rounds)
    columns = []
    for a, b in zip(alice_rounds, bob_rounds):
        if kept_only and a.basis is not b.secure_basis:
            continue
        columns.append(
            TraceColumn(
                round_id=a.round_id,
                basis_symbol=a.basis.value.lower(),
                alice_key_bit=a.key_bit,
                secure_state=state_symbol(b.secure_basis, b.secure_outcome),
                secure_key_bit=b.secure_bit,
                aux_state=state_symbol(Basis.X, b.aux_outcome),
                aux_bit=b.aux_bit,
                combined_bit=b.secure_bit ^ b.aux_bit,
            )
        )
    return columns


def trace_table(
    alice_rounds: list[AliceRound], bob_rounds: list[BobRound], kept_only: bool = True
) -> str:
    """Fixed-width text trace: seven labeled rows, one column per round."""
    columns = trace_columns(alice_rounds, bob_rounds, kept_only)
    rows = [
        [c.basis_symbol for c in columns],
        [str(c.alice_key_bit) for c in columns],
        [c.secure_state for c in columns],
        [str(c.secure_key_bit) for c in columns],
        [c.aux_state for c in columns],
        [str(c.aux_bit) for c in columns],
        [str(c.combined_bit) for c in columns],
    ]
    width = max(len(label) for label in TRACE_ROW_LABELS)
    lines = [
        f"{label:<{width}}  " + " ".join(values)
        for label, values in zip(TRACE_ROW_LABELS, rows)
    ]
    return "\n".join(lines) + "\n"


def trace_csv(
    alice_rounds: list[AliceRound], bob_rounds: list[BobRound], kept_only: bool = True
) -> str:
    """CSV trace, one record per round; the column order is frozen."""
    columns = trace_columns(alice_rounds, bob_rounds, kept_only)
    lines = [TRACE_CSV_HEADER]
    for c in columns:
        lines.append(
            f"{c.round_id},{c.basis_symbol},{c.alice_key_bit},{c.secure_state},"
            f"{c.secure_key_bit},{c.aux_state},{c.aux_bit},{c.combined_bit}"
        )
    return "\n".join(lines) + "\n"
