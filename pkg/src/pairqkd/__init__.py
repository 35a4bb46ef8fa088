"""pairqkd: simulator and protocol toolkit for qubit-pair key distribution.

Layers, bottom up: `rng` (seeded deterministic streams), `qsim` (one- and
two-qubit pure states, Born-rule measurement, depolarizing noise),
`protocol` (pair scheme and BB84 baseline state machines), `adversary`
(intercept-resend and role-oracle eavesdroppers), `analysis` (exact
enumeration oracle, Monte Carlo runner, traces), `wire`/`session`
(newline-delimited JSON peer mode), `cli` (command line), `pinned`
(frozen oracle regression constants).
"""

from .adversary import NO_EVE, BasisPolicy, EveKind, EveRecord, EveStrategy
from .analysis import (
    ExactDistribution,
    ExperimentConfig,
    ExperimentStats,
    Protocol,
    enumerate_exact,
    montecarlo_matches_oracle,
    run_experiment,
    run_experiment_full,
    trace_csv,
    trace_table,
)
from .protocol import (
    AliceRound,
    Bb84Round,
    BobRound,
    PairStateLabel,
    SiftResult,
    Verdict,
    VerificationReport,
    alice_emit,
    bb84_alice_emit,
    bb84_bob_measure,
    bb84_sift,
    bob_measure_pair,
    combine_keys,
    otp_encrypt,
    pair_state,
    sift,
    verify_sample,
)
from .qsim import Basis, depolarize, measure_qubit, measurement_distribution, states_equal, tensor
from .rng import RandomSource, derive_seeds
from .session import (
    ChannelDaemon,
    PeerResult,
    key_digest,
    replay_transcript,
    run_alice_peer,
    run_bob_peer,
    run_channel_daemon,
)
from .wire import Transcript, WireError, scan_transcript

__version__ = "0.1.0"

__all__ = [
    "AliceRound",
    "Basis",
    "BasisPolicy",
    "Bb84Round",
    "BobRound",
    "ChannelDaemon",
    "EveKind",
    "EveRecord",
    "EveStrategy",
    "ExactDistribution",
    "ExperimentConfig",
    "ExperimentStats",
    "NO_EVE",
    "PairStateLabel",
    "PeerResult",
    "Protocol",
    "RandomSource",
    "SiftResult",
    "Transcript",
    "Verdict",
    "VerificationReport",
    "WireError",
    "alice_emit",
    "bb84_alice_emit",
    "bb84_bob_measure",
    "bb84_sift",
    "bob_measure_pair",
    "combine_keys",
    "depolarize",
    "derive_seeds",
    "enumerate_exact",
    "key_digest",
    "measure_qubit",
    "measurement_distribution",
    "montecarlo_matches_oracle",
    "otp_encrypt",
    "pair_state",
    "replay_transcript",
    "run_alice_peer",
    "run_bob_peer",
    "run_channel_daemon",
    "run_experiment",
    "run_experiment_full",
    "scan_transcript",
    "sift",
    "states_equal",
    "tensor",
    "trace_csv",
    "trace_table",
    "verify_sample",
]
