"""Command-line interface: simulate, oracle, trace, and peer subcommands.

Exit codes are a stable scripting contract: 0 for a clean run, 1 for
usage or internal errors, 2 when verification flags the session as
suspect. All output is deterministic given the same flags and seed.

Options may also come from a JSON config file (``--config``) whose field
names mirror the flags (protocol, rounds, seed, eve, noise_p,
verify_fraction, qber_threshold, output_format, output_path). Explicit
flags win over the config file; the PAIRQKD_SEED environment variable
overrides the built-in default seed when neither supplies one.

Key material is never printed raw by default: peers print a SHA-256
digest of the final key and require ``--reveal-key`` for the bits.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .adversary import EveKind, EveStrategy, NO_EVE
from .analysis import (
    ExperimentConfig,
    Protocol,
    enumerate_exact,
    run_experiment,
    stats_to_csv,
    stats_to_json,
    stats_to_table,
    trace_csv,
    trace_table,
)
from . import qsim
from .protocol import Verdict, alice_emit, bob_choose, bob_outcomes, bob_round_from_outcomes
from .adversary import eve_intercept
from .rng import RandomSource, derive_seeds
from .session import (
    SessionAbort,
    bits_to_string,
    key_digest,
    run_alice_peer,
    run_bob_peer,
    run_channel_daemon,
)
from .wire import WireError

SEED_ENV_VAR = "PAIRQKD_SEED"
DEFAULT_SEED = 0

CONFIG_FIELDS = {
    "protocol",
    "rounds",
    "seed",
    "eve",
    "noise_p",
    "verify_fraction",
    "qber_threshold",
    "output_format",
    "output_path",
}


class CliError(Exception):
    """Usage-level error; reported on stderr with exit status 1."""


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; 2 is reserved for
    # suspect verdicts here, so remap usage problems to 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pairqkd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_experiment=True):
        p.add_argument("--config", metavar="PATH", help="JSON config file")
        p.add_argument("--seed", type=int, help=f"master seed (default {DEFAULT_SEED}; "
                       f"env {SEED_ENV_VAR} overrides the default)")
        if with_experiment:
            p.add_argument("--eve", metavar="SPEC",
                           help="eavesdropper: none, intercept-both:<random|z|x>, "
                                "intercept-one:<1|2>:<random|z|x>, role-oracle")
            p.add_argument("--noise-p", type=float, dest="noise_p",
                           help="per-qubit depolarizing probability (default 0)")
        p.add_argument("--output", dest="output_path", metavar="PATH",
                       help="write the result here instead of stdout")

    p_sim = sub.add_parser("simulate", parents=[], help="run a batch experiment",
                           description="Run a seeded experiment and print its statistics.")
    p_sim.add_argument("--protocol", choices=["pair", "bb84"])
    p_sim.add_argument("--rounds", type=int)
    add_common(p_sim)
    p_sim.add_argument("--verify-fraction", type=float, dest="verify_fraction",
                       help="fraction of the sifted key disclosed for verification (default 0.1)")
    p_sim.add_argument("--qber-threshold", type=float, dest="qber_threshold",
                       help="abort threshold for the disclosed-sample error rate "
                            "(default 0 noiseless, 0.11 with noise)")
    p_sim.add_argument("--format", dest="output_format", choices=["json", "csv", "table"])

    p_orc = sub.add_parser("oracle", help="exact enumeration marginals",
                           description="Print exact protocol marginals as JSON; no sampling.")
    p_orc.add_argument("--protocol", choices=["pair", "bb84"])
    p_orc.add_argument("--config", metavar="PATH", help="JSON config file")
    p_orc.add_argument("--eve", metavar="SPEC")
    p_orc.add_argument("--noise-p", type=float, dest="noise_p")
    p_orc.add_argument("--output", dest="output_path", metavar="PATH")

    p_trc = sub.add_parser("trace", help="seven-row trace of kept pair rounds",
                           description="Run a seeded pair session and print the per-round trace.")
    p_trc.add_argument("--rows", type=int, default=15, help="kept rounds to show (default 15)")
    add_common(p_trc)
    p_trc.add_argument("--format", dest="output_format", choices=["table", "csv"])

    p_peer = sub.add_parser("peer", help="multi-process session roles",
                            description="Run one role of a three-process session.")
    p_peer.add_argument("--role", required=True, choices=["channel", "alice", "bob"])
    p_peer.add_argument("--listen", metavar="HOST:PORT", help="channel bind endpoint")
    p_peer.add_argument("--connect", metavar="HOST:PORT", help="channel endpoint to dial")
    p_peer.add_argument("--rounds", type=int, help="pairs to send (alice)")
    p_peer.add_argument("--config", metavar="PATH")
    p_peer.add_argument("--seed", type=int)
    p_peer.add_argument("--eve", metavar="SPEC", help="eavesdropper inside the channel")
    p_peer.add_argument("--noise-p", type=float, dest="noise_p")
    p_peer.add_argument("--verify-fraction", type=float, dest="verify_fraction")
    p_peer.add_argument("--qber-threshold", type=float, dest="qber_threshold")
    p_peer.add_argument("--transcript", metavar="PATH", help="write the wire transcript here")
    p_peer.add_argument("--reveal-key", action="store_true",
                        help="print raw key bits, not just the digest")
    p_peer.add_argument("--timeout", type=float, default=30.0)
    return parser


def _load_config(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise CliError(f"config {path} must hold a JSON object")
    unknown = set(data) - CONFIG_FIELDS
    if unknown:
        raise CliError(f"unknown config fields: {sorted(unknown)}")
    return data


def _pick(args, config: dict, name: str, default=None):
    value = getattr(args, name, None)
    if value is not None:
        return value
    if name in config:
        return config[name]
    return default


def _pick_seed(args, config: dict) -> int:
    value = _pick(args, config, "seed")
    if value is not None:
        return int(value)
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise CliError(f"{SEED_ENV_VAR} must be an integer, got {env!r}") from None
    return DEFAULT_SEED


def _parse_eve(text) -> EveStrategy:
    if text is None:
        return NO_EVE
    try:
        return EveStrategy.parse(str(text))
    except ValueError as exc:
        raise CliError(str(exc)) from None


def _emit(text: str, output_path) -> None:
    if output_path:
        with open(output_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_simulate(args) -> int:
    config = _load_config(args.config) if args.config else {}
    try:
        experiment = ExperimentConfig(
            protocol=Protocol(_pick(args, config, "protocol", "pair")),
            rounds=int(_pick(args, config, "rounds", 1000)),
            seed=_pick_seed(args, config),
            eve=_parse_eve(_pick(args, config, "eve")),
            noise_p=float(_pick(args, config, "noise_p", 0.0)),
            verify_fraction=float(_pick(args, config, "verify_fraction", 0.1)),
            qber_threshold=_pick(args, config, "qber_threshold"),
        )
    except ValueError as exc:
        raise CliError(str(exc)) from None
    stats = run_experiment(experiment)
    fmt = _pick(args, config, "output_format", "json")
    if fmt == "json":
        text = stats_to_json(stats) + "\n"
    elif fmt == "csv":
        text = stats_to_csv(stats)
    elif fmt == "table":
        text = stats_to_table(stats)
    else:
        raise CliError(f"unknown output format {fmt!r}")
    _emit(text, _pick(args, config, "output_path"))
    return 0 if stats.verdict is Verdict.CLEAN else 2


def cmd_oracle(args) -> int:
    config = _load_config(args.config) if args.config else {}
    try:
        dist = enumerate_exact(
            Protocol(_pick(args, config, "protocol", "pair")),
            _parse_eve(_pick(args, config, "eve")),
            float(_pick(args, config, "noise_p", 0.0)),
        )
    except ValueError as exc:
        raise CliError(str(exc)) from None
    _emit(json.dumps(dist.marginals()) + "\n", _pick(args, config, "output_path"))
    return 0


def _kept_pair_rounds(rows: int, seed: int, eve: EveStrategy, noise_p: float):
    """Generate pair rounds until `rows` of them survive sifting."""
    arng, brng, crng = (RandomSource(s) for s in derive_seeds(seed, 3))
    role_oracle = eve.kind is EveKind.ROLE_ORACLE
    kept_alice, kept_bob = [], []
    i = 0
    while len(kept_alice) < rows:
        if i > rows * 1000 + 1000:
            raise RuntimeError("sifting kept almost nothing; check the configuration")
        a_round, state = alice_emit(arng, i)
        secure_qubit, secure_basis = bob_choose(brng)
        state, _ = eve_intercept(state, eve, secure_qubit if role_oracle else None, crng, i)
        if noise_p > 0.0:
            state = qsim.depolarize(state, 1, noise_p, crng)
            state = qsim.depolarize(state, 2, noise_p, crng)
        s_out, a_out = bob_outcomes(state, secure_qubit, secure_basis, crng)
        if a_round.basis is secure_basis:
            kept_alice.append(a_round)
            kept_bob.append(
                bob_round_from_outcomes(i, secure_qubit, secure_basis, s_out, a_out)
            )
        i += 1
    return kept_alice, kept_bob


def cmd_trace(args) -> int:
    config = _load_config(args.config) if args.config else {}
    rows = args.rows
    if rows < 1:
        raise CliError(f"rows must be at least 1, got {rows}")
    try:
        eve = _parse_eve(_pick(args, config, "eve"))
        noise_p = float(_pick(args, config, "noise_p", 0.0))
        alice_rounds, bob_rounds = _kept_pair_rounds(rows, _pick_seed(args, config), eve, noise_p)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    fmt = _pick(args, config, "output_format", "table")
    if fmt == "table":
        text = trace_table(alice_rounds, bob_rounds)
    elif fmt == "csv":
        text = trace_csv(alice_rounds, bob_rounds)
    else:
        raise CliError(f"unknown output format {fmt!r}")
    _emit(text, _pick(args, config, "output_path"))
    return 0


def _print_peer_result(result, reveal_key: bool) -> int:
    print(
        f"verdict: {result.verdict.value} qber: {result.qber_estimate} "
        f"kept: {result.rounds_kept}"
    )
    if result.verdict is not Verdict.CLEAN:
        return 2
    print(f"final-bits: {len(result.final_key)}")
    print(f"key-digest: {key_digest(result.final_key)}")
    if reveal_key:
        print(f"key-bits: {bits_to_string(result.final_key)}")
    return 0


def cmd_peer(args) -> int:
    config = _load_config(args.config) if args.config else {}
    seed = _pick_seed(args, config)
    try:
        if args.role == "channel":
            if not args.listen:
                raise CliError("the channel role requires --listen HOST:PORT")
            print(f"channel listening on {args.listen}", file=sys.stderr)
            status = run_channel_daemon(
                args.listen,
                eve=_parse_eve(_pick(args, config, "eve")),
                noise_p=float(_pick(args, config, "noise_p", 0.0)),
                seed=seed,
                transcript_path=args.transcript,
                timeout=args.timeout,
            )
            print("session complete" if status == 0 else "session aborted", file=sys.stderr)
            return status
        if not args.connect:
            raise CliError(f"the {args.role} role requires --connect HOST:PORT")
        if args.role == "alice":
            rounds = _pick(args, config, "rounds")
            if rounds is None:
                raise CliError("the alice role requires --rounds")
            result = run_alice_peer(
                args.connect,
                rounds=int(rounds),
                seed=seed,
                verify_fraction=float(_pick(args, config, "verify_fraction", 0.1)),
                transcript_path=args.transcript,
                timeout=args.timeout,
            )
        else:
            result = run_bob_peer(
                args.connect,
                seed=seed,
                qber_threshold=float(_pick(args, config, "qber_threshold", 0.0)),
                transcript_path=args.transcript,
                timeout=args.timeout,
            )
        return _print_peer_result(result, args.reveal_key)
    except ConnectionRefusedError:
        print(f"cannot connect to {args.connect}: connection refused", file=sys.stderr)
        return 1
    except (WireError, SessionAbort, OSError, ValueError) as exc:
        print(f"session failed: {exc}", file=sys.stderr)
        return 1


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handlers = {
        "simulate": cmd_simulate,
        "oracle": cmd_oracle,
        "trace": cmd_trace,
        "peer": cmd_peer,
    }
    try:
        return handlers[args.command](args)
    except CliError as exc:
        print(f"pairqkd {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except BrokenPipeError:
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
