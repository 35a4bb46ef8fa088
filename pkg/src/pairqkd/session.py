"""Multi-process peer mode: Alice, Bob, and a quantum-channel daemon.

The daemon owns all quantum state: Alice asks it to prepare labeled pair
states, Bob asks it to measure, and neither party can inspect amplitudes
in flight. Any eavesdropper sits inside the daemon, exactly where a
physical one would. The classical traffic (basis announcements, sample
disclosure, verdict) is relayed through the daemon's public bus and is
treated as eavesdropper-visible but authenticated.

Choreography of one session:

1. both peers connect and send HELLO (Alice's carries the round count);
2. per round i: Alice sends PREPARE(i), Bob sends MEASURE(i) and gets
   RESULT(i) back;
3. Bob announces his secure bases, then Alice announces hers (Bob always
   first);
4. Alice disclosed a key sample, Bob answers with the verdict;
5. on a clean verdict both sides drop the disclosed positions and keep
   the rest; on a suspect verdict no key is emitted.

Peers and daemon each consume their own seeded random stream with the
same draw ledger as the in-process pipeline, so a session with seeds
derived from one master seed produces final keys bit-identical to
`analysis.run_experiment_full` with that master seed.

The daemon serves one session per lifetime and processes messages in
canonical round order on a single thread, which makes its transcript
deterministic as well.
"""

from __future__ import annotations

import hashlib
import math
import socket
from dataclasses import dataclass

import numpy as np

from . import qsim
from .adversary import NO_EVE, EveKind, EveStrategy, eve_intercept
from .protocol import (
    AliceRound,
    PairStateLabel,
    Verdict,
    alice_emit,
    bob_choose,
    bob_outcomes,
    bob_round_from_outcomes,
    combine_keys,
    pair_state,
    remove_positions,
    sift,
)
from .qsim import Basis
from .rng import RandomSource
from .wire import (
    PROTOCOL_VERSION,
    Transcript,
    WireError,
    decode_line,
    encode_message,
)

DEFAULT_TIMEOUT = 30.0


class SessionAbort(Exception):
    """The session ended on a protocol violation or an ERROR message."""


def parse_endpoint(text: str) -> tuple[str, int]:
    host, sep, port = text.rpartition(":")
    if not sep or not host:
        raise ValueError(f"endpoint must look like host:port, got {text!r}")
    return host, int(port)


def key_digest(bits) -> str:
    """SHA-256 hex digest of a key bit string, packed most significant bit first."""
    bits = np.asarray(bits, dtype=np.uint8)
    return hashlib.sha256(np.packbits(bits).tobytes()).hexdigest()


def bits_to_string(bits) -> str:
    return "".join(str(int(b)) for b in np.asarray(bits, dtype=np.uint8))


class _LineChannel:
    """One NDJSON connection with transcript recording."""

    def __init__(self, sock: socket.socket, transcript: Transcript | None = None):
        self._sock = sock
        self._reader = sock.makefile("rb")
        self.transcript = transcript

    def send(self, msg: dict) -> None:
        if "protocol_version" not in msg:
            msg = {**msg, "protocol_version": PROTOCOL_VERSION}
        if self.transcript is not None:
            self.transcript.record("sent", msg)
        self._sock.sendall(encode_message(msg))

    def send_unrecorded(self, msg: dict) -> None:
        if "protocol_version" not in msg:
            msg = {**msg, "protocol_version": PROTOCOL_VERSION}
        self._sock.sendall(encode_message(msg))

    def recv(self, record: bool = True) -> dict:
        line = self._reader.readline()
        if not line:
            raise WireError("connection-closed", "peer closed the connection")
        msg = decode_line(line)
        if record and self.transcript is not None:
            self.transcript.record("recv", msg)
        return msg

    def close(self) -> None:
        try:
            self._reader.close()
        except OSError:
            pass
        try:
            self._sock.close()
        except OSError:
            pass


def _expect(msg: dict, expected_type: str) -> dict:
    if msg["type"] == "ERROR":
        raise SessionAbort(f"remote error {msg['code']}: {msg['message']}")
    if msg["type"] != expected_type:
        raise SessionAbort(f"expected {expected_type}, got {msg['type']}")
    return msg


@dataclass
class PeerResult:
    role: str
    verdict: Verdict
    qber_estimate: float
    rounds_kept: int
    final_key: np.ndarray | None
    transcript: Transcript


class ChannelDaemon:
    """Neutral process holding the quantum states of one session.

    Construct, then call `serve_one_session`; the bound address is
    available as `.address` right after construction so tests can use an
    ephemeral port.
    """

    def __init__(
        self,
        host: str = "127.0.0.1",
        port: int = 0,
        eve: EveStrategy = NO_EVE,
        noise_p: float = 0.0,
        seed: int = 0,
        transcript_path=None,
        timeout: float = DEFAULT_TIMEOUT,
    ):
        if not 0.0 <= noise_p <= 1.0:
            raise ValueError(f"noise probability must lie in [0, 1], got {noise_p}")
        self.eve = eve
        self.noise_p = noise_p
        self.seed = seed
        self.transcript_path = transcript_path
        self.timeout = timeout
        self.transcript = Transcript("channel")
        self._server = socket.create_server((host, port))
        self._server.settimeout(timeout)
        self.address = self._server.getsockname()[:2]

    def close(self) -> None:
        try:
            self._server.close()
        except OSError:
            pass

    def _handshake(self):
        """Accept connections until an Alice and a Bob have said HELLO.

        Connections that close without a valid HELLO (including port
        probes) are answered with an ERROR where possible and dropped
        without affecting the session.
        """
        conns: dict[str, tuple[_LineChannel, dict]] = {}
        while len(conns) < 2:
            sock, _ = self._server.accept()
            sock.settimeout(self.timeout)
            chan = _LineChannel(sock)
            try:
                msg = chan.recv(record=False)
            except WireError as exc:
                try:
                    chan.send_unrecorded(
                        {"type": "ERROR", "code": exc.code, "message": exc.message}
                    )
                except OSError:
                    pass
                chan.close()
                continue
            role = msg.get("role") if msg["type"] == "HELLO" else None
            if msg["type"] != "HELLO" or role not in ("alice", "bob"):
                self._drop(chan, "protocol-violation", "expected HELLO from alice or bob")
                continue
            if role in conns:
                self._drop(chan, "double-connection", f"{role} is already connected")
                continue
            if role == "alice":
                rounds = msg.get("rounds")
                if not isinstance(rounds, int) or rounds < 1:
                    self._drop(
                        chan,
                        "protocol-violation",
                        "alice HELLO must carry a positive rounds count",
                    )
                    continue
            conns[role] = (chan, msg)
        return conns

    @staticmethod
    def _drop(chan: _LineChannel, code: str, message: str) -> None:
        try:
            chan.send_unrecorded({"type": "ERROR", "code": code, "message": message})
        except OSError:
            pass
        chan.close()

    def serve_one_session(self) -> int:
        """Serve exactly one session; returns a process exit status."""
        alice = bob = None
        try:
            conns = self._handshake()
            alice, alice_hello = conns["alice"]
            bob, bob_hello = conns["bob"]
            alice.transcript = self.transcript
            bob.transcript = self.transcript
            # Canonical transcript order regardless of who connected first.
            self.transcript.record("recv", alice_hello)
            alice.send({"type": "HELLO", "role": "channel"})
            self.transcript.record("recv", bob_hello)
            rounds = alice_hello["rounds"]
            bob.send({"type": "HELLO", "role": "channel", "rounds": rounds})

            self._run_rounds(alice, bob, rounds)

            # Public bus: Bob's bases first, then Alice's, sample, verdict.
            bob_announce = _expect(bob.recv(), "BASIS_ANNOUNCE")
            alice.send(bob_announce)
            alice_announce = _expect(alice.recv(), "BASIS_ANNOUNCE")
            bob.send(alice_announce)
            disclose = _expect(alice.recv(), "SAMPLE_DISCLOSE")
            bob.send(disclose)
            verdict = _expect(bob.recv(), "VERDICT")
            alice.send(verdict)
            return 0
        except (WireError, SessionAbort, OSError) as exc:
            code = exc.code if isinstance(exc, WireError) else "protocol-violation"
            text = str(exc)
            for chan in (alice, bob):
                if chan is not None:
                    try:
                        chan.send({"type": "ERROR", "code": code, "message": text})
                    except OSError:
                        pass
            return 1
        finally:
            for chan in (alice, bob):
                if chan is not None:
                    chan.close()
            self.close()
            if self.transcript_path is not None:
                self.transcript.save(self.transcript_path)

    def _run_rounds(self, alice: _LineChannel, bob: _LineChannel, rounds: int) -> None:
        crng = RandomSource(self.seed)
        role_oracle = self.eve.kind is EveKind.ROLE_ORACLE
        noisy = self.noise_p > 0.0
        for i in range(rounds):
            prep = _expect(alice.recv(), "PREPARE")
            if prep["round_id"] != i:
                raise WireError("out-of-order", f"expected PREPARE {i}, got {prep['round_id']}")
            try:
                label = PairStateLabel(prep["label"])
            except ValueError:
                raise WireError("protocol-violation", f"unknown label {prep['label']!r}") from None
            measure = _expect(bob.recv(), "MEASURE")
            if measure["round_id"] != i:
                raise WireError(
                    "out-of-order", f"expected MEASURE {i}, got {measure['round_id']}"
                )
            secure_qubit = measure["secure_qubit"]
            if secure_qubit not in (1, 2):
                raise WireError("protocol-violation", "secure_qubit must be 1 or 2")
            try:
                secure_basis = Basis(measure["secure_basis"])
            except ValueError:
                raise WireError(
                    "protocol-violation", f"unknown basis {measure['secure_basis']!r}"
                ) from None

            state = pair_state(label)
            state, _ = eve_intercept(
                state, self.eve, secure_qubit if role_oracle else None, crng, i
            )
            if noisy:
                state = qsim.depolarize(state, 1, self.noise_p, crng)
                state = qsim.depolarize(state, 2, self.noise_p, crng)
            secure_outcome, aux_outcome = bob_outcomes(state, secure_qubit, secure_basis, crng)
            bob.send(
                {
                    "type": "RESULT",
                    "round_id": i,
                    "secure_outcome": secure_outcome,
                    "aux_outcome": aux_outcome,
                }
            )


def run_channel_daemon(
    listen: str,
    eve: EveStrategy = NO_EVE,
    noise_p: float = 0.0,
    seed: int = 0,
    transcript_path=None,
    timeout: float = DEFAULT_TIMEOUT,
) -> int:
    host, port = parse_endpoint(listen)
    daemon = ChannelDaemon(host, port, eve, noise_p, seed, transcript_path, timeout)
    return daemon.serve_one_session()


def _connect(endpoint: str, timeout: float) -> socket.socket:
    host, port = parse_endpoint(endpoint)
    return socket.create_connection((host, port), timeout=timeout)


def run_alice_peer(
    connect: str,
    rounds: int,
    seed: int,
    verify_fraction: float = 0.1,
    transcript_path=None,
    timeout: float = DEFAULT_TIMEOUT,
) -> PeerResult:
    """Drive Alice's side of one session against a channel daemon."""
    if rounds < 1:
        raise ValueError(f"rounds must be at least 1, got {rounds}")
    if not 0.0 < verify_fraction <= 1.0:
        raise ValueError(f"verify fraction must lie in (0, 1], got {verify_fraction}")
    transcript = Transcript("alice")
    chan = _LineChannel(_connect(connect, timeout), transcript)
    try:
        chan.send({"type": "HELLO", "role": "alice", "rounds": rounds})
        _expect(chan.recv(), "HELLO")

        rng = RandomSource(seed)
        my_rounds: list[AliceRound] = []
        for i in range(rounds):
            a_round, _ = alice_emit(rng, i)
            my_rounds.append(a_round)
            chan.send({"type": "PREPARE", "round_id": i, "label": a_round.label.value})

        bob_bases = _expect(chan.recv(), "BASIS_ANNOUNCE")["bases"]
        if len(bob_bases) != rounds:
            raise SessionAbort("basis announcement length does not match the round count")
        chan.send(
            {"type": "BASIS_ANNOUNCE", "bases": "".join(r.basis.value for r in my_rounds)}
        )

        kept = [r for r in my_rounds if r.basis.value == bob_bases[r.round_id]]
        alice_key = np.array([r.key_bit for r in kept], dtype=np.uint8)
        n = len(kept)
        k = math.ceil(verify_fraction * n) if n else 0
        positions = rng.sample_indices(n, k)
        chan.send(
            {
                "type": "SAMPLE_DISCLOSE",
                "indices": positions,
                "bits": [int(alice_key[p]) for p in positions],
            }
        )

        verdict_msg = _expect(chan.recv(), "VERDICT")
        verdict = Verdict(verdict_msg["verdict"])
        final = remove_positions(alice_key, positions) if verdict is Verdict.CLEAN else None
        return PeerResult(
            role="alice",
            verdict=verdict,
            qber_estimate=float(verdict_msg["qber"]),
            rounds_kept=n,
            final_key=final,
            transcript=transcript,
        )
    finally:
        chan.close()
        if transcript_path is not None:
            transcript.save(transcript_path)


def run_bob_peer(
    connect: str,
    seed: int,
    qber_threshold: float = 0.0,
    transcript_path=None,
    timeout: float = DEFAULT_TIMEOUT,
) -> PeerResult:
    """Drive Bob's side of one session against a channel daemon."""
    if not 0.0 <= qber_threshold <= 1.0:
        raise ValueError(f"error threshold must lie in [0, 1], got {qber_threshold}")
    transcript = Transcript("bob")
    chan = _LineChannel(_connect(connect, timeout), transcript)
    try:
        chan.send({"type": "HELLO", "role": "bob"})
        hello = _expect(chan.recv(), "HELLO")
        rounds = hello.get("rounds")
        if not isinstance(rounds, int) or rounds < 1:
            raise SessionAbort("channel HELLO did not announce a positive round count")

        rng = RandomSource(seed)
        my_rounds = []
        for i in range(rounds):
            secure_qubit, secure_basis = bob_choose(rng)
            chan.send(
                {
                    "type": "MEASURE",
                    "round_id": i,
                    "secure_qubit": secure_qubit,
                    "secure_basis": secure_basis.value,
                }
            )
            result = _expect(chan.recv(), "RESULT")
            if result["round_id"] != i:
                raise SessionAbort(f"RESULT for round {result['round_id']}, expected {i}")
            my_rounds.append(
                bob_round_from_outcomes(
                    i,
                    secure_qubit,
                    secure_basis,
                    result["secure_outcome"],
                    result["aux_outcome"],
                )
            )

        chan.send(
            {
                "type": "BASIS_ANNOUNCE",
                "bases": "".join(r.secure_basis.value for r in my_rounds),
            }
        )
        alice_bases = _expect(chan.recv(), "BASIS_ANNOUNCE")["bases"]
        if len(alice_bases) != rounds:
            raise SessionAbort("basis announcement length does not match the round count")

        kept = [r for r in my_rounds if r.secure_basis.value == alice_bases[r.round_id]]
        secure = np.array([r.secure_bit for r in kept], dtype=np.uint8)
        aux = np.array([r.aux_bit for r in kept], dtype=np.uint8)
        combined = combine_keys(secure, aux)

        disclose = _expect(chan.recv(), "SAMPLE_DISCLOSE")
        positions = list(disclose["indices"])
        bits = list(disclose["bits"])
        if len(positions) != len(bits) or any(not 0 <= p < len(combined) for p in positions):
            raise SessionAbort("sample disclosure does not fit the sifted key")
        mismatches = sum(int(combined[p]) != int(b) for p, b in zip(positions, bits))
        qber = mismatches / len(positions) if positions else 0.0
        verdict = Verdict.CLEAN if qber <= qber_threshold else Verdict.SUSPECT
        chan.send({"type": "VERDICT", "verdict": verdict.value, "qber": qber})

        final = remove_positions(combined, positions) if verdict is Verdict.CLEAN else None
        return PeerResult(
            role="bob",
            verdict=verdict,
            qber_estimate=qber,
            rounds_kept=len(kept),
            final_key=final,
            transcript=transcript,
        )
    finally:
        chan.close()
        if transcript_path is not None:
            transcript.save(transcript_path)


def replay_transcript(transcript: Transcript) -> dict:
    """Recompute both final keys from a channel transcript.

    The daemon's transcript contains everything needed to replay the
    classical part of a session deterministically: labels, measurement
    choices, outcomes, announcements, the disclosed sample and the
    verdict. Returns the reconstructed keys and verdict; they must match
    what the live peers computed.
    """
    labels: dict[int, PairStateLabel] = {}
    measures: dict[int, tuple[int, Basis]] = {}
    outcomes: dict[int, tuple[int, int]] = {}
    announces: list[str] = []
    disclose = verdict_msg = None
    for entry in transcript.entries:
        msg = entry.message
        mtype = msg["type"]
        if mtype == "PREPARE" and entry.direction == "recv":
            labels[msg["round_id"]] = PairStateLabel(msg["label"])
        elif mtype == "MEASURE" and entry.direction == "recv":
            measures[msg["round_id"]] = (msg["secure_qubit"], Basis(msg["secure_basis"]))
        elif mtype == "RESULT" and entry.direction == "sent":
            outcomes[msg["round_id"]] = (msg["secure_outcome"], msg["aux_outcome"])
        elif mtype == "BASIS_ANNOUNCE" and entry.direction == "recv":
            announces.append(msg["bases"])
        elif mtype == "SAMPLE_DISCLOSE" and entry.direction == "recv":
            disclose = msg
        elif mtype == "VERDICT" and entry.direction == "recv":
            verdict_msg = msg
    if disclose is None or verdict_msg is None or len(announces) != 2:
        raise ValueError("transcript does not contain a complete session")

    rounds = sorted(labels)
    if rounds != sorted(measures) or rounds != sorted(outcomes):
        raise ValueError("transcript rounds are incomplete")
    alice_rounds = [AliceRound(i, labels[i]) for i in rounds]
    bob_rounds = [
        bob_round_from_outcomes(i, measures[i][0], measures[i][1], *outcomes[i]) for i in rounds
    ]
    sifted = sift(alice_rounds, bob_rounds)
    combined = combine_keys(sifted.bob_secure_key, sifted.bob_aux_key)
    verdict = Verdict(verdict_msg["verdict"])
    if verdict is Verdict.CLEAN:
        alice_key = remove_positions(sifted.alice_key, list(disclose["indices"]))
        bob_key = remove_positions(combined, list(disclose["indices"]))
    else:
        alice_key = bob_key = None
    return {
        "alice_key": alice_key,
        "bob_key": bob_key,
        "verdict": verdict,
        "qber": float(verdict_msg["qber"]),
    }
