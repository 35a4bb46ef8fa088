"""Classical wire protocol: newline-delimited JSON messages.

Every message is one UTF-8 JSON object per line and always carries
``type`` and ``protocol_version``. Message vocabulary:

====================  =============================================  =================
type                  required payload fields                         direction
====================  =============================================  =================
HELLO                 role ("alice"/"bob"/"channel")                  peer <-> channel
PREPARE               round_id, label                                 alice -> channel
MEASURE               round_id, secure_qubit, secure_basis            bob -> channel
RESULT                round_id, secure_outcome, aux_outcome           channel -> bob
BASIS_ANNOUNCE        bases                                           relayed peer -> peer
SAMPLE_DISCLOSE       indices, bits                                   alice -> bob
VERDICT               verdict, qber                                   bob -> alice
ERROR                 code, message                                   channel -> peer
====================  =============================================  =================

Alice's HELLO additionally carries ``rounds`` so the channel can tell Bob
how many pairs to expect; the channel's HELLO reply to Bob echoes it.
Round ids must increase strictly per direction.

Transcripts record every message a party sent or received with a logical
timestamp (a per-party sequence number; wall clocks would break the
byte-for-byte reproducibility of sessions). `scan_transcript` is the
secrecy check: everything a peer receives over the wire is treated as
eavesdropper-visible, so state labels, role choices and amplitudes must
never appear there.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

PROTOCOL_VERSION = 1

# type -> payload fields required besides type/protocol_version
REQUIRED_FIELDS = {
    "HELLO": ("role",),
    "PREPARE": ("round_id", "label"),
    "MEASURE": ("round_id", "secure_qubit", "secure_basis"),
    "RESULT": ("round_id", "secure_outcome", "aux_outcome"),
    "BASIS_ANNOUNCE": ("bases",),
    "SAMPLE_DISCLOSE": ("indices", "bits"),
    "VERDICT": ("verdict", "qber"),
    "ERROR": ("code", "message"),
}

# type -> every key that may legitimately appear
ALLOWED_FIELDS = {
    "HELLO": {"type", "protocol_version", "role", "rounds"},
    "PREPARE": {"type", "protocol_version", "round_id", "label"},
    "MEASURE": {"type", "protocol_version", "round_id", "secure_qubit", "secure_basis"},
    "RESULT": {"type", "protocol_version", "round_id", "secure_outcome", "aux_outcome"},
    "BASIS_ANNOUNCE": {"type", "protocol_version", "bases"},
    "SAMPLE_DISCLOSE": {"type", "protocol_version", "indices", "bits"},
    "VERDICT": {"type", "protocol_version", "verdict", "qber"},
    "ERROR": {"type", "protocol_version", "code", "message"},
}

# Message types a peer may legitimately receive.
PEER_INBOUND_TYPES = {
    "alice": {"HELLO", "BASIS_ANNOUNCE", "VERDICT", "ERROR"},
    "bob": {"HELLO", "RESULT", "BASIS_ANNOUNCE", "SAMPLE_DISCLOSE", "ERROR"},
}

# Keys that must never reach a peer over the wire: Alice's state labels,
# Bob's role choices, and anything amplitude-shaped.
SECRET_KEYS = {"label", "secure_qubit", "amps", "amplitudes", "state", "statevector"}


class WireError(Exception):
    """Protocol violation on the classical channel."""

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message


def encode_message(msg: dict) -> bytes:
    """One JSON object, one line. protocol_version is stamped if missing."""
    if "protocol_version" not in msg:
        msg = {**msg, "protocol_version": PROTOCOL_VERSION}
    return (json.dumps(msg, separators=(",", ":")) + "\n").encode("utf-8")


def decode_line(line: bytes) -> dict:
    try:
        msg = json.loads(line.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise WireError("malformed-json", f"undecodable message line: {exc}") from None
    if not isinstance(msg, dict):
        raise WireError("malformed-json", "message line is not a JSON object")
    validate_message(msg)
    return msg


def validate_message(msg: dict) -> None:
    mtype = msg.get("type")
    if mtype not in REQUIRED_FIELDS:
        raise WireError("unknown-type", f"unknown message type {mtype!r}")
    if msg.get("protocol_version") != PROTOCOL_VERSION:
        raise WireError(
            "bad-version",
            f"protocol_version must be {PROTOCOL_VERSION}, got {msg.get('protocol_version')!r}",
        )
    for fieldname in REQUIRED_FIELDS[mtype]:
        if fieldname not in msg:
            raise WireError("missing-field", f"{mtype} message lacks {fieldname!r}")
    extras = set(msg) - ALLOWED_FIELDS[mtype]
    if extras:
        raise WireError("unexpected-field", f"{mtype} message carries {sorted(extras)}")


@dataclass
class TranscriptEntry:
    direction: str  # "sent" or "recv"
    message: dict
    timestamp: int  # logical clock: position in this transcript


@dataclass
class Transcript:
    party: str
    entries: list[TranscriptEntry] = field(default_factory=list)

    def record(self, direction: str, message: dict) -> None:
        self.entries.append(TranscriptEntry(direction, message, len(self.entries)))

    def messages(self, direction: str | None = None) -> list[dict]:
        return [e.message for e in self.entries if direction in (None, e.direction)]

    def to_json_lines(self) -> str:
        lines = [
            json.dumps(
                {"timestamp": e.timestamp, "direction": e.direction, "message": e.message},
                separators=(",", ":"),
            )
            for e in self.entries
        ]
        return "\n".join(lines) + ("\n" if lines else "")

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json_lines())

    @classmethod
    def load(cls, path, party: str = "") -> "Transcript":
        t = cls(party)
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                obj = json.loads(line)
                t.entries.append(
                    TranscriptEntry(obj["direction"], obj["message"], obj["timestamp"])
                )
        return t


def scan_transcript(transcript: Transcript) -> list[str]:
    """Secrecy violations in everything this peer received over the wire.

    Returns human-readable findings; an empty list means the wire leaked
    neither labels, roles, nor amplitudes to this party, and every
    inbound message was of an expected type and shape.
    """
    party = transcript.party
    allowed_types = PEER_INBOUND_TYPES.get(party)
    if allowed_types is None:
        raise ValueError(f"scanner only audits peers, not {party!r}")
    findings = []
    for entry in transcript.entries:
        if entry.direction != "recv":
            continue
        msg = entry.message
        mtype = msg.get("type")
        if mtype not in allowed_types:
            findings.append(f"{party} received unexpected {mtype} at {entry.timestamp}")
            continue
        leaked = set(msg) & SECRET_KEYS
        if leaked:
            findings.append(
                f"{party} received {mtype} leaking {sorted(leaked)} at {entry.timestamp}"
            )
        extras = set(msg) - ALLOWED_FIELDS.get(mtype, set())
        if extras:
            findings.append(
                f"{party} received {mtype} with stray fields {sorted(extras)} at {entry.timestamp}"
            )
    return findings
