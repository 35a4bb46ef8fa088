"""Run the three-process peer mode on loopback and audit the wire.

A quantum-channel daemon owns the states; Alice and Bob connect over TCP
and speak newline-delimited JSON. Afterwards the script verifies that
both peers derived the same key, that the key matches the in-process
pipeline under the same master seed, and that nothing secret crossed the
classical wire.
"""

import sys
import threading

import numpy as np

from pairqkd import ExperimentConfig, Protocol, run_experiment_full, scan_transcript
from pairqkd.rng import derive_seeds
from pairqkd.session import ChannelDaemon, key_digest, run_alice_peer, run_bob_peer

MASTER_SEED = 20240808
ROUNDS = 500

alice_seed, bob_seed, channel_seed = derive_seeds(MASTER_SEED, 3)
print(f"master seed {MASTER_SEED} -> alice {alice_seed}, bob {bob_seed}, "
      f"channel {channel_seed}\n")

daemon = ChannelDaemon(seed=channel_seed)
endpoint = "%s:%d" % daemon.address
print(f"channel daemon on {endpoint}, serving one session")

daemon_thread = threading.Thread(target=daemon.serve_one_session)
daemon_thread.start()

results = {}
peer_threads = [
    threading.Thread(
        target=lambda: results.update(alice=run_alice_peer(endpoint, ROUNDS, alice_seed))
    ),
    threading.Thread(
        target=lambda: results.update(bob=run_bob_peer(endpoint, bob_seed))
    ),
]
for t in peer_threads:
    t.start()
for t in peer_threads + [daemon_thread]:
    t.join()

alice, bob = results["alice"], results["bob"]
print(f"\nverdict {alice.verdict.value}, estimated QBER {bob.qber_estimate}")
print(f"kept rounds {alice.rounds_kept}, final key {len(alice.final_key)} bits")
print(f"alice digest {key_digest(alice.final_key)}")
print(f"bob digest   {key_digest(bob.final_key)}")
assert np.array_equal(alice.final_key, bob.final_key)

in_proc = run_experiment_full(
    ExperimentConfig(protocol=Protocol.PAIR, rounds=ROUNDS, seed=MASTER_SEED)
)
assert np.array_equal(in_proc.alice_final_key, alice.final_key)
print("\nwire session and in-process pipeline produced bit-identical keys")

findings = scan_transcript(alice.transcript) + scan_transcript(bob.transcript)
if findings:
    print("SECRECY VIOLATIONS:", *findings, sep="\n  ")
    sys.exit(1)
print("secrecy scan: no labels, roles or amplitudes on the classical wire")

messages = [e.message["type"] for e in alice.transcript.entries]
print(f"\nalice exchanged {len(messages)} messages; the tail of her transcript:")
for entry in alice.transcript.entries[-4:]:
    print(f"  {entry.timestamp:>4} {entry.direction:<4} {entry.message}")
