"""Compare the single-qubit baseline with the pair scheme under attack.

The same intercept-resend adversary faces both protocols. Against single
qubits she causes a sifted error rate of 1/4 and still guesses 3/4 of the
key; against pairs she must also guess which qubit feeds which key, which
raises the damage she causes and lowers what she learns.
"""

from pairqkd import EveStrategy, ExperimentConfig, Protocol, enumerate_exact, run_experiment

EVE = EveStrategy.parse("intercept-both:random")

print("=== intercept-resend, random bases: exact values ===\n")
rows = []
for proto in (Protocol.BB84, Protocol.PAIR):
    dist = enumerate_exact(proto, EVE)
    rows.append((proto.value, dist.qber_final, dist.eve_secure_agreement))

print(f"{'protocol':<10} {'induced QBER':>14} {'Eve key agreement':>19}")
for name, qber, agreement in rows:
    print(f"{name:<10} {qber:>14.4f} {agreement:>19.4f}")

bb84_qber, pair_qber = rows[0][1], rows[1][1]
bb84_eve, pair_eve = rows[0][2], rows[1][2]
print(f"""
The pair scheme is strictly harsher terrain for this adversary:
she disturbs more ({pair_qber:.4f} vs {bb84_qber:.4f}, easier to detect)
and learns less ({pair_eve:.4f} vs {bb84_eve:.4f} of the key bits).
""")

print("=== 50000-round Monte Carlo confirmation ===\n")
for proto in (Protocol.BB84, Protocol.PAIR):
    stats = run_experiment(
        ExperimentConfig(protocol=proto, rounds=50_000, seed=4321, eve=EVE,
                         qber_threshold=0.11)
    )
    print(f"{proto.value:<6} sampled QBER {stats.qber_final:.4f}  "
          f"eve agreement {stats.eve_secure_agreement:.4f}  verdict {stats.verdict.value}")
