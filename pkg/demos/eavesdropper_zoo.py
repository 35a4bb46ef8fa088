"""Survey every adversary model against the pair protocol.

For each strategy the exact enumeration gives the induced final-key
error rate and Eve's agreement rates; a Monte Carlo run confirms the
numbers and shows whether sample verification catches her.
"""

from pairqkd import (
    EveStrategy,
    ExperimentConfig,
    Protocol,
    enumerate_exact,
    run_experiment,
)

STRATEGIES = (
    "none",
    "intercept-both:random",
    "intercept-both:z",
    "intercept-both:x",
    "intercept-one:1:random",
    "role-oracle",
)


def fmt(x):
    return "  -  " if x is None else f"{x:.4f}"


print("=== adversaries vs the pair protocol (exact enumeration) ===")
print(f"{'strategy':<24} {'QBER':>6} {'Eve key':>8} {'Eve aux':>8}")
for spec in STRATEGIES:
    dist = enumerate_exact(Protocol.PAIR, EveStrategy.parse(spec))
    print(f"{spec:<24} {fmt(dist.qber_final):>6} {fmt(dist.eve_secure_agreement):>8} "
          f"{fmt(dist.eve_aux_agreement):>8}")

print("""
Notes: intercepting both qubits raises the error rate to 5/16, above the
1/4 of the single-qubit baseline, while Eve's key agreement drops to
11/16. The role-informed adversary reads the auxiliary key perfectly and
induces no error at all, but still learns nothing about the secure half.
""")

print("=== 20000-round Monte Carlo with verification (threshold 0.11) ===")
print(f"{'strategy':<24} {'QBER':>7} {'verdict':>8}")
for i, spec in enumerate(STRATEGIES):
    stats = run_experiment(
        ExperimentConfig(
            protocol=Protocol.PAIR,
            rounds=20_000,
            seed=9000 + i,
            eve=EveStrategy.parse(spec),
            qber_threshold=0.11,
        )
    )
    print(f"{spec:<24} {stats.qber_final:>7.4f} {stats.verdict.value:>8}")

print("\nEvery intercepting strategy trips the verdict; the role oracle does not,")
print("exactly as the exact numbers above predict.")
