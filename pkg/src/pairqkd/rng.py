"""Deterministic randomness for protocol parties.

Every stochastic decision in the simulator flows through a RandomSource,
so a run is fully determined by its seeds. The underlying generator is
PCG64, which is published, explicitly seedable, and produces the same
stream on every platform. Each protocol party (Alice, Bob, the quantum
channel) owns an independent stream; `derive_seeds` splits one master
seed into per-party seeds so a single integer reproduces an experiment
end to end, in process or across processes.
"""

from __future__ import annotations

import numpy as np

# Stream positions assigned by derive_seeds(master, 3).
ALICE_STREAM = 0
BOB_STREAM = 1
CHANNEL_STREAM = 2


class RandomSource:
    """Seeded uniform source.

    All draws are built from float64 uniforms in [0, 1): one uniform per
    decision. That makes the draw ledger of any protocol run easy to
    reason about and keeps in-process and peer-mode transcripts aligned.
    """

    def __init__(self, seed: int):
        seed = int(seed)
        if not 0 <= seed < 2**64:
            raise ValueError(f"seed must fit in an unsigned 64-bit integer, got {seed}")
        self.seed = seed
        self._gen = np.random.Generator(np.random.PCG64(seed))
        self._random = self._gen.random  # bound-method cache for the hot path

    def uniform(self) -> float:
        """Uniform float64 in [0, 1)."""
        return self._random()

    def bit(self) -> int:
        """Uniform bit; consumes one uniform."""
        return 1 if self._random() < 0.5 else 0

    def choice(self, n: int) -> int:
        """Uniform integer in [0, n); consumes one uniform."""
        if n <= 0:
            raise ValueError("choice requires n >= 1")
        k = int(self._random() * n)
        return min(k, n - 1)

    def sample_indices(self, n: int, k: int) -> list[int]:
        """k distinct indices from range(n), uniform without replacement.

        Partial Fisher-Yates consuming exactly k uniforms; the result is
        returned in ascending order.
        """
        if not 0 <= k <= n:
            raise ValueError(f"cannot sample {k} items from {n}")
        pool = list(range(n))
        for i in range(k):
            j = i + self.choice(n - i)
            pool[i], pool[j] = pool[j], pool[i]
        return sorted(pool[:k])


def derive_seeds(master_seed: int, n: int) -> list[int]:
    """Split one master seed into n independent 64-bit stream seeds.

    Uses numpy's SeedSequence expansion, which is fixed across platforms
    and library versions. Position 0 is Alice's stream, 1 is Bob's and 2
    is the channel's (see the *_STREAM constants); experiment shards or
    extra parties take further positions.
    """
    if not 0 <= int(master_seed) < 2**64:
        raise ValueError(f"seed must fit in an unsigned 64-bit integer, got {master_seed}")
    state = np.random.SeedSequence(int(master_seed)).generate_state(n, dtype=np.uint64)
    return [int(s) for s in state]
