"""Reference fifteen-round trace used as a known-good end-to-end fixture.

Fifteen rounds where Alice's and Bob's bases match; feeding the recorded
preparation and measurement data through the pipeline must reproduce
every derived row, and adding Bob's auxiliary key to his secure key must
reproduce Alice's key in every column.
"""

from pairqkd.protocol import AliceRound, BobRound, PairStateLabel
from pairqkd.qsim import Basis

BASES = "xzxxzxzzxzzxzxx"
ALICE_BITS = "011010001110001"
SECURE_STATES = "-1--1-00-11-0+-"
SECURE_BITS = "010010000110010"
AUX_STATES = "-++---+-+-+--++"
AUX_BITS = "001000001000011"
COMBINED_BITS = "011010001110001"

_LABEL_BY_BASIS_BIT = {
    ("z", 1): PairStateLabel.Z1,
    ("z", 0): PairStateLabel.Z0,
    ("x", 0): PairStateLabel.XPHI_PLUS,
    ("x", 1): PairStateLabel.XPHI_MINUS,
}

_OUTCOME_BY_SYMBOL = {"0": 0, "1": 1, "-": 0, "+": 1}


def build_rounds() -> tuple[list[AliceRound], list[BobRound]]:
    """Reconstruct the per-round records from the prepared/measured data.

    Only the independently recorded inputs are used (basis, Alice's bit,
    Bob's measured eigenstates); every key-bit row is left for the
    pipeline to derive. The secure qubit index is not part of the trace
    (the pair states are exchange-symmetric), so qubit 1 is used.
    """
    alice_rounds, bob_rounds = [], []
    for i, (basis_ch, alice_bit, sec_state, aux_state) in enumerate(
        zip(BASES, ALICE_BITS, SECURE_STATES, AUX_STATES)
    ):
        label = _LABEL_BY_BASIS_BIT[(basis_ch, int(alice_bit))]
        alice_rounds.append(AliceRound(i, label))
        bob_rounds.append(
            BobRound(
                round_id=i,
                secure_qubit=1,
                secure_basis=Basis.Z if basis_ch == "z" else Basis.X,
                secure_outcome=_OUTCOME_BY_SYMBOL[sec_state],
                aux_outcome=_OUTCOME_BY_SYMBOL[aux_state],
            )
        )
    return alice_rounds, bob_rounds
