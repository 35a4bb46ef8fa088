"""Pinned attack statistics for the pair protocol, noiseless channel.

These numbers were produced once by `analysis.enumerate_exact` and frozen
here as regression constants: the enumeration must keep reproducing them
exactly, and Monte Carlo runs must land within binomial noise of them.
All values are exact dyadic rationals. Bump PINNED_VERSION when a
deliberate semantic change (for example a different eavesdropper decoder)
re-derives the table.

Keys are (protocol, eavesdropper spec string); fields mirror the exact
distribution's marginals, with None for marginals the strategy does not
produce.
"""

PINNED_VERSION = 1

PINNED_ORACLE = {
    ("pair", "intercept-both:random"): {
        "sift_rate": 0.5,
        "qber_final": 0.3125,     # 5/16
        "qber_sifted": 0.375,     # 3/8
        "eve_secure_agreement": 0.6875,  # 11/16
        "eve_aux_agreement": 0.8125,     # 13/16
    },
    ("pair", "intercept-both:z"): {
        "sift_rate": 0.5,
        "qber_final": 0.25,
        "qber_sifted": 0.25,
        "eve_secure_agreement": 0.75,
        "eve_aux_agreement": 0.75,
    },
    ("pair", "intercept-both:x"): {
        "sift_rate": 0.5,
        "qber_final": 0.25,
        "qber_sifted": 0.5,
        "eve_secure_agreement": 0.75,
        "eve_aux_agreement": 0.875,  # 7/8
    },
    ("pair", "intercept-one:1:random"): {
        "sift_rate": 0.5,
        "qber_final": 0.1875,     # 3/16
        "qber_sifted": 0.3125,    # 5/16
        "eve_secure_agreement": 0.625,  # 5/8
        "eve_aux_agreement": None,
    },
}
