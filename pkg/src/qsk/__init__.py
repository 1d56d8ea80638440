"""qsk: verification toolkit for the two-setting d-outcome SATWAP Bell
functional, its sum-of-squares certificates, and the constructive
self-testing extraction of the maximally entangled state."""

__version__ = "0.1.0"

from . import bell, canonical, cli, cyclotomic, linalg, randomness, satwap, selftest, sos

__all__ = [
    "__version__",
    "bell",
    "canonical",
    "cli",
    "cyclotomic",
    "linalg",
    "randomness",
    "satwap",
    "selftest",
    "sos",
]
