"""Randomness certification at the maximal violation point.

At that point the self-testing argument pins the outcome distribution of
either party to uniform 1/d, so log2(d) bits per round are certified
while one random bit per round chooses the setting.  No bound is claimed
off the maximal point: the adversarial optimization that would be needed
there is out of scope, and the API refuses non-maximal inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bell import Realization, born_probabilities, correlators_from_realization
from .satwap import BellFunctional, evaluate, quantum_bound
from .selftest import tol_violation


@dataclass(frozen=True)
class RandomnessReport:
    d: int
    distribution: np.ndarray
    guessing_probability: float
    certified_bits: float
    input_bits: float
    output_bits: float
    expansion_ratio: float


def outcome_distribution(r: Realization, party: str, setting: int) -> np.ndarray:
    """Marginal outcome distribution of one party for one setting (1 or 2).

    Computed from the Born probabilities; no-signaling makes it independent
    of the other party's setting, which is asserted.
    """
    probs = born_probabilities(r).probabilities
    if party.upper() == "A":
        marg = probs.sum(axis=3)[setting - 1]  # (other setting, a)
    elif party.upper() == "B":
        marg = probs.sum(axis=2)[:, setting - 1]
    else:
        raise ValueError(f"party must be 'A' or 'B', got {party!r}")
    if np.abs(marg[0] - marg[1]).max() > 1e-9:
        raise ValueError("marginals signal between the parties")
    return marg[0]


def ideal_guessing_probability(r: Realization, party: str, setting: int) -> float:
    """Best single-outcome guess at the maximal violation point.

    Refuses any realization that does not maximally violate: the uniform
    1/d conclusion only holds where the self-test applies.
    """
    value = evaluate(BellFunctional.satwap(r.d), correlators_from_realization(r))
    gap = abs(value - quantum_bound(r.d))
    if gap > tol_violation(r.d):
        raise ValueError(
            f"realization misses the maximal value by {gap:.3e}; no guessing "
            "bound is claimed off the maximal point"
        )
    return float(outcome_distribution(r, party, setting).max())


def certified_bits(d: int) -> float:
    """log2(d) perfect bits per round at the maximal point."""
    if d < 2:
        raise ValueError("d must be >= 2")
    return float(np.log2(d))


def expansion_ledger(d: int, rounds: int) -> RandomnessReport:
    """Randomness accounting: one input bit per round buys log2(d) output bits."""
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    bits = certified_bits(d)
    return RandomnessReport(
        d=d,
        distribution=np.full(d, 1.0 / d),
        guessing_probability=1.0 / d,
        certified_bits=bits,
        input_bits=float(rounds),
        output_bits=rounds * bits,
        expansion_ratio=bits,
    )
