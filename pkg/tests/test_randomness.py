import numpy as np
import pytest

from _helpers import random_realization

from qsk.bell import sample_statistics
from qsk.canonical import ideal_realization
from qsk.randomness import (
    certified_bits,
    expansion_ledger,
    ideal_guessing_probability,
    outcome_distribution,
)
from qsk.selftest import scramble

rng = np.random.default_rng(1618)


@pytest.mark.parametrize("d", [2, 3, 4, 6])
def test_outcome_distribution_uniform_at_canonical_point(d):
    r = ideal_realization(d)
    for party in ("A", "B"):
        for setting in (1, 2):
            dist = outcome_distribution(r, party, setting)
            assert np.abs(dist - 1 / d).max() < 1e-9


def test_guessing_probability_values():
    assert abs(ideal_guessing_probability(ideal_realization(4), "B", 1) - 0.25) < 1e-9
    assert abs(ideal_guessing_probability(ideal_realization(2), "B", 2) - 0.5) < 1e-9


def test_guessing_probability_refuses_off_the_maximal_point():
    with pytest.raises(ValueError):
        ideal_guessing_probability(random_realization(3, rng), "B", 1)


def test_guessing_probability_invariant_under_scrambling():
    d = 3
    r = ideal_realization(d)
    s = scramble(r, 2, 2, seed=8)
    assert abs(
        ideal_guessing_probability(s, "B", 1) - ideal_guessing_probability(r, "B", 1)
    ) < 1e-9


def test_certified_bits():
    assert certified_bits(2) == 1.0
    assert certified_bits(8) == 3.0
    assert certified_bits(1024) == 10.0
    with pytest.raises(ValueError):
        certified_bits(1)


def test_expansion_ledger():
    report = expansion_ledger(2, rounds=100)
    assert report.expansion_ratio == 1.0
    assert report.input_bits == 100.0
    assert report.output_bits == 100.0
    report = expansion_ledger(16, rounds=3)
    assert report.expansion_ratio == 4.0
    assert report.output_bits == 12.0
    assert abs(report.guessing_probability - 1 / 16) < 1e-12
    with pytest.raises(ValueError):
        expansion_ledger(4, rounds=0)


def test_expansion_ratio_monotone_in_d():
    ratios = [expansion_ledger(d, rounds=1).expansion_ratio for d in range(2, 20)]
    assert all(b > a for a, b in zip(ratios, ratios[1:]))


def test_empirical_uniformity():
    d = 3
    r = ideal_realization(d)
    shots = 200_000
    t = sample_statistics(r, shots, seed=12)
    for y in range(2):
        counts = t.setting_counts[:, y].sum()
        marginal = (
            t.probabilities[:, y].sum(axis=1)
            * t.setting_counts[:, y][:, None]
        ).sum(axis=0) / counts
        se = np.sqrt((1 / d) * (1 - 1 / d) / counts)
        assert np.abs(marginal - 1 / d).max() <= 5 * se
