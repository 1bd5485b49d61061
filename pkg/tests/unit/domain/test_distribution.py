"""
Unit tests for bitstring distributions, marginals and Shannon entropies.
"""

import math

import numpy as np
import pytest

from src.domain.entities.distributions import BitstringDistribution, ShotCounts
from src.domain.services.distribution import (
    empirical_distribution,
    entropy_summary,
    exact_distribution,
    marginal,
    shannon_entropy,
    total_variation,
)
from src.domain.value_objects.partition import Bipartition
from src.shared.errors import ValidationError
from tests.fixtures.ladder_fixtures import LN2, make_state


def random_distribution(n_atoms: int, seed: int) -> BitstringDistribution:
    weights = np.random.default_rng(seed).random(1 << n_atoms) + 1e-3
    return BitstringDistribution(
        n_atoms=n_atoms,
        bitstrings=np.arange(1 << n_atoms, dtype=np.uint64),
        probabilities=weights / weights.sum(),
    )


class TestExactDistribution:
    """Test distributions derived from amplitudes."""

    def test_bell_state_support(self, bell_state):
        """Test only the two occupied basis states are stored."""
        dist = exact_distribution(bell_state)

        assert dist.as_dict() == pytest.approx({"00": 0.5, "11": 0.5})
        assert dist.source == "exact"

    def test_epsilon_drops_tiny_entries(self):
        """Test the optional epsilon floor renormalizes the rest."""
        state = make_state(np.sqrt([0.5, 0.5 - 1e-14, 1e-14, 0.0]))

        dist = exact_distribution(state, epsilon=1e-12)

        assert dist.size == 2
        assert dist.probabilities.sum() == pytest.approx(1.0, abs=1e-15)

    def test_negative_epsilon(self, bell_state):
        """Test epsilon must be nonnegative."""
        with pytest.raises(ValidationError):
            exact_distribution(bell_state, epsilon=-1.0)


class TestEmpiricalDistribution:
    """Test plug-in distributions from shots."""

    def test_counts_over_total(self):
        """Test p = count / total with text keys atom 0 first."""
        dist = empirical_distribution({"10": 3, "01": 1})

        assert dist.n_shots == 4
        assert dist.as_dict() == pytest.approx({"10": 0.75, "01": 0.25})
        assert list(dist.bitstrings) == [1, 2]
        assert list(dist.counts) == [3, 1]

    def test_from_shot_counts(self):
        """Test ShotCounts input keeps the counts."""
        record = ShotCounts.from_arrays(2, np.array([3, 0, 3]), np.array([2, 5, 1]))

        dist = empirical_distribution(record)

        assert dist.is_empirical
        assert dist.n_shots == 8
        assert dist.as_dict() == pytest.approx({"00": 5 / 8, "11": 3 / 8})

    def test_inconsistent_lengths(self):
        """Test keys of different lengths are rejected."""
        with pytest.raises(ValidationError):
            empirical_distribution({"10": 1, "101": 1})

    def test_empty_record(self):
        """Test an empty mapping is rejected."""
        with pytest.raises(ValidationError):
            empirical_distribution({})


class TestMarginal:
    """Test marginalization over the bipartition."""

    def test_marginals_of_correlated_pair(self, correlated_empirical, two_atom_cut):
        """Test each side of a 00/11 mixture is a fair coin."""
        for side in ("A", "B"):
            side_dist = marginal(correlated_empirical, two_atom_cut, side)

            assert side_dist.n_atoms == 1
            assert side_dist.as_dict() == pytest.approx({"0": 0.5, "1": 0.5})
            assert list(side_dist.counts) == [50, 50]

    def test_low_bits_belong_to_a(self):
        """Test A is the atom-0 prefix of the bitstring."""
        dist = empirical_distribution({"110": 1, "100": 3})
        part = Bipartition(n_atoms=3, size_a=2)

        assert marginal(dist, part, "A").as_dict() == pytest.approx({"11": 0.25, "10": 0.75})
        assert marginal(dist, part, "B").as_dict() == pytest.approx({"0": 1.0})


class TestEntropySummary:
    """Test Shannon entropies and mutual information."""

    def test_correlated_pair(self, correlated_empirical, two_atom_cut):
        """Test I = ln 2 for perfectly correlated fair coins."""
        summary = entropy_summary(correlated_empirical, two_atom_cut)

        assert summary.s_ab == pytest.approx(LN2)
        assert summary.s_a == pytest.approx(LN2)
        assert summary.s_b == pytest.approx(LN2)
        assert summary.mutual_information == pytest.approx(LN2)
        assert summary.s_a_given_b == pytest.approx(0.0, abs=1e-15)

    def test_product_distribution_has_zero_information(self, two_atom_cut):
        """Test independent sides give I = 0."""
        dist = empirical_distribution({"00": 1, "01": 1, "10": 1, "11": 1})

        summary = entropy_summary(dist, two_atom_cut)

        assert summary.mutual_information == pytest.approx(0.0, abs=1e-12)
        assert summary.s_ab == pytest.approx(2 * LN2)

    @pytest.mark.parametrize("seed", range(5))
    def test_bound_chain_on_random_distributions(self, seed):
        """Test 0 <= I <= min(S_A, S_B) and I = S_A - S_{A|B}."""
        dist = random_distribution(5, seed)
        summary = entropy_summary(dist, Bipartition(n_atoms=5, size_a=2))

        assert summary.mutual_information >= -1e-12
        assert summary.mutual_information <= min(summary.s_a, summary.s_b) + 1e-12
        assert summary.mutual_information == pytest.approx(summary.s_a - summary.s_a_given_b, abs=1e-14)
        assert summary.mutual_information == pytest.approx(summary.s_b - summary.s_b_given_a, abs=1e-14)

    def test_shannon_entropy_of_certain_outcome(self):
        """Test a single outcome has zero entropy."""
        dist = empirical_distribution({"0101": 7})

        assert shannon_entropy(dist) == 0.0

    def test_partition_mismatch(self, correlated_empirical):
        """Test the bipartition must match the distribution size."""
        with pytest.raises(ValidationError):
            entropy_summary(correlated_empirical, Bipartition(n_atoms=4, size_a=2))


class TestTotalVariation:
    """Test distribution distance."""

    def test_disjoint_supports(self):
        """Test disjoint distributions are at distance one."""
        first = empirical_distribution({"00": 1})
        second = empirical_distribution({"11": 1})

        assert total_variation(first, second) == pytest.approx(1.0)

    def test_identical_distributions(self, correlated_empirical):
        """Test the distance to itself is zero."""
        assert total_variation(correlated_empirical, correlated_empirical) == 0.0

    def test_partial_overlap(self):
        """Test distance over the union of supports."""
        first = empirical_distribution({"00": 1, "11": 1})
        second = empirical_distribution({"00": 3, "01": 1})

        assert total_variation(first, second) == pytest.approx(0.5 * (0.25 + 0.5 + 0.25))


class TestDistributionValidation:
    """Test BitstringDistribution invariants."""

    def test_rejects_unnormalized(self):
        """Test probabilities must sum to one."""
        with pytest.raises(ValidationError):
            BitstringDistribution(n_atoms=1, bitstrings=np.array([0, 1], dtype=np.uint64), probabilities=np.array([0.5, 0.6]))

    def test_rejects_zero_probability(self):
        """Test stored probabilities must be positive."""
        with pytest.raises(ValidationError):
            BitstringDistribution(n_atoms=1, bitstrings=np.array([0, 1], dtype=np.uint64), probabilities=np.array([1.0, 0.0]))

    def test_empirical_needs_counts(self):
        """Test empirical sources carry counts and n_shots."""
        with pytest.raises(ValidationError):
            BitstringDistribution(
                n_atoms=1,
                bitstrings=np.array([0], dtype=np.uint64),
                probabilities=np.array([1.0]),
                source="empirical",
            )

    def test_entropies_in_nats(self):
        """Test a fair coin has entropy ln 2, not 1 bit."""
        dist = empirical_distribution({"0": 1, "1": 1})

        assert shannon_entropy(dist) == pytest.approx(math.log(2.0))
