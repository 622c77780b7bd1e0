import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from transferlab.errors import (
    DimensionMismatchError,
    DistributionError,
    SupportViolationError,
)
from transferlab.model import (
    ConditionalDensity,
    Dataset,
    DisclosureLevel,
    InputDistribution,
    RiskSample,
    TransferData,
    conditional_total_variation,
    distance_from_deterministic,
    expected_missing_mass,
    kl_divergence,
    missing_mass,
    total_variation,
)

from conftest import random_teacher


def prob_vectors(size):
    return (
        st.lists(st.floats(0.001, 1.0), min_size=size, max_size=size)
        .map(lambda xs: np.array(xs) / np.sum(xs))
    )


class TestTypes:
    def test_input_distribution_normalizes_small_drift(self):
        dist = InputDistribution([0.5, 0.5 + 3e-10])
        assert abs(dist.probs.sum() - 1.0) < 1e-12

    def test_input_distribution_rejects_large_drift(self):
        with pytest.raises(DistributionError):
            InputDistribution([0.5, 0.6])

    def test_input_distribution_rejects_negative(self):
        with pytest.raises(DistributionError):
            InputDistribution([1.1, -0.1])

    def test_exact_vectors_survive_verbatim(self):
        dist = InputDistribution([0.75, 0.25])
        assert dist.probs[0] == 0.75 and dist.probs[1] == 0.25

    def test_conditional_density_row_invariant(self):
        with pytest.raises(DistributionError):
            ConditionalDensity([[0.5, 0.5], [0.7, 0.2]])

    def test_conditional_density_is_immutable(self):
        pi = ConditionalDensity.uniform(2, 3)
        with pytest.raises(ValueError):
            pi.rows[0, 0] = 1.0

    def test_dataset_total_matches_counts(self):
        d = Dataset(np.array([[2, 1], [0, 3]]))
        assert d.n == 6
        assert d.visits.tolist() == [3, 3]

    def test_dataset_rejects_empty(self):
        with pytest.raises(DistributionError):
            Dataset(np.zeros((2, 2), dtype=int))

    def test_dataset_rejects_negative_and_fractional(self):
        with pytest.raises(DistributionError):
            Dataset(np.array([[1, -1]]))
        with pytest.raises(DistributionError):
            Dataset(np.array([[1.5, 0.5]]))

    def test_dataset_seen_labels(self):
        d = Dataset(np.array([[0, 2, 1], [3, 0, 0]]))
        assert d.seen_labels(0).tolist() == [1, 2]
        assert d.visited_inputs().tolist() == [0, 1]

    def test_transfer_data_levels_are_ordered(self):
        assert DisclosureLevel.HARD_LABELS < DisclosureLevel.PARTIAL_SOFT_LABELS
        assert DisclosureLevel.PARTIAL_SOFT_LABELS < DisclosureLevel.SOFT_LABELS

    def test_transfer_data_validates_fields(self):
        with pytest.raises(Exception):
            TransferData(level=DisclosureLevel.PARTIAL_SOFT_LABELS, partial={(0, 0): 0.0})
        with pytest.raises(Exception):
            TransferData(level=DisclosureLevel.HARD_LABELS, partial={(0, 0): 0.5})

    def test_risk_sample_range(self):
        RiskSample(0.0)
        RiskSample(1.0)
        with pytest.raises(DistributionError):
            RiskSample(1.5)


class TestTotalVariation:
    def test_disjoint_support(self):
        assert total_variation([1, 0], [0, 1]) == 1.0

    def test_identity(self):
        assert total_variation([0.5, 0.5], [0.5, 0.5]) == 0.0

    def test_direct_value(self):
        assert total_variation([0.9, 0.1], [0.75, 0.25]) == pytest.approx(0.15)

    def test_length_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            total_variation([1.0], [0.5, 0.5])

    @given(prob_vectors(4), prob_vectors(4), prob_vectors(4))
    @settings(max_examples=60, deadline=None)
    def test_metric_properties(self, p, q, r):
        assert total_variation(p, q) == pytest.approx(total_variation(q, p))
        assert total_variation(p, p) <= 1e-12
        assert (
            total_variation(p, r)
            <= total_variation(p, q) + total_variation(q, r) + 1e-12
        )
        assert 0.0 <= total_variation(p, q) <= 1.0


class TestConditionalTotalVariation:
    def test_identity(self):
        pi = ConditionalDensity([[0.2, 0.8], [0.6, 0.4]])
        rho = InputDistribution([0.3, 0.7])
        assert conditional_total_variation(pi, pi, rho) == 0.0

    def test_weighted_average(self):
        pi1 = ConditionalDensity([[1.0, 0.0], [0.5, 0.5]])
        pi2 = ConditionalDensity([[0.0, 1.0], [0.5, 0.5]])
        rho = InputDistribution([0.5, 0.5])
        assert conditional_total_variation(pi1, pi2, rho) == pytest.approx(0.5)

    def test_unsupported_input_ignored(self):
        pi1 = ConditionalDensity([[0.9, 0.1], [0.95, 0.05]])
        pi2 = ConditionalDensity([[0.7, 0.3], [0.5, 0.5]])
        rho = InputDistribution([1.0, 0.0])
        assert conditional_total_variation(pi1, pi2, rho) == pytest.approx(0.2)

    def test_matches_direct_summation(self, rng):
        pi1 = random_teacher(rng, 5, 4)
        pi2 = random_teacher(rng, 5, 4)
        rho = InputDistribution(rng.dirichlet(np.ones(5)))
        direct = sum(
            rho.probs[s] * total_variation(pi1.rows[s], pi2.rows[s]) for s in range(5)
        )
        assert conditional_total_variation(pi1, pi2, rho) == pytest.approx(direct, abs=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            conditional_total_variation(
                ConditionalDensity.uniform(2, 2),
                ConditionalDensity.uniform(2, 3),
                InputDistribution.uniform(2),
            )


class TestKLDivergence:
    def test_identity(self):
        assert kl_divergence([0.3, 0.7], [0.3, 0.7]) == 0.0

    def test_single_atom(self):
        assert kl_divergence([1, 0], [0.5, 0.5]) == pytest.approx(np.log(2))

    def test_support_violation(self):
        with pytest.raises(SupportViolationError):
            kl_divergence([0.5, 0.5], [1, 0])

    def test_nonnegative(self, rng):
        for _ in range(50):
            p = rng.dirichlet(np.ones(5))
            q = rng.dirichlet(np.ones(5)) + 1e-6
            q = q / q.sum()
            assert kl_divergence(p, q) >= -1e-12


class TestMissingMass:
    def test_one_unseen_atom(self):
        assert missing_mass([0.5, 0.5], [3, 0]) == 0.5

    def test_all_seen(self):
        assert missing_mass([0.2, 0.8], [1, 5]) == 0.0

    def test_partial(self):
        assert missing_mass([0.1, 0.1, 0.8], [0, 0, 5]) == pytest.approx(0.2)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            missing_mass([0.5, 0.5], [1, 2, 3])

    def test_weakly_decreasing_as_counts_accumulate(self, rng):
        nu = rng.dirichlet(np.ones(6))
        counts = np.zeros(6, dtype=int)
        previous = missing_mass(nu, counts)
        for _ in range(40):
            counts[rng.integers(6)] += 1
            current = missing_mass(nu, counts)
            assert current <= previous + 1e-15
            previous = current

    def test_monte_carlo_mean_matches_expectation(self, rng):
        nu = np.array([0.55, 0.25, 0.15, 0.05])
        n, reps = 12, 20000
        draws = rng.choice(4, size=(reps, n), p=nu)
        offsets = np.arange(reps)[:, None] * 4
        counts = np.bincount((draws + offsets).ravel(), minlength=reps * 4).reshape(reps, 4)
        values = ((counts == 0) * nu).sum(axis=1)
        stderr = values.std(ddof=1) / np.sqrt(reps)
        assert abs(values.mean() - expected_missing_mass(nu, n)) <= 4 * stderr


class TestExpectedMissingMass:
    def test_two_fair_atoms(self):
        assert expected_missing_mass([0.5, 0.5], 1) == pytest.approx(0.5)
        assert expected_missing_mass([0.5, 0.5], 2) == pytest.approx(0.25)

    def test_point_mass(self):
        assert expected_missing_mass([1.0], 5) == 0.0

    @given(prob_vectors(6), st.integers(1, 400))
    @settings(max_examples=80, deadline=None)
    def test_upper_bound(self, nu, n):
        assert expected_missing_mass(nu, n) <= 4 * len(nu) / (9 * n) + 1e-12


class TestDistanceFromDeterministic:
    def test_dirac_rows(self):
        pi = ConditionalDensity([[1, 0, 0], [0, 0, 1]])
        assert distance_from_deterministic(pi) == 0.0

    def test_uniform_rows(self):
        assert distance_from_deterministic(ConditionalDensity.uniform(3, 4)) == pytest.approx(1.5)

    def test_skewed_rows(self):
        pi = ConditionalDensity([[0.75, 0.25], [0.25, 0.75]])
        assert distance_from_deterministic(pi) == pytest.approx(0.5)
