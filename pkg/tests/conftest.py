import numpy as np
import pytest

from transferlab.model import ConditionalDensity, InputDistribution


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_input_distribution(rng, num_inputs):
    return InputDistribution(rng.dirichlet(np.ones(num_inputs)))


def random_teacher(rng, num_inputs, num_labels, floor=0.0):
    """Random row-stochastic table; ``floor`` keeps entries off the boundary."""
    rows = rng.dirichlet(np.ones(num_labels), size=num_inputs)
    if floor > 0.0:
        mix = floor * num_labels
        rows = floor + (1.0 - mix) * rows
    return ConditionalDensity(rows)


def random_counts(rng, num_inputs, num_labels, n):
    flat = rng.multinomial(n, np.full(num_inputs * num_labels, 1.0 / (num_inputs * num_labels)))
    return flat.reshape(num_inputs, num_labels)
