"""Dataset generation and side-information derivation.

Sampling draws i.i.d. pairs from the product law ``rho x pi*``: the joint
distribution is flattened to one categorical over ``S*A`` atoms and inverted
through its cumulative vector, so a single uniform draw produces one pair.
The final positive atom absorbs any float residual of the cumulative sum and
zero-probability atoms are never selected, which keeps every sampled pair
consistent with the teacher's support.

Reproducibility contract: every stream is keyed by a master seed plus a tuple
of integer labels, hashed through ``numpy.random.SeedSequence``. Equal keys
give bit-identical streams regardless of process, thread, or worker count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, DistributionError, InconsistentDataError
from .model import ConditionalDensity, Dataset, DisclosureLevel, InputDistribution, TransferData


@dataclass(frozen=True)
class RngSeed:
    """A master seed plus the label path of a derived stream.

    Labels are small nonnegative integers (instance id, estimator id, sample
    size, block index, ...). Identical ``(master, labels)`` pairs yield
    identical byte streams; distinct label paths yield independent streams.
    """

    master: int
    labels: tuple[int, ...] = ()

    def __post_init__(self):
        if not (0 <= int(self.master) < 2**64):
            raise DistributionError("master seed must be a 64-bit unsigned integer")
        object.__setattr__(self, "master", int(self.master))
        object.__setattr__(self, "labels", tuple(int(x) for x in self.labels))
        if any(x < 0 for x in self.labels):
            raise DistributionError("stream labels must be nonnegative integers")

    def child(self, *labels: int) -> "RngSeed":
        return RngSeed(self.master, self.labels + tuple(labels))

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(entropy=self.master, spawn_key=self.labels)
        return np.random.Generator(np.random.PCG64(seq))


def joint_cumulative(
    rho: InputDistribution, pi_star: ConditionalDensity
) -> tuple[np.ndarray, int]:
    """Cumulative vector of the flattened joint law, plus last-positive index.

    Returns ``(cum, last_positive)`` where ``cum[k]`` accumulates the mass of
    flat atoms ``0..k`` (atom ``s*A + a`` has mass ``rho(s) * pi*(a|s)``).
    """
    if rho.num_inputs != pi_star.num_inputs:
        raise DimensionMismatchError(
            f"{rho.num_inputs} input masses for {pi_star.num_inputs} teacher rows"
        )
    flat = (rho.probs[:, None] * pi_star.rows).ravel()
    positive = np.nonzero(flat > 0.0)[0]
    cum = np.cumsum(flat)
    return cum, int(positive[-1])


def flat_indices_from_uniforms(cum: np.ndarray, last_positive: int, u: np.ndarray) -> np.ndarray:
    """Map uniforms in [0, 1) to flat atom indices by inverse CDF.

    Atom ``k`` owns ``[cum[k-1], cum[k])``; zero-width atoms are unreachable
    and draws beyond ``cum[-1]`` (float shortfall) land on the last positive
    atom.
    """
    idx = np.searchsorted(cum, u, side="right")
    return np.minimum(idx, last_positive)


def draw_dataset(
    rho: InputDistribution, pi_star: ConditionalDensity, n: int, seed: RngSeed
) -> Dataset:
    """Draw ``n`` i.i.d. pairs from ``rho x pi*`` into a count table."""
    if n < 1:
        raise DistributionError(f"sample size must be >= 1, got {n}")
    cum, last_positive = joint_cumulative(rho, pi_star)
    u = seed.generator().random(n)
    idx = flat_indices_from_uniforms(cum, last_positive, u)
    num_atoms = rho.num_inputs * pi_star.num_labels
    counts = np.bincount(idx, minlength=num_atoms)
    return Dataset(counts.reshape(rho.num_inputs, pi_star.num_labels))


def derive_partial(d: Dataset, pi_star: ConditionalDensity) -> TransferData:
    """Attach the teacher probability of every sampled pair.

    Fails if the data contains a pair the teacher could never emit, which
    certifies a corrupted dataset rather than papering over it.
    """
    if d.counts.shape != pi_star.rows.shape:
        raise DimensionMismatchError(
            f"counts shape {d.counts.shape} vs teacher shape {pi_star.rows.shape}"
        )
    pairs = {}
    for s, a in zip(*np.nonzero(d.counts > 0)):
        value = float(pi_star.rows[s, a])
        if value <= 0.0:
            raise InconsistentDataError(
                f"pair ({s}, {a}) was observed but has zero teacher probability"
            )
        pairs[(int(s), int(a))] = value
    return TransferData(level=DisclosureLevel.PARTIAL_SOFT_LABELS, partial=pairs)


def derive_full(d: Dataset, pi_star: ConditionalDensity) -> TransferData:
    """Attach the complete teacher row of every visited input."""
    if d.counts.shape != pi_star.rows.shape:
        raise DimensionMismatchError(
            f"counts shape {d.counts.shape} vs teacher shape {pi_star.rows.shape}"
        )
    rows = {int(s): pi_star.rows[s] for s in d.visited_inputs()}
    return TransferData(level=DisclosureLevel.SOFT_LABELS, full=rows)
