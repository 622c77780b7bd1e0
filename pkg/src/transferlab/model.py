"""Domain types and scalar metrics for teacher-to-student transfer.

Conventions
-----------
* Inputs are indexed ``0..S-1`` and labels ``0..A-1``.
* A probability vector is a 1-D float64 array of nonnegative entries.
  Constructors reject sums farther than ``SUM_TOL`` from 1, renormalize sums
  in between, and keep sums within ``RENORM_EPS`` verbatim: float drift is
  tolerated, broken inputs are not, and exact closed forms are not perturbed.
* A conditional density is a row-stochastic ``S x A`` table: row ``s`` is the
  label distribution conditioned on input ``s``.
* A dataset is summarized by its ``S x A`` occurrence-count table; none of the
  learners depends on sample order.
* ``log`` is natural and ``0 * log 0 == 0``.

All types are frozen and their arrays are marked read-only, so instances can
be shared freely across concurrent workers.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatchError,
    DistributionError,
    InconsistentDataError,
    SupportViolationError,
)

#: Constructors accept |sum - 1| up to this and renormalize.
SUM_TOL = 1e-9
#: ... except that sums already within this of 1 are kept verbatim, so exact
#: closed forms (integer-ratio rows, copied teacher rows) survive untouched.
RENORM_EPS = 1e-13


def _as_probability_vector(values, *, what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise DistributionError(f"{what} must be a nonempty 1-D vector")
    if not np.all(np.isfinite(arr)):
        raise DistributionError(f"{what} has non-finite entries")
    if np.any(arr < 0.0):
        raise DistributionError(f"{what} has negative entries")
    total = float(arr.sum())
    if abs(total - 1.0) > SUM_TOL:
        raise DistributionError(f"{what} sums to {total!r}, not 1")
    out = arr / total if abs(total - 1.0) > RENORM_EPS else arr.copy()
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class InputDistribution:
    """Distribution over the input alphabet (the sampling law of inputs)."""

    probs: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "probs", _as_probability_vector(self.probs, what="input distribution")
        )

    @classmethod
    def uniform(cls, num_inputs: int) -> "InputDistribution":
        return cls(np.full(num_inputs, 1.0 / num_inputs))

    @property
    def num_inputs(self) -> int:
        return self.probs.shape[0]


@dataclass(frozen=True)
class ConditionalDensity:
    """Row-stochastic table: one label distribution per input."""

    rows: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.rows, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
            raise DistributionError("conditional density must be a nonempty 2-D table")
        if not np.all(np.isfinite(arr)):
            raise DistributionError("conditional density has non-finite entries")
        if np.any(arr < 0.0):
            raise DistributionError("conditional density has negative entries")
        sums = arr.sum(axis=1)
        bad = np.nonzero(np.abs(sums - 1.0) > SUM_TOL)[0]
        if bad.size:
            raise DistributionError(
                f"row {bad[0]} sums to {sums[bad[0]]!r}, not 1"
            )
        drifted = np.abs(sums - 1.0) > RENORM_EPS
        if np.any(drifted):
            arr = arr.copy()
            arr[drifted] /= sums[drifted, None]
        else:
            arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "rows", arr)

    @classmethod
    def uniform(cls, num_inputs: int, num_labels: int) -> "ConditionalDensity":
        return cls(np.full((num_inputs, num_labels), 1.0 / num_labels))

    @property
    def num_inputs(self) -> int:
        return self.rows.shape[0]

    @property
    def num_labels(self) -> int:
        return self.rows.shape[1]

    def row(self, s: int) -> np.ndarray:
        return self.rows[s]


@dataclass(frozen=True)
class Dataset:
    """Multiset of (input, label) pairs stored as an occurrence-count table.

    ``counts[s, a]`` is the number of times the pair ``(s, a)`` occurred; the
    labels observed at input ``s`` (deduplicated) are exactly the nonzero
    columns of row ``s``.
    """

    counts: np.ndarray
    n: int = field(init=False)

    def __post_init__(self):
        arr = np.asarray(self.counts)
        if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
            raise DimensionMismatchError("counts must be a nonempty 2-D table")
        if not np.issubdtype(arr.dtype, np.integer):
            if not np.all(np.equal(np.mod(arr, 1), 0)):
                raise DistributionError("counts must be integers")
        arr = arr.astype(np.int64)
        if np.any(arr < 0):
            raise DistributionError("counts must be nonnegative")
        total = int(arr.sum())
        if total < 1:
            raise DistributionError("dataset must contain at least one sample")
        arr.setflags(write=False)
        object.__setattr__(self, "counts", arr)
        object.__setattr__(self, "n", total)

    @property
    def num_inputs(self) -> int:
        return self.counts.shape[0]

    @property
    def num_labels(self) -> int:
        return self.counts.shape[1]

    @property
    def visits(self) -> np.ndarray:
        """Per-input visit counts (length S)."""
        return self.counts.sum(axis=1)

    def visited_inputs(self) -> np.ndarray:
        """Indices of inputs that occur in the data."""
        return np.nonzero(self.visits > 0)[0]

    def seen_labels(self, s: int) -> np.ndarray:
        """Deduplicated labels observed at input ``s``."""
        return np.nonzero(self.counts[s] > 0)[0]


class DisclosureLevel(enum.IntEnum):
    """How much the teacher reveals beyond the sampled pairs.

    Levels are ordered: each one carries strictly more information than the
    previous, so ``>=`` comparisons express protocol requirements.
    """

    HARD_LABELS = 0
    PARTIAL_SOFT_LABELS = 1
    SOFT_LABELS = 2


@dataclass(frozen=True)
class TransferData:
    """Privileged side information attached to a dataset.

    ``partial`` maps each sampled pair ``(s, a)`` to the teacher probability
    of that label; ``full`` maps each visited input to the complete teacher
    row. Which field is populated is determined by ``level``.
    """

    level: DisclosureLevel
    partial: dict[tuple[int, int], float] | None = None
    full: dict[int, np.ndarray] | None = None

    def __post_init__(self):
        if self.level == DisclosureLevel.HARD_LABELS:
            if self.partial is not None or self.full is not None:
                raise InconsistentDataError("hard labels carry no side information")
        elif self.level == DisclosureLevel.PARTIAL_SOFT_LABELS:
            if self.partial is None or self.full is not None:
                raise InconsistentDataError("partial soft labels need the pair map only")
            for pair, value in self.partial.items():
                if not (0.0 < value <= 1.0):
                    raise InconsistentDataError(
                        f"teacher probability {value!r} at pair {pair} is not in (0, 1]"
                    )
        else:
            if self.full is None or self.partial is not None:
                raise InconsistentDataError("soft labels need the row map only")
            rows = {
                s: _as_probability_vector(row, what=f"teacher row for input {s}")
                for s, row in self.full.items()
            }
            object.__setattr__(self, "full", rows)

    @classmethod
    def hard_labels(cls) -> "TransferData":
        return cls(level=DisclosureLevel.HARD_LABELS)

    def teacher_probability(self, s: int, a: int) -> float:
        """Teacher probability of a sampled pair, at any disclosing level."""
        if self.level == DisclosureLevel.PARTIAL_SOFT_LABELS:
            try:
                return self.partial[(s, a)]
            except KeyError:
                raise InconsistentDataError(
                    f"side information does not cover sampled pair ({s}, {a})"
                ) from None
        if self.level == DisclosureLevel.SOFT_LABELS:
            try:
                return float(self.full[s][a])
            except KeyError:
                raise InconsistentDataError(
                    f"side information does not cover visited input {s}"
                ) from None
        raise InconsistentDataError("hard labels carry no teacher probabilities")


@dataclass(frozen=True)
class RiskSample:
    """One realized conditional-TV risk."""

    value: float

    def __post_init__(self):
        if not (0.0 <= self.value <= 1.0):
            raise DistributionError(f"risk {self.value!r} is not in [0, 1]")


# ---------------------------------------------------------------------------
# Scalar metrics
# ---------------------------------------------------------------------------


def total_variation(p, q) -> float:
    """Total variation distance ``0.5 * sum_a |p_a - q_a|`` between vectors."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise DimensionMismatchError(f"length mismatch: {p.shape} vs {q.shape}")
    return float(0.5 * np.abs(p - q).sum())


def conditional_total_variation(
    pi1: ConditionalDensity, pi2: ConditionalDensity, rho: InputDistribution
) -> float:
    """Input-weighted TV ``sum_s rho(s) * TV(pi1(.|s), pi2(.|s))``.

    This is the risk by which every learner here is judged; it lies in [0, 1].
    """
    if pi1.rows.shape != pi2.rows.shape:
        raise DimensionMismatchError(
            f"table shape mismatch: {pi1.rows.shape} vs {pi2.rows.shape}"
        )
    if rho.num_inputs != pi1.num_inputs:
        raise DimensionMismatchError(
            f"{rho.num_inputs} input masses for {pi1.num_inputs} rows"
        )
    row_tv = 0.5 * np.abs(pi1.rows - pi2.rows).sum(axis=1)
    return float(rho.probs @ row_tv)


def kl_divergence(p, q) -> float:
    """Kullback-Leibler divergence ``sum_a p_a log(p_a / q_a)``.

    Requires ``p`` absolutely continuous w.r.t. ``q``; the convention
    ``0 log 0 = 0`` applies on the complement of ``supp(p)``.
    """
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise DimensionMismatchError(f"length mismatch: {p.shape} vs {q.shape}")
    support = p > 0.0
    if np.any(q[support] == 0.0):
        raise SupportViolationError("divergence undefined: p puts mass where q has none")
    ps = p[support]
    return float(np.sum(ps * (np.log(ps) - np.log(q[support]))))


def missing_mass(nu, observed_counts) -> float:
    """Mass of atoms of ``nu`` never observed: ``sum_x nu(x) 1{count(x) = 0}``."""
    nu = np.asarray(nu, dtype=np.float64)
    counts = np.asarray(observed_counts)
    if nu.shape != counts.shape:
        raise DimensionMismatchError(f"length mismatch: {nu.shape} vs {counts.shape}")
    return float(nu[counts == 0].sum())


def expected_missing_mass(nu, n: int) -> float:
    """Exact expectation ``sum_x nu(x) (1 - nu(x))^n`` of the missing mass.

    For any probability vector on ``S`` atoms this is at most ``4S / (9n)``
    (each summand ``x(1-x)^n`` peaks below ``4/(9n)`` on [0, 1]).
    """
    nu = np.asarray(nu, dtype=np.float64)
    if n < 1:
        raise DistributionError(f"sample size must be >= 1, got {n}")
    return float(np.sum(nu * (1.0 - nu) ** n))


def distance_from_deterministic(pi: ConditionalDensity) -> float:
    """Largest TV distance from a row to its nearest one-hot distribution.

    Equals ``2 * max_s min_a (1 - pi(a|s))``; it is 0 exactly when every row
    is deterministic and at most ``2(1 - 1/A)`` (uniform rows). Teachers with
    a small value are benign for the hard-label learner.
    """
    return float(2.0 * np.max(1.0 - pi.rows.max(axis=1)))


def uniform_row_tv(pi: ConditionalDensity) -> np.ndarray:
    """Per-input TV between each row and the uniform label distribution."""
    return 0.5 * np.abs(pi.rows - 1.0 / pi.num_labels).sum(axis=1)


def dirac_row(num_labels: int, label: int) -> np.ndarray:
    """One-hot distribution concentrated at ``label``."""
    row = np.zeros(num_labels)
    row[label] = 1.0
    return row
