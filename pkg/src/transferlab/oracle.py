"""Independent brute-force references for the closed-form learners.

Nothing here shares code with the fitting or Monte Carlo fast paths: losses
are evaluated from their definitions, minimization is an exhaustive scan of a
simplex grid, and expected risk is an exact enumeration over all ordered
sample tuples. These are the second route of every dual-route check.

All three empirical losses decompose as a sum over inputs (each term touches
one row of the student), so the grid scan optimizes rows independently; a
dedicated test compares this against whole-table search on a tiny problem.
"""

from __future__ import annotations

import enum
import itertools
import math

import numpy as np

from .errors import ProtocolError, TooLargeError
from .estimators import EstimatorKind, fit
from .model import (
    ConditionalDensity,
    Dataset,
    DisclosureLevel,
    InputDistribution,
    TransferData,
    conditional_total_variation,
)
from .sampling import derive_full, derive_partial

#: Largest simplex dimension the grid scan accepts.
GRID_MAX_LABELS = 4
#: Smallest grid resolution the scan accepts.
GRID_MIN_STEP = 0.01
#: Largest number of ordered sample tuples the enumeration accepts.
ENUMERATION_LIMIT = 2_000_000


class LossKind(enum.Enum):
    """The three empirical objectives whose minimizers are under test."""

    HARD_CE = "hardce"
    PARTIAL_CE = "partialce"
    PARTIAL_SEL = "partialsel"


def _pair_weights(kind: LossKind, d: Dataset, r: TransferData | None):
    """Yield (s, a, count, teacher_prob) over the support of the dataset."""
    needs_teacher = kind is not LossKind.HARD_CE
    if needs_teacher:
        if r is None:
            raise ProtocolError(f"{kind.value} needs partial soft labels, got none")
        if r.level < DisclosureLevel.PARTIAL_SOFT_LABELS:
            raise ProtocolError(
                f"{kind.value} needs at least PARTIAL_SOFT_LABELS, got {r.level.name}"
            )
    for s, a in zip(*np.nonzero(d.counts > 0)):
        s, a = int(s), int(a)
        teacher = r.teacher_probability(s, a) if needs_teacher else None
        yield s, a, int(d.counts[s, a]), teacher


def loss_eval(
    kind: LossKind, pi: ConditionalDensity, d: Dataset, r: TransferData | None = None
) -> float:
    """Summed empirical loss of ``pi`` over the multiset of samples.

    A zero student probability on an observed pair makes the CE losses (and
    the SEL loss, through ``log 0``) infinite; the ``inf`` sentinel is
    returned rather than raised so grid scans can skip boundary points.
    """
    total = 0.0
    for s, a, count, teacher in _pair_weights(kind, d, r):
        student = float(pi.rows[s, a])
        if student <= 0.0:
            return math.inf
        if kind is LossKind.HARD_CE:
            total += -count * math.log(student)
        elif kind is LossKind.PARTIAL_CE:
            total += -count * teacher * math.log(student)
        else:
            total += count * 0.5 * (math.log(student) - math.log(teacher)) ** 2
    return total


def simplex_grid(num_labels: int, step: float) -> np.ndarray:
    """All probability vectors with entries on the ``step`` lattice.

    Guards keep the scan combinatorially sane: at most ``GRID_MAX_LABELS``
    labels, resolution no finer than ``GRID_MIN_STEP``, and ``step`` must
    divide 1.
    """
    if num_labels > GRID_MAX_LABELS:
        raise TooLargeError(f"grid scan supports at most {GRID_MAX_LABELS} labels")
    if step < GRID_MIN_STEP:
        raise TooLargeError(f"grid step {step} is finer than {GRID_MIN_STEP}")
    units = round(1.0 / step)
    if abs(units * step - 1.0) > 1e-9:
        raise TooLargeError(f"grid step {step} does not divide 1")
    # Stars and bars: choose divider positions, difference them into parts.
    dividers = itertools.combinations(range(units + num_labels - 1), num_labels - 1)
    rows = np.array(
        [
            np.diff(np.concatenate(([-1], div, [units + num_labels - 1]))) - 1
            for div in dividers
        ],
        dtype=np.float64,
    )
    return rows / units


def _row_losses(
    kind: LossKind, grid: np.ndarray, counts_row: np.ndarray, teacher_probs: dict
) -> np.ndarray:
    """Loss of every grid row against one input's observed labels."""
    support = np.nonzero(counts_row > 0)[0]
    sub = grid[:, support]
    with np.errstate(divide="ignore"):
        logs = np.log(sub)
    weights = counts_row[support].astype(np.float64)
    if kind is LossKind.HARD_CE:
        return -(logs @ weights)
    teacher = np.array([teacher_probs[int(a)] for a in support])
    if kind is LossKind.PARTIAL_CE:
        return -(logs @ (weights * teacher))
    gaps = logs - np.log(teacher)
    # inf - inf cannot occur: teacher probs of sampled labels are positive.
    return 0.5 * (np.square(gaps) @ weights)


def grid_minimize(
    kind: LossKind, d: Dataset, r: TransferData | None = None, *, step: float
) -> tuple[ConditionalDensity, float]:
    """Exhaustively minimize the loss over the per-row simplex grid.

    Rows are optimized independently (the losses separate over inputs);
    unvisited rows are unconstrained and come back uniform. Returns the best
    grid table and its total loss.
    """
    grid = simplex_grid(d.num_labels, step)
    teacher_by_input: dict[int, dict[int, float]] = {}
    for s, a, _count, teacher in _pair_weights(kind, d, r):
        teacher_by_input.setdefault(s, {})[a] = teacher
    rows = np.full(d.counts.shape, 1.0 / d.num_labels)
    total = 0.0
    for s in d.visited_inputs():
        losses = _row_losses(kind, grid, d.counts[s], teacher_by_input.get(int(s), {}))
        best = int(np.argmin(losses))
        rows[s] = grid[best]
        total += float(losses[best])
    return ConditionalDensity(rows), total


def _enumeration_size(num_atoms: int, n: int) -> int:
    size = num_atoms**n
    if size > ENUMERATION_LIMIT:
        raise TooLargeError(
            f"enumeration would visit {size} ordered tuples (limit {ENUMERATION_LIMIT})"
        )
    return size


def exact_expected_risk(
    rho: InputDistribution,
    pi_star: ConditionalDensity,
    kind: EstimatorKind,
    n: int,
) -> float:
    """Exact expected conditional-TV risk by full enumeration.

    Walks all ``(S*A)^n`` ordered sample tuples, weights each by its product
    probability, fits the learner on the induced count table, and accumulates
    the exact expectation. Tuples of probability zero are skipped (they also
    shield the learners from impossible pairs). Identical count tables are
    fitted once with their tuple probabilities pooled.
    """
    S, A = pi_star.num_inputs, pi_star.num_labels
    _enumeration_size(S * A, n)
    flat = (rho.probs[:, None] * pi_star.rows).ravel()
    pooled: dict[bytes, float] = {}
    for tup in itertools.product(range(S * A), repeat=n):
        prob = 1.0
        for atom in tup:
            prob *= flat[atom]
        if prob == 0.0:
            continue
        counts = np.bincount(np.asarray(tup, dtype=np.int64), minlength=S * A)
        pooled[counts.tobytes()] = pooled.get(counts.tobytes(), 0.0) + prob
    expected = 0.0
    for key, prob in pooled.items():
        counts = np.frombuffer(key, dtype=np.int64).reshape(S, A)
        d = Dataset(counts)
        if kind.required_level == DisclosureLevel.SOFT_LABELS:
            transfer = derive_full(d, pi_star)
        elif kind.required_level == DisclosureLevel.PARTIAL_SOFT_LABELS:
            transfer = derive_partial(d, pi_star)
        else:
            transfer = None
        student = fit(kind, d, transfer)
        expected += prob * conditional_total_variation(student, pi_star, rho)
    return expected
