"""The four closed-form learners, one per disclosure protocol.

Each learner is the exact minimizer of its empirical loss; no gradients are
involved anywhere.

``mle``
    Hard labels only. Visited rows are the empirical label frequencies.
``empce``
    Partial soft labels. Minimizing the cross-entropy reweighted by the
    disclosed teacher probabilities gives ``row ~ counts * teacher``
    renormalized, which is asymptotically biased toward the renormalized
    squares of the teacher row.
``empsel``
    Partial soft labels. Minimizing the squared log-probability gap pins the
    student to the teacher value on every seen label; the leftover mass
    ``1 - sum_seen teacher`` is split equally over the unseen labels.
``fullkl``
    Soft labels. Any KL minimizer copies the disclosed row outright.

Unvisited inputs carry no constraint from any of the losses; following the
experimental convention here they default to the uniform row. The default is
a hook (``unseen_row``) because the theory is indifferent to the choice.

The ``*_batch`` kernels evaluate realized risks for whole blocks of count
tables at once; they must agree exactly with the per-dataset closed forms
(pinned by tests) and exist purely so Monte Carlo sweeps stay vectorized.
"""

from __future__ import annotations

import enum
from typing import Callable

import numpy as np

from .errors import DimensionMismatchError, InconsistentDataError, ProtocolError
from .model import (
    ConditionalDensity,
    Dataset,
    DisclosureLevel,
    InputDistribution,
    TransferData,
    uniform_row_tv,
)

#: Slack for the seen-mass sum before a negative residual is treated as
#: corrupted side information rather than float drift.
RESIDUAL_TOL = 1e-9

UnseenRowHook = Callable[[int, int], np.ndarray]


class EstimatorKind(enum.Enum):
    """Tags for the four learners; values double as the on-disk names."""

    MLE = "mle"
    EMPCE = "empce"
    EMPSEL = "empsel"
    FULLKL = "fullkl"

    @property
    def required_level(self) -> DisclosureLevel:
        if self is EstimatorKind.MLE:
            return DisclosureLevel.HARD_LABELS
        if self is EstimatorKind.FULLKL:
            return DisclosureLevel.SOFT_LABELS
        return DisclosureLevel.PARTIAL_SOFT_LABELS

    @property
    def stream_id(self) -> int:
        """Stable integer used in RNG stream labels."""
        return _STREAM_IDS[self]


_STREAM_IDS = {
    EstimatorKind.MLE: 0,
    EstimatorKind.EMPCE: 1,
    EstimatorKind.EMPSEL: 2,
    EstimatorKind.FULLKL: 3,
}


def _default_unseen_row(s: int, num_labels: int) -> np.ndarray:
    return np.full(num_labels, 1.0 / num_labels)


def _fill_unseen(rows: np.ndarray, visits: np.ndarray, hook: UnseenRowHook | None):
    hook = hook or _default_unseen_row
    num_labels = rows.shape[1]
    for s in np.nonzero(visits == 0)[0]:
        rows[s] = hook(int(s), num_labels)


def _require_level(kind: EstimatorKind, r: TransferData):
    if r.level < kind.required_level:
        raise ProtocolError(
            f"{kind.value} needs {kind.required_level.name} but was given {r.level.name}"
        )


def fit_mle(d: Dataset, *, unseen_row: UnseenRowHook | None = None) -> ConditionalDensity:
    """Empirical label frequencies per visited input.

    ``row(a|s) = counts[s, a] / visits(s)`` wherever ``visits(s) > 0``.
    """
    visits = d.visits
    rows = np.empty(d.counts.shape, dtype=np.float64)
    seen = visits > 0
    rows[seen] = d.counts[seen] / visits[seen, None]
    _fill_unseen(rows, visits, unseen_row)
    return ConditionalDensity(rows)


def fit_empce(
    d: Dataset, r: TransferData, *, unseen_row: UnseenRowHook | None = None
) -> ConditionalDensity:
    """Teacher-weighted cross-entropy minimizer.

    On a visited input the row is proportional to ``counts[s, a] * teacher(a|s)``
    over the observed labels and zero elsewhere. A vanishing normalizer on a
    visited input certifies corrupted side information and raises.
    """
    _require_level(EstimatorKind.EMPCE, r)
    visits = d.visits
    rows = np.zeros(d.counts.shape, dtype=np.float64)
    for s in np.nonzero(visits > 0)[0]:
        labels = np.nonzero(d.counts[s] > 0)[0]
        weights = np.array(
            [d.counts[s, a] * r.teacher_probability(int(s), int(a)) for a in labels]
        )
        normalizer = weights.sum()
        if normalizer <= 0.0:
            raise InconsistentDataError(
                f"zero normalizer at visited input {s}: side information is corrupt"
            )
        rows[s, labels] = weights / normalizer
    _fill_unseen(rows, visits, unseen_row)
    return ConditionalDensity(rows)


def empce_limit_row(teacher_row) -> np.ndarray:
    """Almost-sure limit of the ``empce`` row: squares, renormalized.

    Uniform and one-hot rows are its fixed points, which is exactly the
    coincidence condition with the plain MLE.
    """
    row = np.asarray(teacher_row, dtype=np.float64)
    squared = row * row
    return squared / squared.sum()


def fit_empsel(
    d: Dataset,
    r: TransferData,
    *,
    unseen_row: UnseenRowHook | None = None,
    residual_weights: np.ndarray | None = None,
) -> ConditionalDensity:
    """Squared-error log-probability matcher.

    Seen labels are pinned to the disclosed teacher values; the residual mass
    ``1 - sum_seen`` is apportioned over unseen labels (equally unless
    ``residual_weights`` reweights them). Residuals below ``-RESIDUAL_TOL``
    certify corrupted side information.
    """
    _require_level(EstimatorKind.EMPSEL, r)
    visits = d.visits
    num_labels = d.num_labels
    if residual_weights is not None:
        residual_weights = np.asarray(residual_weights, dtype=np.float64)
        if residual_weights.shape != (num_labels,):
            raise DimensionMismatchError("residual_weights must have one entry per label")
        if np.any(residual_weights < 0.0):
            raise InconsistentDataError("residual_weights must be nonnegative")
    rows = np.zeros(d.counts.shape, dtype=np.float64)
    for s in np.nonzero(visits > 0)[0]:
        seen = d.counts[s] > 0
        values = np.array(
            [r.teacher_probability(int(s), int(a)) for a in np.nonzero(seen)[0]]
        )
        residual = 1.0 - values.sum()
        if residual < -RESIDUAL_TOL:
            raise InconsistentDataError(
                f"seen-label mass exceeds 1 at input {s}: side information is corrupt"
            )
        residual = min(max(residual, 0.0), 1.0)
        rows[s, seen] = values
        unseen = ~seen
        k = int(unseen.sum())
        if k > 0:
            if residual_weights is None:
                rows[s, unseen] = residual / k
            else:
                w = residual_weights[unseen]
                total = w.sum()
                if residual > 0.0 and total <= 0.0:
                    raise InconsistentDataError(
                        f"residual_weights vanish on the unseen labels of input {s}"
                    )
                rows[s, unseen] = residual * w / total if total > 0.0 else 0.0
        elif residual > RESIDUAL_TOL:
            raise InconsistentDataError(
                f"all labels seen at input {s} but mass {residual!r} is unassigned"
            )
    _fill_unseen(rows, visits, unseen_row)
    return ConditionalDensity(rows)


def fit_fullkl(
    d: Dataset, q: TransferData, *, unseen_row: UnseenRowHook | None = None
) -> ConditionalDensity:
    """KL minimizer under full observation: copy each disclosed row."""
    if q.level < DisclosureLevel.SOFT_LABELS:
        raise ProtocolError(
            f"fullkl needs SOFT_LABELS but was given {q.level.name}"
        )
    visits = d.visits
    rows = np.empty(d.counts.shape, dtype=np.float64)
    for s in np.nonzero(visits > 0)[0]:
        try:
            rows[s] = q.full[int(s)]
        except KeyError:
            raise InconsistentDataError(
                f"side information does not cover visited input {s}"
            ) from None
    _fill_unseen(rows, visits, unseen_row)
    return ConditionalDensity(rows)


def fit(
    kind: EstimatorKind,
    d: Dataset,
    r: TransferData | None = None,
    *,
    unseen_row: UnseenRowHook | None = None,
) -> ConditionalDensity:
    """Dispatch to the closed form for ``kind``, enforcing its protocol."""
    if kind is EstimatorKind.MLE:
        return fit_mle(d, unseen_row=unseen_row)
    if r is None:
        raise ProtocolError(f"{kind.value} needs side information, got none")
    if kind is EstimatorKind.EMPCE:
        return fit_empce(d, r, unseen_row=unseen_row)
    if kind is EstimatorKind.EMPSEL:
        return fit_empsel(d, r, unseen_row=unseen_row)
    return fit_fullkl(d, r, unseen_row=unseen_row)


# ---------------------------------------------------------------------------
# Batched kernels (Monte Carlo fast path; uniform conventions only)
# ---------------------------------------------------------------------------


def realized_risk_batch(
    kind: EstimatorKind,
    counts: np.ndarray,
    rho: InputDistribution,
    pi_star: ConditionalDensity,
) -> np.ndarray:
    """Realized conditional-TV risk of ``kind`` for a block of count tables.

    ``counts`` has shape ``(B, S, A)``; side information is derived from the
    teacher implicitly, matching ``derive_partial``/``derive_full`` on honest
    samples. Returns the ``(B,)`` vector of risks.
    """
    counts = np.asarray(counts)
    if counts.ndim != 3 or counts.shape[1:] != pi_star.rows.shape:
        raise DimensionMismatchError(
            f"block shape {counts.shape} vs teacher shape {pi_star.rows.shape}"
        )
    visits = counts.sum(axis=2)
    visited = visits > 0
    teacher = pi_star.rows
    unseen_tv = uniform_row_tv(pi_star)

    if kind is EstimatorKind.FULLKL:
        # Visited rows are copied exactly, so only unvisited inputs score.
        return (~visited * unseen_tv) @ rho.probs

    if kind is EstimatorKind.MLE:
        rows = counts / np.maximum(visits, 1)[:, :, None]
    elif kind is EstimatorKind.EMPCE:
        weighted = counts * teacher
        normalizer = weighted.sum(axis=2)
        if np.any((normalizer <= 0.0) & visited):
            raise InconsistentDataError("zero normalizer on a visited input")
        rows = weighted / np.where(normalizer > 0.0, normalizer, 1.0)[:, :, None]
    else:
        seen = counts > 0
        residual = 1.0 - (teacher * seen).sum(axis=2)
        if np.any(residual < -RESIDUAL_TOL):
            raise InconsistentDataError("seen-label mass exceeds 1 on some input")
        residual = np.clip(residual, 0.0, 1.0)
        unseen_count = counts.shape[2] - seen.sum(axis=2)
        fill = residual / np.maximum(unseen_count, 1)
        rows = np.where(seen, teacher, fill[:, :, None])

    row_tv = 0.5 * np.abs(rows - teacher).sum(axis=2)
    row_tv = np.where(visited, row_tv, unseen_tv)
    return row_tv @ rho.probs
