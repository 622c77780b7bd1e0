"""Monte Carlo risk estimation and log-log rate regression.

Replicates are generated and fitted in blocks: a block is a contiguous range
of replicate indices whose uniforms come from one stream keyed by
``(master seed, instance id, estimator id, n, block index)``. Block geometry
is a pure function of ``(n, S, A)``, so results are bit-identical for any
worker count or scheduling; workers only decide who computes which block, and
the reduction runs in block order. Within a block everything is vectorized
through the batched estimator kernels.

The slope of ``log(mean risk)`` against ``log n`` is the empirical
convergence rate; regression uses plain OLS on the per-``n`` mean risks,
dropping non-positive means (their logs are undefined) with an explicit
count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DistributionError, InsufficientDataError, ProtocolError
from .estimators import EstimatorKind, fit, realized_risk_batch
from .instances import InstanceKind, InstanceSpec, make_instance
from .model import (
    ConditionalDensity,
    Dataset,
    DisclosureLevel,
    InputDistribution,
    RiskSample,
    conditional_total_variation,
)
from .sampling import (
    RngSeed,
    derive_full,
    derive_partial,
    flat_indices_from_uniforms,
    joint_cumulative,
)

#: Per-block budget of uniform draws and of count-table cells. Changing
#: either constant changes every sampled stream; tests pin them.
BLOCK_DRAWS = 1 << 21
BLOCK_CELLS = 1 << 21


@dataclass(frozen=True)
class RiskEstimate:
    """Monte Carlo mean risk with its standard error."""

    mean: float
    stderr: float
    repeats: int

    def __post_init__(self):
        if self.repeats < 2:
            raise DistributionError("a risk estimate needs at least 2 repeats")
        if not (0.0 <= self.mean <= 1.0):
            raise DistributionError(f"mean risk {self.mean!r} is not in [0, 1]")


@dataclass(frozen=True)
class RiskRow:
    """One sweep cell: an estimator evaluated at one sample size."""

    instance: InstanceKind
    estimator: EstimatorKind
    num_inputs: int
    num_labels: int
    n: int
    estimate: RiskEstimate
    seed: int


@dataclass
class RiskTable:
    """Sweep results; (instance, estimator, n) keys are unique within a run."""

    rows: list[RiskRow] = field(default_factory=list)

    def append(self, row: RiskRow):
        key = (row.instance, row.estimator, row.n)
        if key in self._keys():
            raise DistributionError(f"duplicate sweep cell {key}")
        self.rows.append(row)

    def _keys(self):
        return {(row.instance, row.estimator, row.n) for row in self.rows}


@dataclass(frozen=True)
class RegressionResult:
    """OLS fit of log mean-risk against log n."""

    slope: float
    intercept: float
    r_squared: float
    points: int
    dropped: int


def realized_risk(
    rho: InputDistribution,
    pi_star: ConditionalDensity,
    kind: EstimatorKind,
    d: Dataset,
) -> RiskSample:
    """Reference path: derive side information, fit, and score one dataset."""
    if kind.required_level == DisclosureLevel.SOFT_LABELS:
        transfer = derive_full(d, pi_star)
    elif kind.required_level == DisclosureLevel.PARTIAL_SOFT_LABELS:
        transfer = derive_partial(d, pi_star)
    else:
        transfer = None
    student = fit(kind, d, transfer)
    return RiskSample(conditional_total_variation(student, pi_star, rho))


def block_rows(n: int, num_inputs: int, num_labels: int) -> int:
    """Replicates per block; depends only on the problem geometry."""
    by_draws = BLOCK_DRAWS // max(n, 1)
    by_cells = BLOCK_CELLS // max(num_inputs * num_labels, 1)
    return max(1, min(by_draws, by_cells))


def _simulate_block(
    seed: RngSeed,
    block_index: int,
    rows: int,
    n: int,
    cum: np.ndarray,
    last_positive: int,
    shape: tuple[int, int],
    kind: EstimatorKind,
    rho: InputDistribution,
    pi_star: ConditionalDensity,
) -> np.ndarray:
    rng = seed.child(block_index).generator()
    u = rng.random((rows, n))
    idx = flat_indices_from_uniforms(cum, last_positive, u)
    num_atoms = shape[0] * shape[1]
    offsets = np.arange(rows, dtype=np.int64)[:, None] * num_atoms
    counts = np.bincount((idx + offsets).ravel(), minlength=rows * num_atoms)
    counts = counts.reshape(rows, shape[0], shape[1])
    return realized_risk_batch(kind, counts, rho, pi_star)


def estimate_risk(
    rho: InputDistribution,
    pi_star: ConditionalDensity,
    kind: EstimatorKind,
    n: int,
    repeats: int,
    seed: RngSeed,
    *,
    workers: int = 1,
    disclosure: DisclosureLevel | None = None,
) -> RiskEstimate:
    """Mean and standard error of the realized risk over fresh datasets.

    Side information is derived per the estimator's protocol; passing
    ``disclosure`` caps what the teacher is willing to reveal and raises if
    the estimator needs more. The result is deterministic in ``seed`` and
    independent of ``workers``.
    """
    if repeats < 2:
        raise DistributionError(f"repeats must be >= 2, got {repeats}")
    if n < 1:
        raise DistributionError(f"sample size must be >= 1, got {n}")
    if disclosure is not None and disclosure < kind.required_level:
        raise ProtocolError(
            f"{kind.value} needs {kind.required_level.name} but the "
            f"teacher only discloses {disclosure.name}"
        )
    cum, last_positive = joint_cumulative(rho, pi_star)
    shape = (rho.num_inputs, pi_star.num_labels)
    case_seed = seed.child(kind.stream_id, n)
    rows_per_block = block_rows(n, *shape)
    blocks = []
    start = 0
    index = 0
    while start < repeats:
        rows = min(rows_per_block, repeats - start)
        blocks.append((index, rows))
        start += rows
        index += 1

    def run(block) -> np.ndarray:
        block_index, rows = block
        return _simulate_block(
            case_seed, block_index, rows, n, cum, last_positive, shape, kind, rho, pi_star
        )

    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, blocks))
    else:
        results = [run(block) for block in blocks]
    risks = np.concatenate(results)
    mean = float(risks.mean())
    stderr = float(risks.std(ddof=1) / math.sqrt(repeats))
    return RiskEstimate(mean=mean, stderr=stderr, repeats=repeats)


def sweep(
    instance: InstanceKind,
    num_inputs: int,
    num_labels: int,
    n_list: list[int],
    estimators: list[EstimatorKind],
    repeats: int,
    seed: RngSeed,
    *,
    workers: int = 1,
) -> RiskTable:
    """Risk estimates over an (estimator, n) grid for one instance family.

    Instance 0 is built once and reused; instances 1-3 are rebuilt at every
    ``n`` because their laws depend on it. All sample sizes are validated
    before any sampling starts.
    """
    if not n_list:
        raise DistributionError("n_list must be nonempty")
    if len(set(n_list)) != len(n_list):
        raise DistributionError("n_list has duplicate entries")
    instance = InstanceKind(instance)
    if instance is InstanceKind.I0:
        if any(n < 1 for n in n_list):
            raise DistributionError(f"sample sizes must be >= 1, got {min(n_list)}")
        fixed = make_instance(InstanceSpec(instance, num_inputs, num_labels))
        built = {n: fixed for n in n_list}
    else:
        specs = {n: InstanceSpec(instance, num_inputs, num_labels, n) for n in n_list}
        built = {n: make_instance(spec) for n, spec in specs.items()}

    table = RiskTable()
    instance_seed = seed.child(int(instance))
    for kind in estimators:
        for n in n_list:
            rho, pi_star = built[n]
            estimate = estimate_risk(
                rho, pi_star, kind, n, repeats, instance_seed, workers=workers
            )
            table.append(
                RiskRow(
                    instance=instance,
                    estimator=kind,
                    num_inputs=num_inputs,
                    num_labels=num_labels,
                    n=n,
                    estimate=estimate,
                    seed=seed.master,
                )
            )
    return table


def fit_rate(points) -> RegressionResult:
    """OLS slope of log risk against log n.

    Non-positive risks are excluded (with a count); at least 3 usable points
    are required. A constant series regresses to slope 0 with ``r^2 = 1``.
    """
    pts = [(float(n), float(risk)) for n, risk in points]
    usable = [(n, risk) for n, risk in pts if risk > 0.0]
    dropped = len(pts) - len(usable)
    if len(usable) < 3:
        raise InsufficientDataError(
            f"regression needs >= 3 positive-risk points, got {len(usable)}"
        )
    x = np.log([n for n, _ in usable])
    y = np.log([risk for _, risk in usable])
    x_center = x - x.mean()
    denom = float(np.dot(x_center, x_center))
    if denom == 0.0:
        raise InsufficientDataError("regression needs distinct sample sizes")
    slope = float(np.dot(x_center, y) / denom)
    intercept = float(y.mean() - slope * x.mean())
    residuals = y - (intercept + slope * x)
    total = float(np.dot(y - y.mean(), y - y.mean()))
    r_squared = 1.0 if total == 0.0 else 1.0 - float(np.dot(residuals, residuals)) / total
    return RegressionResult(
        slope=slope,
        intercept=intercept,
        r_squared=r_squared,
        points=len(usable),
        dropped=dropped,
    )
