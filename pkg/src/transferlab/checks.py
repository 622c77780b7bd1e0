"""Oracle equivalence suites behind the ``verify`` command.

Two suites, each a dual-route comparison:

* closed forms vs. grid search — on seeded random small problems, the loss
  of each closed-form learner must not exceed the exhaustive grid minimum
  (up to float noise), and the grid minimum must come within a provable
  one-grid-cell slack of it, certifying both directions at once;
* exact risk vs. Monte Carlo — on an enumerable grid of tiny problems, the
  Monte Carlo mean must land within four standard errors of the exactly
  enumerated expectation for all four learners.

The grid slack is a worst-case rounding bound: some lattice point sits within
one step of the optimum coordinatewise (at most ``A`` steps on the largest
coordinate, which backfills the rounding deficit), and each loss term is
``log``-Lipschitz on the interval between the two, away from zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .estimators import EstimatorKind, fit_empce, fit_empsel, fit_mle
from .harness import estimate_risk
from .model import ConditionalDensity, InputDistribution
from .oracle import LossKind, exact_expected_risk, grid_minimize, loss_eval
from .sampling import RngSeed, derive_partial, draw_dataset

#: Allowed float noise when asserting the closed form beats the grid.
CLOSED_FORM_TOL = 1e-9
#: Absolute slack added to the four-stderr band (covers exact-zero cases).
EXACT_RISK_ABS_TOL = 1e-12


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    observed: float
    bound: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name} {self.observed:.6g} {self.bound:.6g}"


def _random_teacher(rng: np.random.Generator, S: int, A: int) -> ConditionalDensity:
    # Mix toward uniform so every entry stays >= 0.25/A; the grid slack
    # bounds below need optima bounded away from the simplex boundary.
    rows = 0.25 / A + 0.75 * rng.dirichlet(np.ones(A), size=S)
    return ConditionalDensity(rows)


def _ce_grid_slack(weights: np.ndarray, optimum: np.ndarray, step: float) -> float:
    """Rounding slack for a weighted-CE row with optimum ``optimum``."""
    support = weights > 0
    if not np.any(support):
        return 0.0
    A = optimum.shape[0]
    top = int(np.argmax(optimum))
    slack = 0.0
    for a in np.nonzero(support)[0]:
        if a == top:
            floor = optimum[top] - A * step
            ratio = A * step / floor
        else:
            floor = max(step, optimum[a] - step)
            ratio = step / floor
        if floor <= 0.0:
            return float("inf")
        slack += weights[a] * ratio
    return float(slack)


def _sel_grid_slack(counts_row, teacher_row, step: float, A: int) -> float:
    slack = 0.0
    for a in np.nonzero(counts_row > 0)[0]:
        floor = teacher_row[a] - A * step
        if floor <= 0.0:
            return float("inf")
        gap = A * step / floor
        slack += counts_row[a] * 0.5 * gap * gap
    return float(slack)


def closed_form_checks(
    *, seed: int = 1, step: float = 0.02, problems: int = 100
) -> list[CheckResult]:
    """Closed form vs. grid oracle on seeded random small problems."""
    rng = np.random.default_rng(seed)
    results = []
    for index in range(problems):
        S = int(rng.integers(1, 3))
        A = 3
        n = int(rng.integers(1, 7))
        rho = InputDistribution(rng.dirichlet(np.ones(S) + 1.0))
        pi_star = _random_teacher(rng, S, A)
        d = draw_dataset(rho, pi_star, n, RngSeed(seed).child(index))
        r = derive_partial(d, pi_star)

        for kind, closed in (
            (LossKind.HARD_CE, fit_mle(d)),
            (LossKind.PARTIAL_CE, fit_empce(d, r)),
            (LossKind.PARTIAL_SEL, fit_empsel(d, r)),
        ):
            closed_loss = loss_eval(kind, closed, d, r)
            _grid_table, grid_loss = grid_minimize(kind, d, r, step=step)
            if kind is LossKind.PARTIAL_SEL:
                # Pinning seen labels to the teacher values zeroes the loss.
                slack = sum(
                    _sel_grid_slack(d.counts[s], pi_star.rows[s], step, A)
                    for s in d.visited_inputs()
                )
                passed = closed_loss <= 1e-20 and -1e-12 <= grid_loss <= slack
            else:
                slack = 0.0
                for s in d.visited_inputs():
                    if kind is LossKind.HARD_CE:
                        weights = d.counts[s].astype(float)
                    else:
                        weights = d.counts[s] * pi_star.rows[s]
                    slack += _ce_grid_slack(weights, closed.rows[s], step)
                passed = (
                    closed_loss <= grid_loss + CLOSED_FORM_TOL
                    and grid_loss <= closed_loss + slack
                )
            results.append(
                CheckResult(
                    name=f"closed-form/{kind.value}/problem{index}",
                    passed=bool(passed),
                    observed=closed_loss - grid_loss,
                    bound=slack,
                )
            )
    return results


def _case_distributions(rng: np.random.Generator, S: int, A: int):
    rho = InputDistribution(rng.dirichlet(np.ones(S) + 1.0))
    pi_star = _random_teacher(rng, S, A)
    return rho, pi_star


def exact_risk_checks(
    *, seed: int = 1, repeats: int = 200_000, workers: int = 1
) -> list[CheckResult]:
    """Monte Carlo vs. exact enumeration on the small-problem grid."""
    results = []
    case = 0
    for S in (1, 2):
        for A in (2, 3):
            rng = np.random.default_rng((seed, S, A))
            rho, pi_star = _case_distributions(rng, S, A)
            for n in (1, 2, 3):
                for kind in EstimatorKind:
                    case += 1
                    exact = exact_expected_risk(rho, pi_star, kind, n)
                    estimate = estimate_risk(
                        rho,
                        pi_star,
                        kind,
                        n,
                        repeats,
                        RngSeed(seed).child(case),
                        workers=workers,
                    )
                    gap = abs(estimate.mean - exact)
                    bound = 4.0 * estimate.stderr + EXACT_RISK_ABS_TOL
                    results.append(
                        CheckResult(
                            name=f"exact-risk/{kind.value}/S{S}A{A}n{n}",
                            passed=gap <= bound,
                            observed=gap,
                            bound=bound,
                        )
                    )
    # The pinned reference case: two fair-coin draws, frequency estimator.
    rho = InputDistribution(np.ones(1))
    pi_star = ConditionalDensity(np.array([[0.5, 0.5]]))
    exact = exact_expected_risk(rho, pi_star, EstimatorKind.MLE, 2)
    estimate = estimate_risk(
        rho, pi_star, EstimatorKind.MLE, 2, repeats, RngSeed(seed).child(case + 1),
        workers=workers,
    )
    results.append(
        CheckResult(
            name="exact-risk/mle/S1A2n2-fair-coin",
            passed=(
                abs(exact - 0.25) <= 1e-12
                and abs(estimate.mean - exact) <= 4.0 * estimate.stderr + EXACT_RISK_ABS_TOL
            ),
            observed=abs(estimate.mean - exact),
            bound=4.0 * estimate.stderr + EXACT_RISK_ABS_TOL,
        )
    )
    return results
