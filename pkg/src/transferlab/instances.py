"""Generators for the four benchmark data-generating distributions.

Instance 0 is a fixed average-case law; instances 1-3 are adversarial laws
whose teacher (and, for instance 3, input distribution) deliberately scale
with the sample size ``n`` so that the matching learner decays polynomially
instead of exponentially.

Index convention: the construction formulas below speak of 1-based labels
``1..A`` (so "label ``2j-1``" and "label ``2j``" form the ``j``-th pair);
storage is 0-based, so pair ``j`` occupies columns ``2j-2`` and ``2j-1`` and
"the last label" is column ``A-1``. Property tests pin this mapping.

Parity adjustments: instance 1 wants an even label count and instances 2-3 an
odd one. The mismatched case sacrifices the last label (zero mass) and runs
the construction on the remaining ``A-1``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInstanceError
from .model import ConditionalDensity, InputDistribution, dirac_row


class InstanceKind(enum.IntEnum):
    I0 = 0
    I1 = 1
    I2 = 2
    I3 = 3


@dataclass(frozen=True)
class InstanceSpec:
    """Validated parameters for one benchmark instance.

    ``n`` is required by instances 1-3 (their laws depend on it) and ignored
    by instance 0. Violated bounds raise ``InvalidInstanceError`` naming the
    failed condition.
    """

    kind: InstanceKind
    num_inputs: int
    num_labels: int
    n: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", InstanceKind(self.kind))
        S, A, n = self.num_inputs, self.num_labels, self.n
        if S < 1:
            raise InvalidInstanceError(f"S={S} violates S >= 1")
        if A < 2:
            raise InvalidInstanceError(f"A={A} violates A >= 2")
        if self.kind is InstanceKind.I0:
            return
        if n is None or n < 1:
            raise InvalidInstanceError(
                f"instance {self.kind.value} requires a sample size n >= 1, got {n}"
            )
        if self.kind is InstanceKind.I1:
            burn_in = S * A / 4
            if n < burn_in:
                raise InvalidInstanceError(
                    f"n={n} below burn-in for instance 1: requires n >= S*A/4 = {burn_in:g}"
                )
        else:
            burn_in = S * (A - 1) / 2 - 1
            if n < burn_in:
                raise InvalidInstanceError(
                    f"n={n} below burn-in for instance {self.kind.value}: "
                    f"requires n >= S*(A-1)/2 - 1 = {burn_in:g}"
                )
            if self.kind is InstanceKind.I3 and n <= S - 1:
                raise InvalidInstanceError(
                    f"n={n} below burn-in for instance 3: requires n > S - 1 = {S - 1}"
                )


def _near_uniform_rows(S: int, A: int, n: int) -> np.ndarray:
    """Instance-1 teacher: paired labels nudged off uniform by a shrinking gap."""
    even_a = A if A % 2 == 0 else A - 1
    delta = 0.25 * math.sqrt(S * even_a / n)
    row = np.zeros(A)
    row[0:even_a:2] = (1.0 + delta) / even_a
    row[1:even_a:2] = (1.0 - delta) / even_a
    return np.tile(row, (S, 1))


def _near_dirac_rows(S: int, A: int, n: int) -> np.ndarray:
    """Instance-2/3 teacher: sparse vanishing atoms plus a dominant sink label."""
    odd_a = A if A % 2 == 1 else A - 1
    row = np.zeros(A)
    row[0 : odd_a - 1 : 2] = S / (n + 1)
    row[odd_a - 1] = 1.0 - (S / 2) * (odd_a - 1) / (n + 1)
    return np.tile(row, (S, 1))


def make_instance(spec: InstanceSpec) -> tuple[InputDistribution, ConditionalDensity]:
    """Build the (input distribution, teacher) pair for ``spec``."""
    S, A, n = spec.num_inputs, spec.num_labels, spec.n
    if spec.kind is InstanceKind.I0:
        rows = np.empty((S, A))
        for s in range(S):
            rows[s] = 0.5 / A + 0.5 * dirac_row(A, s % A)
        return InputDistribution.uniform(S), ConditionalDensity(rows)
    if spec.kind is InstanceKind.I1:
        return InputDistribution.uniform(S), ConditionalDensity(_near_uniform_rows(S, A, n))
    if spec.kind is InstanceKind.I2:
        return InputDistribution.uniform(S), ConditionalDensity(_near_dirac_rows(S, A, n))
    probs = np.full(S, 1.0 / (n + 1))
    probs[-1] = 1.0 - (S - 1) / (n + 1)
    return InputDistribution(probs), ConditionalDensity(_near_dirac_rows(S, A, n))
