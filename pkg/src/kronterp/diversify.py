"""Coefficient diversification.

Scaling each input coordinate by a random nonzero field element turns f into
f(a_1 x_1, ..., a_n x_n), whose coefficients are, with high probability,
pairwise distinct and distinct from every collision sum the substitution
family can produce.  That lets equal coefficients across different univariate
images be matched up as images of one term.

Over F_q the whole nonzero set serves as the sampling pool once

    q >= n * m * D / mu,    m = ceil(T^2 (nu+2)^2 / 8),

where m bounds the number of pairwise differences that must not vanish and
the factor n converts the single-variable guarantee to n variables.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from ._vecmod import numpy_ok
from .ffield import PrimeField
from .sparsepoly import BlackBox, SparsePoly


def required_field_size(nvars: int, deg_bound: int, t_bound: int, nu: int, mu) -> tuple[int, int]:
    """(m, q_min): difference-set size bound and the field size that makes
    the nonzero elements a large enough diversifying pool."""
    if min(nvars, deg_bound, t_bound, nu) < 1:
        raise ValueError("all size parameters must be positive")
    mu = Fraction(mu)
    if not 0 < mu < 1:
        raise ValueError(f"mu must be in (0, 1), got {mu}")
    m = -(-(t_bound ** 2 * (nu + 2) ** 2) // 8)
    q_min = math.ceil(Fraction(nvars * m * deg_bound) / mu)
    return m, q_min


@dataclass(frozen=True)
class ScalingPoint:
    """Nonzero per-variable scales with their inverses cached."""

    field: PrimeField
    alpha: tuple[int, ...]
    alpha_inv: tuple[int, ...]

    @classmethod
    def make(cls, field: PrimeField, alpha: Sequence[int]) -> "ScalingPoint":
        alpha = tuple(a % field.q for a in alpha)
        if any(a == 0 for a in alpha):
            raise ValueError("scaling components must be nonzero")
        return cls(field, alpha, tuple(field.inv(a) for a in alpha))


def sample_alpha(field: PrimeField, nvars: int, q_min: int, rng: random.Random) -> ScalingPoint:
    """Uniform point in (F_q^*)^n; refuses fields below the q_min threshold."""
    if field.q < q_min:
        raise ValueError(
            f"field size {field.q} is below the diversification requirement {q_min}; "
            "use a larger prime field"
        )
    return ScalingPoint.make(field, [field.rand_nonzero(rng) for _ in range(nvars)])


class ScaledBlackBox(BlackBox):
    """Probes the wrapped box at componentwise-scaled points.

    Probe counts pass through: this wrapper keeps no counter of its own.
    """

    def __init__(self, inner: BlackBox, scaling: ScalingPoint):
        super().__init__()
        self._inner = inner
        self._scaling = scaling

    @property
    def probes(self) -> int:
        return self._inner.probes

    def probe(self, point: Sequence[int]) -> int:
        q = self._scaling.field.q
        scaled = tuple(a * p % q for a, p in zip(self._scaling.alpha, point))
        return self._inner.probe(scaled)

    def probe_many(self, points):
        q = self._scaling.field.q
        if isinstance(points, np.ndarray) and numpy_ok(q):
            alpha = np.asarray(self._scaling.alpha, dtype=np.int64)
            return self._inner.probe_many(points * alpha % q)
        scaled = [
            tuple(a * p % q for a, p in zip(self._scaling.alpha, pt)) for pt in points
        ]
        return self._inner.probe_many(scaled)


def diversified_blackbox(bb: BlackBox, scaling: ScalingPoint) -> ScaledBlackBox:
    return ScaledBlackBox(bb, scaling)


def undiversify(g: SparsePoly, scaling: ScalingPoint) -> SparsePoly:
    """Undo the scaling: g(a_1^-1 x_1, ..., a_n^-1 x_n)."""
    return g.scale_inputs(scaling.alpha_inv)
