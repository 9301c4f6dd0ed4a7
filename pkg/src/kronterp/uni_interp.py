"""Univariate interpolation backends.

A UniBox restricts a multivariate black box to a monomial curve: probing it
at beta evaluates the box at (a_1 beta^{s_1}, ..., a_n beta^{s_n}), which is
exactly the univariate image of the scaled polynomial under the substitution
vector s.  The dense backend reconstructs that image from its values at the
nodes 0..N with Newton divided differences, issuing exactly N+1 probes.

Backends are callables (ubox, deg_bound, t_bound) -> UniPoly, so sparser
interpolation strategies can slot in without touching the driver; only the
dense backend ships, plus a probe-free oracle backend for test harnesses
where the hidden polynomial is known.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ._vecmod import numpy_ok, powmod_vec
from .diversify import ScalingPoint
from .ffield import PrimeField
from .kron import SubVector, UniPoly, substitute
from .sparsepoly import BlackBox, SparsePoly


@dataclass
class UniBox:
    """Single-variable view of a black box along a substitution vector."""

    bb: BlackBox
    s: SubVector
    field: PrimeField
    alpha: ScalingPoint | None = None

    def point_for(self, beta: int) -> tuple[int, ...]:
        q = self.field.q
        pt = [pow(beta, sj, q) for sj in self.s]
        if self.alpha is not None:
            pt = [a * v % q for a, v in zip(self.alpha.alpha, pt)]
        return tuple(pt)

    def probe(self, beta: int) -> int:
        return self.bb.probe(self.point_for(beta))

    def probe_range(self, count: int):
        """Values at beta = 0, 1, ..., count-1 (exactly `count` probes)."""
        q = self.field.q
        if numpy_ok(q):
            betas = np.arange(count, dtype=np.int64)
            cols = []
            for j, sj in enumerate(self.s):
                col = powmod_vec(betas, sj, q)
                if self.alpha is not None:
                    col = col * self.alpha.alpha[j] % q
                cols.append(col)
            points = np.column_stack(cols)
            return np.asarray(self.bb.probe_many(points), dtype=np.int64)
        return list(self.bb.probe_many([self.point_for(b) for b in range(count)]))


def _newton_coeffs_np(values: np.ndarray, q: int) -> np.ndarray:
    """Batched divided differences on nodes 0..N (rows are images)."""
    k, n = values.shape
    newton = np.empty_like(values)
    a = values % q
    b = np.empty_like(a)
    newton[:, 0] = a[:, 0]
    for j in range(1, n):
        w = n - j
        inv_j = pow(j, -1, q)
        np.subtract(a[:, 1 : w + 1], a[:, :w], out=b[:, :w])
        b[:, :w] *= inv_j
        b[:, :w] %= q
        a, b = b, a
        newton[:, j] = a[:, 0]
    return newton


def _monomial_from_newton_np(newton: np.ndarray, q: int) -> np.ndarray:
    """Expand Newton form on nodes 0..N into monomial coefficients."""
    k, n = newton.shape
    poly = np.zeros((k, n), dtype=np.int64)
    scratch = np.zeros((k, n), dtype=np.int64)
    poly[:, 0] = newton[:, n - 1]
    deg = 0
    for j in range(n - 2, -1, -1):
        w = deg + 2
        scratch[:, 1:w] = poly[:, : w - 1]
        scratch[:, 0] = 0
        # multiply by (z - j): the low part picks up -j * poly
        scratch[:, : w - 1] = (scratch[:, : w - 1] - j * poly[:, : w - 1]) % q
        scratch[:, 0] = (scratch[:, 0] + newton[:, j]) % q
        poly, scratch = scratch, poly
        deg += 1
    return poly


def _newton_coeffs_py(values: Sequence[int], q: int) -> list[int]:
    work = [v % q for v in values]
    newton = [work[0]]
    for j in range(1, len(values)):
        inv_j = pow(j, -1, q)
        work = [(work[i + 1] - work[i]) * inv_j % q for i in range(len(work) - 1)]
        newton.append(work[0])
    return newton


def _monomial_from_newton_py(newton: Sequence[int], q: int) -> list[int]:
    n = len(newton)
    poly = [0] * n
    poly[0] = newton[-1]
    deg = 0
    for j in range(n - 2, -1, -1):
        nxt = [0] * n
        for kk in range(deg + 1):
            nxt[kk + 1] = poly[kk]
        for kk in range(deg + 1):
            nxt[kk] = (nxt[kk] - j * poly[kk]) % q
        nxt[0] = (nxt[0] + newton[j]) % q
        poly = nxt
        deg += 1
    return poly


def dense_interpolate_many(uboxes: Sequence[UniBox], deg_bound: int) -> list[UniPoly]:
    """Dense interpolation of several images sharing one degree bound.

    All images are probed at the same nodes and the divided-difference
    passes run batched, which is what makes large families affordable.
    """
    if not uboxes:
        return []
    field = uboxes[0].field
    q = field.q
    if q <= deg_bound:
        raise ValueError(
            f"field size {q} too small for dense interpolation to degree {deg_bound}"
        )
    count = deg_bound + 1
    values = [ub.probe_range(count) for ub in uboxes]
    out = []
    if numpy_ok(q):
        mat = np.vstack([np.asarray(v, dtype=np.int64) for v in values])
        coeffs = _monomial_from_newton_np(_newton_coeffs_np(mat, q), q)
        for row in coeffs:
            nz = np.nonzero(row)[0]
            terms = [(int(row[d]), int(d)) for d in nz]
            out.append(UniPoly.from_terms(field, terms, deg_bound=deg_bound))
    else:
        for vals in values:
            coeffs = _monomial_from_newton_py(_newton_coeffs_py(list(vals), q), q)
            terms = [(c, d) for d, c in enumerate(coeffs) if c != 0]
            out.append(UniPoly.from_terms(field, terms, deg_bound=deg_bound))
    return out


def dense_interpolate(ubox: UniBox, deg_bound: int) -> UniPoly:
    """The unique polynomial of degree <= deg_bound matching the box at
    0..deg_bound; exactly deg_bound + 1 probes."""
    return dense_interpolate_many([ubox], deg_bound)[0]


Backend = Callable[[UniBox, int, int], UniPoly]


def dense_backend(ubox: UniBox, deg_bound: int, t_bound: int) -> UniPoly:
    return dense_interpolate(ubox, deg_bound)


def oracle_backend(f_known: SparsePoly) -> Backend:
    """Probe-free backend for harnesses that know the hidden polynomial:
    computes each image symbolically instead of interpolating."""

    def run(ubox: UniBox, deg_bound: int, t_bound: int) -> UniPoly:
        f = f_known
        if ubox.alpha is not None:
            f = f.scale_inputs(ubox.alpha.alpha)
        image, _ = substitute(f, ubox.s)
        return image

    return run


def spot_check(ubox: UniBox, g: UniPoly, rng: random.Random, points: int = 3) -> bool:
    """Compare a claimed image against the box at random points (issues
    `points` probes); False means the backend result is wrong."""
    q = ubox.field.q
    for _ in range(points):
        beta = rng.randrange(q)
        if ubox.probe(beta) != g.evaluate(beta):
            return False
    return True
