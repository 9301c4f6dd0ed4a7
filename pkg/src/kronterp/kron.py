"""Kronecker substitution and its randomized variant.

The classical map packs each exponent vector into a single degree with
mixed-radix weights (x_1 varies fastest), which is invertible but blows the
degree up to prod(D_j).  The randomized map sends x_j to z^{s_j} for a small
integer vector s, trading invertibility for much lower degree: distinct terms
whose exponent vectors have equal dot products with s merge ("collide").

Collision accounting here is symbolic, computed from exponent arithmetic over
the integers, so a collision whose coefficient sum cancels to zero is still
flagged.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .ffield import PrimeField
from .sparsepoly import SparsePoly

SubVector = tuple[int, ...]


@dataclass(frozen=True)
class UniPoly:
    """Sparse univariate polynomial: (coeff, degree) terms, degrees strictly
    increasing, all degrees <= deg_bound."""

    field: PrimeField
    terms: tuple[tuple[int, int], ...]
    deg_bound: int

    @classmethod
    def from_terms(
        cls, field: PrimeField, terms: Iterable[tuple[int, int]], deg_bound: int | None = None
    ) -> "UniPoly":
        acc: dict[int, int] = {}
        for coeff, deg in terms:
            if deg < 0:
                raise ValueError(f"negative degree {deg}")
            acc[deg] = (acc.get(deg, 0) + coeff) % field.q
        canon = tuple((c, d) for d, c in sorted(acc.items()) if c != 0)
        bound = deg_bound if deg_bound is not None else (canon[-1][1] if canon else 0)
        if canon and canon[-1][1] > bound:
            raise ValueError(f"degree {canon[-1][1]} exceeds bound {bound}")
        return cls(field, canon, bound)

    @classmethod
    def zero(cls, field: PrimeField, deg_bound: int = 0) -> "UniPoly":
        return cls(field, (), deg_bound)

    @property
    def num_terms(self) -> int:
        return len(self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Actual degree; -1 for the zero polynomial."""
        return self.terms[-1][1] if self.terms else -1

    def evaluate(self, beta: int) -> int:
        q = self.field.q
        return sum(c * pow(beta, d, q) % q for c, d in self.terms) % q

    def coeffs(self) -> dict[int, int]:
        return {d: c for c, d in self.terms}


@dataclass(frozen=True)
class CollisionReport:
    """Per-term collision flags (indexed like the source polynomial's terms)
    and r, the number of colliding image degrees."""

    collided: tuple[bool, ...]
    r: int

    @property
    def num_collided(self) -> int:
        return sum(self.collided)

    @property
    def any(self) -> bool:
        return self.r > 0


def kron_weights(bounds: Sequence[int]) -> tuple[int, ...]:
    """Mixed-radix weights w_j = prod_{k<j} D_k."""
    w = [1]
    for d in bounds[:-1]:
        w.append(w[-1] * d)
    return tuple(w)


def classical_kronecker(f: SparsePoly, bounds: Sequence[int]) -> UniPoly:
    """Pack f into one variable: term x^e maps to z^(sum e_j * w_j).

    Requires every partial degree of f below its bound; then the map is
    term-for-term invertible and preserves the term count.
    """
    if len(bounds) != f.nvars:
        raise ValueError("one degree bound per variable required")
    if any(d < 1 for d in bounds):
        raise ValueError("degree bounds must be >= 1")
    degs = f.partial_degrees()
    for j, (deg, bound) in enumerate(zip(degs, bounds)):
        if deg >= bound:
            raise ValueError(f"variable {j} has degree {deg}, bound {bound}")
    w = kron_weights(bounds)
    prod = w[-1] * bounds[-1]
    terms = [(c, sum(e * wj for e, wj in zip(exps, w))) for c, exps in f.terms]
    return UniPoly.from_terms(f.field, terms, deg_bound=prod - 1)


def inverse_kronecker(g: UniPoly, bounds: Sequence[int], nvars: int) -> SparsePoly:
    """Invert classical_kronecker by mixed-radix digit expansion."""
    if len(bounds) != nvars:
        raise ValueError("one degree bound per variable required")
    prod = 1
    for d in bounds:
        prod *= d
    terms = []
    for coeff, deg in g.terms:
        if deg >= prod:
            raise ValueError(f"degree {deg} out of range for bounds {tuple(bounds)}")
        e = []
        rem = deg
        for d in bounds:
            rem, digit = divmod(rem, d)
            e.append(digit)
        terms.append((coeff, tuple(e)))
    return SparsePoly.from_terms(g.field, nvars, terms)


def substitute(f: SparsePoly, s: Sequence[int]) -> tuple[UniPoly, CollisionReport]:
    """Symbolic image of f under x_j -> z^{s_j}, with collision accounting.

    Term i lands at degree e_i . s; coefficients of equal degrees are summed
    in the field.  The report flags every term sharing its image degree with
    another, whether or not the sum cancels.
    """
    if len(s) != f.nvars:
        raise ValueError("substitution vector length must equal the variable count")
    degs = [sum(e * sj for e, sj in zip(exps, s)) for _, exps in f.terms]
    by_deg: dict[int, list[int]] = {}
    for i, d in enumerate(degs):
        by_deg.setdefault(d, []).append(i)
    collided = [False] * len(f.terms)
    r = 0
    for d, idxs in by_deg.items():
        if len(idxs) > 1:
            r += 1
            for i in idxs:
                collided[i] = True
    image = UniPoly.from_terms(f.field, [(c, d) for (c, _), d in zip(f.terms, degs)])
    return image, CollisionReport(tuple(collided), r)


def max_image_degree(bounds: Sequence[int], s: Sequence[int]) -> int:
    """A-priori degree bound sum s_j * (D_j - 1) for any f within bounds."""
    if len(bounds) != len(s):
        raise ValueError("bounds and substitution vector lengths differ")
    return sum(sj * (d - 1) for sj, d in zip(s, bounds))
