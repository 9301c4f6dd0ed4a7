"""Recovery of multivariate terms from the family of univariate images.

Diversification makes a term's coefficient a reliable fingerprint, so image
terms are bucketed by coefficient value.  Each well-supported bucket yields a
linear system: the selected substitution vectors form the rows, the image
degrees the right-hand side, and the exact rational solution is the term's
exponent vector.  Every acceptance check that can fail does so as data (a
rejection with a reason), never as an exception; only structurally broken
output (duplicate exponent vectors) raises.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .ffield import PrimeField
from .kron import SubVector, UniPoly
from .sparsepoly import ExponentVec, SparsePoly


class RecoveryError(Exception):
    """Structurally invalid recovery output; the run should be discarded."""


@dataclass
class RecoveryBucket:
    """All image terms sharing one coefficient value.

    entries holds one (s, degree) pair per image containing the coefficient,
    in image order.  ambiguous marks a coefficient that appeared two or more
    times within a single image, which diversification is supposed to
    prevent; such buckets are unusable.
    """

    coeff: int
    entries: list[tuple[SubVector, int]]
    ambiguous: bool = False


def bucket_by_coefficient(
    images: Sequence[tuple[SubVector, UniPoly]], nu: int | None = None
) -> list[RecoveryBucket]:
    """Group image terms by coefficient, keeping buckets supported by at
    least half of nu images (default: half of the images given)."""
    if nu is None:
        nu = len(images)
    buckets: dict[int, RecoveryBucket] = {}
    order: list[int] = []
    for s, g in images:
        seen_here: set[int] = set()
        for coeff, deg in g.terms:
            b = buckets.get(coeff)
            if b is None:
                b = RecoveryBucket(coeff, [])
                buckets[coeff] = b
                order.append(coeff)
            if coeff in seen_here:
                b.ambiguous = True
                continue
            seen_here.add(coeff)
            b.entries.append((s, deg))
    return [buckets[c] for c in order if 2 * len(buckets[c].entries) >= nu]


def select_independent(
    svecs: Sequence[SubVector], lam: int | None, nvars: int
) -> list[int] | None:
    """Indices of nvars linearly independent vectors among the first
    2*nvars of svecs, or None when no such subset exists.

    lam is the prime modulus for the independence test in the multivariate
    regime; pass None for the bivariate prime regime, where any two distinct
    vectors with nonzero determinant are taken directly.
    """
    cand = list(svecs[: 2 * nvars])
    if len(cand) < nvars:
        return None
    if lam is None:
        if nvars != 2:
            raise ValueError("the prime-pair regime only applies to two variables")
        for i in range(len(cand)):
            for j in range(i + 1, len(cand)):
                (a, b), (c, d) = cand[i], cand[j]
                if a * d - b * c != 0:
                    return [i, j]
        return None
    # greedy row elimination mod lam, keeping the originating indices
    basis: list[tuple[list[int], int]] = []  # (reduced row, pivot column)
    chosen: list[int] = []
    for idx, vec in enumerate(cand):
        row = [x % lam for x in vec]
        for reduced, pivot in basis:
            if row[pivot]:
                factor = row[pivot] * pow(reduced[pivot], -1, lam) % lam
                row = [(r - factor * v) % lam for r, v in zip(row, reduced)]
        pivot = next((k for k, v in enumerate(row) if v), None)
        if pivot is None:
            continue
        basis.append((row, pivot))
        chosen.append(idx)
        if len(chosen) == nvars:
            return chosen
    return None


@dataclass(frozen=True)
class ExponentSolution:
    """Either an accepted exponent vector or a rejection with its reason."""

    exps: ExponentVec | None
    reason: str | None = None

    @property
    def accepted(self) -> bool:
        return self.exps is not None


def _solve_rational(rows: Sequence[SubVector], rhs: Sequence[int]) -> list[Fraction] | None:
    """Exact Gaussian elimination over the rationals; None if singular."""
    n = len(rows)
    m = [[Fraction(x) for x in row] + [Fraction(d)] for row, d in zip(rows, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return None
        m[col], m[pivot] = m[pivot], m[col]
        for r in range(col + 1, n):
            if m[r][col]:
                factor = m[r][col] / m[col][col]
                m[r] = [a - factor * b for a, b in zip(m[r], m[col])]
    sol = [Fraction(0)] * n
    for r in range(n - 1, -1, -1):
        acc = m[r][n] - sum(m[r][c] * sol[c] for c in range(r + 1, n))
        sol[r] = acc / m[r][r]
    return sol


def solve_exponents(
    rows: Sequence[SubVector],
    degs: Sequence[int],
    bounds: Sequence[int],
    all_entries: Sequence[tuple[SubVector, int]],
) -> ExponentSolution:
    """Solve rows . e = degs exactly and vet the candidate exponent vector.

    Accepted only if the solution is integral, every component lies in
    [0, D_j), and s . e = d holds for every entry in the full bucket, not
    just the solved rows; anything else is a rejection with a reason.
    """
    sol = _solve_rational(rows, degs)
    if sol is None:
        return ExponentSolution(None, "rank-deficient")
    if any(x.denominator != 1 for x in sol):
        return ExponentSolution(None, "non-integral")
    e = tuple(int(x) for x in sol)
    if any(not 0 <= x < d for x, d in zip(e, bounds)):
        return ExponentSolution(None, "out-of-range")
    for s, d in all_entries:
        if sum(si * ei for si, ei in zip(s, e)) != d:
            return ExponentSolution(None, "inconsistent")
    return ExponentSolution(e)


def assemble(
    accepted: Sequence[tuple[int, ExponentVec]], field: PrimeField, nvars: int
) -> SparsePoly:
    """Combine accepted (coefficient, exponent) pairs into a polynomial.

    Duplicate exponent vectors mean two buckets claimed the same term, which
    invalidates the whole run; that raises RecoveryError.
    """
    seen = {e for _, e in accepted}
    if len(seen) != len(accepted):
        raise RecoveryError("duplicate exponent vectors recovered")
    return SparsePoly.from_terms(field, nvars, list(accepted))
