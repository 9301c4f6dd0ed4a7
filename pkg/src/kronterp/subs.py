"""Selection and sampling of the randomized substitution family.

Two regimes:

* bivariate (n = 2): both substitution exponents are primes, p drawn from
  [lambda_p, 2*lambda_p] and q from [lambda_q, 2*lambda_q], where the
  thresholds are sized so a fixed term collides with probability below mu:

      B        = 25 (T-1) ln(Dx) ln(Dy) / (9 mu)
      lambda_p = max(20.5, sqrt(B Dy / Dx))
      lambda_q = max(20.5, sqrt(B Dx / Dy))

* multivariate (n >= 3, also n = 1): entries are uniform in [0, lambda-1]
  for lambda the least prime >= T/mu, giving the same per-term guarantee.

The family size nu = ceil(max(4n, 8 ln(10 T))) makes every term collision-free
in at least half the images with probability at least 9/10.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .ffield import least_prime_geq, primes_in_range, sample_prime_in
from .kron import SubVector

BIVARIATE = "bivariate"
MULTIVARIATE = "multivariate"

# Below 20.5 the prime-counting estimate behind the bivariate thresholds
# loses its guarantee, so the thresholds never go lower.
MIN_PRIME_THRESHOLD = 20.5


def _check_mu(mu) -> None:
    if not 0 < mu < 1:
        raise ValueError(f"mu must be in (0, 1), got {mu}")


def bivariate_thresholds(t_bound: int, dx: int, dy: int, mu) -> tuple[float, float]:
    """(lambda_p, lambda_q) for the bivariate prime substitution."""
    if t_bound < 2:
        raise ValueError(f"bivariate thresholds need T >= 2, got {t_bound}")
    if dx < 2 or dy < 2:
        raise ValueError("bivariate degree bounds must be >= 2 (drop bound-1 variables first)")
    _check_mu(mu)
    b = 25 * (t_bound - 1) * math.log(dx) * math.log(dy) / (9 * float(mu))
    lam_p = max(MIN_PRIME_THRESHOLD, math.sqrt(b * dy / dx))
    lam_q = max(MIN_PRIME_THRESHOLD, math.sqrt(b * dx / dy))
    return lam_p, lam_q


def multivariate_lambda(t_bound: int, mu) -> int:
    """Least prime >= T/mu (so < 2T/mu by Bertrand's postulate)."""
    if t_bound < 1:
        raise ValueError(f"T must be >= 1, got {t_bound}")
    _check_mu(mu)
    return least_prime_geq(Fraction(t_bound) / Fraction(mu))


def num_substitutions(nvars: int, t_bound: int) -> int:
    """Family size nu = ceil(max(4n, 8 ln(10 T)))."""
    if nvars < 1:
        raise ValueError(f"need at least one variable, got {nvars}")
    if t_bound < 2:
        raise ValueError(f"family sizing needs T >= 2, got {t_bound}")
    return math.ceil(max(4 * nvars, 8 * math.log(10 * t_bound)))


@dataclass(frozen=True)
class SelectionParams:
    """Everything needed to sample one substitution family."""

    nvars: int
    t_bound: int
    bounds: tuple[int, ...]
    mu: Fraction
    nu: int
    mode: str
    lam: int | None = None
    lambda_p: float | None = None
    lambda_q: float | None = None


def make_selection_params(
    nvars: int, t_bound: int, bounds: Sequence[int], mu=Fraction(1, 4)
) -> SelectionParams:
    """Choose the regime for (n, T, D) and compute its thresholds.

    The multivariate prime is floored at 3 so the rank analysis of the
    exponent recovery stays valid for tiny T.
    """
    bounds = tuple(bounds)
    if len(bounds) != nvars:
        raise ValueError("one bound per variable required")
    mu = Fraction(mu)
    nu = num_substitutions(nvars, t_bound)
    if nvars == 2:
        lam_p, lam_q = bivariate_thresholds(t_bound, bounds[0], bounds[1], mu)
        return SelectionParams(nvars, t_bound, bounds, mu, nu, BIVARIATE,
                               lambda_p=lam_p, lambda_q=lam_q)
    lam = least_prime_geq(max(3, Fraction(t_bound) / mu))
    return SelectionParams(nvars, t_bound, bounds, mu, nu, MULTIVARIATE, lam=lam)


def family_degree_cap(params: SelectionParams) -> int:
    """A-priori bound on the image degree of any vector the regime can
    sample: the bivariate primes are at most floor(2*lambda), multivariate
    entries at most lambda - 1."""
    bounds = params.bounds
    if params.mode == BIVARIATE:
        return math.floor(2 * params.lambda_p) * (bounds[0] - 1) + math.floor(
            2 * params.lambda_q
        ) * (bounds[1] - 1)
    return (params.lam - 1) * sum(d - 1 for d in bounds)


def family_space(params: SelectionParams) -> int:
    """Number of distinct substitution vectors the regime can produce."""
    if params.mode == BIVARIATE:
        n_p = len(primes_in_range(params.lambda_p, 2 * params.lambda_p))
        n_q = len(primes_in_range(params.lambda_q, 2 * params.lambda_q))
        return n_p * n_q
    return params.lam ** params.nvars


def sample_family(params: SelectionParams, rng: random.Random) -> list[SubVector]:
    """Draw nu substitution vectors.

    Vectors are kept pairwise distinct while the sample space allows it;
    when fewer than nu distinct vectors exist (small prime ranges at small
    T and D), sampling falls back to independent draws with replacement,
    which is the probability model the collision guarantee is stated for.
    """
    space = family_space(params)
    if space == 0:
        raise ValueError("empty substitution sample space")
    distinct = space >= params.nu
    seen: set[SubVector] = set()
    family: list[SubVector] = []
    while len(family) < params.nu:
        if params.mode == BIVARIATE:
            p = sample_prime_in(params.lambda_p, 2 * params.lambda_p, rng)
            q = sample_prime_in(params.lambda_q, 2 * params.lambda_q, rng)
            vec: SubVector = (p, q)
        else:
            vec = tuple(rng.randrange(params.lam) for _ in range(params.nvars))
        if distinct:
            if vec in seen:
                continue
            seen.add(vec)
        family.append(vec)
    return family
