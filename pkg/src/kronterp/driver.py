"""End-to-end interpolation driver.

One run: sample the substitution family, pick the scaling point, interpolate
the scaled univariate images, bucket image terms by coefficient, solve each
well-supported bucket for its exponent vector, and undo the scaling.  A run
either returns a candidate polynomial or a failure marker; detectable
inconsistencies (ambiguous buckets, duplicate exponents, too many terms) are
turned into loud failures so the majority vote sees fewer plausible-but-wrong
candidates.

The amplified entry point repeats the run ceil(18 ln(1/eps)) times with
independent seed-derived randomness and returns the strict-majority result.
"""

from __future__ import annotations

import dataclasses
import hashlib
import math
import random
import secrets
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .diversify import ScalingPoint, required_field_size, sample_alpha, undiversify
from .ffield import PrimeField, least_prime_geq
from .kron import SubVector, max_image_degree
from .recover import (
    RecoveryError,
    assemble,
    bucket_by_coefficient,
    select_independent,
    solve_exponents,
)
from .sparsepoly import BlackBox, ExponentVec, SparsePoly, to_obj
from .subs import BIVARIATE, SelectionParams, family_degree_cap, make_selection_params, sample_family
from .uni_interp import Backend, UniBox, dense_backend, dense_interpolate_many

TRIVIAL = "trivial"
CONSTANT = "constant"


@dataclass(frozen=True)
class InterpolationConfig:
    """Problem statement: variable count, term bound, exclusive per-variable
    degree bounds, and (optionally) the field; field=None lets the driver
    pick the smallest prime satisfying the diversification and dense-backend
    requirements."""

    nvars: int
    t_bound: int
    bounds: tuple[int, ...]
    field: PrimeField | None = None
    sub_mu: Fraction = Fraction(1, 4)
    div_mu: Fraction = Fraction(1, 10)
    epsilon: float = 0.05
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "bounds", tuple(self.bounds))
        if self.nvars < 1:
            raise ValueError("need at least one variable")
        if self.t_bound < 1:
            raise ValueError("term bound must be >= 1")
        if len(self.bounds) != self.nvars:
            raise ValueError("one degree bound per variable required")
        if any(d < 1 for d in self.bounds):
            raise ValueError("degree bounds must be >= 1")
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must be in (0, 1)")
        for mu in (self.sub_mu, self.div_mu):
            if not 0 < mu < 1:
                raise ValueError("mu values must be in (0, 1)")


@dataclass(frozen=True)
class RunPlan:
    """Derived parameters for one configuration, including the resolved field."""

    mode: str
    field: PrimeField
    q_required: int
    active: tuple[int, ...]
    params: SelectionParams | None = None
    m: int | None = None
    q_min: int | None = None
    deg_cap: int = 0


@dataclass(frozen=True)
class ImageStat:
    s: tuple[int, ...]
    degree: int


@dataclass(frozen=True)
class BucketStats:
    accepted: int
    rejected: int
    ambiguous: int


@dataclass(frozen=True)
class VoteTally:
    runs: int
    winner_votes: int
    candidates: int
    failures: int


@dataclass(frozen=True)
class RunReport:
    ok: bool
    poly: SparsePoly | None
    probes: int
    field_q: int
    seed: int | None = None
    nu: int | None = None
    deg_bound: int | None = None
    images: tuple[ImageStat, ...] = ()
    buckets: BucketStats | None = None
    failure: str | None = None
    votes: VoteTally | None = None

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "poly": to_obj(self.poly) if self.poly is not None else None,
            "probes": self.probes,
            "field": str(self.field_q),
            "seed": self.seed,
            "nu": self.nu,
            "deg_bound": self.deg_bound,
            "images": [{"s": list(i.s), "degree": i.degree} for i in self.images],
            "buckets": (
                {
                    "accepted": self.buckets.accepted,
                    "rejected": self.buckets.rejected,
                    "ambiguous": self.buckets.ambiguous,
                }
                if self.buckets is not None
                else None
            ),
            "failure": self.failure,
            "votes": (
                {
                    "runs": self.votes.runs,
                    "winner_votes": self.votes.winner_votes,
                    "candidates": self.votes.candidates,
                    "failures": self.votes.failures,
                }
                if self.votes is not None
                else None
            ),
        }


def derive_rng(seed, tag) -> random.Random:
    """Independent reproducible stream for (seed, tag); used to split one
    master seed across runs."""
    digest = hashlib.sha256(f"{seed}:{tag}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def plan_run(cfg: InterpolationConfig) -> RunPlan:
    """Resolve regime, family size, degree cap, and field for a config.

    Raises ValueError when an explicitly supplied field is too small for the
    diversification requirement or the dense node count.
    """
    active = tuple(j for j, d in enumerate(cfg.bounds) if d >= 2)
    params = None
    m = q_min = None
    if cfg.t_bound == 1:
        mode = TRIVIAL
        deg_cap = max(d - 1 for d in cfg.bounds)
        q_required = deg_cap + 2
    elif not active:
        mode = CONSTANT
        deg_cap = 0
        q_required = 2
    else:
        act_bounds = tuple(cfg.bounds[j] for j in active)
        params = make_selection_params(len(active), cfg.t_bound, act_bounds, cfg.sub_mu)
        mode = params.mode
        deg_cap = family_degree_cap(params)
        m, q_min = required_field_size(
            len(active), max(act_bounds), cfg.t_bound, params.nu, cfg.div_mu
        )
        q_required = max(q_min, deg_cap + 2)
    if cfg.field is not None:
        if cfg.field.q < q_required:
            raise ValueError(
                f"field size {cfg.field.q} below the required {q_required} "
                "for this configuration"
            )
        fld = cfg.field
    else:
        fld = PrimeField(least_prime_geq(q_required))
    return RunPlan(mode, fld, q_required, active, params, m, q_min, deg_cap)


class _FixedOnesBox(BlackBox):
    """Pins the inactive coordinates (degree bound 1, so exponent zero) to 1
    and forwards probes; counts pass through to the wrapped box."""

    def __init__(self, inner: BlackBox, nvars: int, active: Sequence[int]):
        super().__init__()
        self._inner = inner
        self._nvars = nvars
        self._active = tuple(active)

    @property
    def probes(self) -> int:
        return self._inner.probes

    def _expand(self, point) -> tuple[int, ...]:
        full = [1] * self._nvars
        for j, v in zip(self._active, point):
            full[j] = v
        return tuple(full)

    def probe(self, point):
        return self._inner.probe(self._expand(point))

    def probe_many(self, points):
        if isinstance(points, np.ndarray):
            full = np.ones((points.shape[0], self._nvars), dtype=np.int64)
            full[:, list(self._active)] = points
            return self._inner.probe_many(full)
        return self._inner.probe_many([self._expand(p) for p in points])


def _expand_exps(e: ExponentVec, nvars: int, active: Sequence[int]) -> ExponentVec:
    full = [0] * nvars
    for j, v in zip(active, e):
        full[j] = v
    return tuple(full)


def trivial_T1(
    bb: BlackBox,
    nvars: int,
    bounds: Sequence[int],
    field: PrimeField,
    backend: Backend | None = None,
) -> RunReport:
    """One-term fast path: probe each variable alone (all others at 1).

    Each image is c * z^(exponent of that variable); the images must agree
    on the coefficient, otherwise the box was not 1-sparse.
    """
    backend = backend or dense_backend
    start = bb.probes
    images = []
    stats = []
    for k in range(nvars):
        s: SubVector = tuple(1 if j == k else 0 for j in range(nvars))
        g = backend(UniBox(bb, s, field), bounds[k] - 1, 1)
        images.append(g)
        stats.append(ImageStat(s, g.degree()))

    def report(ok, poly, failure=None):
        return RunReport(
            ok, poly, bb.probes - start, field.q, images=tuple(stats), failure=failure
        )

    if all(g.is_zero for g in images):
        return report(True, SparsePoly.zero(field, nvars))
    coeff = None
    exps = []
    for g in images:
        if g.num_terms != 1:
            return report(False, None, "box is not 1-sparse: an image has multiple terms")
        c, d = g.terms[0]
        if coeff is None:
            coeff = c
        elif c != coeff:
            return report(False, None, "box is not 1-sparse: images disagree on the coefficient")
        exps.append(d)
    return report(True, SparsePoly.from_terms(field, nvars, [(coeff, tuple(exps))]))


def interpolate_once(
    bb: BlackBox,
    cfg: InterpolationConfig,
    rng: random.Random | None = None,
    backend: Backend | None = None,
) -> RunReport:
    """One interpolation attempt; succeeds with probability at least 2/3
    for a box within the stated bounds.

    The black box must evaluate over the planned field (plan_run(cfg).field);
    with an explicit cfg.field that is simply the caller's field.
    """
    plan = plan_run(cfg)
    seed = cfg.seed
    if rng is None:
        if seed is None:
            seed = secrets.randbits(63)
        rng = derive_rng(seed, "once")
    backend = backend or dense_backend
    start = bb.probes

    if plan.mode == TRIVIAL:
        rep = trivial_T1(bb, cfg.nvars, cfg.bounds, plan.field, backend)
        return dataclasses.replace(rep, seed=seed)
    if plan.mode == CONSTANT:
        value = bb.probe((1,) * cfg.nvars)
        poly = SparsePoly.from_terms(plan.field, cfg.nvars, [(value, (0,) * cfg.nvars)])
        return RunReport(True, poly, bb.probes - start, plan.field.q, seed)

    params = plan.params
    n_act = len(plan.active)
    act_bounds = tuple(cfg.bounds[j] for j in plan.active)
    inner = bb if n_act == cfg.nvars else _FixedOnesBox(bb, cfg.nvars, plan.active)

    family = sample_family(params, rng)
    deg_bound = max(max_image_degree(act_bounds, s) for s in family)
    alpha = sample_alpha(plan.field, n_act, plan.q_min, rng)

    uboxes = [UniBox(inner, s, plan.field, alpha) for s in family]
    if backend is dense_backend:
        images = dense_interpolate_many(uboxes, deg_bound)
    else:
        images = [backend(ub, deg_bound, cfg.t_bound) for ub in uboxes]

    stats = tuple(
        ImageStat(_expand_exps(s, cfg.nvars, plan.active), g.degree())
        for s, g in zip(family, images)
    )

    def report(ok, poly, bstats=None, failure=None):
        return RunReport(
            ok,
            poly,
            bb.probes - start,
            plan.field.q,
            seed,
            nu=params.nu,
            deg_bound=deg_bound,
            images=stats,
            buckets=bstats,
            failure=failure,
        )

    if all(g.is_zero for g in images):
        return report(True, SparsePoly.zero(plan.field, cfg.nvars), BucketStats(0, 0, 0))

    buckets = bucket_by_coefficient(list(zip(family, images)), params.nu)
    if not buckets:
        return report(
            False, None, BucketStats(0, 0, 0),
            "no coefficient appears in at least half the images",
        )

    lam_rank = None if params.mode == BIVARIATE else params.lam
    accepted: list[tuple[int, ExponentVec]] = []
    rejected = 0
    ambiguous = 0
    for b in buckets:
        if b.ambiguous:
            ambiguous += 1
            continue
        svecs = [s for s, _ in b.entries]
        sel = select_independent(svecs, lam_rank, n_act)
        if sel is None:
            rejected += 1
            continue
        sol = solve_exponents(
            [svecs[i] for i in sel], [b.entries[i][1] for i in sel], act_bounds, b.entries
        )
        if not sol.accepted:
            rejected += 1
            continue
        accepted.append((b.coeff, sol.exps))
    bstats = BucketStats(len(accepted), rejected, ambiguous)

    if ambiguous:
        return report(False, None, bstats, "ambiguous coefficient bucket (scaling collision)")
    try:
        g = assemble(accepted, plan.field, n_act)
    except RecoveryError as exc:
        return report(False, None, bstats, str(exc))
    if g.num_terms > cfg.t_bound:
        return report(
            False, None, bstats,
            f"recovered {g.num_terms} terms, more than the bound {cfg.t_bound}",
        )
    result = undiversify(g, alpha)
    if n_act != cfg.nvars:
        result = SparsePoly.from_terms(
            plan.field,
            cfg.nvars,
            [(c, _expand_exps(e, cfg.nvars, plan.active)) for c, e in result.terms],
        )
    return report(True, result, bstats)


def amplified_runs(epsilon: float) -> int:
    """Number of repetitions ceil(18 ln(1/eps)) for failure probability eps."""
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must be in (0, 1)")
    return math.ceil(18 * math.log(1 / epsilon))


def tally_votes(results: Sequence[tuple[bool, SparsePoly | None]]) -> tuple[SparsePoly | None, VoteTally]:
    """Majority vote over run outcomes; the winner needs a strict majority
    of all runs (failures count against it)."""
    runs = len(results)
    counter: Counter = Counter(poly for ok, poly in results if ok)
    failures = sum(1 for ok, _ in results if not ok)
    if counter:
        winner, votes = counter.most_common(1)[0]
    else:
        winner, votes = None, 0
    tally = VoteTally(runs, votes, len(counter), failures)
    if winner is not None and 2 * votes > runs:
        return winner, tally
    return None, tally


def interpolate_whp(
    bb: BlackBox,
    cfg: InterpolationConfig,
    rng: random.Random | None = None,
    backend: Backend | None = None,
) -> RunReport:
    """Amplified interpolation: ceil(18 ln(1/cfg.epsilon)) independent runs,
    canonical-form majority vote; fails when no candidate takes a strict
    majority."""
    ell = amplified_runs(cfg.epsilon)
    if rng is not None:
        master = rng.getrandbits(63)
    elif cfg.seed is not None:
        master = cfg.seed
    else:
        master = secrets.randbits(63)
    start = bb.probes
    reports = [
        interpolate_once(bb, cfg, rng=derive_rng(master, f"run{i}"), backend=backend)
        for i in range(ell)
    ]
    winner, tally = tally_votes([(r.ok, r.poly) for r in reports])
    probes = bb.probes - start
    field_q = reports[0].field_q
    if winner is not None:
        return RunReport(True, winner, probes, field_q, master, votes=tally)
    return RunReport(
        False, None, probes, field_q, master,
        failure="no polynomial won a strict majority of the runs", votes=tally,
    )
