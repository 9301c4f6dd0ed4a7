"""Sparse multivariate polynomials over a prime field, and the black-box
evaluation contract that hides them from the interpolator.

A polynomial is a tuple of (coefficient, exponent-vector) terms in canonical
form: coefficients are nonzero integers in [1, q), exponent vectors are
pairwise distinct, and terms are sorted in descending lexicographic order on
the exponent vector.  Canonical form makes equality (and the majority vote
built on it) a plain tuple comparison, and makes serialization byte-stable.

JSON schema (used by the CLI and by golden files):

    {"field": "<q>", "vars": n,
     "terms": [{"coeff": "<c>", "exps": [e1, ..., en]}, ...]}

with terms in canonical order and coefficients as decimal strings.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ._vecmod import numpy_ok, powmod_vec
from .ffield import PrimeField

ExponentVec = tuple[int, ...]


@dataclass(frozen=True)
class SparsePoly:
    field: PrimeField
    nvars: int
    terms: tuple[tuple[int, ExponentVec], ...]

    @classmethod
    def from_terms(
        cls,
        field: PrimeField,
        nvars: int,
        terms: Iterable[tuple[int, Sequence[int]]],
    ) -> "SparsePoly":
        """Build the canonical polynomial: reduce coefficients mod q, merge
        duplicate exponent vectors, drop zeros, sort descending-lex."""
        if nvars < 1:
            raise ValueError("polynomial needs at least one variable")
        acc: dict[ExponentVec, int] = {}
        for coeff, exps in terms:
            e = tuple(exps)
            if len(e) != nvars:
                raise ValueError(f"exponent vector {e} has length {len(e)}, expected {nvars}")
            if any(not isinstance(x, int) or x < 0 for x in e):
                raise ValueError(f"exponents must be nonnegative integers, got {e}")
            acc[e] = (acc.get(e, 0) + coeff) % field.q
        canon = tuple(
            (c, e) for e, c in sorted(acc.items(), key=lambda kv: kv[0], reverse=True) if c != 0
        )
        return cls(field, nvars, canon)

    @classmethod
    def zero(cls, field: PrimeField, nvars: int) -> "SparsePoly":
        return cls.from_terms(field, nvars, [])

    @property
    def num_terms(self) -> int:
        return len(self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def partial_degrees(self) -> tuple[int, ...]:
        """Max exponent per variable (all zeros for the zero polynomial)."""
        degs = [0] * self.nvars
        for _, exps in self.terms:
            for j, e in enumerate(exps):
                if e > degs[j]:
                    degs[j] = e
        return tuple(degs)

    def evaluate(self, point: Sequence[int]) -> int:
        if len(point) != self.nvars:
            raise ValueError(f"point has {len(point)} coordinates, expected {self.nvars}")
        q = self.field.q
        total = 0
        for coeff, exps in self.terms:
            v = coeff
            for p, e in zip(point, exps):
                if e:
                    v = v * pow(p, e, q) % q
            total += v
        return total % q

    def scale_inputs(self, scales: Sequence[int]) -> "SparsePoly":
        """The polynomial self(s_1*x_1, ..., s_n*x_n); exponents unchanged,
        each coefficient multiplied by prod(s_j^{e_j})."""
        if len(scales) != self.nvars:
            raise ValueError("one scale per variable required")
        q = self.field.q
        scaled = []
        for coeff, exps in self.terms:
            c = coeff
            for s, e in zip(scales, exps):
                if e:
                    c = c * pow(s, e, q) % q
            scaled.append((c, exps))
        return SparsePoly.from_terms(self.field, self.nvars, scaled)

    def __add__(self, other: "SparsePoly") -> "SparsePoly":
        if self.field != other.field or self.nvars != other.nvars:
            raise ValueError("polynomials from different rings")
        return SparsePoly.from_terms(self.field, self.nvars, self.terms + other.terms)

    def __repr__(self) -> str:
        if not self.terms:
            return f"SparsePoly(0 over F_{self.field.q})"
        body = " + ".join(f"{c}*x^{list(e)}" for c, e in self.terms)
        return f"SparsePoly({body} over F_{self.field.q})"


def to_obj(f: SparsePoly) -> dict:
    """The polynomial as the plain-JSON object of the schema."""
    return {
        "field": str(f.field.q),
        "vars": f.nvars,
        "terms": [{"coeff": str(c), "exps": list(e)} for c, e in f.terms],
    }


def serialize(f: SparsePoly) -> str:
    """Canonical single-line JSON; equal polynomials serialize identically."""
    return json.dumps(to_obj(f), separators=(",", ":"))


def parse(text: str, field: PrimeField | None = None, nvars: int | None = None) -> SparsePoly:
    """Parse the JSON schema into canonical form.

    Coefficients are reduced mod q.  Raises ValueError on malformed input,
    negative exponents, duplicate exponent vectors, or mismatch with the
    expected field/vars when those are supplied.
    """
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed polynomial JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ValueError("polynomial JSON must be an object")
    try:
        q = int(obj["field"])
        n = int(obj["vars"])
        raw_terms = obj["terms"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"polynomial JSON missing or invalid field/vars/terms: {exc}") from exc
    f = PrimeField(q)
    if field is not None and field != f:
        raise ValueError(f"polynomial field {q} does not match expected {field.q}")
    if nvars is not None and n != nvars:
        raise ValueError(f"polynomial has {n} variables, expected {nvars}")
    if not isinstance(raw_terms, list):
        raise ValueError("terms must be a list")
    seen: set[ExponentVec] = set()
    terms = []
    for t in raw_terms:
        if not isinstance(t, dict) or "coeff" not in t or "exps" not in t:
            raise ValueError(f"malformed term {t!r}")
        coeff = int(t["coeff"])
        exps = t["exps"]
        if not isinstance(exps, list) or any(not isinstance(x, int) for x in exps):
            raise ValueError(f"malformed exponent vector {exps!r}")
        if any(x < 0 for x in exps):
            raise ValueError(f"negative exponent in {exps!r}")
        key = tuple(exps)
        if key in seen:
            raise ValueError(f"duplicate exponent vector {key}")
        seen.add(key)
        terms.append((coeff, key))
    return SparsePoly.from_terms(f, n, terms)


class BlackBox:
    """Evaluation oracle over F_q^n with a monotone probe counter.

    Subclasses implement _eval_one.  probe() and probe_many() count one per
    evaluation; the counter update is lock-protected so concurrent probing
    keeps exact counts.
    """

    def __init__(self):
        self._count = 0
        self._lock = threading.Lock()

    @property
    def probes(self) -> int:
        return self._count

    def _bump(self, k: int) -> None:
        with self._lock:
            self._count += k

    def probe(self, point: Sequence[int]) -> int:
        value = self._eval_one(point)
        self._bump(1)
        return value

    def probe_many(self, points) -> list[int] | np.ndarray:
        """Evaluate at many points; counts len(points) probes."""
        values = self._eval_many(points)
        self._bump(len(values))
        return values

    def _eval_many(self, points):
        if isinstance(points, np.ndarray):
            return [self._eval_one([int(x) for x in row]) for row in points]
        return [self._eval_one(p) for p in points]

    def _eval_one(self, point: Sequence[int]) -> int:
        raise NotImplementedError

    def __getstate__(self):
        state = self.__dict__.copy()
        del state["_lock"]
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)
        self._lock = threading.Lock()


class PolyBlackBox(BlackBox):
    """Black box backed by a known SparsePoly (test and CLI harness)."""

    def __init__(self, poly: SparsePoly):
        super().__init__()
        self._poly = poly
        self.field = poly.field

    def _eval_one(self, point: Sequence[int]) -> int:
        return self._poly.evaluate(point)

    def _eval_many(self, points):
        q = self.field.q
        if isinstance(points, np.ndarray) and numpy_ok(q):
            total = np.zeros(points.shape[0], dtype=np.int64)
            for coeff, exps in self._poly.terms:
                v = np.full(points.shape[0], coeff, dtype=np.int64)
                for j, e in enumerate(exps):
                    if e:
                        v = v * powmod_vec(points[:, j], e, q) % q
                total = (total + v) % q
            return total
        return super()._eval_many(points)


def blackbox_from_poly(f: SparsePoly) -> PolyBlackBox:
    return PolyBlackBox(f)


def random_exponents(nvars: int, count: int, bound: int, rng) -> list[ExponentVec]:
    """`count` distinct exponent vectors with entries in [0, bound)."""
    space = bound ** nvars
    if count > space:
        raise ValueError(f"cannot draw {count} distinct exponent vectors from a space of {space}")
    if space <= (1 << 62):
        picks = rng.sample(range(space), count)
    else:
        # space too large for range sampling; collisions are negligible but
        # resample anyway for exactness
        chosen: set[int] = set()
        while len(chosen) < count:
            chosen.add(rng.randrange(space))
        picks = sorted(chosen)
    out = []
    for ix in picks:
        e = []
        for _ in range(nvars):
            ix, d = divmod(ix, bound)
            e.append(d)
        out.append(tuple(e))
    return out


def random_sparse(nvars: int, t: int, bound: int, field: PrimeField, rng) -> SparsePoly:
    """Random polynomial with exactly t terms, distinct exponent vectors with
    entries in [0, bound), and uniform nonzero coefficients."""
    if t == 0:
        return SparsePoly.zero(field, nvars)
    exps = random_exponents(nvars, t, bound, rng)
    return SparsePoly.from_terms(
        field, nvars, [(field.rand_nonzero(rng), e) for e in exps]
    )
