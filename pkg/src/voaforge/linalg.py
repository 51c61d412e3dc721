"""Exact rational scalars and sparse linear algebra over arbitrary index sets.

Vectors are plain dicts mapping a hashable basis index to a nonzero
``gmpy2.mpq``.  Elimination keeps a semi-echelon form whose pivot is the
lowest index of each stored row under a caller supplied total order, so the
tables built on top of it are reproducible.
"""

from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Mapping

import gmpy2
from gmpy2 import mpq

Scalar = type(mpq(0))
ZERO = mpq(0)
ONE = mpq(1)


class IndexMismatchError(ValueError):
    """A vector uses basis indices that the span handle does not know."""


def Q(value, den=None) -> mpq:
    """Coerce ``value`` to an exact rational.

    Accepts ints, ``Fraction``, ``mpq`` and strings such as ``"-3/10"``.
    Floats are refused.
    """
    if den is not None:
        return mpq(Q(value)) / Q(den)
    if isinstance(value, Scalar):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, int):
        return mpq(value)
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, str):
        text = value.strip()
        try:
            num, _, d = text.partition("/")
            if d:
                return mpq(int(num), int(d))
            return mpq(int(num))
        except ValueError:
            raise ValueError(f"not an exact rational: {value!r}") from None
    if type(value).__name__ == "mpz":
        return mpq(value)
    raise TypeError(f"cannot make an exact rational from {type(value).__name__}")


def fmt(q) -> str:
    """Print a rational as ``p/q`` (or ``p`` when integral)."""
    q = Q(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


_binom_cache: dict[tuple[int, int], mpq] = {}


def binom(n: int, k: int) -> mpq:
    """Generalized binomial coefficient ``n choose k`` for integer n, k >= 0."""
    if k < 0:
        return ZERO
    key = (n, k)
    hit = _binom_cache.get(key)
    if hit is not None:
        return hit
    if n >= 0:
        val = mpq(gmpy2.comb(n, k)) if k <= n else ZERO
    else:
        val = mpq(gmpy2.comb(k - n - 1, k))
        if k % 2:
            val = -val
    _binom_cache[key] = val
    return val


def factorial(n: int) -> mpq:
    return mpq(math.factorial(n))


def random_rational(rng: random.Random, height: int = 100, nonzero: bool = True) -> mpq:
    """Seeded rational with numerator and denominator bounded by ``height``."""
    while True:
        q = mpq(rng.randint(-height, height), rng.randint(1, height))
        if q or not nonzero:
            return q


# -- sparse vectors ---------------------------------------------------------

SparseVector = dict


def axpy(y: dict, a, x: Mapping) -> dict:
    """In place ``y += a*x`` dropping cancelled entries; returns ``y``."""
    if not a:
        return y
    for key, val in x.items():
        new = y.get(key, ZERO) + a * val
        if new:
            y[key] = new
        else:
            y.pop(key, None)
    return y


def vec_scale(a, x: Mapping) -> dict:
    if not a:
        return {}
    return {k: a * v for k, v in x.items()}


def vec_sub(x: Mapping, y: Mapping) -> dict:
    return axpy(dict(x), -ONE, y)


def vec_clean(x: Mapping) -> dict:
    return {k: Q(v) for k, v in x.items() if v}


# -- span handles -----------------------------------------------------------


@dataclass
class Membership:
    """Result of :func:`in_span`.

    ``coefficients`` reproduce the queried vector from the generators when
    the handle tracks them (``None`` otherwise).  ``witness`` is the pivot
    position at which reduction got stuck for non-members.
    """

    member: bool
    coefficients: dict | None = None
    witness: Hashable | None = None
    remainder: dict | None = None

    def __bool__(self) -> bool:
        return self.member


class SpanHandle:
    """Incremental semi-echelon span of sparse vectors.

    ``order`` maps a basis index to a sort key; the lowest key of a stored row
    is its pivot.  With ``track=True`` each stored row remembers its
    expression in the generators so membership can return coefficients.
    """

    def __init__(self, order: Callable[[Hashable], object] | None = None,
                 track: bool = True, universe: Iterable[Hashable] | None = None):
        self._order = order or (lambda i: i)
        self._keys: dict[Hashable, object] = {}
        self.track = track
        self.rows: dict[Hashable, tuple[dict, dict | None]] = {}
        self.ngens = 0
        self.universe = None if universe is None else set(universe)

    # ordering keys are cached; they may be expensive (partition sorts)
    def key(self, index):
        k = self._keys.get(index)
        if k is None:
            k = self._keys[index] = self._order(index)
        return k

    @property
    def rank(self) -> int:
        return len(self.rows)

    @property
    def pivots(self) -> list:
        return sorted(self.rows, key=self.key)

    def _check(self, v: Mapping):
        if self.universe is not None:
            bad = [i for i in v if i not in self.universe]
            if bad:
                raise IndexMismatchError(f"unknown basis indices {bad[:3]}")

    def _reduce(self, v: Mapping, full: bool):
        """Reduce ``v``; returns (remainder, combination, first stuck index)."""
        work = dict(v)
        combo: dict | None = {} if self.track else None
        heap = [(self.key(i), n, i) for n, i in enumerate(work)]
        heapq.heapify(heap)
        seen = set()
        counter = len(heap)
        stuck = None
        rem: dict = {}
        while heap:
            _, _, idx = heapq.heappop(heap)
            if idx in seen:
                continue
            seen.add(idx)
            c = work.pop(idx, None)
            if not c:
                continue
            row = self.rows.get(idx)
            if row is None:
                if stuck is None:
                    stuck = idx
                rem[idx] = c
                if not full:
                    rem.update(work)
                    return rem, combo, stuck
                continue
            vec, expr = row
            for j, x in vec.items():
                if j == idx:
                    continue
                new = work.get(j, ZERO) - c * x
                if new:
                    if j not in work:
                        counter += 1
                        heapq.heappush(heap, (self.key(j), counter, j))
                    work[j] = new
                else:
                    work.pop(j, None)
            if combo is not None:
                axpy(combo, c, expr)
        return rem, combo, stuck

    def add(self, v: Mapping) -> bool:
        """Insert a generator; returns True when it enlarged the span."""
        gen = self.ngens
        self.ngens += 1
        v = {k: Q(x) for k, x in v.items() if x}
        if not v:
            return False
        self._check(v)
        rem, combo, stuck = self._reduce(v, full=False)
        if stuck is None:
            return False
        piv = min(rem, key=self.key)
        inv = ONE / rem[piv]
        row = {k: x * inv for k, x in rem.items()}
        expr = None
        if self.track:
            # rem = v - sum(combo) so row = inv*(e_gen - combo)
            expr = vec_scale(-inv, combo)
            expr[gen] = expr.get(gen, ZERO) + inv
        self.rows[piv] = (row, expr)
        return True

    def extend(self, rows: Iterable[Mapping]) -> int:
        return sum(1 for r in rows if self.add(r))

    def normal_form(self, v: Mapping) -> dict:
        """Unique representative of ``v`` supported on non-pivot indices."""
        rem, _, _ = self._reduce({k: Q(x) for k, x in v.items() if x}, full=True)
        return rem

    def contains(self, v: Mapping) -> bool:
        rem, _, stuck = self._reduce({k: Q(x) for k, x in v.items() if x}, full=False)
        return stuck is None


def rref(rows: Iterable[Mapping], order=None, track: bool = True, universe=None) -> SpanHandle:
    """Row-reduce ``rows`` into a :class:`SpanHandle` (generators numbered in order)."""
    h = SpanHandle(order=order, track=track, universe=universe)
    h.extend(rows)
    return h


def in_span(v: Mapping, h: SpanHandle) -> Membership:
    """Exact span membership with coefficients or a witness pivot position."""
    v = {k: Q(x) for k, x in v.items() if x}
    h._check(v)
    rem, combo, stuck = h._reduce(v, full=False)
    if stuck is None:
        return Membership(True, combo if h.track else None)
    return Membership(False, None, stuck, rem)


def kernel_basis(rows: Iterable[Mapping], columns: Iterable[Hashable] | None = None,
                 order=None) -> list[dict]:
    """Basis of ``{x : <row, x> = 0 for every row}`` over the given columns.

    ``columns`` defaults to the indices used by the rows.  Free columns are
    enumerated in order, each giving one kernel vector.
    """
    rows = [{k: Q(x) for k, x in r.items() if x} for r in rows]
    cols = set(columns) if columns is not None else set()
    for r in rows:
        cols.update(r)
    key = order or (lambda i: i)
    h = SpanHandle(order=key, track=False)
    h.extend(rows)
    # bring to fully reduced form: eliminate pivots from each stored row
    reduced = {}
    for piv in h.pivots:
        vec = h.rows[piv][0]
        tail = {k: x for k, x in vec.items() if k != piv}
        reduced[piv] = h.normal_form(tail)
    free = sorted((c for c in cols if c not in h.rows), key=key)
    out = []
    for f in free:
        vec = {f: ONE}
        for piv, tail in reduced.items():
            c = tail.get(f)
            if c:
                vec[piv] = -c
        out.append(vec)
    return out
