"""Rank-one Heisenberg and Virasoro vertex operator algebras with exact modes.

States are sparse combinations of partitions (descending tuples of positive
integers).  For the Heisenberg algebra the partition ``(n1, ..., nk)`` is
``a(-n1)...a(-nk)`` applied to the lowest vector of a Fock space; for the
Virasoro algebra it is the PBW monomial ``L(-n1)...L(-nk)`` applied to a
lowest weight vector.  The vacuum VOA of the Virasoro algebra is the Verma
module at ``(c, 0)`` modulo ``L(-1)1``, whose basis is the partitions with
no part equal to 1.

Only generator modes are coded by hand.  A general mode ``v_m w`` is
reduced to generator modes through the iterate formula

    (a_p u)_q = sum_i (-1)^i binom(p, i) [a_{p-i} u_{q+i} - (-1)^p u_{p+q-i} a_i]

with ``a = a(-1)1`` (Heisenberg) or ``a = omega`` (Virasoro).
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .formal import LaurentPolynomial
from .linalg import ONE, ZERO, Q, axpy, binom, factorial, fmt

HEISENBERG = "heisenberg"
VIRASORO = "virasoro"


class IncompatibleRealizationError(ValueError):
    """A VOA element was asked to act on a module of another algebra."""


class TruncationError(ValueError):
    """A result would leave the level range a truncated module supports."""


class PreconditionError(ValueError):
    """A hypothesis of an expansion identity fails on the given states."""


# -- partitions -------------------------------------------------------------

def partitions(n: int, min_part: int = 1, max_part: int | None = None) -> Iterator[tuple]:
    """Descending partitions of ``n`` with parts in ``[min_part, max_part]``."""
    if max_part is None:
        max_part = n
    if n == 0:
        yield ()
        return
    for first in range(min(n, max_part), min_part - 1, -1):
        for rest in partitions(n - first, min_part, first):
            yield (first,) + rest


def insert_part(part: tuple, m: int) -> tuple:
    """Insert ``m`` keeping the tuple descending."""
    i = 0
    while i < len(part) and part[i] >= m:
        i += 1
    return part[:i] + (m,) + part[i:]


def remove_part(part: tuple, m: int) -> tuple:
    i = part.index(m)
    return part[:i] + part[i + 1:]


def level(part: tuple) -> int:
    return sum(part)


@dataclass(frozen=True, order=True)
class BasisState:
    """Named basis vector of a realization."""

    tag: str
    partition: tuple
    base: str = "vacuum"

    def __post_init__(self):
        p = tuple(int(x) for x in self.partition)
        if any(x < 1 for x in p) or list(p) != sorted(p, reverse=True):
            raise ValueError(f"partition must be descending positive parts: {p}")
        if self.tag == VIRASORO and self.base == "vacuum" and p and p[-1] < 2:
            raise ValueError("the Virasoro vacuum module has parts >= 2")
        object.__setattr__(self, "partition", p)


# -- realizations -----------------------------------------------------------

class ModuleRealization:
    """A lowest weight module for a rank-one Heisenberg or Virasoro algebra.

    ``kind`` is ``voa-self``, ``fock`` or ``verma``.  ``max_level`` is the
    optional level cutoff of a truncated module; results above it raise
    :class:`TruncationError` instead of being dropped.
    """

    def __init__(self, algebra: str, kind: str, c=None, h=None, lam=None, max_level: int | None = None):
        if algebra not in (HEISENBERG, VIRASORO):
            raise ValueError(f"unknown algebra {algebra!r}")
        self.algebra = algebra
        self.kind = kind
        self.max_level = max_level
        if algebra == HEISENBERG:
            self.c = ONE
            self.lam = Q(0 if lam is None else lam)
            self.h = self.lam * self.lam / 2
            if kind == "voa-self" and self.lam:
                raise ValueError("the VOA itself has charge 0")
        else:
            if c is None:
                raise ValueError("the Virasoro algebra needs a central charge")
            self.c = Q(c)
            self.h = Q(0 if h is None else h)
            self.lam = None
            if kind == "voa-self" and self.h:
                raise ValueError("the vacuum module has h = 0")
        self.min_part = 2 if (algebra == VIRASORO and kind == "voa-self") else 1
        self._gen: dict = {}
        self._lock = threading.Lock()

    # identification -------------------------------------------------------
    @property
    def base(self) -> str:
        return "vacuum" if self.kind == "voa-self" else "lowest"

    def compatible(self, other: "ModuleRealization") -> bool:
        return self.algebra == other.algebra and self.c == other.c

    def describe(self) -> str:
        if self.algebra == HEISENBERG:
            return "M(1)" if self.kind == "voa-self" else f"Fock(lambda={fmt(self.lam)})"
        if self.kind == "voa-self":
            return f"Vir(c={fmt(self.c)})"
        return f"Verma(c={fmt(self.c)}, h={fmt(self.h)})"

    def __repr__(self):
        return f"ModuleRealization({self.describe()})"

    # grading ----------------------------------------------------------------
    def basis(self, lev: int) -> list[tuple]:
        if lev < 0:
            return []
        return list(partitions(lev, self.min_part))

    def dim(self, lev: int) -> int:
        return len(self.basis(lev))

    def basis_upto(self, top: int) -> list[tuple]:
        out = []
        for n in range(top + 1):
            out.extend(self.basis(n))
        return out

    def weight(self, part: tuple):
        return self.h + level(part)

    def state(self, part: Iterable[int] = (), coeff=ONE) -> "StateVector":
        p = BasisState(self.algebra, tuple(part), self.base).partition
        return StateVector(self, {p: Q(coeff)})

    def lowest(self) -> "StateVector":
        return self.state(())

    def zero(self) -> "StateVector":
        return StateVector(self, {})

    def valid(self, part: tuple) -> bool:
        return not part or part[-1] >= self.min_part

    def check_level(self, vec: Mapping):
        if self.max_level is not None:
            for p in vec:
                if level(p) > self.max_level:
                    raise TruncationError(
                        f"level {level(p)} exceeds the cutoff {self.max_level} of {self.describe()}")

    # generator modes --------------------------------------------------------
    def gen(self, j: int, part: tuple) -> dict:
        """``a(j)`` (Heisenberg) or ``L(j)`` (Virasoro) on a basis vector."""
        key = (j, part)
        hit = self._gen.get(key)
        if hit is not None:
            return hit
        if self.algebra == HEISENBERG:
            out = self._heis(j, part)
        else:
            out = self._vir(j, part)
        with self._lock:
            self._gen[key] = out
        return out

    def gen_vec(self, j: int, vec: Mapping) -> dict:
        out: dict = {}
        for p, x in vec.items():
            axpy(out, x, self.gen(j, p))
        return out

    def _heis(self, j: int, part: tuple) -> dict:
        if j < 0:
            return {insert_part(part, -j): ONE}
        if j == 0:
            return {part: self.lam} if self.lam else {}
        mult = part.count(j)
        if not mult:
            return {}
        return {remove_part(part, j): Q(j * mult)}

    def _vir(self, j: int, part: tuple) -> dict:
        if j < 0:
            m = -j
            if not part or m >= part[0]:
                new = (m,) + part
                return {new: ONE} if self.valid(new) else {}
            n1, rest = part[0], part[1:]
            # L(-m) L(-n1) X = L(-n1) L(-m) X + (n1 - m) L(-m-n1) X
            out: dict = {}
            for p, x in self._vir(-m, rest).items():
                axpy(out, x, self.gen(-n1, p))
            axpy(out, Q(n1 - m), self.gen(-(m + n1), rest))
            return out
        if not part:
            return {(): self.h} if (j == 0 and self.h) else {}
        n1, rest = part[0], part[1:]
        # L(j) L(-n1) X = L(-n1) L(j) X + (j + n1) L(j - n1) X + c/12 (j^3 - j) delta X
        out = {}
        for p, x in self.gen(j, rest).items():
            axpy(out, x, self.gen(-n1, p))
        axpy(out, Q(j + n1), self.gen(j - n1, rest))
        if j == n1 and j > 1:
            axpy(out, self.c * (j ** 3 - j) / 12, {rest: ONE})
        return out


class VOA(ModuleRealization):
    """The VOA acting on itself, plus the engines for its modules."""

    def __init__(self, algebra: str, c=None):
        super().__init__(algebra, "voa-self", c=c)
        self.gen_weight = 1 if algebra == HEISENBERG else 2
        self._engines: dict = {}

    def generator(self) -> "StateVector":
        return self.state((1,) if self.algebra == HEISENBERG else (2,))

    def vacuum(self) -> "StateVector":
        return self.state(())

    def omega(self) -> "StateVector":
        if self.algebra == HEISENBERG:
            return self.state((1, 1), Q(1, 2))
        return self.state((2,))

    def fock(self, lam, max_level: int | None = None) -> ModuleRealization:
        if self.algebra != HEISENBERG:
            raise IncompatibleRealizationError("Fock spaces are Heisenberg modules")
        return ModuleRealization(HEISENBERG, "fock", lam=lam, max_level=max_level)

    def verma(self, h, max_level: int | None = None) -> ModuleRealization:
        if self.algebra != VIRASORO:
            raise IncompatibleRealizationError("Verma modules are Virasoro modules")
        return ModuleRealization(VIRASORO, "verma", c=self.c, h=h, max_level=max_level)

    def engine(self, W: ModuleRealization | None = None) -> "ModeEngine":
        W = self if W is None else W
        if not self.compatible(W):
            raise IncompatibleRealizationError(f"{self.describe()} cannot act on {W.describe()}")
        key = id(W)
        eng = self._engines.get(key)
        if eng is None or eng.W is not W:
            eng = self._engines[key] = ModeEngine(self, W)
        return eng


def construct_voa(kind: str, c=None) -> VOA:
    """Build ``M(1)`` (``kind='heisenberg'``) or ``Vir_c`` (``kind='virasoro'``)."""
    if kind == VIRASORO:
        if c is None or isinstance(c, float):
            raise ValueError("the central charge must be an exact rational")
        return VOA(VIRASORO, Q(c))
    if kind == HEISENBERG:
        return VOA(HEISENBERG)
    raise ValueError(f"unknown VOA kind {kind!r}")


# -- the mode engine --------------------------------------------------------

class ModeEngine:
    """Memoized ``v_q w`` for basis vectors ``v`` of V and ``w`` of W."""

    def __init__(self, V: VOA, W: ModuleRealization):
        self.V, self.W = V, W
        self._memo: dict = {}
        self._lock = threading.Lock()
        heis = V.algebra == HEISENBERG
        # generator a = a(-1)1 has a_j = a(j); omega has omega_j = L(j-1)
        self._shift = 0 if heis else -1
        self._p_of = (lambda n: -n) if heis else (lambda n: 1 - n)

    def a(self, j: int, part: tuple) -> dict:
        return self.W.gen(j + self._shift, part)

    def basis_mode(self, v: tuple, q: int, w: tuple) -> dict:
        if not v:
            return {w: ONE} if q == -1 else {}
        # zero by grading
        if level(w) + level(v) - q - 1 < 0:
            return {}
        key = (v, q, w)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        n1, u = v[0], v[1:]
        p = self._p_of(n1)
        ga = self.V.gen_weight
        wt_u = level(u)
        lw = level(w)
        imax = max(lw + wt_u - q - 1, lw + ga - 1)
        sign_p = -1 if p % 2 else 1
        out: dict = {}
        for i in range(imax + 1):
            b = binom(p, i)
            if i % 2:
                b = -b
            # a_{p-i} (u_{q+i} w)
            if lw + wt_u - (q + i) - 1 >= 0:
                for x, cx in self.basis_mode(u, q + i, w).items():
                    axpy(out, b * cx, self.a(p - i, x))
            # - (-1)^p u_{p+q-i} (a_i w)
            if lw + ga - i - 1 >= 0:
                for x, cx in self.a(i, w).items():
                    axpy(out, -sign_p * b * cx, self.basis_mode(u, p + q - i, x))
        with self._lock:
            self._memo[key] = out
        return out

    def act(self, v: Mapping, q: int, w: Mapping) -> dict:
        """``v_q w`` on sparse dicts keyed by partitions."""
        out: dict = {}
        for vp, vc in v.items():
            for wp, wc in w.items():
                r = self.basis_mode(vp, q, wp)
                if r:
                    axpy(out, vc * wc, r)
        return out


# -- state vectors ----------------------------------------------------------

class StateVector:
    """Finite combination of basis vectors of one realization."""

    __slots__ = ("module", "terms")

    def __init__(self, module: ModuleRealization, terms: Mapping | None = None):
        self.module = module
        self.terms = {tuple(p): Q(x) for p, x in (terms or {}).items() if x}

    def _same(self, other: "StateVector"):
        if not isinstance(other, StateVector):
            raise TypeError("expected a StateVector")
        if other.module is not self.module:
            raise IncompatibleRealizationError("states live in different realizations")

    def __add__(self, other):
        self._same(other)
        return StateVector(self.module, axpy(dict(self.terms), ONE, other.terms))

    def __sub__(self, other):
        self._same(other)
        return StateVector(self.module, axpy(dict(self.terms), -ONE, other.terms))

    def __neg__(self):
        return StateVector(self.module, {p: -x for p, x in self.terms.items()})

    def __rmul__(self, a):
        a = Q(a)
        return StateVector(self.module, {p: a * x for p, x in self.terms.items()})

    __mul__ = __rmul__

    def __eq__(self, other):
        if not isinstance(other, StateVector):
            return NotImplemented
        return self.module is other.module and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def levels(self) -> set:
        return {level(p) for p in self.terms}

    @property
    def is_homogeneous(self) -> bool:
        return len(self.levels()) <= 1

    @property
    def weight(self):
        levs = self.levels()
        if len(levs) != 1:
            raise ValueError("weight of a zero or inhomogeneous state")
        return self.module.h + levs.pop()

    def components(self) -> dict:
        """Homogeneous components keyed by level."""
        out: dict = {}
        for p, x in self.terms.items():
            out.setdefault(level(p), {})[p] = x
        return {n: StateVector(self.module, t) for n, t in out.items()}

    def basis_terms(self) -> dict:
        return {BasisState(self.module.algebra, p, self.module.base): x for p, x in self.terms.items()}

    def __repr__(self):
        if not self.terms:
            return "0"
        gen = "a" if self.module.algebra == HEISENBERG else "L"
        ket = "|0>" if self.module.kind == "voa-self" else "|h>"
        parts = []
        for p, x in sorted(self.terms.items(), key=lambda t: (level(t[0]), t[0])):
            ops = "".join(f"{gen}({-n})" for n in p)
            parts.append(f"{fmt(x)} {ops}{ket}")
        return " + ".join(parts)


def _as_state(v, V: ModuleRealization) -> StateVector:
    if not isinstance(v, StateVector):
        raise TypeError("expected a StateVector")
    return v


def mode_act(v: StateVector, m: int, w: StateVector) -> StateVector:
    """Exact ``v_m w`` for ``v`` in the VOA and ``w`` in a compatible module."""
    V = v.module
    if not isinstance(V, VOA):
        raise IncompatibleRealizationError("the acting state must belong to the VOA itself")
    eng = V.engine(w.module)
    out = eng.act(v.terms, m, w.terms)
    w.module.check_level(out)
    return StateVector(w.module, out)


def L_act(n: int, w: StateVector, V: VOA | None = None) -> StateVector:
    """``L(n) w``; the Virasoro generators act directly, Heisenberg through omega."""
    W = w.module
    if W.algebra == VIRASORO:
        out = W.gen_vec(n, w.terms)
        W.check_level(out)
        return StateVector(W, out)
    V = V or _heisenberg_voa()
    return mode_act(V.omega(), n + 1, w)


_HEIS: list = []


def _heisenberg_voa() -> VOA:
    if not _HEIS:
        _HEIS.append(construct_voa(HEISENBERG))
    return _HEIS[0]


def y_window(v: StateVector, w: StateVector, window: tuple[int, int]) -> LaurentPolynomial:
    """Coefficients of ``Y(v, x) w`` on the powers ``window``; x^{-m-1} holds v_m w."""
    lo, hi = window
    return LaurentPolynomial({p: mode_act(v, -p - 1, w) for p in range(lo, hi + 1)
                              if mode_act(v, -p - 1, w)})


def exp_L1_apply(v: StateVector, t, V: VOA | None = None) -> StateVector:
    """``e^{t L(1)} v`` (a finite sum, since L(1) lowers the weight)."""
    t = Q(t)
    out = v
    term = v
    i = 0
    while True:
        i += 1
        term = L_act(1, term, V)
        if term.is_zero():
            return out
        out = out + (t ** i / factorial(i)) * term


def _require_integral(v: StateVector):
    if not isinstance(v.module, VOA):
        raise ValueError("only elements of the VOA (integer weights) are allowed here")


def theta_apply(v: StateVector) -> StateVector:
    """``e^{L(1)} (-1)^{L(0)} v``."""
    _require_integral(v)
    signed = StateVector(v.module, {p: (-x if level(p) % 2 else x) for p, x in v.terms.items()})
    return exp_L1_apply(signed, ONE, v.module)


def y_o_window(v: StateVector, w: StateVector, window: tuple[int, int]) -> LaurentPolynomial:
    """Coefficients of ``Y^o(v, x) w = Y(e^{xL(1)} (-x^{-2})^{L(0)} v, x^{-1}) w``.

    For homogeneous v of weight N the x^P coefficient is
    ``(-1)^N sum_i (1/i!) (L(1)^i v)_{P-1-i+2N} w``.
    """
    _require_integral(v)
    V = v.module
    lo, hi = window
    out: dict = {}
    for N, comp in v.components().items():
        sign = -ONE if N % 2 else ONE
        powers = []
        term = comp
        i = 0
        while not term.is_zero():
            powers.append((i, term))
            i += 1
            term = L_act(1, term, V)
        for P in range(lo, hi + 1):
            acc = None
            for i, li in powers:
                r = mode_act(li, P - 1 - i + 2 * N, w)
                if r:
                    r = (sign / factorial(i)) * r
                    acc = r if acc is None else acc + r
            if acc is not None and acc:
                out[P] = out[P] + acc if P in out else acc
    return LaurentPolynomial(out)


def lassoc_expand(u: StateVector, p: int, v: StateVector, q: int, w: StateVector, k: int, s: int) -> StateVector:
    """Expand ``u_p v_q w`` as iterates ``(u_r v)_t w``.

    Requires ``u_{k+m} w = 0`` and ``v_{s+1+q+m} w = 0`` for all m >= 0;
    both are checked on the finitely many modes the grading allows.
    """
    W = w.module
    top_w = max(w.levels(), default=0)
    wt_u = max(u.levels(), default=0)
    wt_v = max(v.levels(), default=0)
    for m in range(0, max(0, top_w + wt_u - k) + 1):
        if mode_act(u, k + m, w):
            raise PreconditionError(f"u_{k + m} w is nonzero, so x^{k} Y(u,x)w has a pole")
    for m in range(0, max(0, top_w + wt_v - (s + 1 + q)) + 1):
        if mode_act(v, s + 1 + q + m, w):
            raise PreconditionError(f"v_{s + 1 + q + m} w is nonzero, so x^{s + 1 + q} Y(v,x)w has a pole")
    acc = StateVector(W, {})
    for i in range(s + 1):
        bi = binom(p - k, i)
        if not bi:
            continue
        j = 0
        while True:
            r = p - k - i + j
            if r > wt_u + wt_v - 1 or (k >= 0 and j > k):
                break
            bj = binom(k, j)
            if bj:
                inner = mode_act(u, r, v)
                if inner:
                    acc = acc + (bi * bj) * mode_act(inner, q + k + i - j, w)
            j += 1
    return acc


def gram_matrix(W: ModuleRealization, lev: int) -> list:
    """Shapovalov form on level ``lev`` of a Verma module in its PBW basis.

    The entry for partitions p, q is the lowest-vector coefficient of
    ``L(p_k)...L(p_1) L(-q_1)...L(-q_m) |h>`` (the adjoint of a PBW monomial).
    """
    if W.algebra != VIRASORO:
        raise IncompatibleRealizationError("the Gram matrix is computed for Virasoro modules")
    basis = W.basis(lev)
    rows = []
    for p in basis:
        row = []
        for q in basis:
            vec = {q: ONE}
            for n in reversed(p):
                vec = W.gen_vec(n, vec)
            row.append(vec.get((), ZERO))
        rows.append(row)
    return rows


def gram_determinant(W: ModuleRealization, lev: int):
    """Exact determinant of :func:`gram_matrix` (fraction-free elimination)."""
    m = [list(r) for r in gram_matrix(W, lev)]
    det = ONE
    size = len(m)
    for i in range(size):
        piv = next((r for r in range(i, size) if m[r][i]), None)
        if piv is None:
            return ZERO
        if piv != i:
            m[i], m[piv] = m[piv], m[i]
            det = -det
        det *= m[i][i]
        for r in range(i + 1, size):
            f = m[r][i] / m[i][i]
            if f:
                m[r] = [x - f * y for x, y in zip(m[r], m[i])]
    return det
