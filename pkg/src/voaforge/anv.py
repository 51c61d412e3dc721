"""The products o_n and *_n, the subspaces O_n(V), O'_n(W), O_n(W) at a
weight cutoff, and the resulting quotient tables.

Every spanning element of O_n is a residue

    Res_x x^e (1+x)^b Y(v, x) w = sum_j binom(b, j) v_{e+j} w,

truncated by the grading, so one helper serves all the products.  A span
built at cutoff D only uses spanning elements whose weights stay inside
``V_{<=D}``; a membership proof at cutoff D is therefore a proof, while a
failure only says the cutoff was too small.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .linalg import ONE, ZERO, Q, SpanHandle, axpy, binom, vec_scale
from .voa import (VOA, IncompatibleRealizationError, ModuleRealization, StateVector,
                  TruncationError, level, theta_apply)

VARIANT_V = "O_n(V)"
VARIANT_PRIME = "O'_n(W)"
VARIANT_W = "O_n(W)"
VARIANTS = (VARIANT_V, VARIANT_PRIME, VARIANT_W)


class CutoffInsufficientError(ValueError):
    """The requested computation needs weights above the cutoff."""

    def __init__(self, message: str, required: int):
        super().__init__(f"{message} (needs cutoff >= {required})")
        self.required = required


# -- residues of Y(v, x) w ----------------------------------------------------

def _res_basis(eng, vp: tuple, wp: tuple, e: int, b: int) -> dict:
    """``sum_j binom(b, j) v_{e+j} w`` for basis vectors."""
    jmax = level(wp) + level(vp) - e - 1
    if b >= 0:
        jmax = min(jmax, b)
    out: dict = {}
    for j in range(jmax + 1):
        c = binom(b, j)
        if c:
            r = eng.basis_mode(vp, e + j, wp)
            if r:
                axpy(out, c, r)
    return out


def _res(eng, v: Mapping, w: Mapping, e_of, b_of) -> dict:
    """Residue on vectors; ``e_of``/``b_of`` map the weight of v to exponents."""
    out: dict = {}
    for vp, vc in v.items():
        N = level(vp)
        e, b = e_of(N), b_of(N)
        for wp, wc in w.items():
            r = _res_basis(eng, vp, wp, e, b)
            if r:
                axpy(out, vc * wc, r)
    return out


def _engine(v: StateVector, w: StateVector):
    V = v.module
    if not isinstance(V, VOA):
        raise IncompatibleRealizationError("the acting element must lie in the VOA")
    return V.engine(w.module)


def residue_product(v: StateVector, w: StateVector, e: int, b: int) -> StateVector:
    """``Res_x x^e (1+x)^b Y(v, x) w`` with fixed exponents."""
    eng = _engine(v, w)
    return StateVector(w.module, _res(eng, v.terms, w.terms, lambda N: e, lambda N: b))


def circ_n(v: StateVector, w: StateVector, n: int) -> StateVector:
    """``v o_n w = Res_x x^{-2n-2} (1+x)^{wt v + n} Y(v, x) w``."""
    return generalized_on_element(v, w, n, 0, 0)


def generalized_on_element(v: StateVector, w: StateVector, n: int, r: int, s: int) -> StateVector:
    """``Res_x x^{-2n-2-r} (1+x)^{wt v + n + s} Y(v, x) w`` for ``r >= s >= 0``."""
    if s < 0 or r < s:
        raise ValueError(f"need r >= s >= 0, got r={r}, s={s}")
    eng = _engine(v, w)
    return StateVector(w.module, _res(eng, v.terms, w.terms,
                                      lambda N: -2 * n - 2 - r, lambda N: N + n + s))


def _star_left(eng, u: Mapping, v: Mapping, n: int) -> dict:
    out: dict = {}
    for m in range(n + 1):
        c = binom(-n - 1, m)
        axpy(out, c, _res(eng, u, v, lambda N: -n - m - 1, lambda N: N + n))
    return out


def _star_right(eng, w: Mapping, v: Mapping, n: int) -> dict:
    out: dict = {}
    for m in range(n + 1):
        c = binom(-n - 1, m) * (-1 if (n - m) % 2 else 1)
        axpy(out, c, _res(eng, v, w, lambda N: -n - m - 1, lambda N: N + m - 1))
    return out


def star_n(u: StateVector, v: StateVector, n: int) -> StateVector:
    """Left product ``u *_n v`` (v in V or in a module)."""
    eng = _engine(u, v)
    return StateVector(v.module, _star_left(eng, u.terms, v.terms, n))


def star_n_right(w: StateVector, v: StateVector, n: int) -> StateVector:
    """Right action ``w *_n v`` of a VOA element v on a module element w."""
    eng = _engine(v, w)
    return StateVector(w.module, _star_right(eng, w.terms, v.terms, n))


def l_minus1_plus_l0(w: StateVector) -> StateVector:
    """``(L(-1) + L(0)) w`` in the VOA or in a module."""
    from .voa import L_act
    return L_act(-1, w) + L_act(0, w)


def zhu_commutator_residue(v: StateVector, w: StateVector) -> StateVector:
    """``Res_x (1+x)^{wt v - 1} Y(v, x) w``."""
    eng = _engine(v, w)
    return StateVector(w.module, _res(eng, v.terms, w.terms, lambda N: 0, lambda N: N - 1))


# -- spans --------------------------------------------------------------------

def basis_key(p: tuple):
    """Higher levels first; within a level, larger parts first.

    Pivots are taken at the smallest key, so quotient representatives are
    the lowest-weight states with the most (and smallest) generator factors.
    """
    return (-level(p), tuple(-x for x in p))


@dataclass
class Verdict:
    """Outcome of a one-sided congruence test."""

    congruent: bool
    cutoff: int
    status: str = ""

    def __post_init__(self):
        self.status = "congruent" if self.congruent else "inconclusive-at-cutoff"

    def __bool__(self):
        return self.congruent


class AnContext:
    """A spanning set of O_n(V), O'_n(W) or O_n(W) inside weights ``<= D``."""

    def __init__(self, V: VOA, n: int, D: int, variant: str = VARIANT_V,
                 W: ModuleRealization | None = None, slack: int = 4):
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}")
        if n < 0 or D < 0:
            raise ValueError("n and D must be nonnegative")
        if variant == VARIANT_V:
            W = V
        elif W is None:
            raise ValueError("module variants need a module W")
        if not V.compatible(W):
            raise IncompatibleRealizationError(f"{V.describe()} cannot act on {W.describe()}")
        self.V, self.W, self.n, self.D, self.variant, self.slack = V, W, n, D, variant, slack
        self.span = SpanHandle(order=basis_key, track=False)
        self.generators = 0
        self._build()

    @property
    def module(self) -> ModuleRealization:
        return self.W

    def _build(self):
        V, W, n, D = self.V, self.W, self.n, self.D
        eng = V.engine(W)
        add = self.span.add
        omega = V.omega().terms
        # (L(-1) + L(0)) w: one step up in level
        if self.variant in (VARIANT_V, VARIANT_W):
            for lw in range(D):
                for wp in W.basis(lw):
                    vec = eng.act(omega, 0, {wp: ONE})
                    axpy(vec, W.weight(wp), {wp: ONE})
                    add(vec)
                    self.generators += 1
        # generalized o_n elements, lowest top-weight first
        for top in range(2 * n + 2, D + 1):
            for lv in range(1, top - 2 * n):
                for lw in range(0, top - 2 * n - 1 - lv + 1):
                    r = top - (lv + lw + 2 * n + 1)
                    if r < 0 or r > self.slack:
                        continue
                    for vp in V.basis(lv):
                        for wp in W.basis(lw):
                            for s in range(r + 1):
                                vec = _res_basis(eng, vp, wp, -2 * n - 2 - r, lv + n + s)
                                if vec:
                                    add(vec)
                                self.generators += 1

    # reductions -----------------------------------------------------------
    def _check_support(self, vec: Mapping):
        if vec:
            top = max(level(p) for p in vec)
            if top > self.D:
                raise CutoffInsufficientError(
                    f"vector reaches level {top} above the cutoff {self.D}", top)

    def normal_form(self, x) -> dict:
        vec = x.terms if isinstance(x, StateVector) else x
        self._check_support(vec)
        return self.span.normal_form(vec)

    def reduce(self, x: StateVector) -> StateVector:
        return StateVector(self.W, self.normal_form(x))

    def contains(self, x) -> bool:
        vec = x.terms if isinstance(x, StateVector) else x
        self._check_support(vec)
        return self.span.contains(vec)

    def representatives(self) -> list[tuple]:
        return [p for p in self.W.basis_upto(self.D) if p not in self.span.rows]

    def __repr__(self):
        return (f"AnContext({self.variant}, {self.V.describe()} on {self.W.describe()}, "
                f"n={self.n}, D={self.D}, rank={self.span.rank})")


_CONTEXTS: dict = {}


def build_on_span(V: VOA, n: int, D: int, variant: str = VARIANT_V,
                  W: ModuleRealization | None = None, slack: int = 4) -> AnContext:
    """Cached :class:`AnContext` for the given data."""
    key = (id(V), id(W) if W is not None else None, n, D, variant, slack)
    ctx = _CONTEXTS.get(key)
    if ctx is None or ctx.V is not V or (W is not None and ctx.W is not W):
        ctx = _CONTEXTS[key] = AnContext(V, n, D, variant, W, slack)
    return ctx


def congruent_mod_On(x: StateVector, y: StateVector, ctx: AnContext,
                     max_cutoff: int | None = None) -> Verdict:
    """One-sided test of ``x = y mod O_n``.

    A failed membership is retried at cutoffs ``D+2, D+4, ...`` up to
    ``max_cutoff``; the verdict never claims non-congruence.
    """
    diff = (x - y).terms
    ctx._check_support(diff)
    cur = ctx
    limit = ctx.D if max_cutoff is None else max_cutoff
    while True:
        if cur.span.contains(diff):
            return Verdict(True, cur.D)
        if cur.D + 2 > limit:
            return Verdict(False, cur.D)
        cur = build_on_span(cur.V, cur.n, cur.D + 2, cur.variant,
                            None if cur.variant == VARIANT_V else cur.W, cur.slack)


def congruent_auto(x: StateVector, y: StateVector, V: VOA, n: int, variant: str = VARIANT_V,
                   W: ModuleRealization | None = None, extra: int = 6) -> Verdict:
    """Congruence starting at the smallest cutoff covering ``x - y``."""
    diff = (x - y).terms
    top = max((level(p) for p in diff), default=0)
    ctx = build_on_span(V, n, max(top, 2 * n + 2), variant, W)
    return congruent_mod_On(x, y, ctx, max_cutoff=ctx.D + extra)


# -- quotient tables ----------------------------------------------------------

@dataclass
class AnAlgebraTable:
    """Representatives and structure constants of ``A_n(V)`` at a cutoff."""

    ctx: AnContext
    reps: list
    products: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)
    theta: dict = field(default_factory=dict)
    identity: int = 0
    omega: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.ctx.n

    @property
    def D(self) -> int:
        return self.ctx.D

    @property
    def V(self) -> VOA:
        return self.ctx.V

    def rep_state(self, i: int) -> StateVector:
        return StateVector(self.V, {self.reps[i]: ONE})

    def rep_levels(self) -> list[int]:
        return [level(p) for p in self.reps]

    def filtration_dims(self, top: int | None = None) -> list[int]:
        top = self.D if top is None else top
        levs = self.rep_levels()
        return [sum(1 for x in levs if x <= k) for k in range(top + 1)]

    def coords(self, x) -> dict:
        """Coordinates of the class of ``x`` on the representatives."""
        nf = self.ctx.normal_form(x)
        index = self._index
        return {index[p]: c for p, c in nf.items()}

    def state(self, coords: Mapping) -> StateVector:
        return StateVector(self.V, {self.reps[i]: c for i, c in coords.items()})

    def product(self, i: int, j: int) -> dict:
        if (i, j) in self.flags:
            raise CutoffInsufficientError(
                f"product of representatives {i} and {j}", self.flags[(i, j)])
        return self.products[(i, j)]

    def multiply(self, x: Mapping, y: Mapping) -> dict:
        out: dict = {}
        for i, a in x.items():
            for j, b in y.items():
                axpy(out, a * b, self.product(i, j))
        return out

    def apply_theta(self, x: Mapping) -> dict:
        out: dict = {}
        for i, a in x.items():
            axpy(out, a, self.theta[i])
        return out

    def __post_init__(self):
        self._index = {p: i for i, p in enumerate(self.reps)}


def an_table(V: VOA, n: int, D: int, slack: int = 4, product_cutoff: int | None = None) -> AnAlgebraTable:
    """Quotient table of ``A_n(V)`` from the span at cutoff ``D``.

    Products of representatives of weights ``a`` and ``b`` are reduced when
    ``a + b + 2n <= D``; other pairs are flagged with the cutoff they need.
    ``product_cutoff`` limits the representative weight entering products.
    """
    ctx = build_on_span(V, n, D, VARIANT_V, slack=slack)
    reps = sorted(ctx.representatives(), key=lambda p: (level(p), p))
    table = AnAlgebraTable(ctx, reps)
    eng = V.engine()
    idx = table._index
    for i, p in enumerate(reps):
        for j, q in enumerate(reps):
            need = level(p) + level(q) + 2 * n
            if product_cutoff is not None and max(level(p), level(q)) > product_cutoff:
                continue
            if need > D:
                table.flags[(i, j)] = need
                continue
            prod = _star_left(eng, {p: ONE}, {q: ONE}, n)
            nf = ctx.span.normal_form(prod)
            table.products[(i, j)] = {idx[r]: c for r, c in nf.items()}
        th = theta_apply(StateVector(V, {p: ONE}))
        table.theta[i] = table.coords(th)
    table.identity = idx[()]
    table.omega = table.coords(V.omega())
    return table


def psi_n_reduce(x, table_hi: AnAlgebraTable, table_lo: AnAlgebraTable) -> dict:
    """Image under ``A_{n+1}(V) -> A_n(V)`` of a class of ``table_hi``.

    ``x`` is a coordinate dict of ``table_hi`` or a VOA state.
    """
    if table_hi.V is not table_lo.V or table_hi.n != table_lo.n + 1:
        raise ValueError("tables must be A_{n+1}(V) and A_n(V) over the same VOA")
    state = table_hi.state(x) if isinstance(x, Mapping) else x
    top = max(state.levels(), default=0)
    if top > table_lo.D:
        raise CutoffInsufficientError("cutoff mismatch between the two tables", top)
    return table_lo.coords(state)


def bimodule_act(a: StateVector, w: StateVector, side: str, n: int, ctx: AnContext) -> StateVector:
    """Class representative of ``a *_n w`` (left) or ``w *_n a`` (right) modulo ctx."""
    if ctx.n != n or w.module is not ctx.W:
        raise ValueError("context does not match n or the module of w")
    if side == "left":
        res = star_n(a, w, n)
    elif side == "right":
        res = star_n_right(w, a, n)
    else:
        raise ValueError("side must be 'left' or 'right'")
    return ctx.reduce(res)


# -- finite-dimensional A_n(V)-modules ----------------------------------------

class InconsistentModuleError(ValueError):
    """Generator matrices do not define an A_n(V)-module at this cutoff."""


def mat_identity(d: int) -> tuple:
    return tuple(tuple(ONE if i == j else ZERO for j in range(d)) for i in range(d))


def mat_mul(a: tuple, b: tuple) -> tuple:
    d = len(a)
    return tuple(tuple(sum((a[i][k] * b[k][j] for k in range(d)), ZERO) for j in range(d))
                 for i in range(d))


def mat_add(a: tuple, b: tuple, c=ONE) -> tuple:
    return tuple(tuple(x + c * y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_vec(a: tuple, u: tuple) -> tuple:
    return tuple(sum((x * y for x, y in zip(row, u)), ZERO) for row in a)


def as_matrix(m, d: int | None = None) -> tuple:
    """Coerce a scalar (for d = 1 or a multiple of the identity) or nested rows."""
    if isinstance(m, (list, tuple)):
        return tuple(tuple(Q(x) for x in row) for row in m)
    if d is None:
        d = 1
    s = Q(m)
    return tuple(tuple(s if i == j else ZERO for j in range(d)) for i in range(d))


class AnModule:
    """A finite-dimensional left ``A_n(V)``-module given on generators.

    ``generators`` pairs VOA states with their action matrices.  The action
    on every table representative up to ``level_limit`` is derived from
    products of generators (words), and every linear dependency among words
    is checked against the matrices.
    """

    def __init__(self, V: VOA, n: int, dim: int, generators, cutoff: int | None = None,
                 level_limit: int | None = None):
        self.V, self.n, self.dim = V, n, dim
        self.generators = [(g, as_matrix(m, dim)) for g, m in generators]
        top_gen = max((max(g.levels(), default=0) for g, _ in self.generators), default=0)
        if level_limit is None:
            level_limit = 8
        self.level_limit = level_limit
        self.cutoff = cutoff if cutoff is not None else level_limit + top_gen + 2 * n
        self.ctx = build_on_span(V, n, self.cutoff, VARIANT_V)
        self._rho: dict = {}
        if dim:
            self._derive()

    def _derive(self):
        ctx, n, d = self.ctx, self.n, self.dim
        eng = self.V.engine()
        words = SpanHandle(order=basis_key, track=True)
        mats: list = []
        one = ctx.span.normal_form({(): ONE})
        queue = [(one, mat_identity(d))]
        words.add(one)
        mats.append(mat_identity(d))
        while queue:
            vec, mat = queue.pop(0)
            top = max((level(p) for p in vec), default=0)
            for g, gm in self.generators:
                gtop = max(g.levels(), default=0)
                if top + gtop + 2 * n > ctx.D:
                    continue
                prod = ctx.span.normal_form(_star_left(eng, g.terms, vec, n))
                new_mat = mat_mul(gm, mat)
                member = words.contains(prod)
                if not member:
                    words.add(prod)
                    mats.append(new_mat)
                    queue.append((prod, new_mat))
                    continue
                from .linalg import in_span
                coeffs = in_span(prod, words).coefficients
                expect = _combine(coeffs, mats, d)
                if expect != new_mat:
                    raise InconsistentModuleError(
                        f"the relation among words at level {top + gtop} is violated by the matrices")
        self._words, self._mats = words, mats

    def rho_rep(self, rep: tuple) -> tuple:
        """Action matrix of the class of the representative ``rep``."""
        hit = self._rho.get(rep)
        if hit is not None:
            return hit
        if level(rep) > self.level_limit:
            raise CutoffInsufficientError("representative above the module's level limit", level(rep))
        from .linalg import in_span
        mem = in_span({rep: ONE}, self._words)
        if not mem:
            raise InconsistentModuleError(
                f"representative {rep} is not reached by generator words at cutoff {self.ctx.D}")
        mat = _combine(mem.coefficients, self._mats, self.dim)
        self._rho[rep] = mat
        return mat

    def rho(self, x: StateVector) -> tuple:
        """Action matrix of the class of a VOA state."""
        nf = self.ctx.normal_form(x)
        out = tuple(tuple(ZERO for _ in range(self.dim)) for _ in range(self.dim))
        for p, c in nf.items():
            out = mat_add(out, self.rho_rep(p), c)
        return out

    def lowest_weight(self):
        """Scalar by which ``[omega]`` acts, or ``None`` when it is not scalar."""
        m = self.rho(self.V.omega())
        h = m[0][0] if self.dim else ZERO
        if m != as_matrix(h, self.dim):
            return None
        return h


def _combine(coeffs: Mapping, mats: list, d: int) -> tuple:
    out = tuple(tuple(ZERO for _ in range(d)) for _ in range(d))
    for i, c in coeffs.items():
        out = mat_add(out, mats[i], c)
    return out
