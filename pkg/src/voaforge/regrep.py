"""Functionals on a module W, the two commuting actions Y^L and Y^R on them,
their deformations, Omega_n subspaces and induced modules.

The pole point z is fixed to -1.  For a functional f and homogeneous v the
matrix coefficient ``f Y^o(v, x) w`` is a rational function

    R(x) = g(x) / (x^l (x + 1)^k),   l = wt v + N_R,  k = wt v + N_L,

where ``(N_L, N_R)`` is the functional's certificate: f lies in
Omega_{N_L} for Y^L and in Omega_{N_R} for Y^R.  ``R`` is recovered
exactly from finitely many coefficients, and

    Y^R(v, x) f (w) = iota_0 R(x),      Y^L(v, x) f (w) = iota_0 R(x - 1).

Mode images update the certificate by the shift law
``u_r Omega_N in Omega_{N + max(0, wt u - r - 1)}`` on the acting side.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .anv import (AnContext, AnModule, CutoffInsufficientError, VARIANT_PRIME, _star_left,
                  _star_right, build_on_span, mat_vec)
from .formal import (AT_INFINITY, ReconstructionError, RationalFunctionWithPoles, SeriesWindow,
                     iota_zero, rational_from_upper_expansion, shift_substitute)
from .linalg import ONE, ZERO, Q, SpanHandle, axpy, binom, factorial, kernel_basis
from .voa import VOA, ModuleRealization, StateVector, level, theta_apply

Z = Q(-1)
LEFT, RIGHT = "L", "R"


class CertificateError(ValueError):
    """A functional does not satisfy the pole bound it claims."""


class NotCertifiedError(ValueError):
    """The operation needs a certified functional."""


class AnnihilationError(ValueError):
    """A functional does not vanish on a spanning element of O'_n(W)."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class NilpotencyError(ValueError):
    """L(1) failed to vanish within the horizon the certificate predicts."""


# -- U-valued vectors ---------------------------------------------------------

def uzero(d: int) -> tuple:
    return (ZERO,) * d


def uadd(a: tuple, b: tuple, c=ONE) -> tuple:
    return tuple(x + c * y for x, y in zip(a, b))


def uscale(c, a: tuple) -> tuple:
    return tuple(c * x for x in a)


def unit(d: int, i: int) -> tuple:
    return tuple(ONE if j == i else ZERO for j in range(d))


# -- Y^o coefficients -----------------------------------------------------------

class _OppositeTable:
    """Cached coefficients of ``Y^o(v, x) w`` for basis vectors v of V."""

    def __init__(self, V: VOA, W: ModuleRealization):
        self.V, self.W = V, W
        self.eng = V.engine(W)
        self.eng_v = V.engine()
        self._powers: dict = {}
        self._coef: dict = {}

    def l1_powers(self, vp: tuple) -> list:
        hit = self._powers.get(vp)
        if hit is None:
            omega = self.V.omega().terms
            hit = []
            cur = {vp: ONE}
            i = 0
            while cur:
                hit.append((i, cur))
                cur = self.eng_v.act(omega, 2, cur)
                i += 1
            self._powers[vp] = hit
        return hit

    def coeff(self, vp: tuple, P: int, wp: tuple) -> dict:
        """Coefficient of x^P in ``Y^o(v, x) w``."""
        key = (vp, P, wp)
        hit = self._coef.get(key)
        if hit is not None:
            return hit
        N = level(vp)
        sign = -ONE if N % 2 else ONE
        out: dict = {}
        for i, li in self.l1_powers(vp):
            m = P - 1 - i + 2 * N
            r = self.eng.act(li, m, {wp: ONE})
            if r:
                axpy(out, sign / factorial(i), r)
        self._coef[key] = out
        return out


_OPP: dict = {}


def opposite_table(V: VOA, W: ModuleRealization) -> _OppositeTable:
    key = (id(V), id(W))
    t = _OPP.get(key)
    if t is None or t.V is not V or t.W is not W:
        t = _OPP[key] = _OppositeTable(V, W)
    return t


# -- functionals ----------------------------------------------------------------

class Functional:
    """A U-valued linear functional on W, evaluated on basis vectors.

    Plain functionals carry no certificate; :class:`CertifiedFunctional`
    subclasses do.
    """

    cert: tuple | None = None

    def __init__(self, V: VOA, W: ModuleRealization, dim: int, label: str = ""):
        self.V, self.W, self.dim, self.label = V, W, dim, label
        self._values: dict = {}

    def _compute(self, part: tuple) -> tuple:
        raise NotImplementedError

    def value(self, part: tuple) -> tuple:
        hit = self._values.get(part)
        if hit is None:
            hit = self._values[part] = self._compute(part)
        return hit

    def __call__(self, x) -> tuple:
        vec = x.terms if isinstance(x, StateVector) else x
        out = uzero(self.dim)
        for p, c in vec.items():
            val = self.value(p)
            if any(val):
                out = uadd(out, val, c)
        return out

    @property
    def support(self) -> int | None:
        return None

    def __repr__(self):
        return f"{type(self).__name__}({self.label or '?'}, cert={self.cert})"


class FiniteFunctional(Functional):
    """Functional with finitely many nonzero values (zero above ``support``)."""

    def __init__(self, V: VOA, W: ModuleRealization, dim: int, table: Mapping, label: str = ""):
        super().__init__(V, W, dim, label)
        self.table = {tuple(p): tuple(Q(x) for x in u) for p, u in table.items() if any(u)}
        for p, u in self.table.items():
            if len(u) != dim:
                raise ValueError(f"value at {p} has the wrong dimension")
            if not W.valid(p):
                raise ValueError(f"{p} is not a basis vector of {W.describe()}")

    @property
    def support(self) -> int:
        return max((level(p) for p in self.table), default=0)

    def _compute(self, part):
        return self.table.get(part, uzero(self.dim))

    def certified(self) -> "CertifiedTable":
        """Certificate from the finite support alone: ``(0, support)``."""
        return CertifiedTable(self, (0, self.support))


def dual_basis_functional(W: ModuleRealization, V: VOA, part: tuple = (), dim: int = 1, slot: int = 0) -> FiniteFunctional:
    """The functional picking the coefficient of one basis vector."""
    return FiniteFunctional(V, W, dim, {tuple(part): unit(dim, slot)}, label=f"dual{tuple(part)}")


def random_finite_functional(V: VOA, W: ModuleRealization, support: int, rng: random.Random,
                             dim: int = 1, height: int = 9, min_level: int = 0) -> FiniteFunctional:
    from .linalg import random_rational
    table = {}
    for lev in range(min_level, support + 1):
        for p in W.basis(lev):
            table[p] = tuple(random_rational(rng, height, nonzero=False) for _ in range(dim))
    return FiniteFunctional(V, W, dim, table, label=f"random<= {support}")


class CertifiedFunctional(Functional):
    """A functional with a pole certificate ``(N_L, N_R)``."""

    def __init__(self, V, W, dim, cert: tuple, label: str = ""):
        super().__init__(V, W, dim, label)
        self.cert = (int(cert[0]), int(cert[1]))
        self._mc: dict = {}

    @property
    def n(self) -> int:
        return max(self.cert)


class CertifiedTable(CertifiedFunctional):
    def __init__(self, base: FiniteFunctional, cert: tuple, label: str = ""):
        super().__init__(base.V, base.W, base.dim, cert, label or base.label)
        self.base = base

    @property
    def support(self):
        return self.base.support

    def _compute(self, part):
        return self.base.value(part)


class QuotientFunctional(CertifiedFunctional):
    """``w -> phi(normal form of w mod a span)``; evaluation limited to ``limit``."""

    def __init__(self, V, W, dim, ctx: AnContext, phi: Callable[[tuple], tuple], cert: tuple,
                 limit: int | None = None, label: str = ""):
        super().__init__(V, W, dim, cert, label)
        self.ctx, self.phi = ctx, phi
        self.limit = ctx.D if limit is None else limit

    def _compute(self, part):
        if level(part) > self.limit:
            raise CutoffInsufficientError(f"{self.label}: evaluation at level {level(part)}", level(part))
        nf = self.ctx.span.normal_form({part: ONE})
        out = uzero(self.dim)
        for p, c in nf.items():
            out = uadd(out, self.phi(p), c)
        return out


def random_hom_anw(V: VOA, W: ModuleRealization, n: int, D: int, rng: random.Random,
                   rep_level: int | None = None, dim: int = 1, height: int = 9) -> QuotientFunctional:
    """A random element of Hom(A'_n(W), U): random values on the O'_n(W)
    representatives of level ``<= rep_level``, composed with the normal form."""
    from .linalg import random_rational
    ctx = build_on_span(V, n, D, VARIANT_PRIME, W)
    rep_level = n + 1 if rep_level is None else rep_level
    vals = {p: tuple(random_rational(rng, height, nonzero=False) for _ in range(dim))
            for p in ctx.representatives() if level(p) <= rep_level}
    zero = uzero(dim)
    return QuotientFunctional(V, W, dim, ctx, lambda p: vals.get(p, zero), (n, n), D,
                              f"hom(A'_{n}) reps<={rep_level}")


class Combination(CertifiedFunctional):
    """Finite linear combination of certified functionals."""

    def __init__(self, terms: Sequence[tuple], label: str = ""):
        terms = [(Q(c), f) for c, f in terms if c]
        if not terms:
            raise ValueError("empty combination; use a zero functional")
        f0 = terms[0][1]
        cert = (max(f.cert[0] for _, f in terms), max(f.cert[1] for _, f in terms))
        super().__init__(f0.V, f0.W, f0.dim, cert, label)
        self.terms = terms

    def _compute(self, part):
        out = uzero(self.dim)
        for c, f in self.terms:
            out = uadd(out, f.value(part), c)
        return out


def zero_functional(V, W, dim) -> CertifiedTable:
    return FiniteFunctional(V, W, dim, {}, "zero").certified()


def _require_certified(f):
    if not isinstance(f, CertifiedFunctional):
        raise NotCertifiedError("this operation needs a certified functional")


# -- matrix coefficients ----------------------------------------------------------

SLACK = 2


def opposite_series(f: Functional, vp: tuple, wp: tuple, lo: int) -> SeriesWindow | list:
    """Upper expansion ``f Y^o(v, x) w`` on powers ``[lo, level(w) - wt v]``, per coordinate."""
    table = opposite_table(f.V, f.W)
    top = level(wp) - level(vp)
    lo = min(lo, top)
    vals = {P: f(table.coeff(vp, P, wp)) for P in range(lo, top + 1)}
    return [SeriesWindow(AT_INFINITY, lo, top, {P: vals[P][i] for P in vals})
            for i in range(f.dim)]


def _mc_basis(f: CertifiedFunctional, vp: tuple, wp: tuple) -> list:
    key = (vp, wp)
    hit = f._mc.get(key)
    if hit is not None:
        return hit
    N = level(vp)
    nl, nr = f.cert
    l, k = max(N + nr, 0), max(N + nl, 0)
    top = level(wp) - N
    series = opposite_series(f, vp, wp, -l - k - SLACK)
    out = []
    for s in series:
        bound = top + l + k
        if bound < 0:
            if any(s.coeffs.values()):
                raise CertificateError(f"{f!r}: nonzero coefficients where the certificate forces zero")
            out.append(RationalFunctionWithPoles((), 0, 0, Z))
            continue
        try:
            out.append(rational_from_upper_expansion(s, l, k, Z, bound))
        except ReconstructionError as exc:
            raise CertificateError(f"{f!r} violates its certificate for v={vp}, w={wp}: {exc}") from None
    f._mc[key] = out
    return out


def matrix_coeff_rational(f: CertifiedFunctional, v: StateVector, w: StateVector, coord: int = 0) -> RationalFunctionWithPoles:
    """``iota_infty^{-1} <u*, f Y^o(v, x) w>`` for homogeneous v."""
    _require_certified(f)
    if not v.is_homogeneous:
        raise ValueError("v must be homogeneous")
    total = RationalFunctionWithPoles((), 0, 0, Z)
    for vp, vc in v.terms.items():
        for wp, wc in w.terms.items():
            total = total + _mc_basis(f, vp, wp)[coord].scale(vc * wc)
    return total


def _coeff_at(R: RationalFunctionWithPoles, p: int):
    if p < -R.l or R.is_zero():
        return ZERO
    return iota_zero(R, (p, p))[p]


def _shifted(R: RationalFunctionWithPoles) -> RationalFunctionWithPoles:
    return shift_substitute(R, Z)


def _mode_basis(side: str, f: Functional, vp: tuple, m: int, wp: tuple) -> tuple:
    """Coefficient of x^{-m-1} in ``Y^side(v, x) f`` at w, for basis v and w."""
    if side == RIGHT and not isinstance(f, CertifiedFunctional):
        if f.support is None:
            raise NotCertifiedError("a plain functional must have finite support")
        # f Y^o(v, x) w is a Laurent polynomial; iota_0 leaves it unchanged
        table = opposite_table(f.V, f.W)
        return f(table.coeff(vp, -m - 1, wp))
    _require_certified(f)
    Rs = _mc_basis(f, vp, wp)
    p = -m - 1
    if side == RIGHT:
        return tuple(_coeff_at(R, p) for R in Rs)
    if side == LEFT:
        return tuple(_coeff_at(_shifted(R), p) for R in Rs)
    raise ValueError("side must be 'L' or 'R'")


def mode_eval(side: str, v: StateVector, m: int, f: Functional, w) -> tuple:
    vec = w.terms if isinstance(w, StateVector) else w
    out = uzero(f.dim)
    for vp, vc in v.terms.items():
        for wp, wc in vec.items():
            out = uadd(out, _mode_basis(side, f, vp, m, wp), vc * wc)
    return out


def yr_mode_eval(v: StateVector, m: int, f: Functional, w) -> tuple:
    """``(v^R_m f)(w)``, the x^{-m-1} coefficient of ``Y^R(v, x) f`` at w."""
    return mode_eval(RIGHT, v, m, f, w)


def yl_mode_eval(v: StateVector, m: int, f: CertifiedFunctional, w) -> tuple:
    """``(v^L_m f)(w)``; needs a certified functional."""
    _require_certified(f)
    return mode_eval(LEFT, v, m, f, w)


def mode_vector(side: str, V: VOA, W: ModuleRealization, vp: tuple, m: int, cert: tuple, wp: tuple) -> dict:
    """A vector ``B w`` with ``(v^side_m f)(w) = f(B w)`` for every f certified by ``cert``.

    With T = (1+x)^k S a Laurent polynomial supported on powers >= -l,
    ``iota_0 R = iota_0 (1+x)^{-k} T`` and ``iota_0 R(x-1) = x^{-k} T(x-1)``.
    No reconstruction takes place, so the certificate is trusted, not checked.
    """
    table = opposite_table(V, W)
    N = level(vp)
    nl, nr = cert
    l, k = max(N + nr, 0), max(N + nl, 0)
    p = -m - 1
    top = level(wp) - N

    def T(t):
        out: dict = {}
        for i in range(k + 1):
            if t - i <= top:
                axpy(out, binom(k, i), table.coeff(vp, t - i, wp))
        return out

    out: dict = {}
    if side == RIGHT:
        for t in range(-l, min(p, top + k) + 1):
            c = binom(-k, p - t)
            if c:
                axpy(out, c, T(t))
    elif side == LEFT:
        if p + k < 0:
            return out
        for t in range(-l, top + k + 1):
            c = binom(t, p + k)
            if c:
                axpy(out, -c if (t + p + k) % 2 else c, T(t))
    else:
        raise ValueError("side must be 'L' or 'R'")
    return {q: c for q, c in out.items() if c}


def _shift(v: StateVector, r: int) -> int:
    return max(0, max((level(p) for p in v.terms), default=0) - r - 1)


class ModeImage(CertifiedFunctional):
    """``v^side_r f`` as a functional."""

    def __init__(self, side: str, v: StateVector, r: int, base: CertifiedFunctional):
        _require_certified(base)
        nl, nr = base.cert
        s = _shift(v, r)
        cert = (nl + s, nr) if side == LEFT else (nl, nr + s)
        super().__init__(base.V, base.W, base.dim, cert, f"{v!r}^{side}_{r}({base.label})")
        self.side, self.v, self.r, self.base = side, v, r, base

    def _compute(self, part):
        vec: dict = {}
        for vp, vc in self.v.terms.items():
            if vp == () and self.r == -1:
                # the vacuum acts as the identity
                axpy(vec, vc, {part: ONE})
                continue
            axpy(vec, vc, mode_vector(self.side, self.V, self.W, vp, self.r, self.base.cert, part))
        return self.base(vec)


def mode_image(side: str, v: StateVector, r: int, f: CertifiedFunctional) -> ModeImage:
    return ModeImage(side, v, r, f)


# -- the three-term identity ----------------------------------------------------

@dataclass
class WindowVerdict:
    ok: bool
    checked: int = 0
    mismatches: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def jacobi_window_check(v: StateVector, f: CertifiedFunctional, w: StateVector,
                        p_window: tuple[int, int] = (-4, 4), q_window: tuple[int, int] = (-4, 4)) -> WindowVerdict:
    """Compare the three terms of the delta-function identity after taking
    ``Res_{x0} x0^p`` and the coefficient of ``x^q``.

    With S = f Y^o(v, x) w, Y^R and Y^L coefficient sequences, the identity reads

        [x^q] ((x+1)^p S) - [x^q] ((1+x)^p Y^R) = sum_i binom(q+i, i) (-1)^i (-1)^{-q-i-1} c_{-p-i-1}

    where c_j is the x0^j coefficient of Y^L(v, x0) f (w).
    """
    _require_certified(f)
    verdict = WindowVerdict(True)
    nl, nr = f.cert
    for vp, vc in v.terms.items():
        N = level(vp)
        l, k = max(N + nr, 0), max(N + nl, 0)
        for wp, wc in w.terms.items():
            top = level(wp) - N
            lo_needed = min(q_window[0] - p_window[1], -l - k) - SLACK
            series = opposite_series(f, vp, wp, lo_needed)
            Rs = _mc_basis(f, vp, wp)
            for coord, (S, R) in enumerate(zip(series, Rs)):
                Rl = _shifted(R)
                for p in range(p_window[0], p_window[1] + 1):
                    for q in range(q_window[0], q_window[1] + 1):
                        # (x - z)^p S, descending: sum_i binom(p, i) (-z)^i S_{q-p+i}
                        t1 = ZERO
                        for i in range(0, top - (q - p) + 1):
                            t1 += binom(p, i) * (-Z) ** i * S[q - p + i]
                        # (-z + x)^p Y^R, ascending: sum_i binom(p, i) (-z)^{p-i} YR_{q-i}
                        t2 = ZERO
                        for i in range(0, q + R.l + 1):
                            t2 += binom(p, i) * (-Z) ** (p - i) * _coeff_at(R, q - i)
                        rhs = ZERO
                        for i in range(0, k - p):
                            rhs += binom(q + i, i) * (-1) ** i * Z ** (-q - i - 1) * _coeff_at(Rl, -p - i - 1)
                        verdict.checked += 1
                        if (t1 - t2) * vc * wc != rhs * vc * wc:
                            verdict.ok = False
                            verdict.mismatches.append((vp, wp, coord, p, q, t1 - t2, rhs))
    return verdict


# -- O'_n(W) annihilation and certification --------------------------------------

def echarcter_window_test(f: Functional, n: int, vs: Iterable[StateVector], ws: Iterable[StateVector]) -> WindowVerdict:
    """Check that ``x^{wt v+n} (x+1)^{wt v+n} f Y^o(v, x) w`` is a polynomial."""
    probe = f if isinstance(f, CertifiedFunctional) else CertifiedTable(f, (n, n))
    if probe.cert != (n, n):
        probe = _Recertified(f, (n, n))
    verdict = WindowVerdict(True)
    for v in vs:
        for vp in v.terms:
            for w in ws:
                for wp in w.terms:
                    verdict.checked += 1
                    try:
                        _mc_basis(probe, vp, wp)
                    except CertificateError as exc:
                        verdict.ok = False
                        verdict.mismatches.append((vp, wp, str(exc)))
    return verdict


class _Recertified(CertifiedFunctional):
    """Same values, different claimed certificate (used for window probes)."""

    def __init__(self, base: Functional, cert):
        super().__init__(base.V, base.W, base.dim, cert, f"probe({base.label})")
        self.base = base

    def _compute(self, part):
        return self.base.value(part)


def certify_hom_anw(alpha: FiniteFunctional, n: int, D: int | None = None, vmax: int = 3,
                    wlevel: int = 2) -> CertifiedTable:
    """Certify ``alpha`` as an element of Hom(A'_n(W), U).

    The functional must vanish on every spanning element of O'_n(W) at
    cutoff D (default: support + 2n + 3), and the characterization window
    test must pass for generator-type samples.
    """
    V, W = alpha.V, alpha.W
    D = alpha.support + 2 * n + 3 if D is None else D
    eng = V.engine(W)
    from .anv import _res_basis
    for top in range(2 * n + 2, D + 1):
        for lv in range(1, top - 2 * n):
            lw = top - 2 * n - 1 - lv
            if lw < 0:
                continue
            for vp in V.basis(lv):
                for wp in W.basis(lw):
                    vec = _res_basis(eng, vp, wp, -2 * n - 2, lv + n)
                    if any(alpha(vec)):
                        raise AnnihilationError(
                            f"alpha does not vanish on v o_{n} w for v={vp}, w={wp}",
                            witness=(StateVector(V, {vp: ONE}), StateVector(W, {wp: ONE})))
    vs = [StateVector(V, {p: ONE}) for lv in range(0, vmax + 1) for p in V.basis(lv)]
    ws = [StateVector(W, {p: ONE}) for lw in range(0, wlevel + 1) for p in W.basis(lw)]
    verdict = echarcter_window_test(alpha, n, vs, ws)
    if not verdict:
        raise CertificateError(f"characterization window test failed: {verdict.mismatches[0]}")
    cert = (min(n, 0), min(n, alpha.support))
    return CertifiedTable(alpha, cert, f"certified({alpha.label}, n={n})")


# -- deformations -----------------------------------------------------------------

def _l1_terms(v: StateVector) -> list:
    """``[(i, L(1)^i v)]`` per homogeneous component."""
    table = opposite_table(v.module, v.module)
    out = []
    for vp, vc in v.terms.items():
        for i, li in table.l1_powers(vp):
            out.append((i, level(vp), StateVector(v.module, {p: c * vc for p, c in li.items()})))
    return out


def deform_mode_eval(side: str, z0, v: StateVector, m: int, f: CertifiedFunctional, w) -> tuple:
    """``Res_x x^m Y^[z0](v, x) f`` at w, from the mode relation

        sum_{i,j} (-z0)^i / i! binom(2 wt v - m - 2 - i, j) (-z0)^j (L(1)^i v)_{m+j}.

    The j-sum stops where the certificate kills the modes.
    """
    _require_certified(f)
    z0 = Q(z0)
    N_side = f.cert[0] if side == LEFT else f.cert[1]
    out = uzero(f.dim)
    for i, N, li in _l1_terms(v):
        wt_li = N - i
        ci = (-z0) ** i / factorial(i)
        if not ci:
            continue
        jmax = max(wt_li + N_side - m - 1, 0)
        for j in range(jmax + 1):
            b = binom(2 * N - m - 2 - i, j) * (-z0) ** j
            if b:
                out = uadd(out, mode_eval(side, li, m + j, f, w), ci * b)
    return out


def deform_definition_eval(side: str, z0, v: StateVector, m: int, f: CertifiedFunctional, w) -> tuple:
    """``Res_x x^m Y(e^{-z0(1+z0 x)L(1)}(1+z0 x)^{-2L(0)} v, x/(1+z0 x)) f`` at w.

    Expands the substitution directly: the mode u_k contributes
    ``x^{-k-1} (1+z0 x)^{k+1}``, and only k >= m survives the residue.
    """
    _require_certified(f)
    z0 = Q(z0)
    N_side = f.cert[0] if side == LEFT else f.cert[1]
    out = uzero(f.dim)
    for i, N, li in _l1_terms(v):
        wt_li = N - i
        ci = (-z0) ** i / factorial(i)
        if not ci:
            continue
        for k in range(m, max(wt_li + N_side, m + 1)):
            e = i - 2 * N + k + 1
            b = binom(e, k - m) * z0 ** (k - m)
            if b:
                out = uadd(out, mode_eval(side, li, k, f, w), ci * b)
    return out


def exp_l1_functional(side: str, t, f: CertifiedFunctional, check: Iterable = ()) -> CertifiedFunctional:
    """``e^{t L^side(1)} f``; L(1)^{N+1} kills the side's Omega_N.

    States in ``check`` are used to confirm that the first omitted power vanishes.
    """
    t = Q(t)
    N_side = f.cert[0] if side == LEFT else f.cert[1]
    V = f.V
    omega = V.omega()
    terms = [(ONE, f)]
    cur = f
    for k in range(1, N_side + 1):
        cur = ModeImage(side, omega, 2, cur)
        terms.append((t ** k / factorial(k), cur))
    nxt = ModeImage(side, omega, 2, cur)
    for w in check:
        if any(nxt(w)):
            raise NilpotencyError(f"L^{side}(1)^{N_side + 1} does not vanish on {w!r}")
    if not t:
        return f
    return Combination(terms, f"exp({t} L^{side}(1)) {f.label}")


def deform_conjugation_eval(side: str, z0, v: StateVector, m: int, f: CertifiedFunctional, w) -> tuple:
    """``e^{-z0 L(1)} v_m e^{z0 L(1)} f`` at w, the conjugation route.

    Each L(1) layer is a nested mode image, so the cost grows quickly with
    the certificate; keep this to small certificates.
    """
    z0 = Q(z0)
    inner = exp_l1_functional(side, z0, f)
    img = Combination([(ONE, ModeImage(side, v, m, inner))]) if v.terms else zero_functional(f.V, f.W, f.dim)
    outer = exp_l1_functional(side, -z0, img)
    return outer(w.terms if isinstance(w, StateVector) else w)


def deform_round_trip_eval(side: str, z0, v: StateVector, m: int, f: CertifiedFunctional, w) -> tuple:
    """``Res_x x^m (Y^[z0])^[-z0](v, x) f`` at w, applying the mode relation twice."""
    z0 = Q(z0)
    N_side = f.cert[0] if side == LEFT else f.cert[1]
    out = uzero(f.dim)
    for i, N, li in _l1_terms(v):
        wt_li = N - i
        ci = z0 ** i / factorial(i)
        jmax = max(wt_li + N_side - m - 1, 0)
        for j in range(jmax + 1):
            b = binom(2 * N - m - 2 - i, j) * z0 ** j
            if b:
                out = uadd(out, deform_mode_eval(side, z0, li, m + j, f, w), ci * b)
    return out


def o_deformed_action(side: str, v: StateVector, f: CertifiedFunctional, w) -> tuple:
    """``o^[1]_L(v) f`` (side 'L') or ``o^[-1]_R(v) f`` (side 'R') at w.

    Uses ``Res_x x^{wt v - 1}`` of the deformed action, per homogeneous component.
    """
    _require_certified(f)
    z0 = ONE if side == LEFT else -ONE
    out = uzero(f.dim)
    for lev, comp in v.components().items():
        out = uadd(out, deform_mode_eval(side, z0, comp, lev - 1, f, w))
    return out


def o_undeformed(side: str, v: StateVector, f: CertifiedFunctional) -> CertifiedFunctional:
    """``v^side_{wt v - 1} f`` summed over homogeneous components."""
    terms = [(ONE, ModeImage(side, comp, lev - 1, f)) for lev, comp in v.components().items()]
    if not terms:
        return zero_functional(f.V, f.W, f.dim)
    return Combination(terms, f"o_{side}({v!r}) {f.label}")


# -- the dual bimodule action and sigma -----------------------------------------------

class BimoduleImage(CertifiedFunctional):
    """``w -> f(theta(a2) *_n (w *_n a1))``."""

    def __init__(self, f: Functional, a1: StateVector, a2: StateVector, n: int):
        super().__init__(f.V, f.W, f.dim, (n, n), f"({a1!r},{a2!r}){f.label}")
        self.f, self.n_ = f, n
        self.a1, self.t2 = a1, theta_apply(a2)
        self.eng = f.V.engine(f.W)

    def _compute(self, part):
        right = _star_right(self.eng, {part: ONE}, self.a1.terms, self.n_)
        both = _star_left(self.eng, self.t2.terms, right, self.n_)
        return self.f(both)


def dual_bimodule_action(a1: StateVector, a2: StateVector, f: Functional, w, n: int) -> tuple:
    """``((a1, a2) f)(w) = f(theta(a2) *_n w *_n a1)``."""
    return BimoduleImage(f, a1, a2, n)(w.terms if isinstance(w, StateVector) else w)


def sigma_functional(f: CertifiedFunctional, sign: int = 1, check: Iterable = ()) -> CertifiedFunctional:
    """``e^{sign (L^R(1) - L^L(1))} f``; sign=+1 is the stated form."""
    right = exp_l1_functional(RIGHT, sign, f, check)
    return exp_l1_functional(LEFT, -sign, right, check)


@dataclass
class SigmaVerdict:
    ok: bool
    sign: int
    checked: int = 0
    mismatches: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def sigma_check(f: CertifiedFunctional, samples: Iterable[tuple], n: int, sign: int = 1) -> SigmaVerdict:
    """Test ``sigma((a1, a2) f) = o_L(a1) o_R(a2) sigma(f)`` on (a1, a2, w) samples."""
    _require_certified(f)
    samples = list(samples)
    ws = [w for _, _, w in samples]
    sf = sigma_functional(f, sign, ws)
    verdict = SigmaVerdict(True, sign)
    for a1, a2, w in samples:
        lhs_f = sigma_functional(BimoduleImage(f, a1, a2, n), sign)
        rhs_f = o_undeformed(LEFT, a1, o_undeformed(RIGHT, a2, sf))
        lhs, rhs = lhs_f(w.terms), rhs_f(w.terms)
        verdict.checked += 1
        if lhs != rhs:
            verdict.ok = False
            verdict.mismatches.append((a1, a2, w, lhs, rhs))
    return verdict


# -- Omega_n for the V (x) V action ----------------------------------------------

def tensor_mode_eval(u: StateVector, v: StateVector, k: int, f: CertifiedFunctional, w) -> tuple:
    """``((u (x) v)_k f)(w) = sum_i (u^L_i v^R_{k-i-1} f)(w)`` for homogeneous u, v.

    The certificate bounds the sum: ``v^R_j f = 0`` for ``j >= wt v + N_R``
    and ``u^L_i g = 0`` for ``i >= wt u + N_L``.
    """
    _require_certified(f)
    nl, nr = f.cert
    wu, wv = max(u.levels(), default=0), max(v.levels(), default=0)
    out = uzero(f.dim)
    for i in range(k - wv - nr, wu + nl):
        out = uadd(out, ModeImage(LEFT, u, i, ModeImage(RIGHT, v, k - i - 1, f))(
            w.terms if isinstance(w, StateVector) else w))
    return out


def tensor_omega_defects(f: CertifiedFunctional, n: int, pairs: Iterable[tuple],
                         ws: Sequence[StateVector]) -> list:
    """Tested ``(u, v, m, w, value)`` with ``(u (x) v)_{wt u + wt v + m} f (w) != 0``, m >= n.

    A certified f lies in Omega_n for Y^L and for Y^R separately; a defect
    shows it is not in Omega_n of the tensor product action.  Modes with
    ``m >= N_L + N_R`` vanish by the certificate and are skipped.
    """
    _require_certified(f)
    out = []
    for u, v in pairs:
        wt = max(u.levels(), default=0) + max(v.levels(), default=0)
        for m in range(n, sum(f.cert)):
            for w in ws:
                val = tensor_mode_eval(u, v, wt + m, f, w)
                if any(val):
                    out.append((u, v, m, w, val))
    return out


# -- Omega_n ----------------------------------------------------------------------

@dataclass
class OmegaBasis:
    """Candidate basis of ``Omega_n(W)`` in levels ``<= K`` (generators up to V_max)."""

    n: int
    K: int
    vmax: int
    basis: list
    dims: list
    candidate: bool = True

    @property
    def dim(self) -> int:
        return len(self.basis)


def omega_n_basis(W: ModuleRealization, V: VOA, n: int, K: int, vmax: int = 6) -> OmegaBasis:
    """Joint kernel of ``v_{wt v+m}`` (wt v <= vmax, m >= n) on each level <= K."""
    basis, dims = [], []
    for lev in range(K + 1):
        cols = W.basis(lev)
        rows: dict = {}
        for vp, mode, eng in _constraints(V, W, n, lev, vmax):
            for b in cols:
                for out, c in eng.basis_mode(vp, mode, b).items():
                    rows.setdefault((vp, mode, out), {})[b] = c
        ker = kernel_basis(rows.values(), columns=cols, order=lambda p: (level(p), p))
        dims.append(len(ker))
        basis.extend(StateVector(W, k) for k in ker)
    return OmegaBasis(n, K, vmax, basis, dims)


def _constraints(V, W, n, lev, vmax):
    eng = V.engine(W)
    seen = set()
    for lv in range(0, vmax + 1):
        for vp in V.basis(lv):
            # v_{lv + m} lowers the level by m + 1; m ranges over [n, lev - 1]
            for m in range(n, lev):
                key = (vp, lv + m)
                if key not in seen:
                    seen.add(key)
                    yield vp, lv + m, eng


def in_omega(x: StateVector, V: VOA, n: int, vmax: int = 6) -> bool:
    """Whether every tested ``v_{wt v + m}`` (m >= n) kills ``x``."""
    top = max(x.levels(), default=0)
    eng = V.engine(x.module)
    for lv in range(0, vmax + 1):
        for vp in V.basis(lv):
            for m in range(n, top):
                if eng.act({vp: ONE}, lv + m, x.terms):
                    return False
    return True


@dataclass
class NilpotencyVerdict:
    ok: bool
    exponent: int
    checked: int = 0
    witnesses: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def nilpotency_check(v: StateVector, m: int, n: int, W: ModuleRealization, K: int,
                     exponent: int | None = None, vmax: int = 6, omega: OmegaBasis | None = None) -> NilpotencyVerdict:
    """Apply ``(v_m)^exponent`` to the Omega_n candidates; exponent defaults to n."""
    V = v.module
    exponent = n if exponent is None else exponent
    if m < max(v.levels(), default=0):
        raise ValueError("the mode index must be at least wt v")
    omega = omega or omega_n_basis(W, V, n, K, vmax)
    eng = V.engine(W)
    verdict = NilpotencyVerdict(True, exponent)
    for b in omega.basis:
        cur = b.terms
        for _ in range(exponent):
            cur = eng.act(v.terms, m, cur)
            if not cur:
                break
        verdict.checked += 1
        if cur:
            verdict.ok = False
            verdict.witnesses.append((b, StateVector(W, cur)))
    return verdict


# -- generated submodules ----------------------------------------------------------

@dataclass
class GeneratedSubmodule:
    dims: list
    basis: list
    second_pass_dims: list
    stable: bool


def generated_submodule(W: ModuleRealization, V: VOA, seeds: Sequence[StateVector], K: int,
                        budget: int | None = None) -> GeneratedSubmodule:
    """Span of single-mode images ``v_m s`` within levels ``<= K``.

    A second pass applies the same modes to the resulting basis and reports
    whether the span grows.
    """
    seeds = [s for s in seeds if s]
    top_seed = max((max(s.levels()) for s in seeds), default=0)
    # Virasoro needs weights up to about 2K to reach level K from one mode
    budget = 2 * K + top_seed if budget is None else budget
    eng = V.engine(W)
    span = SpanHandle(order=lambda p: (level(p), p), track=False)

    def images(vec: Mapping):
        top = max(level(p) for p in vec)
        low = min(level(p) for p in vec)
        for lv in range(0, budget + 1):
            for vp in V.basis(lv):
                for m in range(lv + low - 1 - K, lv + top):
                    r = eng.act({vp: ONE}, m, vec)
                    r = {p: c for p, c in r.items() if level(p) <= K}
                    if r:
                        yield r

    for s in seeds:
        for r in images(s.terms):
            span.add(r)
    first = _level_dims(span, K)
    basis = [dict(row) for row, _ in span.rows.values()]
    for b in basis:
        for r in images(b):
            span.add(r)
    second = _level_dims(span, K)
    return GeneratedSubmodule(first, [StateVector(W, b) for b in basis], second, first == second)


def _level_dims(span: SpanHandle, K: int) -> list:
    dims = [0] * (K + 1)
    for piv in span.rows:
        dims[level(piv)] += 1
    return dims


# -- induced modules ---------------------------------------------------------------

@dataclass
class InducedModuleResult:
    n: int
    dim_U: int
    K: int
    h: object
    dims: list
    low_dims: dict
    test_level: int
    vmax: int
    oracle: list | None = None
    warnings: list = field(default_factory=list)

    @property
    def matches_oracle(self) -> bool | None:
        if self.oracle is None:
            return None
        return list(self.dims) == list(self.oracle[:len(self.dims)])

    @property
    def bounded_by_oracle(self) -> bool | None:
        if self.oracle is None:
            return None
        return all(d <= o for d, o in zip(self.dims, self.oracle))

    @property
    def support_ok(self) -> bool:
        """No nonzero functionals below level -n."""
        return all(d == 0 for k, d in self.low_dims.items() if k < -self.n)


def induced_seed(U: AnModule, limit: int) -> list:
    """The functionals ``v -> rho([v]) u`` for a basis u of U."""
    V, d = U.V, U.dim
    out = []
    for i in range(d):
        def phi(rep, i=i):
            mat = U.rho_rep(rep)
            return tuple(mat[r][i] for r in range(d))
        out.append(QuotientFunctional(V, V, d, U.ctx, phi, (U.n, U.n), limit, f"f_u{i}"))
    return out


def _rank(rows: list) -> int:
    h = SpanHandle(track=False)
    return sum(1 for r in rows if h.add(r))


def induce(V: VOA, n: int, U: AnModule, K: int, vmax: int | None = None, test_level: int | None = None,
           max_test_level: int | None = None, low_levels: int = 2, oracle: Sequence[int] | None = None) -> InducedModuleResult:
    """Graded dimensions of the Y^L-submodule generated by the embedded U.

    Level k is spanned by ``v^L_{wt v - 1 - k} sigma(f_u)`` with wt v <= vmax;
    its dimension is the rank of the evaluation matrix on states of level
    <= test_level, raised while the ranks keep growing.
    """
    d = U.dim
    if d == 0:
        return InducedModuleResult(n, 0, K, None, [0] * (K + 1), {}, 0, 0, list(oracle) if oracle else None)
    vmax = vmax if vmax is not None else (2 * K if V.algebra == "virasoro" else K + 1)
    test_level = K if test_level is None else test_level
    max_test_level = test_level + 3 if max_test_level is None else max_test_level
    seeds = induced_seed(U, U.level_limit)
    if n:
        seeds = [sigma_functional(f, -1) for f in seeds]
    vs = [StateVector(V, {p: ONE}) for lv in range(vmax + 1) for p in V.basis(lv)]

    def level_functionals(k):
        fs = []
        for v in vs:
            N = max(v.levels())
            r = N - 1 - k
            for f in seeds:
                fs.append(ModeImage(LEFT, v, r, f))
        return fs

    def eval_rows(fs, E):
        tests = [p for lev in range(E + 1) for p in V.basis(lev)]
        rows = []
        for g in fs:
            row = {}
            for t in tests:
                val = g.value(t)
                for c, x in enumerate(val):
                    if x:
                        row[(t, c)] = x
            rows.append(row)
        return rows

    dims, used, warnings = [], test_level, []
    for k in range(K + 1):
        fs = level_functionals(k)
        E = test_level
        rank = _rank(eval_rows(fs, E))
        while E < max_test_level:
            try:
                nxt = _rank(eval_rows(fs, E + 1))
            except CutoffInsufficientError as exc:
                warnings.append(f"level {k}: test level capped at {E} ({exc})")
                break
            if nxt == rank:
                break
            rank, E = nxt, E + 1
        used = max(used, E)
        dims.append(rank)
    low = {}
    for k in range(-n - low_levels, 0):
        low[k] = _rank(eval_rows(level_functionals(k), test_level))
    return InducedModuleResult(n, d, K, U.lowest_weight(), dims, low, used, vmax,
                               list(oracle) if oracle else None, warnings)


def induce_level_limit(V: VOA, n: int, K: int, vmax: int | None = None, test_level: int | None = None) -> int:
    """Level limit an :class:`AnModule` needs for :func:`induce` with these settings."""
    vmax = vmax if vmax is not None else (2 * K if V.algebra == "virasoro" else K + 1)
    test_level = K if test_level is None else test_level
    # sigma adds n layers of L(1) per side, each raising levels by 2 + 2n
    sigma_layers = 2 * n * (2 + 2 * n)
    return test_level + vmax + 2 * n + sigma_layers + 1


def verma_oracle(K: int) -> list:
    """Partition counts p(0..K): graded dims of a Verma or Fock module."""
    from .voa import partitions
    return [sum(1 for _ in partitions(k)) for k in range(K + 1)]


# -- Omega_n of a functional family, with and without deformation ----------------

@dataclass
class CandidateComparison:
    plain: list
    deformed: list
    equal: bool

    def __bool__(self):
        return self.equal


def omega_candidate_space(family: Sequence[CertifiedFunctional], side: str, n: int, vs: Sequence[StateVector],
                          ws: Sequence[StateVector], z0=None) -> list:
    """Combinations of ``family`` killed by ``v_{wt v + m}`` (m >= n) on the tested states.

    With ``z0`` set, the modes are those of ``Y^[z0]`` on the given side.
    Modes at or beyond the certificate bound vanish and are skipped.
    """
    if not family:
        return []
    bound = max(max(f.cert) for f in family)
    rows: dict = {}
    for i, f in enumerate(family):
        for v in vs:
            for lev, comp in v.components().items():
                for m in range(n, max(bound, n) + 1):
                    for j, w in enumerate(ws):
                        if z0 is None:
                            val = mode_eval(side, comp, lev + m, f, w)
                        else:
                            val = deform_mode_eval(side, z0, comp, lev + m, f, w)
                        for c, x in enumerate(val):
                            if x:
                                rows.setdefault((id(v), lev, m, j, c), {})[i] = x
    return kernel_basis(rows.values(), columns=list(range(len(family))))


def _same_subspace(a: list, b: list) -> bool:
    if len(a) != len(b):
        return False
    h = SpanHandle(track=False)
    for x in a:
        h.add(x)
    return all(h.contains(y) for y in b)


def deformed_omega_check(family: Sequence[CertifiedFunctional], side: str, n: int, z0,
                         vs: Sequence[StateVector], ws: Sequence[StateVector]) -> CandidateComparison:
    """Compare the Omega_n candidates of ``family`` under Y and under Y^[z0]."""
    plain = omega_candidate_space(family, side, n, vs, ws)
    deformed = omega_candidate_space(family, side, n, vs, ws, z0=z0)
    return CandidateComparison(plain, deformed, _same_subspace(plain, deformed))
