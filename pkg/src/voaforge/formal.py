"""One-variable formal calculus: Laurent polynomials, explicit series windows,
rational functions with poles at 0 and z, and the two expansion maps.

Conventions: ``(x - z)**n`` is always expanded in descending powers of x,
``(z - x)**n`` and ``(-z + x)**n`` in ascending powers of x.  Every
truncated series carries its power range and refuses queries outside it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .linalg import ONE, ZERO, Q, binom


class WindowError(ValueError):
    """A coefficient outside the computed window was requested."""


class ReconstructionError(ValueError):
    """A pole certificate is violated by the supplied expansion."""


# -- polynomials as coefficient tuples (index = power) ----------------------

def poly_trim(c: Iterable) -> tuple:
    c = list(c)
    while c and not c[-1]:
        c.pop()
    return tuple(Q(x) for x in c)


def poly_mul(a: tuple, b: tuple) -> tuple:
    if not a or not b:
        return ()
    out = [ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return poly_trim(out)


def poly_add(a: tuple, b: tuple) -> tuple:
    n = max(len(a), len(b))
    return poly_trim((a[i] if i < len(a) else ZERO) + (b[i] if i < len(b) else ZERO)
                     for i in range(n))


def poly_shift(a: tuple, z0) -> tuple:
    """Coefficients of ``a(x + z0)``."""
    z0 = Q(z0)
    out = [ZERO] * len(a)
    for i, c in enumerate(a):
        if not c:
            continue
        p = ONE
        # (x+z0)^i = sum_j binom(i,j) z0^(i-j) x^j
        for j in range(i, -1, -1):
            out[j] += c * binom(i, j) * p
            p *= z0
    return poly_trim(out)


def poly_eval(a: tuple, x) -> object:
    acc = ZERO
    for c in reversed(a):
        acc = acc * x + c
    return acc


def poly_divide_linear(a: tuple, root) -> tuple[tuple, object]:
    """Synthetic division by ``(x - root)``: returns (quotient, remainder)."""
    if not a:
        return (), ZERO
    q = [ZERO] * (len(a) - 1)
    acc = ZERO
    for i in range(len(a) - 1, 0, -1):
        acc = acc * root + a[i]
        q[i - 1] = acc
    rem = acc * root + a[0]
    return poly_trim(q), rem


def linear_power(z, k: int) -> tuple:
    """Coefficients of ``(x - z)**k`` for k >= 0."""
    z = Q(z)
    return poly_trim(binom(k, j) * (-z) ** (k - j) for j in range(k + 1))


# -- Laurent polynomials ----------------------------------------------------

class LaurentPolynomial:
    """Finite Laurent polynomial with payloads (scalars or state vectors)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[int, object] | None = None):
        self.coeffs = {int(p): c for p, c in (coeffs or {}).items() if c}

    @classmethod
    def monomial(cls, power: int, c=ONE):
        return cls({power: c})

    def __getitem__(self, p: int):
        c = self.coeffs.get(p)
        return ZERO if c is None else c

    def powers(self):
        return sorted(self.coeffs)

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, LaurentPolynomial):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __add__(self, other: "LaurentPolynomial"):
        out = dict(self.coeffs)
        for p, c in other.coeffs.items():
            out[p] = out[p] + c if p in out else c
        return LaurentPolynomial(out)

    def __neg__(self):
        return LaurentPolynomial({p: -c for p, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, a):
        return LaurentPolynomial({p: c * a for p, c in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, LaurentPolynomial):
            out: dict = {}
            for p, a in self.coeffs.items():
                for r, b in other.coeffs.items():
                    term = b * a if not isinstance(a, type(ONE)) else a * b
                    out[p + r] = out[p + r] + term if p + r in out else term
            return LaurentPolynomial(out)
        return self.scale(other)

    def shift(self, k: int):
        """Multiply by ``x**k``."""
        return LaurentPolynomial({p + k: c for p, c in self.coeffs.items()})

    def residue(self):
        return self[-1]

    def __repr__(self):
        if not self.coeffs:
            return "LaurentPolynomial(0)"
        return " + ".join(f"({c})*x^{p}" for p, c in sorted(self.coeffs.items()))


# -- series windows ---------------------------------------------------------

AT_ZERO = "at-zero"
AT_INFINITY = "at-infinity"


@dataclass
class SeriesWindow:
    """Exact coefficients of a one-sided Laurent series on ``[lo, hi]``.

    ``direction`` records which way the underlying series is infinite:
    at-zero series are bounded below, at-infinity series bounded above.
    """

    direction: str
    lo: int
    hi: int
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.direction not in (AT_ZERO, AT_INFINITY):
            raise ValueError(f"unknown direction {self.direction!r}")
        if self.lo > self.hi:
            raise WindowError(f"empty window [{self.lo}, {self.hi}]")
        self.coeffs = {p: Q(c) for p, c in self.coeffs.items() if c}
        if any(p < self.lo or p > self.hi for p in self.coeffs):
            raise WindowError("coefficient outside declared window")

    def __getitem__(self, p: int):
        if p < self.lo or p > self.hi:
            raise WindowError(f"power {p} outside window [{self.lo}, {self.hi}]")
        return self.coeffs.get(p, ZERO)

    def covers(self, lo: int, hi: int) -> bool:
        return self.lo <= lo and hi <= self.hi

    def restrict(self, lo: int, hi: int) -> "SeriesWindow":
        if not self.covers(lo, hi):
            raise WindowError(f"[{lo}, {hi}] not inside [{self.lo}, {self.hi}]")
        return SeriesWindow(self.direction, lo, hi,
                            {p: c for p, c in self.coeffs.items() if lo <= p <= hi})

    def as_dict(self) -> dict:
        return {p: self.coeffs.get(p, ZERO) for p in range(self.lo, self.hi + 1)}

    def same_values(self, other: "SeriesWindow", lo: int | None = None, hi: int | None = None) -> bool:
        lo = max(self.lo, other.lo) if lo is None else lo
        hi = min(self.hi, other.hi) if hi is None else hi
        return all(self[p] == other[p] for p in range(lo, hi + 1))

    def __sub__(self, other: "SeriesWindow"):
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        return SeriesWindow(self.direction, lo, hi,
                            {p: self[p] - other[p] for p in range(lo, hi + 1)})

    def shift(self, k: int) -> "SeriesWindow":
        return SeriesWindow(self.direction, self.lo + k, self.hi + k,
                            {p + k: c for p, c in self.coeffs.items()})

    def mul(self, other: "SeriesWindow", support_self: int, support_other: int) -> "SeriesWindow":
        """Product of two series of the same direction.

        ``support_*`` is the extreme power where each full series starts
        (lowest power for at-zero, highest for at-infinity); the result
        window is the largest one determined by the two inputs.
        """
        if self.direction != other.direction:
            raise ValueError("cannot multiply series of opposite directions")
        if self.direction == AT_ZERO:
            if self.lo > support_self or other.lo > support_other:
                raise WindowError("window does not reach the start of the series")
            lo = support_self + support_other
            hi = min(self.hi + support_other, other.hi + support_self)
            out = {}
            for p in range(lo, hi + 1):
                acc = ZERO
                for i in range(support_self, p - support_other + 1):
                    acc += self[i] * other[p - i]
                out[p] = acc
            return SeriesWindow(AT_ZERO, lo, hi, out)
        if self.hi < support_self or other.hi < support_other:
            raise WindowError("window does not reach the start of the series")
        hi = support_self + support_other
        lo = max(self.lo + support_other, other.lo + support_self)
        out = {}
        for p in range(lo, hi + 1):
            acc = ZERO
            for i in range(p - support_other, support_self + 1):
                acc += self[i] * other[p - i]
            out[p] = acc
        return SeriesWindow(AT_INFINITY, lo, hi, out)


def binom_expand(kind: str, n: int, z=None, window: tuple[int, int] = (0, 0)) -> SeriesWindow:
    """Expand a binomial power by the formal-variable convention.

    kinds: ``"x-minus-z"`` gives ``(x - z)**n`` in descending powers of x;
    ``"z-minus-x"`` gives ``(z - x)**n`` in ascending powers;
    ``"minus-z-plus-x"`` gives ``(-z + x)**n`` in ascending powers;
    ``"x1-minus-x2"`` gives ``(x1 - x2)**n`` as a series in x2 whose power-i
    coefficient multiplies ``x1**(n - i)``.
    """
    lo, hi = window
    if lo > hi:
        raise WindowError(f"empty window {window}")
    if kind in ("x-minus-z", "z-minus-x", "minus-z-plus-x"):
        if z is None or not Q(z):
            raise ValueError("z must be a nonzero scalar")
        z = Q(z)
    out = {}
    if kind == "x-minus-z":
        for p in range(lo, hi + 1):
            i = n - p
            if i >= 0:
                out[p] = binom(n, i) * (-z) ** i
        return SeriesWindow(AT_INFINITY, lo, hi, out)
    if kind in ("z-minus-x", "minus-z-plus-x"):
        if hi >= 0 and lo < 0:
            pass
        for p in range(max(lo, 0), hi + 1):
            if kind == "z-minus-x":
                out[p] = (-1) ** p * z ** (n - p) * binom(n, p)
            else:
                out[p] = binom(n, p) * (-z) ** (n - p)
        return SeriesWindow(AT_ZERO, lo, hi, out)
    if kind == "x1-minus-x2":
        for p in range(max(lo, 0), hi + 1):
            out[p] = (-1) ** p * binom(n, p)
        return SeriesWindow(AT_ZERO, lo, hi, out)
    raise ValueError(f"unknown binomial kind {kind!r}")


# -- rational functions with poles at 0 and z -------------------------------

class RationalFunctionWithPoles:
    """``g(x) / (x**l * (x - z)**k)`` with ``g`` a polynomial.

    Canonical form strips common factors of x and ``(x - z)`` from ``g``
    while the corresponding pole order is positive.
    """

    __slots__ = ("num", "l", "k", "z")

    def __init__(self, num: Iterable, l: int = 0, k: int = 0, z=-1, canonical: bool = True):
        if l < 0 or k < 0:
            raise ValueError("pole orders must be nonnegative")
        z = Q(z)
        if not z:
            raise ValueError("z must be nonzero")
        num = poly_trim(num)
        if canonical:
            if not num:
                l = k = 0
            while l > 0 and num and not num[0]:
                num = num[1:]
                l -= 1
            while k > 0 and num:
                q, r = poly_divide_linear(num, z)
                if r:
                    break
                num, k = q, k - 1
        self.num, self.l, self.k, self.z = num, l, k, z

    @classmethod
    def polynomial(cls, coeffs, z=-1):
        return cls(coeffs, 0, 0, z)

    def is_zero(self) -> bool:
        return not self.num

    @property
    def degree(self) -> int:
        return len(self.num) - 1

    def __eq__(self, other):
        if not isinstance(other, RationalFunctionWithPoles):
            return NotImplemented
        lhs = poly_mul(poly_mul(self.num, (ZERO,) * other.l + (ONE,)), linear_power(other.z, other.k))
        rhs = poly_mul(poly_mul(other.num, (ZERO,) * self.l + (ONE,)), linear_power(self.z, self.k))
        return lhs == rhs

    def __hash__(self):
        return hash((self.num, self.l, self.k, self.z if self.k else None))

    def __repr__(self):
        return f"RationalFunctionWithPoles(num={[str(c) for c in self.num]}, l={self.l}, k={self.k}, z={self.z})"

    def evaluate(self, x):
        x = Q(x)
        den = x ** self.l * (x - self.z) ** self.k
        return poly_eval(self.num, x) / den

    def mul_monomial(self, j: int) -> "RationalFunctionWithPoles":
        """Multiply by ``x**j``."""
        if j <= self.l:
            return RationalFunctionWithPoles(self.num, self.l - j, self.k, self.z)
        return RationalFunctionWithPoles((ZERO,) * (j - self.l) + self.num, 0, self.k, self.z)

    def mul_linear_power(self, n: int) -> "RationalFunctionWithPoles":
        """Multiply by ``(x - z)**n`` for any integer n."""
        if n <= self.k:
            return RationalFunctionWithPoles(self.num, self.l, self.k - n, self.z)
        return RationalFunctionWithPoles(poly_mul(self.num, linear_power(self.z, n - self.k)),
                                         self.l, 0, self.z)

    def scale(self, a) -> "RationalFunctionWithPoles":
        return RationalFunctionWithPoles(tuple(c * a for c in self.num), self.l, self.k, self.z)

    def __add__(self, other: "RationalFunctionWithPoles"):
        if self.k and other.k and self.z != other.z:
            raise ValueError("pole sets differ")
        z = self.z if self.k else other.z
        l, k = max(self.l, other.l), max(self.k, other.k)
        a = poly_mul(poly_mul(self.num, (ZERO,) * (l - self.l) + (ONE,)), linear_power(z, k - self.k))
        b = poly_mul(poly_mul(other.num, (ZERO,) * (l - other.l) + (ONE,)), linear_power(z, k - other.k))
        return RationalFunctionWithPoles(poly_add(a, b), l, k, z)

    def __sub__(self, other):
        return self + other.scale(-ONE)

    def residue_at_z(self):
        """Residue at the pole ``x = z`` by Taylor expansion of ``g(x)/x**l``."""
        if not self.k:
            return ZERO
        # expand g(z + t) / (z + t)^l in t up to t^(k-1)
        g = poly_shift(self.num, self.z)
        inv = [binom(-self.l, j) * self.z ** (-self.l - j) for j in range(self.k)]
        return sum((g[i] * inv[self.k - 1 - i] for i in range(min(len(g), self.k))), ZERO)

    def residue_at_zero(self):
        if not self.l:
            return ZERO
        inv = iota_zero(RationalFunctionWithPoles(self.num, 0, self.k, self.z), (0, self.l - 1))
        return inv[self.l - 1]


def iota_zero(f: RationalFunctionWithPoles, window: tuple[int, int]) -> SeriesWindow:
    """Laurent expansion at ``x = 0`` on the requested power window."""
    lo, hi = window
    if lo < -f.l:
        raise WindowError(f"power {lo} below the pole order {f.l} at zero")
    z = f.z
    # (x - z)^(-k) = (-z + x)^(-k) = sum_i binom(-k, i) (-z)^(-k-i) x^i
    span = hi + f.l + 1
    inv = [binom(-f.k, i) * (-z) ** (-f.k - i) for i in range(max(span, 0))]
    out = {}
    for p in range(lo, hi + 1):
        acc = ZERO
        t = p + f.l
        for j, g in enumerate(f.num):
            if j > t:
                break
            if g:
                acc += g * inv[t - j]
        out[p] = acc
    return SeriesWindow(AT_ZERO, lo, hi, out)


def iota_infty(f: RationalFunctionWithPoles, window: tuple[int, int]) -> SeriesWindow:
    """Laurent expansion at ``x = infinity`` on the requested power window."""
    lo, hi = window
    top = f.degree - f.l - f.k
    if f.num and hi > top:
        raise WindowError(f"power {hi} above the leading power {top}")
    z = f.z
    # (x - z)^(-k) = sum_i binom(-k, i) (-z)^i x^(-k-i)
    out = {}
    for p in range(lo, hi + 1):
        acc = ZERO
        for j, g in enumerate(f.num):
            if not g:
                continue
            i = j - f.l - f.k - p
            if i >= 0:
                acc += g * binom(-f.k, i) * (-z) ** i
        out[p] = acc
    return SeriesWindow(AT_INFINITY, lo, hi, out)


def rational_from_upper_expansion(s: SeriesWindow, l: int, k: int, z, degree_bound: int) -> RationalFunctionWithPoles:
    """Invert ``iota_infty`` given a pole certificate.

    The certificate claims ``x**l (x - z)**k s`` is a polynomial of degree at
    most ``degree_bound``.  The window top is taken as the top of the series
    (coefficients above it are zero).  Every product coefficient the window determines
    outside ``[0, degree_bound]`` is checked to vanish.
    """
    if s.direction != AT_INFINITY:
        raise ValueError("expected an expansion at infinity")
    z = Q(z)
    l, k = max(l, 0), max(k, 0)
    need_lo = -l - k
    if s.lo > need_lo:
        raise WindowError(f"window starts at {s.lo}, reconstruction needs power {need_lo}")
    mult = linear_power(z, k)

    def coeff(q: int):
        acc = ZERO
        for j, m in enumerate(mult):
            p = q - l - j
            if p > s.hi:
                continue
            acc += m * s[p]
        return acc

    # the series is zero above its window top (it is the top of the expansion)
    num = [coeff(q) for q in range(0, degree_bound + 1)]
    for q in range(s.lo + l + k, 0):
        if coeff(q):
            raise ReconstructionError(f"certificate violated: coefficient of x^{q} is {coeff(q)}")
    for q in range(degree_bound + 1, s.hi + l + k + 1):
        if coeff(q):
            raise ReconstructionError(f"certificate violated: degree exceeds {degree_bound}")
    return RationalFunctionWithPoles(num, l, k, z)


def shift_substitute(f, z0):
    """Substitute ``x -> x + z0``.

    Laurent polynomials must have no negative powers.  For rational
    functions the poles move from {0, z} to {-z0, z - z0}; the result is
    relabelled so that one pole sits at 0 when possible.
    """
    z0 = Q(z0)
    if isinstance(f, LaurentPolynomial):
        if any(p < 0 for p in f.coeffs):
            raise ValueError("negative powers need the rational form before shifting")
        if not f.coeffs:
            return LaurentPolynomial()
        deg = max(f.coeffs)
        coeffs = poly_shift(tuple(f[p] for p in range(deg + 1)), z0)
        return LaurentPolynomial(dict(enumerate(coeffs)))
    if not isinstance(f, RationalFunctionWithPoles):
        raise TypeError("expected a LaurentPolynomial or RationalFunctionWithPoles")
    g = poly_shift(f.num, z0)
    if not z0:
        return RationalFunctionWithPoles(g, f.l, f.k, f.z)
    if f.l == 0 and f.k == 0:
        return RationalFunctionWithPoles(g, 0, 0, f.z)
    if f.l == 0:
        if f.z == z0:
            return RationalFunctionWithPoles(g, f.k, 0, f.z)
        return RationalFunctionWithPoles(g, 0, f.k, f.z - z0)
    if f.k == 0 or f.z == z0:
        # new poles: -z0 (order l) and z - z0 (order k) where z - z0 = 0
        return RationalFunctionWithPoles(g, f.k, f.l, -z0)
    raise ValueError("shifted poles are both nonzero; not representable with poles {0, z}")


def residue(s):
    """Coefficient of ``x**-1``."""
    if isinstance(s, LaurentPolynomial):
        return s.residue()
    if isinstance(s, SeriesWindow):
        return s[-1]
    raise TypeError("expected a SeriesWindow or LaurentPolynomial")
