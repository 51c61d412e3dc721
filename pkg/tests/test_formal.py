import random

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from voaforge.formal import (LaurentPolynomial, RationalFunctionWithPoles, ReconstructionError,
                             WindowError, binom_expand, iota_infty, iota_zero,
                             rational_from_upper_expansion, residue, shift_substitute)
from voaforge.linalg import Q

X = sp.Symbol("x")


def to_sympy(f: RationalFunctionWithPoles):
    num = sum(sp.Rational(int(c.numerator), int(c.denominator)) * X ** i for i, c in enumerate(f.num))
    z = sp.Rational(int(f.z.numerator), int(f.z.denominator))
    return num / (X ** f.l * (X - z) ** f.k)


def sym_coeffs_at_zero(expr, lo, hi):
    ser = sp.series(expr, X, 0, hi + 1).removeO()
    return {p: ser.coeff(X, p) for p in range(lo, hi + 1)}


def sym_coeffs_at_infinity(expr, lo, hi):
    y = sp.Symbol("y")
    ser = sp.series(expr.subs(X, 1 / y), y, 0, -lo + 1).removeO()
    return {p: ser.coeff(y, -p) for p in range(lo, hi + 1)}


rationals = st.fractions(min_value=-9, max_value=9, max_denominator=5)
functions = st.builds(
    lambda num, l, k, z: RationalFunctionWithPoles([Q(c) for c in num], l, k, Q(z)),
    st.lists(rationals, min_size=1, max_size=6).filter(lambda c: c[-1] != 0),
    st.integers(0, 3), st.integers(0, 3),
    rationals.filter(bool))


def test_binomial_conventions():
    s = binom_expand("x-minus-z", -1, Q(-1), (-4, -1))
    assert [s[p] for p in range(-4, 0)] == [-1, 1, -1, 1]
    t = binom_expand("z-minus-x", -1, Q(2), (0, 2))
    assert [t[p] for p in range(3)] == [Q(1, 2), Q(1, 4), Q(1, 8)]


def test_expansions_of_one_over_x_plus_one():
    f = RationalFunctionWithPoles([1], 0, 1, -1)
    assert iota_zero(f, (0, 0))[0] == 1
    assert iota_infty(f, (-1, -1))[-1] == 1
    with pytest.raises(WindowError):
        iota_infty(f, (-2, 0))
    g = RationalFunctionWithPoles([1], 2, 0)
    with pytest.raises(WindowError):
        iota_zero(g, (-3, 0))


@settings(max_examples=40, deadline=None)
@given(functions)
def test_expansions_match_sympy(f):
    e = to_sympy(f)
    lo, hi = -f.l, 3
    s = iota_zero(f, (lo, hi))
    assert {p: s[p] for p in range(lo, hi + 1)} == sym_coeffs_at_zero(e, lo, hi)
    top = f.degree - f.l - f.k
    t = iota_infty(f, (top - 4, top))
    assert {p: t[p] for p in range(top - 4, top + 1)} == sym_coeffs_at_infinity(e, top - 4, top)


@settings(max_examples=40, deadline=None)
@given(functions)
def test_residue_sign_against_partial_fractions(f):
    e = to_sympy(f)
    z = sp.Rational(int(f.z.numerator), int(f.z.denominator))
    at_z = sp.residue(e, X, z)
    assert f.residue_at_z() == Q(str(at_z))
    top = f.degree - f.l - f.k
    r0 = iota_zero(f, (-f.l, -1))[-1] if f.l else 0
    rinf = iota_infty(f, (-1, -1))[-1] if top >= -1 else 0
    # the difference of the two residues is minus the residue at the nonzero pole
    assert r0 - rinf == -f.residue_at_z()


@settings(max_examples=40, deadline=None)
@given(functions, st.integers(-3, 3))
def test_multiplier_identities(f, n):
    fn = f.mul_linear_power(n)
    left = iota_zero(fn, (-fn.l, 5))
    right = binom_expand("minus-z-plus-x", n, f.z, (0, 5 + f.l)).mul(iota_zero(f, (-f.l, 5)), 0, -f.l)
    assert left.same_values(right)
    top = f.degree - f.l - f.k
    left = iota_infty(fn, (top + n - 8, top + n))
    right = binom_expand("x-minus-z", n, f.z, (n - 8, n)).mul(iota_infty(f, (top - 8, top)), n, top)
    assert left.same_values(right)


@settings(max_examples=40, deadline=None)
@given(functions)
def test_reconstruction_round_trip(f):
    top = f.degree - f.l - f.k
    s = iota_infty(f, (top - f.degree - f.l - f.k - 2, top))
    assert rational_from_upper_expansion(s, f.l, f.k, f.z, f.degree) == f


def test_reconstruction_detects_a_violated_certificate():
    f = RationalFunctionWithPoles([1], 3, 0)
    s = iota_infty(f, (-8, -3))
    with pytest.raises(ReconstructionError):
        rational_from_upper_expansion(s, 1, 0, -1, 2)


def test_shift_substitute_moves_poles():
    f = RationalFunctionWithPoles([1], 1, 2, -1)
    g = shift_substitute(f, -1)
    # 1/(x (x+1)^2) at x -> x - 1 is 1/((x-1) x^2)
    assert (g.l, g.k, g.z) == (2, 1, 1)
    assert g.evaluate(Q(3)) == f.evaluate(Q(2))
    p = shift_substitute(LaurentPolynomial({2: Q(1)}), Q(1))
    assert [p[i] for i in range(3)] == [1, 2, 1]


def test_residue_of_a_window():
    assert residue(LaurentPolynomial({-1: Q(4), 2: Q(1)})) == 4
