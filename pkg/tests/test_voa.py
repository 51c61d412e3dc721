import random

import pytest
from hypothesis import given, settings, strategies as st

from voaforge.linalg import Q, binom
from voaforge.voa import (IncompatibleRealizationError, PreconditionError, L_act, construct_voa,
                          exp_L1_apply, gram_determinant, lassoc_expand, mode_act, partitions,
                          theta_apply, y_o_window, y_window)

HEIS = construct_voa("heisenberg")
VIR = construct_voa("virasoro", Q(1, 2))


def partition_count(n, min_part=1):
    # independent oracle: count by recursion on the largest part
    def count(n, lo):
        if n == 0:
            return 1
        return sum(count(n - k, k) for k in range(lo, n + 1))
    return count(n, min_part)


def test_weight_space_dimensions():
    assert [HEIS.dim(n) for n in range(6)] == [1, 1, 2, 3, 5, 7]
    assert [VIR.dim(n) for n in range(7)] == [1, 0, 1, 1, 2, 2, 4]
    for n in range(12):
        assert HEIS.dim(n) == partition_count(n)
        assert VIR.dim(n) == partition_count(n, 2)
        assert len(list(partitions(n))) == partition_count(n)


def test_central_charge_must_be_exact():
    with pytest.raises(ValueError):
        construct_voa("virasoro", 0.5)
    with pytest.raises(ValueError):
        construct_voa("lattice")


def test_vacuum_and_omega():
    one = VIR.vacuum()
    assert L_act(-1, one).is_zero()
    w = VIR.omega()
    assert mode_act(w, 3, w) == Q(1, 4) * one
    a = HEIS.generator()
    assert mode_act(a, 0, a).is_zero()
    assert mode_act(a, 1, a) == HEIS.vacuum()
    for v in (HEIS.state((2, 1)), VIR.state((3, 2))):
        V = v.module
        for m in range(-3, 3):
            assert mode_act(V.vacuum(), m, v) == (v if m == -1 else V.zero())


def test_heisenberg_omega_is_a_virasoro_element():
    # [L(m), L(n)] = (m-n) L(m+n) + (m^3-m)/12 delta_{m+n,0} on a Fock space at c = 1
    W = HEIS.fock(Q(2, 3))
    w = W.state((2, 1))
    for m in range(-2, 3):
        for n in range(-2, 3):
            lhs = L_act(m, L_act(n, w)) - L_act(n, L_act(m, w))
            rhs = (m - n) * L_act(m + n, w)
            if m + n == 0:
                rhs = rhs + Q(m ** 3 - m, 12) * w
            assert lhs == rhs
    assert L_act(0, W.lowest()) == Q(2, 9) * W.lowest()


def test_incompatible_realizations():
    with pytest.raises(IncompatibleRealizationError):
        mode_act(HEIS.generator(), 0, VIR.vacuum())
    with pytest.raises(IncompatibleRealizationError):
        HEIS.verma(1)


def test_vertex_operator_windows():
    a, one = HEIS.generator(), HEIS.vacuum()
    y = y_window(a, a, (-2, 0))
    assert y[0] == HEIS.state((1, 1)) and y[-2] == one and -1 not in y.coeffs
    assert y_window(VIR.omega(), VIR.vacuum(), (0, 0))[0] == VIR.omega()
    yo = y_o_window(a, one, (-4, 0))
    # -sum_m a(m)1 x^{m-1}: top term -a x^{-2}, then -a(-2)1 x^{-3}, ...
    assert yo.coeffs == {-2: -a, -3: -HEIS.state((2,)), -4: -HEIS.state((3,))}
    yw = y_o_window(VIR.omega(), VIR.vacuum(), (-4, -4))
    assert yw[-4] == VIR.omega()


def test_exp_l1_and_theta():
    L3 = VIR.state((3,))
    assert exp_L1_apply(VIR.vacuum(), 5) == VIR.vacuum()
    assert exp_L1_apply(VIR.omega(), 1) == VIR.omega()
    assert exp_L1_apply(L3, 1) == L3 + 4 * VIR.omega()
    assert theta_apply(VIR.omega()) == VIR.omega()
    assert theta_apply(L3) == -L3 - 4 * VIR.omega()
    with pytest.raises(ValueError):
        theta_apply(VIR.verma(1).lowest())


@pytest.mark.parametrize("V", [HEIS, VIR], ids=["heisenberg", "virasoro"])
def test_theta_is_an_involution(V):
    for n in range(9):
        for p in V.basis(n):
            v = V.state(p)
            assert theta_apply(theta_apply(v)) == v


def test_l1_conjugation_identity():
    # x1^{-L(0)} e^{x L(1)} x1^{L(0)} v = e^{x x1 L(1)} v
    rng = random.Random(3)
    for p in VIR.basis(6) + HEIS.basis(5):
        V = VIR if p[-1] >= 2 and p in VIR.basis(sum(p)) else HEIS
        v = V.state(p)
        x, x1 = Q(rng.randint(-5, 5), rng.randint(1, 4)), Q(rng.randint(1, 5), rng.randint(1, 4))
        scaled = exp_L1_apply(x1 ** sum(p) * v, x)
        back = V.zero()
        for n, comp in scaled.components().items():
            back = back + x1 ** (-n) * comp
        assert back == exp_L1_apply(v, x * x1)


def _homogeneous(V, rng, top):
    lev = rng.choice([n for n in range(top + 1) if V.dim(n)])
    return V.state(rng.choice(V.basis(lev)))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from(["heisenberg", "virasoro"]))
def test_borcherds_commutator(seed, kind):
    rng = random.Random(seed)
    V = HEIS if kind == "heisenberg" else VIR
    W = V.fock(Q(1, 3)) if kind == "heisenberg" else V.verma(Q(2, 5))
    v, u = _homogeneous(V, rng, 4), _homogeneous(V, rng, 4)
    w = W.state(rng.choice(W.basis(rng.randint(0, 3))))
    p, r = rng.randint(-2, 3), rng.randint(-2, 3)
    lhs = mode_act(v, p, mode_act(u, r, w)) - mode_act(u, r, mode_act(v, p, w))
    rhs = W.zero()
    for i in range(int(v.weight + u.weight) + 1):
        rhs = rhs + binom(p, i) * mode_act(mode_act(v, i, u), p + r - i, w)
    assert lhs == rhs


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from(["heisenberg", "virasoro"]))
def test_grading(seed, kind):
    rng = random.Random(seed)
    V = HEIS if kind == "heisenberg" else VIR
    v, w = _homogeneous(V, rng, 5), _homogeneous(V, rng, 5)
    m = rng.randint(-3, 6)
    out = mode_act(v, m, w)
    assert out.is_zero() or out.weight == v.weight + w.weight - m - 1


def test_lassoc_examples():
    a, one = HEIS.generator(), HEIS.vacuum()
    assert lassoc_expand(a, -1, a, -1, one, 1, 1) == HEIS.state((1, 1))
    w = VIR.omega()
    got = lassoc_expand(w, 0, w, -1, VIR.vacuum(), 0, 2)
    assert got == mode_act(w, 0, mode_act(w, -1, VIR.vacuum())) == VIR.state((3,))
    with pytest.raises(PreconditionError):
        lassoc_expand(a, -1, a, -1, HEIS.state((1,)), 0, 1)


def test_truncated_modules_refuse_to_drop_terms():
    from voaforge.voa import TruncationError
    W = VIR.verma(1, max_level=2)
    with pytest.raises(TruncationError):
        L_act(-1, W.state((2,)))


@pytest.mark.parametrize("c,h", [(Q(1, 2), Q(1, 3)), (Q(-2), Q(5, 7)), (Q(25), Q(1))])
def test_gram_determinant_against_the_kac_formula(c, h):
    W = construct_voa("virasoro", c).verma(h)
    assert gram_determinant(W, 1) == 2 * h
    assert gram_determinant(W, 2) == 2 * h * (16 * h * h + 2 * h * (c - 5) + c)


def test_gram_determinant_vanishes_at_a_degenerate_point():
    W = construct_voa("virasoro", Q(7, 10)).verma(Q(3, 80))
    assert [gram_determinant(W, n) == 0 for n in range(5)] == [False] * 4 + [True]
