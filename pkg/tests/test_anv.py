import random

import pytest
from hypothesis import given, settings, strategies as st

from voaforge.anv import (VARIANT_PRIME, VARIANT_V, VARIANT_W, AnModule, CutoffInsufficientError,
                          an_table, bimodule_act, build_on_span, circ_n, congruent_auto,
                          generalized_on_element, psi_n_reduce, star_n, star_n_right,
                          zhu_commutator_residue)
from voaforge.linalg import Q, binom, rref
from voaforge.voa import L_act, construct_voa, mode_act

HEIS = construct_voa("heisenberg")
VIR = construct_voa("virasoro", Q(1, 2))
VERMA = VIR.verma(Q(1, 3))


def res_oracle(v, w, e, b):
    # Res_x x^e (1+x)^b Y(v,x) w, summing far past the grading bound
    out = w.module.zero()
    for j in range(40):
        out = out + binom(b, j) * mode_act(v, e + j, w)
    return out


def test_circ_examples():
    for n in range(3):
        assert circ_n(VIR.vacuum(), VIR.omega(), n).is_zero()
    w = VERMA.state((1,))
    expect = L_act(-3, w) + 2 * L_act(-2, w) + L_act(-1, w)
    assert circ_n(VIR.omega(), w, 0) == expect
    a = HEIS.generator()
    assert circ_n(a, a, 0) == HEIS.state((2, 1)) + HEIS.state((1, 1))


def test_generalized_elements():
    w, one = VIR.omega(), VIR.vacuum()
    assert generalized_on_element(w, w, 1, 0, 0) == circ_n(w, w, 1)
    # Res x^{-3} (1+x)^2 Y(omega,x) 1 = L(-4)1 + 2 L(-3)1 + L(-2)1
    got = generalized_on_element(w, one, 0, 1, 0)
    assert got == VIR.state((4,)) + 2 * VIR.state((3,)) + VIR.state((2,))
    with pytest.raises(ValueError):
        generalized_on_element(w, one, 0, 0, 1)
    ctx = build_on_span(VIR, 1, 10)
    for r in range(3):
        for s in range(r + 1):
            assert ctx.contains(generalized_on_element(w, w, 1, r, s))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_products_match_a_residue_oracle(seed):
    rng = random.Random(seed)
    V = rng.choice([HEIS, VIR])
    u = V.state(rng.choice(V.basis_upto(4)[1:]))
    v = V.state(rng.choice(V.basis_upto(3)))
    n = rng.randint(0, 2)
    wt = int(u.weight)
    left = V.zero()
    for m in range(n + 1):
        left = left + (-1) ** m * binom(m + n, n) * res_oracle(u, v, -n - m - 1, wt + n)
    assert star_n(u, v, n) == left
    right = V.zero()
    for m in range(n + 1):
        right = right + binom(-n - 1, m) * (-1) ** (n - m) * res_oracle(u, v, -n - m - 1, wt + m - 1)
    assert star_n_right(v, u, n) == right
    assert circ_n(u, v, n) == res_oracle(u, v, -2 * n - 2, wt + n)


def test_star_examples():
    a, one = HEIS.generator(), HEIS.vacuum()
    assert star_n(a, a, 0) == 2 * HEIS.omega()
    assert star_n(a, one, 0) == a
    w = VERMA.state((2, 1))
    assert star_n_right(w, VIR.vacuum(), 0) == w
    for n in range(3):
        for p in VIR.basis_upto(6):
            assert star_n(VIR.vacuum(), VIR.state(p), n) == VIR.state(p)


def test_span_rank_for_heisenberg():
    ctx = build_on_span(HEIS, 0, 4)
    reps = ctx.representatives()
    assert len(HEIS.basis_upto(4)) - ctx.span.rank == len(reps)
    # the classes of a^k, k <= 4, already fill V_{<=4} modulo O_0
    assert sorted(sum(p) for p in reps) == [0, 1, 2, 3, 4]


@pytest.mark.parametrize("n", [0, 1, 2])
def test_scalar_is_central_binomial(n):
    for v in (VIR.omega(), VIR.state((3,)), VIR.state((2, 2))):
        for p in VERMA.basis_upto(2):
            w = VERMA.state(p)
            lhs = star_n(L_act(-1, v) + L_act(0, v), w, n)
            assert lhs == (-1) ** n * (2 * n + 1) * binom(2 * n, n) * circ_n(v, w, n)
            assert congruent_auto(lhs, VERMA.zero(), VIR, n, VARIANT_W, VERMA)


def test_stated_scalar_fails_for_positive_n():
    v, w = VIR.state((3,)), VERMA.lowest()
    lhs = star_n(L_act(-1, v) + L_act(0, v), w, 1)
    circ = circ_n(v, w, 1)
    assert not circ.is_zero()
    assert lhs != -3 * binom(3, 1) * circ
    assert lhs == -3 * binom(2, 1) * circ


def test_congruence_examples():
    w = VIR.omega()
    ctx = build_on_span(VIR, 0, 10)
    assert congruent_auto(w, w, VIR, 0)
    lhs, rhs = star_n(star_n(w, w, 0), w, 0), star_n(w, star_n(w, w, 0), 0)
    assert ctx.contains(lhs - rhs)
    for n in (0, 1):
        for p in VIR.basis_upto(4):
            v = VIR.state(p)
            assert congruent_auto(star_n(w, v, n), star_n(v, w, n), VIR, n)
    with pytest.raises(CutoffInsufficientError):
        ctx.contains(VIR.state((11,)))


def test_right_action_agrees_with_left_mod_on():
    w = VIR.omega()
    assert congruent_auto(star_n(w, w, 1), star_n_right(w, w, 1), VIR, 1)


def test_commutator_lies_in_on_w():
    for p in VERMA.basis_upto(3):
        x = VERMA.state(p)
        for v in (VIR.omega(), VIR.state((3,))):
            diff = star_n(v, x, 0) - star_n_right(x, v, 0) - zhu_commutator_residue(v, x)
            assert congruent_auto(diff, VERMA.zero(), VIR, 0, VARIANT_W, VERMA)
    x = VERMA.state((1,))
    assert zhu_commutator_residue(VIR.omega(), x) == L_act(-1, x) + L_act(0, x)


def test_an_tables():
    t = an_table(HEIS, 0, 4)
    assert t.filtration_dims() == [1, 2, 3, 4, 5]
    tv = an_table(VIR, 0, 6)
    one, om = {tv.identity: Q(1)}, tv.omega
    powers = [one, om]
    while len(powers) < 4:
        powers.append(tv.multiply(powers[-1], om))
    assert rref(powers).rank == 4
    for i in range(len(t.reps)):
        assert t.product(t.identity, i) == {i: 1}
        if (i, t.identity) not in t.flags:
            assert t.product(i, t.identity) == {i: 1}
        assert t.apply_theta(t.apply_theta({i: Q(1)})) == {i: 1}
    with pytest.raises(CutoffInsufficientError):
        t.product(len(t.reps) - 1, len(t.reps) - 1)


def test_psi_reduction():
    hi, lo = an_table(VIR, 1, 8), an_table(VIR, 0, 8)
    assert psi_n_reduce({hi.identity: Q(1)}, hi, lo) == {lo.identity: 1}
    assert psi_n_reduce(hi.omega, hi, lo) == lo.omega
    rng = random.Random(11)
    small = [i for i, p in enumerate(hi.reps) if sum(p) <= 3]
    for _ in range(10):
        i, j = rng.choice(small), rng.choice(small)
        x = psi_n_reduce(hi.product(i, j), hi, lo)
        y = lo.multiply(psi_n_reduce({i: Q(1)}, hi, lo), psi_n_reduce({j: Q(1)}, hi, lo))
        assert x == y
    with pytest.raises(ValueError):
        psi_n_reduce({0: Q(1)}, lo, hi)


def test_bimodule_actions():
    ctx = build_on_span(VIR, 0, 6, VARIANT_PRIME, VERMA)
    w = VERMA.state((1, 1))
    assert bimodule_act(VIR.vacuum(), w, "left", 0, ctx) == ctx.reduce(w)
    u = VIR.omega()
    assert ctx.contains(star_n(u, circ_n(u, VERMA.state((1,)), 0), 0))
    ctxw = build_on_span(VIR, 0, 6, VARIANT_W, VERMA)
    x = L_act(-1, w) + L_act(0, w)
    assert bimodule_act(u, x, "right", 0, ctxw).is_zero()
    with pytest.raises(ValueError):
        bimodule_act(u, w, "up", 0, ctx)


def test_one_dimensional_module_of_a0():
    h = Q(2, 7)
    U = AnModule(VIR, 0, 1, [(VIR.omega(), h)], level_limit=6)
    assert U.lowest_weight() == h
    w = VIR.omega()
    assert U.rho(star_n(w, w, 0)) == ((h * h,),)
    assert U.rho(VIR.vacuum()) == ((1,),)
