import random

import pytest

from voaforge.anv import AnModule, star_n, star_n_right
from voaforge.formal import RationalFunctionWithPoles
from voaforge.linalg import Q
from voaforge.regrep import (AnnihilationError, NotCertifiedError, certify_hom_anw, deform_mode_eval,
                             deform_round_trip_eval, dual_bimodule_action, dual_basis_functional,
                             generated_submodule, in_omega, induce, induce_level_limit, jacobi_window_check,
                             matrix_coeff_rational, mode_eval, mode_image, nilpotency_check,
                             o_deformed_action, omega_n_basis, random_finite_functional, random_hom_anw,
                             sigma_check, tensor_omega_defects, verma_oracle, yl_mode_eval, yr_mode_eval)
from voaforge.voa import construct_voa, theta_apply

HEIS = construct_voa("heisenberg")
VIR = construct_voa("virasoro", Q(1, 2))


def vacuum_dual(V):
    return certify_hom_anw(dual_basis_functional(V, V, ()), 0)


def test_matrix_coefficients():
    f = vacuum_dual(HEIS)
    a, one = HEIS.generator(), HEIS.vacuum()
    R = matrix_coeff_rational(f, a, a)
    assert R == RationalFunctionWithPoles([-1], 0, 0, -1)
    w = HEIS.state((1, 1))
    assert matrix_coeff_rational(f, one, w) == RationalFunctionWithPoles([0], 0, 0, -1)
    assert matrix_coeff_rational(f, one, one) == RationalFunctionWithPoles([1], 0, 0, -1)
    g = vacuum_dual(VIR)
    assert matrix_coeff_rational(g, VIR.omega(), VIR.vacuum()).is_zero()


def test_mode_actions_of_the_vacuum():
    f = vacuum_dual(HEIS)
    w = HEIS.vacuum()
    for m in range(-3, 3):
        expect = f(w) if m == -1 else (0,)
        assert yr_mode_eval(HEIS.vacuum(), m, f, w) == expect
        assert yl_mode_eval(HEIS.vacuum(), m, f, w) == expect
    a = HEIS.generator()
    assert yr_mode_eval(a, -1, f, a) == (-1,)


def test_left_modes_need_a_certificate():
    g = random_finite_functional(HEIS, HEIS, 2, random.Random(1))
    yr_mode_eval(HEIS.generator(), 0, g, HEIS.generator())
    with pytest.raises(NotCertifiedError):
        yl_mode_eval(HEIS.generator(), 0, g, HEIS.generator())


def test_right_images_of_finite_functionals_stay_finite():
    g = random_finite_functional(VIR, VIR, 4, random.Random(2)).certified()
    v = VIR.omega()
    img = mode_image("R", v, 3, g)
    # v_m lowers the level by m + 1 - wt v = 2, so the support grows by 2
    for p in VIR.basis(8) + VIR.basis(7):
        assert not any(img(VIR.state(p)))


def test_left_and_right_modes_commute():
    rng = random.Random(4)
    f = random_hom_anw(VIR, VIR, 0, 14, rng)
    u, v = VIR.omega(), VIR.state((3,))
    for p, q in [(1, 0), (-1, 2), (0, -2)]:
        for wp in VIR.basis_upto(3):
            w = VIR.state(wp)
            lr = mode_image("L", u, p, mode_image("R", v, q, f))(w)
            rl = mode_image("R", v, q, mode_image("L", u, p, f))(w)
            assert lr == rl


def test_jacobi_windows():
    f = vacuum_dual(HEIS)
    for v in (HEIS.vacuum(), HEIS.generator()):
        verdict = jacobi_window_check(v, f, HEIS.generator(), (-3, 3), (-3, 3))
        assert verdict and verdict.checked == 49
    g = random_hom_anw(VIR, VIR, 0, 10, random.Random(6))
    assert jacobi_window_check(VIR.omega(), g, VIR.omega())


def test_certification():
    f = vacuum_dual(VIR)
    assert f.cert == (0, 0)
    bad = dual_basis_functional(VIR, VIR, (2,))
    with pytest.raises(AnnihilationError) as err:
        certify_hom_anw(bad, 0)
    v, w = err.value.witness
    assert v == VIR.omega() and w == VIR.vacuum()


def test_deformation_routes():
    rng = random.Random(8)
    f = random_hom_anw(HEIS, HEIS, 0, 10, rng)
    a = HEIS.generator()
    for side in ("L", "R"):
        for m in range(-2, 2):
            for w in (HEIS.vacuum(), a, HEIS.state((2,))):
                assert deform_mode_eval(side, 0, a, m, f, w) == mode_eval(side, a, m, f, w)
                assert deform_round_trip_eval(side, Q(1, 2), a, m, f, w) == mode_eval(side, a, m, f, w)


def test_o_operators():
    f = vacuum_dual(HEIS)
    a = HEIS.generator()
    assert o_deformed_action("L", a, f, a) == f(star_n(a, a, 0)) == (0,)
    one = HEIS.vacuum()
    for w in (one, a):
        assert o_deformed_action("L", one, f, w) == f(w)
    g = random_hom_anw(VIR, VIR, 0, 10, random.Random(9), rep_level=4)
    om = VIR.omega()
    left = o_deformed_action("L", om, g, om)
    assert left == g(star_n_right(om, om, 0)) and left != (0,)
    assert o_deformed_action("R", om, g, om) == g(star_n(theta_apply(om), om, 0))


def test_dual_bimodule_action():
    g = random_hom_anw(VIR, VIR, 0, 10, random.Random(10))
    one, om = VIR.vacuum(), VIR.omega()
    for p in VIR.basis_upto(4):
        w = VIR.state(p)
        assert dual_bimodule_action(one, one, g, w, 0) == g(w)
        assert dual_bimodule_action(om, one, g, w, 0) == g(star_n_right(w, om, 0))


def test_sigma_at_level_zero():
    f = vacuum_dual(HEIS)
    a, one = HEIS.generator(), HEIS.vacuum()
    samples = [(one, one, one)] + [(a, one, HEIS.state(p)) for p in HEIS.basis_upto(3)]
    assert sigma_check(f, samples, 0, sign=-1)


def test_omega_spaces():
    W = VIR.verma(Q(2, 9))
    assert omega_n_basis(W, VIR, -1, 3).dims == [0, 0, 0, 0]
    assert omega_n_basis(W, VIR, 0, 4).dims == [1, 0, 0, 0, 0]
    om1 = omega_n_basis(HEIS, HEIS, 1, 1)
    assert om1.dim == 2 and om1.candidate
    F = HEIS.fock(Q(1, 2))
    dims = [omega_n_basis(F, HEIS, n, 3).dims for n in range(3)]
    for lo, hi in zip(dims, dims[1:]):
        assert all(x <= y for x, y in zip(lo, hi))
    for b in omega_n_basis(F, HEIS, 0, 3).basis:
        assert in_omega(b, HEIS, 1)


def test_nilpotency_needs_one_more_power():
    W = VIR.verma(Q(2, 9))
    L1 = VIR.omega()
    assert nilpotency_check(L1, 2, 1, W, 3, exponent=2)
    weak = nilpotency_check(L1, 2, 1, W, 3)
    assert not weak and weak.witnesses
    with pytest.raises(ValueError):
        nilpotency_check(L1, 1, 1, W, 3)


def test_generated_submodules():
    g = generated_submodule(HEIS, HEIS, [HEIS.vacuum()], 4)
    assert g.dims == [1, 1, 2, 3, 5] and g.stable
    z = generated_submodule(HEIS, HEIS, [HEIS.zero()], 3)
    assert z.dims == [0, 0, 0, 0]


def test_induced_modules():
    empty = AnModule(VIR, 0, 0, [])
    assert induce(VIR, 0, empty, 3).dims == [0, 0, 0, 0]
    K = 3
    U = AnModule(VIR, 0, 1, [(VIR.omega(), Q(3, 11))], level_limit=induce_level_limit(VIR, 0, K))
    res = induce(VIR, 0, U, K, oracle=verma_oracle(K))
    assert res.dims == [1, 1, 2, 3] and res.matches_oracle and res.support_ok
    assert res.h == Q(3, 11)
    F = AnModule(HEIS, 0, 1, [(HEIS.generator(), Q(1, 2))], level_limit=induce_level_limit(HEIS, 0, K))
    assert induce(HEIS, 0, F, K).dims == [1, 1, 2, 3]


def test_tensor_omega_is_smaller_than_the_intersection_at_n_1():
    a, one = HEIS.generator(), HEIS.vacuum()
    f0 = random_hom_anw(HEIS, HEIS, 0, 8, random.Random(1), rep_level=3)
    assert tensor_omega_defects(f0, 0, [(a, a)], [one, a]) == []
    f1 = random_hom_anw(HEIS, HEIS, 1, 8, random.Random(1), rep_level=3)
    # f1 is killed by a^L_{1+m} and a^R_{1+m} for m >= 1, yet (a (x) a)_3 f1 != 0
    for m in range(1, 4):
        for w in (one, a, HEIS.state((1, 1))):
            assert not any(yl_mode_eval(a, 1 + m, f1, w)) and not any(yr_mode_eval(a, 1 + m, f1, w))
    ((u, v, m, w, val),) = tensor_omega_defects(f1, 1, [(a, a)], [one])
    assert (m, w) == (1, one) and val == (Q(-45, 7),)
