"""Functionals on V as a module: the left and right vertex operator actions,
their deformations, and the intertwiner between the two bimodule actions.
"""

import random

from voaforge import Q, construct_voa, fmt
from voaforge.anv import star_n_right
from voaforge.regrep import (certify_hom_anw, dual_basis_functional, matrix_coeff_rational,
                             mode_image, o_deformed_action, random_hom_anw, sigma_check, tensor_omega_defects,
                             yl_mode_eval, yr_mode_eval)

rng = random.Random(0)
heis = construct_voa("heisenberg")
vir = construct_voa("virasoro", Q(1, 2))

# A functional annihilating O'_0(V) carries a pole certificate; its matrix
# coefficients against Y^o are rational with poles only at 0 and -1.
f = certify_hom_anw(dual_basis_functional(heis, heis, ()), 0)
a = heis.generator()
R = matrix_coeff_rational(f, a, a)
print("<1*, f Y^o(a,x) a> =", fmt(R.num[0]), f"with pole orders {R.l} at 0 and {R.k} at -1")
print("right mode a^R_-1 f at a:", fmt(yr_mode_eval(a, -1, f, a)[0]))
print("left  mode a^L_-1 f at a:", fmt(yl_mode_eval(a, -1, f, a)[0]))

# The two actions commute.
g = random_hom_anw(vir, vir, 0, 14, rng, rep_level=4)
om, L3 = vir.omega(), vir.state((3,))
w = vir.state((2, 2))
lr = mode_image("L", om, -1, mode_image("R", L3, 1, g))(w)
rl = mode_image("R", L3, 1, mode_image("L", om, -1, g))(w)
print("\nY^L and Y^R modes commute:", lr == rl, "value", fmt(lr[0]))

# The deformed residue reproduces the right *_n action.
print("o_L(omega) g (omega) =", fmt(o_deformed_action("L", om, g, om)[0]),
      "  g(omega *_0 omega) =", fmt(g(star_n_right(om, om, 0))[0]))

# sigma = exp(+-(L^R(1) - L^L(1))) intertwines the dual bimodule action with
# the o-operator action.  Only the minus sign works once n >= 1.
g1 = random_hom_anw(vir, vir, 1, 16, rng, rep_level=3)
samples = [(om, vir.vacuum(), vir.state(p)) for p in vir.basis_upto(3)]
for sign in (1, -1):
    verdict = sigma_check(g1, samples, 1, sign=sign)
    print(f"n=1 sign {sign:+d}: {verdict.checked - len(verdict.mismatches)}/{verdict.checked} samples intertwined")

# Omega_n(D) for the V (x) V action sits inside Omega_n(Y^L) cap Omega_n(Y^R).
# At n = 0 they agree; at n = 1 a certified functional already breaks it.
one = heis.vacuum()
for n in (0, 1):
    h = random_hom_anw(heis, heis, n, 8, random.Random(1), rep_level=3)
    defects = tensor_omega_defects(h, n, [(a, a)], [one, a])
    print(f"\nn={n}: tensor Omega_n defects among (a (x) a)-modes:", len(defects))
    for u, v, m, w, val in defects:
        print(f"  (a (x) a)_(2+{m}) f at {w!r}: {fmt(val[0])}")
