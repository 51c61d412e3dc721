"""Walk through A_n(V) for the Heisenberg and Virasoro VOAs.

Builds O_n(V) at a weight cutoff, lists representatives of the quotient,
multiplies a few classes and maps A_1 onto A_0.
"""

from voaforge import Q, construct_voa
from voaforge.anv import an_table, circ_n, congruent_auto, psi_n_reduce, star_n
from voaforge.cli import format_state
from voaforge.linalg import rref

heis = construct_voa("heisenberg")
vir = construct_voa("virasoro", Q(1, 2))

# The two products that define everything.
a = heis.generator()
print("a o_0 a =", format_state(circ_n(a, a, 0)))
print("a *_0 a =", format_state(star_n(a, a, 0)), "(twice omega)")

# A_0(M(1)) is a polynomial ring in [a]: one new class per weight.
t = an_table(heis, 0, 6)
print("\nA_0(M(1)) filtration dims up to weight 6:", t.filtration_dims())
print("representatives:", ", ".join(format_state(t.rep_state(i)) for i in range(len(t.reps))))

# A_0(Vir_c) is a polynomial ring in [omega].
tv = an_table(vir, 0, 8)
powers = [{tv.identity: Q(1)}, tv.omega]
for _ in range(2):
    powers.append(tv.multiply(powers[-1], tv.omega))
print("\nA_0(Vir_1/2): rank of 1, w, w*w, w*w*w =", rref(powers).rank)

# omega is central in every A_n, not just A_0.
w, v = vir.omega(), vir.state((3, 2))
for n in (0, 1, 2):
    verdict = congruent_auto(star_n(w, v, n), star_n(v, w, n), vir, n)
    print(f"n={n}: omega *_n v = v *_n omega mod O_n ->", verdict.status, f"(cutoff {verdict.cutoff})")

# The identity map of V induces A_1 -> A_0.
hi, lo = an_table(vir, 1, 8), an_table(vir, 0, 8)
print("\ndim A_1 classes up to weight 8:", len(hi.reps), " A_0:", len(lo.reps))
x = psi_n_reduce(hi.multiply(hi.omega, hi.omega), hi, lo)
y = lo.multiply(lo.omega, lo.omega)
print("psi_0([w] *_1 [w]) == psi_0([w]) *_0 psi_0([w]):", x == y)
