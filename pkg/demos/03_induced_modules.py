"""Induce V-modules from one-dimensional A_0(V)-modules and compare the
graded dimensions with the Verma and Fock oracles.  At a degenerate point
the Gram determinant explains the missing vector.
"""

from voaforge import Q, construct_voa
from voaforge.anv import AnModule
from voaforge.regrep import generated_submodule, induce, induce_level_limit, verma_oracle
from voaforge.voa import gram_determinant

K = 4
print("partition oracle:", verma_oracle(K))

for c, h in [(Q(1, 3), Q(2, 7)), (Q(7, 10), Q(3, 80))]:
    vir = construct_voa("virasoro", c)
    U = AnModule(vir, 0, 1, [(vir.omega(), h)], level_limit=induce_level_limit(vir, 0, K))
    res = induce(vir, 0, U, K, oracle=verma_oracle(K))
    dets = [gram_determinant(vir.verma(h), k) for k in range(K + 1)]
    print(f"\nc={c}, h={h}: induced dims {res.dims}, equal to oracle: {res.matches_oracle}")
    print("  Gram determinants by level:", [str(d) for d in dets])
    print("  nothing below level 0:", res.support_ok)

heis = construct_voa("heisenberg")
U = AnModule(heis, 0, 1, [(heis.generator(), Q(0))], level_limit=induce_level_limit(heis, 0, 5))
print("\nHeisenberg, [a] acting by 0:", induce(heis, 0, U, 5).dims)

# The vacuum generates V in one pass of single modes.
g = generated_submodule(heis, heis, [heis.vacuum()], 5)
print("submodule generated by the vacuum:", g.dims, "stable on a second pass:", g.stable)
