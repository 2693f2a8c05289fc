"""
The sign Gram matrix
====================

M = V V^T has entry m - 2 popcount(i xor j).  Its (inf, 1) norm is exactly
n^2 while its entrywise l1 norm grows like n^2 sqrt(4p / pi), so the ratio
of the two norms shrinks to zero.
"""
from stablerkhs import finite_norms as fn
from stablerkhs import gram as gm
from stablerkhs import sign_matrix as sm

g = gm.GramSpec.from_p(1)
M = gm.dense(g)
print(M)

rep = fn.opnorm_inf1_bruteforce(M)
print("(inf,1) norm:", rep.opnorm_inf1, " l1 norm:", rep.l1_entrywise)

# the all-ones vector is in the kernel; columns of V are maximizers
V = sm.dense(g.base)
print("|M 1|_1 =", fn.l1_of_product(M, [1] * g.n))
print("|M v|_1 =", fn.l1_of_product(M, V[:, 0]))

# the sphere problem max a^T M a over |a|_2 = 1 hits n^2 on a vertex
print(gm.mstar_value(g))

for p in (1, 2, 5, 10, 50, 500):
    r = gm.ratio(gm.GramSpec.from_p(p))
    print(f"p={p:4d}  ratio {float(r.exact):.6f}  sqrt(pi/4p) {r.asymptote:.6f}")
