"""
How small can the norm ratio be for a PSD matrix?
=================================================

lambda(k) is the smallest (inf,1) / l1 ratio over k x k PSD matrices.  Small
sizes are searched directly; large sizes come from the sign Gram matrices,
which drive the bound to zero.
"""
from stablerkhs import lambda_bounds as lb

for k in range(1, 7):
    rec = lb.lambda_upper_search(k, budget=2000)
    print(k, rec.upper_bound, rec.method.value, rec.family)

# an equicorrelation matrix with rho = -1/2 gives 2/3 at k = 3
W = lb.equicorrelation(3, -0.5)
print(W)

# padding with a zero row and column keeps both norms
rec = lb.lambda_upper_search(3)
print(lb.embedding_monotonicity(rec).upper_bound)

for row in lb.fig1_curve(8):
    print(f"p={row.p}  n={row.n}  bound {row.bound:.6f}")

# how large a matrix before the bound drops below 10% and 1%
print(lb.first_p_below(0.1), lb.first_p_below(0.01))
