"""
Sign matrices and their two norms
=================================

The matrix V lists every +-1 pattern of length m = 2p + 1 as a row.  Its
entrywise l1 norm is simply m * n; the (inf, 1) operator norm has a closed
form that we cross-check against vertex enumeration and a Stirling estimate.
"""
import numpy as np

from stablerkhs import finite_norms as fn
from stablerkhs import sign_matrix as sm

spec = sm.SignMatrixSpec(1)
V = sm.dense(spec)
print(V)

# the columns are orthogonal: V^T V = n I
print(V.T @ V)

# closed form vs. brute force over all 2^m sign vectors
print("closed form:", sm.opnorm_inf1_closed(spec))
print("enumeration:", fn.opnorm_inf1_bruteforce(V).opnorm_inf1)

# the estimate 2 n sqrt(p / pi) gets relatively better as p grows
for p in (1, 5, 10, 50, 200):
    err = sm.asymptotic_relative_error(sm.SignMatrixSpec(p))
    print(f"p={p:4d}  relative error {err:.4f}")

# products never need the full matrix: rows are streamed in blocks
u = np.ones(sm.SignMatrixSpec(8).m, dtype=int)
print("|V u|_1 at p=8:", sm.apply(sm.SignMatrixSpec(8), u).l1)
