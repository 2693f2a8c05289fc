"""
Block-diagonal kernels that are stable but not absolutely summable
==================================================================

Block h is a sign Gram matrix (or a rectangular sign matrix) scaled so that
its l1 mass is 1/h.  The total mass is the harmonic series, yet the
operator norms decay like h^(-3/2) and sum to a finite value.
"""
import numpy as np

from stablerkhs import kernels as kn

k = kn.counterexample_s()
s = k.block_schedule
for h in range(1, 7):
    print(f"block {h}: size {s.block_row_size(h):6d}  l1 {s.block_l1(h)}  opnorm {float(s.block_opnorm(h)):.5f}")

# a finite section crosses block boundaries cleanly
sec = kn.finite_section(k, 40)
print(sec.matrix.to_float()[6:10, 6:10])
print(kn.psd_check(sec))

# the rectangular version
v = kn.counterexample_v()
print(v.entry(1, 1), v.entry(9, 4))
print(np.array([float(v.block_schedule.block_opnorm(p)) for p in range(1, 8)]))
