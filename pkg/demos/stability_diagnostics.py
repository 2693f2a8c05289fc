"""
Finite-horizon stability diagnostics
====================================

Each probe looks at leading sections only, so a verdict is evidence, not a
proof.  Three kernels, three different pictures.
"""
from stablerkhs import kernels as kn
from stablerkhs import stability as st

# absolutely summable: the tail has a closed form
r = st.stability_report(kn.stable_spline(0.9), T_max=800)
print(r.verdict.value, r.l1_partial[-1])

# the constant kernel blows up quadratically on the all-ones input
r = st.stability_report(kn.constant_kernel(1), T_max=100)
print(r.verdict.value, r.witness_growth["all_ones"][-3:])

# harmonic l1 mass against a convergent operator norm
r = st.stability_report(kn.counterexample_s(), blocks=10)
print(r.verdict.value)
for (t, l1), (_, op) in zip(r.l1_partial, r.opnorm_partial):
    print(f"{t:3d}  {float(l1):.4f}  {float(op):.4f}")
print(r.notes)
