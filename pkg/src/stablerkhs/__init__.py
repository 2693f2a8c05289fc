"""Sign-matrix constructions showing that absolute summability is not
necessary for a kernel to define a stable RKHS, with exact brute-force oracles.
"""
from .errors import BudgetError, ConsistencyError, ContractError
from .finite_norms import DenseMatrix, NormReport, l1_entrywise, norm_ratio, opnorm_inf1_bruteforce
from .gram import GramSpec
from .kernels import (
    BlockSchedule,
    FiniteSection,
    KernelHandle,
    constant_kernel,
    counterexample_s,
    counterexample_v,
    finite_section,
    psd_check,
    stable_spline,
)
from .lambda_bounds import LambdaBoundRecord, fig1_curve, lambda_upper_search
from .sign_matrix import SignMatrixSpec
from .stability import StabilityReport, Verdict, stability_report

__version__ = "0.1.0"
