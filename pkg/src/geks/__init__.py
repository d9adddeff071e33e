"""Score and kernel-machine tests for SNP-set main effects and gene-environment interaction."""

from .errors import *  # noqa: F401,F403
from .kernel import (
    KernelPair,
    KernelSpec,
    KernelTestResult,
    build_kernels,
    combined_pvalue,
    km_test,
    moment_match,
    q_moments,
    q_statistics,
    standardize_q,
)
from .linalg import SpdFactor, matmul, numerical_rank, spd_factor, sym_inv_sqrt_2x2, trace_prod
from .null_model import Dataset, NullFit, build_p0, fit_null, make_dataset
from .score import InformationBlocks, ScoreTestResult, ge_score_test, information_blocks
from .simulate import SimConfig, UniformStream, simulate
from .special import ChiSquareParams, chi2_cdf, chi2_sf, reg_lower_gamma

__version__ = "0.1.0"
