"""Exact and asymptotic tools for height-weighted random plane trees.

The package splits into tree structures (treecore), size-by-height
counting and partition values (heightcount), singularity constants and
closed strip forms (analytic), exact samplers (sampler), and ball-mass
comparisons against the local limit (locallimit).  The cli module wires
them into the arborlab command.
"""

from .analytic import (
    AnalyticConstant,
    WedgeCoefficients,
    alpha_branch,
    c_alpha,
    critical_point,
    eval_Dm,
    eval_Ln,
    eval_Xm,
    laurent_coeffs,
    leading_constant,
    log_amplitude,
    pole_residue,
    truncated_Wn,
    wedge_coefficients,
)
from .errors import (
    ArborlabError,
    AtBranchPointError,
    AtPoleError,
    CapExceededError,
    DivergentError,
    EmptyClassError,
    EmptyCodeError,
    ExtrapolationUnstableError,
    LogCaseError,
    MalformedCodeError,
    ModeMismatchError,
    OutOfRangeError,
    TooSmallError,
    TruncatedError,
    UnsupportedError,
)
from .heightcount import (
    CountTable,
    PartitionVector,
    build_count_table,
    catalan,
    load_table,
    partition_function,
    save_table,
    stream_partition_functions,
    truncated_partition,
    truncated_partition_scaled,
)
from .locallimit import (
    BallMassReport,
    ball_mass_sweep,
    empirical_ball_mass,
    exact_ball_mass,
    lambda_of,
    lambda_partial_sum,
)
from .sampler import (
    RngStream,
    rejection_sample_given_height,
    sample_bgw_branch,
    sample_mu,
    sample_height,
    sample_spine_degree,
    sample_uipt_ball,
    sample_uniform_given_height,
)
from .treecore import (
    BallSpec,
    Tree,
    ball,
    ball_spec,
    branch_iter,
    decode,
    dist,
    enumerate_trees,
    extract_branches,
    graft,
)

__version__ = "0.1.0"

__all__ = [
    "AnalyticConstant", "ArborlabError", "AtBranchPointError", "AtPoleError",
    "BallMassReport", "BallSpec", "CapExceededError", "CountTable",
    "DivergentError", "EmptyClassError", "EmptyCodeError",
    "ExtrapolationUnstableError", "LogCaseError", "MalformedCodeError",
    "ModeMismatchError", "OutOfRangeError", "PartitionVector", "RngStream",
    "TooSmallError", "TruncatedError", "Tree", "UnsupportedError",
    "WedgeCoefficients", "alpha_branch", "ball", "ball_mass_sweep",
    "ball_spec", "branch_iter", "build_count_table", "c_alpha", "catalan",
    "critical_point", "decode", "dist", "empirical_ball_mass",
    "enumerate_trees", "eval_Dm", "eval_Ln", "eval_Xm", "exact_ball_mass",
    "extract_branches", "graft", "lambda_of", "lambda_partial_sum",
    "laurent_coeffs", "leading_constant", "load_table", "log_amplitude",
    "partition_function", "pole_residue", "rejection_sample_given_height",
    "sample_bgw_branch", "sample_height", "sample_mu", "sample_spine_degree",
    "sample_uipt_ball", "sample_uniform_given_height", "save_table",
    "stream_partition_functions", "truncated_Wn", "truncated_partition",
    "truncated_partition_scaled", "wedge_coefficients",
]
