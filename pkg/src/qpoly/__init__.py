"""qpoly: q-gamma / q-polygamma evaluation with certified truncation bounds,
finite-difference product functionals, and machine verification of their
complete-monotonicity and convolution-inequality properties."""

from .analysis_props import RatioParams, h_second_deriv, verify_ratio_ineq, weight_u
from .combinatorics import (
    ExactSeq,
    LemmaReport,
    T_term,
    a_sequence,
    alpha_fraction,
    b_sequence,
    balanced_quads,
    beta_fraction,
    c_sequence,
    seq_a,
    seq_b,
    seq_c,
    seq_forward_diff,
    verify_conv_inequality,
    verify_power_sum_bounds,
    verify_proof_steps,
)
from .errors import DomainError, LengthError, NonConvergence, QNearOneError
from .functionals import (
    FDStep,
    F_classic,
    F_q_deriv,
    F_q_fd,
    G_q_deriv,
    G_q_fd,
    IndexQuad,
    d_const,
    fwd_diff,
    psi_q_order,
    structure_constants,
)
from .qspecial import (
    DEFAULT_BUDGET,
    PrecisionBudget,
    QPoint,
    SeriesValue,
    gamma_q,
    psi_classical_deriv,
    psi_q,
    psi_q_deriv,
    working_dps,
)
from .series_cm import (
    CertReport,
    CertStatus,
    CoeffTarget,
    F_inner_coeff,
    H_coeff,
    certify_cm_series,
    check_cm_grid,
)

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "QNearOneError",
    "NonConvergence",
    "LengthError",
    "PrecisionBudget",
    "QPoint",
    "SeriesValue",
    "DEFAULT_BUDGET",
    "working_dps",
    "gamma_q",
    "psi_q",
    "psi_q_deriv",
    "psi_classical_deriv",
    "IndexQuad",
    "FDStep",
    "structure_constants",
    "d_const",
    "fwd_diff",
    "psi_q_order",
    "F_q_fd",
    "G_q_fd",
    "F_q_deriv",
    "G_q_deriv",
    "F_classic",
    "CertStatus",
    "CoeffTarget",
    "CertReport",
    "H_coeff",
    "F_inner_coeff",
    "certify_cm_series",
    "check_cm_grid",
    "ExactSeq",
    "LemmaReport",
    "alpha_fraction",
    "beta_fraction",
    "seq_a",
    "seq_b",
    "seq_c",
    "T_term",
    "a_sequence",
    "b_sequence",
    "c_sequence",
    "seq_forward_diff",
    "balanced_quads",
    "verify_conv_inequality",
    "verify_proof_steps",
    "verify_power_sum_bounds",
    "RatioParams",
    "h_second_deriv",
    "verify_ratio_ineq",
    "weight_u",
    "__version__",
]
