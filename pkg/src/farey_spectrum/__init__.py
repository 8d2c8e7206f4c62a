"""Dominant spectrum of the signed Farey transfer operators in a
generalized Laguerre basis.

Core entry points are re-exported here; the HTTP service and CLI live in
farey_spectrum.service and farey_spectrum.cli and are imported on demand
so that `import farey_spectrum` stays light.
"""

from ._version import __version__
from .eigensolver import (
    EigenPair,
    SweepCurve,
    SweepRecord,
    TruncationSweep,
    dominant_eigenpair,
    norm_partial_sums,
    q_sweep,
    truncation_sweep,
)
from .farey_matrix import (
    IdentityReport,
    SignChoice,
    TruncatedMatrix,
    build_c_matrix,
    build_truncation,
    check_identities,
    diag_d,
    entry_alpha,
    entry_c,
)
from .kernel_verify import (
    IntertwiningReport,
    apply_m,
    apply_n_q,
    basis_e,
    basis_ell,
    basis_f,
    basis_zeta,
    inner_product,
    matrix_element,
    verify_intertwining,
)
from .specfun import (
    QuadratureRule,
    bessel_j,
    gauss_laguerre,
    laguerre_eval,
    log_gamma,
    monomial_eval,
)
from .transfer_map import (
    EigenfunctionSeries,
    apply_transfer_pointwise,
    bq_transform_quadrature,
    eigen_residual,
    farey,
    reconstruct_eigenfunction,
    residual_table,
)

__all__ = [
    "EigenPair",
    "EigenfunctionSeries",
    "IdentityReport",
    "IntertwiningReport",
    "QuadratureRule",
    "SignChoice",
    "SweepCurve",
    "SweepRecord",
    "TruncatedMatrix",
    "TruncationSweep",
    "__version__",
    "apply_m",
    "apply_n_q",
    "apply_transfer_pointwise",
    "basis_e",
    "basis_ell",
    "basis_f",
    "basis_zeta",
    "bessel_j",
    "bq_transform_quadrature",
    "build_c_matrix",
    "build_truncation",
    "check_identities",
    "diag_d",
    "dominant_eigenpair",
    "eigen_residual",
    "entry_alpha",
    "entry_c",
    "farey",
    "gauss_laguerre",
    "inner_product",
    "laguerre_eval",
    "log_gamma",
    "matrix_element",
    "monomial_eval",
    "norm_partial_sums",
    "q_sweep",
    "reconstruct_eigenfunction",
    "residual_table",
    "truncation_sweep",
    "verify_intertwining",
]
