"""Certified upper and lower bounds on hereditary discrepancy.

The upper bound is the width of a minimum-width ellipsoid containing the
columns of the matrix; the lower bound is a spectral certificate built from a
column subset picked with the ellipsoid's dual weights. Exact enumeration
oracles are included for checking both at small sizes.
"""

from .approx import AlgorithmOptions, BoundsReport, approximate_herdisc, verify_report
from .bounds import (
    Coloring,
    GramAssignment,
    VecdiscOptions,
    banaszczyk_diagnostic,
    det_lb_exact,
    disc_exact,
    herdisc_exact,
    hvecdisc_exhaustive,
    komlos_spectral_solve,
    spectral_lb_value,
    vecdisc_dual_check,
    vecdisc_solve,
)
from .ellipsoid import (
    DualWitness,
    Ellipsoid,
    SolveDiagnostics,
    SolverOptions,
    dual_value,
    gaussian_width_mc,
    recover_primal,
    solve_min_linf_ellipsoid,
    solve_min_trace_ellipsoid,
)
from .errors import *  # noqa: F401,F403
from .instances import InstanceSpec, generate, load_matrix_csv, save_matrix_csv
from .linalg import (
    SpectralDecomposition,
    full_rank_reduce,
    nuclear_norm,
    psd_sqrt,
    simplex_project,
    spectrum,
)
from .restricted import (
    ExtractionTrace,
    RationalizedWeights,
    extract_spectral_subset,
    rationalize,
    rip_select,
    weighted_rip_select,
)

__version__ = "0.1.0"
