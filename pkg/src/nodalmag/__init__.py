"""Magnetic perturbations of discrete Schrödinger operators on graphs and the
nodal count of their eigenvectors.

The eigenvalue ``lambda_n(alpha)`` of a graph with magnetic phases ``alpha``
on its surplus edges has a critical point at zero flux whose Morse index
equals the nodal surplus of the ``n``-th eigenvector. This package builds the
operators, counts sign changes, computes that Morse index two ways, and checks
the companion statements about cut trees and interlacing over seeded random
ensembles.
"""

from .criticality import (
    CriticalityReport,
    analytic_gradient,
    gradient_at_zero,
    hessian_fd,
    hessian_pt,
    lambda_of_alpha,
    morse_report,
    morse_reports,
)
from .duality import (
    ScanTable,
    band_scan,
    dual_scan,
    extrema_match,
    interlace_check,
    interlace_grid,
    transfer,
    tree_index,
)
from .ensemble import InstanceSpec, VerificationSummary, random_instance, run_verify, verify_graph
from .errors import (
    ConvergenceFailure,
    DegenerateEigenvalue,
    DimensionMismatch,
    Disconnected,
    DuplicateEdge,
    GammaZeroOrInfinite,
    GraphError,
    InfeasibleBeta,
    LoopEdge,
    NodalMagError,
    NonGenericLevel,
    ParseError,
    RequestedEdgeNotSurplus,
    VanishingEntry,
    VertexOutOfRange,
)
from .graph import CycleStructure, Graph, build_graph, cycle_structure
from .io import parse_graph_file, parse_graph_text, write_graph_file
from .kernels import BACKEND
from .nodal import NodalReport, nodal_report, nodal_reports, sign_changes
from .operators import (
    build_cut,
    build_gammahat,
    build_magnetic,
    build_plain,
    cut_one,
    decorated_operator,
    flux,
    perturbation_matrix,
    reduce_gauge,
)
from .spectral import (
    Inertia,
    SpectralDecomposition,
    eig,
    eigenvalue_derivative,
    eigvals,
    quadform_inertia,
)

__version__ = "0.1.0"
