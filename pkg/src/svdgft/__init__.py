"""SVD-based graph Fourier transform on directed graphs."""

__version__ = "0.1.0"

from ._errors import ConsistencyError, GraphFormatError, GraphValidationError, HypothesisViolation
from .graph import (
    DirectedGraph,
    adjacency_matrix,
    build_laplacian,
    circulant_graph,
    cluster_cycle_graph,
    is_eulerian,
    is_strongly_connected,
    knn_graph,
    load_graph,
    random_digraph,
    random_eulerian_graph,
    random_undirected_graph,
    save_graph,
    transpose,
)
from .gft import (
    GftCoefficients,
    SvdBasis,
    bandlimit,
    dilation,
    energy_curve,
    energy_profile,
    gft,
    gft_matrix,
    igft,
    svd_basis,
)
from .variation import all_metrics, dv, gdv, l2_variation, quadratic_variation
from .circulant import factorized_svd, theorem1_gft
from .eulerian import (
    EulerianPath,
    check_necessary_condition,
    check_reflection,
    d_sigma,
    d_uv,
    laplacian_t,
    sigma_asym,
    svd_path,
)
from .denoise import DenoiseReport, ExperimentConfig, add_noise, isnr, piecewise_signal, run_experiment, snr
