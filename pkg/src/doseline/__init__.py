"""Air dose-rate continuation along a line.

Forward model (1/r^2 volume potential on a masked tensor grid), weighted
Tikhonov reconstruction from segment data, and empirical Hoelder-stability
probes between two segments of the same line.
"""

from .errors import (
    ConfigError,
    DegenerateSegmentError,
    DoselineError,
    EmptyQuadratureError,
    InvalidDataError,
    NumericalFailure,
    PreconditionError,
    SingularEvaluationError,
)
from .forward import (
    KernelMatrix,
    SourceField,
    assemble_kernel,
    eval_extension,
    eval_field,
    laplacian_residual,
    paper_source,
)
from .geometry import (
    Box,
    Domain,
    HalfBall,
    QuadratureGrid,
    Segment,
    SegmentSampling,
    build_grid,
    distance_to_domain,
    sample_segment,
)
from .inverse import (
    Measurement,
    Reconstruction,
    add_noise,
    choose_alpha,
    measure,
    reconstruct_field,
    solve_least_norm,
    solve_tikhonov,
)
from .probe import (
    StabilityReport,
    fit_envelope,
    generate_ensemble,
    run_probe,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DegenerateSegmentError",
    "DoselineError",
    "EmptyQuadratureError",
    "InvalidDataError",
    "NumericalFailure",
    "PreconditionError",
    "SingularEvaluationError",
    "KernelMatrix",
    "SourceField",
    "assemble_kernel",
    "eval_extension",
    "eval_field",
    "laplacian_residual",
    "paper_source",
    "Box",
    "Domain",
    "HalfBall",
    "QuadratureGrid",
    "Segment",
    "SegmentSampling",
    "build_grid",
    "distance_to_domain",
    "sample_segment",
    "Measurement",
    "Reconstruction",
    "add_noise",
    "choose_alpha",
    "measure",
    "reconstruct_field",
    "solve_least_norm",
    "solve_tikhonov",
    "StabilityReport",
    "fit_envelope",
    "generate_ensemble",
    "run_probe",
]
