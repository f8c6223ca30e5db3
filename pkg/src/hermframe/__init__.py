"""hermframe: frames localized against the Hermite basis, at finite truncation.

A numerical engine for frame expansions of smooth, rapidly decaying
functions and their dual (distribution-like) functionals: stable Hermite
evaluation and quadrature, graded weighted sequence norms, frame bounds and
canonical duals, envelope localization checks, and end-to-end expansion
verification experiments with machine-readable reports.
"""

__version__ = "0.1.0"

from .hermite import (
    CoefficientVector,
    HermiteContext,
    IndexOrigin,
    QuadratureDomainError,
    apply_operator,
    as_coefficients,
    gauss_hermite_nodes,
)
from .seqspaces import (
    DecayClassification,
    GradedNorms,
    WeightFamily,
    classify_decay,
    dual_pairing_bound,
    dual_pairing_trend,
    moderation_constant,
    polynomial_weights,
    sub_exponential_weights,
    weighted_norm,
)
from .frames import (
    DualSolveError,
    FBoundednessTable,
    FrameBounds,
    FrameSystem,
    ReconstructionDefect,
    RieszDiagnostics,
    analyze,
    canonical_dual,
    frame_bounds,
    frame_inequality_margins,
    from_hermite_coeffs,
    graded_operator_norms,
    is_riesz_basis,
    reconstruct,
    synthesize_frame,
    unconditionality_probe,
)
from .localization import (
    CrossGram,
    LocalizationReport,
    check_exponential_localization,
    check_polynomial_localization,
    check_self_localization,
    cross_gram,
    offset_profile,
)
from .genfunc import (
    DistributionFunctional,
    ExpansionReport,
    ExpolHypothesisError,
    TestFunction,
    build_expol_frame,
    coordinate_functional,
    corpus_standard,
    delta_functional,
    frame_pair,
    gevrey_seminorm,
    induced_functional,
    ingest,
    load_corpus_manifest,
    pair,
    regular_functional,
    schwartz_seminorm,
    verify_expansion_theorem,
)
from .config import ConfigError, ExperimentConfig, preset
from .experiment import RunResult, run_experiment

__all__ = [name for name in dir() if not name.startswith("_")]
