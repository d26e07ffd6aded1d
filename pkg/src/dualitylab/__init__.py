"""Numerical laboratory for wave-particle duality in n-path interference.

Models a quanton crossing n paths while a which-path detector records (and
partially leaks) path information, and computes every associated duality
quantity: pairwise fringe visibilities and unambiguous-discrimination
distinguishabilities, their exact closure identity, n-path coherence and
distinguishability with the duality bound C + D_Q <= 1, simulated far-field
fringe patterns with Michelson contrast extraction, selective-decoherence
scans, and the optimal two-state unambiguous-discrimination POVM with a
seeded Monte Carlo verification harness.
"""

from .core_state import (
    CheckResult,
    InterferometerState,
    StateDiagnostics,
    build_mixed_state,
    build_pure_state,
    effective_density,
    validate,
)
from .errors import (
    ConfigError,
    DarkPairError,
    DarkPatternError,
    DimensionError,
    DualityLabError,
    NormalizationError,
    RegimeError,
    ValidationError,
)
from .fringes import (
    FringeProfile,
    MeiWeitzScan,
    SlitGeometry,
    extract_visibility,
    intensity_profile,
    mei_weitz_scan,
    two_slit_pattern,
)
from .multipath import (
    DualityReport,
    coherence,
    coherence_from_pair_visibilities,
    distinguishability,
    distinguishability_from_pairs,
    duality_report,
    is_symmetric,
)
from .pairwise import (
    PairMetrics,
    open_pair,
    pair_distinguishability,
    pair_metrics,
    pair_visibility,
)
from .uqsd import (
    SimulationResult,
    SuccessProbability,
    UqsdPovm,
    UqsdProblem,
    build_povm,
    simulate,
    success_probability,
)

__version__ = "0.1.0"

__all__ = [
    "CheckResult",
    "ConfigError",
    "DarkPairError",
    "DarkPatternError",
    "DimensionError",
    "DualityLabError",
    "DualityReport",
    "FringeProfile",
    "InterferometerState",
    "MeiWeitzScan",
    "NormalizationError",
    "PairMetrics",
    "RegimeError",
    "SimulationResult",
    "SlitGeometry",
    "StateDiagnostics",
    "SuccessProbability",
    "UqsdPovm",
    "UqsdProblem",
    "ValidationError",
    "build_mixed_state",
    "build_povm",
    "build_pure_state",
    "coherence",
    "coherence_from_pair_visibilities",
    "distinguishability",
    "distinguishability_from_pairs",
    "duality_report",
    "effective_density",
    "extract_visibility",
    "intensity_profile",
    "is_symmetric",
    "mei_weitz_scan",
    "open_pair",
    "pair_distinguishability",
    "pair_metrics",
    "pair_visibility",
    "simulate",
    "success_probability",
    "two_slit_pattern",
    "validate",
    "__version__",
]
