"""Flow-aware ellipsoidal filtration and topological denoising of recurrent signals."""

from recurrent_tda.denoise import (
    AXIS_EQUALIZATION,
    DenoiseParams,
    NoDominantFrequencyError,
    TopologicalResult,
    adaptive_moving_average,
    dominant_frequency,
    equalized_axes,
    knn_denoise,
    moving_average,
    neighborhoods_at_scale,
    topological_denoise,
    topological_smooth,
)
from recurrent_tda.estimators import (
    AdaptiveMovingAverageDenoiser,
    KNNDenoiser,
    MovingAverageDenoiser,
    TopologicalDenoiser,
)
from recurrent_tda.experiment import (
    ConfigError,
    ExperimentConfig,
    parse_config,
    run_experiment,
)
from recurrent_tda.filtration import (
    FilteredComplex,
    FilteredSimplex,
    build_complex,
    cone_scale,
    pairwise_scales,
)
from recurrent_tda.frames import SignalFrame, read_signal_csv, write_signal_csv
from recurrent_tda.geometry import (
    Ellipsoid,
    GradientConfig,
    estimate_gradients,
    gradient_field,
    intersection_scale,
    overlap_kernel,
    pairwise_scale_matrix,
    shape_from_gradient,
)
from recurrent_tda.persistence import (
    NoRecurrentLoopError,
    PersistenceDiagram,
    PersistencePair,
    compute_diagram,
    most_persistent_feature,
    read_diagram_csv,
    write_diagram_csv,
)
from recurrent_tda.synth import (
    NoiseSpec,
    SignalSpec,
    add_noise,
    generate_signal,
    rmse,
    squeeze,
)

__version__ = "0.1.0"

__all__ = [
    "AXIS_EQUALIZATION",
    "AdaptiveMovingAverageDenoiser",
    "ConfigError",
    "DenoiseParams",
    "Ellipsoid",
    "ExperimentConfig",
    "FilteredComplex",
    "FilteredSimplex",
    "GradientConfig",
    "KNNDenoiser",
    "MovingAverageDenoiser",
    "NoDominantFrequencyError",
    "NoRecurrentLoopError",
    "NoiseSpec",
    "PersistenceDiagram",
    "PersistencePair",
    "SignalFrame",
    "SignalSpec",
    "TopologicalDenoiser",
    "TopologicalResult",
    "adaptive_moving_average",
    "add_noise",
    "build_complex",
    "compute_diagram",
    "cone_scale",
    "dominant_frequency",
    "equalized_axes",
    "estimate_gradients",
    "generate_signal",
    "gradient_field",
    "intersection_scale",
    "knn_denoise",
    "most_persistent_feature",
    "moving_average",
    "neighborhoods_at_scale",
    "overlap_kernel",
    "pairwise_scale_matrix",
    "pairwise_scales",
    "parse_config",
    "read_diagram_csv",
    "read_signal_csv",
    "rmse",
    "run_experiment",
    "shape_from_gradient",
    "squeeze",
    "topological_denoise",
    "topological_smooth",
    "write_diagram_csv",
    "write_signal_csv",
]
