"""Delay-Doppler statistics of single-bounce scattering confined to a
plane between two mobile terminals, in prolate spheroidal coordinates."""

from .config import OracleConfig, RunConfig, Snapshot, load_config
from .density import (
    QuadratureError,
    delay_pdf,
    doppler_support,
    joint_cell_probabilities,
    joint_pdf,
    weight,
    weighted_area_complementary,
    weighted_area_general,
)
from .doppler import (
    DopplerBranch,
    branch_doppler,
    branch_doppler_deriv,
    complementary_frequencies,
    doppler_at,
    limiting_frequency_inf,
    parallel_projection,
)
from .geometry import (
    DelayRange,
    PlaneCoeffs,
    PscPoint,
    Scenario,
    band_residual,
    build_local_scenario,
    eta_bounds,
    from_cartesian,
    to_cartesian,
    xi_sr,
)
from .io import export_surface, import_surface
from .mc import (
    ChannelRealization,
    ScattererSet,
    empirical_surface,
    estimate_Ph,
    estimate_RL,
    sample_scatterers,
    synthesize_channel,
)
from .moments import (
    CoherenceMetrics,
    CoherenceRangeError,
    MomentCrossCheckError,
    MomentReport,
    bessel_limit_cf,
    coherence_metrics,
    conditional_doppler_moments,
    delay_moments,
    jakes_limit_pdf,
)
from .runner import run
from .surfaces import ComplexSurface, GridSpec
from .svgplot import emit_plot
from .transforms import (
    SnapshotStack,
    conditional_normalize,
    delay_axis_transform,
    doppler_axis_transform,
    hybrid_freq_doppler,
    hybrid_time_delay,
    hybrid_time_delay_complementary,
    joint_char,
    temporal_fourier,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "PlaneCoeffs",
    "PscPoint",
    "Scenario",
    "DelayRange",
    "GridSpec",
    "ComplexSurface",
    "to_cartesian",
    "from_cartesian",
    "xi_sr",
    "eta_bounds",
    "band_residual",
    "build_local_scenario",
    "DopplerBranch",
    "doppler_at",
    "branch_doppler",
    "branch_doppler_deriv",
    "complementary_frequencies",
    "limiting_frequency_inf",
    "parallel_projection",
    "weight",
    "weighted_area_general",
    "weighted_area_complementary",
    "delay_pdf",
    "joint_pdf",
    "joint_cell_probabilities",
    "doppler_support",
    "QuadratureError",
    "SnapshotStack",
    "hybrid_time_delay",
    "hybrid_time_delay_complementary",
    "hybrid_freq_doppler",
    "joint_char",
    "conditional_normalize",
    "temporal_fourier",
    "delay_axis_transform",
    "doppler_axis_transform",
    "MomentReport",
    "CoherenceMetrics",
    "MomentCrossCheckError",
    "CoherenceRangeError",
    "delay_moments",
    "conditional_doppler_moments",
    "jakes_limit_pdf",
    "bessel_limit_cf",
    "coherence_metrics",
    "ScattererSet",
    "ChannelRealization",
    "sample_scatterers",
    "empirical_surface",
    "synthesize_channel",
    "estimate_RL",
    "estimate_Ph",
    "Snapshot",
    "OracleConfig",
    "RunConfig",
    "load_config",
    "run",
    "export_surface",
    "import_surface",
    "emit_plot",
]
