"""Gaussian-beam quantum radar simulation.

Broadband Gaussian beams are propagated with the Fresnel transfer function,
photon arrival-time densities are built for single, independent,
coherent-equivalent and frequency-entangled sources, and a seeded Monte Carlo
harness estimates target range to measure the sqrt(N) precision gain of
entangled probes.
"""

from .constants import SPEED_OF_LIGHT
from .errors import (
    AliasingError,
    ConfigError,
    DomainError,
    InsufficientDetectionsError,
    PowerLeakWarning,
    QRadarError,
    WidthOverflowError,
    WindowTooSmallError,
)
from .spectral import (
    SpectralEnvelope,
    load_envelope_csv,
    make_gaussian_spectrum,
    make_tabulated_spectrum,
    temporal_amplitude,
    temporal_width,
)
from .beam import BeamGeometry, gaussian_beam_amplitude, n_photon_beam_amplitude
from .propagation import (
    FieldGrid,
    FresnelConvention,
    fresnel_kernel,
    on_axis_pulse_amplitude,
    propagate_grid,
    sample_gaussian_to_grid,
)
from .states import (
    ArrivalDensity,
    PhotonSource,
    SourceMode,
    mean_time_sigma,
    single_arrival_density,
    sum_arrival_density,
)
from .ranging import (
    ArrivalBatch,
    RangeEstimate,
    Scenario,
    estimate_range,
    sample_batch,
    scaling_experiment,
)

__version__ = "0.1.0"

__all__ = [
    "SPEED_OF_LIGHT",
    "AliasingError",
    "ConfigError",
    "DomainError",
    "InsufficientDetectionsError",
    "PowerLeakWarning",
    "QRadarError",
    "WidthOverflowError",
    "WindowTooSmallError",
    "SpectralEnvelope",
    "load_envelope_csv",
    "make_gaussian_spectrum",
    "make_tabulated_spectrum",
    "temporal_amplitude",
    "temporal_width",
    "BeamGeometry",
    "gaussian_beam_amplitude",
    "n_photon_beam_amplitude",
    "FieldGrid",
    "FresnelConvention",
    "fresnel_kernel",
    "on_axis_pulse_amplitude",
    "propagate_grid",
    "sample_gaussian_to_grid",
    "ArrivalDensity",
    "PhotonSource",
    "SourceMode",
    "mean_time_sigma",
    "single_arrival_density",
    "sum_arrival_density",
    "ArrivalBatch",
    "RangeEstimate",
    "Scenario",
    "estimate_range",
    "sample_batch",
    "scaling_experiment",
]
