"""Triple-reflection matter-wave monochromator simulator.

Closed-form atom-surface diffraction, bounce-path enumeration with geometric
feasibility, and a 2D ray-optics beamline model predicting transmitted
velocity distributions and speed ratios for a continuous atom beam.
"""

__version__ = "0.1.0"

from .beamline import (
    BeamlineResult,
    Beamline,
    BeamSpec,
    Pinhole,
    ScanRow,
    scan_speed_ratio,
    select_path,
    simulate_beam,
    single_reflection_baseline,
    trace_velocity,
)
from .config import RunConfig, dump_default_config
from .diffraction import (
    HBAR,
    HELIUM_4,
    Grating,
    MonochromatorSetting,
    Particle,
    cutoff_velocity,
    de_broglie_wavelength,
    diffraction_angle,
    incidence_for_output,
    velocity_divergence,
)
from .errors import (
    BelowCutoffError,
    ConfigurationError,
    EmptyTransmissionError,
    EvanescentOrderError,
    GrazingSingularityError,
    MonochromatorError,
)
from .geometry import (
    DeviceGeometry,
    DiffractionPath,
    FeasibilityBand,
    PathGroup,
    enumerate_paths,
    feasibility_band,
    group_paths_by_geometry,
    path_census,
    path_transmission,
)
from .presets import MATERIALS, PARTICLES, MaterialPreset, get_material, get_particle

__all__ = [
    "HBAR",
    "HELIUM_4",
    "MATERIALS",
    "PARTICLES",
    "BeamSpec",
    "Beamline",
    "BeamlineResult",
    "BelowCutoffError",
    "ConfigurationError",
    "DeviceGeometry",
    "DiffractionPath",
    "EmptyTransmissionError",
    "EvanescentOrderError",
    "FeasibilityBand",
    "Grating",
    "GrazingSingularityError",
    "MaterialPreset",
    "MonochromatorError",
    "MonochromatorSetting",
    "Particle",
    "PathGroup",
    "Pinhole",
    "RunConfig",
    "ScanRow",
    "cutoff_velocity",
    "de_broglie_wavelength",
    "diffraction_angle",
    "dump_default_config",
    "enumerate_paths",
    "feasibility_band",
    "get_material",
    "get_particle",
    "group_paths_by_geometry",
    "incidence_for_output",
    "path_census",
    "path_transmission",
    "scan_speed_ratio",
    "select_path",
    "simulate_beam",
    "single_reflection_baseline",
    "trace_velocity",
    "velocity_divergence",
]
