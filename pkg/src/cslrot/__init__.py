"""Rotational collapse-noise spectra of structured cylindrical test masses.

Library + CLI computing the white CSL torque noise of periodic sector
geometries, thermal-floor exclusion bounds on the collapse parameters,
geometry optimisation at fixed moment of inertia, and a Langevin
torsion-pendulum simulator used as the statistical cross-check.
"""

__version__ = "0.1.0"

from .constants import CslParams, PhysicalConstants, DEFAULT_CONSTANTS
from .geometry import (HalfCylinder, HomogeneousDisk, MassModel,
                       PeriodicAnnulus, SectorRing, TwoAnnuli,
                       InvalidGeometryError, density_at, moment_of_inertia,
                       solve_inner_radius)
from .presets import PRESETS, Preset, get_preset, preset_names
from .spectrum import (NoiseBudget, SpectrumResult, axial_factor_y,
                       angular_psd, colored_multiplier, csl_torque_dns,
                       radial_factor_p, thermal_torque_dns)

__all__ = [
    "CslParams", "PhysicalConstants", "DEFAULT_CONSTANTS",
    "HalfCylinder", "HomogeneousDisk", "MassModel", "PeriodicAnnulus",
    "SectorRing", "TwoAnnuli", "InvalidGeometryError",
    "density_at", "moment_of_inertia", "solve_inner_radius",
    "PRESETS", "Preset", "get_preset", "preset_names",
    "NoiseBudget", "SpectrumResult", "axial_factor_y", "angular_psd",
    "colored_multiplier", "csl_torque_dns", "radial_factor_p",
    "thermal_torque_dns",
    "__version__",
]
