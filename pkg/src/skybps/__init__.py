"""skybps: numerical verification of BPS configurations of the gauged Skyrme model.

The package constructs target geometries carrying an isometric group action
and a moment map, builds explicit BPS solution families over discretized
coordinate patches, and certifies by quadrature and finite differences the
energy identities, topological degrees and residual equations that these
families satisfy.
"""

from .energy_degree import BPSParams, EnergyReport, bps_coefficients
from .exterior import FormField, Metric3, StarMap, hodge_star, recover_metric
from .gaugefield import Configuration
from .grid import PatchGrid, build_patch, integrate, partial_derivative
from .lie_target import TargetGeometry

__all__ = [
    "BPSParams",
    "Configuration",
    "EnergyReport",
    "FormField",
    "Metric3",
    "PatchGrid",
    "StarMap",
    "TargetGeometry",
    "bps_coefficients",
    "build_patch",
    "hodge_star",
    "integrate",
    "partial_derivative",
    "recover_metric",
]

__version__ = "0.1.0"
