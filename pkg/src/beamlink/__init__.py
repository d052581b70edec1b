"""
beamlink - coupled solid/beam mixed finite elements

A linear-elastic hex8 solid tied to a 3D Timoshenko beam through
average-displacement and average-rotation Lagrange multipliers, with
discrete certificates of kernel ellipticity and inf-sup stability.

Example usage:
    >>> from beamlink import build_block_mesh, extract_interface, build_beam
    >>> from beamlink import BeamSection, SolidMaterial, assemble_system, solve
    >>>
    >>> mesh = build_block_mesh((1, 1, 1), (2, 2, 2), origin=(-0.5, -0.5, 0.0))
    >>> sigma = extract_interface(mesh, "-z")
    >>> section = BeamSection.rectangular(0.2, 0.2, 1000.0, 0.3)
    >>> beam = build_beam(2.0, 4, section, axis_origin=(0, 0, -2))
    >>> system = assemble_system(mesh, beam, sigma, SolidMaterial.from_engineering(1000.0, 0.3))
    >>> report = solve(system)
    >>> report.stats.zero_pivots
    0
"""

__version__ = "0.1.0"
__license__ = "MIT"

# Geometry
from beamlink.geometry.mesh import Mesh, build_block_mesh
from beamlink.geometry.interface import InterfaceSurface, extract_interface
from beamlink.geometry.beam_model import BeamModel, build_beam

# Bodies
from beamlink.solid.material import SolidLoads, SolidMaterial
from beamlink.solid.elasticity import assemble_solid, solid_load_vector, u_norm_gram
from beamlink.beam.section import BeamLoads, BeamSection, BeamState
from beamlink.beam.timoshenko import assemble_beam, beam_norm_gram, beam_strains

# Coupling and the mixed system
from beamlink.coupling.constraints import assemble_B, rotation_average, skew_average_check
from beamlink.saddle.system import SaddleSystem, SystemLoads, assemble_system
from beamlink.saddle.solver import SolveReport, solve
from beamlink.saddle.export import export_system, read_system

# Stability
from beamlink.analysis.stability import (
    StabilityReport,
    analyze_stability,
    compute_M,
    inf_sup_constant,
    kernel_ellipticity,
    rigid_mode_census,
    witness_infsup_bound,
)
from beamlink.analysis.bounds import bound_constants

# Scenarios
from beamlink.config import ScenarioConfig, dump_config, parse_config
from beamlink.runner import run

from beamlink.errors import BeamlinkError, ConfigurationError, WellPosednessError

__all__ = [
    "__version__",
    "__license__",
    # Geometry
    "Mesh",
    "build_block_mesh",
    "InterfaceSurface",
    "extract_interface",
    "BeamModel",
    "build_beam",
    # Bodies
    "SolidMaterial",
    "SolidLoads",
    "assemble_solid",
    "solid_load_vector",
    "u_norm_gram",
    "BeamSection",
    "BeamLoads",
    "BeamState",
    "assemble_beam",
    "beam_norm_gram",
    "beam_strains",
    # Coupling
    "assemble_B",
    "rotation_average",
    "skew_average_check",
    "SaddleSystem",
    "SystemLoads",
    "assemble_system",
    "SolveReport",
    "solve",
    "export_system",
    "read_system",
    # Stability
    "StabilityReport",
    "analyze_stability",
    "compute_M",
    "inf_sup_constant",
    "kernel_ellipticity",
    "rigid_mode_census",
    "witness_infsup_bound",
    "bound_constants",
    # Scenarios
    "ScenarioConfig",
    "parse_config",
    "dump_config",
    "run",
    # Errors
    "BeamlinkError",
    "ConfigurationError",
    "WellPosednessError",
]
