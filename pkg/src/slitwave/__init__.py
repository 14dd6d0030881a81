"""
slitwave - double slits in space and time for a free quantum particle.

This package provides:
- Closed-form evaluators for the space double slit, the shutter, the time
  double slit and weighted-slit complementarity
- A spectral free-particle propagator that serves as a numeric oracle
- Named, reproducible scenarios with CSV/JSON output and a cross-check suite
"""

from .analytic import SpaceSlitConfig, TimeSlitConfig
from .propagator import ComplexField, Grid1D, InitialStateKind, InitialStateSpec, evolve_free, make_initial_state
from .registry import ScenarioRegistry
from .scenarios import ScenarioSpec, run_scenario
from .series import OutputRecord, Series, tool_version
from .units import Particle, derived_kinematics

__version__ = tool_version()
__all__ = [
    "ComplexField",
    "Grid1D",
    "InitialStateKind",
    "InitialStateSpec",
    "OutputRecord",
    "Particle",
    "ScenarioRegistry",
    "ScenarioSpec",
    "Series",
    "SpaceSlitConfig",
    "TimeSlitConfig",
    "derived_kinematics",
    "evolve_free",
    "make_initial_state",
    "run_scenario",
]


def get_definitions_path() -> str:
    """Get the path to the builtin scenario definitions."""
    import os
    return os.path.join(os.path.dirname(__file__), "definitions")
