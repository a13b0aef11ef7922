"""Vortex-blob dynamics on the cylinder R x T with confinement verification.

The package has two halves that meet in the diagnostics format:

* a deterministic O(N^2) vortex-blob simulator for the incompressible
  flow induced by the periodic-strip kernel, with conserved-quantity
  and tail-mass diagnostics (kernels, ensemble, dynamics, scenarios);
* an exact verifier for the recursive tail-mass machinery and its
  doubly-exponential decay certificate, plus the derived confinement
  barrier and empirical analysis of simulation output (recursion,
  envelope, analysis).

The cli module ties both to config files and CSV/JSON artifacts.
"""

from .errors import (
    ConfigError,
    ResolutionError,
    SimulationAbort,
    SingularityError,
)
from .kernels import (
    CylinderPoint,
    Displacement,
    Velocity2,
    biot_savart_kernel,
    regularized_kernel,
    stream_kernel,
)
from .ensemble import (
    DiagnosticsRecord,
    VortexBlob,
    VorticityEnsemble,
    regularized_energy,
    tail_mass,
    total_mass,
)
from .dynamics import ProbeSpec, SimConfig, simulate, step
from .scenarios import ScenarioSpec, build_scenario
from .recursion import (
    PiecewiseFn,
    RecursionParams,
    compute_b_sequence,
    compute_g_sequence,
    hitting_times,
    verify_kur_bound,
)
from .envelope import EnvelopeParams, envelope_R, phi_of_L

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "CylinderPoint",
    "DiagnosticsRecord",
    "Displacement",
    "EnvelopeParams",
    "PiecewiseFn",
    "ProbeSpec",
    "RecursionParams",
    "ResolutionError",
    "ScenarioSpec",
    "SimConfig",
    "SimulationAbort",
    "SingularityError",
    "Velocity2",
    "VortexBlob",
    "VorticityEnsemble",
    "biot_savart_kernel",
    "build_scenario",
    "compute_b_sequence",
    "compute_g_sequence",
    "envelope_R",
    "hitting_times",
    "phi_of_L",
    "regularized_energy",
    "regularized_kernel",
    "simulate",
    "step",
    "stream_kernel",
    "tail_mass",
    "total_mass",
    "verify_kur_bound",
    "__version__",
]
