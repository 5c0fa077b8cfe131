"""Exact single-excitation dynamics of XX spin chains whose edge qubits are
coupled to independent non-Markovian bosonic reservoirs.

The chain amplitudes are obtained in closed form in Laplace space for any
chain length, any initial single-excitation state, and any reservoir
spectral density (analytic Lorentzian and Ohmic kernels, quadrature for
tabulated ones), then brought back to the time domain by a numerical
inverse Laplace transform.  Two independent time-domain solvers (direct
integro-differential integration and an exact pseudomode augmentation for
Lorentzian reservoirs) serve as oracles and alternative backends.
"""

__version__ = "0.1.0"

from .errors import (BranchError, ConfigError, ConsistencyError, ContourError,
                     ConvergenceError, DimensionError, DomainError, KindError, NormError,
                     ParamError, QuadratureError, SingularPoint, SpinChainError, StepError,
                     ToleranceNotMet, UnknownAxisError, ValidationError)
from .model import (ChainSpec, InitialState, Provenance, ReservoirKind, ReservoirSpec,
                    ReservoirWarning, TimeGrid, Trajectory, ValidatedConfig, validate)
from .specfun import GammaResult, exp_integral_e1, upper_incomplete_gamma
from .kernels import KernelHandle, laplace_kernel, load_tabulated, memory_kernel, spectral_density
from .laplace import ASequence, LaplaceState, a_sequence, amplitudes, f1, f_all
from .inversion import InversionMethod, InversionPlan, invert, invert_callable
from .oracle import (PseudomodeSystem, VolterraConfig, VolterraScheme, solve_pseudomode,
                     solve_volterra)
from .observables import (MaxFidelityRow, ObservableSeries, SeriesKind, SweepTemplate,
                          dominant_frequency, fidelity, max_fidelity_sweep, populations)

__all__ = [
    "__version__",
    # errors
    "SpinChainError", "ValidationError", "DimensionError", "NormError", "ParamError",
    "ConfigError", "UnknownAxisError", "DomainError", "ConvergenceError", "BranchError",
    "QuadratureError", "SingularPoint", "ConsistencyError", "ContourError",
    "ToleranceNotMet", "StepError", "KindError",
    # model
    "ChainSpec", "ReservoirKind", "ReservoirSpec", "InitialState", "TimeGrid",
    "Provenance", "Trajectory", "ValidatedConfig", "ReservoirWarning", "validate",
    # specfun
    "GammaResult", "upper_incomplete_gamma", "exp_integral_e1",
    # kernels
    "KernelHandle", "spectral_density", "memory_kernel", "laplace_kernel", "load_tabulated",
    # laplace
    "ASequence", "LaplaceState", "a_sequence", "f1", "f_all", "amplitudes",
    # inversion
    "InversionMethod", "InversionPlan", "invert", "invert_callable",
    # oracle
    "VolterraScheme", "VolterraConfig", "PseudomodeSystem", "solve_volterra", "solve_pseudomode",
    # observables
    "SeriesKind", "ObservableSeries", "populations", "fidelity", "SweepTemplate",
    "MaxFidelityRow", "max_fidelity_sweep", "dominant_frequency",
]
