"""Domain types, parameter validation, and unit conventions.

Conventions used throughout the package:

* The qubit-qubit coupling strength is the reference frequency scale; all
  other frequencies are expressed in units of it and all times in units of
  its inverse.  The default ``coupling = 1.0`` reflects that choice.
* Amplitudes are the rotating-frame ones.  The global phase accumulated by
  the lab-frame amplitudes is never materialized because every observable
  in scope (populations, fidelity) is phase-invariant; consequently only
  the transition frequency ``omega_eg`` is stored, never the bare level
  energies.
* Lorentzian reservoirs may be parameterized either by the absolute peak
  frequency ``omega_c`` or directly by the detuning ``delta_c`` of the peak
  from the qubit transition (the memory kernel depends only on the
  detuning).  Ohmic reservoirs always require ``omega_eg`` explicitly.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, KindError, NormError, ParamError

__all__ = [
    "ChainSpec",
    "ReservoirKind",
    "ReservoirSpec",
    "InitialState",
    "TimeGrid",
    "Provenance",
    "Trajectory",
    "ValidatedConfig",
    "ReservoirWarning",
    "validate",
]

#: Unit-norm tolerance for initial states.
NORM_TOL = 1e-12

#: Allowed excitation-norm overshoot for trajectories (numerical slack only;
#: physically the chain population can only leak to the reservoirs).
LEAK_TOL = 1e-6

#: A Lorentzian of width gamma centred at omega_c has negligible negative-
#: frequency weight only if gamma << omega_c; warn beyond this ratio.
LORENTZIAN_WIDTH_RATIO = 1.0 / 5.0


class ReservoirWarning(UserWarning):
    """A reservoir is valid but outside the regime its analytic kernel assumes."""


@dataclass(frozen=True)
class ChainSpec:
    """Static description of the XX chain.

    Attributes:
        n_sites: number of qubits N (at least 2; the closed-form solution
            references sites N-1 and N-2 as distinct roles).
        coupling: nearest-neighbour flip-flop strength (reference scale).
        omega_eg: qubit transition frequency (excited minus ground energy).
    """

    n_sites: int
    coupling: float = 1.0
    omega_eg: float = 0.0

    def __post_init__(self):
        if not isinstance(self.n_sites, (int, np.integer)) or isinstance(self.n_sites, bool):
            raise DimensionError(f"n_sites must be an integer, got {self.n_sites!r}")
        if self.n_sites < 2:
            raise DimensionError(f"n_sites must be >= 2, got {self.n_sites}")
        if not self.coupling > 0:
            raise ParamError(f"coupling must be > 0, got {self.coupling}")
        if self.omega_eg < 0:
            raise ParamError(f"omega_eg must be >= 0, got {self.omega_eg}")

    @property
    def k(self) -> float:
        """Inverse half-coupling 2/J appearing in the Laplace-space algebra."""
        return 2.0 / self.coupling


class ReservoirKind(enum.Enum):
    LORENTZIAN = "lorentzian"
    OHMIC = "ohmic"
    TABULATED = "tabulated"


@dataclass(frozen=True)
class ReservoirSpec:
    """One boundary reservoir's spectral density and its parameters.

    Use the ``lorentzian`` / ``ohmic`` / ``tabulated`` constructors rather
    than building instances directly; they fill in the per-kind fields and
    reject invalid parameters early.

    For the tabulated kind the overall coupling ``g`` is derived from the
    samples (``g**2`` equals the integral of the density, evaluated exactly
    for the linear interpolant), not supplied by the caller.
    """

    kind: ReservoirKind
    g: float
    gamma: float | None = None
    omega_c: float | None = None
    delta_c: float | None = None
    s_param: float | None = None
    samples: tuple[tuple[float, float], ...] | None = None

    @classmethod
    def lorentzian(cls, g: float, gamma: float,
                   omega_c: float | None = None,
                   delta_c: float | None = None) -> "ReservoirSpec":
        """Lorentzian density of width ``gamma`` peaked at ``omega_c``.

        Exactly one of ``omega_c`` (absolute peak frequency) or ``delta_c``
        (peak detuning from the qubit transition) must be given.
        """
        if (omega_c is None) == (delta_c is None):
            raise ParamError("give exactly one of omega_c or delta_c")
        if not gamma > 0:
            raise ParamError(f"gamma must be > 0, got {gamma}")
        if omega_c is not None and not omega_c > 0:
            raise ParamError(f"omega_c must be > 0, got {omega_c}")
        cls._check_g(g)
        return cls(kind=ReservoirKind.LORENTZIAN, g=float(g), gamma=float(gamma),
                   omega_c=None if omega_c is None else float(omega_c),
                   delta_c=None if delta_c is None else float(delta_c))

    @classmethod
    def ohmic(cls, g: float, omega_c: float, s_param: float) -> "ReservoirSpec":
        """Ohmic-family density with cutoff ``omega_c`` and exponent ``s_param``."""
        if not omega_c > 0:
            raise ParamError(f"omega_c must be > 0, got {omega_c}")
        if not s_param > 0:
            raise ParamError(f"s_param must be > 0, got {s_param}")
        cls._check_g(g)
        return cls(kind=ReservoirKind.OHMIC, g=float(g), omega_c=float(omega_c),
                   s_param=float(s_param))

    @classmethod
    def tabulated(cls, omega: np.ndarray, density: np.ndarray) -> "ReservoirSpec":
        """Density given by samples ``(omega, J(omega))``, linearly interpolated.

        Frequencies must be nonnegative and strictly increasing; densities
        must be nonnegative.  Outside the sampled range the density is zero.
        """
        omega = np.asarray(omega, dtype=float)
        density = np.asarray(density, dtype=float)
        if omega.ndim != 1 or omega.shape != density.shape or omega.size < 2:
            raise ParamError("need matching 1-D omega and density arrays with >= 2 samples")
        if omega[0] < 0:
            raise ParamError("tabulated frequencies must be >= 0")
        if not np.all(np.diff(omega) > 0):
            raise ParamError("tabulated frequencies must be strictly increasing")
        if np.any(density < 0):
            raise ParamError("tabulated density must be >= 0")
        g_sq = float(np.trapezoid(density, omega))
        return cls(kind=ReservoirKind.TABULATED, g=math.sqrt(g_sq),
                   samples=tuple((float(w), float(j)) for w, j in zip(omega, density)))

    @staticmethod
    def _check_g(g: float):
        if g < 0:
            raise ParamError(f"g must be >= 0, got {g}")

    def peak_frequency(self, omega_eg: float) -> float | None:
        """Absolute frequency at which the density peaks, when determinable."""
        if self.kind is ReservoirKind.LORENTZIAN:
            if self.omega_c is not None:
                return self.omega_c
            return omega_eg + self.delta_c if self.delta_c is not None else None
        if self.kind is ReservoirKind.OHMIC:
            return self.s_param * self.omega_c
        w = np.array([s[0] for s in self.samples])
        j = np.array([s[1] for s in self.samples])
        return float(w[np.argmax(j)])


@dataclass(frozen=True)
class InitialState:
    """Complex amplitudes over the N single-excitation chain states.

    The reservoirs start empty, so the chain amplitudes must carry the whole
    excitation: the norm has to be 1 within ``NORM_TOL``.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.ndim != 1 or amp.size < 2:
            raise DimensionError(f"amplitudes must be a 1-D vector of length >= 2, got shape {amp.shape}")
        amp = amp.copy()
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)
        norm_sq = float(np.sum(np.abs(amp) ** 2))
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise NormError(f"|amplitudes|^2 sums to {norm_sq!r}, not 1 within {NORM_TOL}")

    @property
    def n_sites(self) -> int:
        return self.amplitudes.size

    @classmethod
    def site(cls, n_sites: int, index: int) -> "InitialState":
        """Excitation entirely on 1-based site ``index``."""
        if not 1 <= index <= n_sites:
            raise DimensionError(f"site index {index} outside 1..{n_sites}")
        amp = np.zeros(n_sites, dtype=complex)
        amp[index - 1] = 1.0
        return cls(amp)

    @classmethod
    def first_site(cls, n_sites: int) -> "InitialState":
        return cls.site(n_sites, 1)

    @classmethod
    def last_site(cls, n_sites: int) -> "InitialState":
        return cls.site(n_sites, n_sites)

    @classmethod
    def center(cls, n_sites: int) -> "InitialState":
        """Excitation on the central site; requires odd N."""
        if n_sites % 2 == 0:
            raise DimensionError(f"center preset requires odd n_sites, got {n_sites}")
        return cls.site(n_sites, (n_sites + 1) // 2)

    @classmethod
    def uniform_channel(cls, n_sites: int) -> "InitialState":
        """Equal weight on every channel (non-edge) site."""
        if n_sites < 3:
            raise DimensionError("uniform-channel preset requires n_sites >= 3")
        amp = np.zeros(n_sites, dtype=complex)
        amp[1:-1] = 1.0 / math.sqrt(n_sites - 2)
        return cls(amp)

    @classmethod
    def normalized(cls, amplitudes) -> "InitialState":
        """Normalize an arbitrary nonzero vector and wrap it."""
        amp = np.asarray(amplitudes, dtype=complex)
        norm = np.linalg.norm(amp)
        if norm == 0:
            raise NormError("cannot normalize the zero vector")
        return cls(amp / norm)


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing nonnegative output times, in units of 1/coupling."""

    t_values: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t_values, dtype=float)
        if t.ndim != 1 or t.size == 0:
            raise DimensionError("t_values must be a nonempty 1-D array")
        if t[0] < 0:
            raise ParamError(f"t_values must start at >= 0, got {t[0]}")
        if t.size > 1 and not np.all(np.diff(t) > 0):
            raise ParamError("t_values must be strictly increasing")
        t = t.copy()
        t.setflags(write=False)
        object.__setattr__(self, "t_values", t)

    @classmethod
    def linspace(cls, t_max: float, n_points: int) -> "TimeGrid":
        if n_points < 1 or not t_max > 0:
            raise ParamError("need t_max > 0 and n_points >= 1")
        return cls(np.linspace(0.0, t_max, n_points))

    @property
    def t_max(self) -> float:
        return float(self.t_values[-1])

    def __len__(self) -> int:
        return self.t_values.size


class Provenance(enum.Enum):
    LAPLACE_INVERSION = "laplace-inversion"
    VOLTERRA_ORACLE = "volterra-oracle"
    PSEUDOMODE_ORACLE = "pseudomode-oracle"


@dataclass(frozen=True)
class Trajectory:
    """Chain amplitudes on a time grid, plus who computed them.

    ``amplitudes`` has shape ``(len(grid), n_sites)``.  The total chain
    population can only leak into the reservoirs, so it may never exceed 1
    beyond numerical slack; the constructor enforces that bound.

    ``est_error`` optionally carries a per-time-point accuracy estimate
    reported by the producing solver.
    """

    grid: TimeGrid
    amplitudes: np.ndarray
    provenance: Provenance
    est_error: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.ndim != 2 or amp.shape[0] != len(self.grid):
            raise DimensionError(
                f"amplitudes shape {amp.shape} incompatible with grid of {len(self.grid)} points")
        amp = amp.copy()
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)
        total = np.sum(np.abs(amp) ** 2, axis=1)
        worst = float(total.max())
        if worst > 1.0 + LEAK_TOL:
            raise NormError(f"chain population reaches {worst!r} > 1 + {LEAK_TOL}")
        if self.est_error is not None:
            err = np.asarray(self.est_error, dtype=float)
            if err.shape != (len(self.grid),):
                raise DimensionError("est_error must have one entry per grid point")
            err = err.copy()
            err.setflags(write=False)
            object.__setattr__(self, "est_error", err)

    @property
    def n_sites(self) -> int:
        return self.amplitudes.shape[1]


@dataclass(frozen=True)
class ValidatedConfig:
    """Bundle returned by :func:`validate`: mutually consistent components."""

    chain: ChainSpec
    res1: ReservoirSpec
    res2: ReservoirSpec
    init: InitialState
    warnings: tuple[str, ...] = ()

    @property
    def reservoirs(self) -> tuple[ReservoirSpec, ReservoirSpec]:
        return (self.res1, self.res2)


def _lorentzian_width_warning(res: ReservoirSpec, side: str) -> str | None:
    # The analytic kernel extends the frequency integral to -infinity, which
    # is justified only while the density has negligible negative-frequency
    # weight.  The check needs the absolute peak position, so it only runs
    # when the reservoir was specified through omega_c.
    if res.kind is not ReservoirKind.LORENTZIAN or res.omega_c is None:
        return None
    if res.gamma > res.omega_c * LORENTZIAN_WIDTH_RATIO:
        return (f"{side} reservoir: width {res.gamma} is not small against peak "
                f"frequency {res.omega_c}; the analytic Lorentzian kernel assumes "
                f"gamma << omega_c")
    return None


def validate(chain: ChainSpec, res1: ReservoirSpec, res2: ReservoirSpec,
             init: InitialState) -> ValidatedConfig:
    """Cross-validate the components of a run and bundle them.

    Pure and idempotent.  Raises :class:`DimensionError` on size mismatches
    and propagates each component's own invariant errors; soft issues (a
    Lorentzian too wide for its analytic kernel) are emitted as
    :class:`ReservoirWarning` and recorded on the returned bundle.
    """
    if init.n_sites != chain.n_sites:
        raise DimensionError(
            f"initial state has {init.n_sites} amplitudes for a chain of {chain.n_sites} sites")
    notes = []
    for side, res in (("left", res1), ("right", res2)):
        note = _lorentzian_width_warning(res, side)
        if note is not None:
            warnings.warn(note, ReservoirWarning, stacklevel=2)
            notes.append(note)
    return ValidatedConfig(chain=chain, res1=res1, res2=res2, init=init,
                           warnings=tuple(notes))
