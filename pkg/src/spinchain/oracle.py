"""Independent time-domain solvers used for validation and cross-checking.

Two routes, deliberately disjoint from the Laplace-space machinery:

* :func:`solve_volterra` integrates the memory-kernel integro-differential
  system directly: interior sites evolve under nearest-neighbour hopping,
  the edge sites additionally feel the convolution of their own history
  with the reservoir kernel.  Second-order predictor-corrector (or implicit
  trapezoid) stepping with trapezoidal convolution weights; the full state
  history is kept and the exact trapezoidal history sum is evaluated by
  blockwise FFT convolution, which changes nothing but the operation count.

* :func:`solve_pseudomode` augments the chain with one damped auxiliary
  mode per Lorentzian reservoir.  Eliminating an auxiliary mode with decay
  gamma/2, detuning delta_c, and coupling g reproduces exactly the
  exponential memory kernel of a Lorentzian reservoir, so the augmented
  ordinary system is an exact reformulation, integrated with an embedded
  Runge-Kutta scheme at tight tolerance.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate as _integrate
from scipy import linalg as _linalg
from scipy.signal import fftconvolve

from .errors import KindError, StepError
from .kernels import KernelHandle, memory_kernel
from .model import (Provenance, ReservoirKind, ReservoirSpec, TimeGrid, Trajectory,
                    ValidatedConfig)

__all__ = ["VolterraScheme", "VolterraConfig", "PseudomodeSystem",
           "solve_volterra", "solve_pseudomode"]

#: stability guard: explicit stepping of the chain band requires dt * coupling <= this
DT_GUARD = 0.1

_BLOCK = 1024


class VolterraScheme(enum.Enum):
    PREDICTOR_CORRECTOR2 = "predictor-corrector-2"
    TRAPEZOID = "trapezoid"


@dataclass(frozen=True)
class VolterraConfig:
    """Step size and scheme for the direct integro-differential integration."""

    dt: float
    scheme: VolterraScheme = VolterraScheme.PREDICTOR_CORRECTOR2

    def __post_init__(self):
        if not self.dt > 0:
            raise StepError(f"dt must be > 0, got {self.dt}")


class _HistoryConvolution:
    """Exact trapezoidal-weight convolution of a growing history.

    Maintains conv[m] = sum_{j < finalized} R[m-j] c[j] for every future
    lattice index m, updated blockwise by FFT; the still-open block is
    folded in directly at query time.
    """

    def __init__(self, kernel_lattice: np.ndarray, n_steps: int):
        self.kernel = kernel_lattice
        self.n_steps = n_steps
        self.conv = np.zeros(n_steps + 1, dtype=complex)
        self.block_start = 0

    def finalize_through(self, c_hist: np.ndarray, end: int):
        """Fold c_hist[block_start:end] into the precomputed future sums."""
        b0, b1 = self.block_start, end
        if b1 <= b0:
            return
        seg = c_hist[b0:b1]
        kern = self.kernel[: self.n_steps + 1 - b0]
        out = fftconvolve(seg, kern)
        self.conv[b1:] += out[b1 - b0 : self.n_steps + 1 - b0]
        self.block_start = b1

    def raw_sum(self, m: int, c_hist: np.ndarray, j_max: int) -> complex:
        """sum_{j=0}^{j_max} R[m-j] c[j] with unit weights (m >= j_max)."""
        total = self.conv[m]
        b0 = self.block_start
        if j_max >= b0:
            seg = c_hist[b0 : j_max + 1]
            kern = self.kernel[m - j_max : m - b0 + 1][::-1]
            total = total + np.dot(kern, seg)
        return total


def _alignment(grid: TimeGrid, dt: float):
    idx = np.rint(grid.t_values / dt).astype(int)
    if np.any(np.abs(idx * dt - grid.t_values) > 1e-9 * max(1.0, dt / 1e-3)):
        raise StepError("grid times must sit on the dt lattice")
    return idx


def solve_volterra(cfg: ValidatedConfig, vol: VolterraConfig, grid: TimeGrid) -> Trajectory:
    """Direct second-order integration of the memory-kernel system."""
    chain = cfg.chain
    if vol.dt * chain.coupling > DT_GUARD + 1e-12:
        raise StepError(f"dt={vol.dt} violates the guard dt <= {DT_GUARD}/coupling")
    dt = vol.dt
    out_idx = _alignment(grid, dt)
    n_steps = int(out_idx[-1])
    n = chain.n_sites
    half = -0.5j * chain.coupling

    h1 = KernelHandle.make(cfg.res1, chain.omega_eg)
    h2 = KernelHandle.make(cfg.res2, chain.omega_eg)
    lattice = dt * np.arange(n_steps + 1)
    r1 = np.asarray(memory_kernel(h1, lattice), dtype=complex).reshape(-1)
    r2 = np.asarray(memory_kernel(h2, lattice), dtype=complex).reshape(-1)

    c = np.zeros((n_steps + 1, n), dtype=complex)
    c[0] = cfg.init.amplitudes
    conv1 = _HistoryConvolution(r1, n_steps)
    conv2 = _HistoryConvolution(r2, n_steps)

    def hop(vec):
        out = np.empty(n, dtype=complex)
        out[0] = half * vec[1]
        if n > 2:
            out[1:-1] = half * (vec[:-2] + vec[2:])
        out[-1] = half * vec[-2]
        return out

    if vol.scheme is VolterraScheme.TRAPEZOID:
        _march_trapezoid(c, n_steps, dt, chain, hop, conv1, conv2, r1, r2)
    else:
        _march_pece(c, n_steps, dt, n, hop, conv1, conv2, r1, r2)

    amplitudes = c[out_idx]
    return Trajectory(grid=grid, amplitudes=amplitudes, provenance=Provenance.VOLTERRA_ORACLE)


def _march_pece(c, n_steps, dt, n, hop, conv1, conv2, r1, r2):
    for m in range(n_steps):
        if m - conv1.block_start >= _BLOCK:
            conv1.finalize_through(c[:, 0], m)
            conv2.finalize_through(c[:, n - 1], m)
        # f at (t_m, c_m)
        s1 = conv1.raw_sum(m, c[:, 0], m)
        s2 = conv2.raw_sum(m, c[:, n - 1], m)
        i1 = dt * (s1 - 0.5 * r1[m] * c[0, 0] - 0.5 * r1[0] * c[m, 0])
        i2 = dt * (s2 - 0.5 * r2[m] * c[0, n - 1] - 0.5 * r2[0] * c[m, n - 1])
        f_m = hop(c[m])
        f_m[0] -= i1
        f_m[-1] -= i2
        # predict, then correct with the trapezoid endpoint at t_{m+1}
        pred = c[m] + dt * f_m
        s1p = conv1.raw_sum(m + 1, c[:, 0], m)
        s2p = conv2.raw_sum(m + 1, c[:, n - 1], m)
        i1p = dt * (s1p + 0.5 * r1[0] * pred[0] - 0.5 * r1[m + 1] * c[0, 0])
        i2p = dt * (s2p + 0.5 * r2[0] * pred[-1] - 0.5 * r2[m + 1] * c[0, n - 1])
        f_p = hop(pred)
        f_p[0] -= i1p
        f_p[-1] -= i2p
        c[m + 1] = c[m] + 0.5 * dt * (f_m + f_p)


def _march_trapezoid(c, n_steps, dt, chain, hop, conv1, conv2, r1, r2):
    n = chain.n_sites
    half = -0.5j * chain.coupling
    hop_matrix = np.zeros((n, n), dtype=complex)
    for i in range(n - 1):
        hop_matrix[i, i + 1] = half
        hop_matrix[i + 1, i] = half
    lhs = np.eye(n, dtype=complex) - 0.5 * dt * hop_matrix
    lhs[0, 0] += 0.25 * dt * dt * r1[0]
    lhs[n - 1, n - 1] += 0.25 * dt * dt * r2[0]
    lu = _linalg.lu_factor(lhs)

    for m in range(n_steps):
        if m - conv1.block_start >= _BLOCK:
            conv1.finalize_through(c[:, 0], m)
            conv2.finalize_through(c[:, n - 1], m)
        s1 = conv1.raw_sum(m, c[:, 0], m)
        s2 = conv2.raw_sum(m, c[:, n - 1], m)
        i1 = dt * (s1 - 0.5 * r1[m] * c[0, 0] - 0.5 * r1[0] * c[m, 0])
        i2 = dt * (s2 - 0.5 * r2[m] * c[0, n - 1] - 0.5 * r2[0] * c[m, n - 1])
        f_m = hop(c[m])
        f_m[0] -= i1
        f_m[-1] -= i2
        # known part of the t_{m+1} convolution (history j <= m, half-weight ends)
        k1 = dt * (conv1.raw_sum(m + 1, c[:, 0], m) - 0.5 * r1[m + 1] * c[0, 0])
        k2 = dt * (conv2.raw_sum(m + 1, c[:, n - 1], m) - 0.5 * r2[m + 1] * c[0, n - 1])
        rhs = c[m] + 0.5 * dt * f_m
        rhs[0] -= 0.5 * dt * k1
        rhs[n - 1] -= 0.5 * dt * k2
        c[m + 1] = _linalg.lu_solve(lu, rhs)


@dataclass(frozen=True)
class PseudomodeSystem:
    """Chain plus one damped auxiliary mode per reservoir: an exact ordinary
    reformulation of the Lorentzian-kernel dynamics.

    Only constructible when each reservoir is Lorentzian or uncoupled
    (g = 0; the auxiliary mode then decouples and any placeholder width
    works).
    """

    matrix: np.ndarray
    init: np.ndarray
    n_sites: int

    @classmethod
    def from_config(cls, cfg: ValidatedConfig) -> "PseudomodeSystem":
        n = cfg.chain.n_sites
        half = -0.5j * cfg.chain.coupling
        dim = n + 2
        g_mat = np.zeros((dim, dim), dtype=complex)
        for i in range(n - 1):
            g_mat[i, i + 1] = half
            g_mat[i + 1, i] = half
        for aux, (res, site) in enumerate(((cfg.res1, 0), (cfg.res2, n - 1))):
            row = n + aux
            gamma, delta = _lorentzian_params(res, cfg.chain.omega_eg)
            g_mat[row, row] = -(0.5 * gamma + 1j * delta)
            g_mat[row, site] = -1j * res.g
            g_mat[site, row] = -1j * res.g
        init = np.zeros(dim, dtype=complex)
        init[:n] = cfg.init.amplitudes
        return cls(matrix=g_mat, init=init, n_sites=n)


def _lorentzian_params(res: ReservoirSpec, omega_eg: float) -> tuple[float, float]:
    if res.g == 0.0:
        return 1.0, 0.0
    if res.kind is not ReservoirKind.LORENTZIAN:
        raise KindError(f"pseudomode augmentation requires Lorentzian reservoirs, got {res.kind.value}")
    delta = res.delta_c if res.delta_c is not None else res.omega_c - omega_eg
    return res.gamma, delta


def solve_pseudomode(system: PseudomodeSystem, grid: TimeGrid,
                     rtol: float = 1e-10, atol: float = 1e-12) -> Trajectory:
    """Integrate the augmented linear system with an embedded Runge-Kutta."""
    g_mat = system.matrix

    def rhs(_t, y):
        return g_mat @ y

    t_values = grid.t_values
    sol = _integrate.solve_ivp(rhs, (0.0, float(t_values[-1]) if t_values[-1] > 0 else 1e-12),
                               system.init, method="DOP853", t_eval=t_values,
                               rtol=rtol, atol=atol)
    if not sol.success:
        raise RuntimeError(f"pseudomode integration failed: {sol.message}")
    amplitudes = sol.y[: system.n_sites].T
    return Trajectory(grid=grid, amplitudes=amplitudes,
                      provenance=Provenance.PSEUDOMODE_ORACLE)
