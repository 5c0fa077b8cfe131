"""Spectral densities, time-domain memory kernels, and Laplace-domain kernels.

Each boundary reservoir enters the chain dynamics only through its memory
kernel

    R(t) = integral of J(w) * exp(-i (w - omega_eg) t) dw

and the kernel's Laplace transform B(s).  Both have closed forms for the
Lorentzian and Ohmic families; tabulated densities go through adaptive
quadrature.  A :class:`KernelHandle` pairs one reservoir with the chain's
transition frequency and caches the derived constants.

The Lorentzian closed form extends the frequency integral to -infinity
(negligible-weight extension); the resulting kernel depends only on the
detuning of the peak from the qubit transition.  The validity warning for
that extension lives in :func:`spinchain.model.validate`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import BranchError, DomainError, QuadratureError
from .model import ReservoirKind, ReservoirSpec
from .specfun import upper_incomplete_gamma

__all__ = [
    "KernelHandle",
    "spectral_density",
    "memory_kernel",
    "laplace_kernel",
    "load_tabulated",
]

#: |s_param - round(s_param)| below this routes the Ohmic kernel through the
#: integer-order reduction, avoiding the removable singularity of the generic
#: negative-order path at integers.
INTEGER_S_TOL = 1e-9

#: absolute tolerance for the tabulated-density quadratures
QUAD_ABS_TOL = 1e-10


@dataclass(frozen=True)
class KernelHandle:
    """One reservoir bound to the chain's transition frequency.

    Use :meth:`make` (or build via higher-level config helpers); it derives
    the per-kind constants: the peak detuning for Lorentzian reservoirs and
    the effective (integer-rounded, when applicable) Ohmic exponent.
    """

    reservoir: ReservoirSpec
    omega_eg: float
    delta_c: float | None = None
    s_eff: float | None = None
    _samples: tuple[np.ndarray, np.ndarray] | None = field(default=None, repr=False)

    @classmethod
    def make(cls, reservoir: ReservoirSpec, omega_eg: float) -> "KernelHandle":
        delta_c = None
        s_eff = None
        samples = None
        if reservoir.kind is ReservoirKind.LORENTZIAN:
            if reservoir.delta_c is not None:
                delta_c = reservoir.delta_c
            else:
                delta_c = reservoir.omega_c - omega_eg
        elif reservoir.kind is ReservoirKind.OHMIC:
            s_eff = reservoir.s_param
            if abs(s_eff - round(s_eff)) < INTEGER_S_TOL:
                s_eff = float(round(s_eff))
        else:
            w = np.array([p[0] for p in reservoir.samples])
            j = np.array([p[1] for p in reservoir.samples])
            w.setflags(write=False)
            j.setflags(write=False)
            samples = (w, j)
        return cls(reservoir=reservoir, omega_eg=float(omega_eg),
                   delta_c=delta_c, s_eff=s_eff, _samples=samples)

    @property
    def kind(self) -> ReservoirKind:
        return self.reservoir.kind

    @property
    def g(self) -> float:
        return self.reservoir.g

    def omega_peak(self) -> float:
        """Absolute Lorentzian peak frequency (reconstructed if needed)."""
        res = self.reservoir
        return res.omega_c if res.omega_c is not None else self.omega_eg + self.delta_c

    def _interp_density(self, omega):
        w, j = self._samples
        return np.interp(omega, w, j, left=0.0, right=0.0)


def spectral_density(h: KernelHandle, omega):
    """Spectral density J(omega); scalar or array ``omega``.

    Ohmic and tabulated densities live on omega >= 0 (DomainError below);
    the Lorentzian is evaluated on the whole real line, consistent with the
    extended-integral kernel.
    """
    omega_arr = np.asarray(omega, dtype=float)
    scalar = omega_arr.shape == ()
    res = h.reservoir
    if res.kind is ReservoirKind.LORENTZIAN:
        half = res.gamma / 2.0
        out = (res.g ** 2 / math.pi) * half / ((omega_arr - h.omega_peak()) ** 2 + half ** 2)
    elif res.kind is ReservoirKind.OHMIC:
        if np.any(omega_arr < 0):
            raise DomainError("Ohmic spectral density requires omega >= 0")
        norm = 1.0 / (res.omega_c ** 2 * math.gamma(1.0 + res.s_param))
        x = omega_arr / res.omega_c
        out = norm * res.g ** 2 * res.omega_c * x ** res.s_param * np.exp(-x)
    else:
        if np.any(omega_arr < 0):
            raise DomainError("tabulated spectral density requires omega >= 0")
        out = h._interp_density(omega_arr)
    return float(out) if scalar else out


def memory_kernel(h: KernelHandle, t):
    """Memory kernel R(t) for t >= 0; scalar or array ``t``."""
    t_arr = np.asarray(t, dtype=float)
    scalar = t_arr.shape == ()
    if np.any(t_arr < 0):
        raise DomainError("memory kernel defined for t >= 0")
    res = h.reservoir
    if res.g == 0.0:
        out = np.zeros(t_arr.shape, dtype=complex)
        return complex(out[()]) if scalar else out
    if res.kind is ReservoirKind.LORENTZIAN:
        out = res.g ** 2 * np.exp(-(1j * h.delta_c + res.gamma / 2.0) * t_arr)
    elif res.kind is ReservoirKind.OHMIC:
        base = 1.0 + 1j * res.omega_c * t_arr
        out = res.g ** 2 * np.exp(1j * h.omega_eg * t_arr) * base ** (-1.0 - h.s_eff)
    else:
        out = np.array([_tabulated_memory_kernel(h, tv) for tv in np.atleast_1d(t_arr)])
        out = out.reshape(t_arr.shape)
    return complex(out[()]) if scalar else out


def _tabulated_memory_kernel(h: KernelHandle, t: float) -> complex:
    # The linear interpolant's Fourier transform has a closed form per
    # segment; summing those is exact, unlike adaptive quadrature, whose
    # error estimate collapses on the interpolation kinks for large t.
    w, j = h._samples
    wa = w[:-1]
    seg = w[1:] - wa
    ja = j[:-1]
    slope = (j[1:] - ja) / seg
    x = seg * t
    i0 = np.empty(seg.size, dtype=complex)  # int_0^L e^{-i x' t} dx'
    i1 = np.empty(seg.size, dtype=complex)  # int_0^L x' e^{-i x' t} dx'
    small = np.abs(x) < 1e-3
    if np.any(small):
        xs = x[small]
        i0[small] = seg[small] * _segment_series(xs, 1)
        i1[small] = seg[small] ** 2 * _segment_series(xs, 2)
    big = ~small
    if np.any(big):
        xb = x[big]
        phase = np.exp(-1j * xb)
        i0[big] = (1.0 - phase) / (1j * t)
        i1[big] = (phase * (1.0 + 1j * xb) - 1.0) / (t * t)
    total = np.sum(np.exp(-1j * wa * t) * (ja * i0 + slope * i1))
    return complex(np.exp(1j * h.omega_eg * t) * total)


def _segment_series(x: np.ndarray, order: int) -> np.ndarray:
    """sum_k (-i x)^k / (k! (k + order)): the small-|x| limit of the segment
    integrals (order 1 and 2), stable where the direct form cancels."""
    u = -1j * x
    k_fact = 1.0
    out = np.zeros(x.shape, dtype=complex)
    term = np.ones(x.shape, dtype=complex)
    for k in range(0, 6):
        out = out + term / (k_fact * (k + order))
        term = term * u
        k_fact *= k + 1.0
    return out


def _check_quad(err: float):
    if not np.isfinite(err) or err > 1e3 * QUAD_ABS_TOL:
        raise QuadratureError(f"tabulated-kernel quadrature error estimate {err:g}")


def laplace_kernel(h: KernelHandle, s):
    """Laplace-domain kernel B(s); scalar or array ``s``, Re(s) > 0 intended.

    Raises BranchError when an Ohmic evaluation lands on the branch cut of
    the incomplete gamma factor (s on the imaginary axis at Im(s) <=
    omega_eg), and QuadratureError when the tabulated path fails.
    """
    s_arr = np.asarray(s, dtype=complex)
    scalar = s_arr.shape == ()
    res = h.reservoir
    if res.g == 0.0:
        out = np.zeros(s_arr.shape, dtype=complex)
        return complex(out[()]) if scalar else out
    if res.kind is ReservoirKind.LORENTZIAN:
        out = res.g ** 2 / (s_arr + res.gamma / 2.0 + 1j * h.delta_c)
    elif res.kind is ReservoirKind.OHMIC:
        out = _ohmic_laplace_kernel(h, s_arr)
    else:
        out = np.array([_tabulated_laplace_kernel(h, sv) for sv in np.atleast_1d(s_arr)])
        out = out.reshape(s_arr.shape)
    return complex(out[()]) if scalar else out


def _ohmic_laplace_kernel(h: KernelHandle, s: np.ndarray) -> np.ndarray:
    res = h.reservoir
    sp = h.s_eff
    kk = (s - 1j * h.omega_eg) / res.omega_c
    z = -1j * kk
    on_cut = (z.imag == 0) & (z.real <= 0)
    if np.any(on_cut):
        raise BranchError(
            f"Ohmic kernel branch cut hit at s={np.atleast_1d(s)[np.argwhere(np.atleast_1d(on_cut))[0][0]]}")
    # exp(-iK) * Gamma(-S, -iK) stays finite on vertical contours even where
    # the factors overflow; evaluate it as the scaled incomplete gamma.
    scaled = upper_incomplete_gamma(-sp, z, scaled=True).value
    prefactor = -res.g ** 2 * (1j ** (1.0 - sp)) / res.omega_c
    return prefactor * np.exp(sp * np.log(kk)) * scaled


def _tabulated_laplace_kernel(h: KernelHandle, s: complex) -> complex:
    w, _ = h._samples
    dens = h._interp_density
    pts = list(w)

    def integrand_re(omega):
        return (dens(omega) / (s + 1j * (omega - h.omega_eg))).real

    def integrand_im(omega):
        return (dens(omega) / (s + 1j * (omega - h.omega_eg))).imag

    re, err_re = integrate.quad(integrand_re, w[0], w[-1], points=pts, limit=400, epsabs=QUAD_ABS_TOL)
    im, err_im = integrate.quad(integrand_im, w[0], w[-1], points=pts, limit=400, epsabs=QUAD_ABS_TOL)
    _check_quad(max(err_re, err_im))
    return complex(re + 1j * im)


def load_tabulated(path) -> ReservoirSpec:
    """Load a tabulated density from two-column text (omega, J); '#' comments."""
    data = np.loadtxt(path, comments="#", dtype=float)
    if data.ndim != 2 or data.shape[1] != 2:
        raise DomainError(f"{path}: expected two columns (omega, J)")
    return ReservoirSpec.tabulated(data[:, 0], data[:, 1])
