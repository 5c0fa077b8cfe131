"""Complex special functions: upper incomplete gamma and exponential integral.

Evaluates ``Gamma(a, z)`` for real ``a`` (including zero and negative values)
and complex ``z`` on the principal branch (cut along the negative real axis),
plus ``E1(z) = Gamma(0, z)``.  Inputs may be scalars or numpy arrays of any
shape; ``a`` is always a scalar.

Four evaluation kernels cover the plane, selected per element:

* power series around ``z = 0`` (also the only safe route hugging the branch
  cut at moderate ``|z|``, where its internal sum has nearly constant phase);
* modified-Lentz continued fraction away from the cut;
* divergent asymptotic series for large ``|z|`` near the cut;
* the finite-sum reduction of ``Gamma(-n, z)`` to ``Gamma(0, z)`` for
  negative integer order, restricted to moderate ``|z|`` where its leading
  terms do not cancel.

Every kernel can also return the scaled function ``exp(z) * Gamma(a, z)``,
which stays representable along vertical contours deep in the left half
plane where the unscaled value overflows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError

__all__ = ["GammaResult", "upper_incomplete_gamma", "exp_integral_e1"]

MAX_ITER = 10_000
_TINY = 1e-300
_EPS = 1e-16

# Region boundaries (see module docstring).  NEAR_CUT_ARG is the |arg z|
# above which the continued fraction stalls and the series takes over;
# ASYM_RADIUS is where the asymptotic series reaches ~1e-13.
_NEAR_CUT_ARG = 2.9
_ASYM_RADIUS = 48.0
_SERIES_RADIUS = 3.0
_E1_SERIES_RADIUS = 2.5

_EULER_GAMMA = 0.5772156649015328606


@dataclass(frozen=True)
class GammaResult:
    """Function value(s) with a per-element relative error estimate."""

    value: complex | np.ndarray
    est_error: float | np.ndarray


def _as_complex_array(z):
    arr = np.asarray(z, dtype=complex)
    return arr, arr.shape == ()


# ---------------------------------------------------------------------------
# evaluation kernels (flat complex arrays in, scaled values out)
# ---------------------------------------------------------------------------

def _cf_scaled(a: float, z: np.ndarray):
    """exp(z)*Gamma(a,z) by modified Lentz on the standard continued fraction.

    Returns (value, est_error, converged).  Valid off the negative real
    axis; convergence degrades as arg(z) approaches +-pi.
    """
    n = z.size
    value = np.empty(n, dtype=complex)
    est = np.empty(n, dtype=float)
    done = np.zeros(n, dtype=bool)

    idx = np.arange(n)
    b = z + (1.0 - a)
    d = np.where(np.abs(b) < _TINY, _TINY, b).astype(complex)
    d = 1.0 / d
    c = np.full(n, 1.0 / _TINY, dtype=complex)
    h = d.copy()
    zc = z.copy()

    for i in range(1, MAX_ITER + 1):
        an = -i * (i - a)
        b = b + 2.0
        d = an * d + b
        np.copyto(d, _TINY, where=np.abs(d) < _TINY)
        c = b + an / c
        np.copyto(c, _TINY, where=np.abs(c) < _TINY)
        d = 1.0 / d
        delta = d * c
        h *= delta
        conv = np.abs(delta - 1.0) < _EPS
        if np.any(conv):
            out = idx[conv]
            value[out] = h[conv]
            est[out] = np.abs(delta[conv] - 1.0) + _EPS
            done[out] = True
            keep = ~conv
            if not np.any(keep):
                break
            idx, b, c, d, h, zc = (x[keep] for x in (idx, b, c, d, h, zc))

    if idx.size:
        value[idx] = h
        est[idx] = 1.0  # did not converge; caller decides
    converged = done.copy()
    zpow_a = np.exp(a * np.log(np.where(z == 0, 1.0, z)))
    value *= zpow_a
    est *= 4.0
    return value, est, converged


def _asym_scaled(a: float, z: np.ndarray):
    """exp(z)*Gamma(a,z) ~ z^(a-1) * sum_k (a-1)...(a-k) / z^k for large |z|."""
    s = np.ones_like(z)
    term = np.ones_like(z)
    frozen = np.zeros(z.shape, dtype=bool)
    best = np.full(z.shape, np.inf)
    for k in range(1, 200):
        term = term * ((a - k) / z)
        mag = np.abs(term)
        # stop a lane once its terms start growing (divergent tail)
        frozen |= mag > best
        np.copyto(best, mag, where=~frozen)
        s = np.where(frozen, s, s + term)
        if np.all(frozen | (mag < _EPS * np.abs(s))):
            break
    est = np.abs(term) / np.maximum(np.abs(s), _TINY) + _EPS
    value = np.exp((a - 1.0) * np.log(z)) * s
    return value, est, est < 1e-10


def _series_scaled(a: float, z: np.ndarray):
    """exp(z)*Gamma(a,z) from the lower-gamma power series, non-integer a > or < 0.

    Gamma(a,z) = Gamma(a) - z^a sum_k (-z)^k / (k! (a+k)).
    """
    s = np.zeros_like(z)
    term = np.ones_like(z)  # (-z)^k / k!
    active = np.ones(z.shape, dtype=bool)
    for k in range(0, 2 * MAX_ITER):
        s = np.where(active, s + term / (a + k), s)
        term = term * (-z / (k + 1.0))
        active = np.abs(term) > _EPS * np.abs(a + k) * np.maximum(np.abs(s), _TINY)
        if not np.any(active):
            break
    gamma_a = math.gamma(a)
    log_z = np.log(np.where(z == 0, 1.0, z))
    value = np.exp(z) * gamma_a - np.exp(z + a * log_z) * s
    if np.any(z == 0):
        value = np.where(z == 0, gamma_a if a > 0 else np.inf, value)
    # cancellation between Gamma(a) and the sum bounds the achievable accuracy
    cancel = (abs(gamma_a) + np.abs(np.exp(a * log_z) * s)) / np.maximum(np.abs(value * np.exp(-z)), _TINY)
    est = _EPS * np.maximum(cancel, 4.0)
    return value, est, ~active if isinstance(active, np.ndarray) else np.ones(z.shape, bool)


def _e1_series_scaled(z: np.ndarray):
    """exp(z)*E1(z) by the log series: E1 = -gamma - Log z + sum (-1)^{k+1} z^k/(k k!)."""
    s = np.zeros_like(z)
    term = np.ones_like(z)  # (-z)^k / k!
    for k in range(1, 2 * MAX_ITER):
        term = term * (-z / k)
        s = s - term / k
        if np.all(np.abs(term) < _EPS * k * np.maximum(np.abs(s), _TINY)):
            break
    e1 = -_EULER_GAMMA - np.log(z) + s
    value = np.exp(z) * e1
    cancel = (_EULER_GAMMA + np.abs(np.log(z)) + np.abs(s)) / np.maximum(np.abs(e1), _TINY)
    est = _EPS * np.maximum(cancel, 4.0)
    return value, est, np.ones(z.shape, dtype=bool)


def _int_series_scaled(n: int, z: np.ndarray):
    """exp(z)*Gamma(-n,z) by the integer-order limit of the power series.

    Gamma(-n,z) = ((-1)^n/n!) (psi(n+1) - Log z) - z^(-n) sum_{k != n} (-z)^k / (k! (k-n)).
    """
    if n == 0:
        return _e1_series_scaled(z)
    psi = -_EULER_GAMMA + sum(1.0 / j for j in range(1, n + 1))
    s = np.zeros_like(z)
    term = np.ones_like(z)  # (-z)^k / k!
    for k in range(0, 2 * MAX_ITER):
        if k != n:
            s = s + term / (k - n)
        term = term * (-z / (k + 1.0))
        if k > n and np.all(np.abs(term) < _EPS * (k - n) * np.maximum(np.abs(s), _TINY)):
            break
    sign = -1.0 if n % 2 else 1.0
    log_z = np.log(z)
    gamma_val = (sign / math.factorial(n)) * (psi - log_z) - np.exp(-n * log_z) * s
    value = np.exp(z) * gamma_val
    cancel = (abs(psi) + np.abs(log_z) + np.abs(np.exp(-n * log_z) * s)) / np.maximum(np.abs(gamma_val), _TINY)
    est = _EPS * np.maximum(cancel, 4.0)
    return value, est, np.ones(z.shape, dtype=bool)


def _eq22_scaled(n: int, z: np.ndarray):
    """exp(z)*Gamma(-n,z) via the reduction to Gamma(0,z) for integer n >= 1.

    Gamma(-n,z) = (1/n!) [ e^{-z} z^{-n} sum_{k=0}^{n-1} (-1)^k (n-k-1)! z^k
                           + (-1)^n Gamma(0,z) ].

    The two parts share the leading 1/z behaviour for large |z|, so the
    reduction loses about n*log10|z| digits there; callers restrict it to
    moderate |z|.
    """
    e1, e1_est, ok = _e1_scaled_flat(z)
    fsum = np.zeros_like(z)
    for k in range(0, n):
        coeff = ((-1.0) ** k) * math.factorial(n - k - 1)
        fsum = fsum + coeff * np.exp((k - n) * np.log(z))
    sign = -1.0 if n % 2 else 1.0
    value = (fsum + sign * e1) / math.factorial(n)
    cancel = (np.abs(fsum) + np.abs(e1)) / np.maximum(np.abs(value) * math.factorial(n), _TINY)
    est = np.maximum(e1_est, _EPS * np.maximum(cancel, 4.0))
    return value, est, ok


# ---------------------------------------------------------------------------
# region dispatch
# ---------------------------------------------------------------------------

def _dispatch(masks_and_kernels, z):
    value = np.empty(z.shape, dtype=complex)
    est = np.empty(z.shape, dtype=float)
    converged = np.zeros(z.shape, dtype=bool)
    for mask, kernel in masks_and_kernels:
        if np.any(mask):
            v, e, ok = kernel(z[mask])
            value[mask] = v
            est[mask] = e
            converged[mask] = ok
    return value, est, converged


def _e1_scaled_flat(z: np.ndarray):
    r = np.abs(z)
    theta = np.abs(np.angle(z))
    near_cut = theta > _NEAR_CUT_ARG
    series = (r < _E1_SERIES_RADIUS) | (near_cut & (r < _ASYM_RADIUS))
    asym = ~series & near_cut
    cf = ~series & ~asym
    return _dispatch([
        (series, _e1_series_scaled),
        (asym, lambda w: _asym_scaled(0.0, w)),
        (cf, lambda w: _cf_scaled(0.0, w)),
    ], z)


def _gamma_scaled_flat(a: float, z: np.ndarray):
    r = np.abs(z)
    theta = np.abs(np.angle(z))
    near_cut = theta > _NEAR_CUT_ARG

    n_int = round(a)
    if abs(a - n_int) < 1e-14 and n_int <= 0:
        n = -n_int
        if n == 0:
            return _e1_scaled_flat(z)
        # the finite-sum reduction cancels like |z|^n; keep it where that
        # costs at most ~3 digits, use series/CF/asymptotics beyond
        eq22_radius = 1000.0 ** (1.0 / n)
        eq22 = r <= eq22_radius
        rest = ~eq22
        series = rest & near_cut & (r < _ASYM_RADIUS)
        asym = rest & near_cut & (r >= _ASYM_RADIUS)
        cf = rest & ~near_cut
        return _dispatch([
            (eq22, lambda w: _eq22_scaled(n, w)),
            (series, lambda w: _int_series_scaled(n, w)),
            (asym, lambda w: _asym_scaled(a, w)),
            (cf, lambda w: _cf_scaled(a, w)),
        ], z)

    series_radius = max(_SERIES_RADIUS, a + 1.0)
    series = (r < series_radius) | (near_cut & (r < _ASYM_RADIUS))
    asym = ~series & near_cut
    cf = ~series & ~asym
    return _dispatch([
        (series, lambda w: _series_scaled(a, w)),
        (asym, lambda w: _asym_scaled(a, w)),
        (cf, lambda w: _cf_scaled(a, w)),
    ], z)


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def _finalize(name, z, value, est, converged, scaled, scalar_in):
    if not scaled:
        value = value * np.exp(-z)
    if not np.all(converged):
        bad = np.argwhere(~np.atleast_1d(converged))[0]
        raise ConvergenceError(
            f"{name}: iteration cap {MAX_ITER} hit at z={np.atleast_1d(z)[tuple(bad)]}",
            value=value if not scalar_in else complex(value[()]),
            est_error=est if not scalar_in else float(est[()]))
    if scalar_in:
        return GammaResult(value=complex(value[()]), est_error=float(est[()]))
    return GammaResult(value=value, est_error=est)


def upper_incomplete_gamma(a: float, z, *, scaled: bool = False) -> GammaResult:
    """Upper incomplete gamma Gamma(a, z) for real a and complex z.

    Principal branch (cut along the negative real z-axis).  With
    ``scaled=True`` returns ``exp(z) * Gamma(a, z)``, which avoids overflow
    for Re(z) << 0.

    Raises:
        DomainError: z = 0 with a <= 0 (the function is singular there).
        ConvergenceError: iteration cap hit; the exception carries the
            partial value and its error estimate.
    """
    a = float(a)
    zarr, scalar_in = _as_complex_array(z)
    flat = zarr.ravel()
    if a <= 0 and np.any(flat == 0):
        raise DomainError(f"Gamma(a, 0) is singular for a <= 0 (a={a})")
    value, est, converged = _gamma_scaled_flat(a, flat)
    return _finalize("upper_incomplete_gamma", zarr,
                     value.reshape(zarr.shape), est.reshape(zarr.shape),
                     converged.reshape(zarr.shape), scaled, scalar_in)


def exp_integral_e1(z, *, scaled: bool = False) -> GammaResult:
    """Exponential integral E1(z) = Gamma(0, z), principal branch.

    With ``scaled=True`` returns ``exp(z) * E1(z)``.

    Raises:
        DomainError: z = 0.
        ConvergenceError: iteration cap hit.
    """
    zarr, scalar_in = _as_complex_array(z)
    flat = zarr.ravel()
    if np.any(flat == 0):
        raise DomainError("E1(0) is singular")
    value, est, converged = _e1_scaled_flat(flat)
    return _finalize("exp_integral_e1", zarr,
                     value.reshape(zarr.shape), est.reshape(zarr.shape),
                     converged.reshape(zarr.shape), scaled, scalar_in)
