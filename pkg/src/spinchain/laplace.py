"""Laplace-space algebra: the A-polynomial sequence, closed-form F1, and the
recursion expressing every transformed amplitude through F1.

The transformed amplitudes F_i(s) of an N-site chain satisfy a tridiagonal
algebraic system whose corner entries carry the reservoir kernels B1(s),
B2(s).  Organizing that system recursively expresses each F_i through F1
with polynomial coefficients A_m(s) obeying

    A_{m+2} = (i k s) A_{m+1} - A_m,   A_1 = 1,  A_2 = i k s,  k = 2/coupling,

(a Chebyshev-like three-term recursion, evaluated as such; the surd closed
form lives in the test suite as an oracle), and yields a closed form for F1
itself.  A_0 = 0 extends the recursion downward so the two-site chain is
covered by the same formulas.

Numerical caveat: |A_m(s)| grows like |k s|^(m-1) once |k s| >> 1, so the
recursion route loses precision to cancellation for large |Im s| on long
chains.  ``amplitudes`` therefore picks, per evaluation point, between the
recursion and an equivalent stable tridiagonal (Thomas) solve of the same
algebraic system; the closed forms stay exact where they are well
conditioned, and the dense linear-solve oracle in the tests pins both.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConsistencyError, SingularPoint
from .kernels import KernelHandle, laplace_kernel
from .model import ChainSpec, InitialState, ValidatedConfig

__all__ = ["ASequence", "LaplaceState", "a_sequence", "f1", "f_all", "amplitudes"]

#: relative residual of the closing equation above which the recursion route
#: is declared cancellation-poisoned at that s
RESIDUAL_TOL = 1e-9

#: magnitude of the F1 denominator below which the point counts as singular
DENOM_FLOOR = 1e-300

#: keep the recursion route while its worst-case cancellation amplification
#: stays within ~1.5 digits, so its roundoff sits at the engine's own floor
_GROWTH_LIMIT = 30.0


@dataclass(frozen=True)
class ASequence:
    """Values A_0..A_n of the coefficient polynomials at one point s."""

    k: float
    s: complex
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __getitem__(self, m: int) -> complex:
        return complex(self.values[m])

    @property
    def n_max(self) -> int:
        return self.values.size - 1


def _a_values(k: float, s: np.ndarray, n_max: int) -> np.ndarray:
    """A_0..A_n_max at each point of ``s``; shape (n_max+1,) + s.shape."""
    s = np.asarray(s, dtype=complex)
    out = np.empty((n_max + 1,) + s.shape, dtype=complex)
    out[0] = 0.0
    out[1] = 1.0
    if n_max >= 2:
        iks = 1j * k * s
        out[2] = iks
        for m in range(3, n_max + 1):
            out[m] = iks * out[m - 1] - out[m - 2]
    return out


def a_sequence(k: float, s: complex, n_max: int) -> ASequence:
    """Evaluate the three-term recursion up to A_n_max at one point."""
    if n_max < 2:
        raise ValueError(f"n_max must be >= 2, got {n_max}")
    return ASequence(k=float(k), s=complex(s), values=_a_values(float(k), complex(s), n_max))


@dataclass(frozen=True)
class LaplaceState:
    """Everything needed to evaluate the transformed amplitudes at any s."""

    chain: ChainSpec
    b1: Callable[[np.ndarray], np.ndarray]
    b2: Callable[[np.ndarray], np.ndarray]
    init: InitialState
    shared_kernels: bool = False

    @classmethod
    def from_config(cls, cfg: ValidatedConfig) -> "LaplaceState":
        h1 = KernelHandle.make(cfg.res1, cfg.chain.omega_eg)
        h2 = KernelHandle.make(cfg.res2, cfg.chain.omega_eg)
        shared = cfg.res1 == cfg.res2
        return cls(chain=cfg.chain,
                   b1=lambda s: laplace_kernel(h1, s),
                   b2=lambda s: laplace_kernel(h2, s),
                   init=cfg.init,
                   shared_kernels=shared)

    def kernel_values(self, s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        v1 = self.b1(s)
        v2 = v1 if self.shared_kernels else self.b2(s)
        return v1, v2


def _f1_from_parts(state: LaplaceState, s, a_vals, b1_val, b2_val):
    """Closed-form F1 given precomputed A values and kernel values."""
    n = state.chain.n_sites
    k = state.chain.k
    c = state.init.amplitudes
    ik = 1j * k
    s_plus_b2 = s + b2_val
    num = ik * c[n - 1] - k ** 2 * s_plus_b2 * a_vals[1] * c[n - 2]
    for m in range(1, n - 1):
        num = num + ik * (ik * s_plus_b2 * a_vals[n - m] - a_vals[n - 1 - m]) * c[m - 1]
    den = (ik * s_plus_b2 * a_vals[n]
           - (1.0 + k ** 2 * b1_val * s_plus_b2) * a_vals[n - 1]
           - ik * b1_val * a_vals[n - 2])
    bad = np.abs(den) < DENOM_FLOOR
    if np.any(bad):
        s_bad = np.atleast_1d(np.asarray(s, dtype=complex))[np.argwhere(np.atleast_1d(bad))[0][0]]
        raise SingularPoint(f"F1 denominator vanished at s={s_bad}")
    return num / den


def f1(state: LaplaceState, s) -> complex | np.ndarray:
    """Closed-form F1(s); scalar or array ``s``."""
    s_arr = np.asarray(s, dtype=complex)
    scalar = s_arr.shape == ()
    a_vals = _a_values(state.chain.k, s_arr, state.chain.n_sites)
    b1_val, b2_val = state.kernel_values(s_arr)
    out = _f1_from_parts(state, s_arr, a_vals, b1_val, b2_val)
    return complex(out[()]) if scalar else out


def _recursion_amplitudes(state: LaplaceState, s, a_vals, b1_val, b2_val):
    """All F_i through the F1-recursion; shape (N,) + s.shape."""
    n = state.chain.n_sites
    k = state.chain.k
    ik = 1j * k
    c = state.init.amplitudes
    f_1 = _f1_from_parts(state, s, a_vals, b1_val, b2_val)
    out = np.empty((n,) + np.shape(s), dtype=complex)
    out[0] = f_1
    for i in range(2, n + 1):
        acc = a_vals[i] * f_1 + a_vals[i - 1] * ik * b1_val * f_1
        for m in range(1, i):
            acc = acc - ik * a_vals[i - m] * c[m - 1]
        out[i - 1] = acc
    return out


def _closing_residual(state: LaplaceState, s, f_vals, b2_val):
    """Relative residual of the last row of the algebraic system."""
    n = state.chain.n_sites
    half = 1j * state.chain.coupling / 2.0
    c_n = state.init.amplitudes[n - 1]
    lhs = (s + b2_val) * f_vals[n - 1] + half * f_vals[n - 2]
    res = lhs - c_n
    scale = np.maximum(np.abs(lhs) + abs(c_n) + np.abs(half * f_vals[n - 2]), 1e-30)
    # a non-finite amplitude (overflowed A_m) counts as a failed closing check
    return np.nan_to_num(np.abs(res) / scale, nan=np.inf)


def f_all(state: LaplaceState, s) -> np.ndarray:
    """All transformed amplitudes F_1..F_N by the F1-recursion.

    Verifies the closing equation of the algebraic system at each point and
    raises :class:`ConsistencyError` when the residual betrays catastrophic
    cancellation there (large |Im s| on long chains).  Shape ``(N,) +
    shape(s)``.
    """
    s_arr = np.asarray(s, dtype=complex)
    a_vals = _a_values(state.chain.k, s_arr, state.chain.n_sites)
    b1_val, b2_val = state.kernel_values(s_arr)
    out = _recursion_amplitudes(state, s_arr, a_vals, b1_val, b2_val)
    residual = _closing_residual(state, s_arr, out, b2_val)
    worst = float(np.max(residual))
    if worst > RESIDUAL_TOL:
        idx = np.argwhere(np.atleast_1d(residual) == worst)
        s_bad = np.atleast_1d(s_arr)[tuple(idx[0])] if idx.size else s_arr
        raise ConsistencyError(
            f"closing-identity residual {worst:g} at s={s_bad}: cancellation in the recursion route")
    return out


def _thomas_amplitudes(state: LaplaceState, s, b1_val, b2_val):
    """Stable tridiagonal solve of the algebraic system; shape (N,) + s.shape."""
    n = state.chain.n_sites
    half = 1j * state.chain.coupling / 2.0
    c = state.init.amplitudes
    s = np.asarray(s, dtype=complex)

    cp = np.empty((n - 1,) + s.shape, dtype=complex)
    dp = np.empty((n,) + s.shape, dtype=complex)
    diag0 = s + b1_val
    cp[0] = half / diag0
    dp[0] = c[0] / diag0
    for i in range(1, n):
        diag = s + b2_val if i == n - 1 else s
        denom = diag - half * cp[i - 1]
        if i < n - 1:
            cp[i] = half / denom
        dp[i] = (c[i] - half * dp[i - 1]) / denom

    out = np.empty((n,) + s.shape, dtype=complex)
    out[n - 1] = dp[n - 1]
    for i in range(n - 2, -1, -1):
        out[i] = dp[i] - cp[i] * out[i + 1]
    return out


def recursion_growth(k: float, s, n_sites: int) -> np.ndarray:
    """Worst-case cancellation amplification of the recursion route at s."""
    x = np.abs(k * np.asarray(s, dtype=complex))
    r_plus = 0.5 * (x + np.sqrt(x * x + 4.0))
    with np.errstate(over="ignore"):
        return r_plus ** (n_sites - 1)


def amplitudes(state: LaplaceState, s) -> np.ndarray:
    """All F_1..F_N, selecting the numerically sound route per point.

    Uses the F1-recursion wherever its cancellation amplification is
    negligible and the Thomas solve of the same tridiagonal system
    elsewhere; any recursion point whose closing residual still misbehaves
    is recomputed stably instead of raising.  Shape ``(N,) + shape(s)``.
    """
    s_arr = np.asarray(s, dtype=complex)
    scalar = s_arr.shape == ()
    s_flat = s_arr.reshape(1) if scalar else s_arr.ravel()
    b1_val, b2_val = state.kernel_values(s_flat)

    growth = recursion_growth(state.chain.k, s_flat, state.chain.n_sites)
    use_rec = growth < _GROWTH_LIMIT
    out = np.empty((state.chain.n_sites, s_flat.size), dtype=complex)

    if np.any(use_rec):
        sr = s_flat[use_rec]
        a_vals = _a_values(state.chain.k, sr, state.chain.n_sites)
        rec = _recursion_amplitudes(state, sr, a_vals, b1_val[use_rec], b2_val[use_rec])
        residual = _closing_residual(state, sr, rec, b2_val[use_rec])
        bad = residual > RESIDUAL_TOL
        if np.any(bad):
            rec[:, bad] = _thomas_amplitudes(state, sr[bad], b1_val[use_rec][bad],
                                             b2_val[use_rec][bad])
        out[:, use_rec] = rec
    if not np.all(use_rec):
        stable = ~use_rec
        out[:, stable] = _thomas_amplitudes(state, s_flat[stable], b1_val[stable], b2_val[stable])

    if scalar:
        return out[:, 0]
    return out.reshape((state.chain.n_sites,) + s_arr.shape)
