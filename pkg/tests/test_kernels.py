import math

import numpy as np
import pytest

from spinchain.errors import BranchError, DomainError
from spinchain.kernels import (KernelHandle, laplace_kernel, load_tabulated,
                               memory_kernel, spectral_density)
from spinchain.model import ReservoirSpec

from oracles import laplace_of_kernel_numeric


def lorentzian_handle(g=0.3, gamma=0.02, delta_c=0.0, omega_eg=0.0):
    return KernelHandle.make(ReservoirSpec.lorentzian(g=g, gamma=gamma, delta_c=delta_c),
                             omega_eg)


def ohmic_handle(g=0.3, omega_c=1.0, s_param=1.0, omega_eg=1.0):
    return KernelHandle.make(ReservoirSpec.ohmic(g=g, omega_c=omega_c, s_param=s_param),
                             omega_eg)


def tabulated_handle(omega_eg=1.0):
    # a smooth bump sampled densely; support well inside omega >= 0
    w = np.linspace(0.2, 4.0, 400)
    j = np.exp(-((w - 1.5) ** 2) / 0.18) * 0.04
    return KernelHandle.make(ReservoirSpec.tabulated(w, j), omega_eg)


class TestSpectralDensity:
    def test_lorentzian_peak_value(self):
        h = lorentzian_handle(g=0.3, gamma=0.02, delta_c=0.0, omega_eg=1.0)
        want = 2 * 0.3 ** 2 / (math.pi * 0.02)
        assert spectral_density(h, 1.0) == pytest.approx(want, rel=1e-14)

    def test_ohmic_peak_at_cutoff_for_s_one(self):
        h = ohmic_handle(s_param=1.0, omega_c=1.3)
        w = np.linspace(0.0, 8.0, 4001)
        assert w[np.argmax(spectral_density(h, w))] == pytest.approx(1.3, abs=5e-3)

    @pytest.mark.parametrize("s_param,omega_c", [(0.5, 1.0), (2.0, 1.0), (3.0, 0.7)])
    def test_ohmic_peak_at_s_times_cutoff(self, s_param, omega_c):
        h = ohmic_handle(s_param=s_param, omega_c=omega_c)
        w = np.linspace(0.0, 10.0, 8001)
        assert w[np.argmax(spectral_density(h, w))] == pytest.approx(s_param * omega_c, abs=5e-3)

    def test_ohmic_normalization_constant(self):
        # J(omega) = g^2 omega_c (omega/omega_c)^S e^{-omega/omega_c} / (omega_c^2 Gamma(1+S))
        h = ohmic_handle(g=0.5, omega_c=2.0, s_param=1.7)
        w = 3.1
        want = (0.25 * 2.0 * (w / 2.0) ** 1.7 * math.exp(-w / 2.0)
                / (4.0 * math.gamma(2.7)))
        assert spectral_density(h, w) == pytest.approx(want, rel=1e-13)

    def test_negative_frequency_rejected_for_ohmic(self):
        with pytest.raises(DomainError):
            spectral_density(ohmic_handle(), -0.1)
        # Lorentzian is evaluated on the whole line (extended integral)
        assert spectral_density(lorentzian_handle(omega_eg=1.0), -1.0) > 0


class TestMemoryKernel:
    def test_value_at_zero_is_g_squared(self):
        assert memory_kernel(lorentzian_handle(g=0.7), 0.0) == pytest.approx(0.49, rel=1e-10)
        assert memory_kernel(ohmic_handle(g=0.7), 0.0) == pytest.approx(0.49, rel=1e-10)
        h = tabulated_handle()
        assert memory_kernel(h, 0.0) == pytest.approx(h.g ** 2, rel=1e-6)

    def test_lorentzian_closed_form_value(self):
        got = memory_kernel(lorentzian_handle(g=0.3, gamma=0.02, delta_c=0.0), 10.0)
        assert got == pytest.approx(0.09 * math.exp(-0.1), rel=1e-12)

    def test_ohmic_closed_form_value(self):
        got = memory_kernel(ohmic_handle(g=0.3, omega_c=1.0, s_param=1.0, omega_eg=1.0), 1.0)
        want = 0.09 * np.exp(1j) * (1 + 1j) ** -2
        assert got == pytest.approx(want, rel=1e-12)

    def test_ohmic_against_frequency_integral(self):
        # direct quadrature of the defining integral over the density
        from scipy.integrate import quad
        h = ohmic_handle(g=0.3, omega_c=1.0, s_param=1.0, omega_eg=1.0)
        t = 1.0
        re, _ = quad(lambda w: spectral_density(h, w) * math.cos((w - 1.0) * t), 0, 60, limit=400)
        im, _ = quad(lambda w: spectral_density(h, w) * math.sin((w - 1.0) * t), 0, 60, limit=400)
        assert memory_kernel(h, t) == pytest.approx(re - 1j * im, rel=1e-9)

    def test_negative_time_rejected(self):
        with pytest.raises(DomainError):
            memory_kernel(lorentzian_handle(), -1.0)

    def test_zero_coupling_kills_kernel(self):
        h = KernelHandle.make(ReservoirSpec.lorentzian(g=0.0, gamma=0.1, delta_c=0.0), 0.0)
        t = np.linspace(0, 5, 7)
        assert np.all(memory_kernel(h, t) == 0)
        assert np.all(laplace_kernel(h, 1.0 + 1j * t) == 0)


class TestLaplaceKernel:
    def test_lorentzian_at_origin(self):
        h = lorentzian_handle(g=0.3, gamma=0.02, delta_c=0.0)
        assert laplace_kernel(h, 0.0) == pytest.approx(9.0, rel=1e-14)

    def test_lorentzian_decay_at_infinity(self):
        h = lorentzian_handle()
        s = 1e8
        assert abs(laplace_kernel(h, s)) == pytest.approx(h.g ** 2 / s, rel=1e-6)

    def test_lorentzian_pole_residue(self):
        h = lorentzian_handle(g=0.4, gamma=0.3, delta_c=0.7)
        pole = -0.15 - 0.7j
        for eps in (1e-3, 1e-5):
            s = pole + eps * np.exp(0.3j)
            assert abs(laplace_kernel(h, s)) * abs(s - pole) == pytest.approx(0.16, rel=1e-9)

    def test_ohmic_against_numerical_transform(self):
        h = ohmic_handle(g=0.3, omega_c=1.0, s_param=1.0, omega_eg=1.0)
        want = laplace_of_kernel_numeric(h, 1.0)
        assert laplace_kernel(h, 1.0) == pytest.approx(want, rel=1e-8)

    def test_ohmic_integer_and_near_integer_agree(self):
        # exponents within the detection tolerance route through the integer
        # reduction; the value must not jump across that switch
        h_int = ohmic_handle(s_param=2.0)
        h_near = ohmic_handle(s_param=2.0 + 5e-10)
        h_off = ohmic_handle(s_param=2.0 + 1e-6)
        s = 0.8 + 0.5j
        assert laplace_kernel(h_int, s) == pytest.approx(laplace_kernel(h_near, s), rel=1e-12)
        assert laplace_kernel(h_int, s) == pytest.approx(laplace_kernel(h_off, s), rel=1e-5)

    def test_ohmic_branch_cut_raises(self):
        h = ohmic_handle(omega_eg=1.0)
        with pytest.raises(BranchError):
            laplace_kernel(h, 0.5j)  # imaginary axis below i*omega_eg

    def test_array_shapes(self):
        h = lorentzian_handle()
        s = (1.0 + 1j * np.linspace(-3, 3, 5)).reshape(5, 1)
        assert laplace_kernel(h, s).shape == (5, 1)


@pytest.mark.parametrize("make_handle,tol", [
    (lambda: lorentzian_handle(g=0.5, gamma=0.4, delta_c=0.3, omega_eg=1.0), 1e-7),
    (lambda: ohmic_handle(g=0.4, omega_c=1.2, s_param=1.7, omega_eg=0.8), 1e-7),
    (lambda: ohmic_handle(g=0.4, omega_c=0.9, s_param=3.0, omega_eg=1.0), 1e-7),
    (tabulated_handle, 1e-6),
])
def test_kernel_transform_duality(make_handle, tol):
    """laplace_kernel equals the numerical Laplace transform of memory_kernel."""
    h = make_handle()
    rng = np.random.default_rng(7)
    for _ in range(8):
        s = complex(rng.uniform(0.1, 2.0), rng.uniform(-2.5, 2.5))
        want = laplace_of_kernel_numeric(h, s)
        got = laplace_kernel(h, s)
        assert abs(got - want) / abs(want) < tol, s


def test_tabulated_loader(tmp_path):
    table = tmp_path / "density.txt"
    table.write_text("# omega  J(omega)\n0.0 0.0\n0.5 0.2\n1.0 0.3\n2.0 0.0\n")
    spec = load_tabulated(table)
    h = KernelHandle.make(spec, 0.5)
    assert spectral_density(h, 0.75) == pytest.approx(0.25, rel=1e-12)
    assert spectral_density(h, 3.0) == 0.0
    with pytest.raises(DomainError):
        load_tabulated_bad(tmp_path)


def load_tabulated_bad(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("0.0 0.1 0.2\n1.0 0.2 0.3\n")
    return load_tabulated(bad)
