"""Forward projector: analytic anchors, parity, linearity, kernel."""

import numpy as np
import pytest

from tensorray import (
    Sinogram,
    TensorField2D,
    forward,
    gaussian_test_field,
    parity_residual,
    solenoidal_project,
)


class TestForward:
    def test_gaussian_anchor_desk_scale(self, grid256):
        # line integrals of exp(-|x|^2/2) are sqrt(2*pi) exp(-p^2/2)
        f = gaussian_test_field(0, "generic", grid256)
        psi = forward(f, num_p=257, ntheta=128)
        ps = psi.p_axis()
        exact = np.sqrt(2.0 * np.pi) * np.exp(-(ps**2) / 2.0)
        err = np.abs(psi.samples - exact[:, None]).max() / exact.max()
        assert err < 1e-6

    def test_zero_field(self, grid64):
        f = TensorField2D(m=1, grid=grid64, components=np.zeros((2, 64, 64)))
        psi = forward(f, num_p=33, ntheta=16)
        assert np.all(psi.samples == 0)

    def test_linearity(self, grid64):
        f = gaussian_test_field(1, "solenoidal", grid64)
        g = gaussian_test_field(1, "potential", grid64)
        combo = TensorField2D(
            m=1, grid=grid64, components=1.7 * f.components + g.components
        )
        lhs = forward(combo, num_p=33, ntheta=16).samples
        rhs = 1.7 * forward(f, num_p=33, ntheta=16).samples + forward(g, num_p=33, ntheta=16).samples
        assert np.abs(lhs - rhs).max() < 1e-12 * max(1.0, np.abs(rhs).max())

    def test_pmax_below_radius_rejected(self, grid64):
        f = gaussian_test_field(0, "generic", grid64)
        with pytest.raises(ValueError, match="truncated"):
            forward(f, pmax=4.0)

    @pytest.mark.parametrize("m", [1, 2])
    def test_kernel_annihilates_potential_parts(self, m, grid128):
        f = gaussian_test_field(m, "generic", grid128)
        pot = TensorField2D(
            m=m, grid=grid128,
            components=f.components - solenoidal_project(f).components,
        )
        num = np.abs(forward(pot, num_p=129, ntheta=64).samples).max()
        den = np.abs(forward(f, num_p=129, ntheta=64).samples).max()
        assert num / den < 1e-3

    @pytest.mark.parametrize("m", [1, 2])
    def test_forward_factors_through_projection(self, m, grid128):
        # the transform only sees the solenoidal part
        f = gaussian_test_field(m, "generic", grid128)
        a = forward(f, num_p=129, ntheta=64).samples
        b = forward(solenoidal_project(f), num_p=129, ntheta=64).samples
        assert np.abs(a - b).max() / np.abs(a).max() < 1e-3

    def test_threads_do_not_change_results(self, grid64, monkeypatch):
        f = gaussian_test_field(1, "generic", grid64)
        serial = forward(f, num_p=33, ntheta=16).samples
        monkeypatch.setenv("TENSORRAY_THREADS", "4")
        threaded = forward(f, num_p=33, ntheta=16).samples
        assert np.array_equal(serial, threaded)


class TestParityResidual:
    def test_forward_outputs_satisfy_parity(self, grid128):
        for m in (0, 1, 2):
            f = gaussian_test_field(m, "generic", grid128)
            psi = forward(f, num_p=65, ntheta=32)
            assert parity_residual(psi) < 1e-12

    def test_even_num_p_grid_is_still_symmetric(self, grid64):
        f = gaussian_test_field(1, "solenoidal", grid64)
        psi = forward(f, num_p=40, ntheta=16)
        assert parity_residual(psi) < 1e-12

    def test_constructed_violation(self):
        thetas = 2.0 * np.pi * np.arange(16) / 16
        samples = np.broadcast_to(np.cos(thetas), (9, 16)).copy()
        psi = Sinogram(m=0, pmax=4.0, samples=samples)
        # cos(theta + pi) = -cos(theta), so the mismatch is 2|cos| and the
        # normalized residual is exactly 2
        assert parity_residual(psi) == pytest.approx(2.0)

    def test_constant_sinogram_passes(self):
        psi = Sinogram(m=0, pmax=4.0, samples=np.ones((9, 16)))
        assert parity_residual(psi) == 0.0

    def test_zero_sinogram(self):
        psi = Sinogram(m=3, pmax=4.0, samples=np.zeros((9, 16)))
        assert parity_residual(psi) == 0.0


class TestSinogramValidation:
    def test_odd_ntheta_rejected(self):
        with pytest.raises(ValueError, match="even"):
            Sinogram(m=0, pmax=1.0, samples=np.zeros((5, 7)))

    def test_non_finite_rejected(self):
        bad = np.zeros((5, 8))
        bad[2, 3] = np.nan
        with pytest.raises(ValueError, match="non-finite"):
            Sinogram(m=0, pmax=1.0, samples=bad)

    def test_samples_read_only(self, grid64):
        psi = forward(gaussian_test_field(0, "generic", grid64), num_p=17, ntheta=8)
        with pytest.raises(ValueError):
            psi.samples[0, 0] = 1.0
