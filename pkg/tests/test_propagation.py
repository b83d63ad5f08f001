import cmath
import math
import warnings

import numpy as np
import pytest

import qradar as q
from qradar.propagation import (
    default_extent,
    fresnel_transfer_function,
    load_field,
    nyquist_ratio,
    pulse_peak_time,
    relative_l2_error,
    save_field,
)

C = q.SPEED_OF_LIGHT
OMEGA = 1.2e15
STD = q.FresnelConvention.STANDARD_HALF
VERBATIM = q.FresnelConvention.PAPER_VERBATIM


def brute_force_convolution(conv, geom, omega, r_out, d, half_width, m=801):
    """Riemann sum of kernel * beam over the input plane at the waist."""
    axis = np.linspace(-half_width, half_width, m)
    dx = axis[1] - axis[0]
    x, y = np.meshgrid(axis, axis, indexing="ij")
    u_in = q.gaussian_beam_amplitude(geom, omega, (x, y), 0.0)
    h = q.fresnel_kernel(conv, omega, r_out, (x, y), d)
    return complex(np.sum(h * u_in) * dx * dx)


class TestFresnelKernel:
    def test_coincident_points(self):
        h = q.fresnel_kernel(STD, 2 * math.pi * C, (0.3, -0.2), (0.3, -0.2), 1.0)
        assert abs(h) == pytest.approx(1.0, rel=1e-14)
        assert h == pytest.approx(1j * cmath.exp(-2j * math.pi), abs=1e-14)

    @pytest.mark.parametrize("conv", list(q.FresnelConvention))
    def test_magnitude_independent_of_positions(self, conv):
        rng = np.random.default_rng(3)
        pts = rng.normal(size=(20, 4))
        kappa, d = 7.0, 2.5
        mags = [abs(q.fresnel_kernel(conv, kappa * C, p[:2], p[2:], d)) for p in pts]
        np.testing.assert_allclose(mags, kappa / (2 * math.pi * d), rtol=1e-13)

    def test_conventions_agree_at_coincident_points(self):
        a = q.fresnel_kernel(STD, OMEGA, (1e-3, 2e-3), (1e-3, 2e-3), 3.0)
        b = q.fresnel_kernel(VERBATIM, OMEGA, (1e-3, 2e-3), (1e-3, 2e-3), 3.0)
        assert a == b

    def test_conventions_differ_off_axis(self):
        a = q.fresnel_kernel(STD, 10 * C, (0.0, 0.0), (0.5, 0.0), 1.0)
        b = q.fresnel_kernel(VERBATIM, 10 * C, (0.0, 0.0), (0.5, 0.0), 1.0)
        assert abs(a - b) > 0.1

    def test_accepts_string_convention(self):
        assert q.fresnel_kernel("standard_half", C, (0, 0), (0, 0), 1.0) == q.fresnel_kernel(STD, C, (0, 0), (0, 0), 1.0)

    @pytest.mark.parametrize("d", [0.0, -1.0])
    def test_rejects_nonpositive_distance(self, d):
        with pytest.raises(q.DomainError):
            q.fresnel_kernel(STD, C, (0, 0), (0, 0), d)

    def test_unknown_convention(self):
        with pytest.raises(ValueError):
            q.fresnel_kernel("half", C, (0, 0), (0, 0), 1.0)


class TestKernelAgainstAnalyticShift:
    """Direct quadrature with the kernel reproduces the beam a distance d further on."""

    @pytest.mark.parametrize("d_over_z0", [0.5, 1.0, 3.0])
    @pytest.mark.parametrize("r_out_w0", [0.0, 0.7, 1.5])
    def test_standard_kernel_translates_beam(self, geom, d_over_z0, r_out_w0):
        w0 = geom.waist_radius(OMEGA)
        d = d_over_z0 * geom.z0
        r_out = (r_out_w0 * w0, 0.0)
        got = brute_force_convolution(STD, geom, OMEGA, r_out, d, 6 * w0)
        expected = q.gaussian_beam_amplitude(geom, OMEGA, r_out, d)
        assert abs(got - expected) < 1e-8

    def test_verbatim_kernel_does_not(self, geom):
        w0 = geom.waist_radius(OMEGA)
        got = brute_force_convolution(VERBATIM, geom, OMEGA, (0.0, 0.0), geom.z0, 6 * w0)
        expected = q.gaussian_beam_amplitude(geom, OMEGA, (0.0, 0.0), geom.z0)
        assert abs(got - expected) > 0.1


class TestTransferFunction:
    def test_unimodular_for_standard(self):
        k = np.linspace(-1e5, 1e5, 11)
        h = fresnel_transfer_function(STD, OMEGA, k, k[::-1], 2.0)
        np.testing.assert_allclose(np.abs(h), 1.0, rtol=1e-15)

    def test_half_amplitude_for_verbatim(self):
        h = fresnel_transfer_function(VERBATIM, OMEGA, 0.0, 0.0, 2.0)
        assert abs(h) == pytest.approx(0.5)

    def test_composition(self):
        k = np.linspace(-3e4, 3e4, 7)
        a = fresnel_transfer_function(STD, OMEGA, k, 0.0, 0.4) * fresnel_transfer_function(STD, OMEGA, k, 0.0, 0.6)
        np.testing.assert_allclose(a, fresnel_transfer_function(STD, OMEGA, k, 0.0, 1.0), rtol=1e-9)


class TestSampleGaussian:
    def test_center_is_unity_and_axis_real(self, geom):
        g = q.sample_gaussian_to_grid(geom, OMEGA, 0.0, 64)
        c = g.n // 2
        assert g.values[c, c] == 1 + 0j
        row = g.values[c]
        assert np.all(row.imag == 0.0) and np.all(row.real > 0)

    def test_power_matches_analytic_integral(self, geom):
        kappa = OMEGA / C
        g = q.sample_gaussian_to_grid(geom, OMEGA, 0.0, 256, 30 * geom.waist_radius(OMEGA))
        # integral of exp(-kappa r^2 / z0) over the plane
        assert g.power() == pytest.approx(math.pi * geom.z0 / kappa, rel=1e-6)

    def test_power_is_z_independent(self, geom):
        kappa = OMEGA / C
        extent = default_extent(geom, OMEGA, 0.0, 2.0) * 2
        g = q.sample_gaussian_to_grid(geom, OMEGA, 2.0, 512, extent)
        assert g.power() == pytest.approx(math.pi * geom.z0 / kappa, rel=1e-6)

    def test_window_too_small(self, geom):
        with pytest.raises(q.WindowTooSmallError):
            q.sample_gaussian_to_grid(geom, OMEGA, 0.0, 64, 7 * geom.waist_radius(OMEGA))

    def test_default_extent_is_eight_radii(self, geom):
        g = q.sample_gaussian_to_grid(geom, OMEGA, 1.0, 64)
        assert g.extent == pytest.approx(8 * geom.beam_radius(OMEGA, 1.0))


class TestFieldGrid:
    @pytest.mark.parametrize("n", [8, 100])
    def test_rejects_bad_sizes(self, n):
        with pytest.raises(q.DomainError):
            q.FieldGrid(n, 1.0, 0.0, OMEGA, np.zeros((n, n)))

    def test_rejects_shape_mismatch(self):
        with pytest.raises(q.DomainError):
            q.FieldGrid(16, 1.0, 0.0, OMEGA, np.zeros((16, 8)))

    def test_values_are_read_only(self, geom):
        g = q.sample_gaussian_to_grid(geom, OMEGA, 0.0, 16)
        with pytest.raises(ValueError):
            g.values[0, 0] = 1.0

    def test_csv_round_trip(self, tmp_path, geom):
        g = q.sample_gaussian_to_grid(geom, OMEGA, 0.5, 32)
        csv_path, header_path = save_field(g, tmp_path / "field_z0.5.csv")
        assert header_path.name == "field_z0.5.json"
        assert csv_path.read_text().splitlines()[0] == "ix,iy,re,im"
        back = load_field(csv_path)
        assert back.header() == g.header()
        assert np.array_equal(back.values, g.values)


class TestPropagateGrid:
    @pytest.mark.parametrize("d_over_z0", [0.5, 1.0, 3.0])
    def test_matches_analytic_shift(self, geom, d_over_z0):
        d = d_over_z0 * geom.z0
        extent = default_extent(geom, OMEGA, 0.0, d)
        start = q.sample_gaussian_to_grid(geom, OMEGA, 0.0, 512, extent)
        out = q.propagate_grid(start, d)
        assert out.z == d and out.n == 512 and out.extent == extent and out.omega == OMEGA
        ref = q.sample_gaussian_to_grid(geom, OMEGA, d, 512, extent)
        assert relative_l2_error(out, ref) < 1e-3

    def test_fft_route_agrees_with_direct_quadrature(self, geom):
        d = geom.z0
        extent = default_extent(geom, OMEGA, 0.0, d)
        out = q.propagate_grid(q.sample_gaussian_to_grid(geom, OMEGA, 0.0, 256, extent), d)
        c = out.n // 2
        for ix in (c, c + 10, c + 25):
            r_out = (out.axis[ix], 0.0)
            direct = brute_force_convolution(STD, geom, OMEGA, r_out, d, 6 * geom.waist_radius(OMEGA))
            assert abs(out.values[ix, c] - direct) < 1e-6

    def test_semigroup(self, geom):
        extent = default_extent(geom, OMEGA, 0.0, 2.0)
        start = q.sample_gaussian_to_grid(geom, OMEGA, 0.0, 512, extent)
        one = q.propagate_grid(start, 2.0)
        two = q.propagate_grid(q.propagate_grid(start, 0.7), 1.3)
        assert relative_l2_error(two, one) < 1e-6

    def test_power_conserved(self, geom):
        extent = default_extent(geom, OMEGA, 0.0, 3.0)
        start = q.sample_gaussian_to_grid(geom, OMEGA, 0.0, 512, extent)
        assert start.border_power_fraction() < 1e-8
        out = q.propagate_grid(start, 3.0)
        assert out.power() / start.power() == pytest.approx(1.0, abs=1e-6)

    def test_verbatim_convention_misses_the_oracle(self, geom):
        extent = default_extent(geom, OMEGA, 0.0, 1.0)
        start = q.sample_gaussian_to_grid(geom, OMEGA, 0.0, 256, extent)
        out = q.propagate_grid(start, 1.0, VERBATIM)
        ref = q.sample_gaussian_to_grid(geom, OMEGA, 1.0, 256, extent)
        assert relative_l2_error(out, ref) > 0.1
        assert out.power() / start.power() == pytest.approx(0.25, rel=1e-9)

    def test_aliasing_error(self, geom):
        start = q.sample_gaussian_to_grid(geom, OMEGA, 0.0, 64)
        d = 1e-3
        assert nyquist_ratio(start, d) >= 1
        with pytest.raises(q.AliasingError):
            q.propagate_grid(start, d)

    def test_rejects_nonpositive_distance(self, geom):
        start = q.sample_gaussian_to_grid(geom, OMEGA, 0.0, 64)
        with pytest.raises(q.DomainError):
            q.propagate_grid(start, 0.0)

    def test_power_leak_warning(self, geom):
        w = geom.waist_radius(OMEGA)
        g = q.sample_gaussian_to_grid(geom, OMEGA, 0.0, 128, 8 * w)
        tight = q.FieldGrid(g.n, 3 * w, 0.0, OMEGA, g.values)
        with pytest.warns(q.PowerLeakWarning):
            q.propagate_grid(tight, 1.0)

    def test_no_warning_for_well_contained_beam(self, geom):
        start = q.sample_gaussian_to_grid(geom, OMEGA, 0.0, 128, default_extent(geom, OMEGA, 0.0, 1.0))
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            q.propagate_grid(start, 1.0)

    def test_input_untouched(self, geom):
        start = q.sample_gaussian_to_grid(geom, OMEGA, 0.0, 64, default_extent(geom, OMEGA, 0.0, 1.0))
        before = start.values.copy()
        q.propagate_grid(start, 1.0)
        assert np.array_equal(start.values, before)


class TestOnAxisPulse:
    def test_peak_at_transit_time(self, optical, geom):
        d = 1500.0
        peak = pulse_peak_time(optical, geom, d, d)
        assert peak == pytest.approx(1.0006922855944561e-05, rel=1e-12)
        assert abs(peak - 2 * d / C) < 1e-3 * q.temporal_width(optical)

    def test_one_width_off_peak(self, optical, geom):
        d = 1500.0
        tp = 2 * d / C
        dtau = q.temporal_width(optical)
        ratio = abs(q.on_axis_pulse_amplitude(optical, geom, d, d, tp + dtau)) ** 2 / abs(
            q.on_axis_pulse_amplitude(optical, geom, d, d, tp)
        ) ** 2
        assert ratio == pytest.approx(math.exp(-0.5), rel=1e-6)

    def test_matches_frequency_integral(self, unit_env):
        # integrate phi(omega) exp(-i omega (t - L/c)) exp(i atan(L/z0)) directly
        geom = q.BeamGeometry(3.0)
        z, d = 2.0 * C, 1.0 * C  # delay of 3 time units
        omega = np.linspace(1.0 - 1.2, 1.0 + 1.2, 20001)
        for t in (1.0, 3.0, 6.5):
            integrand = unit_env(omega) * np.exp(-1j * omega * (t - 3.0))
            direct = np.sum(integrand) * (omega[1] - omega[0]) * cmath.exp(1j * math.atan((z + d) / geom.z0))
            got = q.on_axis_pulse_amplitude(unit_env, geom, z, d, t)
            assert got == pytest.approx(direct, abs=1e-10)

    def test_gouy_phase_has_no_effect_on_intensity(self, optical):
        a = q.on_axis_pulse_amplitude(optical, q.BeamGeometry(0.1), 1500.0, 1500.0, 1.00069e-5)
        b = q.on_axis_pulse_amplitude(optical, q.BeamGeometry(1e4), 1500.0, 1500.0, 1.00069e-5)
        assert abs(a) == pytest.approx(abs(b), rel=1e-14)

    def test_rejects_nonpositive_path(self, optical, geom):
        with pytest.raises(q.DomainError):
            q.on_axis_pulse_amplitude(optical, geom, -1.0, 0.5, 0.0)
