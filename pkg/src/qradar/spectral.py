"""Spectral amplitude of a photon wavepacket and its time-domain pulse.

Fourier convention throughout the package::

    pulse(t) = integral d omega  exp(-i omega t) phi(omega)

so a Gaussian spectrum of standard deviation ``sigma_omega`` gives a pulse
whose intensity ``|pulse(t)|**2`` has standard deviation ``1 / (2 sigma_omega)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.integrate import trapezoid

from .errors import DomainError, WidthOverflowError

GAUSSIAN = "gaussian"
TABULATED = "tabulated"

# omega0 >= MIN_CARRIER_RATIO * sigma_omega keeps the negative-frequency tail
# of the gaussian model below 1e-6 of the total power.
MIN_CARRIER_RATIO = 5.0

# Fraction of the periodic time window treated as "edge" by the convergence
# check on tabulated pulses, and the largest tolerated share of the second
# moment found there.
_EDGE_FRACTION = 0.1
_EDGE_MOMENT_TOL = 1e-6

_OVERSAMPLE = 4
_CHUNK = 2048


@dataclass(frozen=True, eq=False)
class SpectralEnvelope:
    """Normalized spectral amplitude ``phi(omega)``.

    For ``kind="gaussian"`` the envelope is fully determined by ``omega0`` and
    ``sigma_omega``. For ``kind="tabulated"`` the samples in ``omega`` and
    ``amplitude`` define it (linear interpolation, zero outside the table) and
    ``omega0``/``sigma_omega`` are the mean and standard deviation of
    ``|phi|**2``.
    """

    kind: str
    omega0: float
    sigma_omega: float
    omega: np.ndarray | None = field(default=None, repr=False)
    amplitude: np.ndarray | None = field(default=None, repr=False)

    @property
    def is_gaussian(self) -> bool:
        return self.kind == GAUSSIAN

    @property
    def table(self):
        """Sampled ``(omega, amplitude)`` pairs, or None for gaussian envelopes."""
        if self.omega is None:
            return None
        return self.omega, self.amplitude

    def __call__(self, omega):
        """Evaluate ``phi(omega)``."""
        omega = np.asarray(omega, dtype=float)
        if self.is_gaussian:
            norm = (2.0 * math.pi * self.sigma_omega**2) ** -0.25
            return norm * np.exp(-((omega - self.omega0) ** 2) / (4.0 * self.sigma_omega**2)) + 0j
        re = np.interp(omega, self.omega, self.amplitude.real, left=0.0, right=0.0)
        im = np.interp(omega, self.omega, self.amplitude.imag, left=0.0, right=0.0)
        return re + 1j * im

    def norm(self) -> float:
        """``integral |phi|**2 d omega`` (analytic for gaussian, trapezoid otherwise)."""
        if self.is_gaussian:
            return 1.0
        return float(trapezoid(np.abs(self.amplitude) ** 2, self.omega))

    @cached_property
    def pulse_window(self):
        """Time samples and ``|pulse|**2`` over one period of the tabulated transform.

        The trapezoid transform of a table with spacing ``d omega`` is periodic
        in ``t`` with period ``2 pi / d omega``; the window covers one period
        centred on ``t = 0``.
        """
        if self.is_gaussian:
            raise TypeError("pulse_window is only defined for tabulated envelopes")
        step = float(np.max(np.diff(self.omega)))
        half = math.pi / step
        m = _OVERSAMPLE * len(self.omega)
        t = -half + (2.0 * half / m) * np.arange(m)
        intensity = np.abs(_quadrature_transform(self.omega, self.amplitude, t)) ** 2
        return t, intensity


def make_gaussian_spectrum(omega0: float, sigma_omega: float) -> SpectralEnvelope:
    """Normalized gaussian spectral amplitude centred on ``omega0`` (rad/s).

    ``phi(omega) = (2 pi sigma**2)**(-1/4) exp(-(omega - omega0)**2 / (4 sigma**2))``
    """
    if not (omega0 > 0 and math.isfinite(omega0)):
        raise DomainError(f"omega0 must be positive and finite, got {omega0!r}")
    if not (sigma_omega > 0 and math.isfinite(sigma_omega)):
        raise DomainError(f"sigma_omega must be positive and finite, got {sigma_omega!r}")
    if omega0 < MIN_CARRIER_RATIO * sigma_omega:
        raise DomainError(
            f"omega0={omega0!r} < {MIN_CARRIER_RATIO:g} * sigma_omega={sigma_omega!r}: "
            "gaussian spectrum leaks into negative frequencies"
        )
    return SpectralEnvelope(GAUSSIAN, float(omega0), float(sigma_omega))


def make_tabulated_spectrum(omega, amplitude) -> SpectralEnvelope:
    """Build an envelope from samples, rescaled so that ``integral |phi|**2 = 1``."""
    omega = np.array(omega, dtype=float)
    amplitude = np.array(amplitude, dtype=complex)
    if omega.ndim != 1 or omega.shape != amplitude.shape:
        raise DomainError("omega and amplitude must be 1-D arrays of equal length")
    if len(omega) < 8:
        raise DomainError("a tabulated envelope needs at least 8 samples")
    if not np.all(np.isfinite(omega)) or not np.all(np.isfinite(amplitude)):
        raise DomainError("tabulated envelope contains non-finite values")
    if np.any(np.diff(omega) <= 0):
        raise DomainError("omega samples must be strictly increasing")
    if omega[0] <= 0:
        raise DomainError("tabulated envelope must only contain positive frequencies")
    power = np.abs(amplitude) ** 2
    total = trapezoid(power, omega)
    if not total > 0:
        raise DomainError("tabulated envelope has zero power")
    amplitude = amplitude / math.sqrt(total)
    power = power / total
    omega0 = float(trapezoid(omega * power, omega))
    sigma = math.sqrt(float(trapezoid((omega - omega0) ** 2 * power, omega)))
    omega.setflags(write=False)
    amplitude.setflags(write=False)
    return SpectralEnvelope(TABULATED, omega0, sigma, omega, amplitude)


def load_envelope_csv(path) -> SpectralEnvelope:
    """Read a tabulated envelope from CSV.

    Columns are ``omega_rad_per_s, amplitude_re`` and optionally
    ``amplitude_im``. A single header line is skipped if present.
    """
    path = Path(path)
    with path.open() as fh:
        first = fh.readline()
    skip = 1 if any(ch.isalpha() and ch not in "eE" for ch in first) else 0
    data = np.loadtxt(path, delimiter=",", skiprows=skip, ndmin=2)
    if data.shape[1] not in (2, 3):
        raise DomainError(f"{path}: expected 2 or 3 columns, found {data.shape[1]}")
    amplitude = data[:, 1] + (1j * data[:, 2] if data.shape[1] == 3 else 0.0)
    return make_tabulated_spectrum(data[:, 0], amplitude)


def temporal_amplitude(env: SpectralEnvelope, t):
    """Time-domain pulse ``integral d omega exp(-i omega t) phi(omega)``.

    Closed form for gaussian envelopes, trapezoid quadrature over the table
    otherwise. Accepts scalars or arrays of times (s).
    """
    t_arr = np.asarray(t, dtype=float)
    if env.is_gaussian:
        s = env.sigma_omega
        peak = (2.0 * math.pi * s**2) ** -0.25 * 2.0 * s * math.sqrt(math.pi)
        out = peak * np.exp(-(s * t_arr) ** 2) * np.exp(-1j * env.omega0 * t_arr)
    else:
        out = _quadrature_transform(env.omega, env.amplitude, t_arr.ravel()).reshape(t_arr.shape)
    return out[()] if out.ndim == 0 else out


def temporal_width(env: SpectralEnvelope) -> float:
    """Standard deviation (s) of the pulse intensity ``|pulse(t)|**2``.

    Exactly ``1 / (2 sigma_omega)`` for gaussian envelopes.

    Raises
    ------
    WidthOverflowError
        If the second moment of a tabulated pulse is not contained in the
        periodic window implied by the table spacing.
    """
    if env.is_gaussian:
        return 0.5 / env.sigma_omega
    t, intensity = env.pulse_window
    return _window_moments(t, intensity)[1]


def pulse_center(env: SpectralEnvelope) -> float:
    """Mean of ``|pulse(t)|**2`` (zero for gaussian envelopes)."""
    if env.is_gaussian:
        return 0.0
    t, intensity = env.pulse_window
    return _window_moments(t, intensity)[0]


def _window_moments(t, intensity):
    total = intensity.sum()
    mean = float((t * intensity).sum() / total)
    second = (t - mean) ** 2 * intensity
    edge = np.abs(t) > (1.0 - _EDGE_FRACTION) * np.abs(t).max()
    if second.sum() <= 0 or second[edge].sum() > _EDGE_MOMENT_TOL * second.sum():
        raise WidthOverflowError(
            "pulse second moment does not converge on the sampled window; "
            "refine the omega spacing of the table"
        )
    return mean, math.sqrt(float(second.sum() / total))


def _quadrature_transform(omega, amplitude, t):
    # trapezoid weights on a possibly non-uniform grid
    w = np.empty_like(omega)
    d = np.diff(omega)
    w[0] = d[0] / 2
    w[-1] = d[-1] / 2
    w[1:-1] = (d[:-1] + d[1:]) / 2
    weighted = w * amplitude
    # factor out the carrier so the exponent stays small for large t
    ref = omega[len(omega) // 2]
    shifted = omega - ref
    out = np.empty(len(t), dtype=complex)
    for start in range(0, len(t), _CHUNK):
        tc = t[start:start + _CHUNK]
        out[start:start + _CHUNK] = np.exp(-1j * np.outer(tc, shifted)) @ weighted
    return out * np.exp(-1j * ref * t)
