"""Monochromatic Gaussian-beam amplitudes.

The beam is parameterized by a frequency-independent Rayleigh length ``z0``;
the waist radius at angular frequency ``omega`` follows as
``sqrt(2 z0 c / omega)``. Amplitudes are normalized so that
``|G(r_t=0, z=0)| = 1``; physical normalization lives in the arrival-time
densities.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .constants import SPEED_OF_LIGHT
from .errors import DomainError


@dataclass(frozen=True)
class BeamGeometry:
    """Gaussian beam along +z with Rayleigh length ``z0`` (m)."""

    z0: float

    def __post_init__(self):
        if not (self.z0 > 0 and math.isfinite(self.z0)):
            raise DomainError(f"Rayleigh length z0 must be positive, got {self.z0!r}")

    def width_factor(self, z):
        """``W(z) = sqrt(1 + z**2 / z0**2)``; the beam radius relative to the waist."""
        return np.sqrt(1.0 + (np.asarray(z, dtype=float) / self.z0) ** 2)

    def curvature_factor(self, z):
        """``R(z) = 1 + z0**2 / z**2`` (dimensionless; infinite at the waist)."""
        z = np.asarray(z, dtype=float)
        with np.errstate(divide="ignore"):
            return 1.0 + self.z0**2 / z**2

    def gouy_phase(self, z):
        return np.arctan(np.asarray(z, dtype=float) / self.z0)

    def waist_radius(self, omega: float) -> float:
        """1/e field radius at the waist for angular frequency ``omega``."""
        return math.sqrt(2.0 * self.z0 * SPEED_OF_LIGHT / omega)

    def beam_radius(self, omega: float, z) -> np.ndarray:
        return self.waist_radius(omega) * self.width_factor(z)


def _amplitude(geom: BeamGeometry, omega: float, r2, z):
    # r2: summed squared transverse radius; z: summed longitudinal coordinate
    kappa = omega / SPEED_OF_LIGHT
    z = np.asarray(z, dtype=float)
    w2 = 1.0 + (z / geom.z0) ** 2
    # kappa r2 / (2 z R(z)) rewritten so that z = 0 gives exactly zero
    curvature = kappa * r2 * z / (2.0 * (z**2 + geom.z0**2))
    phase = kappa * z + curvature - np.arctan(z / geom.z0)
    out = np.exp(-kappa * r2 / (2.0 * geom.z0 * w2)) / np.sqrt(w2) * np.exp(-1j * phase)
    return out[()] if np.ndim(out) == 0 else out


def gaussian_beam_amplitude(geom: BeamGeometry, omega: float, r_t, z):
    """Evaluate ``G_omega(r_t, z)``.

    Parameters
    ----------
    geom : BeamGeometry
    omega : float
        Angular frequency (rad/s).
    r_t : pair of float or array_like
        Transverse position ``(x, y)`` in metres; array components broadcast.
    z : float or array_like
        Longitudinal position (m), measured from the waist.
    """
    if not omega > 0:
        raise DomainError(f"omega must be positive, got {omega!r}")
    x, y = r_t
    r2 = np.asarray(x, dtype=float) ** 2 + np.asarray(y, dtype=float) ** 2
    return _amplitude(geom, omega, r2, z)


def n_photon_beam_amplitude(geom: BeamGeometry, omega: float, points: Sequence[Sequence[float]]):
    """Joint amplitude of ``N`` photons sharing frequency ``omega``.

    ``points`` holds one ``(x, y, z)`` triple per photon. The single-photon
    form is evaluated with ``z`` replaced by the sum of the photons'
    longitudinal coordinates and ``r_t**2`` by the sum of their squared
    transverse radii; every factor (width, curvature, Gouy phase) uses the
    summed coordinate.
    """
    if not omega > 0:
        raise DomainError(f"omega must be positive, got {omega!r}")
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] == 0 or pts.shape[1] != 3:
        raise DomainError("points must be a non-empty sequence of (x, y, z) triples")
    r2 = float(np.sum(pts[:, 0] ** 2 + pts[:, 1] ** 2))
    return complex(_amplitude(geom, omega, r2, float(np.sum(pts[:, 2]))))
