"""Arrival-time statistics of single, independent and frequency-entangled photons.

Detection probabilities are the squared moduli of the on-axis pulse
amplitudes, normalized over the timing coordinate. A single photon's arrival
time follows ``|pulse(t - 2d/c)|**2``. For ``N`` frequency-entangled photons
only the sum ``t_1 + ... + t_N`` is constrained, and it follows
``|pulse(s - N 2d/c)|**2``: its width does not grow with ``N``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import stats
from scipy.interpolate import PchipInterpolator

from .beam import BeamGeometry
from .constants import SPEED_OF_LIGHT
from .errors import DomainError
from .spectral import SpectralEnvelope, pulse_center, temporal_amplitude, temporal_width

#: knots of the interpolated table used for non-gaussian pulse shapes
TABLE_KNOTS = 2**16
#: half-span of that table in pulse widths
TABLE_HALF_SPAN = 12.0


class SourceMode(str, enum.Enum):
    ENTANGLED = "entangled"
    INDEPENDENT = "independent"
    COHERENT_EQUIVALENT = "coherent_equivalent"


class Coordinate(str, enum.Enum):
    SINGLE_TIME = "single_time"
    SUM_TIME = "sum_time"


@dataclass(frozen=True)
class PhotonSource:
    """Probe of ``n_photons`` photons sharing one spectral envelope and beam.

    For ``coherent_equivalent`` sources ``n_photons`` is the Poisson mean of
    the emitted photon number.
    """

    n_photons: int
    mode: SourceMode
    envelope: SpectralEnvelope
    geometry: BeamGeometry

    def __post_init__(self):
        if isinstance(self.n_photons, bool) or int(self.n_photons) != self.n_photons:
            raise DomainError(f"n_photons must be an integer, got {self.n_photons!r}")
        if self.n_photons < 1:
            raise DomainError(f"n_photons must be >= 1, got {self.n_photons}")
        object.__setattr__(self, "n_photons", int(self.n_photons))
        object.__setattr__(self, "mode", SourceMode(self.mode))


@dataclass(frozen=True, eq=False)
class ArrivalDensity:
    """Normalized probability density of a detection-time coordinate (s).

    Gaussian envelopes give an exactly normal density; other envelopes use a
    monotone cubic interpolant of ``|pulse|**2`` on ``TABLE_KNOTS`` knots,
    normalized by its exact integral.
    """

    coordinate: Coordinate
    center: float
    width: float
    envelope: SpectralEnvelope = field(repr=False)
    delay: float = field(repr=False, default=0.0)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.envelope.is_gaussian:
            return stats.norm.pdf(x, loc=self.center, scale=self.width)
        profile = _profile(self.envelope)
        u = x - self.delay
        inside = (u >= profile.lo) & (u <= profile.hi)
        return np.where(inside, profile.pdf(np.clip(u, profile.lo, profile.hi)), 0.0)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.envelope.is_gaussian:
            return stats.norm.cdf(x, loc=self.center, scale=self.width)
        profile = _profile(self.envelope)
        u = np.clip(x - self.delay, profile.lo, profile.hi)
        return profile.cdf(u)

    def support(self) -> tuple[float, float]:
        """Interval carrying all but a negligible share of the probability."""
        if self.envelope.is_gaussian:
            return self.center - 40 * self.width, self.center + 40 * self.width
        profile = _profile(self.envelope)
        return self.delay + profile.lo, self.delay + profile.hi

    def sample(self, rng: np.random.Generator, size):
        """Draw arrival coordinates: exact normal draws or inverse-CDF sampling."""
        if self.envelope.is_gaussian:
            return rng.normal(self.center, self.width, size)
        return self.delay + _profile(self.envelope).ppf(rng.random(size))


class _Profile:
    """Tabulated ``|pulse(u)|**2`` with exact-integral normalization."""

    def __init__(self, env: SpectralEnvelope):
        mid = pulse_center(env)
        width = temporal_width(env)
        u = mid + np.linspace(-TABLE_HALF_SPAN, TABLE_HALF_SPAN, TABLE_KNOTS) * width
        intensity = np.abs(temporal_amplitude(env, u)) ** 2
        raw = PchipInterpolator(u, intensity, extrapolate=False)
        total = float(raw.integrate(u[0], u[-1]))
        self.lo, self.hi = float(u[0]), float(u[-1])
        self.pdf = PchipInterpolator(u, intensity / total, extrapolate=False)
        self._anti = self.pdf.antiderivative()
        cdf = self._anti(u)
        cdf = cdf / cdf[-1]
        keep = np.concatenate(([True], np.diff(cdf) > 0))
        self._ppf = PchipInterpolator(cdf[keep], u[keep])

    def cdf(self, u):
        return np.clip(self._anti(u), 0.0, 1.0)

    def ppf(self, q):
        return self._ppf(q)


@lru_cache(maxsize=16)
def _profile(env: SpectralEnvelope) -> _Profile:
    return _Profile(env)


def _check_round_trip(round_trip: float):
    if not round_trip > 0:
        raise DomainError(f"round_trip must be positive, got {round_trip!r}")


def single_arrival_density(source: PhotonSource, round_trip: float) -> ArrivalDensity:
    """Arrival-time density of one photon after a path of ``round_trip`` metres."""
    _check_round_trip(round_trip)
    if source.mode is SourceMode.ENTANGLED and source.n_photons > 1:
        raise DomainError("entangled photons have no normalizable single-photon arrival density")
    env = source.envelope
    delay = round_trip / SPEED_OF_LIGHT
    return ArrivalDensity(Coordinate.SINGLE_TIME, delay + pulse_center(env), temporal_width(env), env, delay)


def sum_arrival_density(source: PhotonSource, round_trip: float) -> ArrivalDensity:
    """Density of the summed arrival time of ``N`` frequency-entangled photons.

    Centred on ``N round_trip / c`` with the single-photon width, for every ``N``.
    """
    _check_round_trip(round_trip)
    if source.mode is not SourceMode.ENTANGLED:
        raise DomainError(f"sum-time density requires an entangled source, got {source.mode.value}")
    if source.n_photons == 1:
        return single_arrival_density(source, round_trip)
    env = source.envelope
    delay = source.n_photons * round_trip / SPEED_OF_LIGHT
    return ArrivalDensity(Coordinate.SUM_TIME, delay + pulse_center(env), temporal_width(env), env, delay)


def spread_sum_times(sum_times, n_photons: int, difference_width: float, rng: np.random.Generator):
    """Split sampled sum times into individual photon times, for plotting only.

    The spread around ``s / N`` is drawn with the given width and recentred so
    each row still sums to ``s``; any estimator of the sum is unaffected.
    """
    s = np.asarray(sum_times, dtype=float)
    offsets = rng.normal(0.0, difference_width, s.shape + (n_photons,))
    offsets -= offsets.mean(axis=-1, keepdims=True)
    return s[..., None] / n_photons + offsets


def mean_time_sigma(source: PhotonSource, round_trip: float | None = None, eta: float = 1.0) -> float:
    """Standard deviation (s) of the per-probe mean arrival time.

    Entangled sources give ``dtau / N`` (only trials in which all photons
    survive are kept). Independent and coherent-equivalent sources give
    ``sqrt(E[dtau**2 / k | k >= 1])`` over the number ``k`` of detected
    photons: binomial(N, eta) or Poisson(N eta) respectively. With ``eta=1``
    the independent case reduces to ``dtau / sqrt(N)``.

    ``round_trip`` does not enter the result; it is accepted so the call
    mirrors the density constructors.
    """
    if round_trip is not None:
        _check_round_trip(round_trip)
    if not 0.0 < eta <= 1.0:
        raise DomainError(f"eta must lie in (0, 1], got {eta!r}")
    dtau = temporal_width(source.envelope)
    n = source.n_photons
    if source.mode is SourceMode.ENTANGLED:
        return dtau / n
    if source.mode is SourceMode.INDEPENDENT:
        if eta == 1.0:
            return dtau / math.sqrt(n)
        k = np.arange(1, n + 1)
        pmf = stats.binom.pmf(k, n, eta)
    else:
        mu = n * eta
        # the tail beyond mu + 40 sqrt(mu) + 40 is far below double precision
        upper = int(mu + 40 * math.sqrt(mu) + 40)
        k = np.arange(1, upper + 1)
        pmf = stats.poisson.pmf(k, mu)
    return dtau * math.sqrt(float(np.sum(pmf / k) / np.sum(pmf)))
