"""Monte Carlo time-of-flight ranging with N-photon probes."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .beam import BeamGeometry
from .constants import SPEED_OF_LIGHT
from .errors import DomainError, InsufficientDetectionsError, QRadarError
from .spectral import SpectralEnvelope, temporal_width
from .states import (
    PhotonSource,
    SourceMode,
    mean_time_sigma,
    single_arrival_density,
    sum_arrival_density,
)

#: trials sharing one RNG substream; part of the reproducibility contract
BLOCK_TRIALS = 4096

SCALING_COLUMNS = (
    "N",
    "mode",
    "trials",
    "empirical_sigma_s",
    "predicted_sigma_s",
    "ratio",
    "d_hat_m",
    "std_error_m",
    "detection_fraction",
)


class DegenerateSampleError(QRadarError):
    """All detected statistics coincide, so no error bar can be formed."""

    def __init__(self, d_hat):
        super().__init__(f"zero sample variance (d_hat={d_hat!r} m); std_error undefined")
        self.d_hat = d_hat


@dataclass(frozen=True)
class Scenario:
    """Target at ``distance_d`` metres with reflectivity ``reflectivity_eta``.

    ``pointing`` is (azimuth, elevation) in radians, carried only for scan
    bookkeeping.
    """

    distance_d: float
    reflectivity_eta: float = 1.0
    pointing: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if not (self.distance_d > 0 and math.isfinite(self.distance_d)):
            raise DomainError(f"distance_d must be positive, got {self.distance_d!r}")
        if not 0.0 <= self.reflectivity_eta <= 1.0:
            raise DomainError(f"reflectivity_eta must lie in [0, 1], got {self.reflectivity_eta!r}")

    @property
    def round_trip(self) -> float:
        return 2.0 * self.distance_d


@dataclass(frozen=True, eq=False)
class ArrivalBatch:
    """Per-trial outcomes of one Monte Carlo run.

    ``statistic[i]`` is the mean arrival time (s) of trial ``i``'s detected
    photons, NaN when nothing was detected.
    """

    source: PhotonSource
    scenario: Scenario
    seed: int
    trial_id: np.ndarray = field(repr=False)
    detected: np.ndarray = field(repr=False)
    statistic: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.trial_id)

    @property
    def n_detected(self) -> int:
        return int(np.count_nonzero(self.detected))

    @property
    def detection_fraction(self) -> float:
        return self.n_detected / len(self)

    def detected_statistics(self) -> np.ndarray:
        return self.statistic[self.detected]

    def records(self) -> Iterator[dict]:
        for i, det, s in zip(self.trial_id.tolist(), self.detected.tolist(), self.statistic.tolist()):
            yield {"trial_id": i, "detected": det, "statistic": s if det else None}


@dataclass(frozen=True)
class RangeEstimate:
    d_hat: float
    std_error: float
    n_effective: int
    estimator: str = "mean_time"


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(block,)))


def _sample_block(source: PhotonSource, density, eta: float, rng: np.random.Generator, m: int):
    n = source.n_photons
    if source.mode is SourceMode.ENTANGLED:
        alive = rng.random((m, n)) < eta
        sums = density.sample(rng, m)
        detected = alive.all(axis=1)
        return detected, np.where(detected, sums / n, np.nan)
    if source.mode is SourceMode.INDEPENDENT:
        emitted = np.full(m, n)
    else:
        emitted = rng.poisson(n, m)
    width = max(int(emitted.max()), 1)
    alive = (rng.random((m, width)) < eta) & (np.arange(width) < emitted[:, None])
    times = density.sample(rng, (m, width))
    k = alive.sum(axis=1)
    detected = k > 0
    with np.errstate(invalid="ignore", divide="ignore"):
        stat = np.where(alive, times, 0.0).sum(axis=1) / k
    return detected, np.where(detected, stat, np.nan)


def sample_batch(source: PhotonSource, scenario: Scenario, n_trials: int, seed: int) -> ArrivalBatch:
    """Simulate ``n_trials`` independent probes of ``scenario``.

    Each photon survives the round trip with probability ``reflectivity_eta``.
    Entangled trials count as detected only if all ``N`` photons survive;
    their statistic is the sampled sum time divided by ``N``. Other sources
    average the arrival times of their surviving photons.

    Trial ``i`` draws from the substream keyed by ``(seed, i // BLOCK_TRIALS)``
    at a fixed position, so its outcome depends on neither ``n_trials`` nor
    the order in which blocks are evaluated.
    """
    if int(n_trials) != n_trials or n_trials < 1:
        raise DomainError(f"n_trials must be a positive integer, got {n_trials!r}")
    n_trials = int(n_trials)
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed}")
    if source.mode is SourceMode.ENTANGLED:
        density = sum_arrival_density(source, scenario.round_trip)
    else:
        density = single_arrival_density(
            PhotonSource(1, SourceMode.INDEPENDENT, source.envelope, source.geometry), scenario.round_trip
        )
    detected = np.empty(n_trials, dtype=bool)
    statistic = np.empty(n_trials)
    for block, start in enumerate(range(0, n_trials, BLOCK_TRIALS)):
        stop = min(start + BLOCK_TRIALS, n_trials)
        # always draw a full block so trial i never depends on n_trials
        det, stat = _sample_block(source, density, scenario.reflectivity_eta, _block_rng(seed, block), BLOCK_TRIALS)
        detected[start:stop] = det[:stop - start]
        statistic[start:stop] = stat[:stop - start]
    for arr in (detected, statistic):
        arr.setflags(write=False)
    return ArrivalBatch(source, scenario, seed, np.arange(n_trials), detected, statistic)


def estimate_range(batch: ArrivalBatch) -> RangeEstimate:
    """Invert the grand-mean arrival time to a distance, ``d_hat = c <t> / 2``."""
    stats = batch.detected_statistics()
    n = len(stats)
    if n < 2:
        raise InsufficientDetectionsError(f"need at least 2 detected trials, got {n}")
    mean = float(np.mean(stats))
    d_hat = SPEED_OF_LIGHT * mean / 2.0
    spread = float(np.std(stats, ddof=1))
    if spread == 0.0:
        raise DegenerateSampleError(d_hat)
    return RangeEstimate(d_hat, SPEED_OF_LIGHT * spread / (2.0 * math.sqrt(n)), n)


def cell_seed(seed: int, mode: SourceMode, n_photons: int) -> int:
    """Independent 64-bit seed for one (mode, N) cell of a scaling table."""
    index = list(SourceMode).index(SourceMode(mode))
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(index, int(n_photons)))
    return int(ss.generate_state(1, np.uint64)[0])


def scaling_row(source: PhotonSource, scenario: Scenario, n_trials: int, seed: int) -> dict:
    batch = sample_batch(source, scenario, n_trials, seed)
    stats = batch.detected_statistics()
    eta = scenario.reflectivity_eta
    predicted = mean_time_sigma(source, scenario.round_trip, eta=eta) if eta > 0 else math.nan
    empirical = float(np.std(stats, ddof=1)) if len(stats) >= 2 else math.nan
    try:
        est = estimate_range(batch)
        d_hat, std_error = est.d_hat, est.std_error
    except InsufficientDetectionsError:
        d_hat = std_error = math.nan
    except DegenerateSampleError as exc:
        d_hat, std_error = exc.d_hat, math.nan
    return {
        "N": source.n_photons,
        "mode": source.mode.value,
        "trials": n_trials,
        "empirical_sigma_s": empirical,
        "predicted_sigma_s": predicted,
        "ratio": empirical / predicted,
        "d_hat_m": d_hat,
        "std_error_m": std_error,
        "detection_fraction": batch.detection_fraction,
    }


def scaling_experiment(
    Ns: Iterable[int],
    n_trials: int,
    scenario: Scenario,
    envelope: SpectralEnvelope,
    seed: int,
    geometry: BeamGeometry | None = None,
    modes: Iterable[SourceMode] = (SourceMode.ENTANGLED, SourceMode.INDEPENDENT),
) -> list[dict]:
    """Empirical vs predicted mean-time spread for each ``N`` and source mode.

    Returns one row per (N, mode) with the keys of ``SCALING_COLUMNS``.
    """
    geometry = geometry or BeamGeometry(1.0)
    Ns = [int(n) for n in Ns]
    if not Ns or any(n < 1 for n in Ns):
        raise DomainError(f"every N must be >= 1, got {Ns}")
    temporal_width(envelope)  # fail early on a non-convergent tabulated pulse
    rows = []
    for n in Ns:
        for mode in modes:
            mode = SourceMode(mode)
            source = PhotonSource(n, mode, envelope, geometry)
            rows.append(scaling_row(source, scenario, n_trials, cell_seed(seed, mode, n)))
    return rows


def enhancement_ratios(rows: list[dict]) -> dict[int, float]:
    """Entangled over independent empirical sigma, keyed by N."""
    by = {(r["N"], r["mode"]): r["empirical_sigma_s"] for r in rows}
    return {
        n: by[(n, SourceMode.ENTANGLED.value)] / by[(n, SourceMode.INDEPENDENT.value)]
        for n, mode in by
        if mode == SourceMode.ENTANGLED.value and (n, SourceMode.INDEPENDENT.value) in by
    }
