"""MUSIC direction finding on a ULA, peak picking and threshold calibration."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .channel import SnapshotMatrix, steering_vectors
from .geometry import SPEED_OF_LIGHT, UlaConfig

AZIMUTH_GRID = np.arange(-180, 180) * 0.5
DEFAULT_TOLERANCE = 2.5
DEFAULT_THRESHOLD = 2.0


@dataclass(frozen=True)
class CorrelationMatrix:
    R: np.ndarray
    snapshots: int

    @property
    def n_elements(self) -> int:
        return self.R.shape[0]


@dataclass(frozen=True)
class PseudoSpectrum:
    """Median-normalised log10 MUSIC statistic on the azimuth grid."""

    azimuth: np.ndarray
    values: np.ndarray
    sources: int

    def to_csv(self, path) -> None:
        np.savetxt(Path(path), np.column_stack([self.azimuth, self.values]), delimiter=",",
                   header="azimuth_deg,statistic", comments="", fmt="%.10g")


@dataclass(frozen=True)
class PeakSet:
    azimuth: np.ndarray = field(default_factory=lambda: np.zeros(0))
    magnitude: np.ndarray = field(default_factory=lambda: np.zeros(0))
    threshold: float = -np.inf

    def __len__(self):
        return len(self.azimuth)

    def strongest(self, k: int | None) -> "PeakSet":
        if k is None:
            return self
        return PeakSet(self.azimuth[:k], self.magnitude[:k], self.threshold)


def sample_correlation(s) -> CorrelationMatrix:
    """``R = X X^H / K`` over the snapshot columns."""
    x = np.asarray(getattr(s, "samples", s))
    n, k = x.shape
    if k == 0:
        raise ValueError("need at least one snapshot")
    if k < n:
        warnings.warn(f"only {k} snapshots for {n} elements; R is rank deficient", stacklevel=2)
    R = x @ x.conj().T / k
    return CorrelationMatrix(0.5 * (R + R.conj().T), k)


def _spacing(ula: UlaConfig, carrier_frequency: float) -> float:
    return ula.spacing_wavelengths(SPEED_OF_LIGHT / carrier_frequency)


def music_statistic(R: np.ndarray, sources: int, steering: np.ndarray) -> np.ndarray:
    """Batched core: ``R`` is ``(..., N, N)``, ``steering`` is ``(N, G)``.

    Returns ``log10(P / median P)`` with shape ``(..., G)``.
    """
    n = R.shape[-1]
    if not 1 <= sources < n:
        raise ValueError(f"assumed source count must satisfy 1 <= M < N={n}")
    try:
        _, vecs = np.linalg.eigh(R)
    except np.linalg.LinAlgError as exc:
        raise FloatingPointError("eigendecomposition failed") from exc
    noise = vecs[..., : n - sources]
    proj = np.abs(np.conj(np.swapaxes(noise, -1, -2)) @ steering) ** 2
    denom = proj.sum(axis=-2)
    denom = np.maximum(denom, np.finfo(float).tiny)
    logp = -np.log10(denom)
    return logp - np.median(logp, axis=-1, keepdims=True)


def music_spectrum(R: CorrelationMatrix | np.ndarray, sources: int, ula: UlaConfig,
                   carrier_frequency: float = 26e9, grid: np.ndarray = AZIMUTH_GRID) -> PseudoSpectrum:
    mat = np.asarray(getattr(R, "R", R))
    a = steering_vectors(grid, mat.shape[0], _spacing(ula, carrier_frequency))
    return PseudoSpectrum(np.asarray(grid, dtype=float), music_statistic(mat, sources, a), sources)


def _local_maxima(values: np.ndarray) -> np.ndarray:
    """Strict local maxima along the last axis; an edge counts if above its only neighbour."""
    v = np.asarray(values)
    left = np.full(v.shape, -np.inf)
    right = np.full(v.shape, -np.inf)
    left[..., 1:] = v[..., :-1]
    right[..., :-1] = v[..., 1:]
    return (v > left) & (v > right)


def _peakset(azimuth, values, mask, threshold, max_peaks) -> PeakSet:
    idx = np.flatnonzero(mask & (values >= threshold))
    order = idx[np.argsort(-values[idx], kind="stable")]
    if max_peaks is not None:
        order = order[:max_peaks]
    return PeakSet(azimuth[order], values[order], threshold)


def find_peaks(ps: PseudoSpectrum, threshold: float = -np.inf, max_peaks: int | None = None) -> PeakSet:
    """Local maxima at or above ``threshold``, strongest first."""
    if np.isnan(threshold):
        raise ValueError("threshold must not be NaN")
    return _peakset(ps.azimuth, ps.values, _local_maxima(ps.values), threshold, max_peaks)


def detect(peaks: PeakSet, truth_azimuth: float, tolerance: float = DEFAULT_TOLERANCE) -> bool:
    return bool(np.any(np.abs(peaks.azimuth - truth_azimuth) <= tolerance + 1e-9))


def strongest_peak_statistics(values: np.ndarray) -> np.ndarray:
    """Largest local-maximum value per spectrum row (``-inf`` if none)."""
    v = np.atleast_2d(values)
    return np.where(_local_maxima(v), v, -np.inf).max(axis=-1)


def noise_only_statistics(trials: int, seed, *, sources: int = 2, ula: UlaConfig = UlaConfig(),
                          snapshots: int = 548, carrier_frequency: float = 26e9,
                          grid: np.ndarray = AZIMUTH_GRID, chunk: int = 500) -> np.ndarray:
    """Strongest-peak statistic for ``trials`` white-noise snapshot matrices.

    Trial ``t`` uses its own seed stream, so the result does not depend on
    ``chunk``.
    """
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    a = steering_vectors(grid, ula.elements, _spacing(ula, carrier_frequency))
    out = np.empty(trials)
    n = ula.elements
    for start in range(0, trials, chunk):
        stop = min(trials, start + chunk)
        xs = np.empty((stop - start, n, snapshots), complex)
        for t in range(start, stop):
            rng = np.random.default_rng(np.random.SeedSequence(ss.entropy, spawn_key=ss.spawn_key + (t,)))
            xs[t - start] = rng.standard_normal((n, snapshots)) + 1j * rng.standard_normal((n, snapshots))
        R = xs @ np.conj(np.swapaxes(xs, -1, -2)) / snapshots
        out[start:stop] = strongest_peak_statistics(music_statistic(R, sources, a))
    return out


def calibrate_threshold(noise_only_trials: int, target_pfa: float = 0.026, seed=0, **kwargs) -> float:
    """Threshold whose noise-only strongest-peak exceedance rate is ``target_pfa``.

    Keyword arguments are forwarded to :func:`noise_only_statistics`.
    """
    if noise_only_trials < 1000:
        raise ValueError("calibration needs at least 1000 noise-only trials")
    if not 0 < target_pfa <= 1:
        raise ValueError("target_pfa must lie in (0, 1]")
    stats = noise_only_statistics(noise_only_trials, seed, **kwargs)
    return float(np.quantile(stats, 1.0 - target_pfa, method="higher"))


def false_alarm_rate(threshold: float, trials: int, seed, **kwargs) -> float:
    """Fraction of noise-only trials whose strongest peak reaches ``threshold``."""
    return float(np.mean(noise_only_statistics(trials, seed, **kwargs) >= threshold))
