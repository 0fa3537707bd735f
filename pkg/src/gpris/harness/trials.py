"""Seeded Monte-Carlo trial execution."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..channel import draw_payloads, split_seed, steering_vectors
from ..doa import AZIMUTH_GRID, _local_maxima, calibrate_threshold, music_statistic, sample_correlation
from ..geometry import wavelength
from .config import ExperimentConfig, threshold_is_fixed
from .scenarios import build_scenario

PEAK_RULES = ("1", "2", "3", "any")
_RULE_K = {"1": 1, "2": 2, "3": 3, "any": None}
_CHUNK = 200


@dataclass(frozen=True)
class TrialRecord:
    variant: str
    sweep_value: float
    snr_db: float
    trial: int
    seed: int
    los_azimuth: float
    peak_azimuth: tuple
    peak_magnitude: tuple
    threshold: float
    error_deg: float
    detections: tuple

    @property
    def found(self) -> bool:
        return not math.isnan(self.error_deg)

    def detected(self, rule: str) -> bool:
        return self.detections[PEAK_RULES.index(rule)]


def trial_seed(master: int, cell: tuple, trial: int) -> int:
    """64-bit per-trial seed hashed from the master seed and the trial's counters."""
    ss = np.random.SeedSequence(master, spawn_key=tuple(int(c) for c in cell) + (int(trial),))
    return int(ss.generate_state(1, np.uint64)[0])


def calibration_seed(master: int) -> int:
    return trial_seed(master, (0xCA11,), 0)


def resolve_threshold(cfg: ExperimentConfig) -> float:
    """Fixed threshold, calibrated threshold, or -inf when every peak is kept."""
    m = cfg.music
    if m.threshold is None:
        return -math.inf
    if threshold_is_fixed(m):
        return float(m.threshold)
    g = cfg.geometry
    from .scenarios import make_ula

    return calibrate_threshold(m.calibration_trials, m.target_pfa, seed=calibration_seed(cfg.seed),
                               sources=m.sources, ula=make_ula(cfg), snapshots=cfg.ofdm.burst_length,
                               carrier_frequency=g.carrier_frequency)


def cells(cfg: ExperimentConfig):
    for vi, variant in enumerate(cfg.variants):
        for si, value in enumerate(cfg.sweep_values):
            for ni, snr in enumerate(cfg.snr_db):
                yield (vi, si, ni), variant, float(value), float(snr)


def _peak_lists(values: np.ndarray, threshold: float):
    mask = _local_maxima(values) & (values >= threshold)
    idx = np.flatnonzero(mask)
    order = idx[np.argsort(-values[idx], kind="stable")]
    return AZIMUTH_GRID[order], values[order]


def _error(az: np.ndarray, los: float, rule: str) -> float:
    if len(az) == 0:
        return math.nan
    if rule == "strongest":
        return float(az[0] - los)
    k = int(np.argmin(np.abs(az - los)))
    return float(az[k] - los)


def run_cell(cfg: ExperimentConfig, key: tuple, variant: str, value: float, snr: float,
             threshold: float) -> list[TrialRecord]:
    sc = build_scenario(cfg, variant, value)
    m = cfg.music
    n_streams = len(sc.channel.responses)
    seeds = [trial_seed(cfg.seed, key, t) for t in range(cfg.trials)]
    a = steering_vectors(AZIMUTH_GRID, sc.ula.elements,
                         sc.ula.spacing_wavelengths(wavelength(cfg.geometry.carrier_frequency)))
    spectra = np.empty((cfg.trials, len(AZIMUTH_GRID)))
    for start in range(0, cfg.trials, _CHUNK):
        block = seeds[start:start + _CHUNK]
        ys = np.empty((len(block), sc.channel.n_elements, cfg.ofdm.burst_length), complex)
        for t, s in enumerate(block):
            pseed, nseed = split_seed(s)
            ys[t] = sc.channel.receive(draw_payloads(cfg.ofdm, n_streams, pseed), snr, nseed)
        R = ys @ np.conj(np.swapaxes(ys, -1, -2)) / ys.shape[-1]
        spectra[start:start + len(block)] = music_statistic(R, m.sources, a)

    out = []
    for t in range(cfg.trials):
        az, mag = _peak_lists(spectra[t], threshold)
        hits = np.abs(az - sc.los_azimuth) <= m.tolerance + 1e-9
        det = tuple(bool(hits[:k].any()) if k else bool(hits.any()) for k in (_RULE_K[r] for r in PEAK_RULES))
        out.append(TrialRecord(variant, value, snr, t, seeds[t], float(sc.los_azimuth),
                               tuple(float(v) for v in az[: m.keep_peaks]),
                               tuple(float(v) for v in mag[: m.keep_peaks]),
                               float(threshold), _error(az, sc.los_azimuth, m.error_rule), det))
    return out


def _run_cell_args(args):
    return run_cell(*args)


def run_trials(cfg: ExperimentConfig, workers: int = 1, threshold: float | None = None) -> list[TrialRecord]:
    """Run every (variant x sweep value x SNR x trial) of ``cfg``.

    Output order and content do not depend on ``workers``.
    """
    thr = resolve_threshold(cfg) if threshold is None else threshold
    jobs = [(cfg, key, variant, value, snr, thr) for key, variant, value, snr in cells(cfg)]
    if workers <= 1 or len(jobs) == 1:
        chunks = [run_cell(*j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_cell_args, jobs))
    return [r for chunk in chunks for r in chunk]


def sample_spectrum(cfg: ExperimentConfig, variant: str, value: float, snr: float, trial: int = 0):
    """Pseudo-spectrum of one seeded trial (for inspection and the spectrum preset)."""
    from ..doa import music_spectrum

    sc = build_scenario(cfg, variant, value)
    key = (cfg.variants.index(variant), 0, 0)
    pseed, nseed = split_seed(trial_seed(cfg.seed, key, trial))
    y = sc.channel.receive(draw_payloads(cfg.ofdm, len(sc.channel.responses), pseed), snr, nseed)
    return music_spectrum(sample_correlation(y), cfg.music.sources, sc.ula, cfg.geometry.carrier_frequency), sc
