"""Preset pipelines: run trials, aggregate, write CSV result tables."""

from __future__ import annotations

import math
from dataclasses import replace
from pathlib import Path

import numpy as np

from .. import __version__
from ..doa import false_alarm_rate, find_peaks
from .config import ExperimentConfig
from .metrics import ResultTable, aggregate, angle_histograms, correlation_coefficient, roc_table
from .scenarios import component_signals, make_ula
from .trials import calibration_seed, resolve_threshold, run_trials, sample_spectrum, trial_seed

ROC_THRESHOLDS = np.round(np.arange(0.0, 4.0001, 0.05), 2)


def metadata(cfg: ExperimentConfig, **more) -> dict:
    return {"preset": cfg.preset, "config_hash": cfg.digest(), "seed": cfg.seed, "version": __version__, **more}


def ris_cell_metrics(cfg: ExperimentConfig) -> dict:
    """rho and component powers per (geometry, utilization, SNR) cell."""
    seed = trial_seed(cfg.seed, (0x7E5,), 0)
    out = {}
    for variant in cfg.variants:
        for u in cfg.sweep_values:
            comp = component_signals(cfg, variant, int(u), seed)
            los, ris = comp["los"], comp["ris"]
            ris_power = float(np.mean(np.abs(ris) ** 2))
            rho = correlation_coefficient(los, ris) if ris_power > 0 else math.nan
            cell = {"rho": rho, "los_power": float(np.mean(np.abs(los) ** 2)), "ris_power": ris_power}
            for snr in cfg.snr_db:
                out[(variant, float(u), float(snr))] = cell
    return out


def run_preset(cfg: ExperimentConfig, out_dir=None, workers: int = 1) -> dict[str, ResultTable]:
    """Run a preset; returns its tables keyed by file stem and writes them if ``out_dir``."""
    tables: dict[str, ResultTable] = {}
    stem = cfg.preset.replace("-", "_")

    if cfg.preset == "roc":
        records = run_trials(cfg, workers, threshold=-math.inf)
        tables[stem] = roc_table(records, ROC_THRESHOLDS, cfg.music.tolerance, metadata(cfg))
    elif cfg.preset in ("rmse-azimuth", "rmse-delay", "pd-snr"):
        thr = resolve_threshold(cfg)
        tables[stem] = aggregate(run_trials(cfg, workers, threshold=thr), metadata(cfg, threshold=thr))
    elif cfg.preset == "histogram":
        thr = resolve_threshold(cfg)
        records = run_trials(cfg, workers, threshold=thr)
        meta = metadata(cfg, threshold=thr)
        hists, missing = angle_histograms(records, metadata=meta)
        for (variant, k), table in hists.items():
            tables[f"histogram_{variant}_top{k}"] = table
        tables["histogram_not_found"] = missing
        tables[stem] = aggregate(records, meta)
    elif cfg.preset == "gpris-sweep":
        thr = resolve_threshold(cfg)
        records = run_trials(cfg, workers, threshold=thr)
        tables[stem] = aggregate(records, metadata(cfg, threshold=thr), extra=ris_cell_metrics(cfg))
    elif cfg.preset == "spectrum":
        extra = ris_cell_metrics(cfg)
        rows = []
        for variant in cfg.variants:
            u = cfg.sweep_values[0]
            snr = cfg.snr_db[0]
            ps, sc = sample_spectrum(cfg, variant, u, snr)
            spec = ResultTable(("azimuth_deg", "statistic"), list(zip(ps.azimuth.tolist(), ps.values.tolist())),
                               metadata(cfg, geometry=variant))
            tables[f"spectrum_{variant}"] = spec
            peaks = find_peaks(ps, max_peaks=3)
            cell = extra[(variant, float(u), float(snr))]
            rows.append((variant, float(u), sc.los_azimuth, cell["rho"], cell["los_power"], cell["ris_power"],
                         *([float(a) for a in peaks.azimuth] + [math.nan] * 3)[:3]))
        tables[stem] = ResultTable(("geometry", "utilization", "los_azimuth_deg", "rho", "los_power",
                                    "ris_power", "peak1_deg", "peak2_deg", "peak3_deg"), rows, metadata(cfg))
    else:
        raise ValueError(f"unknown preset {cfg.preset!r}")

    if out_dir is not None:
        write_tables(tables, out_dir)
    return tables


def calibrate(cfg: ExperimentConfig, check_trials: int = 10000, out_dir=None) -> ResultTable:
    """Calibrated threshold plus its false-alarm rate on an independent noise-only run."""
    m = cfg.music
    cal = replace(cfg, music=replace(m, threshold="calibrate"))
    thr = resolve_threshold(cal)
    kwargs = dict(sources=m.sources, ula=make_ula(cfg), snapshots=cfg.ofdm.burst_length,
                  carrier_frequency=cfg.geometry.carrier_frequency)
    check_seed = trial_seed(calibration_seed(cfg.seed), (1,), 0)
    pfa = false_alarm_rate(thr, check_trials, check_seed, **kwargs)
    table = ResultTable(("sources", "target_pfa", "calibration_trials", "threshold", "check_trials", "measured_pfa"),
                        [(m.sources, m.target_pfa, m.calibration_trials, thr, check_trials, pfa)],
                        metadata(cfg))
    if out_dir is not None:
        write_tables({"calibration": table}, out_dir)
    return table


def write_tables(tables: dict, out_dir) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, table in tables.items():
        p = out / f"{name}.csv"
        table.to_csv(p)
        paths.append(p)
    return paths
