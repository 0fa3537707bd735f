"""Aggregation of trial records into result tables."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .trials import PEAK_RULES, TrialRecord


def correlation_coefficient(a, b) -> float:
    """``|<a, b>| / (||a|| ||b||)`` over complex samples."""
    a = np.asarray(getattr(a, "samples", a)).ravel()
    b = np.asarray(getattr(b, "samples", b)).ravel()
    if a.shape != b.shape:
        raise ValueError("signals must have equal length")
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ValueError("correlation undefined for a zero-norm signal")
    return float(min(1.0, abs(np.vdot(a, b)) / (na * nb)))


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return "nan"
    return format(float(v), ".10g")


@dataclass
class ResultTable:
    columns: tuple
    rows: list
    metadata: dict = field(default_factory=dict)

    def column(self, name: str) -> list:
        k = self.columns.index(name)
        return [r[k] for r in self.rows]

    def select(self, **where) -> list[dict]:
        out = []
        for r in self.rows:
            d = dict(zip(self.columns, r))
            if all(d[k] == v for k, v in where.items()):
                out.append(d)
        return out

    def to_csv(self, path) -> None:
        meta = " ".join(f"{k}={_fmt(v)}" for k, v in self.metadata.items())
        lines = [f"# {meta}", ",".join(self.columns)]
        lines += [",".join(_fmt(v) for v in row) for row in self.rows]
        Path(path).write_text("\n".join(lines) + "\n")


AGG_COLUMNS = ("variant", "sweep_value", "snr_db", "trials", "found", "missing_rate", "rms_error_deg",
               "pd_1", "pd_2", "pd_3", "pd_any")


def aggregate(records, metadata: dict | None = None, extra: dict | None = None) -> ResultTable:
    """Per-cell RMS strongest-peak error and P_d per peaks rule.

    Sums use exact (order-independent) floating summation, so permuting
    ``records`` cannot change the table. ``extra`` maps a cell key
    ``(variant, sweep_value, snr_db)`` to additional column values.
    """
    records = list(records)
    if not records:
        raise ValueError("no records to aggregate")
    groups = defaultdict(list)
    for r in records:
        groups[(r.variant, r.sweep_value, r.snr_db)].append(r)

    extra_cols = ()
    if extra:
        extra_cols = tuple(next(iter(extra.values())).keys())
    rows = []
    for key in sorted(groups):
        rs = groups[key]
        n = len(rs)
        errs = [r.error_deg for r in rs if r.found]
        rms = math.sqrt(math.fsum(e * e for e in errs) / len(errs)) if errs else math.nan
        pds = [sum(r.detected(rule) for r in rs) / n for rule in PEAK_RULES]
        row = [key[0], key[1], key[2], n, len(errs), 1 - len(errs) / n, rms, *pds]
        if extra_cols:
            row += [extra.get(key, {}).get(c, math.nan) for c in extra_cols]
        rows.append(tuple(row))
    return ResultTable(AGG_COLUMNS + extra_cols, rows, dict(metadata or {}))


def rms(values) -> float:
    v = [float(x) for x in values if not math.isnan(x)]
    return math.sqrt(math.fsum(x * x for x in v) / len(v)) if v else math.nan


def angle_histograms(records, rules=(1, 2, 3), bin_width: float = 0.5, metadata: dict | None = None):
    """Histograms of the azimuths of the k strongest above-threshold peaks.

    Returns ``{(variant, k): ResultTable(bin_center_deg, count)}`` and a
    table of not-found rates (share of the ``k * trials`` requested peaks
    that were not present above threshold).
    """
    edges = np.arange(-90.0 - bin_width / 2, 90.0, bin_width)
    centers = 0.5 * (edges[:-1] + edges[1:])
    by_variant = defaultdict(list)
    for r in records:
        by_variant[r.variant].append(r)
    hists = {}
    missing_rows = []
    for variant in sorted(by_variant):
        rs = sorted(by_variant[variant], key=lambda r: (r.sweep_value, r.snr_db, r.trial))
        for k in rules:
            angles = [a for r in rs for a in r.peak_azimuth[:k]]
            counts, _ = np.histogram(angles, bins=edges)
            hists[(variant, k)] = ResultTable(("bin_center_deg", "count"),
                                              [(float(c), int(n)) for c, n in zip(centers, counts)],
                                              dict(metadata or {}))
            missing = sum(k - min(k, len(r.peak_azimuth)) for r in rs)
            missing_rows.append((variant, k, len(rs), missing / (k * len(rs))))
    return hists, ResultTable(("variant", "peaks", "trials", "not_found_rate"), missing_rows, dict(metadata or {}))


def _in_window_stat(r: TrialRecord, tolerance: float) -> float:
    best = -math.inf
    for az, mag in zip(r.peak_azimuth, r.peak_magnitude):
        if abs(az - r.los_azimuth) <= tolerance + 1e-9:
            best = max(best, mag)
    return best


def roc_table(records, thresholds, tolerance: float = 2.5, metadata: dict | None = None) -> ResultTable:
    """(P_fa, P_d) pairs per (variant, SNR) over a threshold sweep.

    P_fa is the share of ``noise`` trials whose strongest peak reaches the
    threshold; P_d (strongest rule) needs the strongest peak inside the
    tolerance window, P_d (any rule) any peak inside it.
    """
    noise = [r for r in records if r.variant == "noise"]
    if not noise:
        raise ValueError("ROC needs noise-only records")
    thresholds = np.asarray(thresholds, dtype=float)
    noise_peak = np.array([r.peak_magnitude[0] if r.peak_magnitude else -np.inf for r in noise])
    groups = defaultdict(list)
    for r in records:
        if r.variant != "noise":
            groups[(r.variant, r.snr_db)].append(r)
    rows = []
    for (variant, snr) in sorted(groups):
        rs = groups[(variant, snr)]
        strongest = np.array([r.peak_magnitude[0] if r.peak_magnitude and
                              abs(r.peak_azimuth[0] - r.los_azimuth) <= tolerance + 1e-9 else -np.inf
                              for r in rs])
        window = np.array([_in_window_stat(r, tolerance) for r in rs])
        for thr in thresholds:
            rows.append((variant, snr, float(thr), float(np.mean(noise_peak >= thr)),
                         float(np.mean(strongest >= thr)), float(np.mean(window >= thr))))
    return ResultTable(("variant", "snr_db", "threshold", "pfa", "pd_strongest", "pd_any"), rows,
                       dict(metadata or {}))
