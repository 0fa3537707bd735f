"""Experiment configuration, preset defaults and INI config loading."""

from __future__ import annotations

import configparser
import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from ..doa import AZIMUTH_GRID
from ..waveform import OfdmConfig

PRESETS = ("roc", "rmse-azimuth", "rmse-delay", "histogram", "pd-snr", "gpris-sweep", "spectrum")
SNR_LIST = (-15.0, -10.0, -5.0, 0.0, 5.0)
THREE_ARRIVALS = ((30.0, 0.0, 1.0), (-30.0, 0.0, 1.0), (70.0, 0.0, 1.0))
TWO_ARRIVALS = ((30.0, 0.0, 1.0), (-30.0, 0.0, 1.0))


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class MusicSettings:
    sources: int = 2
    # None: keep every local maximum; "calibrate": derive from target_pfa
    threshold: float | str | None = "calibrate"
    target_pfa: float = 0.026
    calibration_trials: int = 2000
    error_rule: str = "strongest"
    tolerance: float = 2.5
    keep_peaks: int = 8

    def __post_init__(self):
        if self.error_rule not in ("strongest", "nearest"):
            raise ConfigError("error_rule must be 'strongest' or 'nearest'")
        if isinstance(self.threshold, str) and self.threshold != "calibrate":
            raise ConfigError("threshold must be a number, 'calibrate' or 'none'")


@dataclass(frozen=True)
class GeometrySettings:
    carrier_frequency: float = 26e9
    ula_elements: int = 16
    ula_spacing_wavelengths: float = 0.5
    # synthetic presets: (azimuth_deg, delay_s, amplitude); the first entry is the LOS
    arrivals: tuple = TWO_ARRIVALS
    swept_arrival: int = 1
    # RIS presets
    aux_azimuth: float = 70.0
    aux_relative_db: float = -6.0
    aux_delay: float = 300e-9
    scatter_fraction: float = 1.0
    delay_bin_width: float = 0.5e-9
    azimuth_bin_width: float = 0.1


@dataclass(frozen=True)
class RisSettings:
    columns: int = 5000
    rows: int = 100
    spacing_wavelengths: float = 0.2
    centering_mode: str = "centered"


@dataclass(frozen=True)
class ExperimentConfig:
    preset: str
    trials: int = 100
    seed: int = 0
    snr_db: tuple = (5.0,)
    variants: tuple = ("correlated", "uncorrelated")
    sweep: str = "none"
    sweep_values: tuple = (0.0,)
    full_scale: bool = False
    music: MusicSettings = field(default_factory=MusicSettings)
    geometry: GeometrySettings = field(default_factory=GeometrySettings)
    ris: RisSettings = field(default_factory=RisSettings)
    ofdm: OfdmConfig = field(default_factory=OfdmConfig)

    def __post_init__(self):
        if self.preset not in PRESETS:
            raise ConfigError(f"unknown preset {self.preset!r}")
        if self.trials < 1:
            raise ConfigError("trial count must be at least 1")
        if not self.sweep_values or not self.snr_db or not self.variants:
            raise ConfigError("sweep values, SNR list and variants must be non-empty")
        if self.sweep not in ("none", "azimuth", "delay", "utilization"):
            raise ConfigError(f"unknown sweep variable {self.sweep!r}")
        ris_preset = self.preset in ("gpris-sweep", "spectrum")
        for v in self.variants:
            ok = v in GEOMETRY_PRESETS if ris_preset else v in ("correlated", "uncorrelated", "noise")
            if not ok:
                raise ConfigError(f"variant {v!r} does not fit preset {self.preset!r}")
        if ris_preset and self.sweep not in ("utilization", "none"):
            raise ConfigError("RIS presets sweep utilization only")
        if not ris_preset and self.sweep == "utilization":
            raise ConfigError("utilization sweeps need an RIS preset")

    @property
    def uses_ris(self) -> bool:
        return self.preset in ("gpris-sweep", "spectrum")

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)

    def digest(self) -> str:
        blob = json.dumps(self.as_dict(), sort_keys=True, default=float)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


# Tx position, ULA position, boresight rule ("bisector" of Tx/RIS directions or "tx")
GEOMETRY_PRESETS = {
    "equilateral": ((100.0, 0.0), (50.0, -86.6), "bisector"),
    "boresight": ((30.0, 50.0), (30.0, -50.0), "tx"),
}


def _grid(start, stop, step):
    n = int(round((stop - start) / step)) + 1
    return tuple(float(v) for v in np.round(start + step * np.arange(n), 10))


def preset_config(name: str, *, full_scale: bool = False, **overrides) -> ExperimentConfig:
    """Default configuration of a named experiment."""
    corr = ("correlated", "uncorrelated")
    if name == "roc":
        cfg = ExperimentConfig(name, trials=1000, snr_db=SNR_LIST, variants=corr + ("noise",),
                               music=MusicSettings(sources=2))
    elif name == "rmse-azimuth":
        cfg = ExperimentConfig(name, trials=50, snr_db=SNR_LIST, variants=corr, sweep="azimuth",
                               sweep_values=tuple(float(v) for v in AZIMUTH_GRID),
                               music=MusicSettings(sources=2, threshold=None, error_rule="nearest"))
    elif name == "rmse-delay":
        cfg = ExperimentConfig(name, trials=50, snr_db=SNR_LIST, variants=corr, sweep="delay",
                               sweep_values=_grid(0.0, 500e-9, 10e-9),
                               music=MusicSettings(sources=2, threshold=None, error_rule="nearest"))
    elif name == "histogram":
        cfg = ExperimentConfig(name, trials=2000, snr_db=(5.0,), variants=corr,
                               geometry=GeometrySettings(arrivals=THREE_ARRIVALS),
                               music=MusicSettings(sources=3))
    elif name == "pd-snr":
        cfg = ExperimentConfig(name, trials=1000, snr_db=SNR_LIST, variants=corr,
                               geometry=GeometrySettings(arrivals=THREE_ARRIVALS),
                               music=MusicSettings(sources=3))
    elif name == "gpris-sweep":
        rows, trials, values = (500, 500, _grid(0, 1000, 25)) if full_scale else (100, 50, _grid(0, 2500, 100))
        cfg = ExperimentConfig(name, trials=trials, snr_db=(5.0,), variants=tuple(GEOMETRY_PRESETS),
                               sweep="utilization", sweep_values=values, full_scale=full_scale,
                               ris=RisSettings(rows=rows), music=MusicSettings(sources=1))
    elif name == "spectrum":
        rows = 500 if full_scale else 100
        cfg = ExperimentConfig(name, trials=1, snr_db=(5.0,), variants=tuple(GEOMETRY_PRESETS),
                               sweep="utilization", sweep_values=(300.0,), full_scale=full_scale,
                               ris=RisSettings(rows=rows), music=MusicSettings(sources=1))
    else:
        raise ConfigError(f"unknown preset {name!r}")
    return replace(cfg, **overrides) if overrides else cfg


def _coerce(text: str, default):
    text = text.strip()
    if isinstance(default, bool):
        return text.lower() in ("1", "true", "yes", "on")
    if isinstance(default, tuple):
        if not text:
            return ()
        parts = [p.strip() for p in text.split(";" if ";" in text else ",")]
        if default and isinstance(default[0], tuple):
            return tuple(tuple(float(x) for x in p.split()) for p in parts)
        if default and isinstance(default[0], str):
            return tuple(parts)
        return tuple(float(p) for p in parts)
    if isinstance(default, int):
        return int(text)
    if isinstance(default, float):
        return float(text)
    if text.lower() in ("none", ""):
        return None
    if text.lower() == "calibrate":
        return "calibrate"
    try:
        return float(text)
    except ValueError:
        return text


def _apply(obj, items: dict, section: str):
    known = {f.name: f for f in dataclasses.fields(obj)}
    changes = {}
    for key, text in items.items():
        if key not in known:
            raise ConfigError(f"unknown key [{section}] {key}")
        changes[key] = _coerce(text, getattr(obj, key))
    return replace(obj, **changes) if changes else obj


def load_config(path, preset: str | None = None, *, full_scale: bool | None = None) -> ExperimentConfig:
    """Read an INI file with sections [experiment], [music], [geometry], [ris], [ofdm].

    Keys override the preset defaults. ``sweep_start``/``sweep_stop``/``sweep_step``
    in [experiment] build a uniform sweep.
    """
    parser = configparser.ConfigParser()
    if not parser.read(path):
        raise ConfigError(f"cannot read config file {path}")
    exp = dict(parser["experiment"]) if parser.has_section("experiment") else {}
    name = preset or exp.pop("preset", None)
    exp.pop("preset", None)
    if name is None:
        raise ConfigError("no preset given on the command line or in [experiment]")
    fs = full_scale if full_scale is not None else exp.get("full_scale", "false").lower() in ("1", "true", "yes")
    exp.pop("full_scale", None)
    cfg = preset_config(name, full_scale=fs)

    span = [exp.pop(k, None) for k in ("sweep_start", "sweep_stop", "sweep_step")]
    if any(s is not None for s in span):
        if not all(s is not None for s in span):
            raise ConfigError("sweep_start, sweep_stop and sweep_step go together")
        exp["sweep_values"] = ",".join(str(v) for v in _grid(*(float(s) for s in span)))

    sections = {}
    for sec in ("music", "geometry", "ris", "ofdm"):
        if parser.has_section(sec):
            sections[sec] = _apply(getattr(cfg, sec), dict(parser[sec]), sec)
    top = {k: v for k, v in exp.items()}
    known = {f.name for f in dataclasses.fields(cfg)} - {"music", "geometry", "ris", "ofdm", "preset"}
    changes = {}
    for key, text in top.items():
        if key not in known:
            raise ConfigError(f"unknown key [experiment] {key}")
        changes[key] = _coerce(text, getattr(cfg, key))
    try:
        return replace(cfg, **changes, **sections)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def threshold_is_fixed(music: MusicSettings) -> bool:
    return isinstance(music.threshold, (int, float)) and not math.isnan(music.threshold)
