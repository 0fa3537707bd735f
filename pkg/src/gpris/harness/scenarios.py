"""Channel construction for each experiment cell."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..channel import (
    ArrayChannel,
    ArrivalSpec,
    ChannelConfig,
    TapSet,
    arrival_channel,
    array_response,
    bin_paths,
    carrier_phase,
    los_path,
    ris_paths,
)
from ..geometry import (
    Position3D,
    RisConfig,
    ScenarioGeometry,
    UlaConfig,
    bisector_heading,
    heading_towards,
    wavelength,
)
from ..ris_control import program_gpris
from ..waveform import generate_ofdm
from .config import GEOMETRY_PRESETS, ExperimentConfig


@dataclass
class Scenario:
    channel: ArrayChannel
    los_azimuth: float
    ula: UlaConfig
    meta: dict


def make_ula(cfg: ExperimentConfig, position=(0.0, 0.0, 0.0), boresight: float = 90.0) -> UlaConfig:
    g = cfg.geometry
    lam = wavelength(g.carrier_frequency)
    return UlaConfig(g.ula_elements, g.ula_spacing_wavelengths * lam, Position3D(*position), boresight)


def arrival_specs(cfg: ExperimentConfig, variant: str, sweep_value: float) -> list[ArrivalSpec]:
    mode = "shared" if variant == "correlated" else "independent"
    specs = []
    for k, (az, delay, amp) in enumerate(cfg.geometry.arrivals):
        if k == cfg.geometry.swept_arrival:
            if cfg.sweep == "azimuth":
                az = sweep_value
            elif cfg.sweep == "delay":
                delay = sweep_value
        if variant == "noise":
            amp = 0.0
        specs.append(ArrivalSpec(float(az), float(delay), float(amp), mode))
    return specs


def scenario_geometry(cfg: ExperimentConfig, name: str) -> ScenarioGeometry:
    """Node placement for a named RIS geometry; all nodes at the RIS mid-height."""
    tx_xy, ula_xy, rule = GEOMETRY_PRESETS[name]
    fc = cfg.geometry.carrier_frequency
    lam = wavelength(fc)
    r = cfg.ris
    ris = RisConfig(r.columns, r.rows, r.spacing_wavelengths * lam, r.spacing_wavelengths * lam, r.centering_mode)
    zc = ris.vertical_center
    tx = (*tx_xy, zc)
    ula_pos = (*ula_xy, zc)
    center = (0.0, 0.0, zc)
    heading = bisector_heading(ula_pos, tx, center) if rule == "bisector" else heading_towards(ula_pos, tx)
    return ScenarioGeometry(Position3D(*tx), make_ula(cfg, ula_pos, heading), ris, fc,
                            metadata={"node_height_m": zc, "boresight_rule": rule})


def channel_config(cfg: ExperimentConfig) -> ChannelConfig:
    g = cfg.geometry
    return ChannelConfig(scatter_fraction=g.scatter_fraction, delay_bin_width=g.delay_bin_width,
                         azimuth_bin_width=g.azimuth_bin_width)


@lru_cache(maxsize=4)
def _ris_state(cfg: ExperimentConfig, name: str):
    geom = scenario_geometry(cfg, name)
    ccfg = channel_config(cfg)
    return geom, los_path(geom, ccfg), ris_paths(geom, ccfg)


def ris_taps(cfg: ExperimentConfig, name: str, utilization: int):
    geom, los, paths = _ris_state(cfg, name)
    phases = program_gpris(geom, paths.delay, los.delay, int(utilization))
    g = cfg.geometry
    return geom, los, bin_paths(paths, phases, g.delay_bin_width, geom.carrier_frequency, g.azimuth_bin_width)


def aux_tap(cfg: ExperimentConfig, los) -> TapSet:
    g = cfg.geometry
    if g.aux_azimuth is None or not np.isfinite(g.aux_relative_db):
        return TapSet.empty()
    tau = los.delay + g.aux_delay
    amp = los.amplitude * 10 ** (g.aux_relative_db / 20)
    return TapSet(np.array([tau]), np.array([amp * np.exp(-1j * carrier_phase(g.carrier_frequency, tau))]),
                  np.array([float(g.aux_azimuth)]))


def component_signals(cfg: ExperimentConfig, name: str, utilization: int, seed) -> dict:
    """Noiseless LOS and aggregate RIS components at the reference ULA element."""
    geom, los, taps = ris_taps(cfg, name, utilization)
    x = generate_ofdm(cfg.ofdm, rng=np.random.default_rng(seed))
    fx = np.fft.fft(x.samples)

    def at_ref(t):
        h = array_response(t, geom.ula, geom.carrier_frequency, len(x), x.sample_rate)
        return np.fft.ifft(h[0] * fx)

    return {"los": at_ref(TapSet.from_path(los)), "ris": at_ref(taps), "geometry": geom, "los_path": los}


def build_scenario(cfg: ExperimentConfig, variant: str, sweep_value: float) -> Scenario:
    if not cfg.uses_ris:
        specs = arrival_specs(cfg, variant, sweep_value)
        ula = make_ula(cfg)
        ch = arrival_channel(specs, cfg.ofdm, ula, carrier_frequency=cfg.geometry.carrier_frequency)
        return Scenario(ch, specs[0].azimuth, ula, {})
    geom, los, taps = ris_taps(cfg, variant, sweep_value)
    allt = TapSet.from_path(los).concat(taps).concat(aux_tap(cfg, los))
    h = array_response(allt, geom.ula, geom.carrier_frequency, cfg.ofdm.burst_length, cfg.ofdm.sample_rate)
    ch = ArrayChannel([h], cfg.ofdm.sample_rate, los.amplitude ** 2)
    return Scenario(ch, los.arrival_azimuth, geom.ula, {"ris_taps": len(taps)})
