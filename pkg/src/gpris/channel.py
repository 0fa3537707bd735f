"""Propagation paths, delay binning and ULA snapshot synthesis.

The received array signal is modelled narrowband across the aperture: each
path contributes a complex gain, a (fractional, circular) delay of the
baseband burst, and a plane-wave steering vector at its arrival azimuth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    SPEED_OF_LIGHT,
    GeometryError,
    ScenarioGeometry,
    UlaConfig,
    azimuth_of,
    azimuths,
    distance,
    ris_element_positions,
)
from .waveform import BasebandSignal, OfdmConfig, generate_ofdm

TWO_PI = 2 * np.pi


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class ChannelConfig:
    scatter_fraction: float = 1.0
    snr_db: float = 5.0
    delay_bin_width: float = 0.5e-9
    azimuth_bin_width: float = 0.1
    tx_gain_dbi: float = 0.0
    adv_gain_dbi: float = 0.0
    ris_element_gain_dbi: float = 0.0
    speed_of_light: float = SPEED_OF_LIGHT

    def __post_init__(self):
        if not 0.0 <= self.scatter_fraction <= 1.0:
            raise ValueError("scatter_fraction must lie in [0, 1]")
        if not (self.delay_bin_width > 0 and self.azimuth_bin_width > 0):
            raise ValueError("bin widths must be positive")


@dataclass(frozen=True)
class PathDescriptor:
    amplitude: float
    delay: float
    carrier_phase: float
    arrival_azimuth: float

    def __post_init__(self):
        if self.amplitude < 0 or self.delay < 0:
            raise ValueError("path amplitude and delay must be non-negative")

    @property
    def gain(self) -> complex:
        return self.amplitude * np.exp(-1j * self.carrier_phase)


@dataclass(frozen=True)
class PathSet:
    """Struct-of-arrays collection of paths (one entry per RIS element)."""

    amplitude: np.ndarray
    delay: np.ndarray
    carrier_phase: np.ndarray
    arrival_azimuth: np.ndarray

    def __len__(self):
        return len(self.amplitude)

    def __getitem__(self, k) -> PathDescriptor:
        return PathDescriptor(float(self.amplitude[k]), float(self.delay[k]),
                              float(self.carrier_phase[k]), float(self.arrival_azimuth[k]))


@dataclass(frozen=True)
class TapSet:
    """Aggregated taps: complex gain (carrier phase included), delay, azimuth."""

    delay: np.ndarray
    gain: np.ndarray
    azimuth: np.ndarray

    def __len__(self):
        return len(self.delay)

    @classmethod
    def empty(cls) -> "TapSet":
        return cls(np.zeros(0), np.zeros(0, complex), np.zeros(0))

    @classmethod
    def from_path(cls, path: PathDescriptor) -> "TapSet":
        return cls(np.array([path.delay]), np.array([path.gain]), np.array([path.arrival_azimuth]))

    def concat(self, other: "TapSet") -> "TapSet":
        return TapSet(np.concatenate([self.delay, other.delay]),
                      np.concatenate([self.gain, other.gain]),
                      np.concatenate([self.azimuth, other.azimuth]))

    def scaled(self, factor: complex) -> "TapSet":
        return TapSet(self.delay, self.gain * factor, self.azimuth)

    @property
    def total_gain(self) -> complex:
        return complex(self.gain.sum())


def carrier_phase(carrier_frequency: float, delay) -> np.ndarray | float:
    """``2*pi*f_c*tau mod 2*pi``, reducing whole cycles before scaling."""
    cycles = carrier_frequency * np.asarray(delay, dtype=float)
    out = TWO_PI * (cycles - np.floor(cycles))
    return float(out) if out.ndim == 0 else out


def los_path(geom: ScenarioGeometry, cfg: ChannelConfig = ChannelConfig()) -> PathDescriptor:
    d = distance(geom.ula.position, geom.tx)
    if d <= 0:
        raise GeometryError("transmitter and ULA coincide")
    lam = cfg.speed_of_light / geom.carrier_frequency
    g = math.sqrt(db_to_linear(cfg.tx_gain_dbi) * db_to_linear(cfg.adv_gain_dbi))
    tau = d / cfg.speed_of_light
    return PathDescriptor(lam * g / (4 * math.pi * d), tau,
                          carrier_phase(geom.carrier_frequency, tau),
                          azimuth_of(geom.tx, geom.ula))


def ris_paths(geom: ScenarioGeometry, cfg: ChannelConfig = ChannelConfig(),
              positions: np.ndarray | None = None) -> PathSet:
    """Per-element Tx -> RIS element -> ULA paths (amplitudes before phasing)."""
    pts = ris_element_positions(geom.ris) if positions is None else positions
    d_tx = distance(pts, geom.tx)
    d_adv = distance(pts, geom.ula.position)
    if np.any(d_tx <= 0) or np.any(d_adv <= 0):
        raise GeometryError("an RIS element coincides with a node")
    lam = cfg.speed_of_light / geom.carrier_frequency
    g_ris = db_to_linear(cfg.ris_element_gain_dbi)
    g = math.sqrt(g_ris * g_ris * db_to_linear(cfg.tx_gain_dbi) * db_to_linear(cfg.adv_gain_dbi))
    amp = math.sqrt(cfg.scatter_fraction) * lam**2 / (16 * math.pi**2) * g / (d_adv * d_tx)
    tau = (d_tx + d_adv) / cfg.speed_of_light
    return PathSet(amp, tau, carrier_phase(geom.carrier_frequency, tau), azimuths(pts, geom.ula))


def fractional_delay(x: BasebandSignal, tau: float) -> BasebandSignal:
    """Circular band-limited delay by ``tau`` seconds (spectral phase ramp)."""
    if abs(tau) >= x.duration:
        raise ValueError("delay must be shorter than the burst")
    if tau == 0:
        return BasebandSignal(np.array(x.samples, copy=True), x.sample_rate)
    n = len(x.samples)
    ramp = np.exp(-2j * np.pi * np.fft.fftfreq(n, 1.0 / x.sample_rate) * tau)
    return BasebandSignal(np.fft.ifft(np.fft.fft(x.samples) * ramp), x.sample_rate)


def effective_delay(paths: PathSet, phases, carrier_frequency: float) -> np.ndarray:
    return paths.delay + np.asarray(phases, dtype=float) / (TWO_PI * carrier_frequency)


def path_gains(paths: PathSet, phases) -> np.ndarray:
    """Complex gains ``A * exp(-j(2*pi*f_c*tau + phi))``."""
    return paths.amplitude * np.exp(-1j * (paths.carrier_phase + np.asarray(phases, dtype=float)))


def bin_paths(paths: PathSet, phases, bin_width: float, carrier_frequency: float,
              azimuth_bin_width: float = 0.1) -> TapSet:
    """Sum complex path gains in (effective delay x azimuth) cells.

    ``phases`` is a PhaseMap, an array in element order, or ``None`` for an
    unprogrammed surface. Each tap's delay and azimuth are the power-weighted
    means over its members; singleton cells are passed through unchanged.
    """
    if not bin_width > 0:
        raise ValueError("bin_width must be positive")
    if phases is None:
        phases = np.zeros(len(paths))
    phases = np.asarray(getattr(phases, "phases", phases), dtype=float).reshape(-1)
    tau = effective_delay(paths, phases, carrier_frequency)
    gain = path_gains(paths, phases)
    az = np.asarray(paths.arrival_azimuth, dtype=float)

    keys = np.stack([np.floor(tau / bin_width), np.floor(az / azimuth_bin_width)], axis=1)
    uniq, inverse, counts = np.unique(keys, axis=0, return_inverse=True, return_counts=True)
    inverse = inverse.reshape(-1)
    n = len(uniq)
    w = np.abs(gain) ** 2
    wsum = np.bincount(inverse, weights=w, minlength=n)
    flat = wsum <= 0
    if flat.any():
        w = np.where(flat[inverse], 1.0, w)
        wsum = np.bincount(inverse, weights=w, minlength=n)
    tap_gain = (np.bincount(inverse, weights=gain.real, minlength=n)
                + 1j * np.bincount(inverse, weights=gain.imag, minlength=n))
    tap_tau = np.bincount(inverse, weights=w * tau, minlength=n) / wsum
    tap_az = np.bincount(inverse, weights=w * az, minlength=n) / wsum

    single = counts == 1
    if single.any():
        idx = np.empty(n, dtype=np.int64)
        idx[inverse] = np.arange(len(inverse))
        tap_gain[single] = gain[idx[single]]
        tap_tau[single] = tau[idx[single]]
        tap_az[single] = az[idx[single]]
    order = np.lexsort((tap_az, tap_tau))
    return TapSet(tap_tau[order], tap_gain[order], tap_az[order])


def steering_vectors(azimuth_deg, n_elements: int, spacing_wavelengths: float) -> np.ndarray:
    """Plane-wave responses, shape ``(n_elements, len(azimuth_deg))``."""
    s = np.sin(np.radians(np.atleast_1d(np.asarray(azimuth_deg, dtype=float))))
    n = np.arange(n_elements)[:, None]
    return np.exp(-2j * np.pi * spacing_wavelengths * n * s[None, :])


def array_response(taps: TapSet, ula: UlaConfig, carrier_frequency: float,
                   n_samples: int, sample_rate: float) -> np.ndarray:
    """Frequency response ``H[n, k]`` of the taps at ULA element ``n``, FFT bin ``k``."""
    a = steering_vectors(taps.azimuth, ula.elements, ula.spacing_wavelengths(SPEED_OF_LIGHT / carrier_frequency))
    f = np.fft.fftfreq(n_samples, 1.0 / sample_rate)
    ramps = np.exp(-2j * np.pi * np.outer(taps.delay, f))
    return (a * taps.gain[None, :]) @ ramps


@dataclass
class ArrayChannel:
    """Precomputed linear channel to the ULA for a fixed tap set.

    ``responses`` holds one ``(N, K)`` frequency response per independent
    payload stream.
    """

    responses: list
    sample_rate: float
    reference_power: float
    meta: dict = field(default_factory=dict)

    @property
    def n_elements(self) -> int:
        return self.responses[0].shape[0]

    def noiseless(self, payloads) -> np.ndarray:
        out = 0
        for h, x in zip(self.responses, payloads):
            out = out + np.fft.ifft(h * np.fft.fft(x.samples)[None, :], axis=1)
        return out

    def noise_power(self, snr_db: float | None) -> float:
        if snr_db is None:
            return 0.0
        return self.reference_power / db_to_linear(snr_db)

    def receive(self, payloads, snr_db: float | None, rng) -> np.ndarray:
        y = self.noiseless(payloads)
        return y + awgn(y.shape, self.noise_power(snr_db), rng)


def awgn(shape, power: float, rng) -> np.ndarray:
    """Circular complex white Gaussian noise of the given per-entry variance."""
    rng = np.random.default_rng(rng)
    if power <= 0:
        return np.zeros(shape, complex)
    return math.sqrt(power / 2) * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


@dataclass(frozen=True)
class SnapshotMatrix:
    samples: np.ndarray
    sample_rate: float
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("snapshot matrix contains non-finite entries")

    @property
    def shape(self):
        return self.samples.shape

    def dump(self, path, seed=None) -> None:
        """Binary dump: one JSON header line, then little-endian complex64 data."""
        import json

        n, k = self.samples.shape
        header = json.dumps({"N": n, "K": k, "sample_rate": self.sample_rate, "seed": seed})
        with open(path, "wb") as fh:
            fh.write(header.encode() + b"\n")
            fh.write(self.samples.astype("<c8").tobytes())

    @classmethod
    def load(cls, path) -> "SnapshotMatrix":
        import json

        with open(path, "rb") as fh:
            header = json.loads(fh.readline())
            data = np.frombuffer(fh.read(), dtype="<c8")
        return cls(data.reshape(header["N"], header["K"]).astype(complex), header["sample_rate"],
                   {"seed": header["seed"]})


def synthesize(x: BasebandSignal, los: PathDescriptor | None, ris_taps: TapSet | None,
               ula: UlaConfig, snr_db: float | None, seed=None, *,
               carrier_frequency: float = 26e9, reference_power: float | None = None) -> SnapshotMatrix:
    """Received ULA snapshots for one payload through LOS and RIS taps.

    Noise variance per element is ``reference_power / 10**(snr/10)`` where the
    reference defaults to the LOS power ``A_0**2``. ``snr_db=None`` disables noise.
    """
    taps = TapSet.empty()
    if los is not None:
        taps = taps.concat(TapSet.from_path(los))
    if ris_taps is not None:
        taps = taps.concat(ris_taps)
    if len(taps) == 0:
        raise ValueError("no propagation paths to synthesize")
    if reference_power is None:
        reference_power = los.amplitude ** 2 if los is not None else float(np.sum(np.abs(taps.gain) ** 2))
    h = array_response(taps, ula, carrier_frequency, len(x), x.sample_rate)
    ch = ArrayChannel([h], x.sample_rate, reference_power)
    return SnapshotMatrix(ch.receive([x], snr_db, seed), x.sample_rate)


@dataclass(frozen=True)
class ArrivalSpec:
    azimuth: float
    delay: float = 0.0
    amplitude: float = 1.0
    payload: str = "shared"

    def __post_init__(self):
        if self.payload not in ("shared", "independent"):
            raise ValueError("payload must be 'shared' or 'independent'")


def split_seed(seed) -> tuple[np.random.SeedSequence, np.random.SeedSequence]:
    """Independent (payload, noise) seed streams derived from one seed."""
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    # built from (entropy, spawn_key) so repeated calls never advance a shared counter
    return tuple(np.random.SeedSequence(ss.entropy, spawn_key=ss.spawn_key + (k,)) for k in (0, 1))


def arrival_channel(specs, ofdm: OfdmConfig, ula: UlaConfig, *, carrier_frequency: float = 26e9) -> ArrayChannel:
    """Channel for direct ULA arrivals; shared arrivals collapse into one stream.

    Stream order: the shared stream first (if any), then one per independent
    arrival in ``specs`` order. Reference power is unit amplitude.
    """
    specs = [s if isinstance(s, ArrivalSpec) else ArrivalSpec(*s) for s in specs]
    n = ofdm.burst_length

    def resp(group):
        taps = TapSet(np.array([s.delay for s in group], dtype=float),
                      np.array([s.amplitude for s in group], dtype=complex),
                      np.array([s.azimuth for s in group], dtype=float))
        return array_response(taps, ula, carrier_frequency, n, ofdm.sample_rate)

    shared = [s for s in specs if s.payload == "shared"]
    streams = [resp(shared)] if shared else []
    streams += [resp([s]) for s in specs if s.payload == "independent"]
    return ArrayChannel(streams, ofdm.sample_rate, 1.0, {"specs": specs})


def draw_payloads(ofdm: OfdmConfig, n_streams: int, rng) -> list[BasebandSignal]:
    rng = np.random.default_rng(rng)
    return [generate_ofdm(ofdm, rng=rng) for _ in range(n_streams)]


def synthetic_arrivals(specs, ofdm: OfdmConfig, ula: UlaConfig, snr_db: float | None, seed=None,
                       *, carrier_frequency: float = 26e9) -> SnapshotMatrix:
    """ULA snapshots for arrivals placed directly at the array (no RIS model).

    Each spec is ``(azimuth_deg, delay_s, relative_amplitude, payload_mode)``.
    Arrivals are phase coherent (no carrier rotation); noise is referenced to
    unit amplitude.
    """
    ch = arrival_channel(specs, ofdm, ula, carrier_frequency=carrier_frequency)
    payload_seed, noise_seed = split_seed(seed)
    payloads = draw_payloads(ofdm, len(ch.responses), payload_seed)
    return SnapshotMatrix(ch.receive(payloads, snr_db, noise_seed), ofdm.sample_rate)
