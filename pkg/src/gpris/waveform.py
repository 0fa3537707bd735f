"""CP-OFDM baseband burst generation (QPSK, no pilots)."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

_QPSK = np.array([1 + 1j, -1 + 1j, 1 - 1j, -1 - 1j]) / np.sqrt(2)


@dataclass(frozen=True)
class OfdmConfig:
    sample_rate: float = 7.68e6
    subcarrier_spacing: float = 15e3
    fft_size: int = 512
    cyclic_prefix: int = 36
    active_subcarriers: int = 300
    symbols_per_burst: int = 1

    def __post_init__(self):
        if self.active_subcarriers > self.fft_size:
            raise ValueError("more active subcarriers than FFT bins")
        if self.active_subcarriers % 2:
            raise ValueError("active_subcarriers must be even (split around DC)")
        if not np.isclose(self.sample_rate, self.fft_size * self.subcarrier_spacing):
            raise ValueError("sample_rate must equal fft_size * subcarrier_spacing")
        if self.cyclic_prefix < 0 or self.cyclic_prefix > self.fft_size:
            raise ValueError("cyclic prefix out of range")
        if self.symbols_per_burst < 1:
            raise ValueError("need at least one symbol per burst")

    @property
    def symbol_length(self) -> int:
        return self.fft_size + self.cyclic_prefix

    @property
    def burst_length(self) -> int:
        return self.symbol_length * self.symbols_per_burst

    @property
    def bits_per_burst(self) -> int:
        return 2 * self.active_subcarriers * self.symbols_per_burst

    @property
    def occupied_bandwidth(self) -> float:
        return self.active_subcarriers * self.subcarrier_spacing

    def active_bins(self) -> np.ndarray:
        """FFT bin indices carrying data: 150 either side of DC, DC unused."""
        half = self.active_subcarriers // 2
        pos = np.arange(1, half + 1)
        neg = self.fft_size - np.arange(1, half + 1)[::-1]
        return np.concatenate([neg, pos])


@dataclass(frozen=True)
class BasebandSignal:
    samples: np.ndarray
    sample_rate: float

    def __len__(self):
        return len(self.samples)

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate

    @property
    def power(self) -> float:
        return float(np.mean(np.abs(self.samples) ** 2))

    def dump(self, path) -> None:
        """Write interleaved little-endian float64 I/Q pairs."""
        iq = np.empty(2 * len(self.samples), dtype="<f8")
        iq[0::2] = self.samples.real
        iq[1::2] = self.samples.imag
        Path(path).write_bytes(iq.tobytes())

    @classmethod
    def load(cls, path, sample_rate: float) -> "BasebandSignal":
        iq = np.frombuffer(Path(path).read_bytes(), dtype="<f8")
        return cls(iq[0::2] + 1j * iq[1::2], sample_rate)


def qpsk_map(bits) -> np.ndarray | complex:
    """Gray-coded unit-energy QPSK.

    First bit selects the sign of I, second bit the sign of Q (0 -> +).
    Accepts a single pair or an array whose last axis has length 2.
    """
    b = np.asarray(bits, dtype=np.int64)
    if b.shape[-1] != 2 or np.any((b != 0) & (b != 1)):
        raise ValueError("expected bit pairs of 0/1 values")
    sym = _QPSK[b[..., 0] + 2 * b[..., 1]]
    return complex(sym) if sym.ndim == 0 else sym


def random_bits(cfg: OfdmConfig, rng: np.random.Generator) -> np.ndarray:
    return rng.integers(0, 2, size=cfg.bits_per_burst, dtype=np.int8)


def generate_ofdm(cfg: OfdmConfig, bits=None, rng: np.random.Generator | int | None = None) -> BasebandSignal:
    """Build a unit-power CP-OFDM burst.

    Either pass ``bits`` (length ``cfg.bits_per_burst``) or a random source;
    an integer is taken as a seed.
    """
    if bits is None:
        bits = random_bits(cfg, np.random.default_rng(rng))
    bits = np.asarray(bits)
    if bits.size != cfg.bits_per_burst:
        raise ValueError(f"expected {cfg.bits_per_burst} bits, got {bits.size}")

    syms = qpsk_map(bits.reshape(cfg.symbols_per_burst, cfg.active_subcarriers, 2))
    grid = np.zeros((cfg.symbols_per_burst, cfg.fft_size), dtype=complex)
    grid[:, cfg.active_bins()] = syms
    body = np.fft.ifft(grid, axis=1)
    burst = np.concatenate([body[:, cfg.fft_size - cfg.cyclic_prefix:], body], axis=1).ravel()
    burst /= np.sqrt(np.mean(np.abs(burst) ** 2))
    return BasebandSignal(burst, cfg.sample_rate)
