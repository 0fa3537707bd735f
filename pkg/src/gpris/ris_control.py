"""RIS phase programming: coherent (SNR-maximising) and GPRIS split surfaces."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

TWO_PI = 2 * np.pi


@dataclass(frozen=True)
class PhaseMap:
    """Per-element phases in [0, 2*pi), shape ``(Q, P)`` indexed ``[i-1, j-1]``."""

    phases: np.ndarray

    def __post_init__(self):
        ph = np.asarray(self.phases, dtype=float)
        if ph.ndim != 2:
            raise ValueError("phase map must be 2-D (columns x rows)")
        if np.any(ph < 0) or np.any(ph >= TWO_PI):
            raise ValueError("phases must lie in [0, 2*pi)")
        ph.setflags(write=False)
        object.__setattr__(self, "phases", ph)

    @property
    def shape(self):
        return self.phases.shape

    def flat(self) -> np.ndarray:
        """Phases in the element ordering of ``ris_element_positions``."""
        return self.phases.reshape(-1)

    def to_csv(self, path) -> None:
        q, p = self.phases.shape
        i, j = np.meshgrid(np.arange(1, q + 1), np.arange(1, p + 1), indexing="ij")
        table = np.column_stack([i.ravel(), j.ravel(), self.phases.ravel()])
        np.savetxt(Path(path), table, delimiter=",", header="i,j,phi_rad",
                   comments="", fmt=["%d", "%d", "%.12g"])


def wrap_phase(phi) -> np.ndarray:
    out = np.mod(phi, TWO_PI)
    # mod can round up to exactly 2*pi for tiny negative inputs
    return np.where(out >= TWO_PI, 0.0, out)


def _snr_max(carrier_frequency, delays, los_delay) -> np.ndarray:
    # cycles are reduced before scaling by 2*pi to keep precision at ~1e3 cycles
    cycles = carrier_frequency * (los_delay - np.asarray(delays, dtype=float))
    return wrap_phase(TWO_PI * (cycles - np.floor(cycles)))


def program_snr_max(geom, delays, los_delay: float) -> PhaseMap:
    """Align every RIS path's carrier phase with the LOS path.

    ``delays`` are per-element RIS path delays, either flat in element order
    or shaped ``(Q, P)``.
    """
    q, p = geom.ris.columns, geom.ris.rows
    phi = _snr_max(geom.carrier_frequency, delays, los_delay)
    return PhaseMap(phi.reshape(q, p))


def checkered(columns: int, rows: int) -> np.ndarray:
    i, j = np.meshgrid(np.arange(1, columns + 1), np.arange(1, rows + 1), indexing="ij")
    return np.pi * ((i + j) % 2)


def gpris_partition(columns: int, used: int) -> np.ndarray:
    """Column labels: 0 left end, 1 checkered center, 2 right end."""
    if used < 0 or 2 * used > columns:
        raise ValueError(f"utilization {used} per end does not fit {columns} columns")
    labels = np.ones(columns, dtype=np.int8)
    labels[:used] = 0
    labels[columns - used:] = 2
    return labels


def program_gpris(geom, delays, los_delay: float, used: int) -> PhaseMap:
    """Coherent phasing on ``used`` columns at each end, checkerboard in between."""
    q, p = geom.ris.columns, geom.ris.rows
    labels = gpris_partition(q, used)
    phi = checkered(q, p)
    ends = labels != 1
    if ends.any():
        coherent = _snr_max(geom.carrier_frequency, np.asarray(delays).reshape(q, p), los_delay)
        phi[ends] = coherent[ends]
    return PhaseMap(phi)
