"""Scenario geometry: node positions, the RIS element lattice and ULA angles.

Coordinates are meters in a right-handed frame. The RIS lies in the
``x = 0`` plane facing ``+x``; azimuths are measured in the horizontal
(x-y) plane relative to the ULA boresight, positive clockwise when viewed
from above.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0


class GeometryError(ValueError):
    """Raised for unsupported or degenerate node placements."""


class Position3D(NamedTuple):
    x: float
    y: float
    z: float = 0.0


def _as_points(p) -> np.ndarray:
    arr = np.asarray(p, dtype=float)
    if arr.shape[-1] == 2:
        arr = np.concatenate([arr, np.zeros(arr.shape[:-1] + (1,))], axis=-1)
    return arr


@dataclass(frozen=True)
class RisConfig:
    """Rectangular RIS lattice of ``columns`` (Q, along y) by ``rows`` (P, along z).

    ``centering_mode`` selects between the literal lattice formula
    (``"verbatim"``) and a lattice centered on ``y = 0`` (``"centered"``).
    The z coordinates are identical in both modes.
    """

    columns: int
    rows: int
    spacing_y: float
    spacing_z: float
    centering_mode: str = "centered"

    def __post_init__(self):
        if self.columns < 1 or self.rows < 1:
            raise ValueError("RIS needs at least one column and one row")
        if not (self.spacing_y > 0 and self.spacing_z > 0):
            raise ValueError("RIS element spacing must be positive")
        if self.centering_mode not in ("verbatim", "centered"):
            raise ValueError(f"unknown centering_mode {self.centering_mode!r}")

    @property
    def n_elements(self) -> int:
        return self.columns * self.rows

    @property
    def width(self) -> float:
        return (self.columns - 1) * self.spacing_y

    @property
    def vertical_center(self) -> float:
        z = _lattice_z(self)
        return float(0.5 * (z[0] + z[-1]))


@dataclass(frozen=True)
class UlaConfig:
    """Uniform linear array.

    The array axis is perpendicular to the boresight in the horizontal plane;
    element ``n`` sits ``n * element_spacing`` from the reference element.
    """

    elements: int = 16
    element_spacing: float = 0.5 * SPEED_OF_LIGHT / 26e9
    position: Position3D = Position3D(0.0, 0.0, 0.0)
    boresight_azimuth: float = 90.0

    def __post_init__(self):
        if self.elements < 2:
            raise ValueError("a ULA needs at least two elements")
        if not self.element_spacing > 0:
            raise ValueError("element_spacing must be positive")
        object.__setattr__(self, "position", Position3D(*_as_points(self.position)))

    @property
    def boresight(self) -> np.ndarray:
        """Unit boresight vector in the horizontal plane.

        ``boresight_azimuth`` is a compass-free heading: degrees counter-clockwise
        from ``+x``.
        """
        a = math.radians(self.boresight_azimuth)
        return np.array([math.cos(a), math.sin(a), 0.0])

    def spacing_wavelengths(self, wavelength: float) -> float:
        return self.element_spacing / wavelength


@dataclass(frozen=True)
class ScenarioGeometry:
    tx: Position3D
    ula: UlaConfig
    ris: RisConfig
    carrier_frequency: float = 26e9
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.carrier_frequency > 0:
            raise ValueError("carrier frequency must be positive")
        object.__setattr__(self, "tx", Position3D(*_as_points(self.tx)))
        ris_center = np.array([0.0, _ris_center_y(self.ris), self.ris.vertical_center])
        nodes = [np.asarray(self.tx), np.asarray(self.ula.position), ris_center]
        for a in range(3):
            for b in range(a + 1, 3):
                if np.allclose(nodes[a], nodes[b]):
                    raise GeometryError("transmitter, ULA and RIS must be distinct")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_frequency


def wavelength(carrier_frequency: float) -> float:
    return SPEED_OF_LIGHT / carrier_frequency


def _lattice_z(cfg: RisConfig) -> np.ndarray:
    j = np.arange(1, cfg.rows + 1)
    return j * cfg.spacing_z - 0.5 * cfg.spacing_z * ((cfg.rows + 1) % 2)


def _lattice_y(cfg: RisConfig) -> np.ndarray:
    i = np.arange(1, cfg.columns + 1)
    if cfg.centering_mode == "verbatim":
        return i * cfg.spacing_y - 0.5 * cfg.spacing_y * ((cfg.columns + 1) % 2)
    return (i - (cfg.columns + 1) / 2) * cfg.spacing_y


def _ris_center_y(cfg: RisConfig) -> float:
    y = _lattice_y(cfg)
    return float(0.5 * (y[0] + y[-1]))


def ris_element_positions(cfg: RisConfig) -> np.ndarray:
    """Element coordinates as a ``(Q*P, 3)`` array, column index outermost.

    Row ``(i - 1) * P + (j - 1)`` holds element ``(i, j)`` with 1-based
    column ``i`` and row ``j``.
    """
    y = _lattice_y(cfg)
    z = _lattice_z(cfg)
    pts = np.empty((cfg.columns, cfg.rows, 3))
    pts[..., 0] = 0.0
    pts[..., 1] = y[:, None]
    pts[..., 2] = z[None, :]
    return pts.reshape(-1, 3)


def distance(a, b) -> np.ndarray | float:
    """Euclidean distance; broadcasts over leading axes of ``(..., 3)`` inputs."""
    d = np.linalg.norm(_as_points(a) - _as_points(b), axis=-1)
    return float(d) if np.ndim(d) == 0 else d


def azimuths(targets, ula: UlaConfig) -> np.ndarray:
    """Vectorised :func:`azimuth_of` for an array of points (degrees)."""
    t = _as_points(targets) - np.asarray(ula.position)
    bx, by, _ = ula.boresight
    tx, ty = t[..., 0], t[..., 1]
    along = bx * tx + by * ty
    across = by * tx - bx * ty
    if np.any((np.abs(tx) < 1e-12) & (np.abs(ty) < 1e-12)):
        raise GeometryError("target coincides with the ULA in the horizontal plane")
    if np.any(along < 0):
        raise GeometryError("target lies behind the ULA (front-facing array only)")
    return np.degrees(np.arctan2(across, along))


def azimuth_of(target, ula: UlaConfig) -> float:
    """Signed azimuth of ``target`` from the ULA boresight, in [-90, 90] degrees."""
    return float(azimuths(np.asarray(target, dtype=float)[None, :], ula)[0])


def heading_towards(src, dst) -> float:
    """Heading (degrees counter-clockwise from +x) of the horizontal ray src -> dst."""
    d = _as_points(dst) - _as_points(src)
    return math.degrees(math.atan2(d[1], d[0]))


def bisector_heading(src, a, b) -> float:
    """Heading of the bisector of the directions src -> a and src -> b."""
    u = _as_points(a)[:2] - _as_points(src)[:2]
    v = _as_points(b)[:2] - _as_points(src)[:2]
    w = u / np.linalg.norm(u) + v / np.linalg.norm(v)
    return math.degrees(math.atan2(w[1], w[0]))
