"""Brute-force reference implementations used as test oracles."""

import numpy as np

from gpris.channel import fractional_delay, path_gains, steering_vectors
from gpris.geometry import Position3D, RisConfig, ScenarioGeometry, UlaConfig, heading_towards, wavelength


def direct_synthesis(x, paths, phases, ula, carrier_frequency):
    """Per-element summation: every RIS path delayed and steered individually."""
    gains = path_gains(paths, phases)
    a = steering_vectors(paths.arrival_azimuth, ula.elements, ula.spacing_wavelengths(wavelength(carrier_frequency)))
    y = np.zeros((ula.elements, len(x)), complex)
    for k in range(len(paths)):
        y += np.outer(a[:, k] * gains[k], fractional_delay(x, paths.delay[k]).samples)
    return y


def small_scenario(tx_xy=(6.0, 4.0), ula_xy=(5.0, -4.0), q=10, p=10, fc=26e9):
    lam = wavelength(fc)
    ris = RisConfig(q, p, lam / 5, lam / 5)
    zc = ris.vertical_center
    ula_pos = (*ula_xy, zc)
    ula = UlaConfig(position=ula_pos, boresight_azimuth=heading_towards(ula_pos, (*tx_xy, zc)) + 40.0)
    return ScenarioGeometry(Position3D(*tx_xy, zc), ula, ris, fc)
