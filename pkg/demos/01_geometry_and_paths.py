"""
Scenario geometry and propagation paths
=======================================

Place a transmitter, a 16-element ULA and an RIS, then look at the LOS path
and the per-element RIS paths.
"""

# %%
import numpy as np

from gpris.channel import los_path, ris_paths
from gpris.geometry import RisConfig, azimuth_of, ris_element_positions, wavelength
from gpris.harness.config import preset_config
from gpris.harness.scenarios import scenario_geometry

lam = wavelength(26e9)
print(f"wavelength at 26 GHz: {lam * 1e3:.3f} mm")

# %%
# A 5000 x 100 surface at lambda/5 pitch is about 11.5 m wide.
ris = RisConfig(5000, 100, lam / 5, lam / 5)
pts = ris_element_positions(ris)
print(pts.shape, f"width {ris.width:.3f} m, mean y {pts[:, 1].mean():.2e}")

# %%
# The equilateral geometry: Tx and RIS centre at +-30 deg from the ULA boresight.
cfg = preset_config("gpris-sweep")
geom = scenario_geometry(cfg, "equilateral")
print("Tx azimuth:", round(azimuth_of(geom.tx, geom.ula), 3))
print("RIS centre azimuth:", round(azimuth_of((0.0, 0.0, geom.ula.position.z), geom.ula), 3))

# %%
los = los_path(geom)
paths = ris_paths(geom)
print(f"LOS: A0 = {los.amplitude:.3e}, tau0 = {los.delay * 1e9:.2f} ns")
print(f"RIS: {len(paths)} paths, amplitude {paths.amplitude.min():.2e}..{paths.amplitude.max():.2e}")
print(f"excess delay over LOS: {(np.median(paths.delay) - los.delay) * 1e9:.0f} ns")
