"""
RIS phase programming
=====================

Coherent phasing adds every element in phase with the LOS; a checkered surface
cancels itself; GPRIS keeps u coherent columns at each end.
"""

# %%
import numpy as np

from gpris.channel import bin_paths, los_path, path_gains, ris_paths
from gpris.harness.config import RisSettings, preset_config
from gpris.harness.scenarios import scenario_geometry
from gpris.ris_control import program_gpris, program_snr_max

cfg = preset_config("gpris-sweep", ris=RisSettings(columns=1000, rows=50))
geom = scenario_geometry(cfg, "boresight")
los = los_path(geom)
paths = ris_paths(geom)

# %%
full = program_snr_max(geom, paths.delay, los.delay)
print("coherent |sum g| / sum A:", abs(path_gains(paths, full.flat()).sum()) / paths.amplitude.sum())
check = program_gpris(geom, paths.delay, los.delay, 0)
print("checkered |sum g| / sum A:", abs(path_gains(paths, check.flat()).sum()) / paths.amplitude.sum())

# %%
# Aggregate RIS gain relative to LOS as the coherent ends grow.
for u in (0, 25, 50, 100, 200):
    taps = bin_paths(paths, program_gpris(geom, paths.delay, los.delay, u), 0.5e-9, geom.carrier_frequency)
    print(f"u = {u:4d}: {len(taps):5d} taps, |RIS| / |LOS| = {abs(taps.total_gain) / los.amplitude:.3f}")

# %%
full.to_csv("/tmp/gpris_phase_map.csv")
print("phase map written to /tmp/gpris_phase_map.csv")
