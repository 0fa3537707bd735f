"""
GPRIS utilization sweep
=======================

Reduced version of the gpris-sweep preset: strongest-peak error vs LOS as the
coherent end columns grow, for both geometries, plus rho at u = 300.
"""

# %%
from gpris.harness.config import preset_config
from gpris.harness.experiments import run_preset

cfg = preset_config("gpris-sweep", trials=10, sweep_values=(0.0, 200.0, 400.0, 600.0, 800.0))
table = run_preset(cfg, out_dir="/tmp/gpris_demo")["gpris_sweep"]
for row in table.select():
    print(f"{row['variant']:12s} u = {row['sweep_value']:5.0f}  rms {row['rms_error_deg']:6.2f} deg  "
          f"rho {row['rho']:.3f}")

# %%
spec = run_preset(preset_config("spectrum"))["spectrum"]
for row in spec.select():
    print(row)
