"""
CP-OFDM burst
=============

One 512-point OFDM symbol with a 36-sample cyclic prefix, 300 QPSK tones.
"""

# %%
import numpy as np

from gpris.waveform import OfdmConfig, generate_ofdm, qpsk_map

cfg = OfdmConfig()
x = generate_ofdm(cfg, rng=0)
print(len(x), "samples,", f"{x.duration * 1e6:.1f} us, power {x.power:.12f}")

# %%
# The cyclic prefix repeats the tail; the body occupies exactly the active bins.
print("CP matches tail:", np.allclose(x.samples[:36], x.samples[-36:]))
spec = np.abs(np.fft.fft(x.samples[36:]))
print("occupied bins:", int(np.sum(spec > 1e-9)), "| DC empty:", spec[0] < 1e-9)

# %%
print("Gray QPSK:", qpsk_map(np.array([[0, 0], [1, 0], [0, 1], [1, 1]])).round(3))

# %%
# Independent bursts are nearly orthogonal: |rho|^2 averages about 1/300.
rng = np.random.default_rng(1)
rho = [abs(np.vdot(generate_ofdm(cfg, rng=rng).samples, generate_ofdm(cfg, rng=rng).samples)) / 548 for _ in range(500)]
print(f"mean |rho| {np.mean(rho):.3f}, share <= 0.1: {np.mean(np.array(rho) <= 0.1):.2f}")
