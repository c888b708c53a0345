"""A small spectral front end: resample, equalize, filter, gate, pool.

An image is resampled onto a polar grid, ring statistics are equalized,
and the angular spectrum passes through a diagonal dense layer and a
band-limited gate before low-frequency pooling.  Rotating the image by 90
degrees only shifts the polar samples, so the layer output commutes with
that rotation.
"""

import numpy as np

from polaralg import Rotor, apply_rotor, fft_angular, ifft_angular
from polaralg.operators import (
    PolarGridSpec,
    SpectralDense,
    build_gate_kernel,
    cartesian_to_polar,
    energy_ratio,
    gate_apply,
    low_frequency_mask,
    pool_low_quadrants,
    radial_equalize,
    spectral_rms_norm,
)

n = 28
yy, xx = np.mgrid[0:n, 0:n]
img = np.exp(-((xx - 17.0) ** 2 + (yy - 11.0) ** 2) / 18.0)

R, T = 10, 16
spec = PolarGridSpec.centered(img.shape, R, T)
polar = radial_equalize(cartesian_to_polar(img, spec))
z = fft_angular(polar)

rng = np.random.default_rng(2)
layer = SpectralDense(rng.standard_normal((R, T)), real_constrained=True)
gate = build_gate_kernel(band=3, alpha_w=0.5, n_theta=T, strength=0.3)
mask = low_frequency_mask((T,), 3)

y = spectral_rms_norm(layer(z))
g = gate_apply(gate, y, mask)
print(f"energy ratio through the gate: {energy_ratio(y, g, mask):.4f}")
features = pool_low_quadrants(g, mask)
print("pooled features:", features.shape, "norm", round(float(np.linalg.norm(features)), 6))

# 90 degree source rotation == rotor by T/4 on the polar grid
turned = cartesian_to_polar(np.rot90(img, k=-1), spec)
base = cartesian_to_polar(img, spec)
out_turned = ifft_angular(layer(fft_angular(turned)))
out_shifted = apply_rotor(Rotor(T // 4), ifft_angular(layer(fft_angular(base))))
print("max equivariance error:", float(np.max(np.abs(out_turned.values - out_shifted.values))))
