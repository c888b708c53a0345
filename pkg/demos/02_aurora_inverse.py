"""Inverting a kernel under the polar product.

A kernel is invertible exactly when none of its angular Fourier
coefficients vanishes; the inverse is the inverse DFT of the reciprocal
spectrum.  The regularized pseudo-inverse handles the singular case.
"""

import numpy as np

from polaralg import (
    PolarTensor,
    SingularSpectrumError,
    fft_angular,
    inverse,
    is_invertible,
    polar_product_naive,
    pseudo_inverse,
)

a = PolarTensor([[2, 1, 1, 1]])
print("spectrum of a:", fft_angular(a).values.real)
print("invertible:", is_invertible(a))
a_inv = inverse(a)
print("a^-1 =", a_inv.values.real.round(12))
print("a (x) a^-1 =", polar_product_naive(a, a_inv).values.real.round(12) + 0.0)

f = PolarTensor([[1, 0, 1, 0]])
print("\nspectrum of f:", fft_angular(f).values.real)
try:
    inverse(f)
except SingularSpectrumError as exc:
    print("inverse(f) fails:", exc)

p = pseudo_inverse(f, eps=1e-6)
print("pseudo-inverse spectrum:", fft_angular(p).values.real.round(9))

# small coefficients are damped: |spectrum| never exceeds 1 / (2 sqrt(eps))
rng = np.random.default_rng(0)
tiny = PolarTensor(1e-4 * rng.standard_normal((3, 16)))
peak = np.max(np.abs(fft_angular(pseudo_inverse(tiny, 1e-6)).values))
print(f"peak pseudo-inverse gain {peak:.1f} <= {1 / (2 * np.sqrt(1e-6)):.1f}")
