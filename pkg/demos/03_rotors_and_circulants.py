"""Rotors, circulant matrices and recovering equivariant operators.

Rotors are cyclic angular shifts.  Every shift-equivariant linear map on a
ring is a circulant matrix, i.e. a combination of rotors, and the DFT
diagonalizes all of them at once.
"""

import numpy as np

from polaralg import (
    EquivarianceError,
    PolarTensor,
    Rotor,
    apply_rotor,
    chiara_reality_check,
    circulant_from_kernel,
    diagonalize_circulant,
    fft_angular,
    polar_product_fft,
    recover_rotor_expansion,
    rotor_as_kernel,
    rotor_spectrum,
)
from polaralg.spectral import rotor_matrix

print("R_1 on length-4 vectors:\n", rotor_matrix(1, 4).astype(int))
x = PolarTensor([[10, 11, 12, 13]])
print("R_1 x =", apply_rotor(Rotor(1), x).values.real)

# three views of the same rotor: a shift, a delta kernel, unit phases
rng = np.random.default_rng(1)
a = PolarTensor(rng.standard_normal((2, 8)))
r = Rotor(3)
via_kernel = polar_product_fft(rotor_as_kernel(r, a.shape), a)
via_phase = fft_angular(a).values * rotor_spectrum(r, a.shape).values
print("kernel path matches shift:", np.allclose(via_kernel.values, apply_rotor(r, a).values))
print("phase path matches shift:", np.allclose(via_phase, fft_angular(apply_rotor(r, a)).values))

c = circulant_from_kernel([2, 1, 1, 1])
print("\ncirculant of [2,1,1,1]:\n", c.entries.real)
print("eigenvalues (its DFT):", diagonalize_circulant([2, 1, 1, 1]).real)

# an even kernel has a real spectrum
print("even kernel [7,2,9,2] has real spectrum:", chiara_reality_check(PolarTensor([[7, 2, 9, 2]])))

coeffs = recover_rotor_expansion(lambda v: c @ v, 4)
print("recovered rotor coefficients:", coeffs.real)
try:
    recover_rotor_expansion(lambda v: np.roll(v[::-1], 1), 5)
except EquivarianceError as exc:
    print("reflection is not equivariant:", exc)
