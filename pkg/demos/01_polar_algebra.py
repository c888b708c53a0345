"""Polar tensors, the polar product and its algebra.

A polar tensor stores values on rings (axis 0) of cyclic angular samples.
The polar product convolves each ring circularly, so it is commutative,
associative and has the delta kernel as identity.
"""

import numpy as np

from polaralg import (
    PolarTensor,
    identity_kernel,
    inner_product,
    norm,
    polar_adjoint,
    polar_product_fft,
    polar_product_naive,
    polar_transpose,
    symmetric_sum,
)

a = PolarTensor([[2, 1, 0], [3, 2, 1]])
b = PolarTensor([[1, 0, 1], [2, 1, 0]])

ab = polar_product_naive(a, b)
print("A (x) B, direct sum:\n", ab.values.real)
print("B (x) A, FFT path:\n", polar_product_fft(b, a).values.real.round(12))

e = identity_kernel(a.shape)
print("A (x) E == A:", np.allclose(polar_product_naive(a, e).values, a.values))

# transpose reflects the angle; the adjoint also conjugates
k = PolarTensor([[5, 4, 3, 2]])
print("transpose of [5,4,3,2]:", polar_transpose(k).values.real)
print("adjoint of [1j,0,0,0]:", polar_adjoint(PolarTensor([[1j, 0, 0, 0]])).values)
print("k + k^T is self-adjoint:", symmetric_sum(k).values.real)

x = PolarTensor([[1, 2], [3, 4]])
print("<x, x> =", inner_product(x, x).real, " ||x|| =", norm(x))
