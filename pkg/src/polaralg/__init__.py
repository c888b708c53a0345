"""Polar linear algebra: tensors over radial x cyclic-angular grids.

The polar product is circular convolution along the angular axes, computed
ring by ring; the angular DFT diagonalizes it.
"""

from .errors import (
    ConformabilityError,
    DomainError,
    EquivarianceError,
    NotSelfAdjointError,
    PartitionError,
    SingularSpectrumError,
)
from .tensor import (
    Domain,
    MulCounter,
    PolarTensor,
    Spectrum,
    add,
    hadamard,
    identity_kernel,
    inner_product,
    is_self_adjoint,
    norm,
    polar_adjoint,
    polar_product_naive,
    polar_transpose,
    scale,
    subtract,
    symmetric_sum,
    zeros,
)
from .spectral import (
    CirculantMatrix,
    Rotor,
    apply_rotor,
    chiara_reality_check,
    circulant_from_kernel,
    diagonalize_circulant,
    fft_angular,
    ifft_angular,
    inverse,
    is_invertible,
    polar_product,
    polar_product_fft,
    pseudo_inverse,
    recover_rotor_expansion,
    rotor_as_kernel,
    rotor_spectrum,
)

__version__ = "0.1.0"
