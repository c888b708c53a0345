"""Angular Fourier machinery for polar tensors.

Conventions: the forward DFT along each angular axis is unnormalized,
``A_hat[r, m] = sum_t A[r, t] exp(-2j*pi*m*t/N)``, and the inverse carries the
``1/N`` factor.  Multi-axis transforms are separable products of 1-D DFTs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _kernels
from .errors import EquivarianceError, NotSelfAdjointError, SingularSpectrumError
from .tensor import (
    Domain,
    MulCounter,
    PolarTensor,
    _angular_rows,
    _restore,
    check_conformable,
    is_self_adjoint,
    require_domain,
)

__all__ = [
    "fft_angular",
    "ifft_angular",
    "polar_product_fft",
    "polar_product",
    "min_spectral_magnitude",
    "is_invertible",
    "inverse",
    "pseudo_inverse",
    "Rotor",
    "apply_rotor",
    "rotor_spectrum",
    "rotor_as_kernel",
    "rotor_matrix",
    "CirculantMatrix",
    "circulant_from_kernel",
    "diagonalize_circulant",
    "circulant_diagonalization_residuals",
    "max_spectral_imag",
    "chiara_reality_check",
    "recover_rotor_expansion",
]


def _dft_axis(values: np.ndarray, axis: int, inverse: bool, counter: MulCounter | None) -> np.ndarray:
    moved = np.moveaxis(values, axis, -1)
    rows = np.ascontiguousarray(moved.reshape(-1, moved.shape[-1]))
    out, count = _kernels.dft_rows(rows, inverse)
    if counter is not None:
        counter.add(count)
    return np.moveaxis(out.reshape(moved.shape), -1, axis)


def fft_angular(a: PolarTensor, counter: MulCounter | None = None) -> PolarTensor:
    """Forward DFT over every angular axis; the radial axis is untouched.

    Examples
    --------
    >>> fft_angular(PolarTensor([[2, 1, 1, 1]])).values.real
    array([[5., 1., 1., 1.]])
    """
    require_domain(a, Domain.SPATIAL, "fft_angular")
    out = a.values
    for ax in a.angular_axes:
        out = _dft_axis(out, ax, False, counter)
    return a.with_values(out, Domain.SPECTRAL)


def ifft_angular(s: PolarTensor, counter: MulCounter | None = None) -> PolarTensor:
    """Inverse DFT over every angular axis, normalized by ``1/N`` per axis.

    Imaginary round-off is kept, not truncated.
    """
    require_domain(s, Domain.SPECTRAL, "ifft_angular")
    out = s.values
    for ax in s.angular_axes:
        out = _dft_axis(out, ax, True, counter)
    return s.with_values(out, Domain.SPATIAL)


def polar_product_fft(a: PolarTensor, b: PolarTensor, counter: MulCounter | None = None) -> PolarTensor:
    """Polar product through the convolution theorem, ``O(N_r N log N)``."""
    check_conformable(a, b)
    require_domain(a, Domain.SPATIAL, "polar_product_fft")
    if len(a.angular_axes) == 1:
        ra, moved = _angular_rows(a)
        rb, _ = _angular_rows(b)
        out, count = _kernels.convolve_fft_rows(ra, rb)
        if counter is not None:
            counter.add(count)
        return a.with_values(_restore(out, moved, a))
    fa = fft_angular(a, counter)
    fb = fft_angular(b, counter)
    if counter is not None:
        counter.add(fa.size)
    return ifft_angular(fa.with_values(fa.values * fb.values), counter)


polar_product = polar_product_fft


def min_spectral_magnitude(a: PolarTensor) -> tuple[float, tuple]:
    """Smallest ``|A_hat[r, m]|`` and its index (first in row-major order on ties)."""
    mags = np.abs(fft_angular(a).values)
    flat = int(np.argmin(mags))
    return float(mags.flat[flat]), tuple(int(i) for i in np.unravel_index(flat, mags.shape))


def is_invertible(a: PolarTensor, eps: float = 1e-12) -> bool:
    """True iff no angular Fourier coefficient has magnitude ``<= eps``."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    return bool(np.all(np.abs(fft_angular(a).values) > eps))


def inverse(a: PolarTensor, eps: float = 1e-12) -> PolarTensor:
    """Exact inverse under the polar product, ``ifft(1 / A_hat)``.

    Raises
    ------
    SingularSpectrumError
        If some ``|A_hat[r, m]| <= eps``; the first such index is reported.
    """
    spec = fft_angular(a)
    mags = np.abs(spec.values)
    bad = np.argwhere(mags <= eps)
    if bad.size:
        idx = tuple(bad[0])
        raise SingularSpectrumError(idx, mags[idx], eps)
    return ifft_angular(spec.with_values(1.0 / spec.values))


def pseudo_inverse(a: PolarTensor, eps: float = 1e-6) -> PolarTensor:
    """Regularized inverse with spectrum ``conj(A_hat) / (|A_hat|**2 + eps)``.

    Defined for every input; vanishing modes map to zero and small ones are
    damped, with every spectral entry bounded by ``1 / (2 sqrt(eps))``.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    spec = fft_angular(a)
    s = spec.values
    return ifft_angular(spec.with_values(np.conj(s) / (np.abs(s) ** 2 + eps)))


@dataclass(frozen=True)
class Rotor:
    """Cyclic angular shift ``(R_k A)[r, t] = A[r, (t - k) mod N]``, one shift per angular axis."""

    shifts: tuple

    def __init__(self, shifts):
        if np.isscalar(shifts):
            shifts = (shifts,)
        object.__setattr__(self, "shifts", tuple(int(k) for k in shifts))

    def reduced(self, sizes) -> "Rotor":
        if len(sizes) != len(self.shifts):
            raise ValueError(
                f"rotor has {len(self.shifts)} shifts but tensor has {len(sizes)} angular axes"
            )
        return Rotor(tuple(k % n for k, n in zip(self.shifts, sizes)))

    def compose(self, other: "Rotor") -> "Rotor":
        """``self`` after ``other``; shifts add."""
        if len(other.shifts) != len(self.shifts):
            raise ValueError("rotors act on different numbers of angular axes")
        return Rotor(tuple(k + j for k, j in zip(self.shifts, other.shifts)))

    def inverse(self) -> "Rotor":
        return Rotor(tuple(-k for k in self.shifts))


def apply_rotor(rotor: Rotor, a: PolarTensor) -> PolarTensor:
    require_domain(a, Domain.SPATIAL, "apply_rotor")
    r = rotor.reduced(a.angular_shape)
    return a.with_values(np.roll(a.values, r.shifts, axis=a.angular_axes))


def rotor_spectrum(rotor: Rotor, shape, angular_axes=None) -> PolarTensor:
    """Diagonal phases ``exp(-2j*pi * sum_j m_j k_j / N_j)`` realizing the rotor spectrally."""
    shape = tuple(shape)
    axes = tuple(range(1, len(shape))) if angular_axes is None else tuple(angular_axes)
    sizes = [shape[ax] for ax in axes]
    r = rotor.reduced(sizes)
    phase = np.zeros(shape)
    for ax, k, n in zip(axes, r.shifts, sizes):
        view = [1] * len(shape)
        view[ax] = n
        phase = phase + (np.arange(n) * k % n / n).reshape(view)
    return PolarTensor(np.exp(-2j * np.pi * phase), axes, Domain.SPECTRAL)


def rotor_as_kernel(rotor: Rotor, shape, angular_axes=None) -> PolarTensor:
    """Delta kernel at the shift index; convolving with it applies the rotor."""
    shape = tuple(shape)
    axes = tuple(range(1, len(shape))) if angular_axes is None else tuple(angular_axes)
    r = rotor.reduced([shape[ax] for ax in axes])
    data = np.zeros(shape)
    idx = [slice(None)] * len(shape)
    for ax, k in zip(axes, r.shifts):
        idx[ax] = k
    data[tuple(idx)] = 1.0
    return PolarTensor(data, axes)


def rotor_matrix(k: int, n: int) -> np.ndarray:
    """Permutation matrix of the single-axis rotor ``R_k`` on length-``n`` vectors."""
    return np.roll(np.eye(n), k % n, axis=0)


@dataclass(frozen=True)
class CirculantMatrix:
    """``C[i, j] = kernel[(i - j) mod n]``."""

    kernel: np.ndarray

    @property
    def n(self) -> int:
        return self.kernel.shape[0]

    @property
    def entries(self) -> np.ndarray:
        i = np.arange(self.n)
        return self.kernel[(i[:, None] - i[None, :]) % self.n]

    def __matmul__(self, x):
        return self.entries @ np.asarray(x)


def circulant_from_kernel(a) -> CirculantMatrix:
    kernel = np.array(a, dtype=np.complex128).ravel()
    if kernel.size < 1:
        raise ValueError("kernel must be non-empty")
    kernel.setflags(write=False)
    return CirculantMatrix(kernel)


def diagonalize_circulant(a) -> np.ndarray:
    """Eigenvalues of the circulant generated by ``a``: its DFT.

    The eigenvector for eigenvalue ``m`` is the Fourier mode
    ``v_m[t] = exp(2j*pi*m*t/n)``.
    """
    kernel = np.array(a, dtype=np.complex128).reshape(1, -1)
    out, _ = _kernels.dft_rows(kernel, False)
    return out[0]


def circulant_diagonalization_residuals(a) -> tuple[float, float]:
    """Max errors of ``F^-1 diag(a_hat) F == C_a`` and of ``C_a v_m == a_hat[m] v_m``."""
    c = circulant_from_kernel(a).entries
    n = c.shape[0]
    lam = diagonalize_circulant(a)
    t = np.arange(n)
    f = np.exp(-2j * np.pi * np.outer(t, t) / n)
    f_inv = np.conj(f) / n
    recon = f_inv @ np.diag(lam) @ f
    modes = np.conj(f)  # column m is v_m
    eig_res = np.max(np.abs(c @ modes - modes * lam[None, :]))
    return float(np.max(np.abs(recon - c))), float(eig_res)


def max_spectral_imag(a: PolarTensor) -> tuple[float, float]:
    """``(max |Im A_hat|, max |A_hat|)``."""
    spec = fft_angular(a).values
    return float(np.max(np.abs(spec.imag))), float(np.max(np.abs(spec)))


def chiara_reality_check(a: PolarTensor, tol: float = 1e-12) -> bool:
    """Whether a real self-adjoint kernel has a real angular spectrum.

    The imaginary parts are compared against ``tol * max |A_hat|``.

    Raises
    ------
    NotSelfAdjointError
        If ``a`` is not self-adjoint within ``tol``.
    """
    if not a.is_real:
        raise ValueError("chiara_reality_check expects a real-valued tensor")
    if not is_self_adjoint(a, tol):
        raise NotSelfAdjointError("kernel is not self-adjoint (not even in the angle)")
    imag, peak = max_spectral_imag(a)
    return imag <= tol * peak


def recover_rotor_expansion(
    op: Callable[[np.ndarray], np.ndarray],
    n: int,
    probes: int = 8,
    tol: float = 1e-9,
    seed: int | None = 0,
) -> np.ndarray:
    """Coefficients ``c`` with ``op == sum_k c[k] R_k`` for a shift-equivariant linear map.

    ``c`` is read off as the response to the delta vector, then ``op`` is
    checked against the circular convolution ``c (x) x`` on ``probes`` random
    complex vectors.

    Raises
    ------
    EquivarianceError
        If any probe's relative residual exceeds ``tol``.
    """
    delta = np.zeros(n, dtype=np.complex128)
    delta[0] = 1.0
    c = np.asarray(op(delta), dtype=np.complex128).reshape(n)
    rng = np.random.default_rng(seed)
    kernel = PolarTensor(c[None, :])
    worst = 0.0
    for _ in range(probes):
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        got = np.asarray(op(x), dtype=np.complex128).reshape(n)
        want = polar_product_fft(kernel, PolarTensor(x[None, :])).values[0]
        scale = max(np.max(np.abs(got)), np.max(np.abs(want)), np.finfo(float).tiny)
        worst = max(worst, float(np.max(np.abs(got - want)) / scale))
    if worst > tol:
        raise EquivarianceError(worst, tol)
    return c
