"""Polar tensors and their pointwise and convolutional algebra.

A polar tensor is a complex array whose axis 0 indexes radius and whose
``angular_axes`` are cyclic.  Any remaining axes (for example a channel axis)
are carried along as independent batch dimensions.  Radii never interact:
every operation here acts ring by ring.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ConformabilityError, DomainError

__all__ = [
    "Domain",
    "PolarTensor",
    "Spectrum",
    "MulCounter",
    "zeros",
    "identity_kernel",
    "add",
    "subtract",
    "scale",
    "hadamard",
    "polar_product_naive",
    "polar_transpose",
    "polar_adjoint",
    "is_self_adjoint",
    "symmetric_sum",
    "inner_product",
    "norm",
]


class Domain(enum.Enum):
    SPATIAL = "spatial"
    SPECTRAL = "spectral"


class PolarTensor:
    """Immutable complex array over a radial axis and cyclic angular axes.

    Parameters
    ----------
    values : array_like
        Grid values; axis 0 is radial.  Real input is promoted to complex.
    angular_axes : sequence of int, optional
        Cyclic axes, each ``>= 1``.  Defaults to every axis after the first.
    domain : Domain or str, optional
        Basis of ``values``; ``"spatial"`` unless stated otherwise.

    Examples
    --------
    >>> a = PolarTensor([[2, 1, 0, 1]])
    >>> a.shape, a.angular_axes
    ((1, 4), (1,))
    """

    __slots__ = ("_values", "angular_axes", "domain")

    def __init__(self, values, angular_axes=None, domain=Domain.SPATIAL):
        arr = np.array(values, dtype=np.complex128)
        if arr.ndim < 2:
            raise ValueError(
                f"a polar tensor needs a radial axis and at least one angular axis, got ndim={arr.ndim}"
            )
        if 0 in arr.shape:
            raise ValueError(f"all axis lengths must be positive, got shape {arr.shape}")
        if angular_axes is None:
            angular_axes = range(1, arr.ndim)
        axes = tuple(int(ax) for ax in angular_axes)
        if not axes:
            raise ValueError("at least one angular axis is required")
        if len(set(axes)) != len(axes):
            raise ValueError(f"duplicate angular axes {axes}")
        for ax in axes:
            if not 1 <= ax < arr.ndim:
                raise ValueError(
                    f"angular axis {ax} out of range for ndim={arr.ndim}; axis 0 is radial"
                )
        arr.setflags(write=False)
        self._values = arr
        self.angular_axes = axes
        self.domain = Domain(domain)

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def shape(self) -> tuple:
        return self._values.shape

    @property
    def n_radii(self) -> int:
        return self._values.shape[0]

    @property
    def angular_shape(self) -> tuple:
        return tuple(self._values.shape[ax] for ax in self.angular_axes)

    @property
    def size(self) -> int:
        return self._values.size

    @property
    def is_real(self) -> bool:
        return not np.any(self._values.imag)

    def with_values(self, values, domain=None) -> "PolarTensor":
        """New tensor with this tensor's axes layout and the given values."""
        return PolarTensor(values, self.angular_axes, self.domain if domain is None else domain)

    def __repr__(self):
        return (
            f"PolarTensor(shape={self.shape}, angular_axes={self.angular_axes}, "
            f"domain={self.domain.value},\n{self._values})"
        )

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return subtract(self, other)

    def __neg__(self):
        return scale(-1, self)

    def __mul__(self, lam):
        if isinstance(lam, PolarTensor):
            return NotImplemented
        return scale(lam, self)

    __rmul__ = __mul__


# A Spectrum is a PolarTensor whose domain is SPECTRAL; the alias documents intent.
Spectrum = PolarTensor


@dataclass
class MulCounter:
    """Accumulates complex multiplications reported by instrumented kernels."""

    multiplies: int = 0

    def add(self, n: int) -> None:
        self.multiplies += int(n)


def check_conformable(a: PolarTensor, b: PolarTensor) -> None:
    if a.angular_axes != b.angular_axes:
        raise ConformabilityError(
            f"angular axes differ: {a.angular_axes} vs {b.angular_axes}"
        )
    if a.shape != b.shape:
        for ax, (na, nb) in enumerate(zip(a.shape, b.shape)):
            if na != nb:
                kind = "radial" if ax == 0 else ("angular" if ax in a.angular_axes else "batch")
                raise ConformabilityError(
                    f"size mismatch on {kind} axis {ax}: {na} vs {nb}"
                )
        raise ConformabilityError(f"rank mismatch: {a.shape} vs {b.shape}")
    if a.domain is not b.domain:
        raise ConformabilityError(
            f"domain mismatch: {a.domain.value} vs {b.domain.value}"
        )


def require_domain(a: PolarTensor, domain: Domain, op: str) -> None:
    if a.domain is not domain:
        raise DomainError(f"{op} expects a {domain.value} tensor, got {a.domain.value}")


def zeros(shape, angular_axes=None, domain=Domain.SPATIAL) -> PolarTensor:
    return PolarTensor(np.zeros(shape), angular_axes, domain)


def identity_kernel(shape, angular_axes=None) -> PolarTensor:
    """Delta kernel: 1 at angular index 0 on every radius (and batch slot), 0 elsewhere."""
    data = np.zeros(shape, dtype=np.complex128)
    axes = tuple(range(1, len(shape))) if angular_axes is None else tuple(angular_axes)
    idx = [slice(None)] * len(shape)
    for ax in axes:
        idx[ax] = 0
    data[tuple(idx)] = 1.0
    return PolarTensor(data, axes)


def add(a: PolarTensor, b: PolarTensor) -> PolarTensor:
    check_conformable(a, b)
    return a.with_values(a.values + b.values)


def subtract(a: PolarTensor, b: PolarTensor) -> PolarTensor:
    check_conformable(a, b)
    return a.with_values(a.values - b.values)


def scale(lam: complex, a: PolarTensor) -> PolarTensor:
    return a.with_values(complex(lam) * a.values)


def hadamard(a: PolarTensor, b: PolarTensor) -> PolarTensor:
    check_conformable(a, b)
    return a.with_values(a.values * b.values)


def _angular_rows(a: PolarTensor) -> tuple[np.ndarray, tuple]:
    """View ``a`` as (rows, flattened angular block); returns rows and the moved shape."""
    nd = a.values.ndim
    if a.angular_axes == (nd - 1,):
        # common layout: already row-major with the angular axis last
        return a.values.reshape(-1, a.shape[-1]), a.shape
    batch_axes = [ax for ax in range(nd) if ax not in a.angular_axes]
    moved = np.transpose(a.values, batch_axes + list(a.angular_axes))
    n_batch = int(np.prod([a.shape[ax] for ax in batch_axes]))
    return np.ascontiguousarray(moved.reshape(n_batch, -1)), moved.shape


def _restore(rows: np.ndarray, moved_shape: tuple, like: PolarTensor) -> np.ndarray:
    nd = like.values.ndim
    if like.angular_axes == (nd - 1,):
        return rows.reshape(moved_shape)
    batch_axes = [ax for ax in range(nd) if ax not in like.angular_axes]
    order = batch_axes + list(like.angular_axes)
    return np.transpose(rows.reshape(moved_shape), np.argsort(order))


def polar_product_naive(a: PolarTensor, b: PolarTensor, counter: MulCounter | None = None) -> PolarTensor:
    """Polar product by the direct convolution sum.

    ``(A (x) B)[r, t] = sum_k A[r, k] B[r, (t - k) mod N]``, taken jointly over
    all angular axes.  Costs ``N_r * P**2`` multiplications where ``P`` is the
    number of angular grid points; this is the reference the fast path is
    checked against.

    Examples
    --------
    >>> polar_product_naive(PolarTensor([[2, 1, 0, 1]]), PolarTensor([[1, 0, 1, 0]])).values.real
    array([[2., 2., 2., 2.]])
    """
    check_conformable(a, b)
    require_domain(a, Domain.SPATIAL, "polar_product_naive")
    ra, moved = _angular_rows(a)
    rb, _ = _angular_rows(b)
    if len(a.angular_axes) == 1:
        out, count = _kernels.circular_convolve_rows(ra, rb)
    else:
        sizes = np.array(a.angular_shape, dtype=np.int64)
        out, count = _kernels.circular_convolve_torus(ra, rb, sizes)
    if counter is not None:
        counter.add(count)
    return a.with_values(_restore(out, moved, a))


def _reflect(values: np.ndarray, axes) -> np.ndarray:
    out = values
    for ax in axes:
        out = np.roll(np.flip(out, axis=ax), 1, axis=ax)
    return out


def polar_transpose(a: PolarTensor) -> PolarTensor:
    """Angular reflection ``theta -> -theta mod N`` on every angular axis."""
    require_domain(a, Domain.SPATIAL, "polar_transpose")
    return a.with_values(_reflect(a.values, a.angular_axes))


def polar_adjoint(a: PolarTensor) -> PolarTensor:
    """Angular reflection composed with complex conjugation."""
    require_domain(a, Domain.SPATIAL, "polar_adjoint")
    return a.with_values(np.conj(_reflect(a.values, a.angular_axes)))


def is_self_adjoint(a: PolarTensor, tol: float = 1e-12) -> bool:
    if tol < 0:
        raise ValueError("tol must be non-negative")
    return max_adjoint_defect(a) <= tol


def max_adjoint_defect(a: PolarTensor) -> float:
    """``max |a - a^dagger|``, the quantity ``is_self_adjoint`` thresholds."""
    return float(np.max(np.abs(a.values - polar_adjoint(a).values)))


def symmetric_sum(a: PolarTensor) -> PolarTensor:
    """``a + a^T``; self-adjoint for every real ``a``."""
    if not a.is_real:
        raise ValueError("symmetric_sum expects a real-valued tensor")
    return add(a, polar_transpose(a))


def inner_product(a: PolarTensor, b: PolarTensor) -> complex:
    """Frobenius inner product, conjugate-linear in the first argument."""
    check_conformable(a, b)
    return complex(np.vdot(a.values, b.values))


def norm(a: PolarTensor) -> float:
    return float(np.linalg.norm(a.values.ravel()))
