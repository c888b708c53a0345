"""Exception types raised across the package."""


class ConformabilityError(ValueError):
    """Operands disagree in shape, angular axes or domain."""


class DomainError(ValueError):
    """An operation received a tensor in the wrong (spatial/spectral) basis."""


class SingularSpectrumError(ZeroDivisionError):
    """A tensor has a vanishing angular Fourier coefficient.

    ``index`` holds the first offending ``(r, m1, ..., md)`` in row-major
    order and ``magnitude`` its spectral magnitude.
    """

    def __init__(self, index, magnitude, eps):
        self.index = tuple(int(i) for i in index)
        self.magnitude = float(magnitude)
        self.eps = float(eps)
        super().__init__(
            f"singular at (r,m)={self.index}: |A_hat|={self.magnitude:.3e} <= eps={self.eps:.1e}"
        )


class NotSelfAdjointError(ValueError):
    """A check that presumes a self-adjoint kernel received one that is not."""


class EquivarianceError(ValueError):
    """A linear map failed the shift-commutation check; ``residual`` is the max error."""

    def __init__(self, residual, tol):
        self.residual = float(residual)
        self.tol = float(tol)
        super().__init__(
            f"operator is not shift-equivariant: max relative residual {self.residual:.3e} > {self.tol:.1e}"
        )


class PartitionError(ValueError):
    """A shard plan does not partition the index set it is applied to."""
