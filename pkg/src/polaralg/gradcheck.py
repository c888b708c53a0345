"""Central finite differences for complex parameters.

Used to check the analytic gradients in :mod:`polaralg.operators`; the
returned gradient has the same ``dL/dRe + 1j dL/dIm`` layout.
"""

import numpy as np


def numerical_gradient(loss, z, h: float = 1e-6, real_only: bool = False) -> np.ndarray:
    """Central-difference gradient of the real scalar ``loss(z)``.

    Real and imaginary parts are perturbed separately; with ``real_only``
    the imaginary direction is skipped (for real-constrained parameters).
    """
    z = np.array(z, dtype=np.complex128)
    grad = np.zeros_like(z)
    flat = z.reshape(-1)
    out = grad.reshape(-1)
    steps = (1.0,) if real_only else (1.0, 1j)
    for i in range(flat.size):
        orig = flat[i]
        for step in steps:
            flat[i] = orig + h * step
            up = loss(z)
            flat[i] = orig - h * step
            down = loss(z)
            out[i] += step * (up - down) / (2 * h)
        flat[i] = orig
    return grad


def relative_error(analytic, numeric) -> float:
    """``max |analytic - numeric| / max |numeric|`` (denominator floored at 1e-12)."""
    analytic = np.asarray(analytic)
    numeric = np.asarray(numeric)
    scale = max(float(np.max(np.abs(numeric))), 1e-12)
    return float(np.max(np.abs(analytic - numeric))) / scale


def linear_loss(upstream: np.ndarray):
    """``y -> sum Re(conj(upstream) * y)``, whose gradient w.r.t. ``y`` is ``upstream``."""
    g = np.asarray(upstream)
    return lambda y: float(np.sum(np.real(np.conj(g) * y)))
