"""Spectral neural-operator building blocks on polar tensors.

Gradients follow one convention throughout: for a real loss ``L`` and a
complex quantity ``z`` the gradient is ``dL/dRe(z) + 1j * dL/dIm(z)``.  The
upstream argument of every ``*_gradient`` function is that gradient with
respect to the operation's output.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .tensor import Domain, PolarTensor, check_conformable, require_domain

__all__ = [
    "SpectralDense",
    "polar_dense_forward",
    "polar_dense_gradient",
    "polar_dense_input_gradient",
    "compose_dense",
    "PeriodicGate",
    "tukey_taper",
    "gate_target_profile",
    "build_gate_kernel",
    "low_frequency_mask",
    "signed_frequencies",
    "gate_apply",
    "GateGradients",
    "gate_gradients",
    "energy_ratio",
    "jacobian_weight",
    "radial_equalize",
    "PolarGridSpec",
    "cartesian_to_polar",
    "spectral_rms_norm",
    "spectral_rms_norm_gradient",
    "SymmetricMixer",
    "symmetric_channel_mix",
    "symmetric_channel_mix_gradient",
    "pool_low_quadrants",
]


# --------------------------------------------------------------------------
# Dense layer acting diagonally on the angular spectrum
# --------------------------------------------------------------------------


@dataclass
class SpectralDense:
    """Per-(radius, frequency) multipliers ``W_r(m)``.

    ``weights`` has the full shape of the spectra it acts on.  With
    ``real_constrained`` the imaginary parts must vanish, so the layer
    applies no phase shifts.
    """

    weights: np.ndarray
    real_constrained: bool = False

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.complex128)
        if self.real_constrained and np.any(w.imag):
            raise ValueError("real-constrained layer received complex weights")
        self.weights = w

    @classmethod
    def identity(cls, shape, real_constrained=False):
        return cls(np.ones(shape), real_constrained)

    def __call__(self, s: PolarTensor) -> PolarTensor:
        return polar_dense_forward(self, s)


def _check_weight_shape(layer: SpectralDense, s: PolarTensor) -> None:
    if layer.weights.shape != s.shape:
        raise ValueError(f"weight shape {layer.weights.shape} does not match spectrum {s.shape}")


def polar_dense_forward(layer: SpectralDense, s: PolarTensor) -> PolarTensor:
    """``Y_hat[r, m] = W_r(m) * A_hat[r, m]``; frequencies never mix."""
    require_domain(s, Domain.SPECTRAL, "polar_dense_forward")
    _check_weight_shape(layer, s)
    return s.with_values(layer.weights * s.values)


def polar_dense_gradient(layer: SpectralDense, s: PolarTensor, upstream: PolarTensor) -> np.ndarray:
    """Weight gradient ``upstream * conj(s)``; real part only when real-constrained."""
    _check_weight_shape(layer, s)
    check_conformable(s, upstream)
    grad = upstream.values * np.conj(s.values)
    return grad.real.astype(np.complex128) if layer.real_constrained else grad


def polar_dense_input_gradient(layer: SpectralDense, upstream: PolarTensor) -> PolarTensor:
    _check_weight_shape(layer, upstream)
    return upstream.with_values(upstream.values * np.conj(layer.weights))


def compose_dense(layers: Sequence[SpectralDense]) -> SpectralDense:
    """Single layer equivalent to applying ``layers`` in order (weights multiply)."""
    w = np.ones_like(layers[0].weights)
    for layer in layers:
        w = w * layer.weights
    return SpectralDense(w, all(layer.real_constrained for layer in layers))


# --------------------------------------------------------------------------
# Periodic spectral gate
# --------------------------------------------------------------------------


def signed_frequencies(n: int) -> np.ndarray:
    """Signed frequency of each DFT bin: 0, 1, ..., then negatives (Nyquist counts as positive)."""
    m = np.arange(n)
    return np.where(m <= n // 2, m, m - n)


def tukey_taper(band: int, alpha: float) -> np.ndarray:
    """One-sided Tukey weights for ``|m| = 0..band`` evaluated at ``x = |m| / band``.

    Flat for ``x <= 1 - alpha`` and a raised-cosine roll-off to zero at
    ``x = 1`` beyond.  ``alpha = 0`` gives a rectangular window.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    if band == 0:
        return np.ones(1)
    x = np.arange(band + 1) / band
    w = np.ones_like(x)
    if alpha > 0:
        tail = x > 1.0 - alpha
        w[tail] = 0.5 * (1.0 + np.cos(np.pi * (x[tail] - 1.0 + alpha) / alpha))
    return w


def gate_target_profile(n_theta: int) -> np.ndarray:
    """SiLU of ``3 cos(theta)`` sampled on the angular grid; periodic and even."""
    u = 3.0 * np.cos(2.0 * np.pi * np.arange(n_theta) / n_theta)
    return u / (1.0 + np.exp(-u))


@dataclass
class PeriodicGate:
    """Band-limited circular-convolution gate along angular frequency.

    ``kernel_spectrum[m]`` stores ``W_m`` for the DFT bin ``m`` (negative
    frequencies wrap to the end); entries with ``|m| > band`` are zero.
    """

    kernel_spectrum: np.ndarray
    band: int
    window: float = 0.5
    strength: float = 1.0
    real_spectrum_constrained: bool = True

    def __post_init__(self):
        w = np.array(self.kernel_spectrum, dtype=np.complex128).ravel()
        n = w.size
        if not 0 <= self.band <= n // 2:
            raise ValueError(f"band {self.band} outside [0, {n // 2}]")
        if not 0.0 <= self.strength <= 1.0:
            raise ValueError("strength must lie in [0, 1]")
        if np.any(w[np.abs(signed_frequencies(n)) > self.band]):
            raise ValueError("kernel has energy outside the retained band")
        if self.real_spectrum_constrained and np.any(w.imag):
            raise ValueError("real-spectrum gate received complex coefficients")
        self.kernel_spectrum = w

    @property
    def n_theta(self) -> int:
        return self.kernel_spectrum.size

    def spatial_kernel(self) -> np.ndarray:
        """``W(theta)``, the inverse DFT of the coefficients."""
        return np.fft.ifft(self.kernel_spectrum)


def build_gate_kernel(
    band: int,
    alpha_w: float,
    n_theta: int,
    real_constrained: bool = True,
    strength: float = 1.0,
) -> PeriodicGate:
    if not 0 <= band <= n_theta // 2:
        raise ValueError(f"band limit {band} outside [0, {n_theta // 2}]")
    spec = np.fft.fft(gate_target_profile(n_theta))
    m = signed_frequencies(n_theta)
    keep = np.abs(m) <= band
    taper = tukey_taper(band, alpha_w)
    w = np.zeros(n_theta, dtype=np.complex128)
    w[keep] = spec[keep] * taper[np.abs(m[keep])]
    if real_constrained:
        w = w.real.astype(np.complex128)
    return PeriodicGate(w, band, alpha_w, strength, real_constrained)


def low_frequency_mask(angular_shape, band: int) -> np.ndarray:
    """Boolean mask keeping ``|m| <= band`` on every angular axis."""
    grids = np.meshgrid(*[np.abs(signed_frequencies(n)) <= band for n in angular_shape], indexing="ij")
    return np.logical_and.reduce(grids)


def _expand_mask(mask, s: PolarTensor) -> np.ndarray:
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != s.angular_shape:
        raise ValueError(f"mask shape {mask.shape} does not match angular shape {s.angular_shape}")
    view = [1] * s.values.ndim
    order = np.argsort(s.angular_axes)
    for ax, n in zip(s.angular_axes, mask.shape):
        view[ax] = n
    # transpose the mask so its axes follow increasing tensor-axis order
    m = np.transpose(mask, order).reshape(view)
    return np.broadcast_to(m, s.shape)


def _gate_axis(g: PeriodicGate, s: PolarTensor, axis) -> int:
    axis = s.angular_axes[0] if axis is None else axis
    if axis not in s.angular_axes:
        raise ValueError(f"axis {axis} is not angular")
    if s.shape[axis] != g.n_theta:
        raise ValueError(f"gate length {g.n_theta} does not match axis size {s.shape[axis]}")
    return axis


def _gate_convolve(w: np.ndarray, x: np.ndarray, axis: int) -> np.ndarray:
    n = w.size
    out = np.zeros_like(x)
    for m in np.flatnonzero(w):
        out += w[m] * np.roll(x, m, axis=axis)
    return out / n


def gate_apply(g: PeriodicGate, s: PolarTensor, low_mask, axis: int | None = None) -> PolarTensor:
    """Residual gate ``(1 - s) z + s G(z)`` inside ``low_mask``; identity outside.

    ``G(z)_k = (1/N) sum_m W_m z_{k-m}`` is a circular convolution along the
    frequency index of ``axis`` (the first angular axis by default) and reads
    the full spectrum.
    """
    require_domain(s, Domain.SPECTRAL, "gate_apply")
    axis = _gate_axis(g, s, axis)
    mask = _expand_mask(low_mask, s)
    x = s.values
    gated = (1.0 - g.strength) * x + g.strength * _gate_convolve(g.kernel_spectrum, x, axis)
    return s.with_values(np.where(mask, gated, x))


class GateGradients(NamedTuple):
    kernel: np.ndarray
    strength: float
    input: PolarTensor


def gate_gradients(
    g: PeriodicGate, s: PolarTensor, low_mask, upstream: PolarTensor, axis: int | None = None
) -> GateGradients:
    """Gradients of ``gate_apply`` w.r.t. every ``W_m``, the strength and the input."""
    axis = _gate_axis(g, s, axis)
    check_conformable(s, upstream)
    mask = _expand_mask(low_mask, s)
    x = s.values
    n = g.n_theta
    gm = np.where(mask, upstream.values, 0)
    kernel_grad = np.array(
        [g.strength / n * np.sum(gm * np.conj(np.roll(x, m, axis=axis))) for m in range(n)]
    )
    if g.real_spectrum_constrained:
        kernel_grad = kernel_grad.real.astype(np.complex128)
    conv = _gate_convolve(g.kernel_spectrum, x, axis)
    strength_grad = float(np.sum(np.real(np.conj(gm) * (conv - x))))
    # adjoint of the convolution: correlate with conj(W)
    back = np.zeros_like(x)
    for m in np.flatnonzero(g.kernel_spectrum):
        back += np.conj(g.kernel_spectrum[m]) * np.roll(gm, -m, axis=axis)
    input_grad = np.where(mask, (1.0 - g.strength) * upstream.values, upstream.values)
    input_grad = input_grad + g.strength * back / n
    return GateGradients(kernel_grad, strength_grad, s.with_values(input_grad))


def energy_ratio(pre: PolarTensor, post: PolarTensor, low_mask) -> float:
    """``||post_low|| / ||pre_low||`` over the masked frequencies.

    Returns ``inf`` when the masked input energy is zero but the output's is
    not, and ``1.0`` when both vanish.
    """
    check_conformable(pre, post)
    mask = _expand_mask(low_mask, pre)
    num = float(np.linalg.norm(post.values[mask]))
    den = float(np.linalg.norm(pre.values[mask]))
    if den == 0.0:
        return 1.0 if num == 0.0 else float("inf")
    return num / den


# --------------------------------------------------------------------------
# Radial equalization and resampling
# --------------------------------------------------------------------------


def jacobian_weight(n_radii: int) -> np.ndarray:
    """``sqrt((r + 1/2) / R)``: compensates the sector area growing with radius."""
    return np.sqrt((np.arange(n_radii) + 0.5) / n_radii)


def radial_equalize(
    a: PolarTensor,
    mode: str = "both",
    weight: Callable[[int], np.ndarray] = jacobian_weight,
    var_floor: float = 1e-8,
) -> PolarTensor:
    """Ring-wise standardization and/or radius-dependent weighting.

    ``mode`` is ``"statistics"``, ``"jacobian"`` or ``"both"`` (statistics
    first).  Statistics use the population variance, floored at ``var_floor``.
    """
    if mode not in ("statistics", "jacobian", "both"):
        raise ValueError(f"unknown mode {mode!r}")
    require_domain(a, Domain.SPATIAL, "radial_equalize")
    if not a.is_real:
        raise ValueError("radial_equalize expects a real-valued tensor")
    x = a.values.real
    ring_axes = tuple(range(1, x.ndim))
    if mode in ("statistics", "both"):
        mu = x.mean(axis=ring_axes, keepdims=True)
        var = x.var(axis=ring_axes, keepdims=True)
        x = (x - mu) / np.sqrt(np.maximum(var, var_floor))
    if mode in ("jacobian", "both"):
        w = np.asarray(weight(a.n_radii), dtype=float)
        x = x * w.reshape((-1,) + (1,) * (x.ndim - 1))
    return a.with_values(x)


@dataclass(frozen=True)
class PolarGridSpec:
    """Sampling grid: ``R`` radii at ``(i + 1/2) r_max / R`` and ``T`` angles ``2 pi j / T``.

    ``center`` is ``(x, y)`` in pixel coordinates, x along columns.
    """

    R: int
    T: int
    r_max: float
    center: tuple = field(default=(0.0, 0.0))

    def __post_init__(self):
        if self.R < 1 or self.T < 1:
            raise ValueError("R and T must be at least 1")
        if not self.r_max > 0:
            raise ValueError("r_max must be positive")

    def radii(self) -> np.ndarray:
        return (np.arange(self.R) + 0.5) * self.r_max / self.R

    def angles(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.T) / self.T

    @classmethod
    def centered(cls, image_shape, R, T, r_max=None):
        h, w = image_shape
        cx, cy = (w - 1) / 2.0, (h - 1) / 2.0
        if r_max is None:
            r_max = min(cx, cy)
        return cls(R, T, r_max, (cx, cy))


def _bilinear(img: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    h, w = img.shape
    inside = (x >= 0) & (x <= w - 1) & (y >= 0) & (y <= h - 1)
    xc = np.clip(x, 0, w - 1)
    yc = np.clip(y, 0, h - 1)
    x0 = np.minimum(np.floor(xc).astype(int), max(w - 2, 0))
    y0 = np.minimum(np.floor(yc).astype(int), max(h - 2, 0))
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = xc - x0
    fy = yc - y0
    top = img[y0, x0] * (1 - fx) + img[y0, x1] * fx
    bottom = img[y1, x0] * (1 - fx) + img[y1, x1] * fx
    return np.where(inside, top * (1 - fy) + bottom * fy, 0.0)


def cartesian_to_polar(img, spec: PolarGridSpec) -> PolarTensor:
    """Bilinear resampling of ``img[y, x]`` onto the polar grid.

    Sample ``(i, j)`` sits at ``center + rho_i (cos theta_j, sin theta_j)``;
    points outside the image read as 0.
    """
    img = np.asarray(img, dtype=float)
    if img.ndim != 2 or img.size == 0:
        raise ValueError("expected a non-empty 2-D image")
    rho = spec.radii()[:, None]
    theta = spec.angles()[None, :]
    x = spec.center[0] + rho * np.cos(theta)
    y = spec.center[1] + rho * np.sin(theta)
    return PolarTensor(_bilinear(img, x, y))


# --------------------------------------------------------------------------
# Normalization, channel mixing, pooling
# --------------------------------------------------------------------------


def _rms_groups(s: PolarTensor, scope: str):
    """Return (reduction axes, list of boolean group masks over the full shape)."""
    full = np.ones(s.shape, dtype=bool)
    if scope == "angular":
        return s.angular_axes, [full]
    if scope == "all":
        return tuple(range(s.values.ndim)), [full]
    if scope == "frequency_sign":
        ax = s.angular_axes[0]
        view = [1] * s.values.ndim
        view[ax] = s.shape[ax]
        pos = np.broadcast_to((signed_frequencies(s.shape[ax]) >= 0).reshape(view), s.shape)
        return s.angular_axes, [pos, ~pos]
    raise ValueError(f"unknown scope {scope!r}")


def _rms_denominator(s: PolarTensor, scope: str, eps: float) -> tuple[np.ndarray, list, tuple]:
    axes, groups = _rms_groups(s, scope)
    power = np.abs(s.values) ** 2
    denom = np.zeros(s.shape)
    for grp in groups:
        count = np.sum(grp, axis=axes, keepdims=True)
        q = np.sum(power * grp, axis=axes, keepdims=True) / count
        denom = np.where(grp, np.sqrt(q + eps), denom)
    return denom, groups, axes


def spectral_rms_norm(s: PolarTensor, scope: str = "angular", eps: float = 1e-8) -> PolarTensor:
    """Divide by ``sqrt(mean |z|^2 + eps)`` within each normalization group.

    ``scope`` selects the groups: ``"angular"`` (all frequencies of one
    radius), ``"frequency_sign"`` (per radius, non-negative and negative
    frequencies of the first angular axis separately; DC and Nyquist count
    as non-negative) or ``"all"``.
    """
    if eps < 0:
        raise ValueError("eps must be non-negative")
    denom, _, _ = _rms_denominator(s, scope, eps)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(denom > 0, s.values / np.where(denom > 0, denom, 1.0), 0.0)
    return s.with_values(out)


def spectral_rms_norm_gradient(
    s: PolarTensor, upstream: PolarTensor, scope: str = "angular", eps: float = 1e-8
) -> PolarTensor:
    """Input gradient of ``spectral_rms_norm``.

    With ``D = sqrt(q + eps)`` and ``n`` entries per group,
    ``grad_j = g_j / D - z_j * sum_i Re(conj(g_i) z_i) / (n D^3)``.
    """
    check_conformable(s, upstream)
    denom, groups, axes = _rms_denominator(s, scope, eps)
    x, g = s.values, upstream.values
    inner = np.real(np.conj(g) * x)
    corr = np.zeros(s.shape)
    for grp in groups:
        count = np.sum(grp, axis=axes, keepdims=True)
        total = np.sum(inner * grp, axis=axes, keepdims=True)
        corr = np.where(grp, total / count, corr)
    return s.with_values(g / denom - x * corr / denom**3)


class SymmetricMixer:
    """Real symmetric channel-mixing matrix stored by its upper triangle."""

    def __init__(self, upper):
        upper = np.asarray(upper, dtype=float).ravel()
        c = int(round((np.sqrt(8 * upper.size + 1) - 1) / 2))
        if c * (c + 1) // 2 != upper.size:
            raise ValueError(f"{upper.size} is not a triangular number")
        self.upper = upper
        self.channels = c

    @classmethod
    def from_matrix(cls, w, tol: float = 0.0) -> "SymmetricMixer":
        w = np.asarray(w)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError("channel-mixing matrix must be square")
        if np.iscomplexobj(w) and np.any(w.imag):
            raise ValueError("channel-mixing matrix must be real")
        w = w.real.astype(float)
        if np.max(np.abs(w - w.T), initial=0.0) > tol:
            raise ValueError("channel-mixing matrix is not symmetric")
        return cls(w[np.triu_indices(w.shape[0])])

    @property
    def matrix(self) -> np.ndarray:
        w = np.zeros((self.channels, self.channels))
        w[np.triu_indices(self.channels)] = self.upper
        return w + np.triu(w, 1).T

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues by a general (non-symmetric) solver, so realness is observed, not assumed."""
        return np.linalg.eigvals(self.matrix)


def symmetric_channel_mix(mixer: SymmetricMixer, s: PolarTensor, channel_axis: int = 1) -> PolarTensor:
    """Apply ``W`` to the channel vector at every (radius, frequency)."""
    _check_channel_axis(mixer, s, channel_axis)
    out = np.moveaxis(np.tensordot(mixer.matrix, s.values, axes=([1], [channel_axis])), 0, channel_axis)
    return s.with_values(out)


def symmetric_channel_mix_gradient(
    mixer: SymmetricMixer, s: PolarTensor, upstream: PolarTensor, channel_axis: int = 1
) -> tuple[np.ndarray, PolarTensor]:
    """Gradients w.r.t. the stored upper triangle and w.r.t. the input."""
    _check_channel_axis(mixer, s, channel_axis)
    check_conformable(s, upstream)
    g = np.moveaxis(upstream.values, channel_axis, 0).reshape(mixer.channels, -1)
    x = np.moveaxis(s.values, channel_axis, 0).reshape(mixer.channels, -1)
    full = np.real(np.conj(g) @ x.T)  # dL/dW[c, d] for an unconstrained W
    sym = full + full.T - np.diag(np.diag(full))
    grad_upper = sym[np.triu_indices(mixer.channels)]
    grad_in = symmetric_channel_mix(mixer, upstream, channel_axis)  # W is real symmetric
    return grad_upper, grad_in


def _check_channel_axis(mixer, s, channel_axis):
    if channel_axis == 0 or channel_axis in s.angular_axes:
        raise ValueError("channel axis must be a non-radial, non-angular axis")
    if s.shape[channel_axis] != mixer.channels:
        raise ValueError(f"expected {mixer.channels} channels, got {s.shape[channel_axis]}")


def pool_low_quadrants(
    s: PolarTensor,
    mask,
    channel_axis: int | None = None,
    radius_groups: Sequence[Sequence[int]] | None = None,
    eps: float = 1e-6,
    normalize: bool = True,
) -> np.ndarray:
    """Real feature vector from masked-mean spectral coefficients.

    One complex mean per (channel, radius group) over the masked
    frequencies; the real parts then the imaginary parts are concatenated
    and, if ``normalize``, scaled by ``1 / (||f|| + eps)``.  Each radius is
    its own group unless ``radius_groups`` says otherwise.
    """
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        raise ValueError("empty frequency mask")
    full = _expand_mask(mask, s)
    if radius_groups is None:
        radius_groups = [[r] for r in range(s.n_radii)]
    chan = [None] if channel_axis is None else range(s.shape[channel_axis])
    means = []
    for c in chan:
        vals = s.values if c is None else np.take(s.values, [c], axis=channel_axis)
        sel = full if c is None else np.take(full, [c], axis=channel_axis)
        for grp in radius_groups:
            v = vals[list(grp)]
            m = sel[list(grp)]
            means.append(v[m].mean())
    means = np.array(means)
    f = np.concatenate([means.real, means.imag])
    if normalize:
        f = f / (np.linalg.norm(f) + eps)
    return f
