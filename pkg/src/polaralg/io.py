"""JSON serialization of tensors, layer parameters and frequency masks.

A tensor file looks like::

    {"shape": [2, 4], "angular_axes": [1], "domain": "spatial",
     "real": [...], "imag": [...]}

with row-major flattening; ``imag`` may be omitted.  Floats are written with
Python's shortest round-trip repr, so reading a file back reproduces every
double exactly.
"""

import json

import numpy as np

from .operators import PeriodicGate, SpectralDense
from .tensor import Domain, PolarTensor

__all__ = [
    "TensorFormatError",
    "tensor_to_dict",
    "tensor_from_dict",
    "dumps",
    "loads",
    "save",
    "load",
    "mask_to_list",
    "mask_from_list",
    "params_to_dict",
    "params_from_dict",
]


class TensorFormatError(ValueError):
    """A JSON document does not describe a valid tensor or parameter set."""


def _complex_fields(values: np.ndarray) -> dict:
    flat = np.asarray(values).ravel()
    return {"real": [float(v) for v in flat.real], "imag": [float(v) for v in flat.imag]}


def _complex_from(doc: dict, shape) -> np.ndarray:
    try:
        real = np.asarray(doc["real"], dtype=float)
        imag = np.asarray(doc.get("imag", np.zeros(real.size)), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise TensorFormatError(f"bad value arrays: {exc}") from exc
    n = int(np.prod(shape))
    if real.ndim != 1 or real.size != n or imag.shape != real.shape:
        raise TensorFormatError(f"expected {n} real and imaginary values for shape {list(shape)}")
    return (real + 1j * imag).reshape(shape)


def tensor_to_dict(a: PolarTensor) -> dict:
    return {
        "shape": list(a.shape),
        "angular_axes": list(a.angular_axes),
        "domain": a.domain.value,
        **_complex_fields(a.values),
    }


def tensor_from_dict(doc) -> PolarTensor:
    if not isinstance(doc, dict):
        raise TensorFormatError("tensor document must be a JSON object")
    try:
        shape = [int(n) for n in doc["shape"]]
        axes = doc.get("angular_axes")
        domain = Domain(doc.get("domain", "spatial"))
    except (KeyError, TypeError, ValueError) as exc:
        raise TensorFormatError(f"bad tensor header: {exc}") from exc
    values = _complex_from(doc, shape)
    try:
        return PolarTensor(values, axes, domain)
    except ValueError as exc:
        raise TensorFormatError(str(exc)) from exc


def dumps(a: PolarTensor) -> str:
    return json.dumps(tensor_to_dict(a))


def loads(text: str) -> PolarTensor:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TensorFormatError(f"invalid JSON: {exc}") from exc
    return tensor_from_dict(doc)


def save(a: PolarTensor, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(a))


def load(path) -> PolarTensor:
    with open(path) as fh:
        return loads(fh.read())


def mask_to_list(mask) -> list:
    """Sorted list of the multi-indices where ``mask`` is true."""
    return sorted(list(map(int, idx)) for idx in np.argwhere(np.asarray(mask, dtype=bool)))


def mask_from_list(indices, shape) -> np.ndarray:
    mask = np.zeros(shape, dtype=bool)
    for idx in indices:
        mask[tuple(idx)] = True
    return mask


def params_to_dict(params) -> dict:
    if isinstance(params, SpectralDense):
        return {
            "kind": "spectral_dense",
            "shape": list(params.weights.shape),
            "real_constrained": params.real_constrained,
            **_complex_fields(params.weights),
        }
    if isinstance(params, PeriodicGate):
        return {
            "kind": "periodic_gate",
            "shape": [params.n_theta],
            "band": params.band,
            "window": params.window,
            "strength": params.strength,
            "real_spectrum_constrained": params.real_spectrum_constrained,
            **_complex_fields(params.kernel_spectrum),
        }
    raise TypeError(f"cannot serialize {type(params).__name__}")


def params_from_dict(doc: dict):
    kind = doc.get("kind")
    try:
        if kind == "spectral_dense":
            return SpectralDense(_complex_from(doc, doc["shape"]), bool(doc["real_constrained"]))
        if kind == "periodic_gate":
            return PeriodicGate(
                _complex_from(doc, doc["shape"]),
                int(doc["band"]),
                float(doc["window"]),
                float(doc["strength"]),
                bool(doc["real_spectrum_constrained"]),
            )
    except (KeyError, ValueError) as exc:
        raise TensorFormatError(f"bad {kind} parameters: {exc}") from exc
    raise TensorFormatError(f"unknown parameter kind {kind!r}")
