"""Command-line front end.

Exit codes: 0 success / true verdict, 1 false verdict, 2 unreadable input,
3 non-conformable operands, 4 singular spectrum, 5 demo mismatch.
Data and verdicts go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import bench, io
from .errors import ConformabilityError, DomainError, NotSelfAdjointError, SingularSpectrumError
from .operators import build_gate_kernel, energy_ratio, gate_apply, low_frequency_mask
from .spectral import (
    Rotor,
    apply_rotor,
    fft_angular,
    ifft_angular,
    inverse,
    max_spectral_imag,
    min_spectral_magnitude,
    polar_product_fft,
    pseudo_inverse,
    rotor_matrix,
)
from .tensor import PolarTensor, max_adjoint_defect, polar_product_naive

EXIT_OK, EXIT_FALSE, EXIT_PARSE, EXIT_CONFORM, EXIT_SINGULAR, EXIT_MISMATCH = range(6)


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def _emit(tensor: PolarTensor, out) -> None:
    if out:
        io.save(tensor, out)
    else:
        print(io.dumps(tensor))


def _parse_shape(text: str) -> tuple:
    return tuple(int(n) for n in text.replace("x", ",").split(",") if n)


def cmd_convolve(args) -> int:
    if args.in_a is None or args.in_b is None:
        if not args.verify:
            _err("convolve needs two input files (or --verify for random inputs)")
            return EXIT_PARSE
        rng = np.random.default_rng(args.seed)
        shape = _parse_shape(args.shape)
        print(f"seed {args.seed}", file=sys.stderr)
        a = PolarTensor(rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
        b = PolarTensor(rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    else:
        a, b = io.load(args.in_a), io.load(args.in_b)
    fast = polar_product_fft(a, b)
    if args.verify:
        slow = polar_product_naive(a, b)
        dev = float(np.max(np.abs(fast.values - slow.values)))
        scale = max(float(np.max(np.abs(slow.values))), np.finfo(float).tiny)
        print(f"max deviation {dev:.3e} (relative {dev / scale:.3e})")
        if dev > 1e-9 * scale:
            _err("naive and fft paths disagree")
            return EXIT_MISMATCH
        result = fast if args.method == "fft" else slow
    else:
        result = fast if args.method == "fft" else polar_product_naive(a, b)
    if args.in_a is not None or args.out:
        _emit(result, args.out)
    return EXIT_OK


def cmd_invert(args) -> int:
    a = io.load(args.input)
    mag, idx = min_spectral_magnitude(a)
    print(f"min |A_hat| = {mag:.6e} at (r,m) = {idx}")
    if args.pseudo:
        result = pseudo_inverse(a, args.eps if args.eps is not None else 1e-6)
    else:
        result = inverse(a, args.eps if args.eps is not None else 1e-12)
    _emit(result, args.out)
    return EXIT_OK


def cmd_check(args) -> int:
    a = io.load(args.input)
    if args.what == "invertible":
        tol = 1e-12 if args.tol is None else args.tol
        mag, idx = min_spectral_magnitude(a)
        verdict = mag > tol
        print(f"invertible {str(verdict).lower()} min_abs_spectrum {mag:.6e} at {idx}")
    elif args.what == "self-adjoint":
        tol = 1e-12 if args.tol is None else args.tol
        defect = max_adjoint_defect(a)
        verdict = defect <= tol
        print(f"self-adjoint {str(verdict).lower()} max_asymmetry {defect:.6e}")
    else:
        tol = 1e-12 if args.tol is None else args.tol
        defect = max_adjoint_defect(a)
        imag, peak = max_spectral_imag(a)
        if defect > tol:
            print(f"chiara false max_asymmetry {defect:.6e} max_imag {imag:.6e}")
            _err("input is not self-adjoint; the reality theorem does not apply")
            return EXIT_FALSE
        verdict = imag <= tol * peak
        print(f"chiara {str(verdict).lower()} max_imag {imag:.6e} max_abs {peak:.6e}")
    return EXIT_OK if verdict else EXIT_FALSE


def cmd_bench(args) -> int:
    sizes = [int(n) for n in args.ntheta_list.split(",")]
    records = bench.bench_polar_product(args.nr, sizes, reps=args.reps, paths=args.paths.split(","))
    with open(args.out, "w", newline="") as fh:
        bench.write_csv(records, fh)
    for path in sorted({r.path for r in records}):
        print(f"slope {path} {bench.loglog_slope(records, path):.4f}")
    return EXIT_OK


def _close(got, want, tol=1e-12) -> bool:
    return np.allclose(np.asarray(got), np.asarray(want), rtol=0, atol=tol)


def demo_aurora():
    a = PolarTensor([[2, 1, 1, 1]])
    spec = fft_angular(a)
    recip = spec.with_values(1.0 / spec.values)
    inv = ifft_angular(recip)
    check = polar_product_naive(a, inv)
    return [
        ("spectrum of a", spec.values[0], [5, 1, 1, 1]),
        ("all coefficients nonzero", np.all(np.abs(spec.values) > 1e-12), True),
        ("reciprocal spectrum", recip.values[0], [0.2, 1, 1, 1]),
        ("inverse DFT of the reciprocal", inv.values[0], [0.8, -0.2, -0.2, -0.2]),
        ("library inverse", inverse(a).values[0], [0.8, -0.2, -0.2, -0.2]),
        ("a (x) a^-1 = delta", check.values[0], [1, 0, 0, 0]),
    ]


def demo_elisa():
    a = PolarTensor([[2, 1, 0], [3, 2, 1]])
    b = PolarTensor([[1, 0, 1], [2, 1, 0]])
    ab, ba = polar_product_naive(a, b), polar_product_naive(b, a)
    return [
        ("A (x) B", ab.values, [[3, 1, 2], [7, 7, 4]]),
        ("B (x) A", ba.values, [[3, 1, 2], [7, 7, 4]]),
        ("fft path", polar_product_fft(a, b).values, [[3, 1, 2], [7, 7, 4]]),
    ]


def demo_rotor():
    x = PolarTensor([[0, 1, 2, 3]])
    print(rotor_matrix(1, 4).astype(int))
    return [
        ("R_1 matrix", rotor_matrix(1, 4), [[0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]]),
        ("R_1 (x0,x1,x2,x3) = (x3,x0,x1,x2)", apply_rotor(Rotor(1), x).values[0], [3, 0, 1, 2]),
        ("R_1 R_3 = Id", apply_rotor(Rotor(1), apply_rotor(Rotor(3), x)).values, x.values),
    ]


def demo_gate():
    gate = build_gate_kernel(4, 0.5, 32, real_constrained=True, strength=0.5)
    kernel = gate.spatial_kernel()
    rng = np.random.default_rng(0)
    z = fft_angular(PolarTensor(rng.standard_normal((3, 32))))
    mask = low_frequency_mask((32,), 4)
    off = build_gate_kernel(4, 0.5, 32, strength=0.0)
    return [
        ("coefficients vanish beyond |m| = 4", gate.kernel_spectrum[5:28], np.zeros(23)),
        ("real spectrum", gate.kernel_spectrum.imag, np.zeros(32)),
        ("even spatial kernel", kernel, np.roll(kernel[::-1], 1)),
        ("strength 0 is the identity", gate_apply(off, z, mask).values, z.values),
        ("energy ratio at strength 0", energy_ratio(z, gate_apply(off, z, mask), mask), 1.0),
    ]


DEMOS = {"aurora": demo_aurora, "elisa": demo_elisa, "rotor": demo_rotor, "gate": demo_gate}


def _fmt(got, want) -> str:
    got = np.asarray(got)
    if got.dtype == bool:
        return str(got.tolist())
    if got.size <= 16:
        return str((np.round(np.real_if_close(got, tol=1e6), 12) + 0.0).tolist())
    return f"max error {np.max(np.abs(got - np.asarray(want))):.2e} over {got.size} entries"


def cmd_demo(args) -> int:
    failed = 0
    for label, got, want in DEMOS[args.example]():
        ok = _close(got, want)
        print(f"[{'PASS' if ok else 'FAIL'}] {label}: {_fmt(got, want)}")
        if not ok:
            failed += 1
            _err(f"  expected {np.asarray(want).tolist()}")
    return EXIT_OK if failed == 0 else EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polaralg", description="Polar linear algebra toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convolve", help="polar product of two tensor files")
    p.add_argument("in_a", nargs="?")
    p.add_argument("in_b", nargs="?")
    p.add_argument("--method", choices=("naive", "fft"), default="fft")
    p.add_argument("--verify", action="store_true", help="run both paths and report their deviation")
    p.add_argument("--shape", default="4,16", help="shape of random inputs when no files are given")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_convolve)

    p = sub.add_parser("invert", help="inverse or pseudo-inverse under the polar product")
    p.add_argument("input")
    p.add_argument("--eps", type=float)
    p.add_argument("--pseudo", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("check", help="spectral and symmetry predicates")
    p.add_argument("input")
    p.add_argument("--what", choices=("invertible", "self-adjoint", "chiara"), required=True)
    p.add_argument("--tol", type=float)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("bench", help="naive vs fft polar product timings")
    p.add_argument("--op", choices=("polar-product",), default="polar-product")
    p.add_argument("--nr", type=int, default=4)
    p.add_argument("--ntheta-list", default="64,128,256,512,1024,2048,4096,8192")
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--paths", default="naive,fft")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("demo", help="replay a worked example and check it")
    p.add_argument("--example", choices=sorted(DEMOS), required=True)
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (io.TensorFormatError, OSError) as exc:
        _err(f"error: {exc}")
        return EXIT_PARSE
    except (ConformabilityError, DomainError) as exc:
        _err(f"error: {exc}")
        return EXIT_CONFORM
    except SingularSpectrumError as exc:
        _err(f"error: {exc}")
        return EXIT_SINGULAR
    except NotSelfAdjointError as exc:
        _err(f"error: {exc}")
        return EXIT_FALSE


if __name__ == "__main__":
    sys.exit(main())
