"""Timing harness comparing the direct and FFT polar products."""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass

import numpy as np

from .spectral import polar_product_fft
from .tensor import MulCounter, PolarTensor, polar_product_naive

__all__ = ["BenchRecord", "PATHS", "bench_polar_product", "loglog_slope", "write_csv"]

PATHS = {"naive": polar_product_naive, "fft": polar_product_fft}
CSV_FIELDS = ["op", "nr", "ntheta", "path", "median_ns", "reps", "mul_count"]


@dataclass(frozen=True)
class BenchRecord:
    op: str
    nr: int
    ntheta: int
    path: str
    median_ns: int
    reps: int
    mul_count: int | None = None

    def row(self) -> list:
        return [self.op, self.nr, self.ntheta, self.path, self.median_ns, self.reps,
                "" if self.mul_count is None else self.mul_count]


def _median_ns(fn, reps: int, warmup: int) -> int:
    for _ in range(warmup):
        fn()
    times = []
    for _ in range(reps):
        t0 = time.perf_counter_ns()
        fn()
        times.append(time.perf_counter_ns() - t0)
    return int(np.median(times))


def bench_polar_product(
    nr: int,
    nthetas,
    reps: int = 5,
    warmup: int = 2,
    paths=("naive", "fft"),
    seed: int = 0,
) -> list[BenchRecord]:
    """Median wall time of each polar-product path at every angular size.

    Each record also carries the multiplication count of one call.
    """
    if reps < 3:
        raise ValueError("at least 3 repetitions are required")
    if nr < 1 or min(nthetas) < 2:
        raise ValueError("sizes must be at least 2 (N_r at least 1)")
    rng = np.random.default_rng(seed)
    records = []
    for n in nthetas:
        a = PolarTensor(rng.standard_normal((nr, n)) + 1j * rng.standard_normal((nr, n)))
        b = PolarTensor(rng.standard_normal((nr, n)) + 1j * rng.standard_normal((nr, n)))
        for path in paths:
            fn = PATHS[path]
            counter = MulCounter()
            fn(a, b, counter)
            median = _median_ns(lambda: fn(a, b), reps, warmup)
            records.append(BenchRecord("polar-product", nr, n, path, median, reps, counter.multiplies))
    return records


def loglog_slope(records, path: str, exclude_smallest: bool = True) -> float:
    """Least-squares slope of log(median time) against log(N_theta) for one path."""
    pts = sorted((r.ntheta, r.median_ns) for r in records if r.path == path)
    if exclude_smallest:
        pts = pts[1:]
    if len(pts) < 2:
        raise ValueError("need at least two sizes to fit a slope")
    n, t = np.array(pts, dtype=float).T
    return float(np.polyfit(np.log(n), np.log(t), 1)[0])


def write_csv(records, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for rec in records:
        writer.writerow(rec.row())
