"""Sharded execution of spectral pipelines with explicit communication accounting.

Workers are simulated: each one owns a slice of the index set and only sees
data that either was born on it or arrived through a :class:`Channel`, which
records every transfer in an :class:`ExchangeLedger`.  Counts are complex
scalars.  Results never depend on the order in which workers are run.
"""

from __future__ import annotations

import csv
import enum
import io
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .errors import PartitionError
from .tensor import Domain, PolarTensor, check_conformable, require_domain
from .spectral import fft_angular, ifft_angular

__all__ = [
    "Strategy",
    "ShardPlan",
    "LedgerEntry",
    "ExchangeLedger",
    "Channel",
    "sharded_polar_product",
    "dft_row_partition",
    "dft_two_worker_ct",
    "pipeline_depth_split",
]


class Strategy(enum.Enum):
    RADIAL = "radial"
    FREQUENCY = "frequency"
    ROW_PARTITION = "row_partition"


@dataclass(frozen=True)
class ShardPlan:
    """Assignment of a flat index set ``0..size-1`` to workers.

    The index set is the radii for ``RADIAL``, the row-major flattened
    ``(r, m)`` grid for ``FREQUENCY`` and the DFT output rows ``k`` for
    ``ROW_PARTITION``.
    """

    strategy: Strategy
    size: int
    assignment: dict

    @property
    def worker_count(self) -> int:
        return len(self.assignment)

    @classmethod
    def contiguous(cls, strategy: Strategy, size: int, workers: int) -> "ShardPlan":
        if workers < 1:
            raise ValueError("need at least one worker")
        if workers > size:
            raise ValueError(f"{workers} workers for only {size} indices")
        blocks = np.array_split(np.arange(size), workers)
        return cls(Strategy(strategy), size, {w: blk for w, blk in enumerate(blocks)})

    @classmethod
    def radial(cls, n_radii: int, workers: int) -> "ShardPlan":
        return cls.contiguous(Strategy.RADIAL, n_radii, workers)

    @classmethod
    def frequency(cls, shape, workers: int) -> "ShardPlan":
        return cls.contiguous(Strategy.FREQUENCY, int(np.prod(shape)), workers)

    @classmethod
    def row_partition(cls, n: int, workers: int) -> "ShardPlan":
        return cls.contiguous(Strategy.ROW_PARTITION, n, workers)

    def validate(self, size: int | None = None) -> None:
        """Raise :class:`PartitionError` unless the shards are disjoint and cover ``0..size-1``."""
        size = self.size if size is None else size
        if size != self.size:
            raise PartitionError(f"plan covers {self.size} indices, data has {size}")
        seen = np.zeros(size, dtype=int)
        for w, idx in self.assignment.items():
            idx = np.asarray(idx, dtype=int)
            if idx.size and (idx.min() < 0 or idx.max() >= size):
                raise PartitionError(f"worker {w} owns indices outside 0..{size - 1}")
            np.add.at(seen, idx, 1)
        if np.any(seen > 1):
            raise PartitionError(f"index {int(np.argmax(seen > 1))} assigned to several workers")
        if np.any(seen == 0):
            raise PartitionError(f"index {int(np.argmin(seen))} assigned to no worker")


@dataclass(frozen=True)
class LedgerEntry:
    step: str
    sender: int
    receiver: int
    complex_count: int


@dataclass
class ExchangeLedger:
    """Log of values sent between workers, plus per-worker multiply counts."""

    entries: list = field(default_factory=list)
    work: dict = field(default_factory=lambda: defaultdict(int))

    def record(self, step: str, sender: int, receiver: int, count: int) -> None:
        if count < 0:
            raise ValueError("negative transfer count")
        self.entries.append(LedgerEntry(step, int(sender), int(receiver), int(count)))

    def add_work(self, worker: int, multiplies: int) -> None:
        self.work[worker] += int(multiplies)

    def __len__(self):
        return len(self.entries)

    @property
    def total(self) -> int:
        return sum(e.complex_count for e in self.entries)

    def totals(self) -> dict:
        """Values sent per ``(sender, receiver)`` pair."""
        out = defaultdict(int)
        for e in self.entries:
            out[(e.sender, e.receiver)] += e.complex_count
        return dict(out)

    def step_total(self, step: str) -> int:
        return sum(e.complex_count for e in self.entries if e.step == step)

    def sent_by(self, worker: int) -> int:
        return sum(e.complex_count for e in self.entries if e.sender == worker)

    def received_by(self, worker: int) -> int:
        return sum(e.complex_count for e in self.entries if e.receiver == worker)

    def total_bytes(self, element_size: int = 16) -> int:
        return self.total * element_size

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["step", "sender", "receiver", "complex_count"])
        for e in self.entries:
            writer.writerow([e.step, e.sender, e.receiver, e.complex_count])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text


class Channel:
    """Point-to-point message passing between simulated workers."""

    def __init__(self, ledger: ExchangeLedger):
        self.ledger = ledger
        self._boxes = defaultdict(list)

    def send(self, step: str, sender: int, receiver: int, payload) -> None:
        payload = np.array(payload, dtype=np.complex128, copy=True)
        if sender != receiver:
            self.ledger.record(step, sender, receiver, payload.size)
        self._boxes[(step, receiver)].append((sender, payload))

    def receive(self, step: str, receiver: int, sender: int) -> np.ndarray:
        box = self._boxes[(step, receiver)]
        for i, (src, payload) in enumerate(box):
            if src == sender:
                return box.pop(i)[1]
        raise LookupError(f"no message for worker {receiver} from {sender} at step {step!r}")


def sharded_polar_product(a: PolarTensor, b: PolarTensor, plan: ShardPlan) -> tuple[PolarTensor, ExchangeLedger]:
    """Polar product with the work split across the workers of ``plan``.

    ``RADIAL``: each worker holds whole rings of ``a`` and ``b`` and runs the
    full transform-multiply-inverse pipeline locally.  ``FREQUENCY``: the
    spectra are born sharded over ``(r, m)`` and each worker multiplies its
    own coefficients; the transforms sit at the host boundary.  Neither
    strategy exchanges data between workers.
    """
    check_conformable(a, b)
    require_domain(a, Domain.SPATIAL, "sharded_polar_product")
    ledger = ExchangeLedger()
    if plan.strategy is Strategy.RADIAL:
        plan.validate(a.n_radii)
        out = np.empty(a.shape, dtype=np.complex128)
        for w, radii in plan.assignment.items():
            radii = np.asarray(radii, dtype=int)
            if radii.size == 0:
                continue
            local_a = PolarTensor(a.values[radii], a.angular_axes)
            local_b = PolarTensor(b.values[radii], b.angular_axes)
            fa, fb = fft_angular(local_a), fft_angular(local_b)
            out[radii] = ifft_angular(fa.with_values(fa.values * fb.values)).values
            ledger.add_work(w, fa.size)
        return a.with_values(out), ledger
    if plan.strategy is Strategy.FREQUENCY:
        plan.validate(a.size)
        fa = fft_angular(a).values.ravel()
        fb = fft_angular(b).values.ravel()
        prod = np.empty(a.size, dtype=np.complex128)
        for w, idx in plan.assignment.items():
            idx = np.asarray(idx, dtype=int)
            prod[idx] = fa[idx] * fb[idx]
            ledger.add_work(w, idx.size)
        spec = PolarTensor(prod.reshape(a.shape), a.angular_axes, Domain.SPECTRAL)
        return ifft_angular(spec), ledger
    raise ValueError(f"sharded_polar_product does not support {plan.strategy.value} plans")


def dft_row_partition(x, worker_count: int) -> tuple[np.ndarray, ExchangeLedger]:
    """Direct DFT with output rows split across workers.

    Worker 0 owns ``x`` and broadcasts it to every other worker, each of which
    then evaluates its rows of the DFT sum independently.
    """
    x = np.asarray(x, dtype=np.complex128).ravel()
    n = x.size
    plan = ShardPlan.row_partition(n, worker_count)
    ledger = ExchangeLedger()
    chan = Channel(ledger)
    for w in plan.assignment:
        if w != 0:
            chan.send("broadcast", 0, w, x)
    out = np.empty(n, dtype=np.complex128)
    for w, rows in plan.assignment.items():
        local = x if w == 0 else chan.receive("broadcast", w, 0)
        rows = np.asarray(rows, dtype=np.int64)
        out[rows] = _kernels.direct_dft_rows(local, rows)
        ledger.add_work(w, rows.size * n)
    return out, ledger


def dft_two_worker_ct(x) -> tuple[np.ndarray, ExchangeLedger]:
    """One Cooley-Tukey level split over two workers.

    Worker 0 transforms the even samples into ``E``, worker 1 the odd samples
    into ``O``.  They swap half-spectra (``n/2`` values each way), then worker 0
    forms ``X[k] = E[k] + w^k O[k]`` and worker 1 ``X[k + n/2] = E[k] - w^k O[k]``
    for ``k < n/2``.
    """
    x = np.asarray(x, dtype=np.complex128).ravel()
    n = x.size
    if n % 2:
        raise ValueError(f"two-worker Cooley-Tukey needs an even length, got {n}")
    h = n // 2
    ledger = ExchangeLedger()
    chan = Channel(ledger)
    local = {0: np.ascontiguousarray(x[0::2]), 1: np.ascontiguousarray(x[1::2])}
    half = {}
    for w in (0, 1):
        spec, count = _kernels.dft_rows(local[w].reshape(1, h), False)
        half[w] = spec[0]
        ledger.add_work(w, count)
    chan.send("butterfly", 0, 1, half[0])
    chan.send("butterfly", 1, 0, half[1])
    twiddle = np.exp(-2j * np.pi * np.arange(h) / n)
    out = np.empty(n, dtype=np.complex128)
    e0, o0 = half[0], chan.receive("butterfly", 0, 1)
    out[:h] = e0 + twiddle * o0
    e1, o1 = chan.receive("butterfly", 1, 0), half[1]
    out[h:] = e1 - twiddle * o1
    ledger.add_work(0, h)
    ledger.add_work(1, h)
    return out, ledger


def pipeline_depth_split(
    blocks: Sequence[Callable[[PolarTensor], PolarTensor]], stages: int, s: PolarTensor
) -> tuple[PolarTensor, ExchangeLedger]:
    """Run ``blocks`` as ``stages`` contiguous pipeline stages, one worker each.

    The activation crosses every stage boundary once; the ledger records its
    element count.
    """
    if not 1 <= stages <= len(blocks):
        raise ValueError(f"stages must lie in [1, {len(blocks)}]")
    ledger = ExchangeLedger()
    chan = Channel(ledger)
    groups = np.array_split(np.arange(len(blocks)), stages)
    act = s
    for stage, grp in enumerate(groups):
        if stage > 0:
            chan.send("activation", stage - 1, stage, act.values)
            act = act.with_values(chan.receive("activation", stage, stage - 1))
        for i in grp:
            act = blocks[i](act)
    return act, ledger
