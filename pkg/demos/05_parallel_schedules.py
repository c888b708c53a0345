"""Simulated multi-worker schedules with communication accounting.

Pointwise spectral stages need no communication when data is sharded over
(radius, frequency).  A DFT split over two workers by one Cooley-Tukey
level needs exactly one half-spectrum exchange in each direction.
"""

import numpy as np

from polaralg import PolarTensor, polar_product_fft
from polaralg.operators import SpectralDense
from polaralg.parallel import (
    ShardPlan,
    dft_row_partition,
    dft_two_worker_ct,
    pipeline_depth_split,
    sharded_polar_product,
)

rng = np.random.default_rng(3)
a = PolarTensor(rng.standard_normal((4, 16)))
b = PolarTensor(rng.standard_normal((4, 16)))

for plan in (ShardPlan.radial(4, 2), ShardPlan.frequency(a.shape, 4)):
    out, ledger = sharded_polar_product(a, b, plan)
    err = np.max(np.abs(out.values - polar_product_fft(a, b).values))
    print(f"{plan.strategy.value:>9} shards: error {err:.1e}, values exchanged {ledger.total}, "
          f"work per worker {dict(ledger.work)}")

x = rng.standard_normal(8)
X, ledger = dft_two_worker_ct(x)
print("\ntwo-worker DFT error:", float(np.max(np.abs(X - np.fft.fft(x)))))
print(ledger.to_csv(), end="")

_, ledger = dft_row_partition(x, 4)
print("\nrow partition broadcast:", ledger.totals())

s = PolarTensor(np.ones((4, 16)), domain="spectral")
blocks = [SpectralDense(rng.standard_normal((4, 16))) for _ in range(6)]
_, ledger = pipeline_depth_split(blocks, 3, s)
print("pipeline activation sends:", ledger.totals())
