"""Randomized Sobol points and the normal vectors built from them.

Each replication draws a fresh random shift; averaging over shifts gives an
unbiased estimate and the spread across shifts gives an error bar.
"""

import numpy as np

from mlqmc.low_discrepancy import (
    MCSource,
    QMCSource,
    SobolGenerator,
    normal_samples,
    replication_seed,
    seeded_rng,
)

gen = SobolGenerator(2)
print("first Sobol points in 2-D (index 1 onwards):")
print(gen.points(4))

# E[exp(c (X1 + ... + X8) - 4 c^2)] = 1 for standard normals
c, d, n, reps = 0.5, 8, 1024, 30


def estimate(source):
    x = normal_samples(source, n)
    return np.exp(c * x.sum(axis=1) - c * c * d / 2).mean()


for name, make in (
    ("digital shift", lambda s: QMCSource(d, seeded_rng(s), randomization="digital")),
    ("cp shift", lambda s: QMCSource(d, seeded_rng(s), randomization="cp")),
    ("plain MC", lambda s: MCSource(d, seeded_rng(s))),
):
    vals = [estimate(make(replication_seed(7, i))) for i in range(reps)]
    print(f"{name:>14}: mean {np.mean(vals):.5f}  stddev {np.std(vals, ddof=1):.2e}")
