"""Three ways to turn a normal vector into a Brownian path.

All of them reproduce the covariance min(s, t); they differ in how much of the
path each coordinate controls.
"""

import numpy as np

from mlqmc.ortho import (
    CovarianceSpec,
    brownian_eigen,
    bridge_path,
    forward_path,
    pca_path,
)

spec = CovarianceSpec(n=64, T=1.0)
I = np.eye(spec.n)
for name, A in (
    ("forward", forward_path(I, spec).T),
    ("PCA", pca_path(I, spec).T),
    ("bridge", bridge_path(I, spec).T),
):
    err = np.abs(A @ A.T - spec.matrix()).max()
    # share of total path variance carried by the first coordinate
    share = (A[:, 0] @ A[:, 0]) / np.trace(spec.matrix())
    print(f"{name:>8}: max |AA^T - Sigma| = {err:.1e}, first coordinate carries {share:.1%}")

lam, _ = brownian_eigen(spec.n)
print("PCA: top 4 eigenvalues explain", f"{lam[:4].sum() / lam.sum():.1%}", "of the variance")
