"""Householder transforms fitted to the linear part of an integrand.

An integrand ``f = g(h_1(x), ..., h_m(x))`` is approximated by replacing each
``h_k`` with its best linear fit ``a_k^T x + b_k``. The chain built here
rotates the ``a_k`` onto the leading coordinates, which is where QMC points
are most evenly spread.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ortho import HouseholderChain, apply_chain_transpose, reflection_mapping_pivot_to

SKIP_TOL = 1e-12


@dataclass(frozen=True)
class RegressionSpec:
    """Raw regression vectors ``a_k[j] = E(X_j h_k(X))`` stacked as rows.

    ``intercepts`` (``b_k = E h_k(X)``) do not enter the transform and may be omitted.
    """

    vectors: np.ndarray
    intercepts: np.ndarray | None = None

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.vectors, dtype=np.float64))
        if a.ndim != 2:
            raise ValueError("vectors must be an (m, n) array")
        if not np.all(np.isfinite(a)):
            raise ValueError("regression vectors must be finite")
        if a.shape[0] > a.shape[1]:
            raise ValueError(f"more inner functions ({a.shape[0]}) than dimensions ({a.shape[1]})")
        object.__setattr__(self, "vectors", a)

    @property
    def m(self) -> int:
        return self.vectors.shape[0]

    @property
    def n(self) -> int:
        return self.vectors.shape[1]


def build_chain(spec: RegressionSpec) -> HouseholderChain:
    """Householder chain for the vectors of ``spec``.

    The working vector for ``a_k`` is ``U^T a_k`` under the chain built so
    far, which equals ``E(X h_k(U X))``; no expectation is re-estimated.
    Coordinates ahead of the current pivot are zeroed, a near-zero residual
    is skipped without advancing the pivot, and a residual already on the
    pivot axis advances the pivot without storing a reflection.
    """
    if not isinstance(spec, RegressionSpec):
        spec = RegressionSpec(spec)
    chain = HouseholderChain(spec.n)
    pivot = 0
    for a in spec.vectors:
        if pivot >= spec.n:
            break
        w = apply_chain_transpose(chain, a)
        w[:pivot] = 0.0
        if np.linalg.norm(w) <= SKIP_TOL * np.linalg.norm(a):
            continue
        U = reflection_mapping_pivot_to(w, pivot)
        if not U.is_identity:
            chain = chain.appended(U)
        pivot += 1
    return chain


def capture_ratio(a, var_h: float) -> float:
    """Share of ``Var h`` explained by the linear fit with slope ``a``."""
    if not var_h > 0:
        raise ValueError("variance must be positive")
    a = np.asarray(a, dtype=np.float64)
    return float(a @ a / var_h)


@dataclass(frozen=True)
class CaptureReport:
    ratios: np.ndarray
    intercepts: np.ndarray
    variances: np.ndarray


def capture_report(inner, vectors, X) -> CaptureReport:
    """Estimate intercepts, variances and capture ratios from samples.

    ``inner`` maps an ``(N, n)`` batch to an ``(m, N)`` array of inner-function
    values; ``X`` holds standard normal samples.
    """
    vectors = np.atleast_2d(np.asarray(vectors, dtype=np.float64))
    h = np.atleast_2d(inner(X))
    b = h.mean(axis=1)
    var = h.var(axis=1, ddof=1)
    ratios = np.array([capture_ratio(a, v) for a, v in zip(vectors, var)])
    return CaptureReport(ratios, b, var)


def loglinear_regression_vector(w, C, D) -> np.ndarray:
    """Closed-form ``E(X h(X))`` for ``h(x) = sum_k w_k exp(sum_i c_ki x_i + d_ki)``.

    ``a_j = sum_k w_k c_kj exp(sum_i (c_ki^2 / 2 + d_ki))``.
    """
    w = np.atleast_1d(np.asarray(w, dtype=np.float64))
    C = np.atleast_2d(np.asarray(C, dtype=np.float64))
    D = np.atleast_2d(np.asarray(D, dtype=np.float64))
    if not (np.all(np.isfinite(w)) and np.all(np.isfinite(C)) and np.all(np.isfinite(D))):
        raise ValueError("inputs must be finite")
    if C.shape != D.shape or C.shape[0] != w.shape[0]:
        raise ValueError("shape mismatch between w, C and D")
    expo = np.sum(0.5 * C**2 + D, axis=1)
    with np.errstate(over="ignore"):
        scale = np.exp(expo)
    bad = np.flatnonzero(~np.isfinite(scale))
    if bad.size:
        raise OverflowError(f"exp overflow in term k={bad[0]} (exponent {expo[bad[0]]:.4g})")
    return (w * scale) @ C
