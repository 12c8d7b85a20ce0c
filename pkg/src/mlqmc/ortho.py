"""Orthogonal transforms of R^n and the Brownian path constructions built on them.

Every transform here acts on the last axis, so a ``(N, n)`` batch of normal
vectors is transformed row by row without materializing an ``n x n`` matrix
(PCA is the one dense exception, cached per ``n``).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

ALIGN_TOL = 1e-12


class DegenerateReflection(ValueError):
    """Raised when asked to build a reflection towards the zero vector."""


@dataclass(frozen=True)
class HouseholderReflection:
    """``I - 2 v v^T / v^T v`` with ``v[:pivot] == 0``.

    ``v is None`` encodes the identity (target already on the pivot axis).
    """

    n: int
    pivot: int
    v: np.ndarray | None = None

    @property
    def is_identity(self) -> bool:
        return self.v is None

    def matrix(self) -> np.ndarray:
        """Dense form; only meant for tests and small ``n``."""
        return apply_reflection(self, np.eye(self.n))


def reflection_mapping_pivot_to(a, pivot: int) -> HouseholderReflection:
    """Reflection ``U`` with ``U e_pivot = a/|a|`` and ``U a = |a| e_pivot``.

    ``pivot`` is 0-based. Coordinates before the pivot must vanish.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 1 or not 0 <= pivot < a.shape[0]:
        raise ValueError("need a vector and a pivot inside it")
    if np.any(a[:pivot] != 0.0):
        raise ValueError("coordinates before the pivot must be zero")
    norm = np.linalg.norm(a)
    if norm == 0.0:
        raise DegenerateReflection("cannot reflect towards the zero vector")
    v = a.copy()
    if a[pivot] > 0:
        # a_p - |a| without cancellation
        rest = a[pivot + 1 :]
        v[pivot] = -(rest @ rest) / (a[pivot] + norm)
    else:
        v[pivot] -= norm
    if np.linalg.norm(v) <= ALIGN_TOL * norm:
        return HouseholderReflection(a.shape[0], pivot, None)
    v.flags.writeable = False
    return HouseholderReflection(a.shape[0], pivot, v)


def apply_reflection(U: HouseholderReflection, x) -> np.ndarray:
    """``U x`` in ``O(n)`` per vector; rows of a 2-D ``x`` are separate vectors."""
    x = np.array(x, dtype=np.float64)
    if x.shape[-1] != U.n:
        raise ValueError(f"dimension mismatch: reflection has n={U.n}, input {x.shape[-1]}")
    if U.v is None:
        return x
    p = U.pivot
    v = U.v[p:]
    tail = x[..., p:]
    coef = (tail @ v) * (2.0 / (v @ v))
    tail -= np.multiply.outer(coef, v)
    return x


@dataclass(frozen=True)
class HouseholderChain:
    """The product ``U_1 U_2 ... U_k`` of reflections with increasing pivots."""

    n: int
    reflections: tuple[HouseholderReflection, ...] = field(default_factory=tuple)

    def __post_init__(self):
        pivots = [r.pivot for r in self.reflections]
        if any(b <= a for a, b in zip(pivots, pivots[1:])):
            raise ValueError("pivots must be strictly increasing")
        if any(r.n != self.n for r in self.reflections):
            raise ValueError("all reflections must act on R^n")

    def __len__(self):
        return len(self.reflections)

    def appended(self, U: HouseholderReflection) -> HouseholderChain:
        return HouseholderChain(self.n, self.reflections + (U,))

    def __call__(self, x) -> np.ndarray:
        return apply_chain(self, x)

    def transpose_apply(self, x) -> np.ndarray:
        return apply_chain_transpose(self, x)


def apply_chain(chain: HouseholderChain, x) -> np.ndarray:
    """``(U_1 ... U_k) x``: the last reflection acts first."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != chain.n:
        raise ValueError(f"dimension mismatch: chain has n={chain.n}, input {x.shape[-1]}")
    if not chain.reflections:
        return x.copy()
    for U in reversed(chain.reflections):
        x = apply_reflection(U, x)
    return x


def apply_chain_transpose(chain: HouseholderChain, x) -> np.ndarray:
    """``(U_1 ... U_k)^T x = U_k ... U_1 x`` since each factor is symmetric."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != chain.n:
        raise ValueError(f"dimension mismatch: chain has n={chain.n}, input {x.shape[-1]}")
    if not chain.reflections:
        return x.copy()
    for U in chain.reflections:
        x = apply_reflection(U, x)
    return x


def _check_pow2(n: int) -> int:
    if n < 1 or n & (n - 1):
        raise ValueError(f"Haar transform needs a power-of-two length, got {n}")
    return n.bit_length() - 1


def haar(x) -> np.ndarray:
    """Orthonormal Haar transform along the last axis.

    Output layout: ``[scaling, coarsest detail, 2 details, ..., n/2 finest details]``.
    """
    x = np.array(x, dtype=np.float64)
    n = x.shape[-1]
    levels = _check_pow2(n)
    out = np.empty_like(x)
    a = x
    for _ in range(levels):
        half = a.shape[-1] // 2
        even, odd = a[..., 0::2], a[..., 1::2]
        out[..., half : 2 * half] = (even - odd) / np.sqrt(2.0)
        a = (even + odd) / np.sqrt(2.0)
    out[..., 0:1] = a
    return out


def inverse_haar(x) -> np.ndarray:
    """Inverse (= transpose) of :func:`haar`, ``O(n)`` per vector."""
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[-1]
    levels = _check_pow2(n)
    a = x[..., 0:1].copy()
    size = 1
    for _ in range(levels):
        d = x[..., size : 2 * size]
        nxt = np.empty(x.shape[:-1] + (2 * size,))
        nxt[..., 0::2] = (a + d) / np.sqrt(2.0)
        nxt[..., 1::2] = (a - d) / np.sqrt(2.0)
        a = nxt
        size *= 2
    return a


@dataclass(frozen=True)
class CovarianceSpec:
    """Discrete Brownian path on ``n`` equidistant dates up to ``T``."""

    n: int
    T: float = 1.0

    def __post_init__(self):
        if self.n < 1 or not self.T > 0:
            raise ValueError("need n >= 1 and T > 0")

    def matrix(self) -> np.ndarray:
        k = np.arange(1, self.n + 1)
        return (self.T / self.n) * np.minimum.outer(k, k).astype(np.float64)


def forward_path(x, spec: CovarianceSpec) -> np.ndarray:
    """``S x``: scaled cumulative sums."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != spec.n:
        raise ValueError(f"path length {x.shape[-1]} does not match n={spec.n}")
    return np.sqrt(spec.T / spec.n) * np.cumsum(x, axis=-1)


def inverse_forward_path(b, spec: CovarianceSpec) -> np.ndarray:
    """``S^{-1} b``: scaled increments."""
    b = np.asarray(b, dtype=np.float64)
    if b.shape[-1] != spec.n:
        raise ValueError(f"path length {b.shape[-1]} does not match n={spec.n}")
    return np.diff(b, axis=-1, prepend=0.0) / np.sqrt(spec.T / spec.n)


def brownian_eigen(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of ``min(j, k)``, eigenvalues in descending order.

    lambda_k = 1 / (4 sin^2((2k-1) pi / (2(2n+1)))),
    v_k(j)   = 2/sqrt(2n+1) sin((2k-1) j pi / (2n+1)).
    """
    k = np.arange(1, n + 1)
    lam = 1.0 / (4.0 * np.sin((2 * k - 1) * np.pi / (2 * (2 * n + 1))) ** 2)
    j = np.arange(1, n + 1)
    V = (2.0 / np.sqrt(2 * n + 1)) * np.sin(np.outer(j, 2 * k - 1) * np.pi / (2 * n + 1))
    return lam, V


@functools.lru_cache(maxsize=32)
def _pca_unit(n: int) -> np.ndarray:
    lam, V = brownian_eigen(n)
    A = V * np.sqrt(lam)
    A.flags.writeable = False
    return A


def pca_matrix(spec: CovarianceSpec) -> np.ndarray:
    """``A = V D`` with ``A A^T = Sigma``."""
    return np.sqrt(spec.T / spec.n) * _pca_unit(spec.n)


def pca_path(x, spec: CovarianceSpec) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != spec.n:
        raise ValueError(f"path length {x.shape[-1]} does not match n={spec.n}")
    return x @ pca_matrix(spec).T


@functools.lru_cache(maxsize=32)
def pca_orthogonal(n: int) -> np.ndarray:
    """The orthogonal ``S^{-1} V D``; independent of ``T``."""
    U = np.diff(_pca_unit(n), axis=0, prepend=0.0)
    U.flags.writeable = False
    return U


def pca_transform(x) -> np.ndarray:
    """Apply ``S^{-1} V D`` so that ``forward_path(pca_transform(x)) == pca_path(x)``."""
    x = np.asarray(x, dtype=np.float64)
    return x @ pca_orthogonal(x.shape[-1]).T


def bridge_path(x, spec: CovarianceSpec) -> np.ndarray:
    """Brownian bridge as ``S H^{-1} x``."""
    return forward_path(inverse_haar(x), spec)
