"""Uniform point sources and the map to standard normals.

Randomly shifted Sobol points drive the QMC estimators; a 64-bit PCG stream
pushed through the same inverse normal CDF gives the MC baseline, so the two
only differ in where the uniforms come from.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from importlib import resources

import numpy as np
from scipy.special import ndtr

BITS = 32
_SCALE = 2.0**-BITS
_MASK64 = (1 << 64) - 1
_BELOW_ONE = np.nextafter(1.0, 0.0)


class DirectionTableError(ValueError):
    """Requested dimension is not covered by the shipped direction numbers."""


@functools.lru_cache(maxsize=None)
def _read_table(name: str = "joe_kuo_d4096.txt") -> tuple[tuple[int, int, tuple[int, ...]], ...]:
    text = resources.files("mlqmc").joinpath("data", name).read_text()
    rows = []
    for line in text.splitlines()[1:]:
        fields = line.split()
        if not fields:
            continue
        d, s, a = int(fields[0]), int(fields[1]), int(fields[2])
        m = tuple(int(f) for f in fields[3 : 3 + s])
        if len(m) != s or d != len(rows) + 2:
            raise DirectionTableError(f"malformed direction-number line for dimension {d}")
        rows.append((s, a, m))
    return tuple(rows)


def max_dimension() -> int:
    return len(_read_table()) + 1


@functools.lru_cache(maxsize=64)
def direction_numbers(dimension: int) -> np.ndarray:
    """Direction integers ``V[bit, dim]`` scaled to 32 bits.

    Dimension 1 is the radical inverse; dimensions >= 2 follow the
    Joe-Kuo recurrence from the primitive polynomial ``(s, a)``.
    """
    table = _read_table()
    if dimension < 1:
        raise ValueError("dimension must be positive")
    if dimension > len(table) + 1:
        raise DirectionTableError(
            f"dimension {dimension} exceeds the direction-number table ({len(table) + 1})"
        )
    V = np.zeros((BITS, dimension), dtype=np.uint64)
    V[:, 0] = [1 << (BITS - 1 - k) for k in range(BITS)]
    for j in range(1, dimension):
        s, a, m = table[j - 1]
        v = [0] * BITS
        for k in range(min(s, BITS)):
            v[k] = m[k] << (BITS - 1 - k)
        for k in range(s, BITS):
            x = v[k - s] ^ (v[k - s] >> s)
            for i in range(1, s):
                if (a >> (s - 1 - i)) & 1:
                    x ^= v[k - i]
            v[k] = x
        V[:, j] = v
    V = V.astype(np.uint32)
    V.flags.writeable = False
    return V


class SobolGenerator:
    """Unscrambled Sobol sequence in natural index order, starting at index 1.

    The all-zeros point at index 0 is never emitted. Points are produced by
    XOR-ing a prefix-combined direction integer per step, so a block of
    ``n`` points costs ``O(n * d)``.
    """

    def __init__(self, dimension: int):
        self.dimension = int(dimension)
        self._V = direction_numbers(self.dimension)
        # P[c] = V[0] ^ ... ^ V[c]: going i-1 -> i flips bits 0..ctz(i)
        self._prefix = np.bitwise_xor.accumulate(self._V, axis=0)
        self.reset()

    def reset(self) -> None:
        self.cursor = 1
        self._state = np.zeros(self.dimension, dtype=np.uint32)

    def integers(self, n: int) -> np.ndarray:
        """Next ``n`` points as 32-bit integers, shape ``(n, d)``."""
        if n < 0:
            raise ValueError("n must be non-negative")
        if self.cursor + n > 1 << BITS:
            raise OverflowError("Sobol index exceeds 2**32")
        if n == 0:
            return np.zeros((0, self.dimension), dtype=np.uint32)
        idx = np.arange(self.cursor, self.cursor + n, dtype=np.uint64)
        ctz = _trailing_zeros(idx)
        steps = self._prefix[ctz]
        steps[0] ^= self._state
        out = np.bitwise_xor.accumulate(steps, axis=0)
        self._state = out[-1].copy()
        self.cursor += n
        return out

    def points(self, n: int) -> np.ndarray:
        return self.integers(n) * _SCALE

    def next_point(self) -> np.ndarray:
        return self.points(1)[0]


def _trailing_zeros(idx: np.ndarray) -> np.ndarray:
    low = idx & (~idx + np.uint64(1))
    return np.log2(low.astype(np.float64)).astype(np.intp)


@dataclass(frozen=True)
class RandomShift:
    """Offsets in [0, 1)^d drawn once per replication.

    :func:`shift` applies them as a Cranley-Patterson rotation (addition
    modulo 1), :func:`digital_shift` as a bitwise XOR.
    """

    offsets: np.ndarray

    def __post_init__(self):
        off = np.asarray(self.offsets, dtype=np.float64)
        if off.ndim != 1 or np.any(off < 0) or np.any(off >= 1):
            raise ValueError("shift offsets must be a vector in [0, 1)^d")
        object.__setattr__(self, "offsets", off)

    @classmethod
    def draw(cls, rng: np.random.Generator, dimension: int) -> RandomShift:
        return cls(rng.random(dimension))

    @property
    def dimension(self) -> int:
        return self.offsets.shape[0]


def shift(point, s: RandomShift) -> np.ndarray:
    """Fractional part of ``point + s.offsets``; works row-wise on 2-D input."""
    x = np.asarray(point, dtype=np.float64)
    if x.shape[-1] != s.dimension:
        raise ValueError(f"dimension mismatch: point has {x.shape[-1]}, shift has {s.dimension}")
    y = x + s.offsets
    y -= np.floor(y)
    # x + s can round up to exactly 1.0
    y[y >= 1.0] = 0.0
    return y


def digital_shift(integers, s: RandomShift) -> np.ndarray:
    """XOR the 32-bit digits of each point with those of ``s.offsets``.

    Offset digits beyond bit 32 are added unchanged (the points have none),
    so a uniform offset gives every point a uniform marginal while each
    dyadic block of the sequence stays a net.
    """
    x = np.asarray(integers)
    if x.shape[-1] != s.dimension:
        raise ValueError(f"dimension mismatch: point has {x.shape[-1]}, shift has {s.dimension}")
    scaled = s.offsets * 2.0**BITS
    hi = np.floor(scaled)
    lo = scaled - hi
    u = ((x ^ hi.astype(np.uint32)) + lo) * _SCALE
    # rounding of (2**32 - 1) + lo may reach 1.0
    return np.minimum(u, _BELOW_ONE)


# Acklam's rational approximation, refined by one Halley step below.
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425
_SQRT_2PI = np.sqrt(2.0 * np.pi)


def inverse_normal_cdf(u):
    """Standard normal quantile, accurate to about 1e-15 absolute.

    Works on the lower tail ``p = min(u, 1 - u)`` (``1 - u`` is exact for
    ``u >= 0.5``) so that the refinement against ``ndtr`` never suffers
    cancellation, then restores the sign.

    Raises
    ------
    ValueError
        If any ``u`` lies outside the open interval (0, 1).
    """
    u = np.asarray(u, dtype=np.float64)
    scalar = u.ndim == 0
    u = np.atleast_1d(u)
    if not np.all((u > 0.0) & (u < 1.0)):
        bad = u[~((u > 0.0) & (u < 1.0))][0]
        raise ValueError(f"inverse_normal_cdf is defined on (0, 1), got {bad!r}")

    upper = u > 0.5
    p = np.where(upper, 1.0 - u, u)
    z = np.empty_like(p)

    tail = p < _P_LOW
    if np.any(tail):
        q = np.sqrt(-2.0 * np.log(p[tail]))
        z[tail] = (((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]) / (
            (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        )
    mid = ~tail
    if np.any(mid):
        q = p[mid] - 0.5
        r = q * q
        z[mid] = (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q / (
            ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
        )

    e = ndtr(z) - p
    t = e * _SQRT_2PI * np.exp(0.5 * z * z)
    z = z - t / (1.0 + 0.5 * z * t)

    z = np.where(upper, -z, z)
    return z[0] if scalar else z


def splitmix64(x: int) -> int:
    """One round of the SplitMix64 output function on a 64-bit integer."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def replication_seed(master_seed: int, index: int) -> int:
    """Seed of replication ``index``: ``splitmix64(splitmix64(master) ^ index)``."""
    return splitmix64(splitmix64(int(master_seed) & _MASK64) ^ (int(index) & _MASK64))


def seeded_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed) & _MASK64))


class QMCSource:
    """Sobol points under one random shift, fixed for the source's life.

    ``randomization`` is ``"digital"`` (XOR with the offset's binary digits)
    or ``"cp"`` (add the offset modulo 1).
    """

    RANDOMIZATIONS = ("digital", "cp")

    def __init__(self, dimension: int, rng: np.random.Generator | None = None,
                 offsets: RandomShift | None = None, randomization: str = "digital"):
        if randomization not in self.RANDOMIZATIONS:
            raise ValueError(f"unknown randomization {randomization!r}")
        self.sobol = SobolGenerator(dimension)
        if offsets is None:
            offsets = RandomShift.draw(rng if rng is not None else np.random.default_rng(), dimension)
        if offsets.dimension != dimension:
            raise ValueError("shift dimension does not match the generator")
        self.shift = offsets
        self.randomization = randomization
        self.dimension = dimension

    def uniforms(self, n: int) -> np.ndarray:
        if self.randomization == "digital":
            return digital_shift(self.sobol.integers(n), self.shift)
        return shift(self.sobol.points(n), self.shift)


class MCSource:
    """Pseudorandom uniforms in the open interval (0, 1) from a PCG64 stream."""

    def __init__(self, dimension: int, rng: np.random.Generator):
        self.dimension = dimension
        self.rng = rng

    def uniforms(self, n: int) -> np.ndarray:
        k = self.rng.integers(0, 1 << 53, size=(n, self.dimension), dtype=np.int64)
        return (k + 0.5) * 2.0**-53


class FixedSource:
    """Replays a given array of uniform points; handy for tests and demos."""

    def __init__(self, points):
        self._points = np.atleast_2d(np.asarray(points, dtype=np.float64))
        self.dimension = self._points.shape[1]
        self._pos = 0

    def uniforms(self, n: int) -> np.ndarray:
        if self._pos + n > self._points.shape[0]:
            raise IndexError("fixed source exhausted")
        out = self._points[self._pos : self._pos + n]
        self._pos += n
        return out


def normal_vector(source, d: int | None = None) -> np.ndarray:
    """One standard normal vector from the next point of ``source``."""
    return normal_samples(source, 1, d)[0]


def normal_samples(source, n: int, d: int | None = None) -> np.ndarray:
    """``n`` standard normal vectors, shape ``(n, d)``."""
    if d is not None and d != source.dimension:
        raise ValueError(f"source has dimension {source.dimension}, expected {d}")
    return inverse_normal_cdf(source.uniforms(n))
