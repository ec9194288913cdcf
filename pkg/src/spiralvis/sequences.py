"""Spherical sequences feeding the spiral construction.

Planar kinds: ``golden-angle`` (angle 2*pi*n*theta, default theta the golden
ratio) and ``rational-ladder`` (angle 2*pi*p/k from the triangular
decomposition n = k(k+1)/2 + p). For S^2 a block-structured spherical
Fibonacci lattice stands in for explicit higher-dimensional constructions;
``constant`` is a negative control and ``file`` reads user-supplied points.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

GOLDEN_RATIO = (1.0 + math.sqrt(5.0)) / 2.0
TWO_PI = 2.0 * math.pi

KINDS = ("golden-angle", "rational-ladder", "fibonacci-sphere", "constant", "file")


@dataclass(frozen=True)
class TriangularDecomposition:
    """n = k(k+1)/2 + p with k >= 1 and 0 <= p <= k; unique."""

    k: int
    p: int

    @property
    def n(self) -> int:
        return self.k * (self.k + 1) // 2 + self.p


def triangular_decompose(n: int) -> TriangularDecomposition:
    """Unique (k, p) with n = k(k+1)/2 + p, 0 <= p <= k.

    Integer square root plus local correction; never floating point alone.
    """
    if n < 1:
        raise ValueError(f"index must be >= 1, got {n}")
    k = (math.isqrt(8 * n + 1) - 1) // 2
    while (k + 1) * (k + 2) // 2 <= n:
        k += 1
    while k * (k + 1) // 2 > n:
        k -= 1
    k = max(k, 1)
    return TriangularDecomposition(k=k, p=n - k * (k + 1) // 2)


def triangular_decompose_batch(ns: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized (k, p) arrays for an int64 index array."""
    ns = np.asarray(ns, dtype=np.int64)
    if ns.size and ns.min() < 1:
        raise ValueError("indices must be >= 1")
    k = ((np.sqrt(8.0 * ns + 1.0) - 1.0) / 2.0).astype(np.int64)
    # float sqrt can be off by one near triangular boundaries
    k += (k + 1) * (k + 2) // 2 <= ns
    k -= (k * (k + 1) // 2 > ns) & (k > 1)
    np.maximum(k, 1, out=k)
    p = ns - k * (k + 1) // 2
    return k, p


def fractional_multiples(theta: float, ns: np.ndarray) -> np.ndarray:
    """{n * theta} computed with a split-theta trick.

    Plain float64 n*theta loses ~n*eps absolute accuracy; splitting theta into
    a 26-bit head (product exact for n < 2^26) and a tail keeps the fractional
    part accurate to ~1e-12 for n up to 1e7.
    """
    ns = np.asarray(ns, dtype=np.float64)
    scale = 2.0**26
    hi = math.floor(theta * scale) / scale
    lo = theta - hi
    frac = (ns * hi) % 1.0 + ns * lo
    return frac % 1.0


def _fibonacci_sphere_block(ns: np.ndarray) -> np.ndarray:
    """Blocked spherical Fibonacci lattice on S^2.

    Index n in [2^b, 2^(b+1)) is point n - 2^b of a 2^b-point lattice, so every
    dyadic tail window contains one full lattice.
    """
    ns = np.asarray(ns, dtype=np.int64)
    b = np.int64(np.floor(np.log2(ns)))
    # guard against log2 rounding at exact powers of two
    b += (np.int64(1) << (b + 1)) <= ns
    b -= (np.int64(1) << b) > ns
    size = np.int64(1) << b
    i = ns - size
    z = 1.0 - (2.0 * i + 1.0) / size
    azimuth = TWO_PI * fractional_multiples(GOLDEN_RATIO - 1.0, i)
    s = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    return np.column_stack([s * np.cos(azimuth), s * np.sin(azimuth), z])


@dataclass
class SequenceSpec:
    """Which spherical sequence to use, and in which dimension.

    ``theta`` applies to golden-angle, ``v`` to constant, ``path`` to file.
    """

    kind: str
    d: int = 1
    theta: float = GOLDEN_RATIO
    v: np.ndarray | None = None
    path: str | None = None
    _file_points: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown sequence kind {self.kind!r}; expected one of {KINDS}")
        if self.kind in ("golden-angle", "rational-ladder") and self.d != 1:
            raise ValueError(f"{self.kind} requires d=1, got d={self.d}")
        if self.kind == "fibonacci-sphere" and self.d != 2:
            raise ValueError(f"fibonacci-sphere requires d=2, got d={self.d}")
        if self.kind == "constant":
            if self.v is None:
                raise ValueError("constant kind needs a direction v")
            v = np.asarray(self.v, dtype=np.float64)
            if v.size != self.d + 1:
                raise ValueError(f"constant direction has {v.size} coords, expected {self.d + 1}")
            self.v = v / np.linalg.norm(v)
        if self.kind == "file" and self.path is None:
            raise ValueError("file kind needs a path")

    def file_points(self) -> np.ndarray:
        if self._file_points is None:
            self._file_points = load_sequence_file(self.path, self.d)
        return self._file_points

    def to_json(self) -> dict:
        params: dict = {}
        if self.kind == "golden-angle":
            params["theta"] = self.theta
        elif self.kind == "constant":
            params["v"] = list(map(float, self.v))
        elif self.kind == "file":
            params["path"] = self.path
        return {"kind": self.kind, "d": self.d, "params": params}

    @classmethod
    def from_json(cls, obj: dict) -> "SequenceSpec":
        params = obj.get("params", {})
        return cls(
            kind=obj["kind"],
            d=int(obj["d"]),
            theta=float(params.get("theta", GOLDEN_RATIO)),
            v=np.asarray(params["v"], dtype=np.float64) if "v" in params else None,
            path=params.get("path"),
        )


def load_sequence_file(path: str | Path, d: int) -> np.ndarray:
    """One point per line, d+1 whitespace-separated decimals, normalized on load."""
    pts = np.loadtxt(path, dtype=np.float64, ndmin=2)
    if pts.shape[1] != d + 1:
        raise ValueError(f"{path}: expected {d + 1} columns, found {pts.shape[1]}")
    norms = np.linalg.norm(pts, axis=1, keepdims=True)
    if np.any(norms == 0.0):
        raise ValueError(f"{path}: zero vector cannot be normalized")
    return pts / norms


def save_sequence_file(path: str | Path, points: np.ndarray) -> None:
    np.savetxt(path, np.asarray(points, dtype=np.float64), fmt="%.17g")


def direction_batch(spec: SequenceSpec, ns: np.ndarray) -> np.ndarray:
    """Directions u_n for an array of indices, as an (m, d+1) array."""
    ns = np.asarray(ns, dtype=np.int64)
    if ns.size and ns.min() < 1:
        raise ValueError("indices must be >= 1")
    if spec.kind == "golden-angle":
        angles = TWO_PI * fractional_multiples(spec.theta, ns)
        return np.column_stack([np.cos(angles), np.sin(angles)])
    if spec.kind == "rational-ladder":
        k, p = triangular_decompose_batch(ns)
        angles = TWO_PI * (p / k)
        return np.column_stack([np.cos(angles), np.sin(angles)])
    if spec.kind == "fibonacci-sphere":
        return _fibonacci_sphere_block(ns)
    if spec.kind == "constant":
        return np.broadcast_to(spec.v, (ns.size, spec.d + 1)).copy()
    if spec.kind == "file":
        pts = spec.file_points()
        if ns.size and ns.max() > len(pts):
            raise IndexError(
                f"sequence file holds {len(pts)} points, index {int(ns.max())} requested"
            )
        return pts[ns - 1]
    raise ValueError(f"unknown kind {spec.kind!r}")


def sequence_term(spec: SequenceSpec, n: int) -> np.ndarray:
    """The direction u_n, a unit vector in R^(d+1)."""
    if n < 1:
        raise ValueError(f"index must be >= 1, got {n}")
    return direction_batch(spec, np.array([n]))[0]


def ladder_fractions(ns: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(k, p) for the rational-ladder; exposed for exact-arithmetic tests."""
    return triangular_decompose_batch(ns)


def star_discrepancy(values: np.ndarray) -> float:
    """Star discrepancy of a sample in [0, 1): max deviation of the empirical CDF."""
    xs = np.sort(np.asarray(values, dtype=np.float64))
    n = len(xs)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - xs), np.max(xs - (i - 1) / n)))
