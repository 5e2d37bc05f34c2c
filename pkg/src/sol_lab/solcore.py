"""The Sol group R^2 x| R with z acting by diag(e^z, e^-z).

Group law: (x1, y1, z1)(x2, y2, z2) = (x1 + e^z1 x2, y1 + e^-z1 y2, z1 + z2),
with left-invariant metric ds^2 = e^-2z dx^2 + e^2z dy^2 + dz^2.

Tangent vectors are written in the left-invariant frame
X1 = e^z d/dx, X2 = e^-z d/dy, X3 = d/dz.  With this frame the exponential
map is continuous across a3 = 0 and g^1 = g holds identically.

Scalar functions act on :class:`SolPoint`; the ``*_batch`` variants act on
``(..., 3)`` arrays and are what the curve samplers use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import DomainError

__all__ = [
    "SolPoint",
    "TangentVector",
    "MetricTensor",
    "IDENTITY",
    "sol_mul",
    "sol_inv",
    "sol_exp",
    "sol_log",
    "one_param",
    "metric_at",
    "curve_length",
    "sol_mul_batch",
    "sol_inv_batch",
    "sol_exp_batch",
    "sol_log_batch",
    "one_param_batch",
]

# below this |z| the divided difference expm1(w)/w is replaced by 1 + w/2
Z_ZERO = 1e-10


def _finite(*vals: float) -> None:
    if not all(math.isfinite(v) for v in vals):
        raise DomainError(f"coordinates must be finite, got {vals}")


@dataclass(frozen=True)
class SolPoint:
    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        for name in ("x", "y", "z"):
            object.__setattr__(self, name, float(getattr(self, name)))
        _finite(self.x, self.y, self.z)

    def __iter__(self) -> Iterator[float]:
        return iter((self.x, self.y, self.z))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    @classmethod
    def from_seq(cls, seq: Sequence[float]) -> SolPoint:
        x, y, z = (float(c) for c in seq)
        return cls(x, y, z)

    def __mul__(self, other: SolPoint) -> SolPoint:
        if not isinstance(other, SolPoint):
            return NotImplemented
        return sol_mul(self, other)


@dataclass(frozen=True)
class TangentVector:
    """Coefficients (a1, a2, a3) in the frame X1, X2, X3."""

    a1: float
    a2: float
    a3: float

    def __post_init__(self) -> None:
        _finite(self.a1, self.a2, self.a3)

    def __iter__(self) -> Iterator[float]:
        return iter((self.a1, self.a2, self.a3))

    def as_array(self) -> np.ndarray:
        return np.array([self.a1, self.a2, self.a3], dtype=float)


@dataclass(frozen=True)
class MetricTensor:
    gxx: float
    gyy: float
    gzz: float = 1.0


IDENTITY = SolPoint(0.0, 0.0, 0.0)


def _phi(w: float) -> float:
    """expm1(w)/w, extended continuously by 1 at w = 0."""
    if abs(w) < Z_ZERO:
        return 1.0 + 0.5 * w
    return math.expm1(w) / w


def sol_mul(g: SolPoint, h: SolPoint) -> SolPoint:
    ez = math.exp(g.z)
    return SolPoint(g.x + ez * h.x, g.y + h.y / ez, g.z + h.z)


def sol_inv(g: SolPoint) -> SolPoint:
    ez = math.exp(g.z)
    return SolPoint(-g.x / ez, -g.y * ez, -g.z)


def sol_exp(v: TangentVector, t: float = 1.0) -> SolPoint:
    """exp(tX) for X = a1 X1 + a2 X2 + a3 X3."""
    w = v.a3 * t
    return SolPoint(v.a1 * t * _phi(w), v.a2 * t * _phi(-w), w)


def sol_log(g: SolPoint) -> TangentVector:
    """The unique X with exp(X) = g."""
    return TangentVector(g.x / _phi(g.z), g.y / _phi(-g.z), g.z)


def one_param(g: SolPoint, t: float) -> SolPoint:
    """g^t = exp(t log g)."""
    tz = t * g.z
    return SolPoint(
        g.x * t * _phi(tz) / _phi(g.z),
        g.y * t * _phi(-tz) / _phi(-g.z),
        tz,
    )


def metric_at(p: SolPoint) -> MetricTensor:
    return MetricTensor(math.exp(-2.0 * p.z), math.exp(2.0 * p.z), 1.0)


def curve_length(samples: Sequence[SolPoint]) -> float:
    """Polyline length with the metric frozen at each segment midpoint."""
    if len(samples) < 2:
        raise DomainError("curve_length needs at least two samples")
    pts = np.array([tuple(p) for p in samples], dtype=float)
    return float(_polyline_length(pts))


def _polyline_length(pts: np.ndarray) -> float:
    d = np.diff(pts, axis=0)
    zm = 0.5 * (pts[1:, 2] + pts[:-1, 2])
    seg = np.sqrt(np.exp(-2.0 * zm) * d[:, 0] ** 2 + np.exp(2.0 * zm) * d[:, 1] ** 2 + d[:, 2] ** 2)
    return seg.sum()


# --- vectorized forms -------------------------------------------------------


def _phi_arr(w: np.ndarray) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    small = np.abs(w) < Z_ZERO
    safe = np.where(small, 1.0, w)
    return np.where(small, 1.0 + 0.5 * w, np.expm1(safe) / safe)


def sol_mul_batch(g: np.ndarray, h: np.ndarray) -> np.ndarray:
    g = np.asarray(g, dtype=float)
    h = np.asarray(h, dtype=float)
    ez = np.exp(g[..., 2])
    return np.stack([g[..., 0] + ez * h[..., 0], g[..., 1] + h[..., 1] / ez, g[..., 2] + h[..., 2]], axis=-1)


def sol_inv_batch(g: np.ndarray) -> np.ndarray:
    g = np.asarray(g, dtype=float)
    ez = np.exp(g[..., 2])
    return np.stack([-g[..., 0] / ez, -g[..., 1] * ez, -g[..., 2]], axis=-1)


def sol_exp_batch(v: np.ndarray, t) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    t = np.asarray(t, dtype=float)
    w = v[..., 2] * t
    return np.stack([v[..., 0] * t * _phi_arr(w), v[..., 1] * t * _phi_arr(-w), w], axis=-1)


def sol_log_batch(g: np.ndarray) -> np.ndarray:
    g = np.asarray(g, dtype=float)
    z = g[..., 2]
    return np.stack([g[..., 0] / _phi_arr(z), g[..., 1] / _phi_arr(-z), z], axis=-1)


def one_param_batch(g: np.ndarray, t) -> np.ndarray:
    g = np.asarray(g, dtype=float)
    t = np.asarray(t, dtype=float)
    z = g[..., 2]
    tz = t * z
    return np.stack(
        [g[..., 0] * t * _phi_arr(tz) / _phi_arr(z), g[..., 1] * t * _phi_arr(-tz) / _phi_arr(-z), tz],
        axis=-1,
    )
