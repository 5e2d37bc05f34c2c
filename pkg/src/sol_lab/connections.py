"""Connecting curves of the quotient M = Sol / Gamma.

A curve from the identity coset to m = g Gamma is t -> exp(t X) with
exp(X) in g Gamma, so the directions are Log(m) = {log(g gamma)}.  The set is
infinite; :class:`SearchWindow` truncates it to |p| <= P, |q| <= Q, |r| <= R.
Pairs (g1 Gamma, g2 Gamma) reduce to (Gamma, g1^-1 g2 Gamma) by left
translation with g1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from . import _kernels
from .errors import DomainError
from .lattice import ExactSolPoint, SemidirectLattice, embed, membership, nearest_element
from .solcore import (
    IDENTITY,
    SolPoint,
    TangentVector,
    sol_exp,
    sol_exp_batch,
    sol_inv,
    sol_log,
    sol_mul,
    sol_mul_batch,
)

__all__ = [
    "SearchWindow",
    "CosetPoint",
    "ConnectionCurve",
    "BlockingReport",
    "log_set",
    "eval_curve",
    "sample_curve",
    "midpoint_set",
    "blocking_check",
    "pair_curves",
    "coset_distance",
]

Rep = Union[SolPoint, ExactSolPoint]

# two points closer than this in sup-norm count as one midpoint
DEDUP_TOL = 1e-10


@dataclass(frozen=True)
class SearchWindow:
    pmax: int
    qmax: int
    rmax: int
    tgrid: int = 63

    def __post_init__(self) -> None:
        for name in ("pmax", "qmax", "rmax", "tgrid"):
            if int(getattr(self, name)) < 1:
                raise DomainError(f"window bound {name} must be >= 1")

    @classmethod
    def parse(cls, text: str, tgrid: int = 63) -> SearchWindow:
        parts = [int(t) for t in text.split(",")]
        if len(parts) != 3:
            raise DomainError("window needs three comma-separated integers P,Q,R")
        return cls(*parts, tgrid=tgrid)

    def triples(self) -> list[tuple[int, int, int]]:
        """(p, q, r) in the window, ordered by (r, p, q)."""
        return [
            (p, q, r)
            for r in range(-self.rmax, self.rmax + 1)
            for p in range(-self.pmax, self.pmax + 1)
            for q in range(-self.qmax, self.qmax + 1)
        ]

    def t_samples(self) -> np.ndarray:
        """Interior parameters k / (tgrid + 1); an odd ``tgrid`` includes 1/2."""
        return np.arange(1, self.tgrid + 1) / (self.tgrid + 1)


def _float(rep: Rep) -> SolPoint:
    return rep.to_float() if isinstance(rep, ExactSolPoint) else rep


@dataclass(frozen=True, eq=False)
class CosetPoint:
    """The point rep * Gamma of the quotient."""

    representative: Rep
    lattice: SemidirectLattice = field(repr=False)

    @property
    def point(self) -> SolPoint:
        return _float(self.representative)

    def translate(self, p: int, q: int, r: int) -> Rep:
        """rep * embed(p, q, r), exact when the representative allows it."""
        g = self.representative
        if isinstance(g, ExactSolPoint) and g.zeta == 0.0:
            return g * embed(self.lattice, p, q, r)
        return sol_mul(_float(g), self.lattice.embed_float(p, q, r))

    def same_coset(self, other: CosetPoint, tol: float = 1e-9) -> bool:
        """rep1^-1 rep2 in Gamma; exact for exact representatives."""
        a, b = self.representative, other.representative
        if isinstance(a, ExactSolPoint) and isinstance(b, ExactSolPoint):
            if a.zeta == 0.0 and b.zeta == 0.0:
                return membership(self.lattice, a.inverse() * b) is not None
            if a.zeta != b.zeta:
                return False
        _, res = nearest_element(self.lattice, sol_mul(sol_inv(_float(a)), _float(b)))
        return res < tol

    def __eq__(self, other) -> bool:
        if not isinstance(other, CosetPoint):
            return NotImplemented
        return self.same_coset(other)

    __hash__ = None


@dataclass(frozen=True)
class ConnectionCurve:
    """t -> base * exp(t direction), ending at the lattice translate ``target``."""

    direction: TangentVector
    index: tuple[int, int, int]
    target: Rep
    base: SolPoint = IDENTITY

    def __call__(self, t: float) -> SolPoint:
        return eval_curve(self, t)


def log_set(m: CosetPoint, w: SearchWindow) -> list[ConnectionCurve]:
    """Directions log(g embed(p, q, r)) over the window, ordered by (r, p, q)."""
    out = []
    for p, q, r in w.triples():
        target = m.translate(p, q, r)
        out.append(ConnectionCurve(sol_log(_float(target)), (p, q, r), target))
    return out


def eval_curve(c: ConnectionCurve, t: float) -> SolPoint:
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"curve parameter must lie in [0, 1], got {t}")
    pt = sol_exp(c.direction, t)
    if c.base is IDENTITY:
        return pt
    return sol_mul(c.base, pt)


def sample_curve(c: ConnectionCurve, ts: Sequence[float]) -> np.ndarray:
    ts = np.asarray(ts, dtype=float)
    if ts.size and (ts.min() < 0.0 or ts.max() > 1.0):
        raise DomainError("curve parameters must lie in [0, 1]")
    pts = sol_exp_batch(c.direction.as_array(), ts)
    if c.base is not IDENTITY:
        pts = sol_mul_batch(np.broadcast_to(c.base.as_array(), pts.shape), pts)
    return pts


def pair_curves(L: SemidirectLattice, g1: SolPoint, g2: SolPoint, w: SearchWindow) -> list[ConnectionCurve]:
    """Curves from g1 Gamma to g2 Gamma, by translating those of g1^-1 g2 Gamma."""
    m = CosetPoint(sol_mul(sol_inv(g1), g2), L)
    return [
        ConnectionCurve(c.direction, c.index, sol_mul(g1, _float(c.target)), g1)
        for c in log_set(m, w)
    ]


def coset_distance(L: SemidirectLattice, points, reps) -> tuple[np.ndarray, np.ndarray]:
    """First-order distance from each point to the nearest coset in ``reps``."""
    if isinstance(points, np.ndarray):
        pts = points.reshape(-1, 3)
    else:
        pts = np.array([tuple(_float(p)) for p in points], dtype=float).reshape(-1, 3)
    bpts = np.array([tuple(_float(b)) for b in reps], dtype=float).reshape(-1, 3)
    return _kernels.coset_distances(pts, bpts, L.P_float, L.P_inv_float, L.s)


def midpoint_set(m: CosetPoint, w: SearchWindow, modulo_lattice: bool = False) -> list[SolPoint]:
    """Midpoints c(1/2) of the curves in ``log_set(m, w)``, deduplicated.

    By default points are compared in Sol (sup-norm, ``DEDUP_TOL``).  With
    ``modulo_lattice`` two midpoints are merged when they lie in one coset.
    """
    mids = [eval_curve(c, 0.5) for c in log_set(m, w)]
    kept: list[SolPoint] = []
    arr = np.empty((0, 3))
    for pt in mids:
        v = pt.as_array()
        if arr.shape[0]:
            if modulo_lattice:
                d, _ = coset_distance(m.lattice, [pt], kept)
                if d[0] < DEDUP_TOL:
                    continue
            elif np.min(np.max(np.abs(arr - v), axis=1)) < DEDUP_TOL:
                continue
        kept.append(pt)
        arr = np.vstack([arr, v])
    return kept


@dataclass
class BlockingReport:
    blocked_curves: list[tuple[int, int, int]]
    evading_curves: list[tuple[int, int, int]]
    min_distance: dict[tuple[int, int, int], float]
    eps: float
    tgrid: int

    @property
    def evades(self) -> bool:
        return bool(self.evading_curves)

    def to_json(self) -> dict:
        return {
            "eps": self.eps,
            "tgrid": self.tgrid,
            "blocked_curves": [list(i) for i in self.blocked_curves],
            "evading_curves": [list(i) for i in self.evading_curves],
            "min_distance": [
                {"p": i[0], "q": i[1], "r": i[2], "distance": d} for i, d in self.min_distance.items()
            ],
        }


def blocking_check(
    m: CosetPoint,
    B: Sequence[Rep],
    eps: float,
    w: SearchWindow,
) -> BlockingReport:
    """Classify each curve of ``log_set(m, w)`` as blocked or evading.

    A curve is blocked when one of its ``w.tgrid`` interior samples comes
    within ``eps`` of the coset of some point of ``B`` (first-order metric at
    the sample).  An evading verdict holds at this resolution; a blocked one
    is only indicative.
    """
    if eps <= 0:
        raise DomainError("eps must be positive")
    L = m.lattice
    if len(B):
        d, _ = coset_distance(L, B, [IDENTITY, m.point])
        if np.any(d <= eps):
            raise DomainError("blocking points must stay eps away from both endpoints' cosets")
    ts = w.t_samples()
    blocked, evading, dist = [], [], {}
    for c in log_set(m, w):
        if len(B):
            dmin = float(coset_distance(L, sample_curve(c, ts), B)[0].min())
        else:
            dmin = float("inf")
        dist[c.index] = dmin
        (blocked if dmin < eps else evading).append(c.index)
    return BlockingReport(blocked, evading, dist, eps, w.tgrid)
