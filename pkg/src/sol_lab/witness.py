"""Non-blockability certificates for points on the planes x = 0 and y = 0.

Take m = g Gamma with g = (0, y, z), y != 0, and the lattice translates
g gamma_i = (0, y, z + s r_i).  The point of the i-th connecting curve at
time t is

    (g gamma_i)^t = (0, y R(t, H_i), t H_i),   H_i = z + s r_i,
    R(t, H) = (e^-tH - 1) / (e^-H - 1).

Points of a coset on the plane x = 0 form one vertical line
(0, level, ref + s Z), because p + alpha q = 0 forces p = q = 0 when
alpha is irrational.  Hitting that line at height ``level`` needs

    t_i = -log(1 + (level / y)(e^-H_i - 1)) / H_i

and membership then needs an integer residual
rtilde = (t_i H_i - ref) / s.  For two indices of one coset,

    (e^-H_i - 1 + y/level) / (e^-H_j - 1 + y/level) = e^(s rtilde_ij),

and the left side tends to 1, so past an index i0 the residual must be 0,
which forces r_i = r_j.  Each coset therefore captures only finitely many
curves.

The case g = (x, 0, z) uses translates (0, 0, -s r_i) and the first
coordinate; it runs through the same code with ``axis == "x"``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import mpmath
import numpy as np

from . import _kernels
from .connections import CosetPoint, SearchWindow
from .errors import DomainError, NoSolutionError, RepresentativeDegeneracyError
from .lattice import (
    ExactSolPoint,
    SemidirectLattice,
    membership,
    plane_offsets,
    shift_representative,
)
from .solcore import SolPoint

__all__ = [
    "WitnessConfig",
    "WitnessReport",
    "DensityReport",
    "curve_point",
    "solve_t",
    "coset_residual",
    "ratio_check",
    "escape_index",
    "certify_nonblockable",
    "mirrored_case",
    "density_probe",
    "resolve_precision",
    "NON_BLOCKED",
    "INCONCLUSIVE",
]

NON_BLOCKED = "NON_BLOCKED_AT_SCALE"
INCONCLUSIVE = "INCONCLUSIVE"

INTEGER_TOL = 1e-9
PRECISIONS = ("double", "big50")

_MP50 = mpmath.MPContext()
_MP50.dps = 50


def resolve_precision(mode: Optional[str] = None) -> str:
    """``SOL_LAB_PRECISION`` wins over the requested mode."""
    env = os.environ.get("SOL_LAB_PRECISION")
    mode = env or mode or "double"
    if mode not in PRECISIONS:
        raise DomainError(f"precision must be one of {PRECISIONS}, got {mode!r}")
    return mode


class _Double:
    exp = staticmethod(math.exp)
    expm1 = staticmethod(math.expm1)
    log1p = staticmethod(math.log1p)

    @staticmethod
    def num(x):
        return float(x)


class _Big50:
    exp = staticmethod(_MP50.exp)
    expm1 = staticmethod(_MP50.expm1)
    log1p = staticmethod(_MP50.log1p)

    @staticmethod
    def num(x):
        return _MP50.mpf(x)


@dataclass(frozen=True)
class WitnessConfig:
    lattice: SemidirectLattice
    g: SolPoint
    imax: int = 12
    t1: float = 0.5
    r_sequence: Optional[tuple[int, ...]] = None
    precision: str = "double"
    tol: float = INTEGER_TOL
    axis: str = field(init=False)

    def __post_init__(self) -> None:
        g = self.g
        if (g.x == 0.0) == (g.y == 0.0):
            raise DomainError("g must have exactly one of x, y equal to zero")
        if not 0.0 < self.t1 < 1.0:
            raise DomainError("t1 must lie in (0, 1)")
        if self.imax < 0:
            raise DomainError("imax must be non-negative")
        if self.precision not in PRECISIONS:
            raise DomainError(f"precision must be one of {PRECISIONS}")
        seq = tuple(range(1, self.imax + 1)) if self.r_sequence is None else tuple(self.r_sequence)
        if len(seq) < self.imax:
            raise DomainError("r_sequence is shorter than imax")
        seq = seq[: self.imax]
        if any(b <= a for a, b in zip(seq, seq[1:])):
            raise DomainError("r_sequence must be strictly increasing")
        if g.z == 0.0:
            g = shift_representative(self.lattice, g)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "r_sequence", seq)
        object.__setattr__(self, "axis", "y" if g.x == 0.0 else "x")

    @property
    def amplitude(self) -> float:
        """The nonzero coordinate of g."""
        return self.g.y if self.axis == "y" else self.g.x

    @property
    def orientation(self) -> int:
        """+1 when third components are t H, -1 on the mirrored plane."""
        return 1 if self.axis == "y" else -1

    def _ns(self):
        return _Big50 if self.precision == "big50" else _Double

    def _s(self):
        if self.precision == "big50":
            return _MP50.acosh(_MP50.mpf(self.lattice.A.trace) / 2)
        return self.lattice.s

    def r(self, i: int) -> int:
        if not 1 <= i <= self.imax:
            raise DomainError(f"index {i} outside 1..{self.imax}")
        return self.r_sequence[i - 1]

    def height(self, i: int):
        """H_i = z + s r_i (y-plane) or -z + s r_i (x-plane), in working precision."""
        ns = self._ns()
        return ns.num(self.orientation * self.g.z) + self._s() * self.r(i)


def _height_nonzero(cfg: WitnessConfig, i: int):
    H = cfg.height(i)
    if H == 0:
        raise RepresentativeDegeneracyError(f"z + s r_{i} = 0; shift the representative")
    return H


def _level_at(cfg: WitnessConfig, i: int, t):
    ns = cfg._ns()
    H = _height_nonzero(cfg, i)
    t = ns.num(t)
    return ns.num(cfg.amplitude) * (ns.expm1(-t * H) / ns.expm1(-H)), t * H


def curve_point(cfg: WitnessConfig, i: int, t: float) -> SolPoint:
    """Point of the i-th connecting curve at time t."""
    level, tH = _level_at(cfg, i, t)
    level, third = float(level), float(cfg.orientation * tH)
    if cfg.axis == "y":
        return SolPoint(0.0, level, third)
    return SolPoint(level, 0.0, third)


def solve_t(cfg: WitnessConfig, i: int, level: float) -> float:
    """The unique t at which curve i reaches the given level y~ (or x~)."""
    ns = cfg._ns()
    H = _height_nonzero(cfg, i)
    k = ns.num(level) / ns.num(cfg.amplitude)
    if k <= 0:
        raise NoSolutionError("target level must have the sign of g's nonzero coordinate")
    arg = k * ns.expm1(-H)
    if arg <= -1:
        raise NoSolutionError(f"curve {i} never reaches level {level}")
    return float(-ns.log1p(arg) / H)


def _third(cfg: WitnessConfig, i: int, t):
    return cfg.orientation * cfg._ns().num(t) * cfg.height(i)


def coset_residual(cfg: WitnessConfig, i: int, j: int, t_i: float, t_j: float) -> tuple[float, bool]:
    """rtilde with third_j - third_i = s rtilde, and whether it is an integer."""
    rt = (_third(cfg, j, t_j) - _third(cfg, i, t_i)) / cfg._s()
    rt = float(rt)
    return rt, abs(rt - round(rt)) < cfg.tol


def ratio_check(cfg: WitnessConfig, i: int, j: int, level: float) -> tuple[float, float]:
    """The ratio that must equal e^(s rtilde) and an upper bound on |ratio - 1|.

    With H = min(H_i, H_j) and k = level / amplitude,
    |ratio - 1| <= e^-H / (|1/k - 1| - e^-H) whenever the denominator is
    positive, and ``inf`` otherwise.
    """
    ns = cfg._ns()
    k = ns.num(level) / ns.num(cfg.amplitude)
    if k <= 0:
        raise DomainError("level and amplitude must have the same sign")
    Hi, Hj = cfg.height(i), cfg.height(j)
    inv = 1 / k
    lhs = (ns.exp(-Hi) - 1 + inv) / (ns.exp(-Hj) - 1 + inv)
    return float(lhs), _bound(ns, min(Hi, Hj), inv)


def _bound(ns, H, inv) -> float:
    e = ns.exp(-H)
    den = abs(inv - 1) - e
    return float(e / den) if den > 0 else math.inf


def escape_index(cfg: WitnessConfig, level: float) -> Optional[int]:
    """First index i0 beyond which a coset at this level captures at most one curve.

    For i, j >= i0 the bound forces |e^(s rtilde) - 1| < 1 - e^-s, hence
    rtilde = 0 and r_i = r_j.  Levels of the wrong sign (or zero) are never
    reached, so i0 = 1 there.  ``None`` when no index within imax qualifies.
    """
    if cfg.imax == 0:
        return None
    ns = cfg._ns()
    k = ns.num(level) / ns.num(cfg.amplitude)
    if k <= 0:
        return 1
    gap = 1 - ns.exp(-cfg._s())
    for i in range(1, cfg.imax + 1):
        if _bound(ns, cfg.height(i), 1 / k) < gap:
            return i
    return None


# --- cosets -----------------------------------------------------------------


def plane_line(cfg: WitnessConfig, coset: CosetPoint, search: int = 40) -> Optional[tuple[float, float]]:
    """(level, ref height) of the line where ``coset`` meets the curves' plane.

    Exact representatives with zeta == 0 are solved exactly in Q(sqrt(D));
    float representatives are searched over |p|, |q| <= ``search``.
    """
    L = cfg.lattice
    rep = coset.representative
    in_plane, off_plane = ("x", "y") if cfg.axis == "y" else ("y", "x")
    if isinstance(rep, ExactSolPoint) and rep.zeta == 0.0:
        # rep * embed(p, q, r) = (x + lam^r0 X(p, q), y + lam^-r0 Y(p, q), (r0 + r) s)
        up, down = L.lam_pow(rep.r), L.lam_pow(-rep.r)
        if in_plane == "x":
            pq = plane_offsets(L, -rep.x * down, axis="x")
            if pq is None:
                return None
            p, q = pq
            level = rep.y + down * (L.beta * p + q)
        else:
            pq = plane_offsets(L, -rep.y * up, axis="y")
            if pq is None:
                return None
            p, q = pq
            level = rep.x + up * (p + L.alpha * q)
        return float(level), rep.z
    h = rep.to_float() if isinstance(rep, ExactSolPoint) else rep
    hin = h.x if in_plane == "x" else h.y
    if hin == 0.0:
        return (h.y if off_plane == "y" else h.x), h.z
    scale_in = math.exp(h.z) if in_plane == "x" else math.exp(-h.z)
    scale_off = math.exp(-h.z) if off_plane == "y" else math.exp(h.z)
    coef_in = float(L.alpha) if in_plane == "x" else float(L.beta)
    coef_off = float(L.beta) if off_plane == "y" else float(L.alpha)
    target = -hin / scale_in
    tol = 1e-12 * max(1.0, abs(hin))
    for n in range(-search, search + 1):
        m = round(target - n * coef_in)
        if abs(hin + scale_in * (m + n * coef_in)) < tol:
            # in-plane row is m + n*coef; the off-plane row swaps the roles
            off_row = n + coef_off * m
            base = h.y if off_plane == "y" else h.x
            return base + scale_off * off_row, h.z
    return None


@dataclass
class WitnessReport:
    config: dict
    indices: list[dict]
    cosets: list[dict]
    verdict: str
    plane_forcing: bool

    def to_json(self) -> dict:
        return {
            "indices": self.indices,
            "verdict": self.verdict,
            "cosets": self.cosets,
            "plane_forcing": self.plane_forcing,
            "config": self.config,
        }


def _seed(cfg: WitnessConfig) -> tuple[float, float]:
    p = curve_point(cfg, 1, cfg.t1)
    level = p.y if cfg.axis == "y" else p.x
    return level, p.z


def _classify(cfg: WitnessConfig, i: int, level: Optional[float], ref: float) -> dict:
    rec = {"i": i, "r": cfg.r(i)}
    if level is None:
        rec["status"] = "off_plane"
        return rec
    try:
        t = solve_t(cfg, i, level)
    except NoSolutionError:
        rec["status"] = "unreached"
        return rec
    if not 0.0 < t < 1.0:
        rec.update(t=t, status="unreached")
        return rec
    third = _third(cfg, i, t)
    rt = float((third - cfg._ns().num(ref)) / cfg._s())
    integer = abs(rt - round(rt)) < cfg.tol
    rec.update(t=t, third=float(third), rtilde=rt, integer=integer)
    rec["status"] = "captured" if integer else "escaped"
    return rec


def _plane_forcing(L: SemidirectLattice) -> bool:
    # p + alpha q = 0 only for p = q = 0, and (0, y, s r) is in Gamma only for y = 0
    if plane_offsets(L, L.lam * 0) != (0, 0) or plane_offsets(L, L.lam * 0, axis="y") != (0, 0):
        return False
    probe = ExactSolPoint(0, 1, 0.0, 1, L.lam)
    return membership(L, probe) is None and membership(L, ExactSolPoint(0, 0, 0.0, 3, L.lam)) == (0, 0, 3)


def certify_nonblockable(cfg: WitnessConfig, cosets: Optional[Sequence[CosetPoint]] = None) -> WitnessReport:
    """Check that the connecting curves of m = g Gamma escape a finite coset union.

    ``indices`` is the seeded chain: the coset of (g gamma_1)^t1, with
    t_i solved for its level, rtilde against index 1, and the consecutive
    ratio test.  ``cosets`` defaults to that single seeded coset.

    The verdict is NON_BLOCKED_AT_SCALE when every coset has an escape index
    i0 <= imax, no coset captures two indices at or beyond its i0, and some
    index escapes every coset.
    """
    L = cfg.lattice
    summary = {
        "matrix": [L.A.a, L.A.b, L.A.c, L.A.d],
        "g": list(cfg.g),
        "axis": cfg.axis,
        "imax": cfg.imax,
        "t1": cfg.t1,
        "r_sequence": list(cfg.r_sequence),
        "precision": cfg.precision,
        "tol": cfg.tol,
        "s": L.s,
    }
    forcing = _plane_forcing(L)
    if cfg.imax == 0:
        return WitnessReport(summary, [], [], INCONCLUSIVE, forcing)

    level, ref = _seed(cfg)
    chain = []
    for i in range(1, cfg.imax + 1):
        rec = _classify(cfg, i, level, ref)
        if i < cfg.imax:
            lhs, bound = ratio_check(cfg, i, i + 1, level)
            rec.update(lhs_next=lhs, ratio_error=abs(lhs - 1), bound=bound)
        chain.append(rec)

    if cosets is None:
        seed_point = curve_point(cfg, 1, cfg.t1)
        cosets = [CosetPoint(seed_point, L)]
    if not cosets:
        return WitnessReport(summary, chain, [], INCONCLUSIVE, forcing)

    captured_any = set()
    ok = forcing
    coset_recs = []
    for k, cs in enumerate(cosets):
        line = plane_line(cfg, cs)
        lvl, zref = (None, 0.0) if line is None else line
        recs = [_classify(cfg, i, lvl, zref) for i in range(1, cfg.imax + 1)]
        caught = [r["i"] for r in recs if r["status"] == "captured"]
        i0 = 1 if lvl is None else escape_index(cfg, lvl)
        tail = [] if i0 is None else [i for i in caught if i >= i0]
        contradiction = len(tail) > 1
        ok = ok and i0 is not None and not contradiction
        captured_any.update(caught)
        coset_recs.append(
            {
                "coset": k,
                "representative": list(cs.point),
                "level": lvl,
                "ref_third": zref if lvl is not None else None,
                "i0": i0,
                "captured": caught,
                "contradiction": contradiction,
                "indices": recs,
            }
        )
    escaping = [i for i in range(1, cfg.imax + 1) if i not in captured_any]
    verdict = NON_BLOCKED if ok and escaping else INCONCLUSIVE
    summary["escaping"] = escaping
    return WitnessReport(summary, chain, coset_recs, verdict, forcing)


def mirrored_case(cfg: WitnessConfig, cosets: Optional[Sequence[CosetPoint]] = None) -> WitnessReport:
    """Certificate for g = (x, 0, z), x != 0, using translates (0, 0, -s r_i)."""
    if cfg.axis != "x":
        raise DomainError("mirrored case needs g = (x, 0, z) with x != 0")
    return certify_nonblockable(cfg, cosets)


# --- density ----------------------------------------------------------------


@dataclass
class DensityReport:
    box: tuple[float, ...]
    eps: float
    window: tuple[int, int, int]
    targets: np.ndarray
    hit: np.ndarray
    solutions: np.ndarray
    error: np.ndarray

    @property
    def coverage(self) -> float:
        return float(self.hit.mean()) if self.hit.size else 0.0

    @property
    def covering_window(self) -> Optional[tuple[int, int, int]]:
        """Componentwise max |p|, |q|, |r| over the solutions found."""
        if not self.hit.all():
            return None
        if not self.hit.size:
            return (0, 0, 0)
        return tuple(int(v) for v in np.abs(self.solutions).max(axis=0))

    def to_json(self, per_target: bool = False) -> dict:
        out = {
            "box": list(self.box),
            "eps": self.eps,
            "window": list(self.window),
            "targets": int(self.hit.size),
            "hits": int(self.hit.sum()),
            "coverage": self.coverage,
            "covering_window": None if self.covering_window is None else list(self.covering_window),
            "misses": [list(map(float, t)) for t in self.targets[~self.hit][:100]],
        }
        if per_target:
            out["per_target"] = [
                {"target": list(map(float, t)), "hit": bool(h), "pqr": list(map(int, s)) if h else None}
                for t, h, s in zip(self.targets, self.hit, self.solutions)
            ]
        return out


def _grid(lo: float, hi: float, step: float) -> np.ndarray:
    if hi < lo:
        raise DomainError("box bounds must be ordered")
    n = int(math.ceil((hi - lo) / step - 1e-12)) + 1
    return np.linspace(lo, hi, max(n, 1)) if n > 1 else np.array([lo])


def density_probe(
    L: SemidirectLattice,
    box: Sequence[float],
    eps: float,
    w: SearchWindow,
) -> DensityReport:
    """Approximate every point of an eps/2 grid of ``box`` by X Gamma.

    X Gamma = {(e^z (p + alpha q), y + e^-z (beta p + q), z + s r) : y != 0}.
    The second and third coordinates are matched exactly by choosing y and
    z = target_z - s r, so a target is hit when
    |e^(target_z - s r)(p + alpha q) - target_x| <= eps for some window triple.
    """
    if eps <= 0:
        raise DomainError("eps must be positive")
    x0, x1, y0, y1, z0, z1 = (float(b) for b in box)
    step = eps / 2
    gx, gy, gz = np.meshgrid(_grid(x0, x1, step), _grid(y0, y1, step), _grid(z0, z1, step), indexing="ij")
    targets = np.column_stack([gx.ravel(), gy.ravel(), gz.ravel()])
    hit, P, Q, R, err = _kernels.density_search(
        targets[:, 0], targets[:, 1], targets[:, 2],
        float(L.alpha), float(L.beta), L.s, w.pmax, w.qmax, w.rmax, eps,
    )
    sols = np.column_stack([P, Q, R])
    return DensityReport(tuple(box), eps, (w.pmax, w.qmax, w.rmax), targets, np.asarray(hit), sols, np.asarray(err))
