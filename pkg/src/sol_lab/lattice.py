"""Semidirect-product lattices Z^2 x|_A Z inside Sol.

For a hyperbolic A in SL(2, Z) with eigenvalue lam = e^s > 1, the matrix

    P = [[1, (lam - a)/c], [(1/lam - d)/b, 1]]

satisfies P A P^-1 = diag(lam, 1/lam) exactly, and (p, q, r) -> (P(p, q), s r)
is an injective homomorphism whose image Gamma(A) is a lattice.  All
coordinates of Gamma(A) lie in Q(sqrt(D)), so coset questions are decided
exactly with :class:`~sol_lab.exactnum.QuadRat`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterator, Optional, Union

import numpy as np

from .errors import (
    DegenerateLatticeError,
    DomainError,
    InvariantViolation,
    RepresentativeDegeneracyError,
    UnsupportedMatrixError,
)
from .exactnum import QuadRat
from .solcore import SolPoint, sol_inv, sol_mul

__all__ = [
    "SL2ZMatrix",
    "SemidirectLattice",
    "LatticeElement",
    "ExactSolPoint",
    "LatticePresentation",
    "eigen_data",
    "build_lattice",
    "embed",
    "membership",
    "plane_offsets",
    "nearest_element",
    "generators",
    "verify_presentation",
    "normalize_lattice",
    "diagonal_automorphism",
    "hyperbolic_matrices",
]

Mat2 = tuple[tuple[QuadRat, QuadRat], tuple[QuadRat, QuadRat]]


@dataclass(frozen=True)
class SL2ZMatrix:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self) -> None:
        for e in (self.a, self.b, self.c, self.d):
            if not isinstance(e, int) or isinstance(e, bool):
                raise UnsupportedMatrixError("matrix entries must be integers")
        if self.det != 1:
            raise UnsupportedMatrixError(f"determinant must be 1, got {self.det}")

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> int:
        return self.a + self.d

    def __neg__(self) -> SL2ZMatrix:
        return SL2ZMatrix(-self.a, -self.b, -self.c, -self.d)

    def inverse(self) -> SL2ZMatrix:
        return SL2ZMatrix(self.d, -self.b, -self.c, self.a)

    def transpose(self) -> SL2ZMatrix:
        return SL2ZMatrix(self.a, self.c, self.b, self.d)

    def __matmul__(self, other: SL2ZMatrix) -> SL2ZMatrix:
        return SL2ZMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def power(self, r: int) -> SL2ZMatrix:
        base = self if r >= 0 else self.inverse()
        out = SL2ZMatrix(1, 0, 0, 1)
        for _ in range(abs(r)):
            out = out @ base
        return out

    def apply(self, p: int, q: int) -> tuple[int, int]:
        return self.a * p + self.b * q, self.c * p + self.d * q

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=float)

    @classmethod
    def parse(cls, text: str) -> SL2ZMatrix:
        parts = [int(t) for t in text.replace(" ", "").split(",")]
        if len(parts) != 4:
            raise UnsupportedMatrixError("matrix needs four comma-separated integers a,b,c,d")
        return cls(*parts)


def eigen_data(A: SL2ZMatrix) -> tuple[QuadRat, float, int]:
    """Expanding eigenvalue ``lam``, ``s = ln lam`` and the radicand ``D``."""
    tr = A.trace
    if tr <= 2:
        raise UnsupportedMatrixError(f"trace must exceed 2, got tr={tr}")
    lam = QuadRat(Fraction(tr, 2), Fraction(1, 2), tr * tr - 4)
    # lam + 1/lam = tr, so s = arccosh(tr/2) without forming lam in floats
    s = math.acosh(tr / 2)
    return lam, s, lam.D


def _mat_mul(X, Y) -> Mat2:
    return (
        (X[0][0] * Y[0][0] + X[0][1] * Y[1][0], X[0][0] * Y[0][1] + X[0][1] * Y[1][1]),
        (X[1][0] * Y[0][0] + X[1][1] * Y[1][0], X[1][0] * Y[0][1] + X[1][1] * Y[1][1]),
    )


def _mat_det(X) -> QuadRat:
    return X[0][0] * X[1][1] - X[0][1] * X[1][0]


def _mat_inv(X) -> Mat2:
    det = _mat_det(X)
    if not det:
        raise ZeroDivisionError("singular matrix")
    inv = det.inverse() if isinstance(det, QuadRat) else Fraction(1, det)
    return ((X[1][1] * inv, -X[0][1] * inv), (-X[1][0] * inv, X[0][0] * inv))


def _mat_float(X) -> np.ndarray:
    return np.array([[float(e) for e in row] for row in X], dtype=float)


@dataclass(frozen=True)
class SemidirectLattice:
    """Gamma(A) = {(P(p, q), s r)} with exact eigen-data in Q(sqrt(D))."""

    A: SL2ZMatrix
    D: int
    lam: QuadRat
    s: float
    P: Mat2
    sign_flipped: bool = False
    P_float: np.ndarray = field(repr=False, compare=False, default=None)
    P_inv_float: np.ndarray = field(repr=False, compare=False, default=None)

    @property
    def alpha(self) -> QuadRat:
        """x = p + alpha q on the image of (p, q)."""
        return self.P[0][1]

    @property
    def beta(self) -> QuadRat:
        """y = beta p + q on the image of (p, q)."""
        return self.P[1][0]

    def lam_pow(self, r: int) -> QuadRat:
        return _lam_pow(self.lam, r)

    def embed(self, p: int, q: int, r: int) -> ExactSolPoint:
        return embed(self, p, q, r)

    def embed_float(self, p: int, q: int, r: int) -> SolPoint:
        x = p + self.P_float[0, 1] * q
        y = self.P_float[1, 0] * p + q
        return SolPoint(x, y, self.s * r)


@lru_cache(maxsize=4096)
def _lam_pow(lam: QuadRat, r: int) -> QuadRat:
    return lam**r


def build_lattice(A: SL2ZMatrix) -> SemidirectLattice:
    """Construct Gamma(A), replacing A by -A when tr(A) < -2."""
    flipped = False
    if A.trace < -2:
        A, flipped = -A, True
    if abs(A.trace) <= 2:
        raise UnsupportedMatrixError(f"trace must exceed 2 in absolute value, got tr={A.trace}")
    lam, s, D = eigen_data(A)
    a, b, c, d = A.a, A.b, A.c, A.d
    if b == 0 or c == 0:
        raise InvariantViolation("hyperbolic SL(2,Z) matrix with a zero off-diagonal entry")
    lam_inv = lam.inverse()
    one = QuadRat(1, 0, D)
    P: Mat2 = ((one, (lam - a) / c), ((lam_inv - d) / b, one))
    Af = ((QuadRat(a, 0, D), QuadRat(b, 0, D)), (QuadRat(c, 0, D), QuadRat(d, 0, D)))
    conj = _mat_mul(_mat_mul(P, Af), _mat_inv(P))
    if not (conj[0][0] == lam and conj[1][1] == lam_inv and conj[0][1] == 0 and conj[1][0] == 0):
        raise InvariantViolation("P A P^-1 is not diag(lam, 1/lam)")
    Pf = _mat_float(P)
    return SemidirectLattice(A, D, lam, s, P, flipped, Pf, np.linalg.inv(Pf))


def hyperbolic_matrices(bound: int) -> Iterator[SL2ZMatrix]:
    """All A in SL(2, Z) with entries in [-bound, bound] and tr(A) > 2."""
    for a in range(-bound, bound + 1):
        for d in range(max(-bound, 3 - a), bound + 1):
            bc = a * d - 1
            if bc == 0:
                continue
            for b in range(-bound, bound + 1):
                if b == 0 or bc % b:
                    continue
                c = bc // b
                if abs(c) <= bound:
                    yield SL2ZMatrix(a, b, c, d)


# --- exact points -----------------------------------------------------------


def _as_quad(x, D: int) -> QuadRat:
    if isinstance(x, QuadRat):
        if x.D != D:
            raise DomainError(f"coordinate lies in Q(sqrt({x.D})), expected Q(sqrt({D}))")
        return x
    return QuadRat(Fraction(x), 0, D)


@dataclass(frozen=True)
class ExactSolPoint:
    """A point (x, y, zeta + r s) with x, y in Q(sqrt(D)) and lam = e^s.

    Products are exact whenever the left factor has ``zeta == 0``: then the
    twist e^z = lam^r acts inside Q(sqrt(D)).
    """

    x: QuadRat
    y: QuadRat
    zeta: float
    r: int
    lam: QuadRat

    def __post_init__(self) -> None:
        D = self.lam.D
        object.__setattr__(self, "x", _as_quad(self.x, D))
        object.__setattr__(self, "y", _as_quad(self.y, D))
        if not math.isfinite(self.zeta):
            raise DomainError("zeta must be finite")

    @property
    def s(self) -> float:
        return math.acosh(float(self.lam.trace()) / 2)

    @property
    def z(self) -> float:
        return self.zeta + self.r * self.s

    def to_float(self) -> SolPoint:
        return SolPoint(float(self.x), float(self.y), self.z)

    def _check_field(self, other: ExactSolPoint) -> None:
        if other.lam != self.lam:
            raise DomainError("points belong to different lattices")

    def __mul__(self, other: ExactSolPoint) -> ExactSolPoint:
        if not isinstance(other, ExactSolPoint):
            return NotImplemented
        self._check_field(other)
        if self.zeta != 0.0 and (other.x or other.y):
            raise DomainError("exact product needs zeta == 0 on the left factor")
        scale = _lam_pow(self.lam, self.r)
        return ExactSolPoint(
            self.x + scale * other.x,
            self.y + _lam_pow(self.lam, -self.r) * other.y,
            self.zeta + other.zeta,
            self.r + other.r,
            self.lam,
        )

    def inverse(self) -> ExactSolPoint:
        if self.zeta != 0.0 and (self.x or self.y):
            raise DomainError("exact inverse needs zeta == 0")
        return ExactSolPoint(
            -_lam_pow(self.lam, -self.r) * self.x,
            -_lam_pow(self.lam, self.r) * self.y,
            -self.zeta,
            -self.r,
            self.lam,
        )


def embed(L: SemidirectLattice, p: int, q: int, r: int) -> ExactSolPoint:
    """(p, q, r) -> (P(p, q), s r), exact."""
    x = p + L.alpha * q
    y = L.beta * p + q
    return ExactSolPoint(x, y, 0.0, r, L.lam)


@dataclass(frozen=True)
class LatticeElement:
    """(p, q, r) in Z^2 x|_A Z with (v1, r1)(v2, r2) = (v1 + A^r1 v2, r1 + r2)."""

    p: int
    q: int
    r: int
    lattice: SemidirectLattice = field(repr=False, compare=False)

    def __mul__(self, other: LatticeElement) -> LatticeElement:
        dp, dq = self.lattice.A.power(self.r).apply(other.p, other.q)
        return LatticeElement(self.p + dp, self.q + dq, self.r + other.r, self.lattice)

    def inverse(self) -> LatticeElement:
        p, q = self.lattice.A.power(-self.r).apply(-self.p, -self.q)
        return LatticeElement(p, q, -self.r, self.lattice)

    def embed(self) -> ExactSolPoint:
        return embed(self.lattice, self.p, self.q, self.r)


def _solve_row(coef: QuadRat, target: QuadRat) -> Optional[tuple[int, int]]:
    # target = m + n*coef with m, n integers; coef is irrational, so the
    # sqrt(D) parts fix n and the rational parts then fix m
    n = target.v / coef.v
    m = target.u - n * coef.u
    if n.denominator != 1 or m.denominator != 1:
        return None
    return int(m), int(n)


def plane_offsets(L: SemidirectLattice, x: QuadRat, axis: str = "x") -> Optional[tuple[int, int]]:
    """The unique integers (p, q) whose image has the given x (or y) coordinate.

    Returns ``None`` when no integer pair exists.  Uniqueness is the
    irrationality of lam: p + alpha q = 0 forces p = q = 0.
    """
    x = _as_quad(x, L.D)
    if axis == "x":
        sol = _solve_row(L.alpha, x)
        return sol
    if axis == "y":
        sol = _solve_row(L.beta, x)
        return None if sol is None else (sol[1], sol[0])
    raise DomainError(f"axis must be 'x' or 'y', got {axis!r}")


def membership(L: SemidirectLattice, g: ExactSolPoint) -> Optional[tuple[int, int, int]]:
    """Return (p, q, r) with embed(p, q, r) == g, or ``None``."""
    if g.lam != L.lam:
        raise DomainError("point belongs to a different field")
    if g.zeta != 0.0:
        return None
    pq = plane_offsets(L, g.x)
    if pq is None:
        return None
    p, q = pq
    if g.y != L.beta * p + q:
        return None
    return p, q, g.r


def nearest_element(L: SemidirectLattice, h: Union[SolPoint, np.ndarray]) -> tuple[tuple[int, int, int], float]:
    """Closest lattice element in coordinates and its sup-norm distance."""
    x, y, z = (float(c) for c in h)
    r = int(round(z / L.s))
    pf, qf = L.P_inv_float @ np.array([x, y])
    best, best_res = None, math.inf
    for p in (math.floor(pf), math.ceil(pf)):
        for q in (math.floor(qf), math.ceil(qf)):
            e = L.embed_float(p, q, r)
            res = max(abs(x - e.x), abs(y - e.y), abs(z - e.z))
            if res < best_res:
                best, best_res = (int(p), int(q), r), res
    return best, best_res


# --- presentations ----------------------------------------------------------


@dataclass(frozen=True)
class LatticePresentation:
    tau1: SolPoint
    tau2: SolPoint
    tau3: SolPoint

    def __post_init__(self) -> None:
        if self.tau1.z != 0.0 or self.tau2.z != 0.0:
            raise DegenerateLatticeError("tau1 and tau2 must have zero z-component")
        if self.tau3.z == 0.0:
            raise DegenerateLatticeError("tau3 must have nonzero z-component")

    def to_json(self) -> dict:
        return {k: [format(float(c), ".17g") for c in getattr(self, k)] for k in ("tau1", "tau2", "tau3")}

    @classmethod
    def from_json(cls, obj: dict) -> LatticePresentation:
        return cls(*(SolPoint.from_seq(obj[k]) for k in ("tau1", "tau2", "tau3")))


def generators(L: SemidirectLattice) -> LatticePresentation:
    return LatticePresentation(L.embed_float(1, 0, 0), L.embed_float(0, 1, 0), L.embed_float(0, 0, 1))


def _residual(u: np.ndarray, v: np.ndarray) -> float:
    scale = max(1.0, float(np.max(np.abs(v))))
    return float(np.max(np.abs(u - v))) / scale


def verify_presentation(pres: LatticePresentation, A: SL2ZMatrix, tol: float = 1e-12) -> dict:
    """Check the defining relations of a lattice presentation.

    Relations checked, each as a residual relative to max(1, |expected|):

    * ``commutator``: tau1^-1 tau2^-1 tau1 tau2 is the identity.
    * ``eigen``: with R = [[x1, y1], [x2, y2]], R^-1 M R = diag(e^z3, e^-z3)
      for M = A (``row``) or M = A^T (``column``).
    * ``conjugation``: tau3^-1 tau_j tau3 equals the word prod_i tau_i^M_ij
      for M one of A^-1, A^-T, A, A^T.

    Conventions that hold are listed; a relation passes when any does.
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    t1, t2, t3 = pres.tau1, pres.tau2, pres.tau3
    comm = sol_mul(sol_mul(sol_inv(t1), sol_inv(t2)), sol_mul(t1, t2))
    comm_res = _residual(comm.as_array(), np.zeros(3))

    R = np.array([[t1.x, t1.y], [t2.x, t2.y]])
    if abs(np.linalg.det(R)) < 1e-300:
        raise DegenerateLatticeError("tau1 and tau2 are linearly dependent")
    Rinv = np.linalg.inv(R)
    diag = np.diag([math.exp(t3.z), math.exp(-t3.z)])
    eigen = {
        "row": _residual(Rinv @ A.as_array() @ R, diag),
        "column": _residual(Rinv @ A.as_array().T @ R, diag),
    }

    inv3 = sol_inv(t3)
    conj = [sol_mul(sol_mul(inv3, t), t3).as_array() for t in (t1, t2)]
    words = {
        "column/inverse": A.inverse(),
        "row/inverse": A.inverse().transpose(),
        "column/direct": A,
        "row/direct": A.transpose(),
    }
    conj_res = {}
    for name, M in words.items():
        m = [[M.a, M.b], [M.c, M.d]]
        worst = 0.0
        for j in range(2):
            word = m[0][j] * t1.as_array() + m[1][j] * t2.as_array()
            worst = max(worst, _residual(conj[j], word))
        conj_res[name] = worst

    eig_ok = [k for k, v in eigen.items() if v < tol]
    conj_ok = [k for k, v in conj_res.items() if v < tol]
    report = {
        "commutator": {"residual": comm_res, "pass": comm_res < tol},
        "eigen": {"residuals": eigen, "holds": eig_ok, "pass": bool(eig_ok)},
        "conjugation": {"residuals": conj_res, "holds": conj_ok, "pass": bool(conj_ok)},
    }
    report["pass"] = all(report[k]["pass"] for k in ("commutator", "eigen", "conjugation"))
    return report


def normalize_lattice(pres: LatticePresentation) -> tuple[SolPoint, LatticePresentation]:
    """Conjugate a presentation so that tau3 becomes (0, 0, z3).

    With g = (x3/(e^z3 - 1), y3/(e^-z3 - 1), 0) the map tau -> g tau g^-1
    fixes tau1, tau2 (g lies in the abelian plane z = 0) and sends tau3 to
    (0, 0, z3).  Its inverse tau -> g^-1 tau g carries the semidirect form
    back onto the original lattice.
    """
    x3, y3, z3 = pres.tau3
    if z3 == 0.0:
        raise DegenerateLatticeError("tau3 has zero z-component")
    g = SolPoint(x3 / math.expm1(z3), y3 / math.expm1(-z3), 0.0)
    ginv = sol_inv(g)

    def conj(t: SolPoint) -> SolPoint:
        if t.z == 0.0:
            # g commutes with the plane z = 0
            return t
        return sol_mul(sol_mul(g, t), ginv)

    out = conj(pres.tau3)
    out = SolPoint(out.x, out.y, z3)
    return g, LatticePresentation(conj(pres.tau1), conj(pres.tau2), out)


def diagonal_automorphism(P1, P2) -> tuple[Mat2, Callable]:
    """B = P2 P1^-1 (must be diagonal) and phi(x, y, z) = (B(x, y), z).

    ``phi`` accepts :class:`SolPoint` and :class:`ExactSolPoint`; on exact
    points it acts exactly in Q(sqrt(D)).
    """
    B = _mat_mul(P2, _mat_inv(P1))
    if B[0][1] != 0 or B[1][0] != 0:
        raise InvariantViolation("P2 P1^-1 is not diagonal: not eigenbases of the same ordered spectrum")
    b1, b2 = B[0][0], B[1][1]
    f1, f2 = float(b1), float(b2)

    def phi(g):
        if isinstance(g, ExactSolPoint):
            return ExactSolPoint(b1 * g.x, b2 * g.y, g.zeta, g.r, g.lam)
        return SolPoint(f1 * g.x, f2 * g.y, g.z)

    return B, phi


def shift_representative(L: SemidirectLattice, g: SolPoint) -> SolPoint:
    """g * embed(0, 0, 1): same coset, height moved by s."""
    if not math.isfinite(g.z):
        raise RepresentativeDegeneracyError("non-finite height")
    return sol_mul(g, L.embed_float(0, 0, 1))
