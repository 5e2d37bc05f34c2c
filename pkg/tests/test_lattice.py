import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sol_lab.errors import DegenerateLatticeError, InvariantViolation, UnsupportedMatrixError
from sol_lab.exactnum import QuadRat
from sol_lab.lattice import (
    ExactSolPoint,
    LatticeElement,
    LatticePresentation,
    SL2ZMatrix,
    _mat_inv,
    _mat_mul,
    build_lattice,
    diagonal_automorphism,
    eigen_data,
    embed,
    generators,
    hyperbolic_matrices,
    membership,
    nearest_element,
    normalize_lattice,
    plane_offsets,
    verify_presentation,
)
from sol_lab.solcore import SolPoint, sol_inv, sol_mul

small = st.integers(-10, 10)


def test_sl2z_validation():
    with pytest.raises(UnsupportedMatrixError, match="determinant must be 1"):
        SL2ZMatrix(2, 0, 0, 1)
    with pytest.raises(UnsupportedMatrixError, match="trace must exceed 2"):
        eigen_data(SL2ZMatrix(1, 1, 0, 1))
    with pytest.raises(UnsupportedMatrixError, match="trace must exceed 2"):
        build_lattice(SL2ZMatrix(0, -1, 1, 0))


def test_cat_map_frozen_values(cat_map):
    L = cat_map
    assert L.D == 5
    assert L.lam == QuadRat(Fraction(3, 2), Fraction(1, 2), 5)
    assert L.s == pytest.approx(0.9624236501192068949955, rel=1e-15)
    assert float(L.lam) == pytest.approx(2.6180339887498948482, rel=1e-15)
    assert float(L.lam.inverse()) == pytest.approx(0.38196601125010515, rel=1e-15)
    assert float(L.alpha) == pytest.approx(0.6180339887498949, rel=1e-15)
    assert float(L.beta) == pytest.approx(-0.6180339887498949, rel=1e-15)


def test_other_trace(skew_map):
    assert skew_map.s == pytest.approx(1.316957896924816708625, rel=1e-15)


def test_negative_trace_flips():
    L = build_lattice(SL2ZMatrix(-2, -1, -1, -1))
    assert L.sign_flipped and L.A == SL2ZMatrix(2, 1, 1, 1)


def test_exact_conjugation(skew_map):
    L = skew_map
    A = [[QuadRat(e, 0, L.D) for e in row] for row in ([L.A.a, L.A.b], [L.A.c, L.A.d])]
    D = _mat_mul(_mat_mul(L.P, A), _mat_inv(L.P))
    assert D[0][1] == 0 and D[1][0] == 0
    assert D[0][0] == L.lam and D[1][1] == L.lam.inverse()
    assert L.P[0][0] == 1 and L.P[1][1] == 1


def test_off_diagonal_never_zero():
    # b c = a d - 1 = 0 would force trace 2 for det 1 with integer entries
    count = 0
    for A in hyperbolic_matrices(20):
        assert A.b * A.c != 0
        count += 1
    assert count > 100


@given(small, small, small, small, small, small)
def test_embed_homomorphism(p1, q1, r1, p2, q2, r2):
    L = build_lattice(SL2ZMatrix(3, 1, 2, 1))
    g1, g2 = LatticeElement(p1, q1, r1, L), LatticeElement(p2, q2, r2, L)
    assert (g1 * g2).embed() == g1.embed() * g2.embed()
    assert g1.inverse().embed() == g1.embed().inverse()


@given(small, small, small)
def test_membership_round_trip(p, q, r):
    L = build_lattice(SL2ZMatrix(2, 1, 1, 1))
    assert membership(L, embed(L, p, q, r)) == (p, q, r)
    assert nearest_element(L, L.embed_float(p, q, r).as_array())[0] == (p, q, r)


def test_membership_rejects(cat_map):
    L = cat_map
    assert membership(L, ExactSolPoint(0, 1, 0.0, 1, L.lam)) is None
    assert membership(L, ExactSolPoint(QuadRat(0, 1, 5), 0, 0.0, 0, L.lam)) is None
    assert membership(L, ExactSolPoint(0, 0, 0.3, 0, L.lam)) is None
    assert plane_offsets(L, QuadRat(0, 0, 5)) == (0, 0)


@pytest.mark.parametrize("A", list(hyperbolic_matrices(3))[:10])
def test_generators_satisfy_relations(A):
    L = build_lattice(A)
    rep = verify_presentation(generators(L), L.A)
    assert rep["pass"], rep


def test_normalize_perturbed(cat_map):
    L = cat_map
    t = generators(L)
    h = SolPoint(0.37, -0.21, 0.0)
    hinv = sol_inv(h)
    conj = lambda g: sol_mul(sol_mul(hinv, g), h)
    pert = LatticePresentation(t.tau1, t.tau2, conj(t.tau3))
    assert abs(pert.tau3.x) > 0.1
    g, norm = normalize_lattice(pert)
    assert abs(norm.tau3.x) < 1e-12 and abs(norm.tau3.y) < 1e-12
    assert norm.tau3.z == t.tau3.z
    assert verify_presentation(norm, L.A)["pass"]


def test_degenerate_presentation():
    with pytest.raises(DegenerateLatticeError):
        LatticePresentation(SolPoint(1, 0, 0), SolPoint(0, 1, 0), SolPoint(1, 1, 0))
    with pytest.raises(DegenerateLatticeError):
        verify_presentation(
            LatticePresentation(SolPoint(1, 0, 0), SolPoint(2, 0, 0), SolPoint(0, 0, 1)), SL2ZMatrix(2, 1, 1, 1)
        )


def test_presentation_json(cat_map):
    t = generators(cat_map)
    assert LatticePresentation.from_json(t.to_json()) == t


def test_diagonal_automorphism(cat_map):
    L = cat_map
    P2 = [[2 * L.P[0][0], 2 * L.P[0][1]], [3 * L.P[1][0], 3 * L.P[1][1]]]
    B, phi = diagonal_automorphism(L.P, P2)
    assert B[0][0] == 2 and B[1][1] == 3
    g, h = embed(L, 1, 2, 1), embed(L, -1, 0, 2)
    assert phi(g * h) == phi(g) * phi(h)
    with pytest.raises(InvariantViolation):
        diagonal_automorphism(L.P, [[L.P[1][0], L.P[1][1]], [L.P[0][0], L.P[0][1]]])


def test_lattice_is_discrete(cat_map):
    rng = random.Random(3)
    for _ in range(200):
        p, q = rng.randint(-30, 30), rng.randint(-30, 30)
        if p or q:
            x = float(embed(cat_map, p, q, 0).x)
            y = float(embed(cat_map, p, q, 0).y)
            assert max(abs(x), abs(y)) > 1e-3
