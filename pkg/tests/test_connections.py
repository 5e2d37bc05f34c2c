import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sol_lab.connections import (
    CosetPoint,
    SearchWindow,
    blocking_check,
    coset_distance,
    eval_curve,
    log_set,
    midpoint_set,
    pair_curves,
    sample_curve,
)
from sol_lab.errors import DomainError
from sol_lab.lattice import embed, membership, nearest_element
from sol_lab.solcore import IDENTITY, SolPoint, one_param, sol_inv, sol_mul

M_REP = SolPoint(0.0, 1.0, 0.3)


def test_window_validation():
    with pytest.raises(DomainError):
        SearchWindow(0, 1, 1)
    with pytest.raises(DomainError):
        SearchWindow.parse("1,2")
    w = SearchWindow.parse("1,2,3", tgrid=7)
    assert len(w.triples()) == 3 * 5 * 7
    assert 0.5 in w.t_samples()


def test_log_set_endpoints(cat_map):
    m = CosetPoint(M_REP, cat_map)
    curves = log_set(m, SearchWindow(1, 1, 1))
    assert len(curves) == 27
    for c in curves:
        assert eval_curve(c, 0.0) == IDENTITY
        end = eval_curve(c, 1.0)
        _, res = nearest_element(cat_map, sol_mul(sol_inv(M_REP), end))
        assert res < 1e-12
    with pytest.raises(DomainError):
        eval_curve(curves[0], 1.5)


def test_exact_translate(cat_map):
    L = cat_map
    m = CosetPoint(embed(L, 2, -1, 1), L)
    t = m.translate(1, 1, 1)
    assert membership(L, t) is not None
    assert m.same_coset(CosetPoint(t, L))
    assert not m.same_coset(CosetPoint(M_REP, L))


def test_same_coset_float(cat_map):
    m = CosetPoint(M_REP, cat_map)
    assert m == CosetPoint(m.translate(3, -2, 2), cat_map)
    assert m != CosetPoint(SolPoint(0.0, 1.1, 0.3), cat_map)


def test_pair_curves_reduce_to_identity(cat_map):
    g1, g2 = SolPoint(0.2, -0.4, 0.7), SolPoint(1.0, 0.5, -0.2)
    for c in pair_curves(cat_map, g1, g2, SearchWindow(1, 1, 1)):
        assert np.allclose(eval_curve(c, 0.0).as_array(), g1.as_array())
        _, res = nearest_element(cat_map, sol_mul(sol_inv(g2), eval_curve(c, 1.0)))
        assert res < 1e-10


def test_sample_curve_matches_eval(cat_map):
    c = log_set(CosetPoint(M_REP, cat_map), SearchWindow(1, 1, 1))[5]
    ts = np.linspace(0, 1, 9)
    for t, row in zip(ts, sample_curve(c, ts)):
        assert np.allclose(row, eval_curve(c, t).as_array(), atol=1e-14)


def _brute_coset_distance(L, pt, b, span=4):
    # all translates of b over a block of lattice elements, metric frozen at pt
    x, y, z = pt
    best = np.inf
    r0 = round((z - b.z) / L.s)
    for p, q, r in itertools.product(range(-span, span + 1), range(-span, span + 1), range(r0 - 1, r0 + 2)):
        # nearest of b * Gamma: search around the coordinate offset
        e = sol_mul(b, L.embed_float(p, q, r))
        d = np.sqrt(np.exp(-2 * z) * (x - e.x) ** 2 + np.exp(2 * z) * (y - e.y) ** 2 + (z - e.z) ** 2)
        best = min(best, d)
    return best


@settings(max_examples=25, deadline=None)
@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-0.5, 0.5))
def test_coset_distance_against_brute_force(cat_map, x, y, z):
    b = SolPoint(0.1, 0.2, 0.05)
    pt = np.array([[x, y, z]])
    got = coset_distance(cat_map, pt, [b])[0][0]
    ref = _brute_coset_distance(cat_map, (x, y, z), b)
    assert got == pytest.approx(ref, rel=1e-12, abs=1e-14)


def test_coset_distance_zero_on_coset(cat_map):
    b = SolPoint(0.1, 0.2, 0.05)
    pts = np.array([sol_mul(b, cat_map.embed_float(p, 1, r)).as_array() for p in (-1, 2) for r in (-1, 0, 2)])
    assert np.all(coset_distance(cat_map, pts, [b])[0] < 1e-12)


def test_midpoint_set(cat_map):
    m = CosetPoint(M_REP, cat_map)
    mids = midpoint_set(m, SearchWindow(1, 1, 1))
    assert len(mids) == 27
    assert mids[0] == one_param(m.translate(-1, -1, -1), 0.5)
    assert len(midpoint_set(m, SearchWindow(1, 1, 1), modulo_lattice=True)) <= 27


def test_blocking_midpoints_block_their_curves(cat_map):
    m = CosetPoint(M_REP, cat_map)
    B = [one_param(m.translate(0, 0, r), 0.5) for r in (1, 2, 3)]
    rep = blocking_check(m, B, 1e-6, SearchWindow(1, 1, 5))
    for r in (1, 2, 3):
        assert (0, 0, r) in rep.blocked_curves
    assert rep.evades
    assert len(rep.blocked_curves) + len(rep.evading_curves) == 3 * 3 * 11


def test_blocking_validation(cat_map):
    m = CosetPoint(M_REP, cat_map)
    with pytest.raises(DomainError):
        blocking_check(m, [], 0.0, SearchWindow(1, 1, 1))
    with pytest.raises(DomainError):
        blocking_check(m, [cat_map.embed_float(1, 0, 0)], 1e-3, SearchWindow(1, 1, 1))
    rep = blocking_check(m, [], 1e-3, SearchWindow(1, 1, 1))
    assert len(rep.evading_curves) == 27
