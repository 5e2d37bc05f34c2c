import math

import mpmath
import numpy as np
import pytest

from sol_lab.connections import CosetPoint, SearchWindow, midpoint_set
from sol_lab.errors import DomainError, NoSolutionError
from sol_lab.lattice import embed
from sol_lab.solcore import SolPoint, sol_mul
from sol_lab.witness import (
    INCONCLUSIVE,
    NON_BLOCKED,
    WitnessConfig,
    certify_nonblockable,
    coset_residual,
    curve_point,
    density_probe,
    escape_index,
    mirrored_case,
    plane_line,
    ratio_check,
    resolve_precision,
    solve_t,
)

G = SolPoint(0.0, 1.0, 0.3)

# mpmath oracles, 40 digits
YTILDE = 0.6527641890452651533
THIRD1 = 0.6312118250596034475
T2 = 0.3922869045966428752
THIRD2 = 0.8727784606107250976
RTILDE12 = 0.2509982329727671697
LHS12 = 1.273242295292861049
LHS89_MINUS_1 = 3.898961255543646e-4


@pytest.fixture
def cfg(cat_map):
    return WitnessConfig(cat_map, G)


def bisect(f, lo, hi, iters=200):
    flo = f(lo)
    for _ in range(iters):
        mid = (lo + hi) / 2
        if (f(mid) > 0) == (flo > 0):
            lo, flo = mid, f(mid)
        else:
            hi = mid
    return (lo + hi) / 2


def test_seed_point(cfg):
    p = curve_point(cfg, 1, 0.5)
    assert p.x == 0.0
    assert p.y == pytest.approx(YTILDE, rel=1e-15)
    assert p.z == pytest.approx(THIRD1, rel=1e-15)


def test_curve_point_is_one_parameter_orbit(cfg, cat_map):
    # the i-th curve is t -> (g (0, 0, s r_i))^t
    from sol_lab.solcore import one_param

    for i in (1, 3, 7):
        end = sol_mul(G, cat_map.embed_float(0, 0, i))
        for t in (0.2, 0.5, 0.9):
            assert np.allclose(curve_point(cfg, i, t).as_array(), one_param(end, t).as_array(), atol=1e-14)


def test_solve_t_against_bisection(cfg):
    for i in range(2, 13):
        H = 0.3 + cfg.lattice.s * i
        f = lambda t: math.expm1(-t * H) / math.expm1(-H) - YTILDE
        assert solve_t(cfg, i, YTILDE) == pytest.approx(bisect(f, 0.0, 1.0), abs=1e-13)
    assert solve_t(cfg, 2, YTILDE) == pytest.approx(T2, rel=1e-14)


def test_solve_t_errors(cfg):
    with pytest.raises(NoSolutionError):
        solve_t(cfg, 2, -0.5)
    with pytest.raises(NoSolutionError):
        solve_t(cfg, 1, 10.0)


def test_residual_and_ratio(cfg):
    t2 = solve_t(cfg, 2, YTILDE)
    rt, integer = coset_residual(cfg, 1, 2, 0.5, t2)
    assert rt == pytest.approx(RTILDE12, abs=1e-12)
    assert not integer
    lhs, _ = ratio_check(cfg, 1, 2, YTILDE)
    assert lhs == pytest.approx(LHS12, rel=1e-13)
    assert lhs == pytest.approx(math.exp(cfg.lattice.s * rt), rel=1e-12)
    lhs89, bound = ratio_check(cfg, 8, 9, YTILDE)
    assert lhs89 - 1 == pytest.approx(LHS89_MINUS_1, rel=1e-9)
    assert abs(lhs89 - 1) <= bound


def test_ratio_identity_mpmath():
    # the ratio is exactly e^(s rtilde) with rtilde from the solved times
    with mpmath.workdps(40):
        s = mpmath.acosh(mpmath.mpf(3) / 2)
        z = mpmath.mpf("0.3")
        k = mpmath.mpf(YTILDE)
        H = lambda i: z + s * i
        t = lambda i: -mpmath.log1p(k * mpmath.expm1(-H(i))) / H(i)
        for i, j in ((1, 2), (4, 7), (8, 9)):
            rt = (t(j) * H(j) - t(i) * H(i)) / s
            lhs = (mpmath.exp(-H(i)) - 1 + 1 / k) / (mpmath.exp(-H(j)) - 1 + 1 / k)
            assert abs(lhs - mpmath.exp(s * rt)) < mpmath.mpf(10) ** -35


def test_escape_index(cfg):
    i0 = escape_index(cfg, YTILDE)
    assert i0 == 2
    assert escape_index(cfg, -1.0) == 1


def test_certificate_single_coset(cfg):
    rep = certify_nonblockable(cfg)
    assert rep.verdict == NON_BLOCKED
    assert rep.plane_forcing
    ts = [r["t"] for r in rep.indices]
    assert all(0 < t < 1 for t in ts)
    assert rep.indices[1]["rtilde"] == pytest.approx(RTILDE12, abs=1e-6)
    assert rep.cosets[0]["captured"] == [1]


def test_certificate_midpoint_family(cfg, cat_map):
    m = CosetPoint(G, cat_map)
    family = [CosetPoint(p, cat_map) for p in midpoint_set(m, SearchWindow(1, 1, 1))]
    assert len(family) == 27
    rep = certify_nonblockable(cfg, family)
    assert rep.verdict == NON_BLOCKED
    assert all(c["i0"] is not None for c in rep.cosets)


def test_exact_coset_rep(cfg, cat_map):
    # lattice points meet the plane x = 0 at y = 0, which no curve reaches
    rep = certify_nonblockable(cfg, [CosetPoint(embed(cat_map, 1, 2, 0), cat_map)])
    assert rep.verdict == NON_BLOCKED
    assert rep.cosets[0]["captured"] == []
    assert plane_line(cfg, CosetPoint(embed(cat_map, 1, 2, 0), cat_map))[0] == 0.0


def test_float_plane_line_matches_exact(cfg, cat_map):
    exact = CosetPoint(embed(cat_map, 3, -1, 0), cat_map)
    floaty = CosetPoint(exact.point, cat_map)
    assert plane_line(cfg, floaty)[0] == pytest.approx(plane_line(cfg, exact)[0], abs=1e-12)


def test_empty_cosets_inconclusive(cfg):
    assert certify_nonblockable(cfg, []).verdict == INCONCLUSIVE
    assert certify_nonblockable(WitnessConfig(cfg.lattice, G, imax=0)).verdict == INCONCLUSIVE


def test_mirrored_case(cat_map):
    a = mirrored_case(WitnessConfig(cat_map, SolPoint(1.0, 0.0, 0.3)))
    b = certify_nonblockable(WitnessConfig(cat_map, SolPoint(0.0, 1.0, -0.3)))
    assert a.verdict == b.verdict == NON_BLOCKED
    for u, v in zip(a.indices, b.indices):
        assert u["t"] == pytest.approx(v["t"], abs=1e-10)
        assert u["third"] == pytest.approx(-v["third"], abs=1e-10)
        assert u["rtilde"] == pytest.approx(-v["rtilde"], abs=1e-10)
    with pytest.raises(DomainError):
        mirrored_case(WitnessConfig(cat_map, G))


def test_big50_agrees(cat_map):
    a = certify_nonblockable(WitnessConfig(cat_map, G))
    b = certify_nonblockable(WitnessConfig(cat_map, G, precision="big50"))
    assert b.verdict == a.verdict
    for u, v in zip(a.indices, b.indices):
        assert u["t"] == pytest.approx(v["t"], abs=1e-14)


def test_precision_env(monkeypatch):
    monkeypatch.setenv("SOL_LAB_PRECISION", "big50")
    assert resolve_precision("double") == "big50"


def test_config_validation(cat_map):
    with pytest.raises(DomainError):
        WitnessConfig(cat_map, SolPoint(1, 1, 0.3))
    with pytest.raises(DomainError):
        WitnessConfig(cat_map, G, t1=1.0)
    with pytest.raises(DomainError):
        WitnessConfig(cat_map, G, imax=3, r_sequence=(1, 1, 2))
    shifted = WitnessConfig(cat_map, SolPoint(0, 1, 0))
    assert shifted.g.z == pytest.approx(cat_map.s)


def test_density_small_box(cat_map):
    rep = density_probe(cat_map, (0, 0.5, 0, 0.5, 0, 0.5), 0.1, SearchWindow(20, 5, 5))
    assert rep.coverage == 1.0
    sols = rep.solutions
    L = cat_map
    for (tx, ty, tz), (p, q, r) in zip(rep.targets, sols):
        x = math.exp(tz - L.s * r) * (p + float(L.alpha) * q)
        assert abs(x - tx) <= 0.1
    with pytest.raises(DomainError):
        density_probe(cat_map, (0, 1, 0, 1, 0, 1), 0.0, SearchWindow(1, 1, 1))
