import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dyncube.errors import ContractError
from dyncube.heisenberg import (BASE_POINT, CBRT2, IDENTITY, HPoint, NilPoint, RotationParams,
                                anchored_distances, apply_S, apply_T, canonical, circle_distance,
                                distance, frac, lift, mul, parse_alpha, strong_witness_scan,
                                witness_search)
from oracles import heisenberg_mul

reals = st.floats(-50, 50, allow_nan=False)
units = st.floats(0, 1, exclude_max=True, allow_nan=False)
points = st.builds(HPoint, reals, reals, reals)
nil_points = st.builds(NilPoint, units, units, units)
lattice = st.builds(HPoint, *(st.integers(-20, 20).map(float),) * 3)


def close_mod1(x, y, tol):
    return circle_distance(x, y) < tol


def test_mul_examples():
    assert mul(HPoint(1, 0, 0), HPoint(0, 1, 0)) == HPoint(1, 1, 1)
    assert mul(HPoint(0, 1, 0), HPoint(1, 0, 0)) == HPoint(1, 1, 0)
    g = HPoint(0.3, -2.0, 5.5)
    assert mul(g, IDENTITY) == g == mul(IDENTITY, g)


@given(points, points)
def test_mul_matches_formula(g, h):
    assert mul(g, h).as_tuple() == heisenberg_mul(g.as_tuple(), h.as_tuple())


@given(points, points, points)
def test_associative(f, g, h):
    left = mul(mul(f, g), h).as_tuple()
    right = mul(f, mul(g, h)).as_tuple()
    scale = 1 + max(abs(v) for v in left)
    assert all(abs(a - b) <= 1e-12 * scale * 100 for a, b in zip(left, right))


@given(st.floats(-50, 50), points)
def test_center(z, h):
    assert mul(HPoint(0, 0, z), h) == mul(h, HPoint(0, 0, z))


def test_canonical_example():
    p = canonical(HPoint(1.5, 2.3, 0.7))
    assert p.a == pytest.approx(0.5) and p.b == pytest.approx(0.3) and p.c == pytest.approx(0.7)


@given(nil_points)
def test_canonical_idempotent(p):
    assert canonical(lift(p)) == p


@given(points, lattice)
def test_canonical_well_defined(h, gamma):
    p, q = canonical(h), canonical(mul(h, gamma))
    assert all(close_mod1(u, v, 1e-9) for u, v in zip(p.as_tuple(), q.as_tuple()))


def test_canonical_tiny_negative_b():
    # the fractional part of b rounds to 0, so its floor must be taken as 0 too
    h = HPoint(1.5, -2.2250738585e-313, 0.0)
    assert canonical(h) == canonical(mul(h, HPoint(0.0, 1.0, 0.0))) == NilPoint(0.5, 0.0, 0.0)


def test_frac_guard():
    assert frac(-1e-18) == 0.0
    assert frac(2.25) == 0.25


def test_nil_point_range():
    with pytest.raises(ContractError):
        NilPoint(1.0, 0.0, 0.0)


def test_rotation_examples():
    params = RotationParams()
    assert params.s == HPoint(CBRT2, 0, 0)
    assert params.t == HPoint(0, 1 / CBRT2, CBRT2)
    assert apply_S(BASE_POINT).as_tuple() == (CBRT2 - 1, 0.0, 0.0)
    p = BASE_POINT
    for n in range(1, 50):
        p = apply_S(p)
        assert close_mod1(p.a, n * CBRT2, 1e-12) and p.b == 0.0 and p.c == 0.0


def test_powers_match_repeated_application():
    p = NilPoint(0.2, 0.7, 0.1)
    q = p
    for _ in range(7):
        q = apply_T(q)
    r = apply_T(p, times=7)
    assert distance(q, r) < 1e-12


def test_st_and_ts_differ_by_a_central_lattice_element():
    params = RotationParams()
    st_, ts = mul(params.s, params.t), mul(params.t, params.s)
    assert st_.as_tuple() == pytest.approx((CBRT2, 1 / CBRT2, CBRT2 + 1))
    assert ts.as_tuple() == pytest.approx((CBRT2, 1 / CBRT2, CBRT2))


def test_commutation_random():
    rng = np.random.default_rng(0)
    for a, b, c in rng.random((2000, 3)):
        p = NilPoint(a, b, c)
        assert distance(apply_S(apply_T(p)), apply_T(apply_S(p))) < 1e-12


def test_parse_alpha():
    assert parse_alpha("cbrt2") == CBRT2
    assert parse_alpha("1.5") == 1.5
    with pytest.raises(ContractError):
        parse_alpha("pi-ish")


def test_witness_example():
    rep = witness_search(0.5, CBRT2, 0.01)
    assert rep.passed and rep.max < 0.06
    assert rep.n > 0 and rep.m > 0
    assert (rep.n * CBRT2) % 1 < 0.01 and 0.5 / (rep.n * CBRT2) < 0.01
    js = rep.to_json()
    assert set(js) == {"n", "m", "distances", "max", "bound", "pass", "quadruple"}
    assert js["bound"] == pytest.approx(0.06)


@pytest.mark.parametrize("c", [0.1, 0.3, 0.7, 0.9])
def test_witness_loose_epsilon(c):
    assert witness_search(c, CBRT2, 0.25).passed


def test_witness_degenerate():
    rep = witness_search(0.0, CBRT2, 0.01)
    assert (rep.n, rep.m, rep.max) == (0, 0, 0.0)


def test_witness_contract():
    with pytest.raises(ContractError):
        witness_search(0.5, CBRT2, 1.5)
    with pytest.raises(ContractError):
        witness_search(1.5, CBRT2, 0.1)


def test_anchored_distances_match_direct_computation():
    params = RotationParams()
    target = NilPoint(0, 0, 0.3)
    ns, ms = np.arange(-5, 6), np.arange(-4, 5)
    grid = anchored_distances(0.3, CBRT2, ns, ms)
    for i, n in enumerate(ns):
        for j, m in enumerate(ms):
            quad = (BASE_POINT, apply_S(BASE_POINT, params, int(n)), apply_T(BASE_POINT, params, int(m)),
                    apply_S(apply_T(BASE_POINT, params, int(m)), params, int(n)))
            d = max(distance(quad[0], BASE_POINT), *(distance(q, target) for q in quad[1:]))
            assert grid[i, j] == pytest.approx(d, abs=1e-9)


def test_strong_scan():
    assert strong_witness_scan(0.0, CBRT2, 0.01, 0)
    assert not strong_witness_scan(0.5, CBRT2, 0.01, 2000)
