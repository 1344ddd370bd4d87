import numpy as np
import pytest
import sympy as sp

from folium import DomainError
from folium.rational import RationalMap, critical_data, critical_values
from folium.rational.maps import INF, complex_from_json, complex_to_json, is_inf
from generators import random_rational_map


def by_point(data):
    return sorted(data, key=lambda c: (is_inf(c.point), c.point.real if not is_inf(c.point) else 0))


def test_critical_data_square():
    data = by_point(critical_data(RationalMap.polynomial([0, 0, 1])))
    assert len(data) == 2
    assert abs(data[0].point) <= 1e-14 and data[0].order == 1 and abs(data[0].value) <= 1e-14
    assert is_inf(data[1].point) and data[1].order == 1 and is_inf(data[1].value)


def test_critical_data_cubic():
    data = by_point(critical_data(RationalMap.polynomial([0, -3, 0, 1])))
    assert [c.order for c in data] == [1, 1, 2]
    assert data[0].point == pytest.approx(-1, abs=1e-12) and data[0].value == pytest.approx(2, abs=1e-12)
    assert data[1].point == pytest.approx(1, abs=1e-12) and data[1].value == pytest.approx(-2, abs=1e-12)
    assert is_inf(data[2].point)
    vals = critical_values(RationalMap.polynomial([0, -3, 0, 1]))
    assert vals[0] == pytest.approx(-2) and vals[1] == pytest.approx(2) and is_inf(vals[2])


def test_critical_data_multiple_point():
    data = critical_data(RationalMap.polynomial([0, 0, 0, 0, 1]))
    assert sorted(c.order for c in data) == [3, 3]


def test_critical_data_matches_sympy(rng):
    t = sp.Symbol("t")
    for _ in range(5):
        num = rng.integers(-4, 5, size=4).astype(float)
        den = rng.integers(-4, 5, size=3).astype(float)
        num[-1] = num[-1] or 1.0
        den[-1] = den[-1] or 1.0
        R = RationalMap(num, den)
        expr = sum(int(c) * t ** k for k, c in enumerate(num)) / sum(int(c) * t ** k for k, c in enumerate(den))
        crit = sp.Poly(sp.numer(sp.cancel(sp.diff(sp.cancel(expr), t))), t)
        expected = np.array([complex(z) for z in crit.nroots(n=30)])
        ours = np.array([c.point for c in critical_data(R) if not is_inf(c.point)
                         for _ in range(c.order)])
        assert ours.size == expected.size
        # nearest-neighbour matching both ways
        dist = np.abs(ours[:, None] - expected[None, :])
        assert dist.min(axis=0).max() <= 1e-6 and dist.min(axis=1).max() <= 1e-6


def test_riemann_hurwitz_on_random_maps(rng):
    for d in (2, 3, 4, 5):
        for _ in range(5):
            R = random_rational_map(rng, d)
            assert sum(c.order for c in critical_data(R)) == 2 * d - 2


def test_values_match_evaluation(rng):
    R = random_rational_map(rng, 4)
    for c in critical_data(R):
        if not is_inf(c.point) and not is_inf(c.value):
            assert abs(R(c.point) - c.value) <= 1e-8 * max(1.0, abs(c.value))


def test_gcd_removal_and_degree():
    # (t - 1) t / ((t - 1)(t + 2)) reduces to t / (t + 2)
    R = RationalMap(np.polynomial.polynomial.polyfromroots([1, 0]),
                    np.polynomial.polynomial.polyfromroots([1, -2]))
    assert R.degree == 1 and R.deg_num == 1 and R.deg_den == 1
    with pytest.raises(DomainError):
        RationalMap([1.0], [0.0])
    with pytest.raises(DomainError):
        critical_data(RationalMap.polynomial([3.0]))


def test_value_and_infinity():
    R = RationalMap([1.0, 0.0, 2.0], [0.0, 1.0])  # (1 + 2t^2) / t
    assert is_inf(R.value(0.0)) and is_inf(R.value(INF))
    assert R.local_degree_at_infinity() == 1
    S = RationalMap([1.0], [0.0, 0.0, 1.0])
    assert S.value(INF) == 0 and S.local_degree_at_infinity() == 2


def test_post_compose_and_moebius():
    R = RationalMap.polynomial([0, 1, 1])
    Q = R.post_compose([1.0, 0.0, 1.0])  # 1 + R^2
    t = 0.3 + 0.1j
    assert Q(t) == pytest.approx(1 + R(t) ** 2)
    M = R.pre_compose_moebius(2.0, 1.0, 1.0, 3.0)
    assert M(t) == pytest.approx(R((2 * t + 1) / (t + 3)))
    with pytest.raises(DomainError):
        R.pre_compose_moebius(1.0, 2.0, 2.0, 4.0)


def test_json_round_trip(rng):
    R = random_rational_map(rng, 3)
    back = RationalMap.from_json(R.to_json())
    assert np.allclose(back.num, R.num) and np.allclose(back.den, R.den)
    assert complex_to_json(INF) is None and is_inf(complex_from_json(None))
    assert complex_from_json([1.0, -2.0]) == 1 - 2j
