import numpy as np

from folium.rational import RationalMap, covering_isomorphic, critical_values
from folium.rational.maps import is_inf
from generators import random_rational_map

CUBIC = RationalMap.polynomial([0, -3, 0, 1])


def other_cubic() -> RationalMap:
    """``-2 + (16/27) t^3 / (t - 1)``: branch values -2, 2, inf like ``t^3 - 3t``,
    but totally ramified over -2 instead of inf."""
    return RationalMap(np.array([2.0, -2.0, 0.0, 16 / 27]), np.array([-1.0, 1.0]))


def test_moebius_reparametrization_is_isomorphic(rng):
    for d in (2, 3, 4):
        R = random_rational_map(rng, d)
        S = R.pre_compose_moebius(1.2, 0.3, -0.1, 0.9)
        v = covering_isomorphic(R, S)
        assert v.isomorphic is True and v.witness is not None


def test_degree_mismatch():
    v = covering_isomorphic(RationalMap.polynomial([0, 0, 1]), RationalMap.polynomial([0, 0, 0, 1]))
    assert v.isomorphic is False and "degree" in v.reason


def test_same_values_different_profiles():
    S = other_cubic()
    vals = critical_values(S)
    assert vals[0] == complex(-2) and abs(vals[1] - 2) <= 1e-10 and is_inf(vals[2])
    v = covering_isomorphic(CUBIC, S)
    assert v.isomorphic is False and "ramification profile" in v.reason


def test_different_values():
    v = covering_isomorphic(CUBIC, RationalMap.polynomial([0, -3, 0, 1]).post_compose([1.0, 1.0]))
    assert v.isomorphic is False and "critical values" in v.reason


def test_hurwitz_mode():
    R = RationalMap.polynomial([0, -3, 0, 1])
    S = RationalMap.polynomial([0, -12, 0, 1])  # same shape, values +-16
    v = covering_isomorphic(R, S, mode="hurwitz")
    assert v.isomorphic is True and v.depth is not None
    # the 3-cycle of R sits on the outer loop, which braid moves keep fixed
    v = covering_isomorphic(R, other_cubic(), mode="hurwitz", depth=3)
    assert v.isomorphic is None and v.reason == "inconclusive at depth 3"
    data = v.to_json()
    assert data["status"] == "inconclusive" and data["witness"] is None
    v = covering_isomorphic(R, RationalMap.polynomial([0, 0, 0, 1]), mode="hurwitz")
    assert v.isomorphic is False and "branch values" in v.reason
