import numpy as np
import pytest
import sympy as sp

from folium import DomainError, Series1, involution_from_level
from folium.rational import RationalFamily, classify_critical_curves, verify_dR_factor
from generators import random_normal_form
from oracles import T, X, sympy_table

J = 8


def family(expr, J=J) -> RationalFamily:
    K = sp.Poly(sp.expand(expr), X, T).degree(T)
    den = np.zeros((J + 1, 1))
    den[0, 0] = 1.0
    return RationalFamily.from_tables(sympy_table(expr, J, K), den)


def near(branches, t0, param="t=f(x)"):
    hits = [b for b in branches if abs(b.t0 - t0) <= 1e-8 and b.param == param]
    assert len(hits) == 1, branches
    return hits[0]


def test_non_invariant_example():
    F = family(X + (T - X) ** 2)
    (b,) = classify_critical_curves(F)
    assert b.kind == "non-invariant" and not b.level and b.order == 1
    assert b.series.max_abs_diff(Series1.identity(J)) <= 1e-10
    # R(x, x) = x
    assert abs(b.values.coeffs[1] - 1) <= 1e-10
    assert verify_dR_factor(F, b, 1).exponent == 0


def test_level_example():
    F = family(3 + (T - X) ** 3 * (1 + X))
    (b,) = classify_critical_curves(F)
    assert b.kind == "level" and b.level and b.order == 2
    assert b.value == pytest.approx(3.0, abs=1e-12)
    assert b.series.max_abs_diff(Series1.identity(J)) <= 1e-10
    rep = verify_dR_factor(F, b, 2)
    assert rep.ok and rep.exponent == 2
    assert not verify_dR_factor(F, b, 3).ok


def test_divisor_tangent_example():
    F = family((T ** 2 - X) ** 2 + 5)
    branches = classify_critical_curves(F)
    tangent = near(branches, 0.0, "x=g(t)")
    assert tangent.kind == "divisor-tangent" and tangent.level
    assert tangent.tangency == 1 and tangent.value == pytest.approx(5.0)
    assert tangent.series.max_abs_diff(Series1.monomial(2, tangent.series.order)) <= 1e-10
    assert verify_dR_factor(F, tangent, 1).ok
    # t = 0 is a critical branch as well, with R(x, 0) = x^2 + 5
    other = near(branches, 0.0, "t=f(x)")
    assert other.kind == "non-invariant"


def test_family_validation():
    with pytest.raises(DomainError):
        family(X + 0 * T)
    F = family(3 + (T - X) ** 3 * (1 + X))
    back = RationalFamily.from_json(F.to_json())
    assert back.specialize(0.2)(0.5) == pytest.approx(F.specialize(0.2)(0.5))


@pytest.mark.parametrize("m", [1, 2, 3])
def test_random_normal_forms_divide_exactly_m_times(rng, m):
    for _ in range(10):
        F, f = random_normal_form(rng, m)
        branches = classify_critical_curves(F)
        b = near(branches, 0.0)
        assert b.level and b.order == m
        assert b.series.max_abs_diff(f.truncate(b.series.order)) <= 1e-8
        rep = verify_dR_factor(F, b, m)
        assert rep.ok and rep.exponent == m


def test_non_invariant_forms_have_no_common_factor(rng):
    for _ in range(20):
        m = int(rng.integers(1, 4))
        F, _ = random_normal_form(rng, m, constant_a=False)
        for b in classify_critical_curves(F):
            if b.supported and not b.level:
                assert verify_dR_factor(F, b, m).exponent == 0


def test_post_composition_keeps_geometry(rng):
    for _ in range(5):
        F, f = random_normal_form(rng, 2, J=6)
        q = np.r_[0.5, 1.0 + 0.3j, 0.4]  # Q(z) = 0.5 + (1 + 0.3i) z + 0.4 z^2
        G = F.post_compose(q)
        b = near(classify_critical_curves(F), 0.0)
        bq = [c for c in classify_critical_curves(G) if abs(c.t0) <= 1e-8 and c.level]
        assert any(c.series.max_abs_diff(b.series) <= 1e-8 for c in bq)
        Q = np.polynomial.polynomial.polyval(b.value, q)
        assert any(abs(c.value - Q) <= 1e-8 * max(1.0, abs(Q)) for c in bq)


def test_post_composition_keeps_involution():
    F = family(3 + (T - 0.3 * X) ** 2 * (1 + X + T))
    G = F.post_compose([1.0, -2.0, 0.5])
    N = 16
    r0 = Series1(np.array([s.coeffs[0] for s in F.num]), N)
    g0 = Series1(np.array([s.coeffs[0] for s in G.num]), N) * (1 / G.den[0].coeffs[0])
    i_f = involution_from_level(r0 - r0.coeffs[0]).series
    i_g = involution_from_level(g0 - g0.coeffs[0]).series
    assert i_f.max_abs_diff(i_g) <= 1e-10
