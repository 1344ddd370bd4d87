import numpy as np
import pytest
import sympy as sp

from folium import (DomainError, Involution, Series1, check_involution, gt_path, gt_path_derivative,
                    path_report)
from folium.baire_path import rescale_toward_radius
from generators import random_involution

N = 24
U_VALUES = (0.1, 0.3j, -0.2 + 0.2j)


def bracket_oracle(f: Series1, m: int) -> Series1:
    """``d/du (h_u^{-1} o f o h_u)`` at ``u = 0`` equals ``f'(t) t^m - f(t)^m``."""
    n = f.order
    tm = Series1.monomial(m, n)
    return f.deriv().extend(n) * tm - f ** m


def test_path_at_zero_is_identity_conjugation(rng):
    f = random_involution(rng)
    for m in (2, 5):
        assert gt_path(f, m, 0.0).max_abs_diff(f.series) <= 1e-15


def test_path_stays_in_inv(rng):
    for _ in range(10):
        f = random_involution(rng)
        for m in range(2, 8):
            for u in U_VALUES:
                assert check_involution(gt_path(f, m, u)).verified_order == N


def test_low_jet_unchanged(rng):
    for _ in range(20):
        f = random_involution(rng)
        for m in range(2, 11):
            for u in U_VALUES:
                a = gt_path(f, m, u)
                assert np.abs(a.coeffs[:m] - f.series.coeffs[:m]).max() <= 1e-12


def test_coefficient_m_even_and_odd(rng):
    for _ in range(20):
        f = random_involution(rng)
        c = f.series.coeffs
        for m in range(2, 11):
            for u in U_VALUES:
                got = gt_path(f, m, u).coeffs[m]
                # u t^m enters through h_u and through h_u^{-1} o (-t): -u - (-1)^m u
                expected = c[m] - (1 + (-1) ** m) * u
                assert abs(got - expected) <= 1e-12


def test_odd_m_example_with_sympy():
    t, u = sp.symbols("t u")
    f = -t + t ** 2 - t ** 3
    h = t + u * t ** 3
    # h^{-1} to order 5
    s = sp.Symbol("s")
    hinv = s - u * s ** 3 + 3 * u ** 2 * s ** 5
    alpha = sp.expand(sp.series(hinv.subs(s, f.subs(t, h)), t, 0, 5).removeO())
    coeffs = sp.Poly(alpha, t).all_coeffs()[::-1]
    assert sp.simplify(coeffs[3]) == -1
    # f has no t^4 term, so the whole t^4 coefficient is the shift
    assert sp.expand(coeffs[4]) == -u
    ours = gt_path(Involution(Series1([0, -1, 1, -1, 0, 0, 0], 6)), 3, 0.1)
    assert ours.coeffs[3] == pytest.approx(-1.0, abs=1e-14)
    assert ours.coeffs[4] == pytest.approx(-0.1, abs=1e-14)


def test_derivative_matches_bracket_oracle(rng):
    for _ in range(30):
        f = random_involution(rng)
        for m in range(2, 11):
            d = gt_path_derivative(f, m)
            assert d.max_abs_diff(bracket_oracle(f.series, m)) <= 1e-12


def test_derivative_jet_and_leading_term(rng):
    d = gt_path_derivative(Involution(-Series1.identity(N)), 2)
    assert d.coeffs[2] == pytest.approx(-2.0, abs=1e-15)
    assert np.abs(d.coeffs[3:]).max() <= 1e-15
    for _ in range(20):
        f = random_involution(rng)
        for m in range(2, 11):
            d = gt_path_derivative(f, m)
            assert np.abs(d.coeffs[:m]).max() <= 1e-12
            assert d.coeffs[m] == pytest.approx(-1 - (-1) ** m, abs=1e-12)
            if m % 2:
                c2 = f.series.coeffs[2]
                assert d.coeffs[m + 1] == pytest.approx((2 - m) * c2, abs=1e-12)


def test_derivative_matches_finite_differences(rng):
    for _ in range(20):
        f = random_involution(rng)
        for m in (2, 3, 6, 9):
            h = 1e-3
            # fourth-order central stencil
            fd = (8 * (gt_path(f, m, h) - gt_path(f, m, -h)).coeffs
                  - (gt_path(f, m, 2 * h) - gt_path(f, m, -2 * h)).coeffs) / (12 * h)
            assert np.abs(fd - gt_path_derivative(f, m).coeffs).max() <= 1e-6


def test_path_report(rng):
    f = random_involution(rng)
    rep = path_report(f, 4)
    assert rep.slope == pytest.approx(-2.0, abs=1e-12)
    assert rep.jet_zero_through == 3
    assert rep.alpha_coeff_m(0.1) == pytest.approx(gt_path(f, 4, 0.1).coeffs[4], abs=1e-12)
    rep = path_report(f, 3)
    assert rep.slope == pytest.approx(0.0, abs=1e-12)
    assert rep.jet_zero_through == 3
    data = rep.to_json()
    assert data["m"] == 3 and data["jet_zero_through"] == 3


def test_path_errors():
    f = Involution(Series1([0, -1, 1, 0]))
    with pytest.raises(DomainError, match="m must be >= 2"):
        gt_path(f, 1, 0.1)
    with pytest.raises(DomainError, match="verified only"):
        gt_path_derivative(f, 3)


def test_rescale_toward_radius():
    f = Series1([0, -1, 1])
    table = rescale_toward_radius(f, [0.9])
    assert table[0][1] == pytest.approx(0.1, abs=1e-15)
    dists = [d for _, d in rescale_toward_radius(f, [0.9, 0.99, 0.999])]
    assert dists[0] > dists[1] > dists[2]
    assert all(d == 0.0 for _, d in rescale_toward_radius(-Series1.identity(10), [0.5, 0.9]))
    with pytest.raises(DomainError):
        rescale_toward_radius(f, [1.0])
