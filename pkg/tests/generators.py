"""Seeded random inputs shared by the test modules."""

from __future__ import annotations

import numpy as np

from folium import Involution, Series1, involution_from_conjugator, rescale
from folium.rational import RationalFamily, RationalMap, critical_data
from folium.series import Series2, curve_power, poly_mul2

N_DEFAULT = 24


def crandn(rng: np.random.Generator, size=None):
    return rng.normal(size=size) + 1j * rng.normal(size=size)


def random_series(rng, order: int = 12, scale: float = 1.0, fix_zero: bool = False) -> Series1:
    c = crandn(rng, order + 1) * scale
    if fix_zero:
        c[0] = 0.0
    return Series1(c)


def random_diffeo(rng, order: int = 12, decay: float = 0.5) -> Series1:
    """``a t + ...`` with ``|a|`` in ``[0.5, 2]`` and geometrically decaying tail."""
    c = np.zeros(order + 1, dtype=complex)
    c[1] = rng.uniform(0.5, 2.0) * np.exp(2j * np.pi * rng.uniform())
    j = np.arange(2, order + 1)
    c[2:] = crandn(rng, order - 1) * decay ** (j - 1)
    return Series1(c)


def random_involution(rng, order: int = N_DEFAULT, margin: float = 0.4) -> Involution:
    """Conjugate of ``-t`` by a random tangent-to-identity map, then rescaled.

    Conjugation alone produces coefficients that grow quickly with the power;
    the rescaling ``f(lam t)/lam`` keeps the involution property and brings
    every ``|c_j|`` below ``margin^(j-1)``.
    """
    c = np.zeros(order + 1, dtype=complex)
    c[1] = 1.0
    j = np.arange(2, order + 1)
    c[2:] = crandn(rng, order - 1) * 0.3 ** (j - 1)
    f = involution_from_conjugator(Series1(c)).series
    a = np.maximum(np.abs(f.coeffs[2:]), 1e-300)
    lam = min(1.0, margin * float(np.min(a ** (-1.0 / (j - 1)))))
    return Involution(rescale(f, lam))


def random_level(rng, order: int = N_DEFAULT, decay: float = 0.15) -> Series1:
    """``g`` with ``g(0) = g'(0) = 0`` and ``|g''(0)/2| = 1``.

    The fast decay keeps the other critical points of ``g`` away from ``0``,
    so the deck involution has moderate coefficients.
    """
    c = np.zeros(order + 1, dtype=complex)
    c[2] = np.exp(2j * np.pi * rng.uniform())
    j = np.arange(3, order + 1)
    c[3:] = crandn(rng, order - 2) * decay ** (j - 2)
    return Series1(c)


def random_moebius_params(rng, b_scale: float = 0.3) -> tuple[complex, complex]:
    a = rng.uniform(0.9, 1.1) * np.exp(2j * np.pi * rng.uniform())
    b = b_scale * crandn(rng) / np.sqrt(2)
    return complex(a), complex(b)


def _separated(values, gap: float) -> bool:
    finite = [v for v in values if np.isfinite(v)]
    for i, v in enumerate(finite):
        for w in finite[i + 1:]:
            if abs(v - w) < gap:
                return False
    return True


def random_rational_map(rng, degree: int, gap: float = 0.1, max_tries: int = 200) -> RationalMap:
    """A degree-``d`` map whose ``2d - 2`` critical points are simple with distinct values."""
    for _ in range(max_tries):
        dn = degree
        dd = int(rng.integers(0, degree + 1))
        num = crandn(rng, dn + 1)
        den = crandn(rng, dd + 1)
        R = RationalMap(num, den)
        if R.degree != degree:
            continue
        try:
            data = critical_data(R)
        except Exception:
            continue
        if any(c.order != 1 for c in data) or len(data) != 2 * degree - 2:
            continue
        vals = [c.value for c in data]
        if any(not np.isfinite(v) for v in vals) and sum(not np.isfinite(v) for v in vals) > 1:
            continue
        if not _separated(vals, gap):
            continue
        if max(abs(v) for v in vals if np.isfinite(v)) > 50:
            continue
        return R
    raise RuntimeError("could not draw a generic rational map")


def _poly_x(rng, J: int, first: int, scale: float = 0.5) -> np.ndarray:
    c = np.zeros(J + 1, dtype=complex)
    c[first:] = crandn(rng, J + 1 - first) * scale
    return c


def random_normal_form(rng, m: int, J: int = 8, a=None, constant_a: bool = True):
    """``a + (t - f(x))^(m+1) h(x, t)`` as a family, with ``f(0) = 0`` and ``h(0,0) != 0``.

    Returns ``(family, f)``.  With ``constant_a=False`` the level ``a(x)`` is
    a non-constant polynomial, which makes the branch non-invariant.
    """
    f = Series1(_poly_x(rng, J, 1))
    h = np.zeros((J + 1, 2), dtype=complex)
    h[0, 0] = 1.0 + 0.5 * rng.uniform()
    h[1:3, 0] = crandn(rng, 2) * 0.3
    h[0, 1] = crandn(rng) * 0.3
    body = poly_mul2(curve_power(f, m + 1, J), Series2(h))
    num = body.coeffs.copy()
    if a is None:
        a = complex(crandn(rng))
    num[0, 0] += a
    if not constant_a:
        num[:, 0] += _poly_x(rng, J, 1, 1.0)
    den = np.zeros((J + 1, 1), dtype=complex)
    den[0, 0] = 1.0
    return RationalFamily.from_tables(num, den), f


def taylor_at(R: RationalMap, t0: complex, order: int) -> Series1:
    """Taylor series of ``R(t0 + s)`` in ``s`` for a pole-free point."""
    from numpy.polynomial import polynomial as P

    def shifted(p):
        out = np.zeros(order + 1, dtype=complex)
        deriv = np.asarray(p, dtype=complex)
        fact = 1.0
        for k in range(order + 1):
            if deriv.size == 0:
                break
            out[k] = P.polyval(t0, deriv) / fact
            deriv = P.polyder(deriv) if deriv.size > 1 else np.zeros(0)
            fact *= k + 1
        return Series1(out)

    from folium.series import reciprocal
    return shifted(R.num) * reciprocal(shifted(R.den))
