"""Conjugation paths through an involution and their first variation.

For an involution ``f = -t + sum c_j t^j`` and ``h_u(t) = t + u t^m`` the
path ``alpha(u) = h_u^{-1} o f o h_u`` stays inside the involutions.  Its
``u``-derivative at ``0`` is computed with first-order dual numbers whose
components are truncated series, so no step size is involved.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import DomainError
from .involutions import Involution
from .series import EPS_COEF, Series1, comp_inverse, compose, norm_l1, reciprocal, rescale


@dataclass(frozen=True)
class DualSeries:
    """``re + eps * du`` with ``eps^2 = 0``; both parts are truncated series."""

    re: Series1
    du: Series1

    @property
    def order(self) -> int:
        return min(self.re.order, self.du.order)

    def __add__(self, other: "DualSeries") -> "DualSeries":
        return DualSeries(self.re + other.re, self.du + other.du)

    def __mul__(self, other: "DualSeries") -> "DualSeries":
        return DualSeries(self.re * other.re, self.re * other.du + self.du * other.re)


def dual_compose(f: DualSeries, g: DualSeries) -> DualSeries:
    """``f(g)``: the eps-part is ``f.du(g.re) + f.re'(g.re) * g.du``."""
    n = min(f.order, g.order)
    fr, fd = f.re.truncate(n), f.du.truncate(n)
    gr, gd = g.re.truncate(n), g.du.truncate(n)
    slope = compose(fr.deriv(), gr.truncate(n - 1)).extend(n)
    return DualSeries(compose(fr, gr), compose(fd, gr) + slope * gd)


def dual_inverse(h: DualSeries) -> DualSeries:
    """Compositional inverse; differentiate ``h(k) = t`` in eps."""
    k0 = comp_inverse(h.re)
    n = k0.order
    slope = compose(h.re.deriv(), k0.truncate(n - 1)).extend(n)
    # slope(0) = h'(0) != 0, so the division is a plain series division
    k1 = -(compose(h.du, k0) * reciprocal(slope))
    return DualSeries(k0, k1)


def _perturbation(m: int, n: int, u: complex) -> Series1:
    return Series1.identity(n) + Series1.monomial(m, n, u)


def _check_args(f: Involution, m: int) -> Series1:
    if m < 2:
        raise DomainError(f"perturbation order m must be >= 2, got {m}")
    s = f.series if isinstance(f, Involution) else f
    if isinstance(f, Involution) and f.verified_order < m:
        raise DomainError(f"involution verified only to order {f.verified_order} < m = {m}")
    return s


def gt_path(f: Involution, m: int, u: complex) -> Series1:
    """``h_u^{-1} o f o h_u`` with ``h_u(t) = t + u t^m``."""
    s = _check_args(f, m)
    h = _perturbation(m, s.order, u)
    return compose(comp_inverse(h), compose(s, h))


def gt_path_derivative(f: Involution, m: int) -> Series1:
    """``d alpha / du`` at ``u = 0`` via dual-number series arithmetic."""
    s = _check_args(f, m)
    n = s.order
    h = DualSeries(Series1.identity(n), Series1.monomial(m, n))
    fd = DualSeries(s, Series1.zero(n))
    alpha = dual_compose(dual_inverse(h), dual_compose(fd, h))
    return alpha.du


@dataclass(frozen=True)
class PathReport:
    """Summary of the path at perturbation order ``m``.

    ``alpha_coeff_m(u) = intercept + slope * u`` exactly, because ``u``
    enters the ``t^m`` coefficient only linearly.
    """

    m: int
    c: Series1
    intercept: complex
    slope: complex
    alpha_prime: Series1
    jet_zero_through: int

    def alpha_coeff_m(self, u: complex) -> complex:
        return self.intercept + self.slope * u

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "intercept": [self.intercept.real, self.intercept.imag],
            "slope": [self.slope.real, self.slope.imag],
            "jet_zero_through": self.jet_zero_through,
            "alpha_prime": self.alpha_prime.to_json(),
        }


def path_report(f: Involution, m: int, tol: float = EPS_COEF) -> PathReport:
    s = _check_args(f, m)
    d = gt_path_derivative(f, m)
    lead = d.valuation(tol)
    jet_zero = (d.order if lead is None else lead - 1)
    return PathReport(m=m, c=s, intercept=complex(s.coeffs[m]), slope=complex(d.coeffs[m]),
                      alpha_prime=d, jet_zero_through=jet_zero)


def rescale_toward_radius(f: Series1, lambdas: Iterable[float]) -> list[tuple[float, float]]:
    """``[(lam, ||f_lam - f||_1)]`` for ``f_lam(t) = f(lam t)/lam``."""
    table = []
    for lam in lambdas:
        lam = float(lam)
        if not 0.0 < lam < 1.0:
            raise DomainError(f"rescaling factor must lie in (0, 1), got {lam}")
        table.append((lam, norm_l1(rescale(f, lam) - f)))
    return table
