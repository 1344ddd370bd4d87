"""Rational maps of the Riemann sphere and their critical data.

A map is stored as ``num / den`` with coefficient arrays in ascending powers
of ``t``.  The point and value ``infinity`` are represented by
``complex(inf, 0)``; JSON writes them as ``null``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from ..errors import DomainError, NumericalError
from ..roots import EPS_ROOT, roots_with_multiplicity, trim

INF = complex(math.inf, 0.0)
KINDS = ("level", "non-invariant", "divisor-tangent")


def is_inf(z: complex) -> bool:
    return cmath.isinf(z)


def complex_to_json(z: complex):
    z = complex(z)
    return None if is_inf(z) else [z.real, z.imag]


def complex_from_json(p) -> complex:
    if p is None:
        return INF
    if isinstance(p, (int, float)):
        return complex(p)
    return complex(p[0], p[1])


def _common_roots(a: np.ndarray, b: np.ndarray, eps: float) -> list[complex]:
    if a.size <= 1 or b.size <= 1:
        return []
    rb = roots_with_multiplicity(b)
    common = []
    for z, _ in rb:
        scale = float(np.sum(np.abs(a) * max(1.0, abs(z)) ** np.arange(a.size)))
        if abs(P.polyval(z, a)) <= eps * scale:
            common.append(z)
    return common


@dataclass(frozen=True, eq=False)
class RationalMap:
    """``R(t) = num(t) / den(t)``, reduced so that ``num`` and ``den`` are coprime."""

    num: np.ndarray
    den: np.ndarray

    def __post_init__(self):
        num = trim(np.asarray(self.num, dtype=complex), 1e-14)
        den = trim(np.asarray(self.den, dtype=complex), 1e-14)
        if not np.any(den != 0):
            raise DomainError("denominator vanishes identically")
        # remove common factors found as shared roots
        for _ in range(max(num.size, den.size)):
            common = _common_roots(num, den, 1e-9)
            if not common:
                break
            z = common[0]
            num = trim(P.polydiv(num, np.array([-z, 1.0]))[0], 1e-14)
            den = trim(P.polydiv(den, np.array([-z, 1.0]))[0], 1e-14)
        # normalize so den is monic-ish: leading denominator coefficient 1
        lead = den[-1]
        object.__setattr__(self, "num", num / lead)
        object.__setattr__(self, "den", den / lead)

    @classmethod
    def polynomial(cls, coeffs) -> "RationalMap":
        return cls(np.asarray(coeffs, dtype=complex), np.array([1.0 + 0j]))

    @property
    def deg_num(self) -> int:
        return 0 if not np.any(self.num != 0) else self.num.size - 1

    @property
    def deg_den(self) -> int:
        return self.den.size - 1

    @property
    def degree(self) -> int:
        return max(self.deg_num, self.deg_den)

    def __call__(self, t):
        t = np.asarray(t, dtype=complex)
        return P.polyval(t, self.num) / P.polyval(t, self.den)

    def value(self, t: complex) -> complex:
        """``R(t)`` on the sphere, including ``t = inf`` and poles."""
        if is_inf(t):
            return self.value_at_infinity
        d = P.polyval(t, self.den)
        n = P.polyval(t, self.num)
        if abs(d) <= 1e-13 * max(1.0, abs(n)):
            return INF
        return complex(n / d)

    @property
    def value_at_infinity(self) -> complex:
        if self.deg_num > self.deg_den:
            return INF
        if self.deg_num < self.deg_den:
            return 0j
        return complex(self.num[-1] / self.den[-1])

    def homogeneous(self, v: complex) -> np.ndarray:
        """Coefficients of ``num - v den`` (or ``den`` when ``v`` is infinite)."""
        if is_inf(v):
            return self.den.copy()
        n = np.zeros(self.degree + 1, dtype=complex)
        n[: self.num.size] += self.num
        n[: self.den.size] -= v * self.den
        return n

    def wronskian(self) -> np.ndarray:
        """``num' den - num den'``, whose zeros are the finite critical points."""
        w = P.polysub(P.polymul(P.polyder(self.num), self.den), P.polymul(self.num, P.polyder(self.den)))
        return np.atleast_1d(np.asarray(w, dtype=complex))

    def preimages(self, v: complex) -> np.ndarray:
        """Finite solutions of ``R(t) = v`` (with repetition)."""
        c = trim(self.homogeneous(v), 1e-14)
        if c.size <= 1:
            return np.zeros(0, dtype=complex)
        return np.atleast_1d(P.polyroots(c))

    def local_degree_at_infinity(self) -> int:
        if self.deg_num != self.deg_den:
            return abs(self.deg_num - self.deg_den)
        diff = trim(self.homogeneous(self.value_at_infinity), 1e-12)
        return self.deg_den - (diff.size - 1)

    def post_compose(self, q) -> "RationalMap":
        """``Q o R`` for a polynomial ``Q`` given by ascending coefficients."""
        q = np.asarray(q, dtype=complex)
        n = q.size - 1
        num = np.zeros(1, dtype=complex)
        for i, qi in enumerate(q):
            term = qi * P.polymul(P.polypow(self.num, i), P.polypow(self.den, n - i))
            num = P.polyadd(num, term)
        return RationalMap(num, P.polypow(self.den, n))

    def pre_compose_moebius(self, a: complex, b: complex, c: complex, d: complex) -> "RationalMap":
        """``R((a t + b) / (c t + d))``."""
        if abs(a * d - b * c) <= 1e-14:
            raise DomainError("degenerate Moebius transformation")
        deg = self.degree
        top, bot = np.array([b, a], dtype=complex), np.array([d, c], dtype=complex)

        def homog(p):
            out = np.zeros(1, dtype=complex)
            for i, pi in enumerate(np.pad(p, (0, deg + 1 - p.size))):
                out = P.polyadd(out, pi * P.polymul(P.polypow(top, i), P.polypow(bot, deg - i)))
            return out

        return RationalMap(homog(self.num), homog(self.den))

    def to_json(self) -> dict:
        return {"num": [[float(c.real), float(c.imag)] for c in self.num],
                "den": [[float(c.real), float(c.imag)] for c in self.den]}

    @classmethod
    def from_json(cls, data: dict) -> "RationalMap":
        num = [complex_from_json(p) for p in data["num"]]
        den = [complex_from_json(p) for p in data.get("den", [[1.0, 0.0]])]
        return cls(np.array(num), np.array(den))


@dataclass(frozen=True)
class CriticalDatum:
    """A critical point of ramification order ``order`` (local degree ``order + 1``).

    ``kind`` is filled in only for branches of families.
    """

    point: complex
    order: int
    value: complex
    kind: str | None = None

    def __post_init__(self):
        if self.order < 1:
            raise DomainError("critical order must be >= 1")
        object.__setattr__(self, "point", complex(self.point))
        object.__setattr__(self, "value", complex(self.value))
        if self.kind is not None and self.kind not in KINDS:
            raise DomainError(f"unknown critical kind {self.kind!r}")

    def to_json(self) -> dict:
        return {"point": complex_to_json(self.point), "order": self.order,
                "value": complex_to_json(self.value), "kind": self.kind}


def critical_data(R: RationalMap, eps_root: float = EPS_ROOT) -> list[CriticalDatum]:
    """All critical points on the sphere, including ``t = inf``.

    The ramification orders must add up to ``2d - 2``; otherwise the
    multiplicity clustering failed and :class:`NumericalError` is raised
    with the residuals of the roots found.
    """
    d = R.degree
    if d < 1:
        raise DomainError("constant map has no critical structure")
    out = []
    w = R.wronskian()
    for z, m in roots_with_multiplicity(w, eps_root):
        out.append(CriticalDatum(z, m, R.value(z)))
    e_inf = R.local_degree_at_infinity()
    if e_inf > 1:
        out.append(CriticalDatum(INF, e_inf - 1, R.value_at_infinity))
    total = sum(c.order for c in out)
    if total != 2 * d - 2:
        resid = [(c.point, abs(P.polyval(c.point, w))) for c in out if not is_inf(c.point)]
        raise NumericalError(f"ramification orders sum to {total}, expected {2 * d - 2}; "
                             f"roots and residuals {resid}")
    return out


def critical_values(R: RationalMap, eps_root: float = EPS_ROOT) -> list[complex]:
    """Distinct critical values, finite ones sorted by (real, imag), then ``inf``."""
    vals: list[complex] = []
    for c in critical_data(R, eps_root):
        v = c.value
        if any((is_inf(v) and is_inf(w)) or (not is_inf(v) and not is_inf(w)
               and abs(v - w) <= eps_root * max(1.0, abs(w))) for w in vals):
            continue
        vals.append(v)
    finite = sorted((v for v in vals if not is_inf(v)), key=lambda z: (z.real, z.imag))
    return finite + [v for v in vals if is_inf(v)]
