"""Local involutions tangent to ``-id`` and the Moebius group fixing ``0``.

An involution here is a series ``i(t) = -t + a_2 t^2 + ...`` with
``i(i(t)) = t`` up to some order.  The group ``G`` of Moebius maps fixing
the origin is parametrized as ``g(t) = a t / (1 + b t)`` and acts on
involutions by conjugation ``i -> g^{-1} o i o g``.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .series import EPS_COEF, Series1, comp_inverse, compose

EPS_MATCH = 1e-8


@dataclass(frozen=True)
class InvolutionCheck:
    """Outcome of :func:`check_involution`.

    ``verified_order`` is the largest ``k' <= requested`` with the series in
    ``Inv_{k'}``; ``0`` means the linear part is not ``-t`` (or ``f(0) != 0``).
    ``first_failure`` is ``(power, coefficient of i o i - t)`` at the first
    failing power, if any.
    """

    verified_order: int
    requested: int
    first_failure: tuple[int, complex] | None

    @property
    def passed(self) -> bool:
        return self.verified_order >= self.requested


def check_involution(f: Series1, k: int | None = None, tol: float = EPS_COEF) -> InvolutionCheck:
    k = f.order if k is None else k
    if k > f.order:
        raise DomainError(f"cannot check order {k} on a series truncated at {f.order}")
    if abs(f.coeffs[0]) > tol:
        return InvolutionCheck(0, k, (0, complex(f.coeffs[0])))
    if f.order < 1 or abs(f.coeffs[1] + 1) > tol:
        a1 = complex(f.coeffs[1]) if f.order >= 1 else 0j
        return InvolutionCheck(0, k, (1, a1 * a1 - 1))
    fk = f.truncate(k)
    ff = compose(fk, fk)
    defect = ff.coeffs.copy()
    defect[1] -= 1.0
    # rounding in coefficient j of f o f is bounded by the same coefficient of |f| o |f|
    mag = compose(Series1(np.abs(fk.coeffs)), Series1(np.abs(fk.coeffs))).coeffs.real
    bad = np.flatnonzero(np.abs(defect) > tol * np.maximum(1.0, mag))
    if bad.size == 0:
        return InvolutionCheck(k, k, None)
    j = int(bad[0])
    return InvolutionCheck(j - 1, k, (j, complex(defect[j])))


@dataclass(frozen=True)
class Involution:
    """A series whose membership in ``Inv_k`` has been checked on construction."""

    series: Series1
    verified_order: int = field(init=False)

    def __post_init__(self):
        rep = check_involution(self.series)
        if rep.verified_order < 1:
            raise DomainError(f"not an involution tangent to -id: {rep.first_failure}")
        object.__setattr__(self, "verified_order", rep.verified_order)

    @property
    def order(self) -> int:
        return self.series.order

    def to_json(self) -> dict:
        data = self.series.to_json()
        data["verified_order"] = self.verified_order
        return data

    @classmethod
    def from_json(cls, data: dict) -> "Involution":
        # verified_order in the input is ignored and recomputed
        return cls(Series1.from_json(data))


@dataclass(frozen=True)
class Moebius:
    """``g(t) = a t / (1 + b t)``, an element of the stabilizer of ``0``."""

    a: complex = 1.0
    b: complex = 0.0

    def __post_init__(self):
        if self.a == 0:
            raise DomainError("Moebius parameter a must be nonzero")
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "b", complex(self.b))

    def __call__(self, t):
        return self.a * t / (1 + self.b * t)

    def series(self, order: int) -> Series1:
        j = np.arange(1, order + 1)
        c = np.zeros(order + 1, dtype=complex)
        c[1:] = self.a * (-self.b) ** (j - 1)
        return Series1(c)

    def inverse(self) -> "Moebius":
        return Moebius(1 / self.a, -self.b / self.a)

    def then(self, other: "Moebius") -> "Moebius":
        """``self o other`` (apply ``other`` first)."""
        return Moebius(self.a * other.a, other.b + self.b * other.a)

    def to_json(self) -> dict:
        return {"a": [self.a.real, self.a.imag], "b": [self.b.real, self.b.imag]}

    @classmethod
    def from_json(cls, data: dict) -> "Moebius":
        a, b = data["a"], data["b"]
        return cls(complex(a[0], a[1]), complex(b[0], b[1]))


def involution_from_conjugator(phi: Series1, tol: float = EPS_COEF) -> Involution:
    """``phi o (-id) o phi^{-1}``, an involution to the full order of ``phi``."""
    if abs(phi.coeffs[0]) > tol:
        raise DomainError("conjugator must fix 0")
    if phi.order < 1 or abs(phi.coeffs[1]) <= tol:
        raise DomainError("conjugator must have phi'(0) != 0")
    psi = comp_inverse(phi, tol)
    return Involution(compose(phi, -psi))


def involution_from_level(g: Series1, tol: float = EPS_COEF) -> Involution:
    """The deck involution of a function with a simple critical point at 0.

    Returns the ``i`` with ``i'(0) = -1`` and ``g(i(t)) = g(t)``.  Adding a
    constant to ``g`` does not change its level sets, so ``g(0)`` is ignored.
    ``g`` modulo ``t^{N+1}`` pins down ``i`` only modulo ``t^N``, so the
    result has order ``N - 1``.
    """
    n = g.order
    if n < 2:
        raise DomainError("need at least the quadratic coefficient")
    if abs(g.coeffs[1]) > tol * max(1.0, abs(g.coeffs[2])):
        raise DomainError("0 is not a critical point (g'(0) != 0)")
    g2 = complex(g.coeffs[2])
    if abs(g2) <= tol:
        raise DomainError("degenerate critical point: g''(0) = 0")
    gc = np.array(g.coeffs, dtype=complex)
    gc[0] = 0.0
    gc[1] = 0.0
    gs = Series1(gc)
    # The coefficient of t^{k+1} in g(i) - g is -2 g_2 a_k + (terms in a_1..a_{k-1}).
    a = np.zeros(n, dtype=complex)
    a[1] = -1.0
    for k in range(2, n):
        trial = Series1(a[: k + 1], k + 1)
        defect = compose(gs.truncate(k + 1), trial).coeffs[k + 1] - gc[k + 1]
        a[k] = defect / (2 * g2)
    return Involution(Series1(a))


def moebius_conjugate(g: Moebius, inv: Involution | Series1) -> Involution:
    """``g^{-1} o i o g`` to the order of ``i``."""
    s = inv.series if isinstance(inv, Involution) else inv
    n = s.order
    inner = compose(s, g.series(n))
    return Involution(compose(g.inverse().series(n), inner))


@dataclass(frozen=True)
class OrbitResult:
    """Result of :func:`g_orbit_equivalent`.

    ``witness`` is ``None`` on failure; ``reason`` then says which matching
    equation is inconsistent.  ``heuristic`` marks answers produced by the
    least-squares fallback rather than the exact normal-form solve.
    """

    witness: Moebius | None
    order: int
    residual: float
    reason: str = ""
    heuristic: bool = False

    @property
    def equivalent(self) -> bool:
        return self.witness is not None

    def to_json(self) -> dict:
        return {
            "equivalent": self.equivalent,
            "witness": self.witness.to_json() if self.witness else None,
            "order": self.order,
            "residual": self.residual,
            "reason": self.reason,
            "heuristic": self.heuristic,
        }


def _conj_series(s: Series1, g: Moebius) -> Series1:
    return compose(g.inverse().series(s.order), compose(s, g.series(s.order)))


def _match_residual(s1: Series1, s2: Series1, g: Moebius) -> float:
    # relative to the size of the target coefficients
    scale = max(1.0, float(np.max(np.abs(s2.coeffs))))
    return _conj_series(s1, g).max_abs_diff(s2) / scale


def _kill_quadratic(s: Series1) -> Moebius:
    # conjugating by t/(1+bt) adds 2b to the t^2 coefficient
    return Moebius(1.0, -complex(s.coeffs[2]) / 2)


def g_orbit_equivalent(i1: Involution, i2: Involution, k: int,
                       tol: float = EPS_MATCH, rng: np.random.Generator | None = None) -> OrbitResult:
    """Search ``g`` in ``G`` with ``g^{-1} o i1 o g = i2  (mod t^{k+1})``.

    Both involutions are first conjugated to have no ``t^2`` term; the only
    elements of ``G`` preserving that normalization are the scalings
    ``t -> a t``, which multiply the ``t^j`` coefficient by ``a^{j-1}``.  The
    first nonzero coefficient therefore fixes ``a`` up to a root of unity and
    every candidate is checked on all orders up to ``k``.
    """
    for name, inv in (("i1", i1), ("i2", i2)):
        if inv.verified_order < k:
            return OrbitResult(None, k, float("inf"),
                               f"{name} is only verified to order {inv.verified_order} < {k}")
    if k < 2:
        return OrbitResult(Moebius(), k, 0.0, "every involution agrees with -t to order 1")
    s1, s2 = i1.series.truncate(k), i2.series.truncate(k)
    b1, b2 = _kill_quadratic(s1), _kill_quadratic(s2)
    n1, n2 = _conj_series(s1, b1), _conj_series(s2, b2)

    lead = None
    for j in range(3, k + 1):
        if abs(n1.coeffs[j]) > tol or abs(n2.coeffs[j]) > tol:
            lead = j
            break
    if lead is None:
        candidates = [1.0 + 0j]
    elif abs(n1.coeffs[lead]) <= tol or abs(n2.coeffs[lead]) <= tol:
        return OrbitResult(None, k, float(abs(n1.coeffs[lead] - n2.coeffs[lead])),
                           f"normal forms differ at t^{lead}: one coefficient vanishes, the other does not")
    else:
        ratio = complex(n2.coeffs[lead] / n1.coeffs[lead])
        p = lead - 1
        r0 = ratio ** (1.0 / p)
        candidates = [r0 * cmath.exp(2j * cmath.pi * q / p) for q in range(p)]

    best = None
    for a in candidates:
        g = b1.then(Moebius(a, 0.0)).then(b2.inverse())
        res = _match_residual(s1, s2, g)
        if best is None or res < best[1]:
            best = (g, res)
    g, res = best
    if res <= tol:
        return OrbitResult(g, k, res)

    refined = _least_squares_witness(s1, s2, g, rng)
    if refined is not None and refined[1] <= tol:
        return OrbitResult(refined[0], k, refined[1], "exact solve missed; least-squares fallback", True)
    return OrbitResult(None, k, res,
                       f"no scaling matches the normal forms through t^{k} (best residual {res:.3g})")


def _least_squares_witness(s1: Series1, s2: Series1, start: Moebius, rng):
    from scipy.optimize import least_squares

    rng = rng if rng is not None else np.random.default_rng(0)
    n = s1.order

    def resid(p):
        a, b = complex(p[0], p[1]), complex(p[2], p[3])
        if a == 0:
            return np.full(2 * n, 1e6)
        d = (_conj_series(s1, Moebius(a, b)) - s2).coeffs[1:]
        return np.concatenate([d.real, d.imag])

    best = None
    starts = [np.array([start.a.real, start.a.imag, start.b.real, start.b.imag])]
    starts += [rng.normal(size=4) for _ in range(4)]
    for x0 in starts:
        sol = least_squares(resid, x0, xtol=1e-14, ftol=1e-14, gtol=1e-14)
        a = complex(sol.x[0], sol.x[1])
        if a == 0:
            continue
        g = Moebius(a, complex(sol.x[2], sol.x[3]))
        r = _match_residual(s1, s2, g)
        if best is None or r < best[1]:
            best = (g, r)
    return best
