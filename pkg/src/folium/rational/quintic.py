"""Real quintics whose critical levels each meet the real line in two points.

For a monic real quintic ``Q`` with four distinct real critical points
``c1 < c2 < c3 < c4`` the level ``Q(z) = Q(c_i)`` contains ``c_i`` twice;
a certificate requires the remaining cubic to have one real root and a
complex-conjugate pair.  The search draws the critical points at random and
integrates ``Q' = 5 prod (z - c_i)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P

from ..errors import DomainError, NumericalError
from ..roots import newton_polish

EPS_REAL = 1e-6
MIN_GAP = 1e-3
DEFAULT_BUDGET = 100000


@dataclass(frozen=True)
class RootProfile:
    """Roots of ``Q(z) - Q(c)``: the double root ``c``, one simple real, a conjugate pair."""

    critical_point: float
    value: float
    double: float
    real: float
    pair: tuple[complex, complex]
    residuals: tuple[float, ...]

    def to_json(self) -> dict:
        return {
            "critical_point": self.critical_point,
            "value": self.value,
            "double_root": self.double,
            "simple_real_root": self.real,
            "pair": [[z.real, z.imag] for z in self.pair],
            "residuals": list(self.residuals),
        }


@dataclass(frozen=True)
class QuinticCertificate:
    """``Q = z^5 + a4 z^4 + ... + a0``; ``coeffs`` holds ``a0 .. a4``."""

    coeffs: tuple[float, ...]
    critical_points: tuple[float, float, float, float]
    profiles: tuple[RootProfile, ...]
    attempts: int = 0

    @property
    def polynomial(self) -> np.ndarray:
        return np.array(list(self.coeffs) + [1.0])

    def to_json(self) -> dict:
        return {
            "coeffs": list(self.coeffs),
            "critical_points": list(self.critical_points),
            "profiles": [p.to_json() for p in self.profiles],
            "attempts": self.attempts,
        }


@dataclass(frozen=True)
class QuinticVerdict:
    passed: bool
    reason: str
    certificate: QuinticCertificate | None = None
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"passed": self.passed, "reason": self.reason,
                "certificate": self.certificate.to_json() if self.certificate else None,
                "details": self.details}


def _as_monic_real(coeffs) -> np.ndarray:
    c = np.asarray(coeffs, dtype=complex)
    if c.size == 5:
        c = np.append(c, 1.0)
    if c.size != 6:
        raise DomainError("expected a0..a4 or a0..a5 for a quintic")
    if np.any(np.abs(c.imag) > 0):
        raise DomainError("quintic must have real coefficients")
    c = c.real
    if c[5] != 1.0:
        raise DomainError("quintic must be monic")
    return c


def quintic_verify(coeffs, eps_real: float = EPS_REAL, min_gap: float = MIN_GAP) -> QuinticVerdict:
    """Recompute the critical points and the root profile of every critical level."""
    c = _as_monic_real(coeffs)
    dq = P.polyder(c)
    crit = np.roots(dq[::-1])
    crit = np.array([newton_polish(dq, z) for z in crit])
    if np.any(np.abs(crit.imag) > eps_real):
        return QuinticVerdict(False, "critical points are not all real",
                              details={"critical_points": [[z.real, z.imag] for z in crit]})
    cr = np.sort(crit.real)
    gaps = np.diff(cr)
    if np.any(gaps < min_gap):
        return QuinticVerdict(False, f"critical points not distinct (smallest gap {gaps.min():.3g})",
                              details={"critical_points": cr.tolist()})
    profiles = []
    for ci in cr:
        val = float(P.polyval(ci, c))
        level = c.copy()
        level[0] -= val
        cubic, rem = P.polydiv(level, P.polyfromroots([ci, ci]))
        roots = np.roots(cubic[::-1])
        roots = np.array([newton_polish(level, z) for z in roots])
        real = roots[np.abs(roots.imag) < eps_real]
        cplx = roots[np.abs(roots.imag) >= eps_real]
        resid = tuple(float(abs(P.polyval(z, level))) for z in roots)
        if real.size != 1 or cplx.size != 2:
            return QuinticVerdict(False, f"level Q = Q({ci:.6g}) has {real.size + 2} real roots "
                                         f"counted with multiplicity, expected 3",
                                  details={"roots": [[z.real, z.imag] for z in roots]})
        r = float(real[0].real)
        if abs(r - ci) < min_gap:
            return QuinticVerdict(False, f"critical point {ci:.6g} is a root of higher multiplicity")
        hi, lo = sorted(cplx, key=lambda z: -z.imag)
        if not (hi.imag > 0 > lo.imag) or abs(hi - lo.conjugate()) > 1e-8 * max(1.0, abs(hi)):
            return QuinticVerdict(False, "complex roots are not a conjugate pair off the real line")
        profiles.append(RootProfile(float(ci), val, float(ci), r, (complex(hi), complex(lo)), resid))
    cert = QuinticCertificate(tuple(float(a) for a in c[:5]), tuple(float(z) for z in cr), tuple(profiles))
    return QuinticVerdict(True, "", cert)


def quintic_from_critical_points(cs, a0: float = 0.0) -> np.ndarray:
    """Monic quintic with ``Q' = 5 prod (z - c_i)`` and ``Q(0) = a0``."""
    dq = 5.0 * P.polyfromroots(np.asarray(cs, dtype=float))
    q = P.polyint(dq)
    q[0] = a0
    return q


def quintic_search(seed: int = 0, budget: int = DEFAULT_BUDGET, scale: float = 2.0) -> QuinticCertificate:
    """Random search over sorted real critical points; the first passing quintic is returned."""
    rng = np.random.default_rng(seed)
    for attempt in range(1, budget + 1):
        cs = np.sort(rng.normal(scale=scale, size=4))
        if np.any(np.diff(cs) < 10 * MIN_GAP):
            continue
        verdict = quintic_verify(quintic_from_critical_points(cs))
        if verdict.passed:
            cert = verdict.certificate
            return QuinticCertificate(cert.coeffs, cert.critical_points, cert.profiles, attempt)
    raise NumericalError(f"no certificate within budget {budget} (seed {seed})")


CHEBYSHEV_QUINTIC = (0.0, 5.0, 0.0, -5.0, 0.0, 1.0)
