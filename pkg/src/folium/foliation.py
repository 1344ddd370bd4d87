"""Germs of plane foliations given by 1-forms ``p dx + q dy``.

Forms are stored as pairs of :class:`~folium.series.Series2` tables read as
exact polynomials.  After the blow-up ``y = t x`` only the chart ``(x, t)`` is
used; in it the exceptional divisor is the line ``x = 0``.

The first integral of a regular form ``A dx + B dt`` is built from the leaf
ODE ``dx/dt = -B/A``: the solution ``X(t; x0)`` is expanded in ``t`` with
coefficients that are series in ``x0``, and ``F`` is obtained by inverting
``x = X(t; x0)`` for ``x0`` order by order in ``t``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import convolve2d

from .errors import DomainError
from .involutions import Involution, involution_from_level
from .roots import roots_with_multiplicity
from .series import EPS_COEF, Series1, Series2, _shift_second, blow_up_substitute, divide_by_x_power

FRAMES = ("xy", "xt")


def _table(s: Series2, shape: tuple[int, int]) -> np.ndarray:
    out = np.zeros(shape, dtype=complex)
    a, b = min(shape[0], s.coeffs.shape[0]), min(shape[1], s.coeffs.shape[1])
    out[:a, :b] = s.coeffs[:a, :b]
    return out


def _trim_table(arr: np.ndarray) -> np.ndarray:
    rows = np.flatnonzero(np.any(arr != 0, axis=1))
    cols = np.flatnonzero(np.any(arr != 0, axis=0))
    if rows.size == 0:
        return np.zeros((1, 1), dtype=complex)
    return arr[: rows[-1] + 1, : cols[-1] + 1]


@dataclass(frozen=True)
class OneForm:
    """``p dx + q dy`` (frame ``"xy"``) or ``p dx + q dt`` (frame ``"xt"``)."""

    p: Series2
    q: Series2
    frame: str = "xy"

    def __post_init__(self):
        if self.frame not in FRAMES:
            raise DomainError(f"unknown frame {self.frame!r}")
        if self.p.is_zero(0.0) and self.q.is_zero(0.0):
            raise DomainError("both coefficients vanish identically")
        second = self.frame[1]
        object.__setattr__(self, "p", Series2(self.p.coeffs, vars=("x", second)))
        object.__setattr__(self, "q", Series2(self.q.coeffs, vars=("x", second)))

    @classmethod
    def from_terms(cls, p: dict, q: dict, frame: str = "xy") -> "OneForm":
        """Build from ``{(j, k): c}`` dictionaries (``c x^j y^k``)."""
        def table(terms):
            jx = max([j for j, _ in terms] or [0])
            kt = max([k for _, k in terms] or [0])
            return Series2.from_terms(terms, jx, kt, vars=("x", frame[1]))
        return cls(table(p), table(q), frame)

    @property
    def singular_at_origin(self) -> bool:
        return abs(self.p[0, 0]) <= EPS_COEF and abs(self.q[0, 0]) <= EPS_COEF

    def times(self, u: Series2) -> "OneForm":
        """Multiply both coefficients by the polynomial ``u`` (same foliation if ``u(0,0) != 0``)."""
        p = Series2(convolve2d(self.p.coeffs, u.coeffs), vars=self.p.vars)
        q = Series2(convolve2d(self.q.coeffs, u.coeffs), vars=self.q.vars)
        return OneForm(p, q, self.frame)

    def evaluate(self, x: complex, y: complex) -> tuple[complex, complex]:
        return self.p.evaluate(x, y), self.q.evaluate(x, y)

    def to_json(self) -> dict:
        return {"frame": self.frame, "p": self.p.to_json(), "q": self.q.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "OneForm":
        return cls(Series2.from_json(data["p"]), Series2.from_json(data["q"]), data.get("frame", "xy"))


@dataclass(frozen=True)
class TangencyDatum:
    """A point ``(0, t0)`` where leaves are tangent to the divisor, with tangency order."""

    t0: complex
    order: int

    def __post_init__(self):
        if self.order < 1:
            raise DomainError("tangency order must be >= 1")

    def to_json(self) -> dict:
        t0 = complex(self.t0)
        return {"t0": [t0.real, t0.imag], "order": self.order}


# ---------------------------------------------------------------------------
# blow-up and the T1 test

def blow_up(omega: OneForm, tol: float = EPS_COEF) -> tuple[OneForm, int]:
    """Pull back by ``y = t x`` and divide by the largest common power of ``x``.

    ``p dx + q dy`` becomes ``(p~ + t q~) dx + x q~ dt`` with ``p~ = p(x, tx)``.
    """
    if omega.frame != "xy":
        raise DomainError("blow_up expects a form in the (x, y) frame")
    pt = blow_up_substitute(omega.p).coeffs
    qt = blow_up_substitute(omega.q).coeffs
    jx = max(pt.shape[0], qt.shape[0] + 1)
    kt = max(pt.shape[1], qt.shape[1] + 1)
    big_p = np.zeros((jx, kt), dtype=complex)
    big_q = np.zeros((jx, kt), dtype=complex)
    big_p[: pt.shape[0], : pt.shape[1]] += pt
    big_p[: qt.shape[0], 1: qt.shape[1] + 1] += qt
    big_q[1: qt.shape[0] + 1, : qt.shape[1]] += qt
    scale = max(1.0, float(np.max(np.abs(big_p))), float(np.max(np.abs(big_q))))
    # exact cancellations (e.g. t^2 x^2 - t^2 x^2) can leave rounding residue
    big_p[np.abs(big_p) <= tol * scale] = 0
    big_q[np.abs(big_q) <= tol * scale] = 0
    sp = Series2(big_p, vars=("x", "t"))
    sq = Series2(big_q, vars=("x", "t"))
    vals = [v for v in (sp.x_valuation(0.0), sq.x_valuation(0.0)) if v is not None]
    if not vals:
        raise DomainError("blown-up form vanishes identically")
    k = min(vals)
    p_red = _trim_table(divide_by_x_power(sp, k, tol).coeffs)
    q_red = _trim_table(divide_by_x_power(sq, k, tol).coeffs)
    return OneForm(Series2(p_red, vars=("x", "t")), Series2(q_red, vars=("x", "t")), "xt"), k


@dataclass(frozen=True)
class T1Report:
    """Outcome of :func:`is_T1`; ``beta`` is set exactly when all jet conditions hold.

    ``scale`` is the common factor removed from ``p`` and ``q`` so that the
    quadratic parts read ``y^2 dx - xy dy``.
    """

    beta: complex | None
    failure: str = ""
    scale: complex = 1.0

    @property
    def ok(self) -> bool:
        return self.beta is not None

    def to_json(self) -> dict:
        b = None if self.beta is None else [complex(self.beta).real, complex(self.beta).imag]
        return {"is_t1": self.ok, "beta": b, "failure": self.failure}


def _homogeneous(s: Series2, d: int) -> dict[tuple[int, int], complex]:
    out = {}
    for j in range(d + 1):
        k = d - j
        if j <= s.order_x and k <= s.order_t:
            out[(j, k)] = complex(s.coeffs[j, k])
        else:
            out[(j, k)] = 0j
    return out


def is_T1(omega: OneForm, tol: float = EPS_COEF, normalize: bool = True) -> T1Report:
    """Check the jet conditions of the class T1 on ``p dx + q dy``.

    With ``a = -q`` and ``b = p`` split into homogeneous parts, the
    conditions are ``a_2 = xy``, ``b_2 = y^2`` and
    ``x b_3 - y a_3 = beta x^4`` with ``beta != 0``.  Multiplying the form by
    a nonzero constant does not change the foliation, so by default the form
    is first divided by the coefficient of ``y^2 dx``.
    """
    if omega.frame != "xy":
        return T1Report(None, "form is not in the (x, y) frame")
    p, q = omega.p, omega.q
    for d in (0, 1):
        for s, name in ((p, "b"), (q, "a")):
            if any(abs(c) > tol for c in _homogeneous(s, d).values()):
                return T1Report(None, f"{name}_{d} != 0 (terms of degree {d} present)")
    kappa = complex(p[0, 2]) if p.order_t >= 2 else 0j
    if not normalize:
        kappa = 1.0 + 0j
    if abs(kappa) <= tol:
        return T1Report(None, "b_2 != y^2 (no y^2 dx term)")
    b2 = {m: c / kappa for m, c in _homogeneous(p, 2).items()}
    a2 = {m: -c / kappa for m, c in _homogeneous(q, 2).items()}
    want_a2 = {(2, 0): 0, (1, 1): 1, (0, 2): 0}
    want_b2 = {(2, 0): 0, (1, 1): 0, (0, 2): 1}
    if any(abs(a2[m] - v) > tol for m, v in want_a2.items()):
        return T1Report(None, "a_2 != xy", kappa)
    if any(abs(b2[m] - v) > tol for m, v in want_b2.items()):
        return T1Report(None, "b_2 != y^2", kappa)
    b3 = {m: c / kappa for m, c in _homogeneous(p, 3).items()}
    a3 = {m: -c / kappa for m, c in _homogeneous(q, 3).items()}
    # coefficient of x^{4-i} y^i in x b_3 - y a_3
    quartic = [b3.get((3 - i, i), 0j) - a3.get((4 - i, i - 1), 0j) for i in range(5)]
    if any(abs(c) > tol for c in quartic[1:]):
        return T1Report(None, "x b_3 - y a_3 is not a multiple of x^4", kappa)
    beta = quartic[0]
    if abs(beta) <= tol:
        return T1Report(None, "beta = 0", kappa)
    return T1Report(beta, "", kappa)


def model_from_beta(beta: complex, higher_a: dict | None = None, higher_b: dict | None = None,
                    check: bool = True) -> OneForm:
    """``(y^2 + beta x^3 + higher_b) dx - (xy + higher_a) dy``.

    ``higher_a`` and ``higher_b`` map ``(j, k)`` to the coefficient of
    ``x^j y^k``.  With ``check`` the result must pass :func:`is_T1`; extra
    terms of degree 3 in ``a`` generally break the cubic condition.
    """
    if abs(beta) <= EPS_COEF:
        raise DomainError("beta must be nonzero")
    p = {(0, 2): 1.0, (3, 0): complex(beta)}
    q = {(1, 1): -1.0}
    for (j, k), c in (higher_b or {}).items():
        p[(j, k)] = p.get((j, k), 0) + c
    for (j, k), c in (higher_a or {}).items():
        q[(j, k)] = q.get((j, k), 0) - c
    omega = OneForm.from_terms(p, q, "xy")
    if check:
        rep = is_T1(omega)
        if not rep.ok:
            raise DomainError(f"higher terms break the T1 conditions: {rep.failure}")
    return omega


# ---------------------------------------------------------------------------
# tangencies with the divisor

def tangencies(omega_t: OneForm, tol: float = EPS_COEF, eps_root: float = 1e-8) -> list[TangencyDatum]:
    """Points of ``x = 0`` where the leaves are tangent to the divisor.

    These are the roots of the ``dt``-coefficient restricted to ``x = 0``.  If
    that restriction vanishes identically the divisor is itself a leaf.
    """
    if omega_t.frame != "xt":
        raise DomainError("tangencies expects a blown-up form in the (x, t) frame")
    a0 = omega_t.p.coeffs[0, :]
    b0 = omega_t.q.coeffs[0, :]
    scale_b = max(1.0, float(np.max(np.abs(b0))))
    if np.all(np.abs(b0) <= tol * scale_b):
        raise DomainError("divisor invariant (dt-coefficient vanishes on x = 0)")
    out = []
    for t0, mult in roots_with_multiplicity(b0, eps_root):
        av = complex(np.polynomial.polynomial.polyval(t0, a0))
        mag = float(np.sum(np.abs(a0) * max(1.0, abs(t0)) ** np.arange(a0.size)))
        if abs(av) <= 1e-8 * max(1.0, mag):
            raise DomainError(f"singular point on divisor at t = {t0:.6g}")
        out.append(TangencyDatum(t0, mult))
    return out


def shift_t(omega_t: OneForm, t0: complex) -> OneForm:
    """Recentre the chart so that ``(0, t0)`` becomes the origin."""
    if t0 == 0:
        return omega_t
    f = np.array([complex(t0)])
    return OneForm(Series2(_shift_second(omega_t.p.coeffs, f, +1.0)),
                   Series2(_shift_second(omega_t.q.coeffs, f, +1.0)), "xt")


# ---------------------------------------------------------------------------
# first integral

def _compose_rows(coef: np.ndarray, powers: np.ndarray, i: int) -> np.ndarray:
    """``[C(X, t)]_i`` from the table ``coef[j, l]`` and ``powers[j, n] = [X^j]_n``."""
    jmax = min(coef.shape[0], powers.shape[0])
    acc = np.zeros(powers.shape[2], dtype=complex)
    for l in range(min(i, coef.shape[1] - 1) + 1):
        acc += coef[:jmax, l] @ powers[:jmax, i - l, :]
    return acc


def first_integral(omega_t: OneForm, order_t: int = 24, order_x: int = 8,
                   tol: float = EPS_COEF) -> Series2:
    """``F(x, t)`` with ``F(x, 0) = x`` and ``dF ^ omega = 0``, to orders ``(order_x, order_t)``.

    ``omega = A dx + B dt`` must satisfy ``A(0, 0) != 0``.  The coefficient
    tables are read as exact polynomials.  Internally the x-order is raised
    by ``order_t``: inverting in ``x0`` costs one x-order per t-order.
    """
    if omega_t.frame != "xt":
        raise DomainError("first_integral expects a form in the (x, t) frame")
    K, J = int(order_t), int(order_x)
    if K < 0 or J < 0:
        raise DomainError("orders must be non-negative")
    a00 = omega_t.p[0, 0]
    if abs(a00) <= tol:
        raise DomainError("A(0,0) = 0: the leaves are not graphs over t here; recentre first")
    Jw = J + K
    L = Jw + 1
    A = _table(omega_t.p, (L, K + 1))
    B = _table(omega_t.q, (L, K + 1))

    # reciprocal of A(x0, 0) as a series in x0
    inv_a0 = np.zeros(L, dtype=complex)
    inv_a0[0] = 1 / A[0, 0]
    for n in range(1, L):
        inv_a0[n] = -np.dot(A[1: n + 1, 0], inv_a0[n - 1:: -1][:n]) / A[0, 0]

    X = np.zeros((K + 1, L), dtype=complex)
    X[0, 1 if L > 1 else 0] = 1.0 if L > 1 else 0.0
    powers = np.zeros((L, K + 1, L), dtype=complex)
    powers[0, 0, 0] = 1.0
    for j in range(1, L):
        powers[j, 0, j] = 1.0

    def conv(u, v):
        return np.convolve(u, v)[:L]

    for k in range(K):
        # A(X,t) X' + B(X,t) = 0 at t^k, solved for X_{k+1}
        rhs = -_compose_rows(B, powers, k)
        for i in range(1, k + 1):
            rhs -= (k + 1 - i) * conv(_compose_rows(A, powers, i), X[k + 1 - i])
        X[k + 1] = conv(rhs, inv_a0) / (k + 1)
        n = k + 1
        partial = np.zeros((L - 1, L), dtype=complex)
        for a in range(n):
            partial += convolve2d(powers[: L - 1, a, :], X[n - a][None, :])[:, :L]
        for j in range(1, L):
            powers[j, n, :] = partial[j - 1]
            powers[j, n, 1:] += powers[j - 1, n, :-1]

    # invert x = X(t; x0): F = x + G with G = sum_{k>=1} F_k t^k
    taylor = np.zeros((K + 1, K + 1, L), dtype=complex)  # taylor[n, r] = X_n^{(r)} / r!
    for n in range(1, K + 1):
        for r in range(K + 1):
            if r < L:
                binom = np.array([_binom(i + r, r) for i in range(L - r)])
                taylor[n, r, : L - r] = binom * X[n, r:]
    Fk = np.zeros((K + 1, L), dtype=complex)
    if L > 1:
        Fk[0, 1] = 1.0
    gpow = np.zeros((K + 1, K + 1, L), dtype=complex)  # gpow[r, j] = [G^r]_j
    gpow[0, 0, 0] = 1.0
    for k in range(1, K + 1):
        acc = np.zeros(L, dtype=complex)
        for n in range(1, k + 1):
            j = k - n
            for r in range(j + 1):
                if gpow[r, j].any():
                    acc += conv(taylor[n, r], gpow[r, j])
        Fk[k] = -acc
        gpow[1, k] = Fk[k]
        for r in range(2, k + 1):
            s = np.zeros(L, dtype=complex)
            for a in range(r - 1, k):
                s += conv(gpow[r - 1, a], Fk[k - a])
            gpow[r, k] = s
    return Series2(Fk[:, : J + 1].T, J, K)


def _binom(n: int, r: int) -> float:
    from math import comb
    return float(comb(n, r))


# ---------------------------------------------------------------------------
# the involution of a T1 germ

def _fmt_point(z: complex) -> str:
    z = complex(z)
    if abs(z.imag) <= 1e-12 * max(1.0, abs(z)):
        return f"{z.real:.4g}"
    return f"{z:.4g}"


def involution_of(omega: OneForm, order: int = 24, check_t1: bool = True) -> Involution:
    """The tangency involution of a germ in T1, to ``order`` in ``t``.

    Pipeline: blow-up, the single order-1 tangency moved to ``t = 0``, first
    integral ``F``, then the deck involution of ``g(t) = F(0, t) - F(0, 0)``.
    ``check_t1=False`` skips the jet test and relies on the blown-up form
    having one simple tangency.
    """
    if check_t1:
        rep = is_T1(omega)
        if not rep.ok:
            raise DomainError(f"not in T1: {rep.failure}")
    omega_t, _ = blow_up(omega)
    tans = tangencies(omega_t)
    if len(tans) != 1 or tans[0].order != 1:
        desc = ", ".join(f"t={_fmt_point(d.t0)} (order {d.order})" for d in tans) or "none"
        raise DomainError(f"not in T1 after blow-up: tangencies {desc}")
    centred = shift_t(omega_t, tans[0].t0)
    F = first_integral(centred, order_t=order + 1, order_x=0)
    g = F.row(0) - F[0, 0]
    return involution_from_level(g)
