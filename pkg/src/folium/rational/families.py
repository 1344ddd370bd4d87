"""Families ``R(x, t) = N(x, t) / D(x, t)`` of rational functions of ``t``.

``N`` and ``D`` are polynomials in ``t`` whose coefficients are truncated
series in ``x``.  The critical locus of the family is the zero set of
``W = N_t D - N D_t``.  Its branches through the points ``(0, t0)`` are
found from the Newton polygon of ``W`` after the shift ``t = t0 + s``:

* an edge of integer slope ``e >= 1`` gives branches ``t = t0 + c x^e + ...``;
* an edge of slope ``1/q`` with ``q >= 2`` gives ``x = c s^q + ...``, a curve
  tangent to the divisor ``x = 0`` with tangency order ``l = q - 1``;
* other slopes need fractional exponents and are reported as unsupported.

A branch along which ``W`` vanishes to order ``nu`` is a simple zero of the
``(nu-1)``-th derivative; it is lifted order by order and then checked by
exact division.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..errors import DomainError
from ..roots import EPS_ROOT, roots_with_multiplicity
from ..series import EPS_COEF, Series1, Series2, _shift_second, divide_by_curve, poly_mul2
from .maps import INF, RationalMap, complex_to_json

LEVEL_TOL = 1e-8
POLYGON_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class RationalFamily:
    """``R(x, t) = sum_i num[i](x) t^i / sum_i den[i](x) t^i``."""

    num: tuple[Series1, ...]
    den: tuple[Series1, ...]

    def __post_init__(self):
        num, den = tuple(self.num), tuple(self.den)
        if not num or not den:
            raise DomainError("numerator and denominator need at least one coefficient")
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        R0 = self.specialize(0.0)
        if R0.degree < 1:
            raise DomainError("the map at x = 0 is constant")

    @classmethod
    def from_tables(cls, N: Series2 | np.ndarray, D: Series2 | np.ndarray) -> "RationalFamily":
        """From tables ``[j, i]`` (coefficient of ``x^j t^i``)."""
        n = N.coeffs if isinstance(N, Series2) else np.asarray(N, dtype=complex)
        d = D.coeffs if isinstance(D, Series2) else np.asarray(D, dtype=complex)
        jx = min(n.shape[0], d.shape[0]) - 1
        return cls(tuple(Series1(n[: jx + 1, i]) for i in range(n.shape[1])),
                   tuple(Series1(d[: jx + 1, i]) for i in range(d.shape[1])))

    @property
    def order_x(self) -> int:
        return min(s.order for s in self.num + self.den)

    def tables(self) -> tuple[Series2, Series2]:
        J = self.order_x
        n = np.array([s.coeffs[: J + 1] for s in self.num]).T
        d = np.array([s.coeffs[: J + 1] for s in self.den]).T
        return Series2(n), Series2(d)

    def specialize(self, x: complex) -> RationalMap:
        num = np.array([np.polynomial.polynomial.polyval(x, s.coeffs) for s in self.num])
        den = np.array([np.polynomial.polynomial.polyval(x, s.coeffs) for s in self.den])
        return RationalMap(num, den)

    @property
    def degree(self) -> int:
        return self.specialize(0.0).degree

    def post_compose(self, q) -> "RationalFamily":
        """``Q o R`` for a polynomial ``Q`` (ascending coefficients)."""
        N, D = self.tables()
        q = np.asarray(q, dtype=complex)
        n = q.size - 1
        one = Series2(np.ones((N.order_x + 1, 1)) * (np.arange(N.order_x + 1) == 0)[:, None])

        def power(T, k):
            acc = one
            for _ in range(k):
                acc = poly_mul2(acc, T)
            return acc

        num = None
        for i, qi in enumerate(q):
            term = poly_mul2(power(N, i), power(D, n - i)).coeffs * qi
            num = term if num is None else _padd(num, term)
        return RationalFamily.from_tables(num, power(D, n).coeffs)

    def to_json(self) -> dict:
        return {"vars": ["x", "t"], "num": [s.to_json() for s in self.num],
                "den": [s.to_json() for s in self.den]}

    @classmethod
    def from_json(cls, data: dict) -> "RationalFamily":
        return cls(tuple(Series1.from_json(s) for s in data["num"]),
                   tuple(Series1.from_json(s) for s in data["den"]))


def _padd(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros((max(a.shape[0], b.shape[0]), max(a.shape[1], b.shape[1])), dtype=complex)
    out[: a.shape[0], : a.shape[1]] += a
    out[: b.shape[0], : b.shape[1]] += b
    return out


def _dt(T: np.ndarray) -> np.ndarray:
    if T.shape[1] == 1:
        return np.zeros_like(T)
    return T[:, 1:] * np.arange(1, T.shape[1])


def _dx(T: np.ndarray) -> np.ndarray:
    if T.shape[0] == 1:
        return np.zeros_like(T)
    return T[1:, :] * np.arange(1, T.shape[0])[:, None]


def _pmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return poly_mul2(Series2(a), Series2(b)).coeffs


def wronskian_tables(F: RationalFamily) -> tuple[np.ndarray, np.ndarray]:
    """Numerators of ``R_x`` and ``R_t`` (both over ``D^2``)."""
    N, D = (T.coeffs for T in F.tables())
    wt = _padd(_pmul(_dt(N), D), -_pmul(N, _dt(D)))
    Nx, Dx = _dx(N), _dx(D)
    J = Nx.shape[0] - 1
    wx = _padd(_pmul(Nx, D[: J + 1]), -_pmul(N[: J + 1], Dx))
    return wx, wt


def _deriv_second(T: np.ndarray, k: int) -> np.ndarray:
    for _ in range(k):
        T = _dt(T)
    return T


def _along(T: np.ndarray, w: np.ndarray, order: int) -> np.ndarray:
    """``sum_b T[:, b](u) w(u)^b`` truncated at ``u^order`` (Horner in ``w``)."""
    def col(b):
        c = np.zeros(order + 1, dtype=complex)
        n = min(order + 1, T.shape[0])
        c[:n] = T[:n, b]
        return c

    acc = col(T.shape[1] - 1)
    for b in range(T.shape[1] - 2, -1, -1):
        acc = np.convolve(acc, w[: order + 1])[: order + 1] + col(b)
    return acc


def _valuation(c: np.ndarray, tol: float) -> int | None:
    scale = max(1e-300, float(np.max(np.abs(c)))) if c.size else 0.0
    nz = np.flatnonzero(np.abs(c) > tol * max(1.0, scale))
    return int(nz[0]) if nz.size else None


def _lift(H: np.ndarray, e: int, c: complex, order: int) -> tuple[np.ndarray, int] | None:
    """Solve ``H(u, w(u)) = 0`` with ``w = c u^e + ...`` where ``c`` is a simple edge root.

    Returns ``(w, v)`` where ``v`` is the valuation of ``H_w`` along the branch;
    ``w`` is reliable through ``u^(order - v)``.
    """
    w = np.zeros(order + 1, dtype=complex)
    if e > order:
        return None
    w[e] = c
    Hw = _deriv_second(H, 1)
    D = _along(Hw, w, order)
    v = _valuation(D, 1e-8)
    if v is None or v + e > order:
        return None
    top = order - v
    for n in range(e + 1, top + 1):
        E = _along(H, w, order)
        w[n] = -E[n + v] / D[v]
    return w[: top + 1], v


@dataclass(frozen=True)
class _Edge:
    k1: int
    j1: int
    k2: int
    j2: int

    @property
    def slope(self) -> Fraction:
        return Fraction(self.j2 - self.j1, self.k1 - self.k2)


def _newton_edges(Ws: np.ndarray, mu: int, tol: float) -> tuple[list[_Edge], int]:
    """Lower hull from ``(k=mu, j=0)`` towards ``k = 0`` in the (s-power, x-power) plane.

    The second return value is the s-power where the hull stops (``> 0``
    when ``s`` divides the table).
    """
    scale = max(1e-300, float(np.max(np.abs(Ws))))
    pts = [(k, j) for j in range(Ws.shape[0]) for k in range(min(mu, Ws.shape[1] - 1) + 1)
           if abs(Ws[j, k]) > tol * scale]
    edges = []
    cur = (mu, 0)
    while True:
        cands = [(Fraction(j - cur[1], cur[0] - k), k, j) for k, j in pts if k < cur[0]]
        if not cands:
            return edges, cur[0]
        best = min(c[0] for c in cands)
        k2, j2 = min((k, j) for s, k, j in cands if s == best)
        edges.append(_Edge(cur[0], cur[1], k2, j2))
        cur = (k2, j2)
        if k2 == 0:
            return edges, 0


@dataclass(frozen=True)
class CriticalBranch:
    """A branch of the critical locus through ``(0, t0)``.

    ``param`` is ``"t=f(x)"`` (``series`` is ``f`` with ``f(0) = t0``) or
    ``"x=g(t)"`` (``series`` is ``g`` in the variable ``s = t - t0``).
    ``order`` is the vanishing order of ``N_t D - N D_t`` along the branch.
    ``values`` is ``R`` along the branch; ``level`` says it is constant.
    """

    t0: complex
    param: str
    series: Series1 | None
    order: int
    kind: str | None
    level: bool
    value: complex
    values: Series1 | None = None
    tangency: int | None = None
    exponent: int | None = None
    supported: bool = True
    note: str = ""

    def to_json(self) -> dict:
        return {
            "t0": complex_to_json(self.t0),
            "param": self.param,
            "series": self.series.to_json() if self.series is not None else None,
            "order": self.order,
            "kind": self.kind,
            "level": self.level,
            "value": complex_to_json(self.value),
            "tangency": self.tangency,
            "exponent": self.exponent,
            "supported": self.supported,
            "note": self.note,
        }


def _values_along(Ns: np.ndarray, Ds: np.ndarray, w: np.ndarray, order: int) -> tuple[Series1, bool]:
    """``N/D`` along a branch; the bool flags a pole (``1/R`` returned instead)."""
    n = _along(Ns, w, order)
    d = _along(Ds, w, order)
    if abs(d[0]) > 1e-12 * max(1.0, abs(n[0])):
        return Series1(n) / Series1(d), False
    return Series1(d) / Series1(n), True


def _is_constant(s: Series1) -> bool:
    c = s.coeffs
    return bool(np.all(np.abs(c[1:]) <= LEVEL_TOL * max(1.0, abs(c[0]))))


def classify_critical_curves(F: RationalFamily, eps_root: float = EPS_ROOT,
                             tol: float = POLYGON_TOL) -> list[CriticalBranch]:
    """Branches of ``{N_t D - N D_t = 0}`` through points of ``x = 0`` in the ``t`` chart."""
    N, D = (T.coeffs for T in F.tables())
    _, W = wronskian_tables(F)
    J = W.shape[0] - 1
    v = _valuation(np.max(np.abs(W), axis=1), 1e-14)
    if v is None:
        raise DomainError("R does not depend on t")
    W = W[v:]  # a power of x dividing W marks the divisor itself; it is removed
    J -= v
    out: list[CriticalBranch] = []
    for t0, mu in roots_with_multiplicity(W[0], eps_root):
        t0 = complex(t0)
        shift = np.array([t0])
        Ws = _shift_second(W, shift, 1.0)
        Ns = _shift_second(N, shift, 1.0)
        Ds = _shift_second(D, shift, 1.0)
        R0 = F.specialize(0.0).value(t0)
        edges, rest = _newton_edges(Ws, mu, tol)
        for edge in edges:
            out.extend(_branches_on_edge(edge, Ws, Ns, Ds, t0, J, R0, eps_root))
        if rest > 0:
            vals, pole = _values_along(Ns, Ds, np.zeros(J + 1, dtype=complex), J)
            level = _is_constant(vals)
            out.append(CriticalBranch(
                t0=t0, param="t=f(x)", series=Series1(np.r_[t0, np.zeros(J)]), order=rest,
                kind="level" if level else "non-invariant", level=level,
                value=INF if (pole and level) else R0, values=vals, exponent=None,
                note="t - t0 divides the critical equation"))
    return out


def _branches_on_edge(edge: _Edge, Ws, Ns, Ds, t0: complex, J: int, R0: complex,
                      eps_root: float) -> list[CriticalBranch]:
    rho = edge.slope
    out = []
    if rho.denominator == 1 and rho >= 1:
        e = int(rho)
        phi = np.zeros(edge.k1 - edge.k2 + 1, dtype=complex)
        for k in range(edge.k2, edge.k1 + 1):
            j = edge.j1 + e * (edge.k1 - k)
            if j < Ws.shape[0]:
                phi[k - edge.k2] = Ws[j, k]
        for c, nu in roots_with_multiplicity(phi, eps_root):
            H = _deriv_second(Ws, nu - 1)
            lifted = _lift(H, e, complex(c), J)
            if lifted is None:
                out.append(_unsupported(t0, nu, R0, f"lifting failed for t = t0 + {c:.4g} x^{e}"))
                continue
            f, _ = lifted
            check = divide_by_curve(Series2(Ws[: f.size]), Series1(f), nu, 1e-7)
            if not check.ok:
                out.append(_unsupported(t0, nu, R0, "branch splits beyond its leading term"))
                continue
            vals, pole = _values_along(Ns, Ds, f, f.size - 1)
            level = _is_constant(vals)
            full = f.copy()
            full[0] += t0
            out.append(CriticalBranch(
                t0=t0, param="t=f(x)", series=Series1(full), order=nu,
                kind="level" if level else "non-invariant", level=level,
                value=(INF if pole and level else (vals.coeffs[0] if not pole else R0)),
                values=vals, exponent=e))
    elif rho.numerator == 1 and rho < 1:
        q = rho.denominator
        phi = np.zeros(edge.j2 - edge.j1 + 1, dtype=complex)
        for j in range(edge.j1, edge.j2 + 1):
            k = edge.k2 + q * (edge.j2 - j)
            if k < Ws.shape[1]:
                phi[j - edge.j1] = Ws[j, k]
        for c, nu in roots_with_multiplicity(phi, eps_root):
            T = Ws.T.copy()  # [s-power, x-power]
            H = _deriv_second(T, nu - 1)
            U = q * (H.shape[1]) - 1
            Hp = np.zeros((U + 1, H.shape[1]), dtype=complex)
            Hp[: min(U + 1, H.shape[0])] = H[: U + 1]
            lifted = _lift(Hp, q, complex(c), U)
            if lifted is None:
                out.append(_unsupported(t0, nu, R0, f"lifting failed for x = {c:.4g} s^{q}"))
                continue
            g, _ = lifted
            Tp = np.zeros((g.size, T.shape[1]), dtype=complex)
            Tp[: min(g.size, T.shape[0])] = T[: g.size]
            check = divide_by_curve(Series2(Tp), Series1(g), nu, 1e-7)
            if not check.ok:
                out.append(_unsupported(t0, nu, R0, "branch splits beyond its leading term"))
                continue
            vals, pole = _values_along(_transposed(Ns, g.size), _transposed(Ds, g.size), g, g.size - 1)
            level = _is_constant(vals)
            out.append(CriticalBranch(
                t0=t0, param="x=g(t)", series=Series1(g), order=nu, kind="divisor-tangent",
                level=level, value=(INF if pole and level else (vals.coeffs[0] if not pole else R0)),
                values=vals, tangency=q - 1, exponent=q))
    else:
        out.append(_unsupported(t0, edge.k1 - edge.k2, R0,
                                f"Puiseux branch with fractional exponent {rho} (unsupported)"))
    return out


def _transposed(T: np.ndarray, rows: int) -> np.ndarray:
    out = np.zeros((rows, T.shape[0]), dtype=complex)
    out[: min(rows, T.shape[1])] = T.T[:rows]
    return out


def _unsupported(t0, order, R0, note) -> CriticalBranch:
    return CriticalBranch(t0=t0, param="unsupported", series=None, order=order, kind=None,
                          level=False, value=R0, supported=False, note=note)


@dataclass(frozen=True)
class DRFactorReport:
    """How often the branch factor divides both coefficients of ``dR``.

    ``exponent`` is the largest ``e <= m + 1`` with the factor to the power
    ``e`` dividing both numerators; ``ok`` means ``exponent == m``.
    """

    m: int
    exponent: int
    ok: bool
    residuals: tuple[float, ...]

    def to_json(self) -> dict:
        return {"m": self.m, "exponent": self.exponent, "ok": self.ok, "residuals": list(self.residuals)}


def verify_dR_factor(F: RationalFamily, branch: CriticalBranch, m: int,
                     tol: float = 1e-7) -> DRFactorReport:
    """Check that the branch factor divides ``dR`` exactly ``m`` times."""
    if not branch.supported or branch.series is None:
        raise DomainError("branch is not supported")
    wx, wt = wronskian_tables(F)
    if branch.param == "t=f(x)":
        f = branch.series
        tables = [Series2(wx[: f.order + 1]), Series2(wt[: min(f.order, wt.shape[0] - 1) + 1])]

        def divides(T, k):
            return divide_by_curve(T, f, k, tol)
    else:
        g = branch.series
        shift = np.array([branch.t0])
        q = branch.exponent or 1
        tables = []
        for T in (wx, wt):
            Ts = _shift_second(T, shift, 1.0).T
            U = min(g.order, q * T.shape[0] - 1)
            Tp = np.zeros((U + 1, Ts.shape[1]), dtype=complex)
            Tp[: min(U + 1, Ts.shape[0])] = Ts[: U + 1]
            tables.append(Series2(Tp))

        def divides(T, k):
            return divide_by_curve(T, g.truncate(T.order_x), k, tol)

    exponent = 0
    residuals = []
    for k in range(1, m + 2):
        res = [divides(T, k) for T in tables]
        residuals.append(max(r.residual for r in res))
        if all(r.ok for r in res):
            exponent = k
        else:
            break
    return DRFactorReport(m, exponent, exponent == m, tuple(residuals))
