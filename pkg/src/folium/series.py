"""Truncated power series in one variable ``t`` and two variables ``(x, t)``.

A :class:`Series1` of order ``N`` stores ``c_0 .. c_N``; every identity it
takes part in holds modulo ``t**(N+1)``.  Binary operations truncate to the
smaller order of their operands and never promote orders.

A :class:`Series2` stores a rectangular table ``c[j, k]`` (coefficient of
``x**j t**k``) with independent truncation orders in each variable.  Some
operations (blow-up substitution, division by a curve ``t - f(x)``) treat the
second variable as an exact polynomial of the table's degree; this is stated
on each of them.

Coefficients are complex doubles.  ``EPS_COEF`` is the default tolerance for
every "is this coefficient zero" decision.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Sequence

import numpy as np
from scipy.signal import convolve2d

from .errors import DomainError, TruncationOverflow

EPS_COEF = 1e-10

_FACTORIALS = np.array([float(math.factorial(j)) for j in range(171)])


def _scale(arr: np.ndarray) -> float:
    return max(1.0, float(np.max(np.abs(arr)))) if arr.size else 1.0


class Series1:
    """Truncated series ``c_0 + c_1 t + ... + c_N t^N  (mod t^{N+1})``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[complex] | np.ndarray, order: int | None = None):
        arr = np.array(coeffs, dtype=complex).ravel()
        if order is not None:
            if order < 0:
                raise DomainError("truncation order must be non-negative")
            if arr.size > order + 1:
                arr = arr[: order + 1]
            elif arr.size < order + 1:
                arr = np.concatenate([arr, np.zeros(order + 1 - arr.size, dtype=complex)])
        if arr.size == 0:
            raise DomainError("a series needs at least the constant coefficient")
        arr.setflags(write=False)
        self.coeffs = arr

    # construction helpers
    @classmethod
    def zero(cls, order: int) -> "Series1":
        return cls(np.zeros(order + 1), order)

    @classmethod
    def identity(cls, order: int) -> "Series1":
        """The series ``t``."""
        return cls([0.0, 1.0], order)

    @classmethod
    def monomial(cls, power: int, order: int, coeff: complex = 1.0) -> "Series1":
        c = np.zeros(order + 1, dtype=complex)
        if power <= order:
            c[power] = coeff
        return cls(c)

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    def __getitem__(self, j: int) -> complex:
        if j < 0 or j > self.order:
            raise IndexError(f"coefficient t^{j} is beyond the truncation order {self.order}")
        return complex(self.coeffs[j])

    def __len__(self) -> int:
        return self.coeffs.size

    def __repr__(self) -> str:
        terms = []
        for j, c in enumerate(self.coeffs):
            if c != 0:
                terms.append(f"({c:.6g})t^{j}")
        body = " + ".join(terms) if terms else "0"
        return f"Series1({body} + O(t^{self.order + 1}))"

    def truncate(self, order: int) -> "Series1":
        if order > self.order:
            raise DomainError(f"cannot raise truncation order {self.order} to {order}")
        return Series1(self.coeffs[: order + 1])

    def extend(self, order: int) -> "Series1":
        """Pad with zero coefficients, i.e. read the series as a polynomial."""
        if order < self.order:
            return self.truncate(order)
        return Series1(self.coeffs, order)

    # arithmetic
    def _binary_order(self, other: "Series1") -> int:
        if not isinstance(other, Series1):
            raise DomainError(f"arity mismatch: Series1 with {type(other).__name__}")
        return min(self.order, other.order)

    def __add__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            c = self.coeffs.copy()
            c[0] += other
            return Series1(c)
        n = self._binary_order(other)
        return Series1(self.coeffs[: n + 1] + other.coeffs[: n + 1])

    __radd__ = __add__

    def __neg__(self):
        return Series1(-self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return Series1(self.coeffs * other)
        n = self._binary_order(other)
        return Series1(np.convolve(self.coeffs[: n + 1], other.coeffs[: n + 1])[: n + 1])

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return Series1(self.coeffs / other)
        return self * reciprocal(other)

    def __pow__(self, k: int):
        if k < 0:
            return reciprocal(self) ** (-k)
        result = Series1.monomial(0, self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def deriv(self) -> "Series1":
        """Derivative; the order drops by one (order 0 gives the zero series)."""
        if self.order == 0:
            return Series1([0.0])
        return Series1(self.coeffs[1:] * np.arange(1, self.order + 1))

    def __call__(self, arg):
        if isinstance(arg, Series1):
            return compose(self, arg)
        # Horner evaluation of the truncated polynomial
        acc = 0j
        for c in self.coeffs[::-1]:
            acc = acc * arg + c
        return acc

    def valuation(self, tol: float = EPS_COEF) -> int | None:
        nz = np.flatnonzero(np.abs(self.coeffs) > tol)
        return int(nz[0]) if nz.size else None

    def allclose(self, other: "Series1", tol: float = EPS_COEF) -> bool:
        n = min(self.order, other.order)
        return bool(np.all(np.abs(self.coeffs[: n + 1] - other.coeffs[: n + 1]) <= tol))

    def max_abs_diff(self, other: "Series1") -> float:
        n = min(self.order, other.order)
        return float(np.max(np.abs(self.coeffs[: n + 1] - other.coeffs[: n + 1])))

    # serialization
    def to_json(self) -> dict:
        return {
            "var": "t",
            "order": self.order,
            "coeffs": [[float(c.real), float(c.imag)] for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Series1":
        coeffs = [_complex_from_pair(p) for p in data["coeffs"]]
        order = int(data.get("order", len(coeffs) - 1))
        if len(coeffs) != order + 1:
            raise DomainError(f"series declares order {order} but carries {len(coeffs)} coefficients")
        return cls(coeffs, order)


def _complex_from_pair(p) -> complex:
    if isinstance(p, (list, tuple)):
        if len(p) != 2:
            raise DomainError(f"complex numbers are [re, im] pairs, got {p!r}")
        return complex(float(p[0]), float(p[1]))
    return complex(p)


class Series2:
    """Truncated bivariate series with table ``c[j, k]`` for ``x^j t^k``."""

    __slots__ = ("coeffs", "vars")

    def __init__(self, coeffs, order_x: int | None = None, order_t: int | None = None,
                 vars: tuple[str, str] = ("x", "t")):
        arr = np.array(coeffs, dtype=complex)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2:
            raise DomainError(f"bivariate table must be 2-dimensional, got shape {arr.shape}")
        jx = arr.shape[0] - 1 if order_x is None else order_x
        kt = arr.shape[1] - 1 if order_t is None else order_t
        if jx < 0 or kt < 0:
            raise DomainError("truncation orders must be non-negative")
        out = np.zeros((jx + 1, kt + 1), dtype=complex)
        a, b = min(jx + 1, arr.shape[0]), min(kt + 1, arr.shape[1])
        out[:a, :b] = arr[:a, :b]
        out.setflags(write=False)
        self.coeffs = out
        self.vars = tuple(vars)

    @classmethod
    def zero(cls, order_x: int, order_t: int, vars=("x", "t")) -> "Series2":
        return cls(np.zeros((order_x + 1, order_t + 1)), vars=vars)

    @classmethod
    def from_terms(cls, terms: dict[tuple[int, int], complex], order_x: int, order_t: int,
                   vars=("x", "t")) -> "Series2":
        """Build from ``{(j, k): c}`` meaning ``c x^j t^k``; terms beyond the table raise."""
        c = np.zeros((order_x + 1, order_t + 1), dtype=complex)
        for (j, k), v in terms.items():
            if j > order_x or k > order_t:
                if v != 0:
                    raise TruncationOverflow(f"monomial {vars[0]}^{j} {vars[1]}^{k} outside table")
                continue
            c[j, k] += v
        return cls(c, vars=vars)

    @property
    def order_x(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def order_t(self) -> int:
        return self.coeffs.shape[1] - 1

    def __getitem__(self, jk: tuple[int, int]) -> complex:
        return complex(self.coeffs[jk])

    def __repr__(self) -> str:
        return (f"Series2({self.vars[0]}^0..{self.order_x}, {self.vars[1]}^0..{self.order_t}, "
                f"nonzero={int(np.count_nonzero(self.coeffs))})")

    def _binary_orders(self, other) -> tuple[int, int]:
        if not isinstance(other, Series2):
            raise DomainError(f"arity mismatch: Series2 with {type(other).__name__}")
        return min(self.order_x, other.order_x), min(self.order_t, other.order_t)

    def __add__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            c = self.coeffs.copy()
            c[0, 0] += other
            return Series2(c, vars=self.vars)
        jx, kt = self._binary_orders(other)
        return Series2(self.coeffs[: jx + 1, : kt + 1] + other.coeffs[: jx + 1, : kt + 1],
                       vars=self.vars)

    __radd__ = __add__

    def __neg__(self):
        return Series2(-self.coeffs, vars=self.vars)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return Series2(self.coeffs * other, vars=self.vars)
        jx, kt = self._binary_orders(other)
        full = convolve2d(self.coeffs[: jx + 1, : kt + 1], other.coeffs[: jx + 1, : kt + 1])
        return Series2(full[: jx + 1, : kt + 1], vars=self.vars)

    __rmul__ = __mul__

    def deriv_x(self) -> "Series2":
        if self.order_x == 0:
            return Series2.zero(0, self.order_t, self.vars)
        j = np.arange(1, self.order_x + 1)[:, None]
        return Series2(self.coeffs[1:, :] * j, vars=self.vars)

    def deriv_t(self) -> "Series2":
        if self.order_t == 0:
            return Series2.zero(self.order_x, 0, self.vars)
        k = np.arange(1, self.order_t + 1)[None, :]
        return Series2(self.coeffs[:, 1:] * k, vars=self.vars)

    def transpose(self) -> "Series2":
        return Series2(self.coeffs.T, vars=(self.vars[1], self.vars[0]))

    def truncate(self, order_x: int, order_t: int) -> "Series2":
        if order_x > self.order_x or order_t > self.order_t:
            raise DomainError("truncate cannot raise orders; use pad for polynomial data")
        return Series2(self.coeffs[: order_x + 1, : order_t + 1], vars=self.vars)

    def pad(self, order_x: int, order_t: int, tol: float = 0.0) -> "Series2":
        """Resize the table reading it as an exact polynomial.

        Growing pads with zeros.  Shrinking is allowed only when every dropped
        coefficient is below ``tol``; otherwise :class:`TruncationOverflow`.
        """
        dropped = np.concatenate([self.coeffs[order_x + 1:, :].ravel(),
                                  self.coeffs[: order_x + 1, order_t + 1:].ravel()])
        if dropped.size and np.max(np.abs(dropped)) > tol:
            raise TruncationOverflow(
                f"resizing to ({order_x}, {order_t}) would drop nonzero coefficients")
        return Series2(self.coeffs, order_x, order_t, vars=self.vars)

    def row(self, j: int) -> Series1:
        """Coefficient of ``x^j`` as a series in the second variable."""
        return Series1(self.coeffs[j, :])

    def column(self, k: int) -> Series1:
        """Coefficient of ``t^k`` as a series in the first variable."""
        return Series1(self.coeffs[:, k])

    def x_valuation(self, tol: float = EPS_COEF) -> int | None:
        rows = np.flatnonzero(np.max(np.abs(self.coeffs), axis=1) > tol)
        return int(rows[0]) if rows.size else None

    def is_zero(self, tol: float = EPS_COEF) -> bool:
        return bool(np.all(np.abs(self.coeffs) <= tol))

    def evaluate(self, x: complex, t: complex) -> complex:
        xp = x ** np.arange(self.order_x + 1)
        tp = t ** np.arange(self.order_t + 1)
        return complex(xp @ self.coeffs @ tp)

    def max_abs_diff(self, other: "Series2") -> float:
        jx, kt = self._binary_orders(other)
        return float(np.max(np.abs(self.coeffs[: jx + 1, : kt + 1] - other.coeffs[: jx + 1, : kt + 1])))

    def to_json(self) -> dict:
        return {
            "vars": list(self.vars),
            "order_x": self.order_x,
            "order_t": self.order_t,
            "coeffs": [[[float(c.real), float(c.imag)] for c in row] for row in self.coeffs],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Series2":
        rows = [[_complex_from_pair(p) for p in row] for row in data["coeffs"]]
        jx, kt = int(data["order_x"]), int(data["order_t"])
        if len(rows) != jx + 1 or any(len(r) != kt + 1 for r in rows):
            raise DomainError(f"table shape does not match declared orders ({jx}, {kt})")
        return cls(rows, jx, kt, vars=tuple(data.get("vars", ("x", "t"))))


# ---------------------------------------------------------------------------
# functional interface

def add(f, g):
    return f + g


def mul(f, g):
    return f * g


def reciprocal(f: Series1) -> Series1:
    """``1/f`` for ``f(0) != 0`` by the usual triangular recursion."""
    c = f.coeffs
    if abs(c[0]) == 0:
        raise DomainError("series with zero constant term has no reciprocal")
    n = f.order
    r = np.zeros(n + 1, dtype=complex)
    r[0] = 1.0 / c[0]
    for k in range(1, n + 1):
        r[k] = -np.dot(c[1: k + 1], r[k - 1:: -1][:k]) / c[0]
    return Series1(r)


def compose(f: Series1, g: Series1, tol: float = EPS_COEF) -> Series1:
    """``f(g(t))`` modulo ``t^{N+1}`` with ``N = min(f.order, g.order)``."""
    if abs(g.coeffs[0]) > tol:
        raise DomainError(f"composition needs g(0) = 0, got g(0) = {complex(g.coeffs[0]):.3g}")
    n = min(f.order, g.order)
    gc = g.coeffs[: n + 1].copy()
    gc[0] = 0.0
    acc = np.zeros(n + 1, dtype=complex)
    acc[0] = f.coeffs[n]
    for j in range(n - 1, -1, -1):
        acc = np.convolve(acc, gc)[: n + 1]
        acc[0] += f.coeffs[j]
    return Series1(acc)


def _check_invertible(f: Series1, tol: float) -> complex:
    if abs(f.coeffs[0]) > tol:
        raise DomainError("compositional inverse needs f(0) = 0")
    if f.order < 1 or abs(f.coeffs[1]) <= tol:
        raise DomainError("compositional inverse needs f'(0) != 0")
    return complex(f.coeffs[1])


def comp_inverse(f: Series1, tol: float = EPS_COEF) -> Series1:
    """Compositional inverse by Newton iteration with precision doubling.

    If ``g`` is right modulo ``t^{k+1}`` then ``g - (f(g) - t)/f'(g)`` is right
    modulo ``t^{2k+2}``.
    """
    a1 = _check_invertible(f, tol)
    n = f.order
    g = Series1([0.0, 1.0 / a1], 1)
    prec = 1
    while prec < n:
        prec = min(2 * prec + 1, n)
        fp = f.truncate(prec)
        gp = g.extend(prec)
        residual = compose(fp, gp) - Series1.identity(prec)
        slope = compose(fp.deriv(), gp.truncate(prec - 1)).extend(prec)
        g = gp - residual * reciprocal(slope)
    return g


def comp_inverse_direct(f: Series1, tol: float = EPS_COEF) -> Series1:
    """Compositional inverse solved one coefficient at a time.

    The coefficient of ``t^n`` in ``f(g)`` is ``a_1 g_n`` plus terms in
    ``g_1 .. g_{n-1}``, so each step is a scalar division.
    """
    a1 = _check_invertible(f, tol)
    n = f.order
    g = np.zeros(n + 1, dtype=complex)
    g[1] = 1.0 / a1
    for k in range(2, n + 1):
        partial = compose(f.truncate(k), Series1(g[: k + 1]))
        g[k] = -partial.coeffs[k] / a1
    return Series1(g)


def norm_d(f: Series1) -> float:
    """``sum |c_j| / j!`` over the stored coefficients."""
    n = f.order
    if n < _FACTORIALS.size:
        return float(np.sum(np.abs(f.coeffs) / _FACTORIALS[: n + 1]))
    return float(sum(abs(c) / math.factorial(j) for j, c in enumerate(f.coeffs)))


def norm_l1(f: Series1) -> float:
    return float(np.sum(np.abs(f.coeffs)))


def rescale(f: Series1, lam: complex) -> Series1:
    """``lam^{-1} f(lam t)``: coefficient ``c_j`` becomes ``lam^{j-1} c_j``."""
    if lam == 0:
        raise DomainError("rescaling factor must be nonzero")
    powers = complex(lam) ** (np.arange(f.order + 1) - 1)
    return Series1(f.coeffs * powers)


def blow_up_substitute(s: Series2, order_x: int | None = None) -> Series2:
    """Substitute ``y = t x`` in a table over ``(x, y)``.

    ``x^j y^k`` becomes ``x^{j+k} t^k``; the input table is read as exact, so
    the default output carries x-order ``J + K``.  Asking for a smaller
    ``order_x`` raises :class:`TruncationOverflow` if a nonzero term would
    fall outside.
    """
    jx, ky = s.order_x, s.order_t
    full = np.zeros((jx + ky + 1, ky + 1), dtype=complex)
    for k in range(ky + 1):
        full[k: k + jx + 1, k] = s.coeffs[:, k]
    out_x = jx + ky if order_x is None else order_x
    if out_x < jx + ky:
        tail = full[out_x + 1:, :]
        nz = np.argwhere(tail != 0)
        if nz.size:
            j, k = nz[0]
            raise TruncationOverflow(
                f"term x^{j + out_x + 1} t^{k} exceeds the requested x-order {out_x}")
    return Series2(full, out_x, ky, vars=(s.vars[0], "t"))


def divide_by_x_power(s: Series2, k: int, tol: float = EPS_COEF) -> Series2:
    """Exact division by ``x^k``; the x-order drops by ``k``."""
    if k < 0:
        raise DomainError("power must be non-negative")
    if k == 0:
        return s
    limit = tol * _scale(s.coeffs)
    head = s.coeffs[: min(k, s.order_x + 1), :]
    bad = np.argwhere(np.abs(head) > limit)
    if bad.size:
        j, kk = bad[0]
        raise DomainError(
            f"not divisible by {s.vars[0]}^{k}: monomial {s.vars[0]}^{j} {s.vars[1]}^{kk} "
            f"has coefficient {complex(head[j, kk]):.3g}")
    if k > s.order_x:
        raise DomainError(f"division by {s.vars[0]}^{k} leaves nothing of an order-{s.order_x} table")
    return Series2(s.coeffs[k:, :], vars=s.vars)


class CurveQuotient(NamedTuple):
    quotient: Series2 | None
    ok: bool
    residual: float  # largest coefficient of the remainder, relative to the input scale
    first_failure: tuple[int, int] | None  # (power of (t - f), power of x) of the first bad term


def _shift_second(s: np.ndarray, f_coeffs: np.ndarray, sign: float) -> np.ndarray:
    """Rewrite ``sum s[j,k] x^j t^k`` in ``u = t - sign*f(x)``, i.e. put ``t = u + sign*f``."""
    jx, kt = s.shape[0] - 1, s.shape[1] - 1
    lin = np.zeros((jx + 1, 2), dtype=complex)
    lin[: min(jx + 1, f_coeffs.size), 0] = sign * f_coeffs[: jx + 1]
    lin[0, 1] = 1.0
    acc = np.zeros((jx + 1, kt + 1), dtype=complex)
    acc[:, 0] = s[:, kt]
    for k in range(kt - 1, -1, -1):
        acc = convolve2d(acc, lin)[: jx + 1, : kt + 1]
        acc[:, 0] += s[:, k]
    return acc


def divide_by_curve(s: Series2, f: Series1, m: int, tol: float = EPS_COEF) -> CurveQuotient:
    """Divide ``s(x, t)`` by ``(t - f(x))^m``.

    The table is read as exact in ``t`` (degree ``order_t``) and truncated in
    ``x``.  Substituting ``t = u + f(x)`` turns the divisor into ``u^m``; the
    quotient is shifted back.  Non-divisibility is reported through ``ok``.
    """
    if m < 1:
        raise DomainError("curve multiplicity must be at least 1")
    jx = min(s.order_x, f.order)
    table = s.coeffs[: jx + 1, :]
    scale = _scale(table)
    shifted = _shift_second(table, f.coeffs, +1.0)
    kt = s.order_t
    head = shifted[:, : min(m, kt + 1)]
    rel = np.abs(head) / scale
    residual = float(rel.max()) if rel.size else 0.0
    bad = np.argwhere(rel > tol)
    if bad.size:
        j, i = min(((int(j), int(i)) for j, i in bad), key=lambda p: (p[1], p[0]))
        return CurveQuotient(None, False, residual, (i, j))
    if m > kt:
        # only the zero polynomial is divisible by a power beyond its degree
        return CurveQuotient(Series2.zero(jx, 0, s.vars), True, residual, None)
    q = _shift_second(shifted[:, m:], f.coeffs, -1.0)
    return CurveQuotient(Series2(q, vars=s.vars), True, residual, None)


def curve_power(f: Series1, m: int, order_x: int, vars=("x", "t")) -> Series2:
    """``(t - f(x))^m`` as an exact-in-t table."""
    base = np.zeros((order_x + 1, 2), dtype=complex)
    base[: min(order_x + 1, f.order + 1), 0] = -f.coeffs[: order_x + 1]
    base[0, 1] = 1.0
    acc = np.zeros((order_x + 1, 1), dtype=complex)
    acc[0, 0] = 1.0
    for _ in range(m):
        acc = convolve2d(acc, base)[: order_x + 1, :]
    return Series2(acc, vars=vars)


def poly_mul2(a: Series2, b: Series2) -> Series2:
    """Product reading the second variable as exact: t-degrees add, x truncates."""
    jx = min(a.order_x, b.order_x)
    full = convolve2d(a.coeffs[: jx + 1, :], b.coeffs[: jx + 1, :])
    return Series2(full[: jx + 1, :], vars=a.vars)
