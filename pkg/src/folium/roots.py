"""Polynomial roots with multiplicities.

Companion-matrix eigenvalues (``numpy.polynomial.polynomial.polyroots``)
give starting points; each cluster of nearby eigenvalues is treated as one
root of multiplicity ``k``, polished by Newton's method on the ``(k-1)``-th
derivative (where the root is simple) and accepted only if the lower
derivatives vanish there.  Coefficient lists are in ascending powers.
"""

from __future__ import annotations

import numpy as np
from numpy.polynomial import polynomial as P

EPS_ROOT = 1e-8


def trim(coeffs, tol: float = 0.0) -> np.ndarray:
    """Drop leading (highest-power) coefficients whose modulus is <= ``tol * max``."""
    c = np.atleast_1d(np.asarray(coeffs, dtype=complex))
    if c.size == 0:
        return np.zeros(1, dtype=complex)
    cut = tol * float(np.max(np.abs(c))) if c.size else 0.0
    nz = np.flatnonzero(np.abs(c) > cut)
    if nz.size == 0:
        return np.zeros(1, dtype=complex)
    return c[: nz[-1] + 1]


def polyval(coeffs, z):
    return P.polyval(z, coeffs)


def newton_polish(coeffs, z: complex, iters: int = 60) -> complex:
    c = np.asarray(coeffs, dtype=complex)
    dc = P.polyder(c)
    z = complex(z)
    for _ in range(iters):
        d = P.polyval(z, dc)
        if d == 0:
            break
        step = P.polyval(z, c) / d
        z -= step
        if abs(step) <= 4e-16 * max(1.0, abs(z)):
            break
    return z


def _magnitude(coeffs, z: complex) -> float:
    return float(np.sum(np.abs(coeffs) * max(1.0, abs(z)) ** np.arange(len(coeffs))))


def _clusters(points: np.ndarray, radius: float) -> list[list[int]]:
    n = len(points)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(points[i] - points[j]) <= radius * max(1.0, abs(points[i])):
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _verify_multiple(coeffs, z: complex, k: int, rtol: float) -> bool:
    c = np.asarray(coeffs, dtype=complex)
    for _ in range(k):
        if abs(P.polyval(z, c)) > rtol * _magnitude(c, z):
            return False
        c = P.polyder(c)
    return True


def roots_with_multiplicity(coeffs, eps_root: float = EPS_ROOT, merge_radius: float = 1e-3,
                            rtol: float = 1e-7) -> list[tuple[complex, int]]:
    """Distinct roots and multiplicities, sorted by (real, imag).

    ``eps_root`` is the distance under which two polished roots are declared
    equal; ``merge_radius`` bounds the eigenvalue spread of a multiple root.
    """
    c = trim(coeffs, 1e-14)
    if c.size <= 1:
        return []
    out: list[tuple[complex, int]] = []
    # exact zero roots
    v = 0
    while v < c.size - 1 and c[v] == 0:
        v += 1
    if v:
        out.append((0j, v))
        c = c[v:]
    if c.size > 1:
        raw = P.polyroots(c) if c.size > 2 else np.array([-c[0] / c[1]])
        for group in _clusters(raw, merge_radius):
            k = len(group)
            center = complex(np.mean(raw[group]))
            if k > 1:
                z = newton_polish(P.polyder(c, k - 1), center)
                if _verify_multiple(c, z, k, rtol):
                    out.append((z, k))
                    continue
            for i in group:
                out.append((newton_polish(c, raw[i]), 1))
    # merge anything that polished onto the same point
    merged: list[tuple[complex, int]] = []
    for z, k in sorted(out, key=lambda p: (p[0].real, p[0].imag)):
        for idx, (w, m) in enumerate(merged):
            if abs(z - w) <= eps_root * max(1.0, abs(w)):
                merged[idx] = (w, m + k)
                break
        else:
            merged.append((z, k))
    return sorted(merged, key=lambda p: (round(p[0].real, 12), round(p[0].imag, 12)))


def simple_roots(coeffs) -> np.ndarray:
    """All roots (with repetition), Newton-polished, unsorted."""
    c = trim(coeffs, 1e-14)
    if c.size <= 1:
        return np.zeros(0, dtype=complex)
    raw = P.polyroots(c) if c.size > 2 else np.array([-c[0] / c[1]])
    return np.array([newton_polish(c, z) for z in raw])
