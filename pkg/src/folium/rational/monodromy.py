"""Monodromy of a rational map by path lifting.

Each of the ``d`` preimages of a base value is continued along a polygonal
loop in the value plane with an Euler predictor and a Newton corrector.  A
sheet is stored in the chart ``t`` while ``|t| <= 1`` and in ``s = 1/t``
otherwise, so sheets passing through a pole or through ``t = inf`` are
tracked without special cases.  Steps are shortened near critical values and
halved whenever a sheet jumps or two sheets come together.

Permutations compose in loop-concatenation order: ``p.then(q)`` follows the
loop of ``p`` first, so sheet ``i`` ends on ``q[p[i]]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations as _all_perms

import numpy as np
from numpy.polynomial import polynomial as P

from ..errors import DomainError, NumericalError
from ..roots import EPS_ROOT
from .maps import RationalMap, complex_to_json, critical_values, is_inf

DELTA_LOOP = 0.25
CIRCLE_SEGMENTS = 64
INF_SEGMENTS = 256
STEP_FRACTION = 0.2


@dataclass(frozen=True)
class Permutation:
    """A bijection of ``{0, .., d-1}``; ``images[i]`` is the image of ``i``."""

    images: tuple[int, ...]

    def __post_init__(self):
        imgs = tuple(int(i) for i in self.images)
        if sorted(imgs) != list(range(len(imgs))):
            raise DomainError(f"not a permutation: {imgs}")
        object.__setattr__(self, "images", imgs)

    @classmethod
    def identity(cls, d: int) -> "Permutation":
        return cls(tuple(range(d)))

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def then(self, other: "Permutation") -> "Permutation":
        return Permutation(tuple(other.images[i] for i in self.images))

    def inverse(self) -> "Permutation":
        inv = [0] * self.degree
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(tuple(inv))

    def conjugate_by(self, pi: "Permutation") -> "Permutation":
        """``pi^{-1} self pi`` as relabeling: the same map after renaming ``i`` to ``pi(i)``."""
        out = [0] * self.degree
        for i, j in enumerate(self.images):
            out[pi.images[i]] = pi.images[j]
        return Permutation(tuple(out))

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def cycles(self) -> list[tuple[int, ...]]:
        seen, out = set(), []
        for start in range(self.degree):
            if start in seen:
                continue
            cyc, i = [], start
            while i not in seen:
                seen.add(i)
                cyc.append(i)
                i = self.images[i]
            out.append(tuple(cyc))
        return out

    def cycle_type(self) -> tuple[int, ...]:
        return tuple(sorted((len(c) for c in self.cycles()), reverse=True))

    def __str__(self) -> str:
        nontrivial = [c for c in self.cycles() if len(c) > 1]
        if not nontrivial:
            return "()"
        return "".join("(" + " ".join(str(i + 1) for i in c) + ")" for c in nontrivial)

    def to_json(self) -> dict:
        return {"images": [i + 1 for i in self.images], "cycles": str(self)}


# ---------------------------------------------------------------------------
# sheet tracking

def _chordal(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Chordal distance between homogeneous points ``[p0:p1]`` and ``[q0:q1]``."""
    num = np.abs(p[..., 0] * q[..., 1] - p[..., 1] * q[..., 0])
    return num / (np.hypot(np.abs(p[..., 0]), np.abs(p[..., 1])) *
                  np.hypot(np.abs(q[..., 0]), np.abs(q[..., 1])))


class _Tracker:
    def __init__(self, R: RationalMap):
        d = R.degree
        self.d = d
        self.num = np.zeros(d + 1, dtype=complex)
        self.den = np.zeros(d + 1, dtype=complex)
        self.num[: R.num.size] = R.num
        self.den[: R.den.size] = R.den
        self.rnum, self.rden = self.num[::-1].copy(), self.den[::-1].copy()
        self.dnum, self.dden = P.polyder(self.num), P.polyder(self.den)
        self.drnum, self.drden = P.polyder(self.rnum), P.polyder(self.rden)

    def _eval(self, z, flip, v):
        e = np.where(flip, P.polyval(z, self.rnum) - v * P.polyval(z, self.rden),
                     P.polyval(z, self.num) - v * P.polyval(z, self.den))
        de = np.where(flip, P.polyval(z, self.drnum) - v * P.polyval(z, self.drden),
                      P.polyval(z, self.dnum) - v * P.polyval(z, self.dden))
        dv = np.where(flip, P.polyval(z, self.rden), P.polyval(z, self.den))
        return e, de, dv

    @staticmethod
    def homog(z, flip):
        return np.stack([np.where(flip, 1.0 + 0j, z), np.where(flip, z, 1.0 + 0j)], axis=-1)

    @staticmethod
    def normalize(z, flip):
        swap = np.abs(z) > 1.0
        z = np.where(swap, 1.0 / np.where(swap, z, 1.0), z)
        return z, flip ^ swap

    def separation(self, z, flip):
        h = self.homog(z, flip)
        dist = _chordal(h[:, None, :], h[None, :, :])
        np.fill_diagonal(dist, np.inf)
        return dist.min(axis=1)

    def step(self, z, flip, v0, v1):
        """One predictor-corrector step, or ``None`` if it is not trustworthy."""
        _, de, dv = self._eval(z, flip, v0)
        if np.any(de == 0):
            return None
        zp = z + (v1 - v0) * dv / de
        zc = zp.copy()
        for _ in range(12):
            e, de, _ = self._eval(zc, flip, v1)
            if np.any(de == 0):
                return None
            delta = e / de
            zc = zc - delta
            if np.all(np.abs(delta) <= 1e-14 * np.maximum(1.0, np.abs(zc))):
                break
        else:
            return None
        sep = self.separation(z, flip)
        moved = _chordal(self.homog(zc, flip), self.homog(zp, flip))
        if np.any(moved > 0.1 * sep):
            return None
        znew, fnew = self.normalize(zc, flip)
        if np.min(self.separation(znew, fnew)) <= 1e-10:
            return None
        return znew, fnew


def _initial_sheets(R: RationalMap, base: complex) -> np.ndarray:
    roots = R.preimages(base)
    if roots.size != R.degree:
        raise DomainError(f"base value {base} has a preimage at infinity; choose another base")
    tr = _Tracker(R)
    # polish and order lexicographically
    z = roots.astype(complex)
    flip = np.zeros(z.size, dtype=bool)
    for _ in range(5):
        e, de, _ = tr._eval(z, flip, base)
        z = z - e / de
    order = np.lexsort((z.imag, z.real))
    z = z[order]
    if np.min(tr.separation(*tr.normalize(z, flip))) <= 1e-8:
        raise DomainError(f"base value {base} is (numerically) a critical value")
    return z


def _track(R: RationalMap, z0: np.ndarray, path: list[complex], avoid: list[complex],
           refine: int = 1, max_depth: int = 40) -> np.ndarray:
    tr = _Tracker(R)
    z, flip = tr.normalize(z0.copy(), np.zeros(z0.size, dtype=bool))
    frac = STEP_FRACTION / refine
    avoid_arr = np.array([a for a in avoid if not is_inf(a)], dtype=complex)

    def dist_to_critical(v):
        return float(np.min(np.abs(avoid_arr - v))) if avoid_arr.size else math.inf

    for va, vb in zip(path[:-1], path[1:]):
        v = va
        while v != vb:
            remaining = abs(vb - v)
            h = min(remaining, frac * dist_to_critical(v), frac * max(1.0, abs(v)))
            target = vb if h >= remaining else v + (vb - v) * (h / remaining)
            # subdivide until the step is accepted
            lo, hi, depth = v, target, 0
            while True:
                res = tr.step(z, flip, lo, hi)
                if res is not None:
                    break
                depth += 1
                if depth > max_depth:
                    raise NumericalError(
                        f"continuation failed on segment {va:.6g} -> {vb:.6g} near {lo:.6g}")
                hi = lo + (hi - lo) / 2
            z, flip = res
            v = hi
    # back to the t chart (inf stays inf)
    with np.errstate(divide="ignore"):
        return np.where(flip, 1.0 / z, z)


def _match(start: np.ndarray, end: np.ndarray, tol: float = 1e-6) -> Permutation:
    hs = _Tracker.homog(*_Tracker.normalize(start, np.zeros(start.size, dtype=bool)))
    out = []
    for e in end:
        he = np.array([[e, 1.0]]) if not is_inf(e) else np.array([[1.0, 0.0]])
        dist = _chordal(he[:, None, :], hs[None, :, :])[0]
        j = int(np.argmin(dist))
        if dist[j] > tol:
            raise NumericalError(f"lifted endpoint {e} matches no base preimage (gap {dist[j]:.3g})")
        out.append(j)
    if sorted(out) != list(range(start.size)):
        raise NumericalError("lifted endpoints do not match base preimages bijectively")
    return Permutation(tuple(out))


def monodromy(R: RationalMap, base: complex, loop: list[complex], refine: int = 1,
              avoid: list[complex] | None = None) -> Permutation:
    """Permutation of the sheets over ``base`` induced by the closed polygon ``loop``.

    ``loop`` must start and end at ``base``.  Sheets are numbered by sorting
    the preimages of ``base`` by (real, imag).  ``refine`` divides every
    continuation step.
    """
    loop = [complex(v) for v in loop]
    if abs(loop[0] - base) > 1e-12 or abs(loop[-1] - base) > 1e-12:
        raise DomainError("loop must start and end at the base value")
    if avoid is None:
        avoid = critical_values(R)
    z0 = _initial_sheets(R, base)
    return _match(z0, _track(R, z0, loop, avoid, refine))


# ---------------------------------------------------------------------------
# standard loop bouquet

def _seg_dist(p: complex, a: complex, b: complex) -> float:
    ab = b - a
    if ab == 0:
        return abs(p - a)
    s = max(0.0, min(1.0, ((p - a) * ab.conjugate()).real / abs(ab) ** 2))
    return abs(p - (a + s * ab))


@dataclass(frozen=True)
class Bouquet:
    """Star-shaped loops from ``base``: one small counterclockwise circle per value
    and a large clockwise circle around all of them.

    Loops are listed counterclockwise by the angle of their spoke, starting
    after the widest angular gap, so that the product of all of them
    (including the outer loop, last) is trivial.
    """

    base: complex
    values: tuple[complex, ...]
    loops: tuple[tuple[complex, ...], ...]
    infinity_loop: tuple[complex, ...]

    def to_json(self) -> dict:
        return {"base": complex_to_json(self.base), "values": [complex_to_json(v) for v in self.values]}


def make_bouquet(values: list[complex], avoid: list[complex] = (), delta_loop: float = DELTA_LOOP,
                 base: complex | None = None) -> Bouquet:
    vals = [complex(v) for v in values if not is_inf(v)]
    avoid_all = vals + [complex(a) for a in avoid if not is_inf(a)]
    center = complex(np.mean(vals)) if vals else 0j
    radius = max([abs(v - center) for v in vals] + [1.0])

    def clearance(b: complex) -> float:
        if not vals:
            return min([abs(b - a) for a in avoid_all] + [1.0])
        best = min(abs(b - a) for a in avoid_all)
        for v in vals:
            for w in vals:
                if w != v:
                    best = min(best, _seg_dist(w, b, v))
        return best

    if base is None:
        grid = np.linspace(-1.0, 1.0, 9)
        cands = [center + radius * complex(gx + 0.0123, gy + 0.0171) for gx in grid for gy in grid]
        base = max(cands, key=clearance)
    base = complex(base)
    clear = clearance(base)
    if clear <= 1e-9:
        raise DomainError("base point lies on a spoke or at a critical value")

    angles = {v: math.atan2((v - base).imag, (v - base).real) for v in vals}
    if vals:
        srt = sorted(vals, key=lambda v: angles[v])
        gaps = []
        for i, v in enumerate(srt):
            a0 = angles[v]
            a1 = angles[srt[(i + 1) % len(srt)]] + (2 * math.pi if i + 1 == len(srt) else 0.0)
            gaps.append((a1 - a0, a0))
        width, start = max(gaps)
        theta0 = start + width / 2
    else:
        theta0 = 0.0

    def rel_angle(v):
        return (angles[v] - theta0) % (2 * math.pi)

    order = sorted(vals, key=rel_angle)
    loops = []
    for v in order:
        others = [abs(v - w) for w in avoid_all if w != v]
        rho = min([delta_loop, 0.5 * clear, 0.5 * abs(v - base)] + [0.5 * o for o in others])
        phi = math.atan2((base - v).imag, (base - v).real)
        circle = [v + rho * complex(math.cos(phi + 2 * math.pi * k / CIRCLE_SEGMENTS),
                                    math.sin(phi + 2 * math.pi * k / CIRCLE_SEGMENTS))
                  for k in range(CIRCLE_SEGMENTS + 1)]
        loops.append(tuple([base] + circle + [base]))
    big = 2.0 * max([abs(v - base) for v in avoid_all] + [1.0]) + 1.0
    entry = base + big * complex(math.cos(theta0), math.sin(theta0))
    outer = [base + big * complex(math.cos(theta0 - 2 * math.pi * k / INF_SEGMENTS),
                                  math.sin(theta0 - 2 * math.pi * k / INF_SEGMENTS))
             for k in range(INF_SEGMENTS + 1)]
    outer[0] = outer[-1] = entry
    return Bouquet(base, tuple(order), tuple(loops), tuple([base] + outer + [base]))


@dataclass(frozen=True)
class MonodromyTuple:
    """Generators over a bouquet; ``infinity`` belongs to the outer loop."""

    bouquet: Bouquet
    generators: tuple[Permutation, ...]
    infinity: Permutation

    def product(self) -> Permutation:
        acc = Permutation.identity(self.infinity.degree)
        for g in self.generators:
            acc = acc.then(g)
        return acc.then(self.infinity)

    def as_list(self) -> list[Permutation]:
        return list(self.generators) + [self.infinity]


def _map_avoid(R: RationalMap, eps_root: float) -> tuple[list[complex], list[complex]]:
    vals = critical_values(R, eps_root)
    avoid = list(vals)
    vinf = R.value_at_infinity
    if not is_inf(vinf):
        avoid.append(vinf)
    return vals, avoid


def monodromy_tuple(R: RationalMap, bouquet: Bouquet | None = None, refine: int = 1,
                    eps_root: float = EPS_ROOT) -> MonodromyTuple:
    vals, avoid = _map_avoid(R, eps_root)
    if bouquet is None:
        bouquet = make_bouquet(vals, avoid)
    z0 = _initial_sheets(R, bouquet.base)
    gens = []
    for loop in bouquet.loops:
        gens.append(_match(z0, _track(R, z0, list(loop), vals, refine)))
    inf_perm = _match(z0, _track(R, z0, list(bouquet.infinity_loop), vals, refine))
    return MonodromyTuple(bouquet, tuple(gens), inf_perm)


def group_closure(gens: list[Permutation], cap: int = 40320) -> int | None:
    """Order of the generated group by breadth-first closure, ``None`` beyond ``cap``."""
    if not gens:
        return 1
    d = gens[0].degree
    seen = {tuple(range(d))}
    frontier = [tuple(range(d))]
    while frontier:
        nxt = []
        for el in frontier:
            for g in gens:
                new = tuple(g.images[i] for i in el)
                if new not in seen:
                    seen.add(new)
                    if len(seen) > cap:
                        return None
                    nxt.append(new)
        frontier = nxt
    return len(seen)


def is_transitive(gens: list[Permutation], d: int) -> bool:
    orbit, stack = {0}, [0]
    while stack:
        i = stack.pop()
        for g in gens:
            j = g.images[i]
            if j not in orbit:
                orbit.add(j)
                stack.append(j)
    return len(orbit) == d


@dataclass(frozen=True)
class MonodromyGroup:
    values: tuple[complex, ...]
    generators: tuple[Permutation, ...]
    infinity: Permutation
    transitive: bool
    order: int | None
    product_is_identity: bool
    base: complex

    def cycle_types(self) -> list[tuple[int, ...]]:
        return [g.cycle_type() for g in self.generators] + [self.infinity.cycle_type()]

    def to_json(self) -> dict:
        return {
            "base": complex_to_json(self.base),
            "values": [complex_to_json(v) for v in self.values],
            "generators": [g.to_json() for g in self.generators],
            "infinity": self.infinity.to_json(),
            "transitive": self.transitive,
            "order": self.order,
            "product_is_identity": self.product_is_identity,
        }


def monodromy_group(R: RationalMap, cap: int = 40320, refine: int = 1,
                    eps_root: float = EPS_ROOT) -> MonodromyGroup:
    mt = monodromy_tuple(R, refine=refine, eps_root=eps_root)
    gens = mt.as_list()
    return MonodromyGroup(
        values=mt.bouquet.values,
        generators=mt.generators,
        infinity=mt.infinity,
        transitive=is_transitive(gens, R.degree),
        order=group_closure(gens, cap),
        product_is_identity=mt.product().is_identity(),
        base=mt.bouquet.base,
    )


def simultaneous_conjugator(a: list[Permutation], b: list[Permutation]) -> Permutation | None:
    """A relabeling ``pi`` with ``a[k].conjugate_by(pi) == b[k]`` for all ``k``.

    Backtracking: once ``pi(0)`` is fixed, transitivity of the tuple pins the
    images along the orbit of ``0``; remaining orbits are tried in turn.
    """
    if len(a) != len(b):
        return None
    if not a:
        return None
    d = a[0].degree
    if any(x.degree != d for x in a + b):
        return None
    if [x.cycle_type() for x in a] != [y.cycle_type() for y in b]:
        return None

    def extend(pi: dict[int, int]) -> dict[int, int] | None:
        stack = list(pi)
        while stack:
            i = stack.pop()
            for x, y in zip(a, b):
                j, tj = x.images[i], y.images[pi[i]]
                if j in pi:
                    if pi[j] != tj:
                        return None
                else:
                    if tj in pi.values():
                        return None
                    pi[j] = tj
                    stack.append(j)
        return pi

    def search(pi: dict[int, int]) -> dict[int, int] | None:
        free = [i for i in range(d) if i not in pi]
        if not free:
            return pi
        i = free[0]
        for target in range(d):
            if target in pi.values():
                continue
            trial = extend({**pi, i: target})
            if trial is not None:
                done = search(trial)
                if done is not None:
                    return done
        return None

    found = search({})
    if found is None:
        return None
    return Permutation(tuple(found[i] for i in range(d)))


def all_permutations(d: int):
    for p in _all_perms(range(d)):
        yield Permutation(p)
