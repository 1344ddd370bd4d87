"""Isomorphism tests for branched coverings given by rational maps.

Two maps define isomorphic coverings of the sphere (same branch values,
fixed base) exactly when their monodromy tuples over a common bouquet are
simultaneously conjugate.  The cheap invariants are checked first.  In
``"hurwitz"`` mode the tuples may additionally be moved by the braid group
before the conjugacy test; that search is bounded and may end inconclusive.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from ..roots import EPS_ROOT
from .maps import RationalMap, complex_to_json, critical_data, critical_values, is_inf
from .monodromy import Permutation, make_bouquet, monodromy_tuple, simultaneous_conjugator

DEFAULT_DEPTH = 6


@dataclass(frozen=True)
class CoveringVerdict:
    """``status`` is ``"isomorphic"``, ``"not isomorphic"`` or ``"inconclusive"``."""

    status: str
    reason: str
    witness: Permutation | None = None
    depth: int | None = None

    @property
    def isomorphic(self) -> bool | None:
        return {"isomorphic": True, "not isomorphic": False}.get(self.status)

    def to_json(self) -> dict:
        return {"status": self.status, "reason": self.reason,
                "witness": self.witness.to_json() if self.witness else None, "depth": self.depth}


def _same_values(a: list[complex], b: list[complex], eps: float) -> bool:
    if len(a) != len(b):
        return False
    for v, w in zip(a, b):
        if is_inf(v) != is_inf(w):
            return False
        if not is_inf(v) and abs(v - w) > eps * max(1.0, abs(v)):
            return False
    return True


def _branch_profile(R: RationalMap, eps: float) -> list[Counter]:
    vals = critical_values(R, eps)
    prof = []
    for v in vals:
        c = Counter()
        for cd in critical_data(R, eps):
            w = cd.value
            if (is_inf(v) and is_inf(w)) or (not is_inf(v) and not is_inf(w)
                                              and abs(v - w) <= eps * max(1.0, abs(v))):
                c[cd.order + 1] += 1
        prof.append(c)
    return prof


def _braid_neighbours(tup: tuple[Permutation, ...]):
    """Tuples reached by one Hurwitz move ``sigma_i`` or its inverse (outer loop fixed)."""
    n = len(tup) - 1
    for i in range(n - 1):
        a, b = tup[i], tup[i + 1]
        # sigma_i: (a, b) -> (a b a^{-1}, a) in loop-concatenation order
        left = list(tup)
        left[i], left[i + 1] = a.inverse().then(b).then(a), a
        yield tuple(left)
        right = list(tup)
        right[i], right[i + 1] = b, b.then(a).then(b.inverse())
        yield tuple(right)


def covering_isomorphic(R1: RationalMap, R2: RationalMap, depth: int = DEFAULT_DEPTH,
                        mode: str = "fixed", eps_root: float = EPS_ROOT,
                        refine: int = 1) -> CoveringVerdict:
    """Compare two maps as branched coverings.

    ``mode="fixed"`` keeps branch values fixed (the covering-isomorphism
    relation), where the monodromy comparison is complete.  ``mode="hurwitz"``
    also allows braid moves on the tuple, searched breadth-first to ``depth``.
    """
    if R1.degree != R2.degree:
        return CoveringVerdict("not isomorphic", f"degree differs ({R1.degree} vs {R2.degree})")
    v1, v2 = critical_values(R1, eps_root), critical_values(R2, eps_root)
    if mode == "fixed" and not _same_values(v1, v2, eps_root):
        return CoveringVerdict("not isomorphic", "critical values differ: "
                               f"{[complex_to_json(v) for v in v1]} vs {[complex_to_json(v) for v in v2]}")
    if mode == "fixed":
        p1, p2 = _branch_profile(R1, eps_root), _branch_profile(R2, eps_root)
        for v, a, b in zip(v1, p1, p2):
            if a != b:
                return CoveringVerdict("not isomorphic",
                                       f"ramification profile over {complex_to_json(v)} differs")
    elif len(v1) != len(v2):
        return CoveringVerdict("not isomorphic", "number of branch values differs")

    avoid = list(v1)
    for R in (R1, R2):
        w = R.value_at_infinity
        if not is_inf(w):
            avoid.append(w)
    if mode == "fixed":
        bq = make_bouquet(v1, avoid)
        t1 = monodromy_tuple(R1, bq, refine, eps_root).as_list()
        t2 = monodromy_tuple(R2, bq, refine, eps_root).as_list()
        for k, (a, b) in enumerate(zip(t1, t2)):
            if a.cycle_type() != b.cycle_type():
                return CoveringVerdict("not isomorphic", f"cycle type differs on loop {k + 1}: "
                                                         f"{a.cycle_type()} vs {b.cycle_type()}")
        pi = simultaneous_conjugator(t1, t2)
        if pi is None:
            return CoveringVerdict("not isomorphic", "monodromy tuples are not simultaneously conjugate")
        return CoveringVerdict("isomorphic", "monodromy tuples conjugate by a sheet relabeling", pi)

    if mode != "hurwitz":
        raise ValueError(f"unknown mode {mode!r}")
    t1 = tuple(monodromy_tuple(R1, refine=refine, eps_root=eps_root).as_list())
    t2 = tuple(monodromy_tuple(R2, refine=refine, eps_root=eps_root).as_list())
    if sorted(g.cycle_type() for g in t1) != sorted(g.cycle_type() for g in t2):
        return CoveringVerdict("not isomorphic", "multisets of cycle types differ")
    seen = {t1}
    frontier = [t1]
    for level in range(depth + 1):
        for tup in frontier:
            pi = simultaneous_conjugator(list(tup), list(t2))
            if pi is not None:
                return CoveringVerdict("isomorphic", f"Hurwitz-equivalent after {level} braid moves", pi, level)
        if level == depth:
            break
        nxt = []
        for tup in frontier:
            for nb in _braid_neighbours(tup):
                if nb not in seen:
                    seen.add(nb)
                    nxt.append(nb)
        frontier = nxt
    return CoveringVerdict("inconclusive", f"inconclusive at depth {depth}", None, depth)
