"""Exact double description: extreme rays of {x : A x >= 0}.

Incremental insertion with the standard combinatorial adjacency test.  Two
scalar backends share the code path: gcd-normalized integer vectors when
every input is rational (fast), and real cyclotomic numbers with exact sign
tests otherwise.  The cones handled here are pointed (the facet normals span
the space); callers slice rays back to polytope vertices afterwards.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Optional, Sequence

from .cyclotomic import CycNumber
from .linalg import exact_rank, exact_solve

__all__ = ["extreme_rays", "DDRay"]


class DDRay:
    """An extreme ray with its zero-set bitmask over the processed facets."""

    __slots__ = ("coords", "mask")

    def __init__(self, coords: tuple, mask: int):
        self.coords = coords
        self.mask = mask


def _is_rational_input(facets) -> bool:
    for row in facets:
        for x in row:
            if isinstance(x, CycNumber) and not x.is_rational():
                return False
            if isinstance(x, float):
                return False
    return True


def _to_int_rows(facets) -> list[tuple[int, ...]]:
    out = []
    for row in facets:
        fr = [x.as_fraction() if isinstance(x, CycNumber) else Fraction(x) for x in row]
        den = 1
        for f in fr:
            den = den * f.denominator // gcd(den, f.denominator)
        ints = [int(f * den) for f in fr]
        g = 0
        for v in ints:
            g = gcd(g, v)
        if g > 1:
            ints = [v // g for v in ints]
        out.append(tuple(ints))
    return out


# -- integer backend -----------------------------------------------------------


def _int_normalize(vec: list[int]) -> tuple[int, ...]:
    g = 0
    for v in vec:
        g = gcd(g, v)
    if g > 1:
        vec = [v // g for v in vec]
    return tuple(vec)


def _int_initial_rays(rows: list[tuple[int, ...]], dim: int) -> tuple[list[int], list[tuple[int, ...]]]:
    """Greedy choice of dim independent rows; rays solve N r_j = e_j."""
    chosen: list[int] = []
    for idx in range(len(rows)):
        if len(chosen) == dim:
            break
        if exact_rank([rows[i] for i in chosen] + [rows[idx]]) == len(chosen) + 1:
            chosen.append(idx)
    if len(chosen) < dim:
        raise ValueError("cone is not pointed: facet normals do not span the space")
    rays = []
    mat = [list(rows[i]) for i in chosen]
    for j in range(dim):
        rhs = [Fraction(1) if k == j else Fraction(0) for k in range(dim)]
        sol = exact_solve(mat, rhs)
        assert sol is not None
        fr = [c.as_fraction() for c in sol]
        den = 1
        for f in fr:
            den = den * f.denominator // gcd(den, f.denominator)
        rays.append(_int_normalize([int(f * den) for f in fr]))
    return chosen, rays


# -- generic (ordered exact field) backend -------------------------------------


def _sign_of(x) -> int:
    if isinstance(x, CycNumber):
        return x.sign()
    return (x > 0) - (x < 0)


def _cyc_normalize(vec: list[CycNumber]) -> tuple[CycNumber, ...]:
    for x in vec:
        s = x.sign()
        if s != 0:
            scale = (x if s > 0 else -x).inverse()
            return tuple(v * scale for v in vec)
    return tuple(vec)


def extreme_rays(facets: Sequence[Sequence], dim: int,
                 progress: Optional[callable] = None) -> list[DDRay]:
    """Extreme rays of the pointed cone {x in R^dim : facet . x >= 0 for all}.

    Rays are normalized (primitive integer vector, or leading positive
    coefficient 1 in the cyclotomic backend); masks record which facets are
    tight on each ray, bit i for facets[i].
    """
    nf = len(facets)
    rational = _is_rational_input(facets)
    if rational:
        rows = _to_int_rows(facets)

        def dot(row, ray):
            return sum(a * b for a, b in zip(row, ray))

        def combine(sp, sn, rp, rn):
            return _int_normalize([sp * a - sn * b for a, b in zip(rn, rp)])

        sign = lambda v: (v > 0) - (v < 0)
    else:
        rows = [tuple(x if isinstance(x, CycNumber) else CycNumber.from_rational(Fraction(x)) for x in row)
                for row in facets]

        def dot(row, ray):
            acc = CycNumber.zero()
            for a, b in zip(row, ray):
                if not (a.is_zero() or b.is_zero()):
                    acc = acc + a * b
            return acc

        def combine(sp, sn, rp, rn):
            return _cyc_normalize([sp * a - sn * b for a, b in zip(rn, rp)])

        sign = _sign_of

    if rational:
        chosen, init = _int_initial_rays(rows, dim)
    else:
        chosen, init = _generic_initial_rays(rows, dim)

    rays: list[DDRay] = []
    for r in init:
        mask = 0
        for bit, fi in enumerate(chosen):
            if sign(dot(rows[fi], r)) == 0:
                mask |= 1 << fi
        rays.append(DDRay(tuple(r), mask))

    remaining = [i for i in range(nf) if i not in set(chosen)]
    for step, fi in enumerate(remaining):
        row = rows[fi]
        pos, zero, neg = [], [], []
        values = {}
        for ray in rays:
            s = dot(row, ray.coords)
            sg = sign(s)
            values[id(ray)] = s
            (pos if sg > 0 else zero if sg == 0 else neg).append(ray)
        for ray in zero:
            ray.mask |= 1 << fi
        if not neg:
            rays = pos + zero
            if progress:
                progress(step, len(remaining), len(rays))
            continue
        keep = pos + zero
        min_bits = dim - 2
        new_rays = []
        for rp in pos:
            mp = rp.mask
            for rn in neg:
                common = mp & rn.mask
                if common.bit_count() < min_bits:
                    continue
                # combinatorial adjacency: no third ray's tight set contains it
                adjacent = True
                for r3 in rays:
                    if r3 is rp or r3 is rn:
                        continue
                    if common & r3.mask == common:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                coords = combine(values[id(rp)], values[id(rn)], rp.coords, rn.coords)
                new_rays.append(DDRay(coords, common | (1 << fi)))
        rays = keep + new_rays
        if progress:
            progress(step, len(remaining), len(rays))
    return rays


def _generic_initial_rays(rows, dim):
    chosen: list[int] = []
    for idx in range(len(rows)):
        if len(chosen) == dim:
            break
        if exact_rank([rows[i] for i in chosen] + [rows[idx]]) == len(chosen) + 1:
            chosen.append(idx)
    if len(chosen) < dim:
        raise ValueError("cone is not pointed: facet normals do not span the space")
    mat = [list(rows[i]) for i in chosen]
    rays = []
    for j in range(dim):
        rhs = [CycNumber.one() if k == j else CycNumber.zero() for k in range(dim)]
        sol = exact_solve(mat, rhs)
        assert sol is not None
        rays.append(_cyc_normalize(sol))
    return chosen, rays
