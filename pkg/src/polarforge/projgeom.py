"""Points and subspaces of PG(n, q).

A projective point is stored by its normalized coordinate tuple (first
nonzero coordinate equal to 1). Points are indexed in lexicographic order
of those tuples, so index 0 is (0, ..., 0, 1).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

from . import linalg
from .errors import DimensionMismatch, GeometryError
from .gf import FieldCtx, field


def num_points(n: int, q: int) -> int:
    return (q ** (n + 1) - 1) // (q - 1)


def point_index(coords, q: int) -> int:
    """Index of a normalized coordinate tuple in lexicographic order."""
    n = len(coords) - 1
    lead = next(i for i, a in enumerate(coords) if a)
    offset = (q ** (n - lead) - 1) // (q - 1)
    tail = 0
    for a in coords[lead + 1:]:
        tail = tail * q + a
    return offset + tail


def point_from_index(idx: int, n: int, q: int) -> tuple:
    if not 0 <= idx < num_points(n, q):
        raise IndexError(idx)
    lead = n
    while (q ** (n - lead + 1) - 1) // (q - 1) <= idx:
        lead -= 1
    tail = idx - (q ** (n - lead) - 1) // (q - 1)
    digits = []
    for _ in range(n - lead):
        digits.append(tail % q)
        tail //= q
    return tuple([0] * lead + [1] + digits[::-1])


@dataclass(frozen=True)
class ProjPoint:
    coords: tuple
    index: int

    @classmethod
    def from_vector(cls, F: FieldCtx, v) -> ProjPoint:
        c = linalg.normalize(F, v)
        return cls(c, point_index(c, F.q))

    @property
    def n(self) -> int:
        return len(self.coords) - 1


@dataclass(frozen=True)
class Subspace:
    """Projective subspace given by its RREF basis; the empty subspace has no rows."""

    basis: tuple
    n: int

    @property
    def projdim(self) -> int:
        return len(self.basis) - 1

    def __len__(self) -> int:
        return len(self.basis)

    def key(self) -> tuple:
        return self.basis


def subspace(F: FieldCtx, vectors, n: int | None = None) -> Subspace:
    vectors = [tuple(v) for v in vectors]
    if n is None:
        if not vectors:
            raise DimensionMismatch("ambient dimension required for an empty span")
        n = len(vectors[0]) - 1
    if any(len(v) != n + 1 for v in vectors):
        raise DimensionMismatch("vectors of different lengths")
    rows, _ = linalg.rref(F, vectors)
    return Subspace(tuple(rows), n)


def empty_subspace(n: int) -> Subspace:
    return Subspace((), n)


def whole_space(n: int) -> Subspace:
    return Subspace(tuple(linalg.identity(n + 1)), n)


def enumerate_points(n: int, F: FieldCtx) -> list[ProjPoint]:
    if n < 1:
        raise GeometryError("n must be at least 1")
    pts = []
    q = F.q
    for lead in range(n, -1, -1):
        for tail in itertools.product(range(q), repeat=n - lead):
            c = (0,) * lead + (1,) + tail
            pts.append(ProjPoint(c, len(pts)))
    return pts


def _coords(P):
    return P.coords if isinstance(P, ProjPoint) else tuple(P)


def span(F: FieldCtx, pts) -> Subspace:
    pts = [_coords(P) for P in pts]
    if not pts:
        raise GeometryError("span of an empty point list")
    return subspace(F, pts)


def join(F: FieldCtx, *spaces: Subspace) -> Subspace:
    rows = [r for S in spaces for r in S.basis]
    return subspace(F, rows, spaces[0].n)


def contains(F: FieldCtx, A: Subspace, P) -> bool:
    v = _coords(P)
    if not A.basis:
        return False
    return linalg.rank(F, list(A.basis) + [v]) == len(A.basis)


def contains_subspace(F: FieldCtx, A: Subspace, B: Subspace) -> bool:
    return all(contains(F, A, r) for r in B.basis)


def meet(F: FieldCtx, A: Subspace, B: Subspace) -> Subspace:
    if A.n != B.n:
        raise DimensionMismatch("subspaces of different ambient spaces")
    if not A.basis or not B.basis:
        return empty_subspace(A.n)
    # x = sum a_i A_i = sum b_j B_j  <=>  (a, -b) in the kernel of [A^T | B^T]
    k = len(A.basis)
    cols = list(A.basis) + [linalg.vec_scale(F, F.neg(1), b) for b in B.basis]
    rows = linalg.transpose(cols)
    kern = linalg.nullspace(F, rows, len(cols))
    vecs = []
    for z in kern:
        v = [0] * (A.n + 1)
        for a, row in zip(z[:k], A.basis):
            if a:
                v = list(linalg.vec_add(F, v, linalg.vec_scale(F, a, row)))
        vecs.append(tuple(v))
    if not vecs:
        return empty_subspace(A.n)
    return subspace(F, vecs, A.n)


def points_of(F: FieldCtx, A: Subspace) -> list[tuple]:
    """Normalized coordinates of every point of A."""
    if not A.basis:
        return []
    return linalg.span_points(F, A.basis)


def point_indices(F: FieldCtx, A: Subspace) -> list[int]:
    return sorted(point_index(c, F.q) for c in points_of(F, A))


def enumerate_lines_pg3(F: FieldCtx) -> list[Subspace]:
    """All lines of PG(3, q), in order of their RREF basis."""
    q = F.q
    lines = []
    # RREF 2x4 matrices are determined by a pivot pair and free entries
    for c1, c2 in itertools.combinations(range(4), 2):
        free1 = [c for c in range(c1 + 1, 4) if c != c2]
        free2 = [c for c in range(c2 + 1, 4)]
        for vals1 in itertools.product(range(q), repeat=len(free1)):
            for vals2 in itertools.product(range(q), repeat=len(free2)):
                r1 = [0] * 4
                r2 = [0] * 4
                r1[c1] = 1
                r2[c2] = 1
                for c, a in zip(free1, vals1):
                    r1[c] = a
                for c, a in zip(free2, vals2):
                    r2[c] = a
                lines.append(Subspace((tuple(r1), tuple(r2)), 3))
    lines.sort(key=lambda L: L.basis)
    return lines


# -- point-set files ---------------------------------------------------------

def point_set_payload(F: FieldCtx, n: int, points, **extra) -> dict:
    data = dict(F.header())
    data["n"] = n
    data["points"] = [list(_coords(P)) for P in points]
    data.update(extra)
    return data


def write_point_set(path, F: FieldCtx, n: int, points, **extra) -> None:
    with open(path, "w") as fh:
        json.dump(point_set_payload(F, n, points, **extra), fh, indent=1, sort_keys=True)
        fh.write("\n")


def read_point_set(path) -> tuple[FieldCtx, int, list[tuple], dict]:
    with open(path) as fh:
        data = json.load(fh)
    return parse_point_set(data)


def parse_point_set(data: dict) -> tuple[FieldCtx, int, list[tuple], dict]:
    F = field(int(data["q"]), data.get("modulus"))
    if "p" in data and int(data["p"]) != F.p:
        raise GeometryError("header p does not match q")
    n = int(data["n"])
    pts = []
    for c in data["points"]:
        if len(c) != n + 1:
            raise DimensionMismatch(f"point {c} has wrong length for n={n}")
        if any(not 0 <= int(a) < F.q for a in c):
            raise GeometryError(f"point {c} has an invalid field encoding")
        pts.append(linalg.normalize(F, [int(a) for a in c]))
    return F, n, pts, data
