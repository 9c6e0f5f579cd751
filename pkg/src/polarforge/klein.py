"""Klein correspondence, ovoids O(f1, f2) of Q+(5, q) and line spreads of PG(3, q).

Function pairs f1, f2 : GF(q)^2 -> GF(q) are explicit q x q tables,
``f[x][y]``, over field encodings.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field as dc_field

from . import linalg
from . import projgeom as pg
from .errors import (
    BadResidue,
    DependentVectors,
    GeometryError,
    NotAnOvoid,
    SamePoint,
    SquareAlpha,
    WrongCharacteristic,
)
from .forms import QuadraticForm, classify_section, standard_form
from .gf import FieldCtx

# Plücker coordinate order (p12, p42, p14, p23, p13, p34), 1-based index pairs
PLUCKER_ORDER = ((1, 2), (4, 2), (1, 4), (2, 3), (1, 3), (3, 4))


def klein_quadric(F: FieldCtx) -> QuadraticForm:
    """X0X5 + X1X4 + X2X3."""
    return standard_form(f"Q+:5:{F.q}", F)


def plucker(F: FieldCtx, u, v) -> pg.ProjPoint:
    u, v = tuple(u), tuple(v)
    if len(u) != 4 or len(v) != 4:
        raise GeometryError("Plücker coordinates need vectors of length 4")
    if linalg.rank(F, [u, v]) < 2:
        raise DependentVectors("u and v span less than a line")
    coords = []
    for i, j in PLUCKER_ORDER:
        a = F.mul(u[i - 1], v[j - 1])
        b = F.mul(u[j - 1], v[i - 1])
        coords.append(F.sub(a, b))
    return pg.ProjPoint.from_vector(F, coords)


def line_to_klein(F: FieldCtx, L: pg.Subspace) -> pg.ProjPoint:
    if L.projdim != 1 or L.n != 3:
        raise GeometryError("expected a line of PG(3, q)")
    return plucker(F, L.basis[0], L.basis[1])


# -- function tables ----------------------------------------------------------

def table(F: FieldCtx, fn) -> tuple:
    """Tabulate fn(x, y) over all field encodings."""
    return tuple(tuple(fn(x, y) for y in range(F.q)) for x in range(F.q))


def linear_table(F: FieldCtx, a: int, b: int) -> tuple:
    """(x, y) -> a x + b y."""
    return table(F, lambda x, y: F.add(F.mul(a, x), F.mul(b, y)))


def char3_functions(F: FieldCtx) -> tuple[tuple, tuple]:
    """f1 = x + y, f2 = x + 2y."""
    return linear_table(F, 1, 1), linear_table(F, 1, F.from_int(2))


def _check_table(F: FieldCtx, f) -> None:
    if len(f) != F.q or any(len(row) != F.q for row in f):
        raise GeometryError("function tables must be q x q")


def pair_condition(F: FieldCtx, f1, f2, P1, P2) -> bool:
    """True iff (x1-x2)(f2(P2)-f2(P1)) + (y1-y2)(f1(P2)-f1(P1)) != 0."""
    (x1, y1), (x2, y2) = P1, P2
    if (x1, y1) == (x2, y2):
        raise SamePoint("the pair condition needs two distinct points")
    sub, mul = F.sub, F.mul
    val = F.add(
        mul(sub(x1, x2), sub(f2[x2][y2], f2[x1][y1])),
        mul(sub(y1, y2), sub(f1[x2][y2], f1[x1][y1])),
    )
    return val != 0


@dataclass
class KleinOvoid:
    points: list[tuple]
    pairs_ok: bool
    failing_pairs: int = 0

    def point_set(self, space):
        from .ovoids import PointSet

        return PointSet.from_points(space, self.points)


def ovoid_point(F: FieldCtx, f1, f2, x: int, y: int) -> tuple:
    a, b = f1[x][y], f2[x][y]
    last = F.neg(F.add(F.mul(y, a), F.mul(x, b)))
    return (1, x, y, a, b, last)


def ovoid_from_f(F: FieldCtx, f1, f2) -> KleinOvoid:
    """The q^2+1 points O(f1, f2) together with the pairwise-condition verdict."""
    _check_table(F, f1)
    _check_table(F, f2)
    if f1[0][0] or f2[0][0]:
        raise GeometryError("f1(0,0) and f2(0,0) must be 0")
    pts = [ovoid_point(F, f1, f2, x, y) for x in range(F.q) for y in range(F.q)]
    pts.append((0, 0, 0, 0, 0, 1))
    domain = [(x, y) for x in range(F.q) for y in range(F.q)]
    bad = sum(1 for P1, P2 in itertools.combinations(domain, 2) if not pair_condition(F, f1, f2, P1, P2))
    return KleinOvoid(pts, bad == 0, bad)


# -- spreads ------------------------------------------------------------------

@dataclass
class Spread:
    F: FieldCtx
    lines: list[pg.Subspace]
    census: tuple | None = None
    method: str = ""
    meta: dict = dc_field(default_factory=dict)

    def point_cover(self) -> dict[tuple, int]:
        cover: dict[tuple, int] = {}
        for L in self.lines:
            for c in pg.points_of(self.F, L):
                cover[c] = cover.get(c, 0) + 1
        return cover

    def is_spread(self) -> bool:
        q = self.F.q
        if len(self.lines) != q * q + 1:
            return False
        cover = self.point_cover()
        return len(cover) == pg.num_points(3, q) and all(v == 1 for v in cover.values())

    def to_json(self) -> dict:
        out = dict(self.F.header())
        out["n"] = 3
        out["method"] = self.method
        out["lines"] = [[list(r) for r in L.basis] for L in self.lines]
        if self.census is not None:
            n0, n1, n2 = self.census
            out["census"] = {"external": n0, "tangent": n1, "bisecant": n2}
        out.update(self.meta)
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True) + "\n"


def spread_line(F: FieldCtx, f1, f2, x: int, y: int) -> pg.Subspace:
    """l_{x,y}: X2 = -f1 X0 + f2 X1, X3 = x X0 + y X1."""
    u = (1, 0, F.neg(f1[x][y]), x)
    v = (0, 1, f2[x][y], y)
    return pg.subspace(F, [u, v])


def line_at_infinity(F: FieldCtx) -> pg.Subspace:
    return pg.subspace(F, [(0, 0, 1, 0), (0, 0, 0, 1)])


def spread_from_f(F: FieldCtx, f1, f2, check: bool = True) -> Spread:
    if check and not ovoid_from_f(F, f1, f2).pairs_ok:
        raise NotAnOvoid("O(f1, f2) is not an ovoid; the lines are not a spread")
    lines = [spread_line(F, f1, f2, x, y) for x in range(F.q) for y in range(F.q)]
    lines.append(line_at_infinity(F))
    return Spread(F, lines, method="f1f2")


def char3_spread(F: FieldCtx) -> Spread:
    if F.p != 3:
        raise WrongCharacteristic("the f1 = x+y, f2 = x+2y construction needs characteristic 3")
    f1, f2 = char3_functions(F)
    sp = spread_from_f(F, f1, f2)
    sp.method = "char3"
    return sp


def desarguesian_spread(F: FieldCtx, alpha: int | None = None) -> Spread:
    """Column spaces of (I2; x I2 + y A), A = (0 alpha; 1 0), plus (O; I2)."""
    if F.q % 4 != 1:
        raise BadResidue(f"q = {F.q} is not 1 mod 4")
    if alpha is None:
        alpha = F.nonsquare
    if F.is_square(alpha):
        raise SquareAlpha(f"alpha = {alpha} is a square")
    lines = []
    for x in range(F.q):
        for y in range(F.q):
            u = (1, 0, x, y)
            v = (0, 1, F.mul(alpha, y), x)
            lines.append(pg.subspace(F, [u, v]))
    lines.append(pg.subspace(F, [(0, 0, 1, 0), (0, 0, 0, 1)]))
    return Spread(F, lines, method="desarguesian", meta={"alpha": alpha})


def case1_quadric(F: FieldCtx) -> QuadraticForm:
    """X0X1 + X2^2 + X3^2 (elliptic when -1 is a non-square)."""
    return QuadraticForm.from_terms(F, 3, {(0, 1): 1, (2, 2): 1, (3, 3): 1}, "X0X1+X2^2+X3^2")


def case2_quadric(F: FieldCtx, alpha: int | None = None) -> QuadraticForm:
    """X0X1 + X2^2 - alpha X3^2."""
    if alpha is None:
        alpha = F.nonsquare
    return QuadraticForm.from_terms(F, 3, {(0, 1): 1, (2, 2): 1, (3, 3): F.neg(alpha)}, "X0X1+X2^2-aX3^2")


def spread_census(spread: Spread, form: QuadraticForm) -> tuple[int, int, int]:
    """(external, tangent, bisecant) line counts against an elliptic quadric of PG(3, q)."""
    if form.n != 3:
        raise GeometryError("census needs a form on PG(3, q)")
    sc = classify_section(form, pg.whole_space(3))
    if sc.radical_dim != -1 or sc.base_type != "elliptic":
        raise GeometryError("census reference must be an elliptic quadric Q-(3, q)")
    counts = [0, 0, 0]
    for L in spread.lines:
        k = sum(1 for c in pg.points_of(spread.F, L) if form.eval(c) == 0)
        if k > 2:
            raise GeometryError("a line meets an elliptic quadric in more than 2 points")
        counts[k] += 1
    spread.census = tuple(counts)
    return spread.census


def curve_value(F: FieldCtx, x: int, y: int) -> int:
    """x^4 + 2x^2y^2 + y^4 + x^2 + 2xy + 2y^2 + 2."""
    two = F.from_int(2)
    p = F.pow
    terms = [
        p(x, 4),
        F.mul(two, F.mul(p(x, 2), p(y, 2))),
        p(y, 4),
        p(x, 2),
        F.mul(two, F.mul(x, y)),
        F.mul(two, p(y, 2)),
        two,
    ]
    acc = 0
    for t in terms:
        acc = F.add(acc, t)
    return acc


def curve_roots(F: FieldCtx) -> list[tuple[int, int]]:
    if F.p != 3:
        raise WrongCharacteristic("the tangency curve is defined in characteristic 3")
    return [(x, y) for x in range(F.q) for y in range(F.q) if curve_value(F, x, y) == 0]


def curve_has_no_roots(F: FieldCtx) -> bool:
    return not curve_roots(F)


def klein_image(F: FieldCtx, lines) -> list[pg.ProjPoint]:
    return [line_to_klein(F, L) for L in lines]
