"""m-ovoids: verification, closure operations, intersection patterns and search."""

from __future__ import annotations

import json
from dataclasses import dataclass

from . import projgeom as pg
from .errors import GeometryError, NotDisjoint, OvoidError, PatternViolation
from .forms import classify_section, perp
from .polarspace import PolarSpace, bits_of, iter_bits
from .search import DEFAULT_BUDGET, IN, OUT, ExactIncidenceSearch


@dataclass(frozen=True)
class PointSet:
    space: PolarSpace
    bits: int

    def __post_init__(self):
        if self.bits < 0 or self.bits >> self.space.num_points:
            raise GeometryError("bitset refers to points outside the space")

    @classmethod
    def from_points(cls, space: PolarSpace, points) -> PointSet:
        return cls(space, bits_of(space.point_id(P) for P in points))

    @classmethod
    def empty(cls, space: PolarSpace) -> PointSet:
        return cls(space, 0)

    @classmethod
    def full(cls, space: PolarSpace) -> PointSet:
        return cls(space, space.all_bits)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __contains__(self, i: int) -> bool:
        return bool(self.bits >> i & 1)

    def indices(self) -> list[int]:
        return list(iter_bits(self.bits))

    def coords(self) -> list[tuple]:
        return [self.space.points[i] for i in iter_bits(self.bits)]

    def ambient_coords(self) -> list[tuple]:
        return sorted(self.space.to_ambient(i) for i in iter_bits(self.bits))

    def __and__(self, other: PointSet) -> PointSet:
        _same_space(self, other)
        return PointSet(self.space, self.bits & other.bits)

    def __or__(self, other: PointSet) -> PointSet:
        _same_space(self, other)
        return PointSet(self.space, self.bits | other.bits)


def _same_space(a: PointSet, b: PointSet) -> None:
    if a.space is not b.space:
        raise GeometryError("point sets live in different spaces")


@dataclass
class OvoidCertificate:
    space: str
    m: int | None
    size: int
    histogram: dict
    ok: bool
    perp_in: int | None = None
    perp_out: int | None = None
    field: dict | None = None
    generators: int = 0
    note: str = ""

    def to_json(self) -> dict:
        out = {
            "space": self.space,
            "m": self.m,
            "size": self.size,
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
            "ok": self.ok,
            "perp_in": self.perp_in,
            "perp_out": self.perp_out,
            "generators": self.generators,
        }
        if self.field is not None:
            out["field"] = self.field
        if self.note:
            out["note"] = self.note
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True) + "\n"


def verify_m_ovoid(S: PointSet, threads: int | None = None) -> OvoidCertificate:
    """Histogram of |G ∩ S| over every generator G; ok iff it has a single key."""
    space = S.space
    hist = space.histogram(S.bits, threads=threads)
    size = len(S)
    ok = len(hist) == 1
    m = next(iter(hist)) if ok else None
    note = ""
    perp_in = perp_out = None
    if ok and size != space.ovoid_size(m):
        ok = False
        note = f"size {size} differs from m(q^(r+e-1)+1) = {space.ovoid_size(m)}"
    if ok:
        try:
            perp_in, perp_out = perp_counts(S, m)
        except PatternViolation as exc:
            ok = False
            note = str(exc)
    return OvoidCertificate(
        space=space.label,
        m=m,
        size=size,
        histogram=hist,
        ok=ok,
        perp_in=perp_in,
        perp_out=perp_out,
        field=space.F.header(),
        generators=len(space.gen_bits),
    )


def perp_constants(space: PolarSpace, m: int) -> tuple[int, int]:
    k = space.q ** (space.rank + space.e - 2) + 1
    return (m - 1) * k + 1, m * k


def perp_counts(S: PointSet, m: int | None = None) -> tuple[int | None, int | None]:
    """Observed |P^perp ∩ S| for P in S and P outside S; both must be constant.

    Returns (inside, outside), None where no such point exists.
    """
    space = S.space
    if m is None:
        hist = space.histogram(S.bits)
        if len(hist) != 1:
            raise PatternViolation("not an m-ovoid")
        m = next(iter(hist))
    want_in, want_out = perp_constants(space, m)
    seen_in = seen_out = None
    for P in range(space.num_points):
        k = (space.perp_bits[P] & S.bits).bit_count()
        inside = S.bits >> P & 1
        want = want_in if inside else want_out
        if k != want:
            where = "in" if inside else "outside"
            raise PatternViolation(f"point {space.points[P]} {where} the set sees {k}, expected {want}")
        if inside:
            seen_in = k
        else:
            seen_out = k
    return seen_in, seen_out


def complement(S: PointSet) -> PointSet:
    return PointSet(S.space, S.space.all_bits & ~S.bits)


def union_disjoint(S1: PointSet, S2: PointSet) -> PointSet:
    _same_space(S1, S2)
    if S1.bits & S2.bits:
        raise NotDisjoint(f"sets share {(S1.bits & S2.bits).bit_count()} points")
    return PointSet(S1.space, S1.bits | S2.bits)


# -- intersection patterns ---------------------------------------------------

def _m_of(S: PointSet, m: int | None) -> int:
    if m is not None:
        return m
    hist = S.space.histogram(S.bits)
    if len(hist) != 1:
        raise PatternViolation("set is not an m-ovoid")
    return next(iter(hist))


def section_pattern(S: PointSet, A: pg.Subspace, m: int | None = None, check_type: bool = True) -> tuple[int, int]:
    """(x, c) = (|S ∩ A|, |A^perp ∩ S|) for an elliptic (2n-1)-space A of Q-(2n+1, q).

    Raises PatternViolation unless x = (m - c) q^(n-1) + m with c in {0, 1, 2}.
    """
    space = S.space
    if space.type != "Q-":
        raise GeometryError("section_pattern needs an elliptic quadric")
    n = (space.n - 1) // 2
    if A.projdim != 2 * n - 1:
        raise GeometryError(f"section must have projective dimension {2 * n - 1}")
    if check_type:
        sc = classify_section(space.form, A)
        if sc.radical_dim != -1 or sc.base_type != "elliptic":
            raise GeometryError("section is not a non-degenerate elliptic quadric")
    m = _m_of(S, m)
    x = (space.bits_of_subspace(A) & S.bits).bit_count()
    ell = perp(space.form, A)
    c = (space.bits_of_subspace(ell) & S.bits).bit_count()
    if c > 2 or x != (m - c) * space.q ** (n - 1) + m:
        raise PatternViolation(f"x={x}, c={c} breaks x = (m-c)q^(n-1)+m with m={m}")
    return x, c


def symplectic_pattern(S: PointSet, A: pg.Subspace, m: int | None = None, check_type: bool = True) -> tuple[int, int]:
    """(x, c) for a symplectic (2n-1)-space A of W(2n+1, q); x = (m - c) q^(n-1) + m, c <= q+1."""
    space = S.space
    if space.type != "W":
        raise GeometryError("symplectic_pattern needs a symplectic space")
    n = (space.n - 1) // 2
    if A.projdim != 2 * n - 1:
        raise GeometryError(f"section must have projective dimension {2 * n - 1}")
    if check_type:
        sc = classify_section(space.form, A)
        if sc.radical_dim != -1:
            raise GeometryError("section is degenerate")
    m = _m_of(S, m)
    x = (space.bits_of_subspace(A) & S.bits).bit_count()
    ell = perp(space.form, A)
    c = (space.bits_of_subspace(ell) & S.bits).bit_count()
    if c > space.q + 1 or x != (m - c) * space.q ** (n - 1) + m:
        raise PatternViolation(f"x={x}, c={c} breaks x = (m-c)q^(n-1)+m with m={m}")
    return x, c


def nondegenerate_codim2_sections(space: PolarSpace) -> list[pg.Subspace]:
    """Perps of all lines joining two non-perpendicular points of the space.

    For Q-(2n+1, q) these are exactly the elliptic (2n-1)-spaces; for
    W(2n+1, q) they are the non-degenerate symplectic (2n-1)-spaces.
    """
    F = space.F
    seen = set()
    out = []
    for P in range(space.num_points):
        for R in iter_bits(space.all_bits & ~space.perp_bits[P]):
            if R < P:
                continue
            line = pg.span(F, [space.points[P], space.points[R]])
            if line.basis in seen:
                continue
            seen.add(line.basis)
            out.append(perp(space.form, line))
    return out


def sweep_sections(S: PointSet, m: int | None = None) -> list[tuple[int, int]]:
    """Pattern (x, c) for every section returned by nondegenerate_codim2_sections."""
    m = _m_of(S, m)
    fn = section_pattern if S.space.type == "Q-" else symplectic_pattern
    return [fn(S, A, m, check_type=False) for A in nondegenerate_codim2_sections(S.space)]


def pattern_zero_cases(q: int, n: int) -> list[tuple[int, int]]:
    """All (c, m) with m >= 1, 0 <= c <= q+1 and (m - c) q^(n-1) + m = 0."""
    if n < 2:
        raise ValueError("n must be at least 2")
    out = []
    t = q ** (n - 1)
    # (m - c) t + m = 0 forces m <= c
    for c in range(q + 2):
        for m in range(1, c + 1):
            if (m - c) * t + m == 0:
                out.append((c, m))
    return out


# -- search ------------------------------------------------------------------

def find_m_ovoid(
    space: PolarSpace,
    m: int,
    include: PointSet | int | None = None,
    exclude: PointSet | int | None = None,
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
) -> PointSet:
    """A verified m-ovoid containing include and avoiding exclude.

    Raises SearchExhausted when no such set exists and BudgetExhausted when
    the node budget runs out first.
    """
    inc = _as_bits(include)
    exc = _as_bits(exclude)
    if inc & exc:
        raise OvoidError("include and exclude overlap")
    if not 0 <= m <= space.generator_size():
        raise OvoidError(f"m={m} outside [0, {space.generator_size()}]")
    engine = ExactIncidenceSearch(space, m, seed=seed, budget=budget)
    for p in iter_bits(inc):
        engine.assign(p, IN)
    for p in iter_bits(exc):
        engine.assign(p, OUT)
    bits = engine.run()
    S = PointSet(space, bits)
    cert = verify_m_ovoid(S)
    if not cert.ok or cert.m != m or bits & inc != inc or bits & exc:
        raise OvoidError("search produced a set that fails verification")
    find_m_ovoid.last_stats = engine.stats
    return S


find_m_ovoid.last_stats = None


def _as_bits(x) -> int:
    if x is None:
        return 0
    if isinstance(x, PointSet):
        return x.bits
    return int(x)


# -- files -------------------------------------------------------------------

def ovoid_payload(S: PointSet, claimed_m: int | None, **extra) -> dict:
    space = S.space
    n = space.n if space.embedding is None else len(space.embedding[0]) - 1
    return pg.point_set_payload(space.F, n, S.ambient_coords(), space=extra.pop("space", space.label), claimed_m=claimed_m, **extra)


def load_ovoid(space: PolarSpace, data: dict) -> PointSet:
    F, n, pts, _ = pg.parse_point_set(data)
    if F != space.F or n != space.n:
        raise GeometryError("file does not match the space's field or dimension")
    return PointSet.from_points(space, pts)
