"""Finite classical polar spaces: singular points, generators, incidence bitsets.

Point sets are Python ints used as bitsets over the dense point index
(bit i set <=> point i of ``space.points``).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import linalg
from . import projgeom as pg
from .errors import CountMismatch, GeometryError, NotSingular, TooLarge
from .forms import (
    QuadraticForm,
    SpaceSpec,
    classify_section,
    generator_count,
    is_totally_singular,
    polar_point_count,
    standard_form,
)
from .gf import FieldCtx

DEFAULT_GENERATOR_CAP = 250_000
DEFAULT_POINT_CAP = 400_000

_TYPE_OF_BASE = {"hyperbolic": "Q+", "elliptic": "Q-", "parabolic": "Q", "symplectic": "W"}


def iter_bits(x: int):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def bits_of(indices) -> int:
    out = 0
    for i in indices:
        out |= 1 << i
    return out


def polar_type(form) -> tuple[str, int, int]:
    """(type, rank, e) of a non-degenerate form, decided by point counting."""
    if not form.is_nondegenerate():
        raise GeometryError("polar spaces need a non-degenerate form")
    whole = pg.whole_space(form.n)
    sc = classify_section(form, whole)
    t = _TYPE_OF_BASE[sc.base_type]
    spec = SpaceSpec(t, form.n, form.F.q)
    return t, spec.rank, spec.e


def default_threads() -> int:
    env = os.environ.get("POLARFORGE_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


class PolarSpace:
    """A built polar space. Construct with :func:`build`."""

    def __init__(self, form, *, spec: SpaceSpec | None = None, embedding=None, label: str = ""):
        self.form = form
        self.F: FieldCtx = form.F
        self.n = form.n
        self.type, self.rank, self.e = polar_type(form)
        self.spec = spec if spec is not None else SpaceSpec(self.type, self.n, self.F.q)
        self.label = label or str(self.spec)
        # rows spanning the ambient subspace this space lives in, if it is a section
        self.embedding = tuple(tuple(r) for r in embedding) if embedding is not None else None
        self.points: list[tuple] = []
        self.index: dict[tuple, int] = {}
        self.generators: list[pg.Subspace] = []
        self.gen_bits: list[int] = []
        self.point_gens: list[list[int]] = []
        self.perp_bits: list[int] = []

    @property
    def q(self) -> int:
        return self.F.q

    @property
    def num_points(self) -> int:
        return len(self.points)

    @property
    def all_bits(self) -> int:
        return (1 << len(self.points)) - 1

    def expected_points(self) -> int:
        return polar_point_count(self.rank, self.e, self.q)

    def expected_generators(self) -> int:
        return generator_count(self.rank, self.e, self.q)

    def generator_size(self) -> int:
        return (self.q ** self.rank - 1) // (self.q - 1)

    def ovoid_size(self, m: int) -> int:
        return m * (self.q ** (self.rank + self.e - 1) + 1)

    def point_id(self, P) -> int:
        c = P.coords if isinstance(P, pg.ProjPoint) else linalg.normalize(self.F, P)
        try:
            return self.index[c]
        except KeyError:
            raise NotSingular(f"{c} is not a point of {self.label}") from None

    def to_ambient(self, i: int) -> tuple:
        """Coordinates of point i in the ambient space of the section (or itself)."""
        c = self.points[i]
        if self.embedding is None:
            return c
        v = [0] * len(self.embedding[0])
        for a, row in zip(c, self.embedding):
            if a:
                v = linalg.vec_add(self.F, v, linalg.vec_scale(self.F, a, row))
        return linalg.normalize(self.F, v)

    # -- construction --------------------------------------------------------

    def _index_points(self) -> None:
        F = self.F
        if pg.num_points(self.n, self.q) > DEFAULT_POINT_CAP:
            raise TooLarge(f"PG({self.n},{self.q}) has too many points to index")
        allpts = pg.enumerate_points(self.n, F)
        X = np.array([p.coords for p in allpts], dtype=np.int32)
        mask = self.form.singular_mask(X)
        self.points = [allpts[i].coords for i in np.flatnonzero(mask)]
        self.index = {c: i for i, c in enumerate(self.points)}
        self._X = X[mask]
        if len(self.points) != self.expected_points():
            raise CountMismatch(f"{self.label}: {len(self.points)} points, formula says {self.expected_points()}")

    def _build_perp(self) -> None:
        table = self.form.pair_table(self._X) == 0
        packed = np.packbits(table, axis=1, bitorder="little")
        self.perp_bits = [int.from_bytes(row.tobytes(), "little") for row in packed]

    def _pg_to_dense(self) -> np.ndarray:
        table = np.full(pg.num_points(self.n, self.q), -1, dtype=np.int64)
        for i, c in enumerate(self.points):
            table[pg.point_index(c, self.q)] = i
        return table

    def _dense_index(self, V: np.ndarray, dense: np.ndarray) -> np.ndarray:
        """Dense index of each row of V (normalizing first); -1 if not a space point."""
        F, n, q = self.F, self.n, self.q
        nz = V != 0
        lead = np.argmax(nz, axis=-1)
        a = np.take_along_axis(V, lead[..., None], axis=-1)[..., 0]
        s = np.array(F.inv_table, dtype=np.int32)[a]
        V = F.mul_np[s[..., None], V]
        weights = np.array([q ** (n - k) for k in range(n + 1)], dtype=np.int64)
        full = (V.astype(np.int64) * weights).sum(axis=-1)
        top = q ** (n - lead).astype(np.int64)
        idx = (top - 1) // (q - 1) + full - top
        out = dense[idx]
        out[~nz.any(axis=-1)] = -1
        return out

    def _line_minimum_bits(self) -> list[int]:
        """good[u]: points c perpendicular to u with c < every point of line(u, c) other than u."""
        F, N, X = self.F, len(self.points), self._X
        dense = self._pg_to_dense()
        cidx = np.arange(N)
        good = []
        chunk = max(1, 2_000_000 // max(1, N * (self.n + 1)))
        for start in range(0, N, chunk):
            U = X[start:start + chunk]
            ok = np.ones((U.shape[0], N), dtype=bool)
            for lam in range(1, F.q):
                lu = F.mul_np[lam, U]
                V = F.add_np[X[None, :, :], lu[:, None, :]]
                ok &= self._dense_index(V, dense) > cidx[None, :]
            for r in range(U.shape[0]):
                u = start + r
                row = ok[r].copy()
                row[u] = False
                packed = np.packbits(row, bitorder="little")
                good.append(int.from_bytes(packed.tobytes(), "little") & self.perp_bits[u])
        return good

    def _enumerate_generators(self) -> None:
        """Depth-first extension of totally singular flags.

        A generator G is reached along exactly one path: p_{k+1} is the
        smallest point of G outside span(p_1..p_k). A candidate c is taken
        only if it exceeds the previous choice and is the smallest point of
        line(u, c) minus u for every u already chosen, which is the same as
        every new point of span(U, c) having index at least c.
        """
        F, r, q = self.F, self.rank, self.q
        add, mul, inv = F.add_table, F.mul_table, F.inv_table
        index, perp = self.index, self.perp_bits
        good = self._line_minimum_bits()
        need = [(q ** r - q ** k) // (q - 1) for k in range(r + 1)]
        found: list[int] = []
        bases: list[tuple] = []

        def norm(v):
            for a in v:
                if a:
                    if a == 1:
                        return v
                    s = inv[a]
                    return tuple(mul[s][x] for x in v)

        def extend(ubits, basis, vecs, common, allowed, last):
            k = len(basis)
            if k == r:
                found.append(ubits)
                bases.append(tuple(basis))
                return
            above = ~((1 << (last + 1)) - 1)
            # every point of G outside U lies in this set
            pool = common & ~ubits & above
            if pool.bit_count() < need[k]:
                return
            for c in iter_bits(pool & allowed):
                cv = self.points[c]
                newbits = 0
                newvecs = []
                for lam in range(1, q):
                    lc = [mul[lam][x] for x in cv]
                    for w in vecs:
                        newvecs.append(tuple(add[x][y] for x, y in zip(w, lc)))
                nallowed = allowed
                for w in vecs:
                    j = index[norm(tuple(add[x][y] for x, y in zip(w, cv)))]
                    newbits |= 1 << j
                    nallowed &= good[j]
                extend(ubits | newbits, basis + [cv], vecs + newvecs, common & perp[c], nallowed, c)

        zero = tuple([0] * (self.n + 1))
        extend(0, [], [zero], self.all_bits, self.all_bits, -1)
        order = sorted(range(len(found)), key=lambda i: pg.subspace(F, bases[i]).basis)
        self.generators = [pg.subspace(F, bases[i]) for i in order]
        self.gen_bits = [found[i] for i in order]
        self.point_gens = [[] for _ in self.points]
        for g, bits in enumerate(self.gen_bits):
            for i in iter_bits(bits):
                self.point_gens[i].append(g)

    def _self_check(self) -> None:
        size = self.generator_size()
        if any(b.bit_count() != size for b in self.gen_bits):
            raise CountMismatch("a generator has the wrong number of points")
        if len(set(self.gen_bits)) != len(self.gen_bits):
            raise CountMismatch("duplicate generators")
        if len(self.gen_bits) != self.expected_generators():
            raise CountMismatch(
                f"{self.label}: {len(self.gen_bits)} generators, expected {self.expected_generators()}"
            )
        per_point = {len(g) for g in self.point_gens}
        if len(per_point) != 1:
            raise CountMismatch(f"generators per point not constant: {sorted(per_point)}")
        if sum(b.bit_count() for b in self.gen_bits) != len(self.points) * per_point.pop():
            raise CountMismatch("incidence double count failed")

    # -- queries ---------------------------------------------------------------

    def bits_of_subspace(self, A: pg.Subspace) -> int:
        """Bitset of the space's points lying in A."""
        if not A.basis:
            return 0
        ann = linalg.nullspace(self.F, list(A.basis), self.n + 1)
        if not ann:
            return self.all_bits
        F = self.F
        X = self._X
        ok = np.ones(X.shape[0], dtype=bool)
        for row in ann:
            acc = np.zeros(X.shape[0], dtype=np.int32)
            for k, a in enumerate(row):
                if a:
                    acc = F.add_np[acc, F.mul_np[a, X[:, k]]]
            ok &= acc == 0
        return bits_of(np.flatnonzero(ok).tolist())

    def perp_of_bits(self, bits: int) -> int:
        """Points of the space perpendicular to every point in bits."""
        out = self.all_bits
        for i in iter_bits(bits):
            out &= self.perp_bits[i]
        return out

    def histogram(self, bits: int, threads: int | None = None) -> dict[int, int]:
        """Map |generator ∩ bits| -> number of generators."""
        threads = threads or 1
        gens = self.gen_bits

        def work(chunk):
            h: dict[int, int] = {}
            for g in chunk:
                k = (g & bits).bit_count()
                h[k] = h.get(k, 0) + 1
            return h

        if threads <= 1 or len(gens) < 2048:
            return dict(sorted(work(gens).items()))
        size = -(-len(gens) // threads)
        chunks = [gens[i:i + size] for i in range(0, len(gens), size)]
        total: dict[int, int] = {}
        with ThreadPoolExecutor(max_workers=threads) as ex:
            for h in ex.map(work, chunks):
                for k, v in h.items():
                    total[k] = total.get(k, 0) + v
        return dict(sorted(total.items()))

    def describe(self) -> dict:
        return {
            "space": self.label,
            "type": self.type,
            "n": self.n,
            "q": self.q,
            "rank": self.rank,
            "e": self.e,
            "points": len(self.points),
            "generators": len(self.generators),
        }


def build(spec, *, generators: bool = True, cap: int = DEFAULT_GENERATOR_CAP, embedding=None, label: str = "") -> PolarSpace:
    """Build a polar space from a spec string, SpaceSpec or form."""
    if isinstance(spec, str):
        spec = SpaceSpec.parse(spec)
    if isinstance(spec, SpaceSpec):
        form = standard_form(spec)
        space = PolarSpace(form, spec=spec, embedding=embedding, label=label)
    else:
        space = PolarSpace(spec, embedding=embedding, label=label)
    if generators and space.expected_generators() > cap:
        raise TooLarge(f"{space.label} has {space.expected_generators()} generators (cap {cap})")
    space._index_points()
    space._build_perp()
    if generators:
        space._enumerate_generators()
        space._self_check()
    return space


def section_space(form, A: pg.Subspace, **kw) -> PolarSpace:
    """The polar space induced on a subspace A where the induced form is non-degenerate."""
    sub = form.restrict(A.basis)
    label = kw.pop("label", "")
    return build(sub, embedding=A.basis, label=label, **kw)


def generators_through(space: PolarSpace, A: pg.Subspace) -> list[int]:
    if not A.basis:
        return list(range(len(space.generators)))
    if not is_totally_singular(space.form, A):
        raise NotSingular("subspace is not totally singular")
    abits = space.bits_of_subspace(A)
    return [g for g, b in enumerate(space.gen_bits) if b & abits == abits]


def section_points(space: PolarSpace, A: pg.Subspace) -> int:
    return space.bits_of_subspace(A)


def is_maximal(space: PolarSpace, g: int) -> bool:
    """No singular point outside generator g is perpendicular to all of it."""
    bits = space.gen_bits[g]
    return space.perp_of_bits(bits) == bits
