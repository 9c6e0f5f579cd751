"""Similarities of quadratic forms and constructive isometry extension.

Matrices act on column vectors: a point x goes to M x, and M is a
similarity of a form with Gram S when M^T S M = lambda S.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import linalg
from . import projgeom as pg
from .errors import (
    BadConfiguration,
    DegenerateSpan,
    DivisionByZero,
    GramMismatch,
    NotDirectSum,
    NotSimilarity,
)
from .forms import QuadraticForm, classify_section, perp
from .gf import FieldCtx


def _gram(form):
    return form.gram if isinstance(form, QuadraticForm) else form.matrix


@dataclass(frozen=True)
class Collineation:
    F: FieldCtx
    matrix: tuple
    multiplier: int = 1
    # rows of the subspace whose coordinates the matrix acts on, if not the ambient space
    frame: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "matrix", tuple(tuple(r) for r in self.matrix))
        if linalg.det(self.F, self.matrix) == 0:
            raise NotSimilarity("collineation matrix is singular")

    @property
    def size(self) -> int:
        return len(self.matrix)

    def apply_vector(self, v) -> tuple:
        return linalg.matvec(self.F, self.matrix, v)

    def apply(self, P) -> tuple:
        v = P.coords if isinstance(P, pg.ProjPoint) else P
        return linalg.normalize(self.F, self.apply_vector(v))

    def image(self, A: pg.Subspace) -> pg.Subspace:
        if not A.basis:
            return A
        return pg.subspace(self.F, [self.apply_vector(r) for r in A.basis], A.n)

    def to_json(self) -> dict:
        return {"matrix": [list(r) for r in self.matrix], "multiplier": self.multiplier}


def identity(F: FieldCtx, size: int) -> Collineation:
    return Collineation(F, tuple(linalg.identity(size)), 1)


def is_similarity(form, M) -> int | None:
    """lambda with M^T S M = lambda S, or None."""
    F = form.F
    S = _gram(form)
    M = [tuple(r) for r in M]
    if len(M) != len(S) or any(len(r) != len(S) for r in M):
        return None
    T = linalg.matmul(F, linalg.matmul(F, linalg.transpose(M), S), M)
    lam = None
    for rs, rt in zip(S, T):
        for s, t in zip(rs, rt):
            if s:
                lam = F.div(t, s)
                break
        if lam is not None:
            break
    if lam is None or lam == 0:
        return None
    if T != [tuple(F.mul(lam, s) for s in row) for row in S]:
        return None
    return lam


def permutes_points(space, coll: Collineation) -> bool:
    """True iff the collineation maps the polar space's point set onto itself."""
    if coll.size != space.n + 1:
        return False
    image = set()
    for c in space.points:
        d = coll.apply(c)
        if d not in space.index:
            return False
        image.add(d)
    return len(image) == space.num_points


def coords_in(F: FieldCtx, basis, v) -> tuple:
    """z with sum z_j basis_j = v; raises ValueError if v is outside the span."""
    k = len(basis)
    rows = linalg.transpose(list(basis) + [tuple(v)])
    R, piv = linalg.rref(F, rows)
    if k in piv:
        raise ValueError("vector not in span")
    z = [0] * k
    for row, c in zip(R, piv):
        z[c] = row[k]
    return tuple(z)


def _combine(F: FieldCtx, basis, z) -> tuple:
    v = [0] * len(basis[0])
    for a, row in zip(z, basis):
        if a:
            v = linalg.vec_add(F, v, linalg.vec_scale(F, a, row))
    return tuple(v)


# -- block extension ----------------------------------------------------------

def block_extend(phi: Collineation, pi: pg.Subspace, form) -> Collineation:
    """Extend phi on pi^perp to the ambient space by the identity on pi.

    phi.frame gives the pi^perp basis its matrix refers to (defaults to the
    RREF basis of pi^perp). A multiplier that is a non-square cannot be
    absorbed and is rejected.
    """
    F = form.F
    pp = perp(form, pi)
    frame = phi.frame if phi.frame is not None else pp.basis
    if pg.subspace(F, frame, form.n) != pp:
        raise NotDirectSum("phi's frame does not span pi^perp")
    rows = list(pi.basis) + list(frame)
    if len(rows) != form.n + 1 or linalg.rank(F, rows) != form.n + 1:
        raise NotDirectSum("pi and pi^perp do not span the ambient space")
    g = form.restrict(frame)
    lam = is_similarity(g, phi.matrix)
    if lam is None:
        raise NotSimilarity("phi is not a similarity of the form on pi^perp")
    M = phi.matrix
    if lam != 1:
        root = F.sqrt(lam)
        if root is None:
            raise NotSimilarity(f"multiplier {lam} is a non-square; the identity block cannot match it")
        M = linalg.scale_matrix(F, F.inv(root), M)
    k = len(pi.basis)
    size = form.n + 1
    block = [[0] * size for _ in range(size)]
    for i in range(k):
        block[i][i] = 1
    for i in range(len(frame)):
        for j in range(len(frame)):
            block[k + i][k + j] = M[i][j]
    C = linalg.transpose(rows)  # columns are the adapted basis
    Cinv = linalg.inverse(F, C)
    full = linalg.matmul(F, linalg.matmul(F, C, block), Cinv)
    mu = is_similarity(form, full)
    if mu is None:
        raise NotSimilarity("block extension is not a similarity")
    return Collineation(F, tuple(full), mu)


# -- Witt extension -------------------------------------------------------------

def _value(form, v) -> int:
    if isinstance(form, QuadraticForm):
        return form.eval(v)
    return 0


def _vectors(F: FieldCtx, basis):
    """Nonzero vectors of span(basis) in a fixed order."""
    for z in itertools.product(range(F.q), repeat=len(basis)):
        if any(z):
            yield _combine(F, basis, z)


def _scalars(form, src, tgt) -> list[int]:
    """Scalars l_i with Gram(l_i tgt_i) = Gram(src_i), chosen greedily."""
    F = form.F
    lam: list[int] = []
    for i, (s, t) in enumerate(zip(src, tgt)):
        li = None
        for j in range(i):
            b = form.pair(t, tgt[j])
            if b:
                li = F.div(form.pair(s, src[j]), F.mul(lam[j], b))
                break
        if li is None:
            fs, ft = _value(form, s), _value(form, t)
            if ft:
                li = F.sqrt(F.div(fs, ft))
            else:
                li = 1
        if not li:
            raise GramMismatch(f"no scaling of target {i} matches its source")
        lam.append(li)
    return lam


def _complement(form, vecs) -> list[tuple]:
    F = form.F
    if not vecs:
        return [tuple(r) for r in linalg.identity(form.n + 1)]
    rows = linalg.matmul(F, [tuple(v) for v in vecs], form.perp_matrix)
    return linalg.nullspace(F, rows, form.n + 1)


def isometry_completion(form, src, tgt) -> list[tuple]:
    """Extend equal-Gram frames src, tgt to full bases with equal Gram matrices.

    Returns the matrix M (rows) with M src_i = tgt_i.
    """
    F = form.F
    X, Y = [tuple(v) for v in src], [tuple(v) for v in tgt]
    while len(X) < form.n + 1:
        cx, cy = _complement(form, X), _complement(form, Y)
        if form.kind == "quadratic":
            u = next(v for v in _vectors(F, cx) if form.eval(v))
            want = form.eval(u)
            v = next((w for w in _vectors(F, cy) if form.eval(w) == want), None)
            if v is None:
                raise GramMismatch("complements are not isometric")
            X.append(u)
            Y.append(v)
        else:
            u = cx[0]
            w = next(w for w in cx if form.pair(u, w))
            w = linalg.vec_scale(F, F.inv(form.pair(u, w)), w)
            u2 = cy[0]
            w2 = next(x for x in cy if form.pair(u2, x))
            w2 = linalg.vec_scale(F, F.inv(form.pair(u2, w2)), w2)
            X += [u, w]
            Y += [u2, w2]
    Xc, Yc = linalg.transpose(X), linalg.transpose(Y)
    return linalg.matmul(F, Yc, linalg.inverse(F, Xc))


def witt_extend(form, pairs) -> Collineation:
    """An isometry of the whole space sending each source point to its target point.

    pairs: list of (source, target) projective points. The targets are
    rescaled so that the two Gram matrices agree; the source span must be
    non-degenerate.
    """
    F = form.F
    if not pairs:
        return identity(F, form.n + 1)
    src = [tuple(P.coords if isinstance(P, pg.ProjPoint) else P) for P, _ in pairs]
    tgt = [tuple(Q.coords if isinstance(Q, pg.ProjPoint) else Q) for _, Q in pairs]
    if linalg.rank(F, src) != len(src) or linalg.rank(F, tgt) != len(tgt):
        raise DegenerateSpan("points are not independent")
    Gs = [[form.pair(a, b) for b in src] for a in src]
    if linalg.det(F, Gs) == 0:
        raise DegenerateSpan("the source points span a degenerate subspace")
    lam = _scalars(form, src, tgt)
    tgt = [linalg.vec_scale(F, c, t) for c, t in zip(lam, tgt)]
    Gt = [[form.pair(a, b) for b in tgt] for a in tgt]
    vals_ok = all(_value(form, s) == _value(form, t) for s, t in zip(src, tgt))
    if Gs != Gt or not vals_ok:
        raise GramMismatch("source and target Gram matrices differ")
    M = isometry_completion(form, src, tgt)
    coll = Collineation(F, tuple(M), 1)
    if is_similarity(form, coll.matrix) != 1:
        raise GramMismatch("completion did not produce an isometry")
    return coll


def form_isometry(source, target, allow_similarity: bool = True) -> list[tuple]:
    """T with T^T S_source T = c S_target for some c, mapping target coordinates to source ones.

    Tries c = 1 first, then every other nonzero scalar when allowed.
    """
    F = source.F
    scalars = [1] + ([c for c in range(2, F.q)] if allow_similarity else [])
    for c in scalars:
        tgt = target.scaled(c)
        try:
            X, Y = [], []
            while len(X) < source.n + 1:
                cx, cy = _complement(source, X), _complement(tgt, Y)
                u = next(v for v in _vectors(F, cy) if tgt.eval(v))
                want = tgt.eval(u)
                v = next((w for w in _vectors(F, cx) if source.eval(w) == want), None)
                if v is None:
                    raise GramMismatch("not isometric")
                Y.append(u)
                X.append(v)
            return linalg.matmul(F, linalg.transpose(X), linalg.inverse(F, linalg.transpose(Y)))
        except (GramMismatch, StopIteration, DivisionByZero):
            continue
    raise GramMismatch("forms are not similar")


# -- moving one elliptic 5-space to another through a fixed 3-space -----------------

def hyperbolic_points(form, line: pg.Subspace) -> list[tuple]:
    return [c for c in pg.points_of(form.F, line) if form.eval(c) == 0]


def map_elliptic_5space(form, pi: pg.Subspace, sigma1: pg.Subspace, sigma2: pg.Subspace) -> Collineation:
    """A similarity fixing pi pointwise and mapping sigma1 onto sigma2.

    pi must be an elliptic 3-space and sigma1, sigma2 elliptic 5-spaces with
    sigma1 ∩ sigma2 = pi (or sigma1 = sigma2).
    """
    form = getattr(form, "form", form)
    F = form.F
    if getattr(form, "kind", "") != "quadratic":
        raise BadConfiguration("needs a quadratic form")
    for A, dim in ((pi, 3), (sigma1, 5), (sigma2, 5)):
        if A.projdim != dim:
            raise BadConfiguration(f"expected a {dim}-space")
        sc = classify_section(form, A)
        if sc.radical_dim != -1 or sc.base_type != "elliptic":
            raise BadConfiguration(f"{dim}-space is not elliptic")
    if not pg.contains_subspace(F, sigma1, pi) or not pg.contains_subspace(F, sigma2, pi):
        raise BadConfiguration("pi is not contained in both 5-spaces")
    if sigma1 == sigma2:
        return identity(F, form.n + 1)
    if pg.meet(F, sigma1, sigma2) != pi:
        raise BadConfiguration("sigma1 ∩ sigma2 is not pi")
    pp = perp(form, pi)
    frame = pp.basis
    g = form.restrict(frame)
    ends = []
    for sigma in (sigma1, sigma2):
        ell = pg.meet(F, sigma, pp)
        if ell.projdim != 1:
            raise BadConfiguration("sigma ∩ pi^perp is not a line")
        pts = hyperbolic_points(form, ell)
        if len(pts) != 2:
            raise BadConfiguration("sigma ∩ pi^perp is not a hyperbolic line")
        ends.append([coords_in(F, frame, c) for c in pts])
    (a1, b1), (a2, b2) = ends
    phi = witt_extend(g, [(a1, a2), (b1, b2)])
    phi = Collineation(F, phi.matrix, phi.multiplier, frame=frame)
    Phi = block_extend(phi, pi, form)
    for r in pi.basis:
        if Phi.apply_vector(r) != r:
            raise BadConfiguration("extension does not fix pi")
    if Phi.image(sigma1) != sigma2:
        raise BadConfiguration("extension does not map sigma1 onto sigma2")
    return Phi
