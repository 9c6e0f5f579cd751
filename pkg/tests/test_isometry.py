import itertools

import pytest

from polarforge import isometry as iso
from polarforge import linalg
from polarforge import projgeom as pg
from polarforge.errors import BadConfiguration, DegenerateSpan, GramMismatch, NotDirectSum, NotSimilarity
from polarforge.forms import perp, standard_form
from polarforge.gf import field
from polarforge.pipelines import disjoint_hyperbolic_lines, elliptic_3space


def _config(q):
    F = field(q)
    f = standard_form(f"Q+:7:{q}", F)
    pi = elliptic_3space(f)
    l1, l2 = disjoint_hyperbolic_lines(f, perp(f, pi), 2)
    return F, f, pi, pg.join(F, pi, l1), pg.join(F, pi, l2)


def test_identity_and_scalar():
    F = field(5)
    f = standard_form("Q-:5:5", F)
    I = linalg.identity(6)
    assert iso.is_similarity(f, I) == 1
    assert iso.is_similarity(f, linalg.scale_matrix(F, 2, I)) == 4
    assert iso.is_similarity(f, [[1, 0], [0, 1]]) is None
    M = [list(r) for r in I]
    M[0][1] = 1
    assert iso.is_similarity(f, M) is None


def test_block_extend_identity():
    F, f, pi, _, _ = _config(3)
    phi = iso.identity(F, 4)
    out = iso.block_extend(phi, pi, f)
    assert out.matrix == tuple(linalg.identity(8))


def test_block_extend_nontrivial_fixes_pi():
    F, f, pi, s1, s2 = _config(3)
    pp = perp(f, pi)
    g = f.restrict(pp.basis)
    # swap two singular points of the elliptic quadric on pi^perp
    sing = [iso.coords_in(F, pp.basis, c) for c in pg.points_of(F, pp) if f.eval(c) == 0]
    a, b = sing[0], sing[1]
    phi = iso.witt_extend(g, [(a, b), (b, a)])
    assert phi.matrix != tuple(linalg.identity(4))
    Phi = iso.block_extend(phi, pi, f)
    assert iso.is_similarity(f, Phi.matrix) is not None
    fixed = [c for c in pg.points_of(F, pi) if f.eval(c) == 0]
    assert len(fixed) == 10
    assert all(Phi.apply(c) == c for c in fixed)
    # restricted action on pi^perp is phi
    for z in itertools.islice(itertools.product(range(3), repeat=4), 1, 20):
        v = iso._combine(F, pp.basis, z)
        assert iso.coords_in(F, pp.basis, Phi.apply_vector(v)) == phi.apply_vector(z)


def test_block_extend_rejects_nonsquare_multiplier():
    F, f, pi, _, _ = _config(3)
    pp = perp(f, pi)
    g = f.restrict(pp.basis)
    # a similarity with multiplier 2 (a non-square in GF(3)) of the form on pi^perp
    T = iso.form_isometry(g, g.scaled(2), allow_similarity=False)
    phi = iso.Collineation(F, T, iso.is_similarity(g, T))
    assert phi.multiplier == 2
    with pytest.raises(NotSimilarity):
        iso.block_extend(phi, pi, f)


def test_block_extend_rescales_square_multiplier():
    F, f, pi, _, _ = _config(5)
    phi = iso.Collineation(F, linalg.scale_matrix(F, 2, linalg.identity(4)), 4)
    Phi = iso.block_extend(phi, pi, f)
    assert Phi.multiplier == 1 and Phi.matrix == tuple(linalg.identity(8))


def test_block_extend_not_direct_sum():
    F = field(3)
    f = standard_form("Q+:7:3", F)
    G = pg.subspace(F, [r for r in linalg.identity(8)][:4])  # totally singular: G^perp = G
    with pytest.raises(NotDirectSum):
        iso.block_extend(iso.identity(F, 4), G, f)


def test_witt_extend_hyperbolic_lines():
    F = field(3)
    g = standard_form("Q-:3:3", F)
    sing = sorted(c for c in linalg.span_points(F, linalg.identity(4)) if g.eval(c) == 0)
    pairs = [(a, b) for a, b in itertools.combinations(sing, 2)]
    (a1, b1), (a2, b2) = pairs[0], pairs[-1]
    phi = iso.witt_extend(g, [(a1, a2), (b1, b2)])
    assert iso.is_similarity(g, phi.matrix) == 1
    assert phi.apply(a1) == a2 and phi.apply(b1) == b2
    img = pg.span(F, [phi.apply(a1), phi.apply(b1)])
    assert img == pg.span(F, [a2, b2])


def test_witt_extend_two_transitive_on_q3_3_points():
    F = field(3)
    g = standard_form("Q-:3:3", F)
    sing = sorted(c for c in linalg.span_points(F, linalg.identity(4)) if g.eval(c) == 0)
    for (a, b), (c, d) in itertools.product(itertools.permutations(sing[:4], 2), repeat=2):
        phi = iso.witt_extend(g, [(a, c), (b, d)])
        assert phi.apply(a) == c and phi.apply(b) == d


def test_witt_extend_empty_and_errors():
    F = field(3)
    g = standard_form("Q-:3:3", F)
    assert iso.witt_extend(g, []).matrix == tuple(linalg.identity(4))
    sing = sorted(c for c in linalg.span_points(F, linalg.identity(4)) if g.eval(c) == 0)
    aniso = sorted(c for c in linalg.span_points(F, linalg.identity(4)) if g.eval(c) != 0)
    a, b = sing[0], next(c for c in sing if g.pair(sing[0], c))
    c = next(x for x in aniso if g.pair(a, x))
    with pytest.raises(GramMismatch):
        iso.witt_extend(g, [(a, a), (b, c)])
    with pytest.raises(DegenerateSpan):
        iso.witt_extend(g, [(a, b)][:1])
    with pytest.raises(DegenerateSpan):
        iso.witt_extend(g, [(a, a), (linalg.vec_scale(F, 2, a), b)])


def test_witt_extend_symplectic():
    F = field(3)
    w = standard_form("W:3:3", F)
    a, b = (1, 0, 0, 0), (0, 1, 0, 0)
    c, d = (0, 0, 1, 0), (0, 0, 0, 1)
    phi = iso.witt_extend(w, [(a, c), (b, d)])
    assert iso.is_similarity(w, phi.matrix) == 1
    assert phi.apply(a) == c and phi.apply(b) == d


@pytest.mark.parametrize("q", [3, 5])
def test_map_elliptic_5space(q):
    F, f, pi, s1, s2 = _config(q)
    Phi = iso.map_elliptic_5space(f, pi, s1, s2)
    assert iso.is_similarity(f, Phi.matrix) is not None
    assert Phi.image(s1) == s2
    for c in pg.points_of(F, pi):
        assert Phi.apply(c) == c
    q1 = [c for c in pg.points_of(F, s1) if f.eval(c) == 0]
    q2 = {c for c in pg.points_of(F, s2) if f.eval(c) == 0}
    assert {Phi.apply(c) for c in q1} == q2


def test_map_elliptic_same_space_is_identity():
    F, f, pi, s1, _ = _config(3)
    assert iso.map_elliptic_5space(f, pi, s1, s1).matrix == tuple(linalg.identity(8))


def test_map_elliptic_bad_configuration():
    F, f, pi, s1, s2 = _config(3)
    with pytest.raises(BadConfiguration):
        iso.map_elliptic_5space(f, s1, s1, s2)
    other = elliptic_3space(f, skip=5)
    with pytest.raises(BadConfiguration):
        iso.map_elliptic_5space(f, other, s1, s2)


def test_collineation_permutes_space(qp73):
    F, f, pi, s1, s2 = _config(3)
    Phi = iso.map_elliptic_5space(qp73, pi, s1, s2)
    assert iso.permutes_points(qp73, Phi)


def test_form_isometry_to_reference():
    F = field(3)
    f = standard_form("Q+:7:3", F)
    sp = perp(f, elliptic_3space(f))
    g = f.restrict(sp.basis)
    ref = standard_form("Q-:3:3", F)
    T = iso.form_isometry(g, ref)
    lam = iso.is_similarity(g, T)
    # T^T S_g T = c S_ref
    TT = linalg.matmul(F, linalg.matmul(F, linalg.transpose(T), g.gram), T)
    c = next(F.div(a, b) for ra, rb in zip(TT, ref.gram) for a, b in zip(ra, rb) if b)
    assert TT == [tuple(F.mul(c, b) for b in row) for row in ref.gram]
    assert lam is None or lam  # T need not preserve g itself
