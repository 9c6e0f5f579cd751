import json

import pytest

from polarforge import projgeom as pg
from polarforge.errors import NotDisjoint, OvoidError, PatternViolation, SearchExhausted, BudgetExhausted
from polarforge.forms import perp
from polarforge.ovoids import (
    PointSet,
    complement,
    find_m_ovoid,
    load_ovoid,
    nondegenerate_codim2_sections,
    ovoid_payload,
    pattern_zero_cases,
    perp_counts,
    section_pattern,
    sweep_sections,
    symplectic_pattern,
    union_disjoint,
    verify_m_ovoid,
)
from polarforge.polarspace import build


def test_trivial_ovoids(qm53):
    empty = verify_m_ovoid(PointSet.empty(qm53))
    assert empty.ok and empty.m == 0 and empty.size == 0
    full = verify_m_ovoid(PointSet.full(qm53))
    assert full.ok and full.m == 4 and full.histogram == {4: 280}
    assert perp_counts(PointSet.empty(qm53)) == (None, 0)


def test_found_two_ovoid(two_ovoid):
    cert = verify_m_ovoid(two_ovoid)
    assert cert.ok and cert.m == 2 and cert.size == 56
    assert cert.histogram == {2: 280}
    assert (cert.perp_in, cert.perp_out) == (11, 20)


def test_perp_counts_every_point(two_ovoid):
    space = two_ovoid.space
    for P in range(space.num_points):
        k = (space.perp_bits[P] & two_ovoid.bits).bit_count()
        assert k == (11 if P in two_ovoid else 20)


def test_non_ovoid_certificate(qm53):
    S = PointSet(qm53, (1 << 56) - 1)
    cert = verify_m_ovoid(S)
    assert not cert.ok and cert.m is None and len(cert.histogram) > 1
    with pytest.raises(PatternViolation):
        perp_counts(S)


def test_complement_and_union(two_ovoid):
    C = complement(two_ovoid)
    cert = verify_m_ovoid(C)
    assert cert.ok and cert.m == 2 and cert.size == 56
    U = union_disjoint(two_ovoid, C)
    assert verify_m_ovoid(U).m == 4
    assert union_disjoint(two_ovoid, PointSet.empty(two_ovoid.space)) == two_ovoid
    with pytest.raises(NotDisjoint):
        union_disjoint(two_ovoid, two_ovoid)


def test_section_patterns(two_ovoid):
    pats = sweep_sections(two_ovoid)
    counts = {}
    for xc in pats:
        counts[xc] = counts.get(xc, 0) + 1
    assert counts == {(5, 1): 2016, (2, 2): 1260, (8, 0): 1260}
    # never all 10 points, never empty
    assert max(x for x, _ in pats) < 10 and min(x for x, _ in pats) > 0


def test_section_pattern_full_set(qm53):
    A = nondegenerate_codim2_sections(qm53)[0]
    full = PointSet.full(qm53)
    x, c = section_pattern(full, A, 4)
    assert (x, c) == (10, 2)


def test_section_pattern_violation(qm53, two_ovoid):
    A = nondegenerate_codim2_sections(qm53)[0]
    with pytest.raises(PatternViolation):
        section_pattern(two_ovoid, A, m=3)


def test_symplectic_trivial_patterns():
    w = build("W:5:3")
    A = nondegenerate_codim2_sections(w)[0]
    assert A.projdim == 3
    full = PointSet.full(w)
    cert = verify_m_ovoid(full)
    assert cert.ok and cert.m == 13
    assert symplectic_pattern(full, A, 13) == (40, 4)
    assert symplectic_pattern(PointSet.empty(w), A, 0) == (0, 0)


@pytest.mark.parametrize("q", [3, 5, 7])
def test_pattern_zero_cases(q):
    assert pattern_zero_cases(q, 2) == [(q + 1, q)]
    assert pattern_zero_cases(q, 3) == []
    assert pattern_zero_cases(q, 4) == []


def test_search_with_pair_constraints(qm53):
    F = qm53.F
    f = qm53.form
    # an elliptic 3-section: perp of a hyperbolic line
    P, R = qm53.points[0], next(qm53.points[i] for i in range(qm53.num_points) if f.pair(qm53.points[0], qm53.points[i]))
    sigma = perp(f, pg.span(F, [P, R]))
    sig = qm53.bits_of_subspace(sigma)
    ids = sorted(i for i in range(qm53.num_points) if sig >> i & 1)
    inc = (1 << ids[3]) | (1 << ids[7])
    S = find_m_ovoid(qm53, 2, include=inc, exclude=sig & ~inc, seed=4)
    assert S.bits & sig == inc
    assert verify_m_ovoid(S).m == 2


def test_search_infeasible_and_budget(qm53):
    with pytest.raises(SearchExhausted):
        find_m_ovoid(qm53, 0, include=1)
    with pytest.raises(BudgetExhausted):
        find_m_ovoid(qm53, 2, budget=3)
    with pytest.raises(OvoidError):
        find_m_ovoid(qm53, 2, include=1, exclude=1)


def test_search_is_deterministic(qm53):
    a = find_m_ovoid(qm53, 2, seed=11)
    b = find_m_ovoid(qm53, 2, seed=11)
    assert a == b


def test_file_roundtrip(tmp_path, two_ovoid):
    data = ovoid_payload(two_ovoid, 2)
    path = tmp_path / "o.json"
    path.write_text(json.dumps(data))
    back = load_ovoid(two_ovoid.space, json.loads(path.read_text()))
    assert back == two_ovoid
    assert verify_m_ovoid(back).histogram == verify_m_ovoid(two_ovoid).histogram


def test_section_file_uses_ambient_coordinates(qp73):
    from polarforge.pipelines import elliptic_3space
    from polarforge.polarspace import section_space

    f = qp73.form
    pi = elliptic_3space(f)
    data = ovoid_payload(PointSet.full(section_space(f, pi)), 1)
    assert data["n"] == 7 and len(data["points"]) == 10
    assert all(f.eval(c) == 0 for c in data["points"])
