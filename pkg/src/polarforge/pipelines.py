"""End-to-end constructions in Q+(7, q): the glued (q+1)-ovoid and the
family of five pairwise disjoint 2-ovoids of Q+(7, 3).

Every step is checked on its own; nothing downstream trusts an upstream claim.
"""

from __future__ import annotations

import functools
import hashlib
import itertools
import json
import os
from dataclasses import dataclass, field

from . import __version__
from . import isometry as iso
from . import klein
from . import linalg
from . import projgeom as pg
from .errors import (
    BadConfiguration,
    BudgetExhausted,
    ConfigurationFailed,
    DisjointnessFailure,
    GramMismatch,
    SearchExhausted,
    SearchFailed,
)
from .forms import classify_section, perp, standard_form
from .gf import field as gf_field
from .ovoids import OvoidCertificate, PointSet, find_m_ovoid, ovoid_payload, verify_m_ovoid
from .polarspace import PolarSpace, bits_of, build, iter_bits, section_space
from .search import DEFAULT_BUDGET

UNVERIFIED = "provenance from a 1-system is not tested"


@functools.lru_cache(maxsize=None)
def hyperbolic_space(q: int) -> PolarSpace:
    """Q+(7, q) with all generators, cached per process."""
    return build(f"Q+:7:{q}")


# -- canonical subspace choices ------------------------------------------------

def _is_elliptic(form, A: pg.Subspace) -> bool:
    sc = classify_section(form, A)
    return sc.radical_dim == -1 and sc.base_type == "elliptic"


def _is_hyperbolic_line(form, L: pg.Subspace) -> bool:
    sc = classify_section(form, L)
    return sc.radical_dim == -1 and sc.base_type == "hyperbolic"


def elliptic_3space(form, skip: int = 0) -> pg.Subspace:
    """An elliptic 3-space: a hyperbolic pair joined to an anisotropic line in its perp.

    Candidates are scanned in canonical point order; ``skip`` picks a later one.
    """
    F = form.F
    pts = linalg.span_points(F, linalg.identity(form.n + 1))
    sing = sorted(c for c in pts if form.eval(c) == 0)
    P = sing[0]
    R = next(c for c in sing if form.pair(P, c))
    hyp = pg.span(F, [P, R])
    rest = sorted(c for c in pg.points_of(F, perp(form, hyp)) if form.eval(c))
    for x, y in itertools.combinations(rest, 2):
        L = pg.span(F, [x, y])
        if all(form.eval(c) for c in pg.points_of(F, L)):
            if skip == 0:
                return pg.join(F, hyp, L)
            skip -= 1
    raise ConfigurationFailed("no anisotropic line found")


def disjoint_hyperbolic_lines(form, A: pg.Subspace, k: int) -> list[pg.Subspace]:
    """The first k pairwise disjoint hyperbolic lines of A, greedy in canonical order."""
    F = form.F
    pts = sorted(pg.points_of(F, A))
    lines: list[pg.Subspace] = []
    for x, y in itertools.combinations(pts, 2):
        L = pg.span(F, [x, y])
        if not _is_hyperbolic_line(form, L):
            continue
        if all(pg.meet(F, L, M).projdim == -1 for M in lines):
            lines.append(L)
            if len(lines) == k:
                return lines
    raise ConfigurationFailed(f"fewer than {k} disjoint hyperbolic lines")


def _ambient_bits(big: PolarSpace, S: PointSet) -> int:
    return bits_of(big.point_id(S.space.to_ambient(i)) for i in iter_bits(S.bits))


def _section_id(Q: PolarSpace, v) -> int:
    return Q.point_id(iso.coords_in(Q.F, Q.embedding, v))


def _subspace_json(A: pg.Subspace) -> list:
    return [list(r) for r in A.basis]


# -- disjointness report ---------------------------------------------------------

@dataclass
class Check:
    name: str
    ok: bool
    witness: tuple | None = None


@dataclass
class DisjointReport:
    checks: list[Check]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "checks": [{"name": c.name, "ok": c.ok, "witness": list(c.witness) if c.witness else None} for c in self.checks],
        }


def why_disjoint_check(big: PolarSpace, O1: int, O2: int, Q1: int, Q2: int, Phi: iso.Collineation) -> DisjointReport:
    """Check each inclusion behind O1 ∩ O2 = ∅, on ambient bitsets of Q+(7, q).

    Phi(O1) and O2 partition Q2; O1 ∩ Q2 lies in Q1 ∩ Q2 where Phi is the
    identity, so O1 ∩ Q2 ⊆ Phi(O1) and O1 misses O2.
    """
    def witness(bits):
        return None if not bits else big.points[next(iter_bits(bits))]

    img = bits_of(big.point_id(Phi.apply(big.points[i])) for i in iter_bits(O1))
    common = Q1 & Q2
    moved = 0
    for i in iter_bits(common):
        if Phi.apply(big.points[i]) != big.points[i]:
            moved |= 1 << i
    checks = []
    for name, bad in (
        ("Phi(O1) ⊆ Q2", img & ~Q2),
        ("O2 ⊆ Q2", O2 & ~Q2),
        ("Phi(O1) ∩ O2 = ∅", img & O2),
        ("Q2 ⊆ Phi(O1) ∪ O2", Q2 & ~(img | O2)),
        ("O1 ∩ Q2 ⊆ Q1 ∩ Q2", O1 & Q2 & ~common),
        ("Phi fixes Q1 ∩ Q2", moved),
        ("O1 ∩ Q2 ⊆ Phi(O1)", O1 & Q2 & ~img),
        ("O1 ∩ O2 = ∅", O1 & O2),
    ):
        checks.append(Check(name, not bad, witness(bad)))
    return DisjointReport(checks)


# -- glue construction ---------------------------------------------------------

@dataclass
class GlueReport:
    q: int
    pi: pg.Subspace
    pi1: pg.Subspace
    pi2: pg.Subspace
    Phi: iso.Collineation
    O1: PointSet
    O2: PointSet
    union: PointSet
    certificates: dict[str, OvoidCertificate]
    disjoint: DisjointReport
    seed: int = 0

    @property
    def ok(self) -> bool:
        return self.disjoint.ok and all(c.ok for c in self.certificates.values())

    def manifest(self) -> dict:
        return {
            "construction": "glue",
            "q": self.q,
            "seed": self.seed,
            "pi": _subspace_json(self.pi),
            "pi1": _subspace_json(self.pi1),
            "pi2": _subspace_json(self.pi2),
            "Phi": self.Phi.to_json(),
            "disjointness": self.disjoint.to_json(),
            "ok": self.ok,
            "one_system_provenance": UNVERIFIED,
        }

    def files(self) -> dict[str, dict]:
        return {
            "o1.json": ovoid_payload(self.O1, (self.q + 1) // 2),
            "o2.json": ovoid_payload(self.O2, (self.q + 1) // 2),
            "union.json": ovoid_payload(self.union, self.q + 1),
            "cert_o1.json": self.certificates["o1"].to_json(),
            "cert_o2.json": self.certificates["o2"].to_json(),
            "cert_union.json": self.certificates["union"].to_json(),
        }


def glue_construct(q: int = 3, seed: int = 0, budget: int = DEFAULT_BUDGET, stretch: bool = False,
                   threads: int | None = None) -> GlueReport:
    """(q+1)-ovoid of Q+(7, q) glued from two (q+1)/2-ovoids in elliptic 5-sections."""
    if q != 3 and not (stretch and q == 5):
        raise ConfigurationFailed("glue_construct runs at q = 3; q = 5 needs stretch=True")
    F = gf_field(q)
    form = standard_form(f"Q+:7:{q}", F)
    pi = elliptic_3space(form)
    l1, l2 = disjoint_hyperbolic_lines(form, perp(form, pi), 2)
    pi1, pi2 = pg.join(F, pi, l1), pg.join(F, pi, l2)
    for A in (pi1, pi2):
        if A.projdim != 5 or not _is_elliptic(form, A):
            raise ConfigurationFailed("span of pi and a hyperbolic line is not an elliptic 5-space")
    if pg.meet(F, pi1, pi2) != pi:
        raise ConfigurationFailed("pi1 ∩ pi2 is not pi")

    Phi = iso.map_elliptic_5space(form, pi, pi1, pi2)

    Q1 = section_space(form, pi1, label=f"Q-:5:{q}")
    Q2 = section_space(form, pi2, label=f"Q-:5:{q}")
    half = (q + 1) // 2
    O1 = find_m_ovoid(Q1, half, budget=budget, seed=seed)

    ids = []
    for i in iter_bits(O1.bits):
        v = Phi.apply(Q1.to_ambient(i))
        if not pg.contains(F, pi2, v):
            raise DisjointnessFailure(f"Phi moves {Q1.to_ambient(i)} outside pi2")
        ids.append(_section_id(Q2, v))
    O2 = PointSet(Q2, Q2.all_bits & ~bits_of(ids))

    big = hyperbolic_space(q)
    b1, b2 = _ambient_bits(big, O1), _ambient_bits(big, O2)
    q1_bits, q2_bits = big.bits_of_subspace(pi1), big.bits_of_subspace(pi2)
    report = why_disjoint_check(big, b1, b2, q1_bits, q2_bits, Phi)
    if not report.ok:
        bad = next(c for c in report.checks if not c.ok)
        raise DisjointnessFailure(f"{bad.name} fails at {bad.witness}")
    union = PointSet(big, b1 | b2)
    certs = {
        "o1": verify_m_ovoid(O1, threads=threads),
        "o2": verify_m_ovoid(O2, threads=threads),
        "union": verify_m_ovoid(union, threads=threads),
    }
    return GlueReport(q, pi, pi1, pi2, Phi, O1, O2, union, certs, report, seed)


# -- five disjoint 2-ovoids of Q+(7, 3) ------------------------------------------

@dataclass
class DisjointFamily:
    sigma: pg.Subspace
    lines: list[pg.Subspace]
    spaces: list[pg.Subspace]
    pairs: list[tuple]
    ovoids: list[PointSet]
    certificates: list[OvoidCertificate]
    census: tuple
    seed: int = 0

    @property
    def ok(self) -> bool:
        return all(c.ok and c.m == 2 for c in self.certificates) and self.pairwise_disjoint()

    def pairwise_disjoint(self) -> bool:
        return all(not (a.bits & b.bits) for a, b in itertools.combinations(self.ovoids, 2))

    def manifest(self) -> dict:
        return {
            "construction": "disjoint-family",
            "q": 3,
            "seed": self.seed,
            "sigma": _subspace_json(self.sigma),
            "lines": [_subspace_json(L) for L in self.lines],
            "spaces": [_subspace_json(A) for A in self.spaces],
            "pairs": [[list(P), list(R)] for P, R in self.pairs],
            "spread_census": {"external": self.census[0], "tangent": self.census[1], "bisecant": self.census[2]},
            "pairwise_disjoint": self.pairwise_disjoint(),
            "ok": self.ok,
        }

    def files(self) -> dict[str, dict]:
        out = {}
        for i, (S, c) in enumerate(zip(self.ovoids, self.certificates), 1):
            out[f"o{i}.json"] = ovoid_payload(S, 2)
            out[f"cert_o{i}.json"] = c.to_json()
        return out


def tangent_free_lines(form, A: pg.Subspace) -> tuple[list[pg.Subspace], tuple]:
    """The 2-secants of the char-3 spread carried into the elliptic 3-space A.

    A similarity between the form on A and X0X1 + X2^2 + X3^2 moves the spread;
    returns the bisecant lines (ambient) and the census of the moved spread.
    """
    F = form.F
    g = form.restrict(A.basis)
    ref = klein.case1_quadric(F)
    try:
        T = iso.form_isometry(g, ref)
    except GramMismatch as exc:
        raise ConfigurationFailed(f"A is not similar to the reference quadric: {exc}") from None
    spread = klein.char3_spread(F)
    census = klein.spread_census(spread, ref)
    moved = []
    for L in spread.lines:
        rows = [linalg.matvec(F, T, r) for r in L.basis]
        amb = [iso._combine(F, A.basis, z) for z in rows]
        moved.append(pg.subspace(F, amb, form.n))
    counts = [0, 0, 0]
    bisecants = []
    for L in moved:
        k = sum(1 for c in pg.points_of(F, L) if form.eval(c) == 0)
        counts[k] += 1
        if k == 2:
            bisecants.append(L)
    if tuple(counts) != census:
        raise ConfigurationFailed(f"moved spread census {tuple(counts)} differs from {census}")
    return bisecants, census


def five_disjoint_2ovoids(seed: int = 0, budget: int = DEFAULT_BUDGET, threads: int | None = None) -> DisjointFamily:
    q = 3
    F = gf_field(q)
    form = standard_form("Q+:7:3", F)
    sigma = elliptic_3space(form)
    sp = perp(form, sigma)
    if not _is_elliptic(form, sp):
        raise ConfigurationFailed("sigma^perp is not elliptic")
    lines, census = tangent_free_lines(form, sp)
    if len(lines) != 5 or census[1] != 0:
        raise ConfigurationFailed(f"spread census {census} has tangents or too few 2-secants")
    spaces = [pg.join(F, sigma, L) for L in lines]
    for A in spaces:
        if A.projdim != 5 or not _is_elliptic(form, A):
            raise ConfigurationFailed("pi_i is not an elliptic 5-space")
    for A, B in itertools.combinations(spaces, 2):
        if pg.meet(F, A, B) != sigma:
            raise ConfigurationFailed("pi_i ∩ pi_j is not sigma")

    sig_pts = sorted(c for c in pg.points_of(F, sigma) if form.eval(c) == 0)
    if len(sig_pts) != q * q + 1:
        raise ConfigurationFailed(f"sigma carries {len(sig_pts)} quadric points")
    pairs = [(sig_pts[2 * i], sig_pts[2 * i + 1]) for i in range(5)]

    big = hyperbolic_space(q)
    sig_bits = big.bits_of_subspace(sigma)
    ovoids, certs = [], []
    for i, (A, (P, R)) in enumerate(zip(spaces, pairs), 1):
        Q = section_space(form, A, label="Q-:5:3")
        inc = bits_of(_section_id(Q, c) for c in (P, R))
        exc = bits_of(_section_id(Q, c) for c in sig_pts if c not in (P, R))
        try:
            O = find_m_ovoid(Q, 2, include=inc, exclude=exc, budget=budget, seed=seed)
        except (SearchExhausted, BudgetExhausted) as err:
            raise SearchFailed(str(err), i) from None
        S = PointSet(big, _ambient_bits(big, O))
        want = bits_of(big.point_id(c) for c in (P, R))
        if S.bits & sig_bits != want:
            raise SearchFailed("ovoid meets sigma outside its pair", i)
        ovoids.append(S)
        certs.append(verify_m_ovoid(S, threads=threads))
    fam = DisjointFamily(sigma, lines, spaces, pairs, ovoids, certs, census, seed)
    if not fam.pairwise_disjoint():
        raise DisjointnessFailure("the five 2-ovoids are not pairwise disjoint")
    return fam


def m_ovoids_q3(m: int, family: DisjointFamily | None = None, seed: int = 0,
                threads: int | None = None) -> tuple[PointSet, OvoidCertificate]:
    """Union of the first m/2 members of the disjoint family, verified."""
    if m not in (2, 4, 6, 8, 10):
        raise ValueError("m must be one of 2, 4, 6, 8, 10")
    if family is None:
        family = five_disjoint_2ovoids(seed=seed, threads=threads)
    bits = 0
    for S in family.ovoids[: m // 2]:
        if bits & S.bits:
            raise DisjointnessFailure("family members overlap")
        bits |= S.bits
    U = PointSet(family.ovoids[0].space, bits)
    return U, verify_m_ovoid(U, threads=threads)


# -- output bundles -----------------------------------------------------------

def dumps(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def config_hash(config: dict) -> str:
    return hashlib.sha256(json.dumps(config, sort_keys=True).encode()).hexdigest()[:16]


def run_manifest(command: str, config: dict, seed: int, **extra) -> dict:
    out = {"tool": "polarforge", "version": __version__, "command": command, "seed": seed,
           "config": config, "config_hash": config_hash(config)}
    out.update(extra)
    return out


def write_bundle(directory, manifest: dict, files: dict[str, dict]) -> list[str]:
    os.makedirs(directory, exist_ok=True)
    written = []
    for name, payload in sorted(files.items()) + [("manifest.json", manifest)]:
        path = os.path.join(directory, name)
        with open(path, "w") as fh:
            fh.write(dumps(payload))
        written.append(path)
    return written
