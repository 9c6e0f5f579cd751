"""Independent brute-force checks used by the test-suite.

Nothing here calls the code paths it is meant to check: the generator
oracle grows totally singular subspaces level by level with a global
dedupe set, the point counts come from plain loops over all vectors.
"""

from __future__ import annotations

import itertools


def prime_field_points(n, q):
    """Normalized points of PG(n, q) for prime q, by plain loops."""
    out = []
    for v in itertools.product(range(q), repeat=n + 1):
        if any(v):
            lead = next(a for a in v if a)
            if lead == 1:
                out.append(v)
    return out


def quad_value(terms, v, q):
    return sum(c * v[i] * v[j] for (i, j), c in terms.items()) % q


def generators_by_extension(points, perp_bits, line_points, rank):
    """All maximal totally singular subspaces, as point bitsets.

    points: number of points; perp_bits[i]: bitset of points perpendicular to i;
    line_points(i, j) -> iterable of point indices on the line through i and j.
    """
    line_cache = {}

    def line(i, j):
        key = (i, j) if i < j else (j, i)
        if key not in line_cache:
            b = 0
            for k in line_points(*key):
                b |= 1 << k
            line_cache[key] = b
        return line_cache[key]

    def members(bits):
        out = []
        while bits:
            low = bits & -bits
            out.append(low.bit_length() - 1)
            bits ^= low
        return out

    level = {1 << i for i in range(points)}
    for _ in range(rank - 1):
        nxt = set()
        for U in level:
            pts = members(U)
            common = ~0
            for u in pts:
                common &= perp_bits[u]
            cand = common & ~U
            while cand:
                low = cand & -cand
                c = low.bit_length() - 1
                W = U | low
                for u in pts:
                    W |= line(u, c)
                # closure: the span of U and c is covered by lines through c
                nxt.add(W)
                cand &= ~W
        level = nxt
    return level


def polar_incidence(terms, n, q):
    """Singular points, perp bitsets and a line-points function for a prime-field quadric.

    Everything is plain integer arithmetic mod q on the monomial dict
    {(i, j): c}, independent of the package's field tables and Gram matrices.
    """
    pts = [v for v in prime_field_points(n, q) if quad_value(terms, v, q) == 0]
    index = {v: i for i, v in enumerate(pts)}

    def polar(u, v):
        s = 0
        for (i, j), c in terms.items():
            s += c * (u[i] * v[j] + u[j] * v[i])
        return s % q

    perp_bits = []
    for u in pts:
        b = 0
        for k, v in enumerate(pts):
            if polar(u, v) == 0:
                b |= 1 << k
        perp_bits.append(b)

    def normalize(v):
        lead = next(a for a in v if a)
        inv = pow(lead, q - 2, q)
        return tuple(a * inv % q for a in v)

    def line_points(i, j):
        u, v = pts[i], pts[j]
        out = [i]
        for t in range(q):
            out.append(index[normalize(tuple((t * a + b) % q for a, b in zip(u, v)))])
        return out

    return pts, perp_bits, line_points
