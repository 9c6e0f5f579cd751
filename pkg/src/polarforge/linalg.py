"""Dense linear algebra over a FieldCtx. Vectors are tuples, matrices lists of rows."""

from __future__ import annotations

from .errors import DimensionMismatch, DivisionByZero
from .gf import FieldCtx


def rref(F: FieldCtx, rows) -> tuple[list[tuple], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    mul, sub, inv = F.mul_table, F.sub_table, F.inv_table
    m = [list(r) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        s = inv[m[r][c]]
        if s != 1:
            m[r] = [mul[s][x] for x in m[r]]
        row = m[r]
        for i in range(len(m)):
            if i != r:
                a = m[i][c]
                if a:
                    mi = m[i]
                    m[i] = [sub[x][mul[a][y]] for x, y in zip(mi, row)]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return [tuple(row) for row in m[:r]], pivots


def rank(F: FieldCtx, rows) -> int:
    return len(rref(F, rows)[0])


def nullspace(F: FieldCtx, rows, ncols: int | None = None) -> list[tuple]:
    """Basis of {x : row . x = 0 for every row}."""
    rows = list(rows)
    if ncols is None:
        if not rows:
            raise DimensionMismatch("cannot infer width of an empty matrix")
        ncols = len(rows[0])
    R, pivots = rref(F, rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * ncols
        v[fc] = 1
        for row, pc in zip(R, pivots):
            v[pc] = F.neg(row[fc])
        basis.append(tuple(v))
    return basis


def transpose(M) -> list[tuple]:
    return [tuple(col) for col in zip(*M)]


def matmul(F: FieldCtx, A, B) -> list[tuple]:
    Bt = transpose(B)
    if A and len(A[0]) != len(Bt[0] if Bt else ()):
        raise DimensionMismatch("inner dimensions differ")
    return [tuple(F.dot(row, col) for col in Bt) for row in A]


def matvec(F: FieldCtx, M, v) -> tuple:
    return tuple(F.dot(row, v) for row in M)


def identity(n: int) -> list[tuple]:
    return [tuple(1 if i == j else 0 for j in range(n)) for i in range(n)]


def scale_matrix(F: FieldCtx, c: int, M) -> list[tuple]:
    return [tuple(F.mul(c, x) for x in row) for row in M]


def inverse(F: FieldCtx, M) -> list[tuple]:
    n = len(M)
    aug = [list(M[i]) + [1 if i == j else 0 for j in range(n)] for i in range(n)]
    R, pivots = rref(F, aug)
    if len(R) < n or pivots[n - 1] != n - 1:
        raise DivisionByZero("matrix is singular")
    return [tuple(row[n:]) for row in R]


def det(F: FieldCtx, M) -> int:
    n = len(M)
    m = [list(r) for r in M]
    d = 1
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c]), None)
        if piv is None:
            return 0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            d = F.neg(d)
        d = F.mul(d, m[c][c])
        s = F.inv(m[c][c])
        for i in range(c + 1, n):
            a = F.mul(m[i][c], s)
            if a:
                m[i] = [F.sub(x, F.mul(a, y)) for x, y in zip(m[i], m[c])]
    return d


def bilinear(F: FieldCtx, M, u, v) -> int:
    """u^T M v."""
    return F.dot(u, matvec(F, M, v))


def vec_add(F: FieldCtx, u, v) -> tuple:
    add = F.add_table
    return tuple(add[a][b] for a, b in zip(u, v))


def vec_scale(F: FieldCtx, c: int, u) -> tuple:
    mul = F.mul_table
    return tuple(mul[c][a] for a in u)


def normalize(F: FieldCtx, v) -> tuple:
    """Scale so the first nonzero coordinate is 1."""
    for a in v:
        if a:
            if a == 1:
                return tuple(v)
            return vec_scale(F, F.inv_table[a], v)
    raise DivisionByZero("zero vector has no projective point")


def span_vectors(F: FieldCtx, basis) -> list[tuple]:
    """All q^k vectors of the span of k independent vectors, zero first."""
    n = len(basis[0]) if basis else 0
    vecs = [tuple([0] * n)]
    add, mul = F.add_table, F.mul_table
    for b in basis:
        new = []
        for c in range(1, F.q):
            cb = [mul[c][x] for x in b]
            for v in vecs:
                new.append(tuple(add[x][y] for x, y in zip(v, cb)))
        vecs.extend(new)
    return vecs


def span_points(F: FieldCtx, basis) -> list[tuple]:
    """Normalized representatives of the projective points of span(basis)."""
    out = []
    n = len(basis[0]) if basis else 0
    vecs = [tuple([0] * n)]
    add, mul = F.add_table, F.mul_table
    for b in basis:
        # points whose last nonzero basis coefficient is on b, with that coefficient 1
        for v in vecs:
            out.append(tuple(add[x][y] for x, y in zip(v, b)))
        new = []
        for c in range(1, F.q):
            cb = [mul[c][x] for x in b]
            for v in vecs:
                new.append(tuple(add[x][y] for x, y in zip(v, cb)))
        vecs.extend(new)
    return [normalize(F, v) for v in out]
