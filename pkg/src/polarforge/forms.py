"""Quadratic and alternating forms over GF(q), q odd.

A quadratic form is stored by its symmetric Gram matrix S with
f(x) = x^T S x; its polar form is B(x, y) = f(x+y) - f(x) - f(y) = 2 x^T S y.
Everything that needs "orthogonality" goes through ``perp_matrix``, which
is 2S for a quadratic form and M itself for an alternating form.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import linalg
from . import projgeom as pg
from .errors import DegenerateForm, DimensionMismatch, GeometryError, IncompatibleDimension
from .gf import FieldCtx, field

TYPES = ("Q+", "Q", "Q-", "W")


def polar_point_count(r: int, e: int, q: int) -> int:
    """Number of points of a polar space of rank r and parameter e."""
    if r <= 0:
        return 0
    return (q ** r - 1) * (q ** (r + e - 1) + 1) // (q - 1)


def generator_count(r: int, e: int, q: int) -> int:
    out = 1
    for i in range(r):
        out *= q ** (i + e) + 1
    return out


@dataclass(frozen=True)
class SpaceSpec:
    type: str
    n: int
    q: int

    def __post_init__(self):
        if self.type not in TYPES:
            raise GeometryError(f"unknown polar space type {self.type!r}")
        odd = self.n % 2 == 1
        if (self.type == "Q") == odd or self.n < 1:
            raise IncompatibleDimension(f"{self.type} needs {'even' if self.type == 'Q' else 'odd'} n, got {self.n}")

    @classmethod
    def parse(cls, text: str) -> SpaceSpec:
        m = re.fullmatch(r"\s*(Q\+|Q-|Q|W)\s*:\s*(\d+)\s*:\s*(\d+)\s*", text)
        if not m:
            raise GeometryError(f"bad space spec {text!r}; expected TYPE:projdim:q")
        return cls(m.group(1), int(m.group(2)), int(m.group(3)))

    @property
    def rank(self) -> int:
        return {"Q+": (self.n + 1) // 2, "Q": self.n // 2, "Q-": (self.n - 1) // 2, "W": (self.n + 1) // 2}[self.type]

    @property
    def e(self) -> int:
        return {"Q+": 0, "Q": 1, "Q-": 2, "W": 1}[self.type]

    def __str__(self) -> str:
        return f"{self.type}:{self.n}:{self.q}"


class _Form:
    F: FieldCtx
    n: int

    def _check(self, v):
        if len(v) != self.n + 1:
            raise DimensionMismatch(f"expected {self.n + 1} coordinates, got {len(v)}")

    def pair(self, u, v) -> int:
        u, v = _coords(u), _coords(v)
        self._check(u)
        self._check(v)
        return linalg.bilinear(self.F, self.perp_matrix, u, v)

    def is_nondegenerate(self) -> bool:
        return linalg.det(self.F, self.perp_matrix) != 0

    def pair_table(self, X: np.ndarray, Y: np.ndarray | None = None) -> np.ndarray:
        """Matrix of pair values between rows of X and rows of Y (encodings)."""
        F = self.F
        if Y is None:
            Y = X
        M = np.array(self.perp_matrix, dtype=np.int32)
        # Z = Y M^T so that pair(x, y) = sum_k x_k Z_k
        Z = np.zeros_like(Y)
        for k in range(self.n + 1):
            for j in range(self.n + 1):
                if M[k, j]:
                    Z[:, k] = F.add_np[Z[:, k], F.mul_np[M[k, j], Y[:, j]]]
        out = np.zeros((X.shape[0], Y.shape[0]), dtype=np.int32)
        for k in range(self.n + 1):
            out = F.add_np[out, F.mul_np[X[:, k][:, None], Z[:, k][None, :]]]
        return out


def _coords(P):
    return P.coords if isinstance(P, pg.ProjPoint) else tuple(P)


@dataclass(frozen=True, eq=False)
class QuadraticForm(_Form):
    F: FieldCtx
    gram: tuple
    label: str = ""
    _upper: tuple = dc_field(default=(), repr=False)

    def __post_init__(self):
        g = tuple(tuple(int(a) for a in row) for row in self.gram)
        if any(len(row) != len(g) for row in g):
            raise DimensionMismatch("Gram matrix must be square")
        if any(g[i][j] != g[j][i] for i in range(len(g)) for j in range(len(g))):
            raise GeometryError("Gram matrix must be symmetric")
        object.__setattr__(self, "gram", g)
        two = self.F.from_int(2)
        upper = []
        for i in range(len(g)):
            for j in range(i, len(g)):
                c = g[i][i] if i == j else self.F.mul(two, g[i][j])
                if c:
                    upper.append((i, j, c))
        object.__setattr__(self, "_upper", tuple(upper))

    @property
    def n(self) -> int:
        return len(self.gram) - 1

    @property
    def kind(self) -> str:
        return "quadratic"

    @classmethod
    def from_terms(cls, F: FieldCtx, n: int, terms: dict, label: str = "") -> QuadraticForm:
        """Build from monomial coefficients {(i, j): c} (field encodings) meaning sum c X_i X_j."""
        half = F.inv(F.from_int(2))
        S = [[0] * (n + 1) for _ in range(n + 1)]
        for (i, j), c in terms.items():
            if i == j:
                S[i][i] = F.add(S[i][i], c)
            else:
                h = F.mul(half, c)
                S[i][j] = F.add(S[i][j], h)
                S[j][i] = F.add(S[j][i], h)
        return cls(F, tuple(map(tuple, S)), label)

    @property
    def perp_matrix(self) -> tuple:
        two = self.F.from_int(2)
        return tuple(tuple(self.F.mul(two, a) for a in row) for row in self.gram)

    def polar(self) -> BilinearForm:
        return BilinearForm(self.F, self.perp_matrix, "symmetric")

    def eval(self, P) -> int:
        x = _coords(P)
        self._check(x)
        mul, add = self.F.mul_table, self.F.add_table
        acc = 0
        for i, j, c in self._upper:
            a, b = x[i], x[j]
            if a and b:
                acc = add[acc][mul[c][mul[a][b]]]
        return acc

    def is_singular(self, P) -> bool:
        return self.eval(P) == 0

    def values(self, X: np.ndarray) -> np.ndarray:
        F = self.F
        acc = np.zeros(X.shape[0], dtype=np.int32)
        for i, j, c in self._upper:
            acc = F.add_np[acc, F.mul_np[c, F.mul_np[X[:, i], X[:, j]]]]
        return acc

    def singular_mask(self, X: np.ndarray) -> np.ndarray:
        return self.values(X) == 0

    def restrict(self, basis) -> QuadraticForm:
        """Induced form in the coordinates of the given basis rows."""
        B = [tuple(r) for r in basis]
        G = linalg.matmul(self.F, linalg.matmul(self.F, B, self.gram), linalg.transpose(B))
        return QuadraticForm(self.F, tuple(G))

    def scaled(self, c: int) -> QuadraticForm:
        return QuadraticForm(self.F, tuple(linalg.scale_matrix(self.F, c, self.gram)), self.label)

    def __eq__(self, other):
        return isinstance(other, QuadraticForm) and other.F == self.F and other.gram == self.gram

    def __hash__(self):
        return hash((self.F, self.gram))


@dataclass(frozen=True, eq=False)
class BilinearForm(_Form):
    F: FieldCtx
    matrix: tuple
    kind_: str = "symmetric"
    label: str = ""

    def __post_init__(self):
        M = tuple(tuple(int(a) for a in row) for row in self.matrix)
        object.__setattr__(self, "matrix", M)
        n = len(M)
        if any(len(row) != n for row in M):
            raise DimensionMismatch("matrix must be square")
        if self.kind_ == "symmetric":
            if any(M[i][j] != M[j][i] for i in range(n) for j in range(n)):
                raise GeometryError("symmetric form needs M = M^T")
        elif self.kind_ == "alternating":
            if any(M[i][i] for i in range(n)) or any(
                M[i][j] != self.F.neg(M[j][i]) for i in range(n) for j in range(n)
            ):
                raise GeometryError("alternating form needs M = -M^T with zero diagonal")
        else:
            raise GeometryError(f"unknown bilinear kind {self.kind_!r}")

    @property
    def n(self) -> int:
        return len(self.matrix) - 1

    @property
    def kind(self) -> str:
        return self.kind_

    @property
    def perp_matrix(self) -> tuple:
        return self.matrix

    def is_singular(self, P) -> bool:
        """Isotropy: B(x, x) = 0."""
        x = _coords(P)
        return self.pair(x, x) == 0

    def singular_mask(self, X: np.ndarray) -> np.ndarray:
        if self.kind_ == "alternating":
            return np.ones(X.shape[0], dtype=bool)
        vals = np.zeros(X.shape[0], dtype=np.int32)
        F = self.F
        for i in range(self.n + 1):
            for j in range(self.n + 1):
                c = self.matrix[i][j]
                if c:
                    vals = F.add_np[vals, F.mul_np[c, F.mul_np[X[:, i], X[:, j]]]]
        return vals == 0

    def restrict(self, basis) -> BilinearForm:
        B = [tuple(r) for r in basis]
        G = linalg.matmul(self.F, linalg.matmul(self.F, B, self.matrix), linalg.transpose(B))
        return BilinearForm(self.F, tuple(G), self.kind_)

    def __eq__(self, other):
        return isinstance(other, BilinearForm) and other.F == self.F and other.matrix == self.matrix

    def __hash__(self):
        return hash((self.F, self.matrix, self.kind_))


Form = QuadraticForm | BilinearForm


def standard_form(spec: SpaceSpec | str, F: FieldCtx | None = None) -> QuadraticForm | BilinearForm:
    """Canonical form for a space spec.

    Q+ pairs X_i with X_{n-i}; Q and Q- use hyperbolic pairs X_0X_1, X_2X_3, ...
    followed by X_n^2 (parabolic) or the anisotropic X_{n-1}^2 - a X_n^2 with a
    the smallest non-square.
    """
    if isinstance(spec, str):
        spec = SpaceSpec.parse(spec)
    if F is None:
        F = field(spec.q)
    if F.q != spec.q:
        raise GeometryError("field does not match the space spec")
    n, t = spec.n, spec.type
    label = str(spec)
    if t == "W":
        M = [[0] * (n + 1) for _ in range(n + 1)]
        for i in range(0, n, 2):
            M[i][i + 1] = 1
            M[i + 1][i] = F.neg(1)
        return BilinearForm(F, tuple(map(tuple, M)), "alternating", label)
    terms = {}
    if t == "Q+":
        for i in range((n + 1) // 2):
            terms[(i, n - i)] = 1
    elif t == "Q":
        for i in range(0, n - 1, 2):
            terms[(i, i + 1)] = 1
        terms[(n, n)] = 1
    else:
        for i in range(0, n - 2, 2):
            terms[(i, i + 1)] = 1
        alpha = F.nonsquare
        terms[(n - 1, n - 1)] = 1
        terms[(n, n)] = F.neg(alpha)
        # X^2 - a Y^2 has a root iff a is a square
        if F.is_square(alpha):
            raise GeometryError("anisotropic part is reducible")
    return QuadraticForm.from_terms(F, n, terms, label)


# -- perps, radicals, sections ----------------------------------------------

def perp(form, A: pg.Subspace) -> pg.Subspace:
    if not form.is_nondegenerate():
        raise DegenerateForm("perp requires a non-degenerate form")
    return perp_any(form, A)


def perp_any(form, A: pg.Subspace) -> pg.Subspace:
    """A^perp without the non-degeneracy check."""
    F = form.F
    if not A.basis:
        return pg.whole_space(form.n)
    rows = linalg.matmul(F, list(A.basis), form.perp_matrix)
    kern = linalg.nullspace(F, rows, form.n + 1)
    if not kern:
        return pg.empty_subspace(form.n)
    return pg.subspace(F, kern, form.n)


def radical(form, A: pg.Subspace) -> pg.Subspace:
    """Radical of the form induced on A, as a subspace of the ambient space."""
    F = form.F
    if not A.basis:
        return pg.empty_subspace(form.n)
    B = list(A.basis)
    G = linalg.matmul(F, linalg.matmul(F, B, form.perp_matrix), linalg.transpose(B))
    kern = linalg.nullspace(F, G, len(B))
    if not kern:
        return pg.empty_subspace(form.n)
    vecs = [tuple(F.dot(z, col) for col in linalg.transpose(B)) for z in kern]
    return pg.subspace(F, vecs, form.n)


@dataclass(frozen=True)
class SectionClass:
    radical_dim: int
    base_type: str
    base_dim: int
    num_points: int


def cone_count(radical_dim: int, base_points: int, q: int) -> int:
    """Points of a cone with a radical_dim vertex over a base with base_points points."""
    return (q ** (radical_dim + 1) - 1) // (q - 1) + q ** (radical_dim + 1) * base_points


def base_count(base_type: str, t: int, q: int) -> int:
    """Point count of a non-degenerate polar space of the given type in PG(t, q)."""
    if t < 0:
        return 0
    if base_type == "hyperbolic":
        return polar_point_count((t + 1) // 2, 0, q)
    if base_type == "elliptic":
        return polar_point_count((t - 1) // 2, 2, q)
    if base_type == "parabolic":
        return polar_point_count(t // 2, 1, q)
    if base_type == "symplectic":
        return pg.num_points(t, q)
    raise GeometryError(base_type)


def section_point_count(form, A: pg.Subspace) -> int:
    if not A.basis:
        return 0
    X = np.array(linalg.span_points(form.F, A.basis), dtype=np.int32)
    return int(form.singular_mask(X).sum())


def classify_section(form, A: pg.Subspace) -> SectionClass:
    """Cone type of form ∩ A, decided by counting points of the section."""
    q = form.F.q
    rad = radical(form, A)
    d = rad.projdim
    t = A.projdim - d - 1
    count = section_point_count(form, A)
    if form.kind == "alternating":
        base = "symplectic"
        candidates = ["symplectic"]
    elif t < 0:
        # totally singular: empty base, treated as Q+(-1)
        candidates = ["hyperbolic"]
    elif t % 2 == 0:
        candidates = ["parabolic"]
    else:
        candidates = ["hyperbolic", "elliptic"]
    for base in candidates:
        if cone_count(d, base_count(base, t, q), q) == count:
            return SectionClass(d, base, t, count)
    raise GeometryError(f"section count {count} fits no cone over a rank-{t} base")


def is_totally_singular(form, A: pg.Subspace) -> bool:
    F = form.F
    B = list(A.basis)
    if not B:
        return True
    if form.kind == "quadratic":
        if any(form.eval(b) for b in B):
            return False
    G = linalg.matmul(F, linalg.matmul(F, B, form.perp_matrix), linalg.transpose(B))
    return all(a == 0 for row in G for a in row)
