"""Arithmetic in GF(q), q an odd prime power, via full lookup tables.

Elements are integers in ``range(q)``; the base-p digits of an element
(little-endian) are the coefficients of its polynomial representative
modulo the field's defining polynomial.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from .errors import DivisionByZero, FieldError

# Conway polynomials, little-endian coefficient lists (monic).
DEFAULT_MODULI = {
    9: [2, 2, 1],
    27: [1, 2, 0, 1],
    81: [2, 0, 0, 2, 1],
    25: [2, 4, 1],
    125: [2, 3, 0, 1],
    49: [3, 6, 1],
    121: [7, 7, 1],
    169: [2, 12, 1],
}

MAX_Q = 1024


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def factor_prime_power(q: int) -> tuple[int, int]:
    """Return (p, h) with q = p**h, or raise FieldError."""
    if q < 2:
        raise FieldError(f"{q} is not a prime power")
    p = next(d for d in range(2, q + 1) if q % d == 0)
    if not _is_prime(p):
        raise FieldError(f"{q} is not a prime power")
    h, r = 0, q
    while r % p == 0:
        r //= p
        h += 1
    if r != 1:
        raise FieldError(f"{q} is not a prime power")
    return p, h


def _poly_mod(a: list[int], m: list[int], p: int) -> list[int]:
    a = list(a)
    dm = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) - 1 >= dm and any(a):
        while a and a[-1] == 0:
            a.pop()
        if len(a) - 1 < dm:
            break
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - dm
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mi) % p
        a.pop()
    while a and a[-1] == 0:
        a.pop()
    return a


def is_irreducible(modulus: list[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..h//2."""
    h = len(modulus) - 1
    if h < 1 or modulus[-1] % p == 0:
        return False
    if h == 1:
        return True
    for d in range(1, h // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            if _poly_mod(modulus, list(low) + [1], p) == []:
                return False
    return True


class FieldCtx:
    """GF(q) for odd q with precomputed add/mul/inverse/log tables.

    Immutable after construction. ``modulus`` overrides the default
    defining polynomial (little-endian coefficients, monic, degree h).
    """

    def __init__(self, q: int, modulus: list[int] | None = None):
        p, h = factor_prime_power(q)
        if p == 2:
            raise FieldError("even characteristic is not supported")
        if q > MAX_Q:
            raise FieldError(f"q={q} exceeds the supported maximum {MAX_Q}")
        self.p, self.h, self.q = p, h, q
        if modulus is None:
            modulus = DEFAULT_MODULI.get(q) if h > 1 else [0, 1]
            if modulus is None:
                modulus = self._first_irreducible()
        modulus = [int(c) % p for c in modulus]
        if len(modulus) != h + 1 or modulus[-1] != 1:
            raise FieldError(f"modulus must be monic of degree {h}")
        if not is_irreducible(modulus, p):
            raise FieldError(f"modulus {modulus} is reducible over GF({p})")
        self.modulus = modulus
        self._build_tables()

    def _first_irreducible(self) -> list[int]:
        for low in itertools.product(range(self.p), repeat=self.h):
            cand = list(reversed(low)) + [1]
            if is_irreducible(cand, self.p):
                return cand
        raise FieldError("no irreducible polynomial found")  # unreachable

    def _digits(self, a: int) -> list[int]:
        out = []
        for _ in range(self.h):
            out.append(a % self.p)
            a //= self.p
        return out

    def _encode(self, coeffs: list[int]) -> int:
        v = 0
        for c in reversed(coeffs):
            v = v * self.p + c
        return v

    def _build_tables(self) -> None:
        p, q, h = self.p, self.q, self.h
        digits = [self._digits(a) for a in range(q)]
        add = [[0] * q for _ in range(q)]
        for a in range(q):
            da = digits[a]
            for b in range(q):
                db = digits[b]
                add[a][b] = self._encode([(x + y) % p for x, y in zip(da, db)])
        mul = [[0] * q for _ in range(q)]
        for a in range(q):
            da = digits[a]
            for b in range(a, q):
                db = digits[b]
                prod = [0] * (2 * h - 1)
                for i, x in enumerate(da):
                    if x:
                        for j, y in enumerate(db):
                            prod[i + j] = (prod[i + j] + x * y) % p
                r = _poly_mod(prod, self.modulus, p)
                v = self._encode(r + [0] * (h - len(r)))
                mul[a][b] = mul[b][a] = v
        self.add_table = add
        self.mul_table = mul
        self.neg_table = [add[a].index(0) for a in range(q)]
        self.sub_table = [[add[a][self.neg_table[b]] for b in range(q)] for a in range(q)]

        # primitive element: smallest element of multiplicative order q-1
        for g in (range(2, q) if q > 3 else [2]):
            seen, x = 1, g
            while x != 1:
                x = mul[x][g]
                seen += 1
            if seen == q - 1:
                break
        self.primitive = g
        exp = [1] * (q - 1)
        for i in range(1, q - 1):
            exp[i] = mul[exp[i - 1]][g]
        log = [None] * q
        for i, x in enumerate(exp):
            log[x] = i
        self.exp_table = exp
        self.log_table = log
        inv = [0] * q
        for a in range(1, q):
            inv[a] = exp[(-log[a]) % (q - 1)]
        self.inv_table = inv

        sqrt = [None] * q
        for b in range(q):
            s = mul[b][b]
            if sqrt[s] is None or b < sqrt[s]:
                sqrt[s] = b
        self.sqrt_table = sqrt
        self.nonsquare = min(a for a in range(1, q) if sqrt[a] is None)

        self.add_np = np.array(add, dtype=np.int32)
        self.mul_np = np.array(mul, dtype=np.int32)
        self.neg_np = np.array(self.neg_table, dtype=np.int32)

    # -- scalar operations -------------------------------------------------

    def add(self, a: int, b: int) -> int:
        return self.add_table[a][b]

    def sub(self, a: int, b: int) -> int:
        return self.sub_table[a][b]

    def mul(self, a: int, b: int) -> int:
        return self.mul_table[a][b]

    def neg(self, a: int) -> int:
        return self.neg_table[a]

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("inverse of 0 in GF(%d)" % self.q)
        return self.inv_table[a]

    def div(self, a: int, b: int) -> int:
        return self.mul_table[a][self.inv(b)]

    def pow(self, a: int, k: int) -> int:
        if a == 0:
            if k == 0:
                return 1
            if k < 0:
                raise DivisionByZero("0 to a negative power")
            return 0
        return self.exp_table[(self.log_table[a] * k) % (self.q - 1)]

    def from_int(self, n: int) -> int:
        """Image of the integer n under Z -> GF(p) -> GF(q)."""
        return n % self.p

    def is_square(self, a: int) -> bool:
        return self.sqrt_table[a] is not None

    def is_square_euler(self, a: int) -> bool:
        """Euler criterion a^((q-1)/2) == 1; independent of the root table."""
        return a == 0 or self.pow(a, (self.q - 1) // 2) == 1

    def sqrt(self, a: int) -> int | None:
        return self.sqrt_table[a]

    def elements(self) -> range:
        return range(self.q)

    # -- conveniences ------------------------------------------------------

    def dot(self, u, v) -> int:
        acc = 0
        mul, add = self.mul_table, self.add_table
        for x, y in zip(u, v):
            if x and y:
                acc = add[acc][mul[x][y]]
        return acc

    def header(self) -> dict:
        return {"q": self.q, "p": self.p, "h": self.h, "modulus": list(self.modulus)}

    def __eq__(self, other) -> bool:
        return isinstance(other, FieldCtx) and other.q == self.q and other.modulus == self.modulus

    def __hash__(self) -> int:
        return hash((self.q, tuple(self.modulus)))

    def __repr__(self) -> str:
        return f"FieldCtx(q={self.q}, modulus={self.modulus})"


@lru_cache(maxsize=None)
def _cached_field(q: int, modulus: tuple | None) -> FieldCtx:
    return FieldCtx(q, list(modulus) if modulus is not None else None)


def field(q: int, modulus=None) -> FieldCtx:
    """Shared FieldCtx instance for (q, modulus)."""
    return _cached_field(q, tuple(modulus) if modulus is not None else None)
