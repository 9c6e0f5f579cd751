"""Backtracking search for point sets meeting every generator in exactly m points."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import BudgetExhausted, SearchExhausted
from .polarspace import PolarSpace, iter_bits

DEFAULT_BUDGET = 10 ** 8

FREE, IN, OUT = 0, 1, -1


class _Conflict(Exception):
    pass


@dataclass
class SearchStats:
    nodes: int = 0
    backtracks: int = 0


class ExactIncidenceSearch:
    """Each generator must end with exactly m chosen points.

    Propagation: a generator holding m chosen points excludes its free
    points; one whose chosen plus free points equal m takes all of them.
    Branching is on a free point of the generator with the fewest ways
    left to complete, ties broken by a seeded point ranking.
    """

    def __init__(self, space: PolarSpace, m: int, seed: int = 0, budget: int = DEFAULT_BUDGET):
        self.space = space
        self.m = m
        self.budget = budget
        self.stats = SearchStats()
        rng = random.Random(seed)
        order = list(range(space.num_points))
        rng.shuffle(order)
        self.rank = [0] * space.num_points
        for r, p in enumerate(order):
            self.rank[p] = r
        self.gen_points = [
            sorted(iter_bits(b), key=self.rank.__getitem__) for b in space.gen_bits
        ]
        self.point_gens = space.point_gens
        self.status = [FREE] * space.num_points
        self.cin = [0] * len(space.gen_bits)
        self.cfree = [len(p) for p in self.gen_points]
        self.trail: list[int] = []

    # -- assignment with undo ------------------------------------------------

    def _assign(self, p: int, value: int, queue: list[int]) -> None:
        self.status[p] = value
        self.trail.append(p)
        for g in self.point_gens[p]:
            self.cfree[g] -= 1
            if value == IN:
                self.cin[g] += 1
            queue.append(g)

    def _undo_to(self, mark: int) -> None:
        status, cin, cfree = self.status, self.cin, self.cfree
        while len(self.trail) > mark:
            p = self.trail.pop()
            value = status[p]
            status[p] = FREE
            for g in self.point_gens[p]:
                cfree[g] += 1
                if value == IN:
                    cin[g] -= 1

    def _propagate(self, queue: list[int]) -> None:
        m, status, cin, cfree = self.m, self.status, self.cin, self.cfree
        while queue:
            g = queue.pop()
            c, f = cin[g], cfree[g]
            if c > m or c + f < m:
                raise _Conflict
            if f == 0:
                continue
            if c == m:
                value = OUT
            elif c + f == m:
                value = IN
            else:
                continue
            for p in self.gen_points[g]:
                if status[p] == FREE:
                    self._assign(p, value, queue)

    def assign(self, p: int, value: int) -> None:
        """Pre-assignment outside the search; raises SearchExhausted on conflict."""
        if self.status[p] != FREE:
            if self.status[p] != value:
                raise SearchExhausted(f"point {p} pre-assigned both ways")
            return
        queue: list[int] = []
        self._assign(p, value, queue)
        try:
            self._propagate(queue)
        except _Conflict:
            raise SearchExhausted("constraints are inconsistent") from None

    # -- search ----------------------------------------------------------------

    def _choose(self):
        m, cin, cfree = self.m, self.cin, self.cfree
        best, best_key = None, None
        for g in range(len(cfree)):
            f = cfree[g]
            if f == 0:
                continue
            need = m - cin[g]
            # fewest completions first: C(f, need)
            ways = _binom(f, need)
            if best_key is None or ways < best_key:
                best, best_key = g, ways
                if ways <= 2:
                    break
        if best is None:
            return None
        return next(p for p in self.gen_points[best] if self.status[p] == FREE)

    def _dfs(self) -> bool:
        p = self._choose()
        if p is None:
            return True
        for value in (IN, OUT):
            self.stats.nodes += 1
            if self.stats.nodes > self.budget:
                raise BudgetExhausted(f"node budget {self.budget} exhausted")
            mark = len(self.trail)
            queue: list[int] = []
            self._assign(p, value, queue)
            try:
                self._propagate(queue)
                if self._dfs():
                    return True
            except _Conflict:
                pass
            self.stats.backtracks += 1
            self._undo_to(mark)
        return False

    def run(self) -> int:
        """Bitset of a solution; raises SearchExhausted or BudgetExhausted."""
        queue = list(range(len(self.cin)))
        try:
            self._propagate(queue)
        except _Conflict:
            raise SearchExhausted("constraints are inconsistent") from None
        if not self._dfs():
            raise SearchExhausted("no solution exists under the given constraints")
        bits = 0
        for p, s in enumerate(self.status):
            if s == IN:
                bits |= 1 << p
        return bits


def _binom(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    k = min(k, n - k)
    out = 1
    for i in range(k):
        out = out * (n - i) // (i + 1)
    return out
