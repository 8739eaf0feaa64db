"""Recursive algebraic construction of G_r(3r - 2k, 3)-free r-graphs.

One level on n vertices takes the largest prime q <= n // r. It lays down
the r-partite graph of a strongly 3-perfect hashing matrix on r parts of
size q (q^k edges). It then places a copy of a recursively built graph on
q vertices inside each part. Vertices r*q, ..., n-1 stay isolated.

Small n, and levels where no good evaluation vector turns up, use a
greedy free graph with pairwise intersections at most k - 1 instead.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache

from .errors import BudgetExceeded, VectorSearchError
from .ff import is_prime
from .hypergraph import Hypergraph, is_free, max_pairwise_intersection
from .oracle import SearchConfig, greedy_free_graph
from .phm import EvaluationVector, build_matrix, find_good_vector, matrix_to_hypergraph

# Largest C(n, r) the greedy base will scan.
GREEDY_CANDIDATE_LIMIT = 3_000_000


@lru_cache(maxsize=None)
def _cached_vector(q: int, k: int, r: int, seed: int, tries: int) -> EvaluationVector | None:
    try:
        return find_good_vector(q, k, r, seed=seed, max_tries=tries)
    except VectorSearchError:
        return None


def largest_prime_leq(x: int) -> int | None:
    for c in range(int(x), 1, -1):
        if is_prime(c):
            return c
    return None


@dataclass(frozen=True)
class RecursionBudget:
    """Knobs for :func:`construct_recursive`.

    ``delta`` is the prime-gap exponent: a level reports whether
    ``n//r - q <= (n//r)**delta`` held. ``min_direct_n`` is the smallest
    n that may take the skeleton path. With ``monotone`` set, a level
    keeps the best graph found on fewer vertices (padded with isolated
    vertices) whenever that beats its own construction.
    """

    delta: float = 0.525
    min_direct_n: int | None = None
    max_vector_tries: int = 100
    seed: int = 0
    monotone: bool = True

    def __post_init__(self):
        if not 0 < self.delta <= 0.525:
            raise ValueError(f"delta must lie in (0, 0.525], got {self.delta}")
        if self.max_vector_tries < 1:
            raise ValueError("max_vector_tries must be positive")


@dataclass
class Level:
    n: int
    strategy: str  # "skeleton", "greedy", "pad" or "empty"
    edge_count: int
    q: int | None = None
    vector: tuple[int, ...] | None = None
    skeleton_edges: int | None = None
    child_n: int | None = None
    child_edges: int | None = None
    prime_gap_ok: bool | None = None
    note: str | None = None


@dataclass
class ConstructionReport:
    n: int
    r: int
    k: int
    edge_count: int
    levels: list[Level] = field(default_factory=list)
    verified: bool | None = None

    @property
    def target_count(self) -> Fraction:
        """Analytic target n^k / (r^k - r)."""
        return Fraction(self.n**self.k, self.r**self.k - self.r)

    def level_identity_holds(self) -> bool:
        """Every skeleton level has q^k + r * child edges; every pad level keeps its count."""
        by_n = {lv.n: lv for lv in self.levels}
        for lv in self.levels:
            if lv.strategy == "skeleton":
                if lv.edge_count != lv.q**self.k + self.r * lv.child_edges:
                    return False
                if lv.skeleton_edges != lv.q**self.k or by_n[lv.child_n].edge_count != lv.child_edges:
                    return False
            elif lv.strategy == "pad":
                if by_n[lv.child_n].edge_count != lv.edge_count:
                    return False
        return self.levels[0].edge_count == self.edge_count if self.levels else self.edge_count == 0

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "r": self.r,
            "k": self.k,
            "levels": [{k: v for k, v in asdict(lv).items() if v is not None} for lv in self.levels],
            "edge_count": self.edge_count,
            "verified": self.verified,
            "target_count": str(self.target_count),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"


class _Builder:
    def __init__(self, r: int, k: int, budget: RecursionBudget):
        self.r, self.k, self.budget = r, k, budget
        self.min_direct = max(r, budget.min_direct_n or r)
        self.greedy: dict[int, Hypergraph] = {}
        self.plan: dict[int, Level] = {}

    def vector(self, q: int) -> EvaluationVector | None:
        return _cached_vector(q, self.k, self.r, self.budget.seed, self.budget.max_vector_tries)

    def base(self, n: int) -> Hypergraph:
        if n not in self.greedy:
            if n >= self.r and math.comb(n, self.r) > GREEDY_CANDIDATE_LIMIT:
                raise BudgetExceeded(
                    f"greedy base on C({n},{self.r}) = {math.comb(n, self.r)} candidates exceeds {GREEDY_CANDIDATE_LIMIT}"
                )
            cfg = SearchConfig(
                n=max(n, 0),
                r=self.r,
                v=3 * self.r - 2 * self.k,
                e=3,
                max_pairwise_intersection=self.k - 1,
                seed=self.budget.seed + n,
            )
            self.greedy[n] = greedy_free_graph(cfg)
        return self.greedy[n]

    def own_level(self, n: int) -> Level:
        """What this level builds by itself, before comparing with smaller n."""
        r, k = self.r, self.k
        if n < r:
            return Level(n, "empty", 0)
        q = largest_prime_leq(n // r)
        if q is not None and q >= r and n >= self.min_direct:
            vec = self.vector(q)
            gap_ok = (n // r) - q <= (n // r) ** self.budget.delta
            if vec is not None:
                child = self.level(q).edge_count
                return Level(
                    n, "skeleton", q**k + r * child, q=q, vector=vec.entries,
                    skeleton_edges=q**k, child_n=q, child_edges=child, prime_gap_ok=gap_ok,
                )
            note = f"no good vector over GF({q}) in {self.budget.max_vector_tries} tries"
        else:
            note = None
        return Level(n, "greedy", len(self.base(n)), note=note)

    def level(self, n: int) -> Level:
        if n in self.plan:
            return self.plan[n]
        best = self.own_level(n)
        if self.budget.monotone and n > self.r:
            prev = self.level(n - 1)
            if prev.edge_count > best.edge_count:
                src = prev.child_n if prev.strategy == "pad" else prev.n
                best = Level(n, "pad", prev.edge_count, child_n=src, child_edges=prev.edge_count)
        self.plan[n] = best
        return best

    def graph(self, n: int) -> Hypergraph:
        lv = self.level(n)
        if lv.strategy == "empty":
            return Hypergraph(self.r, max(n, 0))
        if lv.strategy == "greedy":
            return self.base(n)
        if lv.strategy == "pad":
            g = self.graph(lv.child_n)
            return Hypergraph(self.r, n, g.edges)
        q, r = lv.q, self.r
        skel = matrix_to_hypergraph(build_matrix(q, self.k, EvaluationVector(q, lv.vector)))
        child = self.graph(q)
        edges = list(skel.edges)
        for i in range(r):
            edges.extend(tuple(x + i * q for x in e) for e in child.edges)
        return Hypergraph(r, n, tuple(edges))

    def chain(self, n: int) -> list[Level]:
        out, seen = [], set()
        todo = [n]
        while todo:
            m = todo.pop()
            if m in seen:
                continue
            seen.add(m)
            lv = self.level(m)
            out.append(lv)
            if lv.child_n is not None:
                todo.append(lv.child_n)
        return out


def _fill_levels_iteratively(b: _Builder, n: int) -> None:
    # Walk upward so the pad comparison never recurses n deep.
    for m in range(b.r, n + 1):
        b.level(m)


def construct_recursive(
    r: int, k: int, n: int, budget: RecursionBudget | None = None, verify: bool = True
) -> tuple[Hypergraph, ConstructionReport]:
    """Build a G_r(3r-2k, 3)-free r-graph on ``n`` vertices.

    Every pairwise edge intersection has at most k - 1 vertices. The
    report lists each level used (outermost first) with its exact
    counts. When ``verify`` is set the result is re-checked with
    :func:`verify_construction`.
    """
    if not r > k >= 2:
        raise ValueError(f"need r > k >= 2, got r={r}, k={k}")
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    budget = budget or RecursionBudget()
    b = _Builder(r, k, budget)
    if budget.monotone:
        _fill_levels_iteratively(b, n)
    H = b.graph(n)
    report = ConstructionReport(n=n, r=r, k=k, edge_count=len(H), levels=b.chain(n))
    if verify:
        report.verified = verify_construction(H, r, k, report)
    return H, report


def verify_construction(H: Hypergraph, r: int, k: int, report: ConstructionReport | None = None) -> bool:
    """Freeness, pairwise intersections at most k - 1, and the report's counts."""
    if H.r != r:
        return False
    if len(H) >= 2 and max_pairwise_intersection(H) > k - 1:
        return False
    if is_free(H, 3 * r - 2 * k, 3) is not True:
        return False
    if report is not None:
        if report.edge_count != len(H) or not report.level_identity_holds():
            return False
    return True
