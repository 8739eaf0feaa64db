"""Ground truth for tiny parameters and greedy seed graphs.

``exact_max_edges`` computes f_r(n, v, e), the largest G_r(v, e)-free
r-graph on n vertices (optionally with capped pairwise intersections),
by branch and bound. ``greedy_free_graph`` builds a maximal such graph
quickly, for use as a recursion base.
"""

from __future__ import annotations

import itertools
import math
import random
import time
from dataclasses import dataclass

from .errors import BudgetExceeded
from .hypergraph import Hypergraph, IncrementalFreeness

EXACT_CANDIDATE_LIMIT = 300


@dataclass(frozen=True)
class SearchConfig:
    n: int
    r: int
    v: int
    e: int
    almost_linear: bool = False
    max_pairwise_intersection: int | None = None
    time_budget: float = 60.0
    seed: int = 0

    def __post_init__(self):
        if self.e < 2:
            raise ValueError("e must be at least 2")
        if self.r < 1 or self.n < 0:
            raise ValueError("need r >= 1 and n >= 0")
        if self.v < self.r:
            raise ValueError(f"v={self.v} must be at least r={self.r}")

    @property
    def intersection_cap(self) -> int | None:
        caps = [c for c in (2 if self.almost_linear else None, self.max_pairwise_intersection) if c is not None]
        return min(caps) if caps else None

    def checker(self) -> IncrementalFreeness:
        return IncrementalFreeness(self.r, self.n, self.v, self.e, self.intersection_cap)


def _bottleneck_size(cfg: SearchConfig) -> int | None:
    """Smallest s such that every s-set lies in at most e - 1 edges.

    e edges through a common s-set cover at most e*r - (e-1)*s vertices,
    which is <= v once s >= (e*r - v) / (e - 1).
    """
    s = max(1, -(-(cfg.e * cfg.r - cfg.v) // (cfg.e - 1)))
    return s if s <= cfg.r else None


def exact_max_edges(cfg: SearchConfig, limit: int = EXACT_CANDIDATE_LIMIT) -> tuple[int, Hypergraph]:
    """Exact maximum and the lexicographically least optimal graph.

    Depth-first over the candidate r-sets in lexicographic order, taking
    each candidate before skipping it. The first edge is pinned to
    {0, ..., r-1}; every nonempty graph has a relabelling that starts
    there, and relabelling the least optimum cannot make it smaller.
    Raises :class:`BudgetExceeded` (with the best graph so far) when the
    time budget runs out.
    """
    n, r = cfg.n, cfg.r
    total = math.comb(n, r) if n >= r else 0
    if total > limit:
        raise BudgetExceeded(f"C({n},{r}) = {total} candidates exceeds limit {limit}")
    if total == 0:
        return 0, Hypergraph(r, n)
    cands = list(itertools.combinations(range(n), r))
    s = _bottleneck_size(cfg)
    slots = cfg.e - 1
    subs = [tuple(itertools.combinations(c, s)) for c in cands] if s else None
    per_edge = math.comb(r, s) if s else 1
    load: dict = {}
    deadline = time.monotonic() + cfg.time_budget
    chk = cfg.checker()
    chosen: list[int] = []
    best: list[int] = []
    nodes = 0

    def upper(addable):
        ub = len(chosen) + len(addable)
        if s is None:
            return ub
        # Each further edge consumes per_edge free slots among its s-subsets.
        demand: dict = {}
        for d in addable:
            for t in subs[d]:
                demand[t] = demand.get(t, 0) + 1
        room = sum(min(slots - load.get(t, 0), k) for t, k in demand.items())
        return min(ub, len(chosen) + room // per_edge)

    def dfs(addable: list[int]):
        nonlocal best, nodes
        nodes += 1
        if nodes % 4096 == 0 and time.monotonic() > deadline:
            g = Hypergraph(r, n, tuple(cands[i] for i in best))
            raise BudgetExceeded(f"time budget {cfg.time_budget}s exhausted", best=(len(best), g))
        if len(chosen) > len(best):
            best = list(chosen)
        for pos, c in enumerate(addable):
            # Skipping addable[:pos] leaves addable[pos:] at most.
            if len(chosen) + len(addable) - pos <= len(best) or upper(addable[pos:]) <= len(best):
                return
            take(c)
            rest = [d for d in addable[pos + 1 :] if not chk.violates(cands[d])]
            dfs(rest)
            drop(c)

    def take(c):
        chk.push(cands[c])
        chosen.append(c)
        if s:
            for t in subs[c]:
                load[t] = load.get(t, 0) + 1

    def drop(c):
        chk.pop()
        chosen.pop()
        if s:
            for t in subs[c]:
                load[t] -= 1

    first = 0
    take(first)
    dfs([d for d in range(1, total) if not chk.violates(cands[d])])
    g = Hypergraph(r, n, tuple(cands[i] for i in best))
    return len(best), g


def greedy_free_graph(cfg: SearchConfig) -> Hypergraph:
    """Scan all r-sets in seeded random order, keeping each one that fits.

    A single pass is enough for maximality: constraints only tighten as
    edges are added, so a rejected r-set stays rejected.
    """
    n, r = cfg.n, cfg.r
    if n < r:
        return Hypergraph(r, n)
    cands = list(itertools.combinations(range(n), r))
    random.Random(cfg.seed).shuffle(cands)
    chk = cfg.checker()
    for c in cands:
        if not chk.violates(c):
            chk.push(c)
    return Hypergraph(r, n, tuple(chk.edges))
