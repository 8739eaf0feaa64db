"""Uniform hypergraphs, codegrees and G_r(v, e)-freeness verification.

A hypergraph is stored canonically: every edge is an ascending tuple of
vertex ids in ``range(n)``, and the edge list is sorted. Verifiers work on
a packed bit matrix (one row of uint64 words per edge).

``G_r(v, e)``-free means every ``e`` distinct edges together cover at
least ``v + 1`` vertices.
"""

from __future__ import annotations

import itertools
import math
import os
from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from heapq import heapify, heappop, heappush
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import BudgetExceeded

DEFAULT_NAIVE_BUDGET = 10**9


def naive_budget() -> int:
    """Triple-enumeration cap, overridable through ``SHFORGE_BUDGET``."""
    env = os.environ.get("SHFORGE_BUDGET")
    return int(float(env)) if env else DEFAULT_NAIVE_BUDGET


def _popcount_rows(a: np.ndarray) -> np.ndarray:
    return np.bitwise_count(a).sum(axis=-1, dtype=np.int64)


@dataclass(frozen=True)
class Hypergraph:
    r: int
    n: int
    edges: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        if self.r < 1 or self.n < 0:
            raise ValueError(f"invalid uniformity/vertex count r={self.r}, n={self.n}")
        canon = []
        for e in self.edges:
            t = tuple(sorted(int(x) for x in e))
            if len(t) != self.r or len(set(t)) != self.r:
                raise ValueError(f"edge {e} does not have {self.r} distinct vertices")
            if t and (t[0] < 0 or t[-1] >= self.n):
                raise ValueError(f"edge {e} has a vertex outside range({self.n})")
            canon.append(t)
        canon.sort()
        for a, b in zip(canon, canon[1:]):
            if a == b:
                raise ValueError(f"duplicate edge {a}")
        object.__setattr__(self, "edges", tuple(canon))

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self):
        return iter(self.edges)

    @cached_property
    def masks(self) -> tuple[int, ...]:
        return tuple(sum(1 << x for x in e) for e in self.edges)

    @cached_property
    def bits(self) -> np.ndarray:
        words = max(1, (self.n + 63) // 64)
        out = np.zeros((len(self.edges), words), dtype=np.uint64)
        for i, e in enumerate(self.edges):
            for x in e:
                out[i, x >> 6] |= np.uint64(1) << np.uint64(x & 63)
        return out

    @cached_property
    def incidence_matrix(self) -> np.ndarray:
        """(m, n) float32 0/1 matrix; float so products go through BLAS."""
        inc = np.zeros((len(self.edges), max(self.n, 1)), dtype=np.float32)
        for i, e in enumerate(self.edges):
            inc[i, list(e)] = 1.0
        return inc

    @cached_property
    def incidence(self) -> tuple[tuple[int, ...], ...]:
        inc = [[] for _ in range(self.n)]
        for i, e in enumerate(self.edges):
            for x in e:
                inc[x].append(i)
        return tuple(tuple(x) for x in inc)

    def shifted(self, offset: int, n: int) -> Hypergraph:
        return Hypergraph(self.r, n, tuple(tuple(x + offset for x in e) for e in self.edges))

    def relabeled(self, mapping: Sequence[int], n: int) -> Hypergraph:
        return Hypergraph(self.r, n, tuple(tuple(mapping[x] for x in e) for e in self.edges))

    def union(self, *others: Hypergraph) -> Hypergraph:
        edges = list(self.edges)
        for o in others:
            if o.r != self.r or o.n != self.n:
                raise ValueError("union needs matching r and n")
            edges.extend(o.edges)
        return Hypergraph(self.r, self.n, tuple(edges))

    def to_text(self) -> str:
        lines = [f"{self.r} {self.n} {len(self.edges)}"]
        lines.extend(" ".join(map(str, e)) for e in self.edges)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> Hypergraph:
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        if not lines:
            raise ValueError("empty hypergraph file")
        try:
            r, n, m = (int(x) for x in lines[0].split())
        except ValueError as exc:
            raise ValueError(f"bad header line {lines[0]!r}") from exc
        if len(lines) - 1 != m:
            raise ValueError(f"header announces {m} edges, found {len(lines) - 1}")
        edges = []
        for ln in lines[1:]:
            edges.append(tuple(int(x) for x in ln.split()))
        return cls(r, n, tuple(edges))

    def write(self, path) -> None:
        Path(path).write_bytes(self.to_text().encode("ascii"))

    @classmethod
    def read(cls, path) -> Hypergraph:
        return cls.from_text(Path(path).read_bytes().decode("ascii"))


@dataclass(frozen=True)
class FreenessWitness:
    """A set of ``e`` edges covering at most ``v`` vertices.

    Falsy, so ``if is_free(H, v, e):`` reads naturally while the witness
    is still available to the caller.
    """

    edge_indices: tuple[int, ...]
    union_size: int

    def __bool__(self) -> bool:
        return False

    def describe(self, H: Hypergraph) -> str:
        edges = "; ".join(" ".join(map(str, H.edges[i])) for i in self.edge_indices)
        return f"edges {list(self.edge_indices)} [{edges}] cover {self.union_size} vertices"


def codegree(H: Hypergraph, T: Iterable[int]) -> int:
    """Number of edges containing the vertex set ``T``."""
    mask = 0
    for x in T:
        if not 0 <= x < H.n:
            raise ValueError(f"vertex {x} outside range({H.n})")
        mask |= 1 << x
    return sum(1 for m in H.masks if m & mask == mask)


def pair_index(H: Hypergraph, min_size: int, block: int = 2048):
    """Edge pairs (i < j) with |A_i & A_j| >= min_size.

    Returns three parallel int arrays (I, J, sizes), sorted by (I, J).
    """
    m = len(H)
    empty = np.zeros(0, dtype=np.int64)
    if m < 2:
        return empty, empty, empty
    inc = H.incidence_matrix
    Is, Js, Ss = [], [], []
    for lo in range(0, m, block):
        hi = min(m, lo + block)
        P = np.rint(inc[lo:hi] @ inc.T).astype(np.int64)
        rows, cols = np.nonzero(P >= min_size)
        keep = cols > rows + lo
        rows, cols = rows[keep], cols[keep]
        Is.append(rows + lo)
        Js.append(cols)
        Ss.append(P[rows, cols])
    return np.concatenate(Is), np.concatenate(Js), np.concatenate(Ss)


def pair_intersections(H: Hypergraph, min_size: int = 2) -> dict[tuple[int, int], int]:
    I, J, S = pair_index(H, min_size)
    return {(int(i), int(j)): int(s) for i, j, s in zip(I, J, S)}


def max_pairwise_intersection(H: Hypergraph) -> int:
    """Largest |A & B| over distinct edges (0 when there are fewer than two)."""
    m = len(H)
    if m < 2:
        return 0
    inc = H.incidence_matrix
    best = 0
    for lo in range(0, m, 2048):
        P = inc[lo : lo + 2048] @ inc.T
        P[np.arange(P.shape[0]), np.arange(lo, lo + P.shape[0])] = 0
        best = max(best, int(np.rint(P.max())))
    return best


def is_almost_linear(H: Hypergraph) -> bool:
    return max_pairwise_intersection(H) <= 2


def _union_size(H: Hypergraph, idx: Sequence[int]) -> int:
    u = 0
    for i in idx:
        u |= H.masks[i]
    return u.bit_count()


def _violation_pairs(H: Hypergraph, v: int):
    need = 2 * H.r - v
    if len(H) < 2:
        return None
    if need <= 0:
        return FreenessWitness((0, 1), _union_size(H, (0, 1)))
    I, J, _ = pair_index(H, need)
    if len(I) == 0:
        return None
    i, j = int(I[0]), int(J[0])
    return FreenessWitness((i, j), _union_size(H, (i, j)))


def _violation_triples(H: Hypergraph, v: int):
    m, r = len(H), H.r
    if m < 3:
        return None
    if v >= 3 * r:
        return FreenessWitness((0, 1, 2), _union_size(H, (0, 1, 2)))
    # Any violating triple has pairwise overlaps summing to >= 3r - v,
    # so one of its pairs meets in at least a third of that.
    heavy = max(1, -(-(3 * r - v) // 3))
    I, J, _ = pair_index(H, heavy)
    if len(I) == 0:
        return None
    inc = H.incidence_matrix
    best = None
    starts = np.flatnonzero(np.r_[True, I[1:] != I[:-1]])
    ends = np.r_[starts[1:], len(I)]
    spans = []
    for s, t in zip(starts, ends):
        spans.extend((a, min(a + 256, t)) for a in range(s, t, 256))
    for s, t in spans:
        i = int(I[s])
        js = J[s:t]
        ab = np.maximum(inc[i][None, :], inc[js])
        need = r + ab.sum(axis=1) - v
        cover = ab @ inc.T
        hit = cover >= need[:, None] - 0.5
        rows = np.arange(len(js))
        hit[rows, i] = False
        hit[rows, js] = False
        any_hit = hit.any(axis=1)
        if not any_hit.any():
            continue
        first_c = hit.argmax(axis=1)
        for row in np.flatnonzero(any_hit):
            trip = tuple(sorted((i, int(js[row]), int(first_c[row]))))
            if best is None or trip < best:
                best = trip
    if best is None:
        return None
    return FreenessWitness(best, _union_size(H, best))


def _violation_dfs(H: Hypergraph, v: int, e: int):
    masks = H.masks
    m = len(masks)

    def dfs(start, acc, chosen):
        depth = len(chosen)
        for idx in range(start, m - (e - depth) + 1):
            u = acc | masks[idx]
            if u.bit_count() > v:
                continue
            if depth + 1 == e:
                return chosen + (idx,)
            found = dfs(idx + 1, u, chosen + (idx,))
            if found:
                return found
        return None

    found = dfs(0, 0, ())
    if found is None:
        return None
    return FreenessWitness(found, _union_size(H, found))


def is_free(H: Hypergraph, v: int, e: int):
    """True if every ``e`` distinct edges cover more than ``v`` vertices.

    Otherwise returns the lexicographically first violating
    :class:`FreenessWitness`. Fewer than ``e`` edges is trivially free.
    """
    if e < 2:
        raise ValueError("e must be at least 2")
    if v < H.r:
        raise ValueError(f"v={v} must be at least r={H.r}")
    if len(H) < e:
        return True
    if e == 2:
        w = _violation_pairs(H, v)
    elif e == 3:
        w = _violation_triples(H, v)
    else:
        w = _violation_dfs(H, v, e)
    return True if w is None else w


def _naive_scan(bits: np.ndarray, v: int, e: int, first_range: range, chunk: int = 256):
    """Return the lexicographically first violating e-tuple whose first index is in range."""
    m = bits.shape[0]
    for head in first_range:
        for prefix in itertools.combinations(range(head + 1, m), e - 3) if e >= 3 else [()]:
            pre = (head,) + prefix
            acc = np.bitwise_or.reduce(bits[list(pre)], axis=0)
            if e == 2:
                tail = bits[head + 1 :]
                cnt = _popcount_rows(acc[None, :] | tail)
                hits = np.flatnonzero(cnt <= v)
                if len(hits):
                    return (head, head + 1 + int(hits[0]))
                continue
            lo = pre[-1] + 1
            for j0 in range(lo, m - 1, chunk):
                j1 = min(j0 + chunk, m - 1)
                ab = acc[None, :] | bits[j0:j1]
                tail = bits[j0 + 1 :]
                cnt = np.bitwise_count(ab[:, None, :] | tail[None, :, :]).sum(axis=-1, dtype=np.int64)
                jj = np.arange(j0, j1)[:, None]
                ll = np.arange(j0 + 1, m)[None, :]
                hit = (cnt <= v) & (ll > jj)
                if hit.any():
                    a, b = np.unravel_index(int(np.argmax(hit)), hit.shape)
                    return pre + (j0 + int(a), j0 + 1 + int(b))
    return None


def _naive_worker(args):
    bits, v, e, lo, hi = args
    return _naive_scan(bits, v, e, range(lo, hi))


def is_free_naive(H: Hypergraph, v: int, e: int, budget: int | None = None, workers: int = 1):
    """Unconditional enumeration of all e-subsets of edges.

    Independent cross-check for :func:`is_free`, vectorised over the last
    index only. Refuses inputs with more than ``budget`` subsets.
    """
    if e < 2:
        raise ValueError("e must be at least 2")
    m = len(H)
    if m < e:
        return True
    budget = naive_budget() if budget is None else budget
    total = math.comb(m, e)
    if total > budget:
        raise BudgetExceeded(f"C({m},{e}) = {total} subsets exceeds budget {budget}")
    bits = H.bits
    if workers <= 1 or m < 64:
        found = _naive_scan(bits, v, e, range(0, m - e + 1))
    else:
        # Contiguous first-index ranges; the first non-empty range in order wins.
        cuts = np.linspace(0, m - e + 1, workers * 4 + 1).astype(int)
        jobs = [(bits, v, e, int(a), int(b)) for a, b in zip(cuts, cuts[1:]) if b > a]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            found = next((res for res in ex.map(_naive_worker, jobs) if res is not None), None)
    if found is None:
        return True
    return FreenessWitness(tuple(found), _union_size(H, found))


def is_locally_sparse(H: Hypergraph, e: int, k: int) -> bool:
    """Free of G_r(i*r - (i-1)*k, i) for every 2 <= i <= e."""
    if e < 2 or not H.r > k >= 2:
        raise ValueError("need e >= 2 and r > k >= 2")
    return all(bool(is_free(H, i * H.r - (i - 1) * k, i)) for i in range(2, e + 1))


@dataclass(frozen=True)
class CodegreeCensus:
    k: int
    counts: dict[int, int] = field(default_factory=dict)

    def __getitem__(self, d: int) -> int:
        return self.counts.get(d, 0)

    @property
    def max_codegree(self) -> int:
        return max(self.counts) if self.counts else 0


def _k_subset_codegrees(H: Hypergraph, k: int) -> Counter:
    c = Counter()
    for e in H.edges:
        c.update(itertools.combinations(e, k))
    return c


def codegree_distribution(H: Hypergraph, k: int) -> CodegreeCensus:
    """How many k-subsets of range(n) have each codegree (zero counts omitted)."""
    if not 1 <= k < H.r:
        raise ValueError(f"need 1 <= k < r, got k={k}, r={H.r}")
    cod = _k_subset_codegrees(H, k)
    counts = Counter(cod.values())
    zero = math.comb(H.n, k) - len(cod)
    if zero:
        counts[0] = zero
    return CodegreeCensus(k, dict(sorted(counts.items())))


def prune_codegree_one(H: Hypergraph, k: int) -> tuple[Hypergraph, int]:
    """Repeatedly drop the lowest-index edge holding a (k-1)-subset of codegree one."""
    if not 2 <= k < H.r:
        raise ValueError(f"need 2 <= k < r, got k={k}, r={H.r}")
    subsets = [tuple(itertools.combinations(e, k - 1)) for e in H.edges]
    cod = Counter()
    holders = defaultdict(list)
    for i, subs in enumerate(subsets):
        cod.update(subs)
        for s in subs:
            holders[s].append(i)
    alive = [True] * len(H)
    heap = [i for i, subs in enumerate(subsets) if any(cod[s] == 1 for s in subs)]
    heapify(heap)
    removed = 0
    while heap:
        i = heappop(heap)
        if not alive[i] or not any(cod[s] == 1 for s in subsets[i]):
            continue
        alive[i] = False
        removed += 1
        for s in subsets[i]:
            cod[s] -= 1
            if cod[s] == 1:
                for j in holders[s]:
                    if alive[j]:
                        heappush(heap, j)
    kept = tuple(e for e, a in zip(H.edges, alive) if a)
    return Hypergraph(H.r, H.n, kept), removed


class IncrementalFreeness:
    """A growing edge stack kept G_r(v, e)-free.

    ``violates(edge)`` says whether pushing ``edge`` would break freeness
    or the optional cap on pairwise intersections. ``push``/``pop`` keep
    stack discipline so branch-and-bound can backtrack.
    """

    def __init__(self, r: int, n: int, v: int, e: int, max_intersection: int | None = None):
        if e < 2:
            raise ValueError("e must be at least 2")
        self.r, self.n, self.v, self.e = r, n, v, e
        self.cap = max_intersection
        self.masks: list[int] = []
        self.edges: list[tuple[int, ...]] = []
        self.incidence: list[list[int]] = [[] for _ in range(n)]
        self.heavy_t = max(1, -(-(3 * r - v) // 3))
        self.heavy: list[tuple[int, int]] = []
        self._heavy_added: list[int] = []

    def __len__(self) -> int:
        return len(self.masks)

    def _overlaps(self, edge) -> Counter:
        c = Counter()
        for x in edge:
            c.update(self.incidence[x])
        return c

    def violates(self, edge: Sequence[int]) -> bool:
        cm = sum(1 << x for x in edge)
        over = self._overlaps(edge)
        if self.cap is not None and any(s > self.cap for s in over.values()):
            return True
        size = len(self.masks)
        if size < self.e - 1:
            return False
        v, r = self.v, self.r
        if self.e == 2:
            need = 2 * r - v
            return need <= 0 or any(s >= need for s in over.values())
        if self.e == 3:
            if v >= 3 * r:
                return True
            for a, s in over.items():
                if s < self.heavy_t:
                    continue
                ac = self.masks[a] | cm
                need = r + ac.bit_count() - v
                if need <= 0:
                    return True
                for b, bm in enumerate(self.masks):
                    if b != a and (bm & ac).bit_count() >= need:
                        return True
            for a, b in self.heavy:
                if (self.masks[a] | self.masks[b] | cm).bit_count() <= v:
                    return True
            return False
        return self._violates_dfs(cm)

    def _violates_dfs(self, cm: int) -> bool:
        masks, v, want = self.masks, self.v, self.e - 1

        def dfs(start, acc, depth):
            for i in range(start, len(masks) - (want - depth) + 1):
                u = acc | masks[i]
                if u.bit_count() > v:
                    continue
                if depth + 1 == want or dfs(i + 1, u, depth + 1):
                    return True
            return False

        return dfs(0, cm, 0)

    def push(self, edge: Sequence[int]) -> None:
        cm = sum(1 << x for x in edge)
        idx = len(self.masks)
        added = 0
        if self.e == 3:
            for a, s in self._overlaps(edge).items():
                if s >= self.heavy_t:
                    self.heavy.append((a, idx))
                    added += 1
        self._heavy_added.append(added)
        self.masks.append(cm)
        self.edges.append(tuple(edge))
        for x in edge:
            self.incidence[x].append(idx)

    def pop(self) -> None:
        self.masks.pop()
        for x in self.edges.pop():
            self.incidence[x].pop()
        for _ in range(self._heavy_added.pop()):
            self.heavy.pop()
