"""Lift an r-graph to an (r+1)-graph by packing a component graph into K_n.

Given a seed r-graph ``H`` on ``s`` vertices with ``m`` edges, the
component graph has ``t`` petal blocks of ``s`` vertices and a core block
of ``m`` vertices. Petals and the core are cliques. Core vertex ``j`` is
joined to the image of edge ``A_j`` in every petal.

Lifting turns each (petal, edge) pair into the (r+1)-edge
``petal image of A_j`` plus ``x_j``. Copies of the component graph are
packed edge-disjointly into K_n. Any two copies share at most two
vertices, and a shared pair is an edge of neither copy. The union of the
lifted graphs over all copies is the output.

Vertex layout of the component graph: petal ``i`` (0-based) occupies
``i*s .. i*s + s - 1``; core vertex ``j`` is ``t*s + j``.
"""

from __future__ import annotations

import itertools
import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .errors import NotFreeError
from .hypergraph import Hypergraph, is_almost_linear, is_free, max_pairwise_intersection


@dataclass(frozen=True)
class SimpleGraph:
    num_vertices: int
    edges: frozenset[tuple[int, int]]

    @classmethod
    def from_pairs(cls, num_vertices: int, pairs) -> SimpleGraph:
        edges = set()
        for a, b in pairs:
            if a == b or not (0 <= a < num_vertices and 0 <= b < num_vertices):
                raise ValueError(f"bad edge ({a}, {b})")
            edges.add((min(a, b), max(a, b)))
        return cls(num_vertices, frozenset(edges))

    @cached_property
    def adjacency(self) -> tuple[frozenset[int], ...]:
        adj = [set() for _ in range(self.num_vertices)]
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return tuple(frozenset(x) for x in adj)

    def has_edge(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self.edges

    def is_clique(self, vertices: Sequence[int]) -> bool:
        return all(self.has_edge(a, b) for a, b in itertools.combinations(vertices, 2))


@dataclass(frozen=True)
class EmbeddingSpec:
    """A bijection from range(s) onto ``target``, j -> target[j]."""

    target: tuple[int, ...]

    def __post_init__(self):
        if len(set(self.target)) != len(self.target):
            raise ValueError("embedding targets must be distinct")

    @property
    def s(self) -> int:
        return len(self.target)

    def apply(self, edge: Sequence[int]) -> tuple[int, ...]:
        return tuple(sorted(self.target[a] for a in edge))


@dataclass(frozen=True)
class GtTemplate:
    H: Hypergraph
    t: int
    E1: frozenset[tuple[int, int]]
    E2: frozenset[tuple[int, int]]
    E3: frozenset[tuple[int, int]]

    @property
    def s(self) -> int:
        return self.H.n

    @property
    def m(self) -> int:
        return len(self.H)

    @property
    def r(self) -> int:
        return self.H.r

    @property
    def num_vertices(self) -> int:
        return self.t * self.s + self.m

    def petal(self, i: int) -> range:
        return range(i * self.s, (i + 1) * self.s)

    def embedding(self, i: int) -> EmbeddingSpec:
        return EmbeddingSpec(tuple(self.petal(i)))

    def core_vertex(self, j: int) -> int:
        return self.t * self.s + j

    @property
    def core(self) -> range:
        return range(self.t * self.s, self.t * self.s + self.m)

    @cached_property
    def graph(self) -> SimpleGraph:
        return SimpleGraph(self.num_vertices, self.E1 | self.E2 | self.E3)

    def expected_edge_count(self) -> int:
        return self.t * math.comb(self.s, 2) + math.comb(self.m, 2) + self.r * self.m * self.t


def build_component_graph(H: Hypergraph, t: int) -> GtTemplate:
    """The component graph for seed ``H`` with ``t`` petals.

    Core vertex ``j`` belongs to the j-th edge of ``H`` in canonical order,
    and petal ``i`` embeds ``H`` by the order-preserving shift ``a -> i*s + a``.
    """
    if t < 1:
        raise ValueError(f"need t >= 1, got {t}")
    if len(H) < 2:
        raise ValueError(f"the seed graph needs at least 2 edges, got {len(H)}")
    s, m = H.n, len(H)
    E1 = {(i * s + a, i * s + b) for i in range(t) for a, b in itertools.combinations(range(s), 2)}
    E2 = {(t * s + a, t * s + b) for a, b in itertools.combinations(range(m), 2)}
    E3 = {(i * s + a, t * s + j) for i in range(t) for j, A in enumerate(H.edges) for a in A}
    return GtTemplate(H, t, frozenset(E1), frozenset(E2), frozenset(E3))


@dataclass(frozen=True)
class LiftedEdge:
    edge: tuple[int, ...]
    petal: int
    root: tuple[int, ...]
    core: int


@dataclass(frozen=True)
class LiftedGraph:
    template: GtTemplate
    graph: Hypergraph
    meta: tuple[LiftedEdge, ...]  # aligned with graph.edges

    def sidecar(self) -> str:
        rows = [{"edge": list(x.edge), "petal": x.petal, "core": x.core} for x in self.meta]
        return json.dumps(rows, indent=1) + "\n"


def lift(template: GtTemplate) -> LiftedGraph:
    """The (r+1)-graph with edges petal_i(A_j) + {x_j}, for all petals i and edges j."""
    meta = []
    for i in range(template.t):
        emb = template.embedding(i)
        for j, A in enumerate(template.H.edges):
            root = emb.apply(A)
            x = template.core_vertex(j)
            meta.append(LiftedEdge(tuple(sorted(root + (x,))), i, root, x))
    meta.sort(key=lambda e: e.edge)
    g = Hypergraph(template.r + 1, template.num_vertices, tuple(x.edge for x in meta))
    return LiftedGraph(template, g, tuple(meta))


@dataclass(frozen=True)
class LiftCheck:
    """Outcome of every structural check on a lifted graph.

    ``almost_linear`` and ``free`` are ``None`` when the seed graph does
    not meet the hypothesis that makes them required.
    """

    same_petal_distinct_cores: bool
    different_petals_disjoint_roots: bool
    edge_count_mt: bool
    edges_are_cliques: bool
    singly_rooted: bool
    roots_avoid_cores: bool
    almost_linear: bool | None
    free: bool | None

    def __bool__(self) -> bool:
        return all(v is not False for v in vars(self).values())


def check_lift(lifted: LiftedGraph, H: Hypergraph) -> LiftCheck:
    tp = lifted.template
    meta = lifted.meta
    core = set(tp.core)
    petal_of = {v: i for i in range(tp.t) for v in tp.petal(i)}
    singly = all(
        len(x.root) == H.r and {petal_of.get(v) for v in x.root} == {x.petal} and x.core in core for x in meta
    )
    roots = set().union(*(x.root for x in meta)) if meta else set()
    cores = {x.core for x in meta}
    same, diff = True, True
    for a, b in itertools.combinations(meta, 2):
        if a.petal == b.petal:
            same &= a.core != b.core
        else:
            diff &= not set(a.root) & set(b.root)
    cliques = all(tp.graph.is_clique(x.edge) for x in meta)
    lin = free = None
    if is_almost_linear(H):
        lin = is_almost_linear(lifted.graph)
        if H.r >= 2 and 3 * H.r - 4 >= H.r and is_free(H, 3 * H.r - 4, 3) is True:
            free = is_free(lifted.graph, 3 * H.r - 1, 3) is True
    return LiftCheck(
        same_petal_distinct_cores=same,
        different_petals_disjoint_roots=diff,
        edge_count_mt=len(lifted.graph) == tp.m * tp.t,
        edges_are_cliques=cliques,
        singly_rooted=singly,
        roots_avoid_cores=not roots & cores,
        almost_linear=lin,
        free=free,
    )


def verify_lift(lifted: LiftedGraph, H: Hypergraph) -> bool:
    """All structural lift properties, plus linearity and freeness when ``H`` warrants them."""
    return bool(check_lift(lifted, H))


@dataclass(frozen=True)
class PackingPlan:
    """Injections of the component graph into K_n, one per copy.

    ``copies[c][u]`` is the image of template vertex ``u`` under copy ``c``.
    """

    n: int
    copies: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.copies)

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "copies": [list(c) for c in self.copies]}) + "\n"

    @classmethod
    def from_json(cls, text: str) -> PackingPlan:
        d = json.loads(text)
        return cls(d["n"], tuple(tuple(c) for c in d["copies"]))


def _as_graph(template_or_graph) -> SimpleGraph:
    return template_or_graph.graph if isinstance(template_or_graph, GtTemplate) else template_or_graph


def greedy_induced_packing(n: int, template, seed: int, max_failures: int = 2000) -> PackingPlan:
    """Seeded random greedy induced packing of copies of a graph into K_n.

    Each attempt places the template vertices one at a time, in order, at
    a random host vertex that keeps the partial copy compatible with every
    accepted copy. That means no reused host edge and at most two shared
    host vertices. A completed copy is accepted when every pair it shares
    with an earlier copy is an edge of neither. The search stops after
    ``max_failures`` consecutive failed attempts.
    """
    G = _as_graph(template)
    N = G.num_vertices
    if n < N:
        raise ValueError(f"n={n} is smaller than the {N}-vertex template")
    rng = random.Random(seed)
    adj = G.adjacency
    used: set[tuple[int, int]] = set()
    owners: list[list[int]] = [[] for _ in range(n)]
    copies: list[tuple[int, ...]] = []
    host_sets: list[set[int]] = []
    host_edges: list[set[tuple[int, int]]] = []
    failures = 0
    while failures < max_failures:
        img: list[int] = []
        placed: set[int] = set()
        overlap: dict[int, int] = {}
        ok = True
        for u in range(N):
            earlier = [img[w] for w in adj[u] if w < u]
            cands = []
            for h in range(n):
                if h in placed:
                    continue
                if any(overlap.get(c, 0) >= 2 for c in owners[h]):
                    continue
                if any((min(h, x), max(h, x)) in used for x in earlier):
                    continue
                cands.append(h)
            if not cands:
                ok = False
                break
            h = rng.choice(cands)
            img.append(h)
            placed.add(h)
            for c in owners[h]:
                overlap[c] = overlap.get(c, 0) + 1
        if ok:
            edges = {(min(img[a], img[b]), max(img[a], img[b])) for a, b in G.edges}
            for c, k in overlap.items():
                if k == 2:
                    a, b = sorted(placed & host_sets[c])
                    if (a, b) in edges or (a, b) in host_edges[c]:
                        ok = False
                        break
        if not ok:
            failures += 1
            continue
        failures = 0
        idx = len(copies)
        copies.append(tuple(img))
        host_sets.append(placed)
        host_edges.append(edges)
        used |= edges
        for h in img:
            owners[h].append(idx)
    return PackingPlan(n, tuple(copies))


def verify_packing(plan: PackingPlan, template) -> bool:
    """Check a plan from scratch: injective copies, edge-disjoint, at most two
    shared vertices per pair of copies, and shared pairs never edges."""
    G = _as_graph(template)
    seen: set[tuple[int, int]] = set()
    images = []
    for c in plan.copies:
        if len(c) != G.num_vertices or len(set(c)) != len(c) or any(not 0 <= h < plan.n for h in c):
            return False
        E = {tuple(sorted((c[a], c[b]))) for a, b in G.edges}
        if E & seen:
            return False
        seen |= E
        images.append((set(c), E))
    for (Va, Ea), (Vb, Eb) in itertools.combinations(images, 2):
        shared = Va & Vb
        if len(shared) > 2:
            return False
        if len(shared) == 2:
            pair = tuple(sorted(shared))
            if pair in Ea or pair in Eb:
                return False
    return True


@dataclass(frozen=True)
class EdgeOrigin:
    copy: int
    petal: int
    core: int  # host vertex


def lifted_union(lifted: LiftedGraph, plan: PackingPlan) -> tuple[Hypergraph, dict[tuple[int, ...], EdgeOrigin]]:
    """Map the lifted graph through every copy and take the union."""
    origin: dict[tuple[int, ...], EdgeOrigin] = {}
    for ci, inj in enumerate(plan.copies):
        for x in lifted.meta:
            e = tuple(sorted(inj[v] for v in x.edge))
            if e in origin:
                raise ValueError(f"edge {e} produced by two copies")
            origin[e] = EdgeOrigin(ci, x.petal, inj[x.core])
    F = Hypergraph(lifted.graph.r, plan.n, tuple(origin))
    return F, origin


def check_copy_dichotomy(F: Hypergraph, origin: dict[tuple[int, ...], EdgeOrigin]) -> bool:
    """Edges from one copy share at most two vertices; edges from different copies at most one."""
    if len(F) < 2:
        return True
    inc = F.incidence_matrix
    inter = inc @ inc.T
    copy = [origin[e].copy for e in F.edges]
    for i in range(len(F)):
        for j in range(i + 1, len(F)):
            cap = 2 if copy[i] == copy[j] else 1
            if inter[i, j] > cap:
                return False
    return True


def packing_target(n: int, template: GtTemplate) -> Fraction:
    """Copy count n^2 / (2 |G_t|) promised asymptotically by nibble packings."""
    return Fraction(n * n, 2 * template.expected_edge_count())


def construct_lifted(
    H: Hypergraph, t: int, n: int, seed: int, max_failures: int = 2000
) -> tuple[Hypergraph, PackingPlan]:
    """Almost linear G_{r+1}(3r-1, 3)-free (r+1)-graph on ``n`` vertices from seed ``H``.

    ``H`` must be almost linear and G_r(3r-4, 3)-free; otherwise
    :class:`NotFreeError` (a ``ValueError``) carries the witness. The
    result has ``m * t * len(plan)`` edges.
    """
    if not is_almost_linear(H):
        raise NotFreeError(
            f"seed graph is not almost linear (max pairwise intersection {max_pairwise_intersection(H)})"
        )
    w = is_free(H, 3 * H.r - 4, 3)
    if w is not True:
        raise NotFreeError(f"seed graph is not G_{H.r}({3 * H.r - 4},3)-free: {w.describe(H)}", w)
    tp = build_component_graph(H, t)
    if n < tp.num_vertices:
        raise ValueError(f"n={n} is smaller than the {tp.num_vertices}-vertex component graph")
    lifted = lift(tp)
    plan = greedy_induced_packing(n, tp, seed, max_failures)
    F, _ = lifted_union(lifted, plan)
    return F, plan
