"""Acceptance suite: one group of checks per numbered criterion.

Each test carries ``@pytest.mark.acceptance(number, title)``; the
conftest prints one PASS/FAIL line per criterion at the end of the run.
"""

from __future__ import annotations

import itertools
import json
import math
import random
import time
from fractions import Fraction
from functools import lru_cache

import numpy as np
import pytest

from oracles import brute_first_3ph_failure
from shforge.algebraic import construct_recursive
from shforge.bounds import certificate_check, lower_bound_density, pi_r23, upper_bound_density
from shforge.cli import main, sidecar
from shforge.errors import VectorSearchError
from shforge.hypergraph import (
    Hypergraph,
    is_almost_linear,
    is_free,
    is_free_naive,
    max_pairwise_intersection,
)
from shforge.lift import (
    build_component_graph,
    check_copy_dichotomy,
    check_lift,
    greedy_induced_packing,
    lift,
    lifted_union,
)
from shforge.oracle import SearchConfig, exact_max_edges, greedy_free_graph
from shforge.phm import (
    EvaluationVector,
    build_matrix,
    find_good_vector,
    is_strongly_3ph,
    matrix_to_hypergraph,
)

NAIVE_BUDGET = 10**10


# Shared constructions, built once and reused by the certificate and
# determinism criteria.


@lru_cache(maxsize=None)
def k2_matrix_graph(r: int, q: int) -> Hypergraph:
    vec = find_good_vector(q, 2, r, max_tries=1)
    return matrix_to_hypergraph(build_matrix(q, 2, vec))


@lru_cache(maxsize=None)
def recursive_graph(n: int):
    return construct_recursive(3, 2, n)


@lru_cache(maxsize=None)
def lift_pipeline():
    H = greedy_free_graph(SearchConfig(6, 3, 5, 3, almost_linear=True, seed=0))
    tp = build_component_graph(H, 2)
    lifted = lift(tp)
    plan = greedy_induced_packing(40, tp, seed=1)
    F, origin = lifted_union(lifted, plan)
    return H, tp, lifted, plan, F, origin


# 1. Bound formulas


@pytest.mark.acceptance(1, "bound formulas")
def test_bound_formulas():
    t0 = time.perf_counter()
    values = (
        upper_bound_density(3, 2),
        pi_r23(4),
        upper_bound_density(4, 2),
        lower_bound_density(3, 2),
    )
    elapsed = time.perf_counter() - t0
    assert values == (Fraction(1, 5), Fraction(1, 11), Fraction(1, 11), Fraction(1, 6))
    assert all(isinstance(v, Fraction) for v in values)
    assert elapsed < 1e-3


# 2. Algebraic pipeline, k = 2


@pytest.mark.acceptance(2, "algebraic pipeline k=2")
def test_algebraic_pipeline_k2():
    t0 = time.perf_counter()
    for r, q in [(3, 5), (3, 7), (4, 7), (4, 11)]:
        vec = find_good_vector(q, 2, r, max_tries=1)
        assert vec == EvaluationVector(q, tuple(range(r)))
        M = build_matrix(q, 2, vec)
        assert M.m == q**2 == len(set(M.columns))
        assert is_strongly_3ph(M, method="full") is True
        H = matrix_to_hypergraph(M)
        assert H == k2_matrix_graph(r, q)
        assert is_free_naive(H, 3 * r - 4, 3, budget=NAIVE_BUDGET) is True
        assert max_pairwise_intersection(H) <= 1
    assert time.perf_counter() - t0 < 60


# 3. Algebraic pipeline, k = 3


def _candidate_vectors(q: int, r: int, seed: int, count: int):
    """The candidate sequence find_good_vector walks through."""
    rng = random.Random(seed)
    seen, out = set(), []
    cand = tuple(range(r))
    while len(out) < count:
        if cand not in seen:
            seen.add(cand)
            out.append(cand)
        cand = tuple(rng.sample(range(q), r))
    return out


@pytest.mark.acceptance(3, "algebraic pipeline k=3")
@pytest.mark.slow
def test_algebraic_pipeline_k3():
    t0 = time.perf_counter()
    failures = []
    for r, q in [(4, 11), (5, 13)]:
        try:
            vec = find_good_vector(q, 3, r, seed=0, max_tries=500)
        except VectorSearchError as exc:
            assert exc.tries <= 500
            failures.append((r, q))
            continue
        M = build_matrix(q, 3, vec)
        assert is_strongly_3ph(M, method="full", budget=NAIVE_BUDGET) is True
        H = matrix_to_hypergraph(M)
        assert is_free_naive(H, 3 * r - 6, 3, budget=NAIVE_BUDGET) is True
        assert max_pairwise_intersection(H) <= 2
    if len(failures) == 2:
        # Both searches failed: the pruned rejections must be genuine.
        rng = random.Random(0)
        for r, q in failures:
            for cand in rng.sample(_candidate_vectors(q, r, 0, 500), 10):
                M = build_matrix(q, 3, EvaluationVector(q, cand))
                assert is_strongly_3ph(M, method="full", budget=NAIVE_BUDGET) is not True
    assert time.perf_counter() - t0 < 600


# 4. Recursion identity


@pytest.mark.acceptance(4, "recursion identity")
def test_recursion_small():
    t0 = time.perf_counter()
    H, report = recursive_graph(15)
    assert len(H) == 31
    top = report.levels[0]
    assert (top.strategy, top.skeleton_edges, top.child_edges) == ("skeleton", 25, 2)
    assert report.verified is True
    assert is_free_naive(H, 5, 3) is True
    assert time.perf_counter() - t0 < 300


def _sampled_triple_violations(H: Hypergraph, v: int, samples: int, seed: int) -> int:
    inc = H.incidence_matrix.astype(bool)
    rng = np.random.default_rng(seed)
    m = len(H)
    bad = 0
    for start in range(0, samples, 100_000):
        size = min(100_000, samples - start)
        idx = rng.integers(0, m, size=(size, 3))
        distinct = (idx[:, 0] != idx[:, 1]) & (idx[:, 0] != idx[:, 2]) & (idx[:, 1] != idx[:, 2])
        while not distinct.all():
            idx[~distinct] = rng.integers(0, m, size=(int((~distinct).sum()), 3))
            distinct = (idx[:, 0] != idx[:, 1]) & (idx[:, 0] != idx[:, 2]) & (idx[:, 1] != idx[:, 2])
        union = inc[idx[:, 0]] | inc[idx[:, 1]] | inc[idx[:, 2]]
        bad += int((union.sum(axis=1) <= v).sum())
    return bad


@pytest.mark.acceptance(4, "recursion identity")
def test_recursion_large():
    t0 = time.perf_counter()
    H, report = recursive_graph(75)
    skeleton = [lv for lv in report.levels if lv.strategy == "skeleton"]
    assert skeleton
    by_n = {lv.n: lv for lv in report.levels}
    for lv in skeleton:
        assert lv.edge_count == lv.q**2 + 3 * by_n[lv.child_n].edge_count
    assert report.level_identity_holds()
    assert is_free(H, 5, 3) is True
    assert max_pairwise_intersection(H) <= 1
    assert _sampled_triple_violations(H, 5, 10**6, seed=4) == 0
    assert time.perf_counter() - t0 < 300


# 5. Lift pipeline


@pytest.mark.acceptance(5, "lift pipeline")
def test_lift_pipeline():
    t0 = time.perf_counter()
    H, tp, lifted, plan, F, origin = lift_pipeline()
    m = len(H)
    assert H.n == 6 and m >= 3
    assert is_almost_linear(H) and is_free(H, 5, 3) is True
    assert len(tp.E1) == 2 * math.comb(6, 2)
    assert len(tp.E2) == math.comb(m, 2)
    assert len(tp.E3) == 3 * m * 2
    assert len(tp.graph.edges) == 2 * math.comb(6, 2) + math.comb(m, 2) + 3 * m * 2
    assert len(lifted.graph) == m * 2
    check = check_lift(lifted, H)
    assert all(value is True for value in vars(check).values())
    assert len(F) == m * 2 * len(plan)
    assert is_free_naive(F, 8, 3, budget=NAIVE_BUDGET) is True
    assert is_almost_linear(F)
    assert check_copy_dichotomy(F, origin)
    assert time.perf_counter() - t0 < 120


# 6. Certificates


def _assert_certificate(H: Hypergraph, k: int):
    cert = certificate_check(H, k)
    c = math.comb(H.r, k)
    assert cert.phi_disjoint and cert.pair_intersection_exact_k and cert.phi_in_K1
    assert c * cert.pruned_edges == cert.K1 + 2 * cert.K2
    assert cert.K2 * (2 * c - 2) <= cert.K1
    assert cert.K1 + cert.K2 <= math.comb(H.n, k)
    assert cert.pruned_edges <= Fraction(2 * c, 2 * c - 1) * Fraction(math.comb(H.n, k), c)
    assert cert.all_hold


@pytest.mark.acceptance(6, "certificates on constructed graphs")
@pytest.mark.parametrize("r,q", [(3, 5), (3, 7), (4, 7), (4, 11)])
def test_certificate_matrix_graphs(r, q):
    _assert_certificate(k2_matrix_graph(r, q), 2)


@pytest.mark.acceptance(6, "certificates on constructed graphs")
@pytest.mark.parametrize("n", [15, 75])
def test_certificate_recursive_graphs(n):
    _assert_certificate(recursive_graph(n)[0], 2)


@pytest.mark.acceptance(6, "certificates on constructed graphs")
def test_certificate_lifted_graph():
    F = lift_pipeline()[4]
    # 4-uniform and G_4(8, 3)-free, which is 3r - 2k with k = 2.
    _assert_certificate(F, 2)


# 7. Exact oracle goldens and greedy <= exact

# Measured before the grid below was drawn: every config with r in {3, 4},
# e in {2, 3}, r <= v < e*r, C(n, r) <= 300 and n <= 11, except these ones,
# which the exact search did not settle within one second.
SLOW_CONFIGS = frozenset(
    [
        (10, 3, 4, 2, False), (10, 3, 4, 2, True), (11, 3, 4, 2, False), (11, 3, 4, 2, True),
        (11, 3, 3, 3, False), (11, 3, 3, 3, True), (7, 3, 4, 3, False), (7, 3, 4, 3, True),
        (8, 3, 4, 3, False), (8, 3, 4, 3, True), (9, 3, 4, 3, False), (9, 3, 4, 3, True),
        (10, 3, 4, 3, False), (10, 3, 4, 3, True), (11, 3, 4, 3, False), (11, 3, 4, 3, True),
        (8, 3, 5, 3, False), (8, 3, 5, 3, True), (9, 3, 5, 3, False), (9, 3, 5, 3, True),
        (10, 3, 5, 3, False), (10, 3, 5, 3, True), (11, 3, 5, 3, False), (11, 3, 5, 3, True),
        (10, 3, 6, 3, False), (10, 3, 6, 3, True), (11, 3, 6, 3, False), (11, 3, 6, 3, True),
        (8, 4, 4, 2, True), (9, 4, 4, 2, True), (10, 4, 4, 2, True), (9, 4, 5, 2, False),
        (9, 4, 5, 2, True), (10, 4, 5, 2, False), (10, 4, 5, 2, True), (8, 4, 4, 3, True),
        (9, 4, 4, 3, True), (10, 4, 4, 3, False), (10, 4, 4, 3, True), (7, 4, 5, 3, False),
        (8, 4, 5, 3, False), (8, 4, 5, 3, True), (9, 4, 5, 3, False), (9, 4, 5, 3, True),
        (10, 4, 5, 3, False), (10, 4, 5, 3, True), (8, 4, 6, 3, False), (8, 4, 6, 3, True),
        (9, 4, 6, 3, False), (9, 4, 6, 3, True), (10, 4, 6, 3, False), (10, 4, 6, 3, True),
        (9, 4, 7, 3, False), (9, 4, 7, 3, True), (10, 4, 7, 3, False), (10, 4, 7, 3, True),
        (10, 4, 8, 3, False), (10, 4, 8, 3, True),
    ]
)


def _oracle_pool():
    pool = []
    for r in (3, 4):
        for e in (2, 3):
            for v in range(r, e * r):
                for n in range(r, 12):
                    if math.comb(n, r) > 300:
                        break
                    for al in (False, True):
                        if (n, r, v, e, al) not in SLOW_CONFIGS:
                            pool.append((n, r, v, e, al))
    return pool


@pytest.mark.acceptance(7, "exact oracle goldens")
def test_oracle_goldens():
    for n, expected in [(3, 1), (4, 2), (5, 2)]:
        count, H = exact_max_edges(SearchConfig(n, 3, 5, 3))
        assert count == expected == len(H)


@pytest.mark.acceptance(7, "exact oracle goldens")
def test_greedy_never_beats_exact():
    t0 = time.perf_counter()
    rng = random.Random(7)
    grid = rng.sample(_oracle_pool(), 20)
    for n, r, v, e, al in grid:
        cfg = SearchConfig(n, r, v, e, almost_linear=al, time_budget=30, seed=rng.randrange(10**6))
        exact, _ = exact_max_edges(cfg)  # a BudgetExceeded here fails the criterion
        greedy = greedy_free_graph(cfg)
        assert is_free_naive(greedy, v, e) is True
        assert len(greedy) <= exact, (n, r, v, e, al)
    assert time.perf_counter() - t0 < 120


# 8. Oracle equivalence


@pytest.mark.acceptance(8, "oracle equivalence")
def test_freeness_paths_agree():
    t0 = time.perf_counter()
    rng = random.Random(8)
    outcomes = set()
    for _ in range(50):
        r = rng.choice([3, 4, 5])
        n = rng.randint(r + 2, 4 * r + 6)
        e = rng.choice([2, 3])
        v = rng.randint(r, e * r - 1)
        pool = list(itertools.combinations(range(n), r))
        edges = rng.sample(pool, min(len(pool), rng.randint(2, 150)))
        H = Hypergraph(r, n, tuple(edges))
        fast = is_free(H, v, e)
        naive = is_free_naive(H, v, e, budget=NAIVE_BUDGET)
        assert fast == naive
        outcomes.add(fast is True)
    assert outcomes == {True, False}
    assert time.perf_counter() - t0 < 180


@pytest.mark.acceptance(8, "oracle equivalence")
def test_3ph_paths_agree():
    t0 = time.perf_counter()
    rng = random.Random(88)
    outcomes = set()
    for _ in range(10):
        q = rng.choice([5, 7, 11])
        k = rng.choice([2, 3])
        r = rng.randint(k + 1, min(q, 6))
        M = build_matrix(q, k, tuple(rng.sample(range(q), r)))
        cols = sorted(rng.sample(range(M.m), min(M.m, 90)))
        S = M.submatrix(cols)
        expected = brute_first_3ph_failure(S.columns, S.r, S.k)
        for method in ("pruned", "full"):
            got = is_strongly_3ph(S, method=method)
            assert (got is True) if expected is None else (got.triple == expected)
        outcomes.add(expected is None)
    assert outcomes == {True, False}
    assert time.perf_counter() - t0 < 180


# 9. Determinism


def _run_cli(argv):
    code = main([str(a) for a in argv])
    assert code == 0


def _produce(root):
    root.mkdir()
    for r, q in [(3, 5), (3, 7), (4, 7), (4, 11)]:
        vec = find_good_vector(q, 2, r, max_tries=1)
        M = build_matrix(q, 2, vec)
        M.write(root / f"m{r}_{q}.phm")
        matrix_to_hypergraph(M).write(root / f"m{r}_{q}.hg")
    for n in (15, 75):
        _run_cli(["construct-algebraic", "--r", 3, "--k", 2, "--n", n, "--seed", 1, "--out", root / f"alg{n}.hg"])
    greedy_free_graph(SearchConfig(6, 3, 5, 3, almost_linear=True, seed=0)).write(root / "seed.hg")
    _run_cli(["construct-lift", root / "seed.hg", "--t", 2, "--n", 40, "--seed", 1, "--out", root / "lift.hg"])


@pytest.mark.acceptance(9, "determinism")
def test_determinism(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    _produce(a)
    _produce(b)
    capsys.readouterr()
    names = sorted(p.name for p in a.iterdir() if p.suffix in (".hg", ".phm"))
    assert names == sorted(p.name for p in b.iterdir() if p.suffix in (".hg", ".phm"))
    assert len(names) == 12
    for name in names:
        assert (a / name).read_bytes() == (b / name).read_bytes(), name
    for stem in ("alg15", "alg75", "lift"):
        ma = json.loads(sidecar(a / f"{stem}.hg", "manifest").read_text())
        mb = json.loads(sidecar(b / f"{stem}.hg", "manifest").read_text())
        ma.pop("elapsed_seconds")
        mb.pop("elapsed_seconds")
        assert ma == mb
        assert ma["outputs"][f"{stem}.hg"]
