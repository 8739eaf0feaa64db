"""Strongly 3-perfect hashing matrices built from polynomial evaluation.

A matrix has ``r`` rows over GF(q). Row ``i`` separates a set of columns
when their entries in that row are pairwise distinct. The matrix is
strongly 3-perfect hashing when every three distinct columns are
separated by more than ``r - 2k + |I|`` rows, ``I`` being the rows where
all three columns agree.

Row indices are 0-based throughout.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import BudgetExceeded, VectorSearchError
from .ff import Polynomial, PrimeField, is_prime
from .hypergraph import Hypergraph, naive_budget

# Auto mode enumerates every triple below this many; above it, pruned search.
FULL_ENUMERATION_THRESHOLD = 50_000
DEFAULT_FULL_BUDGET = 10**8


@dataclass(frozen=True)
class EvaluationVector:
    q: int
    entries: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(int(a) for a in self.entries))
        if any(not 0 <= a < self.q for a in self.entries):
            raise ValueError(f"entries {self.entries} not all in range({self.q})")

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def nonrepetitive(self) -> bool:
        return len(set(self.entries)) == len(self.entries)


@dataclass(frozen=True)
class CodeMatrix:
    """An ``r x m`` matrix stored column-wise.

    ``labels`` holds the generating polynomial of every column when the
    matrix came from :func:`build_matrix`, otherwise ``None``.
    """

    r: int
    q: int
    k: int
    columns: tuple[tuple[int, ...], ...]
    vector: EvaluationVector | None = None
    labels: tuple[Polynomial, ...] | None = None

    def __post_init__(self):
        cols = tuple(tuple(int(x) for x in c) for c in self.columns)
        for c in cols:
            if len(c) != self.r or any(not 0 <= x < self.q for x in c):
                raise ValueError(f"column {c} is not a length-{self.r} vector over range({self.q})")
        object.__setattr__(self, "columns", cols)

    @property
    def m(self) -> int:
        return len(self.columns)

    @cached_property
    def array(self) -> np.ndarray:
        """Columns as an (m, r) integer array."""
        return np.array(self.columns, dtype=np.int64).reshape(len(self.columns), self.r)

    def submatrix(self, cols: Sequence[int] | None = None, rows: Sequence[int] | None = None) -> CodeMatrix:
        cols = range(self.m) if cols is None else cols
        rows = range(self.r) if rows is None else rows
        vec = None
        if self.vector is not None:
            vec = EvaluationVector(self.q, tuple(self.vector.entries[i] for i in rows))
        return CodeMatrix(
            len(rows),
            self.q,
            self.k,
            tuple(tuple(self.columns[j][i] for i in rows) for j in cols),
            vec,
            None,
        )

    def to_text(self) -> str:
        lines = [f"{self.r} {self.m} {self.q} {self.k}"]
        for i in range(self.r):
            lines.append(" ".join(str(c[i]) for c in self.columns))
        lines.append(" ".join(map(str, self.vector.entries)) if self.vector is not None else "")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> CodeMatrix:
        lines = text.split("\n")
        if len(lines) < 2 or lines[-1] != "":
            raise ValueError("matrix file must end with a newline")
        lines.pop()
        r, m, q, k = (int(x) for x in lines[0].split())
        if len(lines) != r + 2:
            raise ValueError(f"expected {r + 2} lines, found {len(lines)}")
        rows = [tuple(int(x) for x in ln.split()) for ln in lines[1 : r + 1]]
        if any(len(row) != m for row in rows):
            raise ValueError(f"every row must have {m} entries")
        vec_line = lines[r + 1].split()
        vec = EvaluationVector(q, tuple(int(x) for x in vec_line)) if vec_line else None
        cols = tuple(tuple(row[j] for row in rows) for j in range(m))
        labels = None
        if vec is not None and len(vec) == r and m == q**k and is_prime(q):
            built = build_matrix(q, k, vec)
            if built.columns == cols:
                labels = built.labels
        return cls(r, q, k, cols, vec, labels)

    def write(self, path) -> None:
        Path(path).write_bytes(self.to_text().encode("ascii"))

    @classmethod
    def read(cls, path) -> CodeMatrix:
        return cls.from_text(Path(path).read_bytes().decode("ascii"))


@dataclass(frozen=True)
class SeparationReport:
    """Separation data for one column triple; falsy when the triple breaks the condition."""

    triple: tuple[int, int, int]
    common: frozenset[int]
    separating: frozenset[int]
    threshold: int

    def __bool__(self) -> bool:
        return self.passes

    @property
    def passes(self) -> bool:
        return len(self.separating) > self.threshold


def common_rows(*columns: Sequence[int]) -> frozenset[int]:
    """Rows on which all the given columns agree."""
    if len({len(c) for c in columns}) > 1:
        raise ValueError("columns differ in length")
    return frozenset(i for i, vals in enumerate(zip(*columns)) if len(set(vals)) == 1)


def separating_rows(c1: Sequence[int], c2: Sequence[int], c3: Sequence[int]) -> frozenset[int]:
    """Rows on which the three columns take pairwise distinct values."""
    if not len(c1) == len(c2) == len(c3):
        raise ValueError("columns differ in length")
    return frozenset(i for i, vals in enumerate(zip(c1, c2, c3)) if len(set(vals)) == 3)


def separation_report(M: CodeMatrix, triple: Sequence[int]) -> SeparationReport:
    a, b, c = (M.columns[j] for j in triple)
    common = common_rows(a, b, c)
    return SeparationReport(
        tuple(sorted(triple)), common, separating_rows(a, b, c), M.r - 2 * M.k + len(common)
    )


def build_matrix(q: int, k: int, vector: EvaluationVector | Sequence[int]) -> CodeMatrix:
    """Evaluation matrix: one column (f(a_1), ..., f(a_r)) per f with deg f < k.

    Columns follow lexicographic coefficient order, constant term most
    significant, so column j has coefficients given by the base-q digits
    of j.
    """
    field = PrimeField(q)
    if not isinstance(vector, EvaluationVector):
        vector = EvaluationVector(q, tuple(vector))
    if vector.q != q:
        raise ValueError("evaluation vector is over a different field")
    if k < 1:
        raise ValueError("k must be positive")
    alphas = np.array(vector.entries, dtype=np.int64)
    r = len(alphas)
    powers = np.ones((k, r), dtype=np.int64)
    for d in range(1, k):
        powers[d] = powers[d - 1] * alphas % q
    coeffs = np.array(list(itertools.product(range(q), repeat=k)), dtype=np.int64).reshape(-1, k)
    values = coeffs @ powers % q
    labels = tuple(Polynomial(tuple(int(c) for c in row), field) for row in coeffs)
    return CodeMatrix(r, q, k, tuple(map(tuple, values.tolist())), vector, labels)


def _full_scan(M: CodeMatrix, chunk: int = 128, dense_limit: int = 4096):
    """First failing triple in lexicographic order, by direct enumeration.

    A row separates a triple exactly when no two of its columns agree
    there, so with per-pair agreement bitmasks the separating rows are the
    complement of ab | ac | bc and the common rows are ab & ac.
    """
    A = M.array
    m, r, k = M.m, M.r, M.k
    if m < 3:
        return None
    if m > dense_limit:
        return _full_scan_columns(M)
    P = _agreement_masks(A)
    for i in range(m - 2):
        Pi = P[i]
        for j0 in range(i + 1, m - 1, chunk):
            j1 = min(j0 + chunk, m - 1)
            ab = Pi[j0:j1, None]
            ac = Pi[None, j0 + 1 :]
            bc = P[j0:j1, j0 + 1 :]
            sep = r - np.bitwise_count(ab | ac | bc).astype(np.int64)
            common = np.bitwise_count(ab & ac).astype(np.int64)
            jj = np.arange(j0, j1)[:, None]
            ll = np.arange(j0 + 1, m)[None, :]
            bad = (sep <= r - 2 * k + common) & (ll > jj)
            if bad.any():
                a, b = np.unravel_index(int(np.argmax(bad)), bad.shape)
                return (i, j0 + int(a), j0 + 1 + int(b))
    return None


def _full_scan_columns(M: CodeMatrix):
    """Column-by-column variant of the full scan for very wide matrices."""
    A = M.array
    m, r, k = M.m, M.r, M.k
    for i in range(m - 2):
        a = A[i]
        for j in range(i + 1, m - 1):
            b = A[j]
            C = A[j + 1 :]
            ab_eq = a == b
            sep = (~ab_eq) & (C != a) & (C != b)
            common = ab_eq & (C == a)
            bad = sep.sum(axis=1) <= r - 2 * k + common.sum(axis=1)
            if bad.any():
                return (i, j, j + 1 + int(np.argmax(bad)))
    return None


def _agreement_masks(A: np.ndarray) -> np.ndarray:
    """(m, m) matrix whose (a, b) entry has bit i set iff columns a, b agree in row i."""
    m, r = A.shape
    dtype = np.uint16 if r <= 16 else (np.uint32 if r <= 32 else np.uint64)
    out = np.zeros((m, m), dtype=dtype)
    for i in range(r):
        col = A[:, i]
        out |= (col[:, None] == col[None, :]).astype(dtype) << dtype(i)
    return out


def _agreement_row(A: np.ndarray, c: int, dtype) -> np.ndarray:
    out = np.zeros(A.shape[0], dtype=dtype)
    for i in range(A.shape[1]):
        out |= (A[:, i] == A[c, i]).astype(dtype) << dtype(i)
    return out


def _pruned_scan(M: CodeMatrix, dense_limit: int = 4096):
    """Lexicographically first failing triple, visiting only promising ones.

    With a_xy the number of rows where two columns agree and X the rows
    where some pair agrees, |X| = a12 + a13 + a23 - 2|I|. A triple fails
    iff |X| >= 2k - |I|, i.e. a12 + a13 + a23 >= 2k + |I|, so some pair
    agrees on at least ceil(2k/3) rows. Only those pairs seed candidates.
    """
    A = M.array
    m, r, k = M.m, M.r, M.k
    if m < 3:
        return None
    heavy = max(1, -(-2 * k // 3))
    dtype = np.uint16 if r <= 16 else (np.uint32 if r <= 32 else np.uint64)
    dense = _agreement_masks(A) if m <= dense_limit else None
    idx = np.arange(m)
    best = None

    def row(c):
        return dense[c] if dense is not None else _agreement_row(A, c, dtype)

    for c1 in range(m):
        r1 = row(c1)
        cnt1 = np.bitwise_count(r1).astype(np.int64)
        partners = np.flatnonzero((cnt1 >= heavy) & (idx > c1))
        for c2 in partners:
            r2 = row(int(c2))
            m12 = r1[c2]
            union = np.bitwise_count(r1 | r2 | m12).astype(np.int64)
            common = np.bitwise_count(r1 & m12).astype(np.int64)
            bad = union >= 2 * k - common
            bad[c1] = bad[c2] = False
            if bad.any():
                c3 = int(np.argmax(bad))
                trip = tuple(sorted((c1, int(c2), c3)))
                if best is None or trip < best:
                    best = trip
    return best


def is_strongly_3ph(M: CodeMatrix, method: str = "auto", budget: int | None = None):
    """True if ``M`` is strongly 3-perfect hashing, else the first failing triple.

    ``method`` is ``"full"`` (every triple), ``"pruned"`` (pair-agreement
    index) or ``"auto"`` (full for small matrices). Full enumeration
    refuses more than ``budget`` triples.
    """
    m = M.m
    triples = math.comb(m, 3)
    if method == "auto":
        method = "full" if triples <= FULL_ENUMERATION_THRESHOLD else "pruned"
    if method == "full":
        cap = budget if budget is not None else min(DEFAULT_FULL_BUDGET, naive_budget())
        if triples > cap:
            raise BudgetExceeded(f"C({m},3) = {triples} triples exceeds budget {cap}")
        found = _full_scan(M)
    elif method == "pruned":
        found = _pruned_scan(M)
    else:
        raise ValueError(f"unknown method {method!r}")
    return True if found is None else separation_report(M, found)


def find_good_vector(q: int, k: int, r: int, seed: int = 0, max_tries: int = 100, method: str = "auto"):
    """First evaluation vector whose matrix verifies as strongly 3-perfect hashing.

    Tries the identity vector (0, 1, ..., r-1), then seeded random
    nonrepetitive vectors. Raises :class:`VectorSearchError` carrying the
    number of tries when none verifies.
    """
    if not is_prime(q):
        raise ValueError(f"q={q} is not prime")
    if not r > k >= 2:
        raise ValueError(f"need r > k >= 2, got r={r}, k={k}")
    if r > q:
        raise ValueError(f"no nonrepetitive vector of length {r} over GF({q})")
    rng = random.Random(seed)
    tried = set()
    tries = 0
    candidate = tuple(range(r))
    while tries < max_tries:
        if candidate not in tried:
            tried.add(candidate)
            tries += 1
            vec = EvaluationVector(q, candidate)
            if is_strongly_3ph(build_matrix(q, k, vec), method=method) is True:
                return vec
        if len(tried) == math.perm(q, r):
            break
        candidate = tuple(rng.sample(range(q), r))
    raise VectorSearchError(f"no strongly 3-perfect hashing vector found in {tries} tries", tries)


def matrix_to_hypergraph(M: CodeMatrix) -> Hypergraph:
    """The r-partite r-graph with one edge per column.

    Vertex ``i*q + a`` stands for symbol ``a`` in row ``i``; part ``i``
    is ``range(i*q, (i+1)*q)``.
    """
    q = M.q
    edges = tuple(tuple(i * q + x for i, x in enumerate(c)) for c in M.columns)
    return Hypergraph(M.r, M.r * q, edges)
