"""Closed-form density bounds and the codegree upper-bound certificate.

Densities are limits of ``f_r(n, 3r - 2k, 3) / n^k`` and are returned as
exact :class:`fractions.Fraction` values.

The certificate re-runs the counting argument behind the upper bound on a
concrete free graph. The graph is pruned until no ``(k-1)``-subset has
codegree one. The ``k``-subsets of codegree one (``K1``) and two (``K2``)
are then counted, and every structural step of the argument is checked.
Each check is a theorem for free inputs, so a failure means a bug.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter, defaultdict
from dataclasses import asdict, dataclass
from fractions import Fraction

from .errors import CertificateError, NotFreeError
from .hypergraph import Hypergraph, is_free, prune_codegree_one


def _falling(r: int, k: int) -> int:
    return math.perm(r, k)


def _check_rk(r: int, k: int) -> None:
    if not r > k >= 2:
        raise ValueError(f"need r > k >= 2, got r={r}, k={k}")


def lower_bound_density(r: int, k: int) -> Fraction:
    """Density reached by the recursive algebraic construction: 1/(r^k - r)."""
    _check_rk(r, k)
    return Fraction(1, r**k - r)


def upper_bound_density(r: int, k: int) -> Fraction:
    """Upper bound from the codegree count: 1/(k! C(r,k) - k!/2)."""
    _check_rk(r, k)
    kf = math.factorial(k)
    return 1 / (Fraction(kf * math.comb(r, k)) - Fraction(kf, 2))


def pi_r23(r: int) -> Fraction:
    """Density of the k = 2 problem: 1/(r^2 - r - 1)."""
    if r < 3:
        raise ValueError(f"need r >= 3, got {r}")
    return Fraction(1, r * r - r - 1)


def bes_edge_upper(n: int, r: int, k: int, e: int) -> Fraction:
    """Edge bound (e-1) C(n,k) / C(r,k) from k-sets lying in at most e-1 edges."""
    if e < 1 or not 1 <= k <= r:
        raise ValueError("need e >= 1 and 1 <= k <= r")
    return Fraction((e - 1) * math.comb(n, k), math.comb(r, k))


def bes_density_upper(r: int, k: int, e: int) -> Fraction:
    """Density form of :func:`bes_edge_upper`: (e-1) / (r (r-1) ... (r-k+1))."""
    return Fraction(e - 1, _falling(r, k))


def bes_density_lower(r: int, k: int, e: int) -> float:
    """The classical probabilistic lower bound on the density.

    The (e-1)-th root is irrational in general, so this is a float meant
    for display only.
    """
    v = e * r - (e - 1) * k
    cr = math.comb(v, r)
    denom = 2 * cr * math.comb(cr, e) * math.factorial(r) ** e
    ratio = Fraction(math.factorial(v), denom)
    return float(ratio) ** (1.0 / (e - 1))


@dataclass(frozen=True)
class BoundRow:
    r: int
    k: int
    lower: Fraction
    upper: Fraction
    bes_upper: Fraction

    @property
    def ordered(self) -> bool:
        return self.lower < self.upper


def bound_table(r_values, k_values) -> list[BoundRow]:
    """Bounds for every admissible (r, k) with r > k >= 2."""
    rows = []
    for r in r_values:
        for k in k_values:
            if r > k >= 2:
                rows.append(
                    BoundRow(r, k, lower_bound_density(r, k), upper_bound_density(r, k), bes_density_upper(r, k, 3))
                )
    return rows


@dataclass(frozen=True)
class UpperBoundCertificate:
    k: int
    n: int
    r: int
    edges_in: int
    pruned_removed: int
    pruned_edges: int
    K1: int
    K2: int
    phi_disjoint: bool
    pair_intersection_exact_k: bool
    phi_in_K1: bool

    @property
    def slack(self) -> int:
        """K1 - K2 (2 C(r,k) - 2), nonnegative for every free input."""
        return self.K1 - self.K2 * (2 * math.comb(self.r, self.k) - 2)

    @property
    def double_count_holds(self) -> bool:
        return math.comb(self.r, self.k) * self.pruned_edges == self.K1 + 2 * self.K2

    @property
    def census_fits(self) -> bool:
        return self.K1 + self.K2 <= math.comb(self.n, self.k)

    @property
    def edge_bound(self) -> Fraction:
        """Bound on the pruned edge count implied by the three counting facts."""
        c = math.comb(self.r, self.k)
        return Fraction(2 * c, 2 * c - 1) * Fraction(math.comb(self.n, self.k), c)

    @property
    def within_edge_bound(self) -> bool:
        return self.pruned_edges <= self.edge_bound

    @property
    def all_hold(self) -> bool:
        return (
            self.phi_disjoint
            and self.pair_intersection_exact_k
            and self.phi_in_K1
            and self.slack >= 0
            and self.double_count_holds
            and self.census_fits
            and self.within_edge_bound
        )

    def to_json(self) -> dict:
        out = asdict(self)
        out.update(
            slack=self.slack,
            double_count_holds=self.double_count_holds,
            census_fits=self.census_fits,
            edge_bound=str(self.edge_bound),
            within_edge_bound=self.within_edge_bound,
            all_hold=self.all_hold,
        )
        return out


def certificate_check(H: Hypergraph, k: int) -> UpperBoundCertificate:
    """Run the codegree counting argument on ``H`` and check every step.

    ``H`` must be G_r(3r - 2k, 3)-free; otherwise :class:`NotFreeError`
    carries the violating triple. Any failed step raises
    :class:`CertificateError`.
    """
    r = H.r
    _check_rk(r, k)
    w = is_free(H, 3 * r - 2 * k, 3)
    if w is not True:
        raise NotFreeError(f"input is not G_{r}({3 * r - 2 * k},3)-free: {w.describe(H)}", w)

    F, removed = prune_codegree_one(H, k)
    holders: dict[tuple[int, ...], list[int]] = defaultdict(list)
    for i, A in enumerate(F.edges):
        for K in itertools.combinations(A, k):
            holders[K].append(i)
    deg = Counter(len(v) for v in holders.values())
    if max(deg, default=0) > 2:
        raise CertificateError("a k-subset lies in three edges of a free graph")
    K1, K2 = deg.get(1, 0), deg.get(2, 0)

    exact_k = True
    in_k1 = True
    seen: set[tuple[int, ...]] = set()
    disjoint = True
    expected = 2 * math.comb(r, k) - 2
    for K, (a, b) in ((K, h) for K, h in holders.items() if len(h) == 2):
        A, B = F.edges[a], F.edges[b]
        if len(set(A) & set(B)) != k:
            exact_k = False
            continue
        phi = (set(itertools.combinations(A, k)) | set(itertools.combinations(B, k))) - {K}
        if len(phi) != expected:
            raise CertificateError(f"|Phi_K| = {len(phi)} for K={K}, expected {expected}")
        for L in phi:
            if len(holders[L]) != 1:
                in_k1 = False
            if L in seen:
                disjoint = False
            seen.add(L)

    cert = UpperBoundCertificate(
        k=k,
        n=H.n,
        r=r,
        edges_in=len(H),
        pruned_removed=removed,
        pruned_edges=len(F),
        K1=K1,
        K2=K2,
        phi_disjoint=disjoint,
        pair_intersection_exact_k=exact_k,
        phi_in_K1=in_k1,
    )
    if not cert.all_hold:
        raise CertificateError(f"certificate step failed: {cert.to_json()}", cert)
    return cert
