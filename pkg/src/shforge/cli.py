"""Command-line front end.

Exit codes: 0 success or free, 1 a definite negative (a witness was
found or verification failed), 2 usage or precondition error, 3 a
resource budget was exhausted.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from pathlib import Path

from . import __version__
from .algebraic import RecursionBudget, construct_recursive
from .bounds import bound_table, certificate_check
from .errors import BudgetExceeded, CertificateError, NotFreeError
from .hypergraph import Hypergraph, is_free, is_free_naive
from .lift import build_component_graph, construct_lifted, lift, lifted_union, packing_target, verify_packing
from .oracle import SearchConfig, exact_max_edges

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class _Usage(Exception):
    pass


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def sidecar(out: Path, tag: str) -> Path:
    """``foo.hg`` -> ``foo.<tag>.json``."""
    return out.with_name(f"{out.stem}.{tag}.json")


def _write_manifest(out: Path, command: str, params: dict, seed, inputs: list[Path], outputs: list[Path], t0: float):
    manifest = {
        "command": command,
        "parameters": params,
        "seed": seed,
        "version": __version__,
        "inputs": {p.name: _sha256(p) for p in inputs},
        "outputs": {p.name: _sha256(p) for p in outputs},
        "elapsed_seconds": round(time.monotonic() - t0, 3),
    }
    sidecar(out, "manifest").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _int_range(text: str) -> list[int]:
    """``"3"``, ``"3..5"`` or ``"3,4,7"``."""
    try:
        if ".." in text:
            a, b = text.split("..")
            return list(range(int(a), int(b) + 1))
        return [int(x) for x in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad integer range {text!r}") from exc


def _read_graph(path: str) -> Hypergraph:
    try:
        return Hypergraph.read(path)
    except (OSError, ValueError) as exc:
        raise _Usage(f"cannot read {path}: {exc}") from exc


def cmd_construct_algebraic(a) -> int:
    t0 = time.monotonic()
    if not a.r > a.k >= 2 or a.n < 0:
        raise _Usage(f"need r > k >= 2 and n >= 0, got r={a.r}, k={a.k}, n={a.n}")
    budget = RecursionBudget(seed=a.seed, max_vector_tries=a.max_tries)
    H, report = construct_recursive(a.r, a.k, a.n, budget)
    out = Path(a.out)
    H.write(out)
    rep = sidecar(out, "report")
    rep.write_text(report.dumps())
    params = {"r": a.r, "k": a.k, "n": a.n, "max_tries": a.max_tries}
    _write_manifest(out, "construct-algebraic", params, a.seed, [], [out, rep], t0)
    print(f"{len(H)} edges on {a.n} vertices, verified={report.verified}")
    return EXIT_OK if report.verified else EXIT_NEGATIVE


def cmd_construct_lift(a) -> int:
    t0 = time.monotonic()
    H = _read_graph(a.seed_graph)
    try:
        F, plan = construct_lifted(H, a.t, a.n, a.seed, a.max_failures)
    except ValueError as exc:  # NotFreeError included
        raise _Usage(str(exc)) from exc
    tp = build_component_graph(H, a.t)
    lifted = lift(tp)
    _, origin = lifted_union(lifted, plan)
    out = Path(a.out)
    F.write(out)
    plan_path = sidecar(out, "plan")
    plan_path.write_text(plan.to_json())
    meta_path = sidecar(out, "meta")
    rows = [{"edge": list(e), "copy": o.copy, "petal": o.petal, "core": o.core} for e, o in sorted(origin.items())]
    meta_path.write_text(json.dumps(rows, indent=1) + "\n")
    free = is_free(F, 3 * H.r - 1, 3) is True
    ok = free and verify_packing(plan, tp)
    report = {
        "edges": len(F),
        "copies": len(plan),
        "copy_target": str(packing_target(a.n, tp)),
        "m": tp.m,
        "t": a.t,
        "m_over_t": str(tp.m / a.t),
        "template_edges": len(tp.graph.edges),
        "verified": ok,
    }
    rep = sidecar(out, "report")
    rep.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    params = {"t": a.t, "n": a.n, "max_failures": a.max_failures}
    _write_manifest(out, "construct-lift", params, a.seed, [Path(a.seed_graph)], [out, plan_path, meta_path, rep], t0)
    print(f"{len(F)} edges from {len(plan)} copies, verified={ok}")
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_verify(a) -> int:
    H = _read_graph(a.path)
    if a.e < 2 or a.v < H.r:
        raise _Usage(f"need e >= 2 and v >= r={H.r}")
    if a.naive:
        res = is_free_naive(H, a.v, a.e, budget=a.budget, workers=a.threads or os.cpu_count() or 1)
    else:
        res = is_free(H, a.v, a.e)
    if res is True:
        print("FREE")
        return EXIT_OK
    print(f"WITNESS {res.describe(H)}")
    return EXIT_NEGATIVE


def cmd_certify(a) -> int:
    H = _read_graph(a.path)
    if not H.r > a.k >= 2:
        raise _Usage(f"need r > k >= 2, got r={H.r}, k={a.k}")
    try:
        cert = certificate_check(H, a.k)
    except NotFreeError as exc:
        raise _Usage(str(exc)) from exc
    except CertificateError as exc:
        print(f"CERTIFICATE FAILED {exc}")
        return EXIT_NEGATIVE
    print(json.dumps(cert.to_json(), indent=2, sort_keys=True))
    return EXIT_OK


def cmd_bounds(a) -> int:
    rows = bound_table(a.r, a.k)
    if not rows:
        raise _Usage("no admissible (r, k) with r > k >= 2 in the requested ranges")
    print(f"{'r':>3} {'k':>3}  {'lower':>14} {'upper':>14} {'codegree':>14}  ordered")
    for row in rows:
        cells = [f"{str(x)} ({float(x):.5f})" for x in (row.lower, row.upper, row.bes_upper)]
        print(f"{row.r:>3} {row.k:>3}  " + " ".join(f"{c:>14}" for c in cells) + f"  {row.ordered}")
    return EXIT_OK


def cmd_oracle(a) -> int:
    try:
        cfg = SearchConfig(
            n=a.n, r=a.r, v=a.v, e=a.e, almost_linear=a.almost_linear,
            max_pairwise_intersection=a.max_intersection, time_budget=a.time_budget,
        )
    except ValueError as exc:
        raise _Usage(str(exc)) from exc
    t0 = time.monotonic()
    value, witness = exact_max_edges(cfg)
    row = {"n": a.n, "r": a.r, "v": a.v, "e": a.e, "value": value, "elapsed": round(time.monotonic() - t0, 3)}
    if a.out:
        out = Path(a.out)
        witness.write(out)
        sidecar(out, "result").write_text(json.dumps(row, sort_keys=True) + "\n")
    print(value)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shforge", description="Sparse hypergraph constructions and verifiers.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("construct-algebraic", help="recursive algebraic construction")
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--max-tries", type=int, default=100)
    s.set_defaults(func=cmd_construct_algebraic)

    s = sub.add_parser("construct-lift", help="lift a seed r-graph to an (r+1)-graph")
    s.add_argument("seed_graph")
    s.add_argument("--t", type=int, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--max-failures", type=int, default=2000)
    s.set_defaults(func=cmd_construct_lift)

    s = sub.add_parser("verify", help="check G_r(v, e)-freeness")
    s.add_argument("path")
    s.add_argument("--v", type=int, required=True)
    s.add_argument("--e", type=int, required=True)
    s.add_argument("--naive", action="store_true", help="enumerate every e-subset")
    s.add_argument("--threads", type=int, default=None)
    s.add_argument("--budget", type=int, default=None, help="cap on enumerated e-subsets")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("certify", help="codegree upper-bound certificate")
    s.add_argument("path")
    s.add_argument("--k", type=int, required=True)
    s.set_defaults(func=cmd_certify)

    s = sub.add_parser("bounds", help="density bound table")
    s.add_argument("--r", type=_int_range, required=True, help="e.g. 3..5")
    s.add_argument("--k", type=_int_range, required=True, help="e.g. 2..3")
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("oracle", help="exact f_r(n, v, e) for tiny parameters")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--v", type=int, required=True)
    s.add_argument("--e", type=int, required=True)
    s.add_argument("--almost-linear", action="store_true")
    s.add_argument("--max-intersection", type=int, default=None)
    s.add_argument("--time-budget", type=float, default=60.0)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_oracle)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _Usage as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
