"""Command line front end: generate instances, solve them, run audited
ratio experiments to CSV, and render report figures.

Exit codes: 0 success; 1 a produced packing failed validation or an audited
row violated a proven bound (a bug, never expected); 2 bad flags or input;
3 a configured cap was exceeded (oracle size, iteration budget, node budget,
re-pack footprint).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from fractions import Fraction

from .errors import (
    FootprintError,
    GraphParseError,
    IterationLimitError,
    NodeBudgetError,
    OracleSizeError,
)
from .generate import bipartite, enumerate_connected_small, gnp, pull_gadget, random_regular, revise_gadget
from .graph import Graph, parse_graph, serialize_graph
from .model import KMT, KPLUS, SEQ, UNBOUNDED, Constraint, Packing, parse_k, validate

CSV_HEADER = "instance_id,n,m,seed,algo,k,t,apx,opt,ratio,iters,ms"

ALGOS = ("kplus", "kplus2", "kmt", "kmt-baseline", "seq", "oracle")

GNP_PS = (0.10, 0.15, 0.20, 0.25, 0.30, 0.40, 0.50)


def _constraint_for(algo: str, k, t) -> Constraint:
    """The constraint a result of `algo` is validated (and audited) under."""
    if algo in ("kplus", "kplus2"):
        if t is not None:
            raise ValueError(f"--t is meaningless for --algo {algo}")
        return Constraint(KPLUS, k)
    if algo in ("kmt", "kmt-baseline"):
        if t is None:
            raise ValueError(f"--algo {algo} requires --t")
        return Constraint(KMT, k, t)
    if algo == "seq":
        if t is not None:
            raise ValueError("--t is meaningless for --algo seq")
        return Constraint(SEQ, k)
    # oracle: the constraint is inferred from the flag shape
    return Constraint(KMT, k, t) if t is not None else Constraint(KPLUS, k)


def _solve(algo: str, g: Graph, constraint: Constraint, max_iters, oracle_cap):
    """Run one solver; returns (packing, iterations, trace_events)."""
    if algo == "kplus":
        from .kplus import GENERAL, run_local_search_kplus
        p, r = run_local_search_kplus(g, constraint.k, GENERAL, max_iters=max_iters)
        return p, r.iterations, r.trace
    if algo == "kplus2":
        from .kplus import TWO_PLUS_EXTRA, run_local_search_kplus
        p, r = run_local_search_kplus(g, constraint.k, TWO_PLUS_EXTRA, max_iters=max_iters)
        return p, r.iterations, r.trace
    if algo == "kmt":
        from .kmt import run_local_search_kmt
        p, r = run_local_search_kmt(g, constraint.k, constraint.t, max_iters=max_iters)
        return p, r.iterations, r.trace
    if algo == "kmt-baseline":
        from .kmt import baseline_trim
        return baseline_trim(g, constraint.k, constraint.t), 0, []
    if algo == "seq":
        from .seq import solve_sequential_exact
        return solve_sequential_exact(g, constraint.k), 0, []
    from .oracle import oracle_max_packing
    return oracle_max_packing(g, constraint, max_n=oracle_cap).witness, 0, []


def _read_graph(path: str) -> Graph:
    text = sys.stdin.read() if path == "-" else open(path).read()
    return parse_graph(text)


def _warn_big_t(algo: str, t) -> None:
    if algo in ("kmt", "kmt-baseline") and t is not None and t > 5:
        print(f"note: t={t} makes re-pack enumeration expensive", file=sys.stderr)


def cmd_solve(args) -> int:
    constraint = _constraint_for(args.algo, args.k, args.t)
    _warn_big_t(args.algo, args.t)
    g = _read_graph(args.input)
    packing, iters, trace = _solve(args.algo, g, constraint, args.max_iters, args.oracle_cap)
    issues = validate(g, packing, constraint)
    if issues:
        for msg in issues:
            print(f"validation: {msg}", file=sys.stderr)
        return 1
    if args.trace:
        with open(args.trace, "w") as fh:
            for ev in trace:
                fh.write(json.dumps(ev.to_json()) + "\n")
    doc = packing.to_json(constraint)
    doc["iterations"] = iters
    print(json.dumps(doc, indent=2))
    return 0


def _corpus(args):
    """Yield (instance_id, graph, seed_text) per the family flags."""
    fam = args.family
    if fam == "gnp":
        for i in range(args.count):
            seed = args.seed + i
            if args.n is not None:
                n, p = args.n, args.p
            else:
                n, p = 8 + (i % 5), GNP_PS[i % 7]
            yield f"gnp{n}-p{int(p * 100)}-s{seed}", gnp(n, p, seed), str(seed)
    elif fam == "regular":
        for i in range(args.count):
            seed = args.seed + i
            yield f"reg{args.n}-d{args.d}-s{seed}", random_regular(args.n, args.d, seed), str(seed)
    elif fam == "bipartite":
        for i in range(args.count):
            seed = args.seed + i
            yield (f"bip{args.n1}x{args.n2}-p{int(args.p * 100)}-s{seed}",
                   bipartite(args.n1, args.n2, args.p, seed), str(seed))
    elif fam == "exhaustive":
        for n in range(1, args.max_n + 1):
            for i, g in enumerate(enumerate_connected_small(n)):
                yield f"conn{n}-{i}", g, ""
    elif fam == "pullgadget":
        if args.k is UNBOUNDED:
            raise ValueError("gadget families need a finite --k")
        yield f"{args.which}-k{args.k}", pull_gadget(args.k, args.which), ""
    else:  # revisegadget
        if args.k is UNBOUNDED:
            raise ValueError("gadget families need a finite --k")
        yield f"{args.which}-k{args.k}t{args.t}", revise_gadget(args.k, args.t, args.which), ""


def _proven_bound(algo: str, constraint: Constraint) -> Fraction | None:
    from .audit import ratio_kmt, ratio_kplus
    from .kplus import GENERAL, TWO_PLUS_EXTRA
    if algo == "kplus":
        return ratio_kplus(constraint.k, GENERAL)
    if algo == "kplus2":
        return ratio_kplus(constraint.k, TWO_PLUS_EXTRA)
    if algo == "kmt":
        return ratio_kmt(constraint.k, constraint.t)
    if algo in ("seq", "oracle"):
        return Fraction(1)  # exact: coverage must equal the optimum
    return None  # kmt-baseline: audited for opt >= apx only


def cmd_experiment(args) -> int:
    constraint = _constraint_for(args.algo, args.k, args.t)
    _warn_big_t(args.algo, args.t)
    if args.family == "gnp" and (args.n is None) != (args.p is None):
        raise ValueError("--n and --p must be given together for gnp")
    from .oracle import oracle_max_packing, ratio_of

    bound = _proven_bound(args.algo, constraint)
    k_text = "inf" if args.k is UNBOUNDED else str(args.k)
    t_text = "" if args.t is None else str(args.t)
    out = sys.stdout
    out.write(CSV_HEADER + "\n")
    rows = []
    ratios = []
    violations = 0
    for iid, g, seed_text in _corpus(args):
        t0 = time.perf_counter()
        packing, iters, _ = _solve(args.algo, g, constraint, None, args.oracle_cap)
        ms = (time.perf_counter() - t0) * 1000.0
        apx = packing.coverage
        issues = validate(g, packing, constraint)
        opt_text = ratio_text = ""
        if args.with_oracle and g.n <= args.oracle_cap:
            opt = oracle_max_packing(g, constraint, max_n=args.oracle_cap).opt
            ratio = ratio_of(opt, apx)
            opt_text, ratio_text = str(opt), str(ratio)
            ratios.append(ratio)
            if opt < apx:
                issues.append(f"coverage {apx} exceeds the optimum {opt}")
            if bound is not None and ratio > bound:
                issues.append(f"ratio {ratio} breaks the proven bound {bound}")
        row = (f"{iid},{g.n},{g.m},{seed_text},{args.algo},{k_text},{t_text},"
               f"{apx},{opt_text},{ratio_text},{iters},{ms:.2f}")
        out.write(row + "\n")
        rows.append({"instance_id": iid, "n": str(g.n), "m": str(g.m),
                     "seed": seed_text, "algo": args.algo, "k": k_text,
                     "t": t_text, "apx": str(apx), "opt": opt_text,
                     "ratio": ratio_text, "iters": str(iters)})
        if issues:
            violations += len(issues)
            for msg in issues:
                print(f"violation[{iid}]: {msg}", file=sys.stderr)
            return 1
    if ratios:
        mx, mean = max(ratios), sum(ratios, Fraction(0)) / len(ratios)
        summary = f"# summary rows={len(rows)} max_ratio={mx} mean_ratio={mean} violations={violations}"
    else:
        summary = f"# summary rows={len(rows)} max_ratio=na mean_ratio=na violations={violations}"
    out.write(summary + "\n")
    if args.plot_dir:
        from .plots import render_report
        for path in render_report(rows, args.plot_dir):
            print(path, file=sys.stderr)
    return 0


def cmd_report(args) -> int:
    with open(args.input, newline="") as fh:
        rows = [r for r in csv.DictReader(fh)
                if r.get("apx") and not r["instance_id"].startswith("#")]
    from .plots import render_report
    for path in render_report(rows, args.out_dir):
        print(path)
    return 0


def cmd_generate(args) -> int:
    fam = args.family
    if fam == "gnp":
        g = gnp(args.n, args.p, args.seed)
        comment = f"gnp n={args.n} p={args.p} seed={args.seed}"
    elif fam == "regular":
        g = random_regular(args.n, args.d, args.seed)
        comment = f"regular n={args.n} d={args.d} seed={args.seed}"
    elif fam == "bipartite":
        g = bipartite(args.n1, args.n2, args.p, args.seed)
        comment = f"bipartite n1={args.n1} n2={args.n2} p={args.p} seed={args.seed}"
    elif fam == "pullgadget":
        g = pull_gadget(args.k, args.which)
        comment = f"pullgadget k={args.k} {args.which}"
    else:
        g = revise_gadget(args.k, args.t, args.which)
        comment = f"revisegadget k={args.k} t={args.t} {args.which}"
    sys.stdout.write(serialize_graph(g, comment=comment))
    return 0


def _add_constraint_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--algo", required=True, choices=ALGOS)
    p.add_argument("--k", required=True, type=parse_k,
                   help="satellite count bound; integer or 'inf'")
    p.add_argument("--t", type=int, default=None,
                   help="forbidden star size (t-avoiding algorithms; selects "
                        "the t-avoiding objective for --algo oracle)")
    p.add_argument("--oracle-cap", type=int, default=14,
                   help="largest n the exact oracle accepts (default 14)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="starpack",
        description="Star-packing solvers, exact oracles and ratio audits.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one instance, print packing JSON")
    _add_constraint_flags(p)
    p.add_argument("--in", dest="input", required=True,
                   help="graph file in the text format ('-' for stdin)")
    p.add_argument("--trace", help="write the operation trace as JSON lines")
    p.add_argument("--max-iters", type=int, default=None)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("experiment", help="solve a corpus, print audited CSV")
    _add_constraint_flags(p)
    p.add_argument("--family", default="gnp",
                   choices=("gnp", "regular", "bipartite", "exhaustive",
                            "pullgadget", "revisegadget"))
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--seed", type=int, default=20250819)
    p.add_argument("--n", type=int, default=None,
                   help="fix the instance size (gnp cycles 8..12 otherwise)")
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--n1", type=int, default=6)
    p.add_argument("--n2", type=int, default=6)
    p.add_argument("--max-n", type=int, default=6,
                   help="exhaustive family: largest vertex count")
    p.add_argument("--which", default="k_kp1",
                   help="gadget shape: k_kp1/kk/kkk (pull) or "
                        "single/pair/triple (revise)")
    p.add_argument("--with-oracle", action="store_true",
                   help="audit each row against the exact optimum "
                        "(instances above the oracle cap get a blank opt)")
    p.add_argument("--plot-dir",
                   help="also render report figures into this directory")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("report", help="render figures from an experiment CSV")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("generate", help="emit one instance in the text format")
    p.add_argument("--family", required=True,
                   choices=("gnp", "regular", "bipartite", "pullgadget",
                            "revisegadget"))
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--p", type=float, default=0.3)
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--n1", type=int, default=6)
    p.add_argument("--n2", type=int, default=6)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--t", type=int, default=2)
    p.add_argument("--which", default="k_kp1",
                   help="gadget shape: k_kp1/kk/kkk (pull) or "
                        "single/pair/triple (revise)")
    p.add_argument("--seed", type=int, default=20250819)
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OracleSizeError, FootprintError, IterationLimitError, NodeBudgetError) as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return 3
    except (GraphParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
