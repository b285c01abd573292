"""Command-line interface.

Subcommands:
  sample root-connected|spanning-tree|sink-free FILE
  bench  lollipop-cluster|lollipop-cycle|cycle-sink|random-bound-sweep
  estimate-reliability FILE
  verify

Exit codes: 0 success, 1 verification failure, 2 invalid input
(disconnected / not root-connected / tree component / malformed file),
3 draw budget exceeded.  Identical command line and seed produce
byte-identical output.
"""

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import bench as bench_mod
from . import cluster_popping, cycle_popping, sink_popping, verify
from .errors import DrawBudgetExceeded, PoppingError
from .graph import UndirectedGraph, bidirect
from .prs import DEFAULT_MAX_DRAWS
from .reliability import estimate_reliability
from .tables import ResamplingTable, derive_seed

CSV_DOC = """CSV schemas (stable):
  sample:  sample_index,resampled_vars,rounds[,outcome]
  bench:   one row per instance; columns are the family's report fields
           (family,n,m,...,mean_resampled,stderr_resampled,bound,ratio)
  verify:  suite,label,metrics...,pass
"""


def _print_rows(rows, fmt, stream=None):
    stream = stream or sys.stdout
    if not rows:
        return
    if fmt == "csv":
        keys = list(rows[0].keys())
        writer = csv.DictWriter(stream, fieldnames=keys)
        writer.writeheader()
        for r in rows:
            writer.writerow({k: r.get(k, "") for k in keys})
    elif fmt == "structured":
        json.dump(rows, stream, indent=2, default=float)
        stream.write("\n")
    else:
        for r in rows:
            stream.write("  ".join(f"{k}={_fmt(v)}" for k, v in r.items()))
            stream.write("\n")


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _load_graph(path, values):
    if path.endswith(".json"):
        with open(path) as fh:
            return UndirectedGraph.from_object(json.load(fh), values=values)
    with open(path) as fh:
        return UndirectedGraph.from_text(fh.read(), values=values)


def _cmd_sample(args):
    kind = args.kind
    values = {"root-connected": "p", "spanning-tree": "w",
              "sink-free": "ignore"}[kind]
    g = _load_graph(args.graph, values)
    rows = []
    agg_resampled = []
    agg_rounds = []
    init_draws = None
    for i in range(args.samples):
        seed = derive_seed(args.seed, i)
        if kind == "root-connected":
            d = bidirect(g)
            r = args.root if args.root is not None else (g.root or 0)
            table = ResamplingTable(seed, d.m)
            fn = (cluster_popping.sample_tarjan if args.algorithm == "tarjan"
                  else cluster_popping.sample_naive)
            kwargs = {"max_draws": args.max_draws}
            if args.algorithm == "naive" and args.assert_extremal:
                kwargs["assert_extremal"] = True
            if args.algorithm == "tarjan" and args.assert_extremal:
                kwargs["verify_pops"] = True
            out, stats = fn(d, r, table, **kwargs)
            outcome = " ".join(str(a) for a in np.nonzero(out)[0])
        elif kind == "spanning-tree":
            r = args.root if args.root is not None else (g.root or 0)
            table = ResamplingTable(seed, g.n)
            sigma, stats = cycle_popping.sample(
                g, r, table, assert_extremal=args.assert_extremal,
                max_draws=args.max_draws)
            outcome = " ".join(str(e) for e in cycle_popping.tree_edges(g, sigma))
        else:
            table = ResamplingTable(seed, g.m)
            orient, stats = sink_popping.sample(
                g, table, assert_extremal=args.assert_extremal,
                max_draws=args.max_draws)
            outcome = "".join(str(int(b)) for b in orient)
        init_draws = stats.init_draws
        agg_resampled.append(stats.resampled_vars)
        agg_rounds.append(stats.rounds)
        if args.emit_samples:
            rows.append({"sample_index": i,
                         "resampled_vars": stats.resampled_vars,
                         "rounds": stats.rounds,
                         "outcome": outcome})
    if args.emit_samples:
        _print_rows(rows, args.format)
    summary = {
        "kind": kind,
        "seed": args.seed,
        "samples": args.samples,
        "init_draws": init_draws,
        "mean_resampled": float(np.mean(agg_resampled)),
        "mean_rounds": float(np.mean(agg_rounds)),
        "mean_total_draws": float(init_draws + np.mean(agg_resampled)),
    }
    _print_rows([summary], args.format)
    return 0


def _cmd_bench(args):
    family = args.family
    kwargs = {"seed": args.seed}
    if args.reps is not None:
        kwargs["reps"] = args.reps
    if family in ("lollipop-cluster", "lollipop-cycle") and args.n2:
        kwargs["n2_list"] = tuple(args.n2)
    if family == "lollipop-cluster" and args.p is not None:
        kwargs["p"] = args.p
    if family == "cycle-sink" and args.n:
        kwargs["n_list"] = tuple(args.n)
    if family == "random-bound-sweep":
        kwargs["kind"] = args.kind
    rows = bench_mod.BENCH_FAMILIES[family](**kwargs)
    for r in rows:
        r["seed"] = args.seed
    _print_rows(rows, args.format)
    return 0


def _cmd_estimate(args):
    g = _load_graph(args.graph, "p")
    est = estimate_reliability(g, args.epsilon, seed=args.seed,
                               root=args.root, confidence=args.confidence,
                               max_draws=args.max_draws)
    report = est.to_report()
    if args.format == "structured":
        json.dump(report, sys.stdout, indent=2, default=float)
        sys.stdout.write("\n")
    else:
        print(f"estimate={est.estimate:.10g} epsilon={est.epsilon} "
              f"seed={est.seed} repetitions={est.repetitions}")
        _print_rows([{"beta": b, "ratio": r, "samples": s}
                     for b, r, s in est.stages], args.format)
    return 0


def _cmd_verify(args):
    names = verify.SUITES if args.suite == "all" else (args.suite,)
    results = verify.run_suites(names, seed=args.seed, samples=args.samples)
    failed = 0
    for name, res in results.items():
        rows = [{"suite": name, **row} for row in res.rows]
        if args.format != "text" or args.verbose:
            _print_rows(rows, args.format)
        failed += res.n_failed
        print(f"suite {name}: {len(res.rows) - res.n_failed}/{len(res.rows)} "
              f"checks passed -> {'PASS' if res.passed else 'FAIL'}")
    return 0 if failed == 0 else 1


def build_parser():
    ap = argparse.ArgumentParser(
        prog="popping",
        description="Exact popping samplers and reliability estimation.",
        epilog=CSV_DOC,
        formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("sample", help="draw exact samples from a graph file")
    sp.add_argument("kind", choices=["root-connected", "spanning-tree",
                                     "sink-free"])
    sp.add_argument("graph", help="edge-list or JSON graph file")
    sp.add_argument("--algorithm", choices=["naive", "tarjan"],
                    default="tarjan")
    sp.add_argument("--root", type=int, default=None)
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("--samples", type=int, default=1)
    sp.add_argument("--emit-samples", action="store_true",
                    help="print one row per sample, not just the aggregate")
    sp.add_argument("--assert-extremal", action="store_true",
                    help="check occurring bad events for disjointness")
    sp.add_argument("--max-draws", type=int, default=DEFAULT_MAX_DRAWS)
    sp.add_argument("--format", choices=["text", "csv", "structured"],
                    default="text")
    sp.set_defaults(fn=_cmd_sample)

    bp = sub.add_parser("bench", help="reproduce the draw-count laws")
    bp.add_argument("family", choices=sorted(bench_mod.BENCH_FAMILIES))
    bp.add_argument("--n", type=int, nargs="+", default=None,
                    help="cycle sizes for cycle-sink")
    bp.add_argument("--n2", type=int, nargs="+", default=None,
                    help="clique sizes for the lollipop families")
    bp.add_argument("--p", type=float, default=None)
    bp.add_argument("--reps", type=int, default=None)
    bp.add_argument("--kind", choices=["cluster", "cycle", "sink"],
                    default="cluster", help="sampler for random-bound-sweep")
    bp.add_argument("--seed", type=int, default=1)
    bp.add_argument("--format", choices=["text", "csv", "structured"],
                    default="csv")
    bp.set_defaults(fn=_cmd_bench)

    ep = sub.add_parser("estimate-reliability",
                        help="annealing estimate of all-terminal reliability")
    ep.add_argument("graph")
    ep.add_argument("--epsilon", type=float, required=True)
    ep.add_argument("--seed", type=int, default=1)
    ep.add_argument("--root", type=int, default=None)
    ep.add_argument("--confidence", type=float, default=None,
                    help="median of 5 repetitions when set")
    ep.add_argument("--max-draws", type=int, default=DEFAULT_MAX_DRAWS)
    ep.add_argument("--format", choices=["text", "csv", "structured"],
                    default="text")
    ep.set_defaults(fn=_cmd_estimate)

    vp = sub.add_parser("verify", help="run the oracle verification suites")
    vp.add_argument("--suite", choices=list(verify.SUITES) + ["all"],
                    default="all")
    vp.add_argument("--seed", type=int, default=1)
    vp.add_argument("--samples", type=int, default=100_000)
    vp.add_argument("--verbose", action="store_true")
    vp.add_argument("--format", choices=["text", "csv", "structured"],
                    default="text")
    vp.set_defaults(fn=_cmd_verify)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except DrawBudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (PoppingError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
