"""Command-line interface.

Subcommands: generate, stats, limits, balls, converge, theorem21.  Exit codes:
0 success, 1 validation error (bad config/arguments), 2 runtime abort.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .cliquetree import ball_distribution_mc
from .generators import ModelConfig, generate_bipartite, plant_clique
from .graphs import intersection_graph, read_graph, write_bipartite, write_graph
from .limits import (
    dstar_moment,
    limit_assortativity,
    limit_clustering,
    limit_conditional_assortativity,
    limit_conditional_clustering,
    limit_degree_pmf,
    limit_spec_for,
)
from .experiment import ExperimentPlan, StatisticSpec, ball_convergence, perturbation_report, rows_to_csv, run_experiment, theorem21_suite
from .rng import substream
from . import stats as netstats

__all__ = ["main"]


def _load_config(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _out_path(args, name: str) -> str:
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, name)


def _write_rows(args, rows, stem: str) -> None:
    if args.format == "csv":
        path = _out_path(args, f"{stem}.csv")
        with open(path, "w") as fh:
            fh.write(rows_to_csv(rows))
    else:
        path = _out_path(args, f"{stem}.json")
        with open(path, "w") as fh:
            json.dump([r.__dict__ for r in rows], fh, indent=1)
    print(path)


def cmd_generate(args) -> int:
    cfg = _load_config(args.config)
    config = ModelConfig.from_config(cfg)
    rng = substream(args.seed)
    H = generate_bipartite(config, rng)
    G = intersection_graph(H)
    if args.plant is not None:
        G = plant_clique(G, args.plant, substream(args.seed, 1))
    write_bipartite(H, _out_path(args, "bipartite.txt"))
    write_graph(G, _out_path(args, "graph.txt"))
    print(_out_path(args, "graph.txt"))
    return 0


def cmd_stats(args) -> int:
    G = read_graph(args.graph)
    rows = []
    for text in args.stats.split(","):
        s = StatisticSpec.parse(text)
        if s.kind == "ball":
            hist = netstats.empirical_ball_dist(G, s.r)
            path = _out_path(args, f"ball_{s.r}.json")
            with open(path, "w") as fh:
                json.dump(hist.to_rows(), fh, indent=1)
            print(path)
            continue
        if s.kind == "alpha":
            rep = netstats.clustering(G)
        elif s.kind == "assort":
            rep = netstats.assortativity(G)
        elif s.kind == "alpha_k":
            rep = netstats.conditional_clustering(G, s.k)
        elif s.kind == "r_k":
            rep = netstats.conditional_assortativity(G, s.k)
        elif s.kind == "pi":
            rep = {"name": s.label(), "value": netstats.degree_fraction(G, s.k)}
        elif s.kind == "moment":
            rep = {"name": s.label(), "value": netstats.degree_moment(G, s.k)}
        else:
            from .counting import emb_count, pattern_from_name

            rep = {"name": s.label(), "value": emb_count(pattern_from_name(s.pattern), G)}
        rows.append(rep.to_row() if hasattr(rep, "to_row") else rep)
    path = _out_path(args, "stats.json")
    with open(path, "w") as fh:
        json.dump(rows, fh, indent=1)
    print(path)
    return 0


def cmd_limits(args) -> int:
    cfg = _load_config(args.config)
    spec = limit_spec_for(ModelConfig.from_config(cfg["model"])) if "model" in cfg else None
    if spec is None:
        from .laws import degree_law_from_config
        from .limits import LimitSpec

        spec = LimitSpec(degree_law_from_config(cfg["D1"]), degree_law_from_config(cfg["D2"]))
    out = []

    def add(name, est):
        out.append(
            {
                "quantity": name,
                "value": est.value,
                "stderr": est.stderr,
                "exact": est.exact,
                "provenance": spec.provenance,
            }
        )

    def try_add(name, fn):
        # undefined quantities (degenerate variance, P(d*=k)=0) get an error
        # entry instead of aborting the whole report
        try:
            add(name, fn())
        except ValueError as e:
            out.append({"quantity": name, "error": str(e), "provenance": spec.provenance})

    for k in (1, 2, 3):
        add(f"dstar_moment({k})", dstar_moment(spec, k))
    add("alpha", limit_clustering(spec))
    try_add("assort", lambda: limit_assortativity(spec))
    for k in args.k_values:
        add(f"pi({k})", limit_degree_pmf(spec, k))
        if k >= 2:
            try_add(f"alpha_k({k})", lambda k=k: limit_conditional_clustering(spec, k))
        if k >= 1:
            try_add(f"r_k({k})", lambda k=k: limit_conditional_assortativity(spec, k))
    path = _out_path(args, "limits.json")
    with open(path, "w") as fh:
        json.dump(out, fh, indent=1)
    print(path)
    return 0


def cmd_balls(args) -> int:
    if args.graph:
        G = read_graph(args.graph)
        hist = netstats.empirical_ball_dist(G, args.r)
    else:
        cfg = _load_config(args.config)
        spec = limit_spec_for(ModelConfig.from_config(cfg["model"] if "model" in cfg else cfg))
        hist = ball_distribution_mc(spec.D1, spec.D2, args.r, args.samples, substream(args.seed))
    path = _out_path(args, f"balls_r{args.r}.json")
    with open(path, "w") as fh:
        json.dump(hist.to_rows(), fh, indent=1)
    print(path)
    return 0


def _plan_from_args(args) -> ExperimentPlan:
    cfg = _load_config(args.config)
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.threads is not None:
        cfg["threads"] = args.threads
    return ExperimentPlan.from_config(cfg)


def cmd_converge(args) -> int:
    plan = _plan_from_args(args)
    rows = run_experiment(plan)
    from .experiment import row_converged

    verdicts = [row_converged(r, plan) for r in rows]
    scored = [v for v in verdicts if v is not None]
    if scored:
        print(f"converged: {sum(scored)}/{len(scored)} scalar rows within tolerance")
    if plan.gamma is not None:
        ball = [s for s in plan.statistics if s.kind == "ball"]
        rows += perturbation_report(plan, r=ball[0].r if ball else 1)
    _write_rows(args, rows, "converge")
    return 0


def cmd_theorem21(args) -> int:
    plan = _plan_from_args(args)
    rows = theorem21_suite(plan, args.pattern)
    _write_rows(args, rows, f"theorem21_{args.pattern}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rigsim", description="Random intersection graph simulator")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("generate", help="generate a graph and write edge lists")
    common(p)
    p.add_argument("--plant", type=int, default=None, help="plant a clique of this size")
    p.set_defaults(fn=cmd_generate)

    p = sub.add_parser("stats", help="statistics of a graph file")
    common(p, config=False)
    p.add_argument("--graph", required=True)
    p.add_argument("--stats", required=True, help="comma list, e.g. alpha,assort,alpha_k:2,pi:3")
    p.set_defaults(fn=cmd_stats)

    p = sub.add_parser("limits", help="closed-form limit report")
    common(p)
    p.add_argument("--k-values", type=int, nargs="*", default=[2])
    p.set_defaults(fn=cmd_limits)

    p = sub.add_parser("balls", help="ball distributions (model MC or graph file)")
    common(p)
    p.add_argument("--graph", default=None, help="compute the empirical distribution of this graph")
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--samples", type=int, default=10**5)
    p.set_defaults(fn=cmd_balls)

    p = sub.add_parser("converge", help="run a full experiment plan")
    common(p)
    p.set_defaults(fn=cmd_converge)

    p = sub.add_parser("theorem21", help="degree-moment / embedding / Sidorenko trajectories")
    common(p)
    p.add_argument("--pattern", default="K3")
    p.set_defaults(fn=cmd_theorem21)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "seed", None) is None:
        args.seed = 0
    try:
        return args.fn(args)
    except (ValueError, KeyError, FileNotFoundError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except Exception as e:  # noqa: BLE001 - runtime aborts exit with 2
        print(f"abort: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
