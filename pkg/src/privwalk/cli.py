"""Command-line interface.

Subcommands: ingest, labels, walk, estimate, theory, experiment, census.
Every command exits non-zero with a message on stderr when anything is
wrong with its inputs.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .access import QueryLedger
from .estimators import NoCollisionError, build_report
from .experiment import _parse_floats, _write_csv, load_config, query_census, run_experiment
from .graph import GraphError, LabeledGraph, assign_labels_bernoulli, largest_public_cluster
from .ingest import IngestError, load_edge_list, load_labels, load_sample_records, save_labels
from .theory import THEORY_COLUMNS, theory_report_rows
from .walk import PubdegMode, StuckWalkError, run_walk


def _load_labeled(args) -> LabeledGraph:
    g = load_edge_list(args.edges, getattr(args, "directed", False))
    if getattr(args, "label_file", None):
        g = load_labels(args.label_file, g, strict=not getattr(args, "lenient", False))
    elif getattr(args, "bernoulli", None) is not None:
        g = assign_labels_bernoulli(g, args.bernoulli, getattr(args, "label_seed", 0))
    return g


def _add_label_opts(sub) -> None:
    sub.add_argument("--label-file", help="per-node label file (original ids)")
    sub.add_argument("--bernoulli", type=float, help="draw labels with this privacy rate")
    sub.add_argument("--label-seed", type=int, default=0, help="seed for --bernoulli")
    sub.add_argument("--lenient", action="store_true", help="tolerate incomplete label files")
    sub.add_argument("--directed", action="store_true", help="edge file lists directed edges")


def _cmd_ingest(args) -> int:
    g = load_edge_list(args.edges, args.directed)
    print(f"nodes {g.node_count}")
    print(f"edges {g.edge_count}")
    print(f"avg_degree {g.avg_degree:.6g}")
    if args.out_edges:
        src = g.edge_sources()
        with open(args.out_edges, "w") as f:
            for u, v in zip(src, g.indices):
                if u < v:
                    f.write(f"{u} {v}\n")
        print(f"wrote {args.out_edges}")
    if args.out_map:
        with open(args.out_map, "w") as f:
            for dense, orig in enumerate(g.orig_ids):
                f.write(f"{dense} {orig}\n")
        print(f"wrote {args.out_map}")
    return 0


def _cmd_labels(args) -> int:
    g = _load_labeled(args)
    view = largest_public_cluster(g)
    print(f"nodes {g.node_count}")
    print(f"private {g.private_count} ({g.private_fraction:.4f})")
    print(f"cluster_size {view.member_count}")
    print(f"cluster_degree_sum {view.public_degree_sum}")
    census = ", ".join(f"{s}x{c}" for s, c in view.cluster_census[:8])
    print(f"cluster_census {census}")
    if args.out:
        save_labels(g, args.out)
        print(f"wrote {args.out}")
    return 0


def _cmd_walk(args) -> int:
    g = _load_labeled(args)
    view = largest_public_cluster(g)
    if args.length:
        r = args.length
    else:
        r = max(2, int(round(args.fraction * g.node_count)))
    if args.seed_node is not None:
        seed_node = args.seed_node
    else:
        pick = np.random.default_rng(args.seed_pick_seed)
        members = view.members
        seed_node = int(members[pick.integers(members.size)])
    mode = PubdegMode(args.mode)
    ledger = QueryLedger(memoize=args.memoize)
    record = run_walk(
        g,
        mode.access_model,
        seed_node,
        r,
        mode,
        args.rng_seed,
        ledger,
        view=view,
        count_visit_queries=args.count_visit_queries,
    )
    print(f"samples {record.r}")
    print(f"seed_node {seed_node}")
    print(f"raw_queries {ledger.raw_queries}")
    print(f"unique_queried {len(ledger.unique_queried)}")
    print(f"query_ratio {ledger.raw_queries / r:.6g}")
    if args.out:
        record.dump(args.out)
        print(f"wrote {args.out}")
    return 0


def _cmd_estimate(args) -> int:
    record = load_sample_records(args.record)
    m = args.m if args.m is not None else max(1, int(np.ceil(args.m_fraction * record.r)))
    rep = build_report(record, m)
    print(f"samples {rep.sample_count}")
    print(f"gap_threshold {rep.gap_threshold}")
    print(f"collision_mean {rep.collision_mean!r}")
    print(f"weight_mean_prior {rep.weight_mean_prior!r}")
    print(f"weight_mean_proposed {rep.weight_mean_proposed!r}")
    print(f"nc_size {rep.size_nc!r}")
    print(f"proposed_size {rep.size_proposed!r}")
    print(f"smooth_avg_degree {rep.avg_degree_smooth!r}")
    print(f"proposed_avg_degree {rep.avg_degree_proposed!r}")
    print(f"privacy_rate_from_size {rep.privacy_rate_size!r}")
    print(f"privacy_rate_from_avg_degree {rep.privacy_rate_avg_degree!r}")
    if args.csv:
        _write_csv(
            args.csv,
            ("field", "value"),
            [
                ("samples", rep.sample_count),
                ("gap_threshold", rep.gap_threshold),
                ("collision_mean", rep.collision_mean),
                ("weight_mean_prior", rep.weight_mean_prior),
                ("weight_mean_proposed", rep.weight_mean_proposed),
                ("nc_size", rep.size_nc),
                ("proposed_size", rep.size_proposed),
                ("smooth_avg_degree", rep.avg_degree_smooth),
                ("proposed_avg_degree", rep.avg_degree_proposed),
                ("privacy_rate_from_size", rep.privacy_rate_size),
                ("privacy_rate_from_avg_degree", rep.privacy_rate_avg_degree),
            ],
        )
        print(f"wrote {args.csv}")
    return 0


def _cmd_theory(args) -> int:
    g = load_edge_list(args.edges, args.directed)
    if args.label_file:
        g = load_labels(args.label_file, g, strict=not args.lenient)
        view = largest_public_cluster(g)
        rows = theory_report_rows(g, [g.private_fraction], view=view)
    else:
        rows = theory_report_rows(g, _parse_floats(args.p_grid), label_seed=args.label_seed)
    _write_csv(args.out, THEORY_COLUMNS, [tuple(r[c] for c in THEORY_COLUMNS) for r in rows])
    print(f"wrote {args.out} ({len(rows)} rows)")
    return 0


def _cmd_experiment(args) -> int:
    cfg = load_config(args.config)
    rows = run_experiment(cfg)
    for row in rows:
        print(
            f"p={row.p:.4g} r={row.sample_size} {row.estimator}: "
            f"nrmse={row.nrmse:.6g} failed={row.failed_trials}/{row.trials}"
        )
    print(f"wrote {cfg.outdir}/nrmse.csv and {cfg.outdir}/theory.csv")
    return 0


def _cmd_census(args) -> int:
    cfg = load_config(args.config)
    rows = query_census(cfg)
    for row in rows:
        print(
            f"p={row['p']:.4g} r={row['sample_size']} {row['mode']}: "
            f"unique_fraction={row['mean_unique_fraction']:.6g} "
            f"raw={row['mean_raw_queries']:.6g}"
        )
    print(f"wrote {cfg.outdir}/census.csv")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="privwalk",
        description="Random-walk size and degree estimation on graphs with private nodes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="preprocess an edge list and report its shape")
    p.add_argument("edges")
    p.add_argument("--directed", action="store_true")
    p.add_argument("--out-edges", help="write the preprocessed edge list")
    p.add_argument("--out-map", help="write the dense-to-original id map")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("labels", help="attach labels and report the public clustering")
    p.add_argument("edges")
    _add_label_opts(p)
    p.add_argument("--out", help="write the labeling as an 'id flag' file")
    p.set_defaults(func=_cmd_labels)

    p = sub.add_parser("walk", help="run one walk and dump its samples")
    p.add_argument("edges")
    _add_label_opts(p)
    p.add_argument("--mode", default="approx_hidden", choices=[m.value for m in PubdegMode])
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--length", type=int, help="number of samples")
    group.add_argument("--fraction", type=float, help="samples as a fraction of n")
    p.add_argument("--seed-node", type=int, help="fixed public seed node (dense id)")
    p.add_argument("--seed-pick-seed", type=int, default=0, help="seed for uniform seed choice")
    p.add_argument("--rng-seed", type=int, default=0)
    p.add_argument("--count-visit-queries", action="store_true",
                   help="charge sample visits separately from label probes")
    p.add_argument("--memoize", action="store_true", help="do not recount repeat queries")
    p.add_argument("--out", help="dump the walk record")
    p.set_defaults(func=_cmd_walk)

    p = sub.add_parser("estimate", help="estimate size/degree/privacy from a sample file")
    p.add_argument("record")
    p.add_argument("-m", type=int, default=None, help="index-pair gap threshold")
    p.add_argument("--m-fraction", type=float, default=0.025)
    p.add_argument("--csv", help="also write the report as CSV")
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("theory", help="write closed-form expectations per privacy rate")
    p.add_argument("edges")
    p.add_argument("--directed", action="store_true")
    p.add_argument("--label-file", help="use real labels instead of a p grid")
    p.add_argument("--lenient", action="store_true")
    p.add_argument("--p-grid", default="0.0:0.3:0.03", help="'start:stop:step' or comma list")
    p.add_argument("--label-seed", type=int, default=0)
    p.add_argument("--out", default="theory.csv")
    p.set_defaults(func=_cmd_theory)

    p = sub.add_parser("experiment", help="run the NRMSE sweep from a config file")
    p.add_argument("config")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("census", help="compare query footprints of the hidden modes")
    p.add_argument("config")
    p.set_defaults(func=_cmd_census)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (GraphError, IngestError, NoCollisionError, StuckWalkError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
