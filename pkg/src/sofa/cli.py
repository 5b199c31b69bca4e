"""Command-line surface: generate planted instances, run the clustering
pipelines, evaluate artifacts.

All randomness flows from --seed and every output file is byte-stable for
identical invocations.  Exit status is 0 exactly when no error occurred.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from sofa.baseline import rs_reduction, static_sofa, static_sofa_sweep
from sofa.greedy import greedy_pass, theory_alpha, theory_theta, threshold_clusters
from sofa.metrics import (
    membership_from_assignment,
    metrics_lines,
    metrics_tsv,
    quality,
    reconstruction_stats,
)
from sofa.second_pass import (
    assign_left_multi,
    cover_left_multi,
    prune_membership,
    select_top_k,
)
from sofa.stream_io import (
    ClusteringArtifact,
    StreamSource,
    open_stream,
    read_artifact,
    write_artifact,
)
from sofa.streaming import (
    DEFAULT_THETA_GRID,
    PassStats,
    SofaConfig,
    default_capacity,
    estimate_theta,
    group_centers,
    sofa_pass,
    threshold_groups,
)
from sofa.synthetic import PlantedParams, read_ground_truth, write_planted
from sofa.vectors import DistanceMetric

__all__ = ["main"]

_ESTIMATE_BUFFER = 10_000


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sofa",
        description="Streaming biclustering and Boolean matrix factorization",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a planted bipartite graph")
    gen.add_argument("--n", type=int, required=True, help="right universe size")
    gen.add_argument("--k", type=int, default=50)
    gen.add_argument("--ell", type=int, default=200, help="left vertices per cluster")
    gen.add_argument("--r", type=int, default=30, help="right cluster size")
    gen.add_argument("--p", type=float, default=0.7)
    noise = gen.add_mutually_exclusive_group()
    noise.add_argument("--q", type=float, default=None)
    noise.add_argument(
        "--noise-degree", type=float, default=None, help="expected noise degree (default 20)"
    )
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--disjoint-right", action="store_true")
    gen.add_argument("--out", required=True, help="output directory")

    run = sub.add_parser("run", help="run a clustering pipeline")
    run.add_argument("--input", required=True)
    run.add_argument("--format", choices=["adjacency", "edge-list"], default="adjacency")
    run.add_argument("--n", type=int, default=None, help="universe size if no header")
    run.add_argument(
        "--algo",
        choices=["sofa", "sofa-auto", "greedy", "static", "rs-static"],
        required=True,
    )
    run.add_argument("--k", type=int, default=None)
    run.add_argument("--cmax", type=int, default=None, help="center budget (default 20k)")
    run.add_argument(
        "--capacity", type=int, default=None, help="sketch counters (default max{3s, 0.05n})"
    )
    run.add_argument("--s", type=int, default=None, help="degree / cluster-size bound")
    run.add_argument(
        "--estimate-s",
        action="store_true",
        help="estimate s as the 99th-percentile degree of the first 10^4 records",
    )
    run.add_argument("--alpha", type=float, default=None,
                     help="asymmetry weight (default 0.1; 1.0 for greedy)")
    run.add_argument("--theta", default=None, help="comma-separated list or 'auto'")
    run.add_argument("--mode", choices=["bicluster", "bmf"], default="bicluster")
    run.add_argument(
        "--skip-grouping",
        action="store_true",
        help="threshold per center instead of grouping (bmf only)",
    )
    run.add_argument("--threshold", type=float, default=None,
                     help="greedy separation threshold")
    run.add_argument("--theory-mode", action="store_true",
                     help="derive greedy threshold and theta from --p and s")
    run.add_argument("--p", type=float, default=None, help="signal rate (theory mode)")
    run.add_argument("--k4", type=float, default=None,
                     help="separation constant (theory mode)")
    run.add_argument("--mtilde", type=int, default=5000, help="rs-static sample rows")
    run.add_argument("--ntilde", type=int, default=5000, help="rs-static sample columns")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--telemetry", default=None, help="per-phase log path (sofa only)")
    run.add_argument("--out", required=True, help="output directory")

    ev = sub.add_parser("eval", help="evaluate a clustering artifact")
    ev.add_argument("--input", required=True)
    ev.add_argument("--format", choices=["adjacency", "edge-list"], default="adjacency")
    ev.add_argument("--n", type=int, default=None)
    ev.add_argument("--clusters", required=True, help="artifact path")
    ev.add_argument("--ground-truth", default=None)
    ev.add_argument("--out", required=True, help="output directory")
    return parser


def _cmd_gen(args) -> None:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    params = PlantedParams(
        n=args.n,
        k=args.k,
        ell=args.ell,
        r=args.r,
        p=args.p,
        q=args.q,
        expected_noise_degree=args.noise_degree,
        seed=args.seed,
        disjoint_right=args.disjoint_right,
    )
    write_planted(params, out / "graph.adj", out / "truth.tsv")
    print(f"wrote {out / 'graph.adj'} and {out / 'truth.tsv'}")


class _PeekedStream(StreamSource):
    """Presents an already-started first pass (buffered head + live tail);
    the second pass delegates to the underlying source."""

    def __init__(self, inner: StreamSource, head: list, tail: Iterator):
        super().__init__(inner.n)
        self._inner = inner
        self._head = head
        self._tail = tail
        self.m = inner.m

    def _iter(self):
        if self._head is not None:
            head, tail = self._head, self._tail
            self._head = None
            self._tail = None
            yield from head
            yield from tail
        else:
            yield from self._inner.records()


def _estimate_s(stream: StreamSource) -> tuple[int, StreamSource]:
    """P99 degree of the first 10^4 records; returns a source replaying them."""
    it = stream.records()
    head = []
    for rec in it:
        head.append(rec)
        if len(head) >= _ESTIMATE_BUFFER:
            break
    if not head:
        raise ValueError("cannot estimate s on an empty stream")
    degs = np.array([len(vec) for _, vec in head])
    s = max(1, math.ceil(float(np.percentile(degs, 99))))
    return s, _PeekedStream(stream, head, it)


def _parse_thetas(text: str | None, algo: str) -> Sequence[float] | str:
    if text is None:
        return "auto" if algo == "sofa-auto" else DEFAULT_THETA_GRID
    if text == "auto":
        return "auto"
    try:
        thetas = tuple(float(t) for t in text.split(","))
    except ValueError as exc:
        raise ValueError(f"bad --theta value {text!r}") from exc
    if not thetas:
        raise ValueError("--theta list must be nonempty")
    return thetas


def _theta_tag(theta: float) -> str:
    return f"{theta:g}"


def _cmd_run(args) -> None:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    algo = args.algo
    needs_k = algo != "greedy"
    if needs_k and args.k is None:
        raise ValueError(f"--k is required for --algo {algo}")
    if args.skip_grouping and (args.mode != "bmf" or algo not in ("sofa", "sofa-auto")):
        raise ValueError("--skip-grouping applies to sofa in bmf mode only")
    if args.telemetry and algo not in ("sofa", "sofa-auto"):
        raise ValueError("--telemetry is only produced by the sofa pass")
    if args.theory_mode and algo != "greedy":
        raise ValueError("--theory-mode applies to --algo greedy")

    stream = open_stream(args.input, format=args.format, n=args.n)
    n = stream.n

    s = args.s
    if args.estimate_s:
        if s is not None:
            raise ValueError("give --s or --estimate-s, not both")
        s, stream = _estimate_s(stream)

    alpha = args.alpha
    if alpha is None:
        alpha = 1.0 if algo == "greedy" else 0.1
    metric = DistanceMetric(alpha)

    capacity = args.capacity
    if capacity is None and algo in ("sofa", "sofa-auto", "greedy"):
        if s is None:
            raise ValueError("--capacity needs --s or --estimate-s for its default")
        capacity = default_capacity(s, n)

    thetas = _parse_thetas(args.theta, algo)
    params: dict = {
        "algo": algo,
        "mode": args.mode,
        "alpha": alpha,
        "seed": args.seed,
        "n": n,
    }
    if s is not None:
        params["s"] = s

    # ---- pass 1: right clusters, one variant per theta ---------------
    variants: list[tuple[float, list[list[int]]]]
    stats = PassStats()

    if algo in ("sofa", "sofa-auto"):
        cfg = SofaConfig(
            k=args.k,
            sketch_capacity=capacity,
            c_max=args.cmax,
            metric=metric,
            seed=args.seed,
            thetas=thetas if isinstance(thetas, str) else tuple(thetas),
        )
        telemetry_fh = open(args.telemetry, "w", encoding="utf-8") if args.telemetry else None
        try:
            centers = sofa_pass(stream, cfg, telemetry=telemetry_fh, stats=stats)
        finally:
            if telemetry_fh is not None:
                telemetry_fh.close()
        if not centers:
            raise RuntimeError("empty stream: no centers found")
        if args.skip_grouping:
            groups = [(c.sketch, c.weight) for c in centers]
        else:
            groups = group_centers(centers, cfg)
        if thetas == "auto":
            thetas = [estimate_theta(groups)]
        variants = [(float(t), threshold_groups(groups, t)) for t in thetas]
        params.update(
            k=args.k,
            c_max=cfg.c_max,
            capacity=capacity,
            skip_grouping=bool(args.skip_grouping),
            phases=stats.phases,
            peak_entries=stats.peak_entries,
        )
    elif algo == "greedy":
        if args.theory_mode:
            if args.p is None or s is None:
                raise ValueError("--theory-mode needs --p and --s/--estimate-s")
            if args.threshold is not None:
                raise ValueError("give --threshold or --theory-mode, not both")
            k4 = args.k4 if args.k4 is not None else 2.1
            threshold = theory_alpha(s, k4)
            thetas = [theory_theta(args.p)]
            params.update(theory_mode=True, k4=k4, p=args.p)
        else:
            if args.threshold is None:
                raise ValueError("greedy needs --threshold (or --theory-mode)")
            threshold = args.threshold
            if thetas == "auto":
                raise ValueError("--theta auto applies to sofa-auto")
        centers = greedy_pass(stream, threshold, capacity, metric)
        variants = [(float(t), threshold_clusters(centers, t)) for t in thetas]
        params.update(threshold=threshold, capacity=capacity)
    elif algo == "static":
        if thetas == "auto":
            raise ValueError("--theta auto applies to sofa-auto")
        records = [vec for _, vec in stream.records()]
        variants = static_sofa_sweep(records, args.k, thetas, metric, seed=args.seed)
        params.update(k=args.k)
    else:  # rs-static
        if thetas == "auto":
            raise ValueError("--theta auto applies to sofa-auto")
        if len(thetas) != 1:
            raise ValueError("rs-static supports a single --theta value")
        theta = float(thetas[0])
        rs_clusters = _run_rs_static(stream, args, theta, metric)
        variants = [(theta, rs_clusters)]
        params.update(k=args.k, m_tilde=args.mtilde, n_tilde=args.ntilde)

    # ---- pass 2: left clusters for all variants in one pass ----------
    cluster_sets = [clusters for _, clusters in variants]
    if args.mode == "bicluster":
        assignments = assign_left_multi(stream, cluster_sets)
        lefts = [membership_from_assignment(a) for a in assignments]
        finals = list(cluster_sets)
    else:
        covers = cover_left_multi(stream, cluster_sets)
        lefts = []
        finals = []
        for (membership, totals), clusters in zip(covers, cluster_sets):
            pruned, kept = select_top_k(clusters, totals, args.k if args.k else len(clusters))
            lefts.append(prune_membership(membership, kept))
            finals.append(pruned)

    multi = len(variants) > 1
    for (theta, _), clusters, left in zip(variants, finals, lefts):
        artifact = ClusteringArtifact(
            mode=args.mode,
            right_clusters=clusters,
            left=left,
            params={**params, "theta": theta},
        )
        name = f"clusters_theta{_theta_tag(theta)}.tsv" if multi else "clusters.tsv"
        write_artifact(artifact, out / name, format="tsv")
        print(f"wrote {out / name}")


def _run_rs_static(stream, args, theta, metric):
    def static_algo(records):
        return static_sofa(records, args.k, theta, metric, seed=args.seed)

    return rs_reduction(stream, args.mtilde, args.ntilde, static_algo, seed=args.seed)


def _cmd_eval(args) -> None:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    artifact = read_artifact(args.clusters)
    stream = open_stream(args.input, format=args.format, n=args.n)
    gain, recall = reconstruction_stats(stream, artifact.left, artifact.right_clusters)
    values: dict = {}
    if args.ground_truth:
        truth = read_ground_truth(args.ground_truth)
        values["quality_right"] = quality(
            [c.tolist() for c in truth.right_clusters], artifact.right_clusters
        )
        blocks: dict[int, list[int]] = {}
        for uid, ids in artifact.left.items():
            for i in ids:
                blocks.setdefault(i, []).append(uid)
        found_blocks = [blocks.get(i, []) for i in range(artifact.k)]
        values["quality_left"] = quality(truth.left_blocks(), found_blocks)
    values["gain"] = gain
    values["recall"] = recall
    for key in ("peak_entries", "phases"):
        if key in artifact.params:
            values[key] = artifact.params[key]
    (out / "metrics.txt").write_text(metrics_lines(values), encoding="utf-8")
    (out / "metrics.tsv").write_text(metrics_tsv(values), encoding="utf-8")
    sys.stdout.write(metrics_lines(values))


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "gen":
            _cmd_gen(args)
        elif args.command == "run":
            _cmd_run(args)
        else:
            _cmd_eval(args)
    except Exception as exc:  # surface a clean message, nonzero exit
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
