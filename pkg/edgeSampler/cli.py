from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, Optional

from .analyzer import analyze
from .generators import GenSpec, generate, write_generated
from .graph import Graph, OracleSession, read_graph
from .harness import bench, estimate_edge_count, load_bench_specs, verify, write_bench_csv
from .layering import LayeringNotCovered, compute_layering, default_params
from .sampler import (
    SamplingExhausted,
    rejection_baseline,
    sample_edge,
    to_fraction,
    tvd_sample,
)

LOG = logging.getLogger("edgeSampler")


def _parse_params(text: str) -> Dict[str, Any]:
    """``k=v,k=v``; values are integers except the bit-strings ``x`` and ``y``."""
    out: Dict[str, Any] = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ValueError(f"expected k=v in --params, got {item!r}")
        out[key] = value if key in ("x", "y") else int(value)
    return out


def _add_model_args(p: argparse.ArgumentParser, seed: bool = True) -> None:
    p.add_argument("graph", help="Edge-list file")
    p.add_argument("--n", type=int, default=None, help="Vertex count, for isolated vertices past the largest label")
    p.add_argument("--alpha", type=int, required=True, help="Arboricity bound")
    p.add_argument("--eps", type=float, required=True, help="Pointwise accuracy in (0, 1)")
    if seed:
        p.add_argument("--seed", type=int, default=0, help="Random seed")


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="edge-sampler", description="Sample edges of bounded-arboricity graphs")
    p.add_argument("--log-level", default="INFO", help="Logging level")
    sub = p.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="Generate a graph family with its forest certificate")
    gen.add_argument("--family", required=True, help="Graph family")
    gen.add_argument("--params", default="", help="Family parameters as k=v,...")
    gen.add_argument("--seed", type=int, default=0, help="Random seed")
    gen.add_argument("--out", required=True, help="Edge-list output path; metadata goes to <stem>.meta.json")

    lay = sub.add_parser("layering", help="Print the greedy (theta, beta)-layering")
    lay.add_argument("graph", help="Edge-list file")
    lay.add_argument("--n", type=int, default=None, help="Vertex count, for isolated vertices past the largest label")
    lay.add_argument("--theta", type=int, default=None, help="Low-degree threshold")
    lay.add_argument("--beta", type=str, default=None, help="Allowed fraction of higher-level neighbors")
    lay.add_argument("--auto", action="store_true", help="Derive theta and beta from --alpha and --eps")
    lay.add_argument("--alpha", type=int, default=None, help="Arboricity bound (with --auto)")
    lay.add_argument("--eps", type=float, default=None, help="Accuracy (with --auto)")

    sample = sub.add_parser("sample", help="Draw edges; prints 'u v attempts queries' per line")
    _add_model_args(sample)
    sample.add_argument("--count", type=int, default=1, help="Number of edges to return")
    sample.add_argument(
        "--algo",
        choices=("paper", "walk", "rejection", "tvd"),
        default="paper",
        help="Sampling algorithm; walk is an alias of paper",
    )
    sample.add_argument("--dmax", type=int, default=None, help="Degree bound for --algo rejection")
    sample.add_argument("--max-attempts", type=int, default=None, help="Attempts per edge before giving up")

    an = sub.add_parser("analyze", help="Exact per-edge law and certification report")
    _add_model_args(an, seed=False)
    an.add_argument("--out", default=None, help="JSON report path (stdout when omitted)")
    an.add_argument("--float", dest="exact", action="store_false", default=None, help="Use the float recurrence")

    ver = sub.add_parser("verify", help="Compare sampled counts with the exact law")
    _add_model_args(ver)
    ver.add_argument("--trials", type=int, default=100000, help="Number of sample_edge_once calls")
    ver.add_argument("--workers", type=int, default=1, help="Shards run in parallel")
    ver.add_argument("--out", default=None, help="JSON report path (stdout when omitted)")

    b = sub.add_parser("bench", help="Query-complexity benchmark over generated graphs")
    b.add_argument("--spec", required=True, help="JSON list of generator specs")
    b.add_argument("--eps", type=float, default=0.5, help="Pointwise accuracy in (0, 1)")
    b.add_argument("--trials", type=int, default=1000, help="Returned edges per graph")
    b.add_argument("--seed", type=int, default=0, help="Random seed")
    b.add_argument("--no-baselines", dest="baselines", action="store_false", help="Skip the baseline samplers")
    b.add_argument("--out", default=None, help="CSV output path (stdout when omitted)")

    est = sub.add_parser("estimate-m", help="Estimate the edge count from the success rate")
    _add_model_args(est)
    est.add_argument("--attempts", type=int, required=True, help="Number of sample_edge_once calls")
    est.add_argument("--confidence", type=float, default=0.95, help="Interval confidence level")
    return p


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
        LOG.info("wrote %s", out)
    else:
        sys.stdout.write(text)


def _cmd_gen(args: argparse.Namespace) -> int:
    spec = GenSpec.from_dict({"family": args.family, "params": _parse_params(args.params), "seed": args.seed})
    gen = generate(spec)
    meta = write_generated(gen, args.out)
    LOG.info("generated %s: n=%d m=%d alpha<=%d (%s)", spec.label(), gen.graph.n, gen.graph.m, gen.declared_alpha, meta)
    return 0


def _cmd_layering(args: argparse.Namespace) -> int:
    g = read_graph(args.graph, n=args.n)
    if args.auto:
        if args.alpha is None or args.eps is None:
            raise ValueError("--auto needs --alpha and --eps")
        params = default_params(g.n, args.alpha, args.eps)
        theta, beta = params.theta, params.beta
    else:
        if args.theta is None or args.beta is None:
            raise ValueError("give --theta and --beta, or --auto with --alpha and --eps")
        theta, beta = args.theta, to_fraction(args.beta)
    try:
        layering = compute_layering(g, theta, beta)
    except LayeringNotCovered as exc:
        LOG.error("%s", exc)
        return 1
    lines = [f"{v} {lvl}" for v, lvl in enumerate(layering.levels)]
    lines.append(f"depth={layering.depth}")
    sys.stdout.write("\n".join(lines) + "\n")
    return 0


def _sampler_for(args: argparse.Namespace, g: Graph, session: OracleSession) -> Callable[[], Any]:
    if args.algo == "rejection":
        dmax = args.dmax if args.dmax is not None else g.max_degree()
        if args.max_attempts:
            return lambda: rejection_baseline(session, dmax, args.max_attempts)
        return lambda: rejection_baseline(session, dmax)
    if args.algo == "tvd":
        if args.max_attempts:
            return lambda: tvd_sample(session, args.eps, args.max_attempts)
        return lambda: tvd_sample(session, args.eps)
    params = default_params(g.n, args.alpha, args.eps)
    return lambda: sample_edge(session, params, max_attempts=args.max_attempts)


def _cmd_sample(args: argparse.Namespace) -> int:
    if args.count < 1:
        raise ValueError(f"--count must be >= 1, got {args.count}")
    g = read_graph(args.graph, n=args.n)
    session = OracleSession(g, args.seed, logger=LOG)
    draw = _sampler_for(args, g, session)
    try:
        for _ in range(args.count):
            found = draw()
            u, v = found.value
            sys.stdout.write(f"{u} {v} {found.attempts} {found.queries.total}\n")
    except SamplingExhausted as exc:
        LOG.error("%s", exc)
        return 1
    return 0


def _cmd_analyze(args: argparse.Namespace) -> int:
    g = read_graph(args.graph, n=args.n)
    report = analyze(g, default_params(g.n, args.alpha, args.eps), exact=args.exact)
    _emit(json.dumps(report.as_dict(), sort_keys=True, indent=2) + "\n", args.out)
    return 0 if report.certificate.passed else 1


def _cmd_verify(args: argparse.Namespace) -> int:
    g = read_graph(args.graph, n=args.n)
    params = default_params(g.n, args.alpha, args.eps)
    report = verify(g, params, args.trials, args.seed, workers=args.workers, graph_id=Path(args.graph).name)
    _emit(report.to_json(), args.out)
    return 0 if report.passed else 1


def _cmd_bench(args: argparse.Namespace) -> int:
    rows = bench(load_bench_specs(args.spec), args.eps, args.trials, args.seed, baselines=args.baselines)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            write_bench_csv(rows, fh)
        LOG.info("wrote %s", args.out)
    else:
        write_bench_csv(rows, sys.stdout)
    return 1 if any(r.error for r in rows) else 0


def _cmd_estimate(args: argparse.Namespace) -> int:
    g = read_graph(args.graph, n=args.n)
    session = OracleSession(g, args.seed, logger=LOG)
    estimate = estimate_edge_count(session, default_params(g.n, args.alpha, args.eps), args.attempts, args.confidence)
    sys.stdout.write(json.dumps(estimate.as_dict(), sort_keys=True) + "\n")
    return 0


_COMMANDS: Dict[str, Callable[[argparse.Namespace], int]] = {
    "gen": _cmd_gen,
    "layering": _cmd_layering,
    "sample": _cmd_sample,
    "analyze": _cmd_analyze,
    "verify": _cmd_verify,
    "bench": _cmd_bench,
    "estimate-m": _cmd_estimate,
}


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=getattr(logging, args.log_level.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    try:
        return _COMMANDS[args.command](args)
    except OSError as exc:
        LOG.error("%s", exc)
        return 2
    except ValueError as exc:
        LOG.error("%s", exc)
        return 2
    except Exception:
        LOG.exception("%s failed", args.command)
        return 1


if __name__ == "__main__":
    sys.exit(main())
