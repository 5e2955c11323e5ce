from __future__ import annotations

import csv
import io
import json
import logging
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import IO, Any, Dict, Iterable, Optional, Sequence

import numpy as np
import scipy.stats

from .analyzer import Analysis, analyze
from .generators import GenSpec, generate
from .graph import Edge, Graph, OracleSession, QueryCounts
from .layering import default_params
from .sampler import (
    SamplerParams,
    SamplingExhausted,
    rejection_baseline,
    sample_edge,
    sample_edge_once,
    tvd_sample,
)

LOG = logging.getLogger(__name__)

SIGMA_LIMIT = 5.0
CONFIDENCE = 0.99
BENCH_SCHEMA = "edge-sampler bench v1"


@dataclass
class _ShardTally:
    counts: Counter[Edge] = field(default_factory=lambda: Counter())
    failures: int = 0
    gaps: Counter[int] = field(default_factory=lambda: Counter())
    queries: QueryCounts = field(default_factory=QueryCounts)

    def merge(self, other: _ShardTally) -> None:
        self.counts.update(other.counts)
        self.failures += other.failures
        self.gaps.update(other.gaps)
        self.queries = self.queries + other.queries


def _run_shard(graph: Graph, params: SamplerParams, trials: int, seed: np.random.SeedSequence) -> _ShardTally:
    session = OracleSession(graph, seed)
    tally = _ShardTally()
    gap = 0
    for _ in range(trials):
        gap += 1
        outcome = sample_edge_once(session, params)
        if outcome.edge is None:
            tally.failures += 1
            continue
        tally.counts[outcome.edge] += 1
        tally.gaps[gap] += 1
        gap = 0
    tally.queries = session.counts
    return tally


def _shard_sizes(total: int, workers: int) -> list[int]:
    base, extra = divmod(total, workers)
    return [base + (1 if i < extra else 0) for i in range(workers)]


def _z(count: int, trials: int, p: float) -> float:
    sd = math.sqrt(trials * p * (1 - p))
    diff = count - trials * p
    if sd == 0:
        return 0.0 if diff == 0 else math.copysign(math.inf, diff)
    return diff / sd


@dataclass
class EdgeStat:
    edge: Edge
    count: int
    probability: float
    z: float
    flagged: bool
    ratio: Optional[float]
    ratio_low: Optional[float]
    ratio_high: Optional[float]


@dataclass
class SampleReport:
    """Observed sample_edge_once counts against the analyzer's exact law."""

    graph_id: str
    params: SamplerParams
    trials: int
    seed: int
    workers: int
    failures: int
    failure_probability: float
    failure_z: float
    edges: list[EdgeStat]
    attempts_histogram: Dict[int, int]
    queries: QueryCounts
    certificate_passed: bool
    chi_square: Optional[float] = None
    chi_square_pvalue: Optional[float] = None

    @property
    def successes(self) -> int:
        return self.trials - self.failures

    @property
    def flagged(self) -> list[EdgeStat]:
        return [e for e in self.edges if e.flagged]

    @property
    def passed(self) -> bool:
        return self.certificate_passed and not self.flagged and abs(self.failure_z) <= SIGMA_LIMIT

    def as_dict(self) -> Dict[str, Any]:
        return {
            "graph": self.graph_id,
            "params": self.params.as_dict(),
            "trials": self.trials,
            "seed": self.seed,
            "workers": self.workers,
            "successes": self.successes,
            "failures": self.failures,
            "failure_probability": self.failure_probability,
            "failure_z": self.failure_z,
            "certificate_passed": self.certificate_passed,
            "passed": self.passed,
            "flagged": len(self.flagged),
            "chi_square": self.chi_square,
            "chi_square_pvalue": self.chi_square_pvalue,
            "queries": self.queries.as_dict(),
            "attempts_histogram": {str(k): v for k, v in sorted(self.attempts_histogram.items())},
            "edges": [
                {
                    "u": e.edge[0],
                    "v": e.edge[1],
                    "count": e.count,
                    "probability": e.probability,
                    "z": e.z,
                    "flagged": e.flagged,
                    "ratio": e.ratio,
                    "ratio_low": e.ratio_low,
                    "ratio_high": e.ratio_high,
                }
                for e in self.edges
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, indent=2) + "\n"


def verify(
    graph: Graph,
    params: SamplerParams,
    trials: int,
    seed: int,
    workers: int = 1,
    graph_id: str = "graph",
    analysis: Optional[Analysis] = None,
    logger: Optional[logging.Logger] = None,
) -> SampleReport:
    """
    Run ``trials`` independent sample_edge_once calls and compare every ordered edge's count with its
    exact probability; an edge is flagged when |count - N p| > 5 sqrt(N p (1 - p)).

    Trials are split over ``workers`` shard sessions seeded from SeedSequence(seed).spawn(workers);
    counts merge additively, so a fixed (graph, params, trials, seed, workers) gives the same report.
    """
    log = logger or LOG
    if trials < 1 or workers < 1:
        raise ValueError(f"need trials >= 1 and workers >= 1, got {trials}, {workers}")
    analysis = analysis or analyze(graph, params)
    if not analysis.certificate.passed:
        log.warning("certification failed for %s; verification continues", graph_id)
    seeds = np.random.SeedSequence(seed).spawn(workers)
    sizes = _shard_sizes(trials, workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        shards = list(pool.map(lambda i: _run_shard(graph, params, sizes[i], seeds[i]), range(workers)))
    total = _ShardTally()
    for shard in shards:
        total.merge(shard)

    successes = trials - total.failures
    ordered = 2 * graph.m
    stats: list[EdgeStat] = []
    for e, exact_p in analysis.edge_probabilities.items():
        p = float(exact_p)
        count = total.counts.get(e, 0)
        z = _z(count, trials, p)
        ratio = low = high = None
        if successes:
            ci = scipy.stats.binomtest(count, successes).proportion_ci(confidence_level=CONFIDENCE, method="wilson")
            ratio = count / successes * ordered
            low, high = ci.low * ordered, ci.high * ordered
        stats.append(EdgeStat(e, count, p, z, abs(z) > SIGMA_LIMIT, ratio, low, high))
    stray = set(total.counts) - set(analysis.edge_probabilities)
    if stray:
        raise RuntimeError(f"sampler returned pairs that are not edges: {sorted(stray)[:5]}")

    fail_p = max(0.0, 1.0 - float(analysis.success_probability))
    chi, pvalue = _chi_square(stats, total.failures, fail_p, trials)
    report = SampleReport(
        graph_id=graph_id,
        params=params,
        trials=trials,
        seed=seed,
        workers=workers,
        failures=total.failures,
        failure_probability=fail_p,
        failure_z=_z(total.failures, trials, fail_p),
        edges=stats,
        attempts_histogram=dict(total.gaps),
        queries=total.queries,
        certificate_passed=analysis.certificate.passed,
        chi_square=chi,
        chi_square_pvalue=pvalue,
    )
    log.info(
        "verify %s: N=%d successes=%d flagged=%d queries=%d",
        graph_id,
        trials,
        successes,
        len(report.flagged),
        report.queries.total,
    )
    return report


def _chi_square(
    stats: Sequence[EdgeStat], failures: int, fail_p: float, trials: int
) -> tuple[Optional[float], Optional[float]]:
    observed = [s.count for s in stats if s.probability > 0] + [failures]
    expected = [trials * s.probability for s in stats if s.probability > 0] + [trials * fail_p]
    if len(observed) < 2 or min(expected) <= 0:
        return None, None
    scale = sum(observed) / sum(expected)
    result = scipy.stats.chisquare(observed, [x * scale for x in expected])
    return float(result.statistic), float(result.pvalue)


@dataclass
class EdgeCountEstimate:
    """m_hat = (successes / attempts) * rho / 2 with a Wilson interval scaled the same way."""

    attempts: int
    successes: int
    rho: int
    eps: float
    m_hat: Optional[float]
    low: float
    high: float
    n: int

    @property
    def m_upper(self) -> float:
        """Upper end for the true m: E[m_hat] >= (1 - eps/2) m."""
        return self.high / (1 - self.eps / 2)

    @property
    def average_degree(self) -> Optional[float]:
        return None if self.m_hat is None else 2 * self.m_hat / self.n

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self) | {"m_upper": self.m_upper, "average_degree": self.average_degree}


def estimate_edge_count(
    session: OracleSession, params: SamplerParams, attempts: int, confidence: float = 0.95
) -> EdgeCountEstimate:
    if attempts < 1:
        raise ValueError(f"attempts must be >= 1, got {attempts}")
    successes = sum(1 for _ in range(attempts) if sample_edge_once(session, params).edge is not None)
    ci = scipy.stats.binomtest(successes, attempts).proportion_ci(confidence_level=confidence, method="wilson")
    half_rho = params.rho / 2
    m_hat = successes / attempts * half_rho if successes else None
    low = 0.0 if not successes else ci.low * half_rho
    return EdgeCountEstimate(
        attempts=attempts,
        successes=successes,
        rho=params.rho,
        eps=float(params.eps),
        m_hat=m_hat,
        low=low,
        high=ci.high * half_rho,
        n=params.n,
    )


@dataclass
class BenchRow:
    family: str
    n: int
    m: int
    alpha: int
    eps: float
    trials: int
    mean_queries: Optional[float]
    mean_attempts: Optional[float]
    predicted_bound: float
    total_queries: int
    rejection_mean_queries: Optional[float] = None
    rejection_mean_attempts: Optional[float] = None
    tvd_mean_queries: Optional[float] = None
    tvd_mean_attempts: Optional[float] = None
    error: str = ""


def predicted_query_bound(params: SamplerParams, m: int) -> float:
    """(2 ell + 3) rho / ((1 - eps/2) 2m): per-attempt cost times the expected attempts."""
    if m == 0:
        return math.inf
    return params.attempt_query_budget * params.rho / ((1 - float(params.eps) / 2) * 2 * m)


def _measure(draw: Any, trials: int) -> tuple[float, float, int]:
    attempts = 0
    queries = QueryCounts()
    for _ in range(trials):
        found = draw()
        attempts += found.attempts
        queries = queries + found.queries
    return queries.total / trials, attempts / trials, queries.total


def bench(
    specs: Iterable[GenSpec],
    eps: float,
    trials: int,
    seed: int,
    baselines: bool = True,
    logger: Optional[logging.Logger] = None,
) -> list[BenchRow]:
    """
    Mean oracle queries per returned edge for each generated graph, with the max-degree rejection
    and low-degree baselines alongside. An exhausted sampler marks its row instead of aborting.
    """
    log = logger or LOG
    spec_list = list(specs)
    rows: list[BenchRow] = []
    for spec, child in zip(spec_list, np.random.SeedSequence(seed).spawn(len(spec_list))):
        gen = generate(spec)
        g = gen.graph
        alpha = spec.alpha or gen.declared_alpha
        params = default_params(g.n, alpha, eps)
        walk_seed, rejection_seed, tvd_seed = child.spawn(3)
        row = BenchRow(
            family=spec.label(),
            n=g.n,
            m=g.m,
            alpha=alpha,
            eps=float(eps),
            trials=trials,
            mean_queries=None,
            mean_attempts=None,
            predicted_bound=predicted_query_bound(params, g.m),
            total_queries=0,
        )
        session = OracleSession(g, walk_seed, logger=log)
        try:
            row.mean_queries, row.mean_attempts, row.total_queries = _measure(
                lambda: sample_edge(session, params, m_hint=max(1, g.m)), trials
            )
        except SamplingExhausted as exc:
            row.error = f"exhausted: {exc}"
        if baselines and g.m:
            rej = OracleSession(g, rejection_seed, logger=log)
            try:
                row.rejection_mean_queries, row.rejection_mean_attempts, _ = _measure(
                    lambda: rejection_baseline(rej, g.max_degree()), trials
                )
            except SamplingExhausted as exc:
                row.error = "; ".join(filter(None, [row.error, f"rejection exhausted: {exc}"]))
            low = OracleSession(g, tvd_seed, logger=log)
            try:
                row.tvd_mean_queries, row.tvd_mean_attempts, _ = _measure(lambda: tvd_sample(low, eps), trials)
            except SamplingExhausted:
                log.warning("low-degree baseline found no edge on %s", row.family)
        log.info(
            "bench %s: n=%d m=%d alpha=%d mean queries %s (bound %.1f)",
            row.family,
            row.n,
            row.m,
            row.alpha,
            row.mean_queries,
            row.predicted_bound,
        )
        rows.append(row)
    return rows


BENCH_COLUMNS = [
    "family",
    "n",
    "m",
    "alpha",
    "eps",
    "trials",
    "mean_queries",
    "mean_attempts",
    "predicted_bound",
    "total_queries",
    "rejection_mean_queries",
    "rejection_mean_attempts",
    "tvd_mean_queries",
    "tvd_mean_attempts",
    "error",
]


def write_bench_csv(rows: Sequence[BenchRow], out: IO[str]) -> None:
    out.write(f"# {BENCH_SCHEMA}\n")
    writer = csv.DictWriter(out, fieldnames=BENCH_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: ("" if v is None else v) for k, v in asdict(row).items()})


def bench_csv_text(rows: Sequence[BenchRow]) -> str:
    buf = io.StringIO()
    write_bench_csv(rows, buf)
    return buf.getvalue()


def load_bench_specs(path: str | Path) -> list[GenSpec]:
    """A JSON list of generator specs, or an object holding one under "specs"."""
    raw: Any = json.loads(Path(path).read_text(encoding="utf-8"))
    if isinstance(raw, dict) and "specs" in raw:
        raw = raw["specs"]
    if not isinstance(raw, list):
        raise ValueError("bench spec must be a JSON list of generator specs")
    return [GenSpec.from_dict(item) for item in raw]
