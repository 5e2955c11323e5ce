from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Mapping, Optional, Union

import numpy as np

from .graph import Edge, Graph
from .layering import LayeredPartition, LayeringNotCovered, compute_layering
from .sampler import DegreeBoundError, SamplerParams, tvd_cap

LOG = logging.getLogger(__name__)

Prob = Union[Fraction, float]

EXACT_LIMIT = 1 << 63
NORMALIZATION_TOL = 1e-12
FLOAT_MIN_TOL = 1e-9


@dataclass(frozen=True)
class WalkDistribution:
    """
    table[j][v] = probability that Random-walk with length j returns v.

    Entries are Fractions when ``exact``; otherwise floats whose relative error is at most
    ``error_bound`` (ell * n * machine epsilon).
    """

    graph: Graph
    params: SamplerParams
    table: tuple[tuple[Prob, ...], ...]
    exact: bool
    error_bound: float = 0.0

    def cumulative(self) -> list[Prob]:
        """P_{<=ell}[v] for every v."""
        out: list[Prob] = [Fraction(0) if self.exact else 0.0] * self.graph.n
        for row in self.table:
            out = [a + b for a, b in zip(out, row)]
        return out

    def row_total(self, j: int) -> Prob:
        return sum(self.table[j], Fraction(0) if self.exact else 0.0)


def walk_distribution(g: Graph, params: SamplerParams, exact: Optional[bool] = None) -> WalkDistribution:
    """
    P_0[v] = d(v)/(n theta) on degree <= theta vertices; for j >= 1 and d(v) > theta,
    P_j[v] = sum over neighbors u of P_{j-1}[u] / d(u); P_j[v] = 0 for j >= 1 when d(v) <= theta.
    """
    if g.n != params.n:
        raise ValueError(f"params were derived for n={params.n}, graph has n={g.n}")
    if exact is None:
        exact = params.rho < EXACT_LIMIT
    if exact:
        return _exact_distribution(g, params)
    return _float_distribution(g, params)


def _exact_distribution(g: Graph, params: SamplerParams) -> WalkDistribution:
    deg = g.degrees()
    theta = params.theta
    zero = Fraction(0)
    rows: list[tuple[Fraction, ...]] = [
        tuple(Fraction(d, g.n * theta) if d <= theta else zero for d in deg)
    ]
    for _ in range(params.ell):
        prev = rows[-1]
        cur = [zero] * g.n
        for u, p in enumerate(prev):
            if not p:
                continue
            share = p / deg[u]
            for v in g.neighbors(u):
                if deg[v] > theta:
                    cur[v] += share
        rows.append(tuple(cur))
    return WalkDistribution(graph=g, params=params, table=tuple(rows), exact=True)


def _float_distribution(g: Graph, params: SamplerParams) -> WalkDistribution:
    adj = g.to_csr()
    deg = np.asarray(g.degrees(), dtype=np.float64)
    high = deg > params.theta
    inv = np.divide(1.0, deg, out=np.zeros_like(deg), where=deg > 0)
    cur = np.where(high, 0.0, deg / (g.n * params.theta))
    rows = [cur]
    for _ in range(params.ell):
        cur = np.where(high, adj @ (cur * inv), 0.0)
        rows.append(cur)
    bound = params.ell * g.n * float(np.finfo(np.float64).eps)
    LOG.info("float walk distribution n=%d ell=%d error bound %.3g", g.n, params.ell, bound)
    table = tuple(tuple(float(x) for x in row) for row in rows)
    return WalkDistribution(graph=g, params=params, table=table, exact=False, error_bound=bound)


def edge_return_probabilities(dist: WalkDistribution) -> Dict[Edge, Prob]:
    """Pr[sample_edge_once returns (v, w)] = P_{<=ell}[v] / ((ell + 1) d(v)) for every ordered edge."""
    g = dist.graph
    cum = dist.cumulative()
    scale = dist.params.ell + 1
    out: Dict[Edge, Prob] = {}
    for v, w in g.ordered_edges():
        out[(v, w)] = cum[v] / (scale * g.degree(v))
    return out


def vertex_return_probabilities(dist: WalkDistribution) -> list[Prob]:
    scale = dist.params.ell + 1
    return [p / scale for p in dist.cumulative()]


def success_probability(dist: WalkDistribution) -> Prob:
    zero: Prob = Fraction(0) if dist.exact else 0.0
    return sum(vertex_return_probabilities(dist), zero)


def rejection_law(g: Graph, dmax: int) -> Dict[Edge, Prob]:
    """Per-attempt law of the max-degree rejection sampler."""
    if g.max_degree() > dmax:
        raise DegreeBoundError(f"graph has max degree {g.max_degree()} > dmax={dmax}")
    p = Fraction(1, g.n * dmax)
    return {e: p for e in g.ordered_edges()}


def tvd_law(g: Graph, eps: float | Fraction) -> Dict[Edge, Prob]:
    """Per-attempt law of the low-degree sampler; edges out of vertices above the cap get 0."""
    cap = tvd_cap(eps)
    p = Fraction(1, g.n * cap)
    return {(u, w): (p if g.degree(u) <= cap else Fraction(0)) for u, w in g.ordered_edges()}


def conditional_law(law: Mapping[Edge, Prob]) -> Dict[Edge, Prob]:
    total = sum(law.values(), Fraction(0))
    if not total:
        raise ValueError("law has zero total mass; nothing to condition on")
    return {e: p / total for e, p in law.items()}


def _check_normalized(law: Mapping[Edge, Prob]) -> None:
    if not law:
        raise ValueError("law is empty")
    total = sum(law.values(), Fraction(0))
    if abs(float(total) - 1.0) > NORMALIZATION_TOL:
        raise ValueError(f"law is not normalized: total mass {float(total)!r}")


def tvd_exact(law: Mapping[Edge, Prob]) -> Prob:
    """Total variation distance to uniform over the law's keys (all 2m ordered edges, zeros included)."""
    _check_normalized(law)
    uniform = Fraction(1, len(law))
    return sum((abs(p - uniform) for p in law.values()), Fraction(0)) / 2


def pointwise_ratio_exact(law: Mapping[Edge, Prob]) -> tuple[Prob, Prob]:
    """(min, max) of law(e) * 2m."""
    _check_normalized(law)
    k = len(law)
    ratios = [p * k for p in law.values()]
    return min(ratios), max(ratios)


@dataclass(frozen=True)
class Violation:
    check: str
    item: Any
    value: Prob
    bound: Prob
    slack: Prob

    def as_dict(self) -> Dict[str, Any]:
        item = list(self.item) if isinstance(self.item, tuple) else self.item
        return {
            "check": self.check,
            "item": item,
            "value": float(self.value),
            "bound": float(self.bound),
            "slack": float(self.slack),
        }


@dataclass
class CertificateReport:
    params: SamplerParams
    exact: bool
    tolerance: float
    checked: Dict[str, int] = field(default_factory=lambda: {"upper": 0, "lower": 0, "edge": 0})
    violations: list[Violation] = field(default_factory=lambda: [])
    layering_depth: Optional[int] = None
    notes: list[str] = field(default_factory=lambda: [])

    @property
    def passed(self) -> bool:
        return not self.violations

    def failed_checks(self) -> set[str]:
        return {v.check for v in self.violations}

    def as_dict(self) -> Dict[str, Any]:
        failed = self.failed_checks()
        return {
            "passed": self.passed,
            "exact": self.exact,
            "tolerance": self.tolerance,
            "layering_depth": self.layering_depth,
            "checks": {name: {"checked": count, "passed": name not in failed} for name, count in self.checked.items()},
            "violations": [v.as_dict() for v in self.violations],
            "notes": list(self.notes),
        }


def certify(dist: WalkDistribution, layering: Optional[LayeredPartition]) -> CertificateReport:
    """
    Check the upper bound P_{<=ell}[v] <= d(v)/(n theta) for every vertex, the lower bound
    (1 - beta)^j d(v)/(n theta) for every vertex at level j, and every ordered-edge probability
    against [(1 - eps/2)/rho, 1/rho]. Violations are collected, not raised.

    ``layering`` may be None when the graph admits no layering with these parameters; the
    per-vertex lower bound is then skipped and noted.
    """
    params = dist.params
    g = dist.graph
    if layering is not None:
        if layering.theta != params.theta or layering.beta != params.beta:
            raise ValueError(
                f"layering built with theta={layering.theta}, beta={layering.beta}; "
                f"params have theta={params.theta}, beta={params.beta}"
            )
        if len(layering.levels) != g.n:
            raise ValueError("layering does not match the graph's vertex count")
    tol = 0.0 if dist.exact else max(FLOAT_MIN_TOL, dist.error_bound)
    report = CertificateReport(params=params, exact=dist.exact, tolerance=tol)
    cum = dist.cumulative()
    n_theta = g.n * params.theta

    def record(check: str, item: Any, value: Prob, bound: Prob, ok: bool, slack: Prob) -> None:
        report.checked[check] += 1
        if not ok:
            report.violations.append(Violation(check, item, value, bound, slack))

    for v in range(g.n):
        upper = Fraction(g.degree(v), n_theta)
        record("upper", v, cum[v], upper, _le(cum[v], upper, tol), upper - cum[v])

    if layering is None:
        report.notes.append("no (theta, beta)-layering; per-vertex lower bound skipped")
    else:
        report.layering_depth = layering.depth
        if layering.depth > params.ell:
            report.notes.append(f"layering depth {layering.depth} exceeds ell={params.ell}")
        for v in range(g.n):
            j = layering.level(v)
            lower = (1 - params.beta) ** j * Fraction(g.degree(v), n_theta)
            record("lower", v, cum[v], lower, _le(lower, cum[v], tol), cum[v] - lower)

    lo = (1 - params.eps / 2) / params.rho
    hi = Fraction(1, params.rho)
    for e, p in edge_return_probabilities(dist).items():
        if not _le(p, hi, tol):
            record("edge", e, p, hi, False, hi - p)
        elif not _le(lo, p, tol):
            record("edge", e, p, lo, False, p - lo)
        else:
            record("edge", e, p, hi, True, hi - p)

    if report.violations:
        LOG.warning("certification found %d violations (%s)", len(report.violations), sorted(report.failed_checks()))
    return report


def _le(a: Prob, b: Prob, rel_tol: float) -> bool:
    if not rel_tol:
        return a <= b
    fa, fb = float(a), float(b)
    return fa <= fb + rel_tol * max(abs(fa), abs(fb))


@dataclass
class Analysis:
    """Everything ``analyze`` derives for one graph and parameter set."""

    distribution: WalkDistribution
    layering: Optional[LayeredPartition]
    certificate: CertificateReport
    edge_probabilities: Dict[Edge, Prob]

    @property
    def success_probability(self) -> Prob:
        zero: Prob = Fraction(0) if self.distribution.exact else 0.0
        return sum(self.edge_probabilities.values(), zero)

    def conditional_law(self) -> Dict[Edge, Prob]:
        return conditional_law(self.edge_probabilities)

    def as_dict(self) -> Dict[str, Any]:
        params = self.distribution.params
        cond = self.conditional_law() if self.edge_probabilities and self.success_probability else None
        out: Dict[str, Any] = {
            "params": params.as_dict(),
            "n": self.distribution.graph.n,
            "m": self.distribution.graph.m,
            "success_probability": float(self.success_probability),
            "bounds": {
                "edge_lower": float((1 - params.eps / 2) / params.rho),
                "edge_upper": 1.0 / params.rho,
            },
            "certificate": self.certificate.as_dict(),
            "edges": [
                {"u": u, "v": v, "probability": float(p)} for (u, v), p in self.edge_probabilities.items()
            ],
        }
        if cond is not None:
            lo, hi = pointwise_ratio_exact(cond)
            out["conditional"] = {"tvd": float(tvd_exact(cond)), "min_ratio": float(lo), "max_ratio": float(hi)}
        return out


def analyze(g: Graph, params: SamplerParams, exact: Optional[bool] = None) -> Analysis:
    dist = walk_distribution(g, params, exact=exact)
    try:
        layering: Optional[LayeredPartition] = compute_layering(g, params.theta, params.beta)
    except LayeringNotCovered as exc:
        LOG.warning("%s", exc)
        layering = None
    return Analysis(
        distribution=dist,
        layering=layering,
        certificate=certify(dist, layering),
        edge_probabilities=edge_return_probabilities(dist),
    )

