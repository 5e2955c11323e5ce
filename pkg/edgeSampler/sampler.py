from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, Generic, Optional, TypeVar

from .graph import Edge, OracleSession, QueryCounts

LOG = logging.getLogger(__name__)

T = TypeVar("T")

DEFAULT_MAX_ATTEMPTS = 10**6


class SamplingExhausted(RuntimeError):
    """No attempt succeeded within the budget; m may be 0 or far below rho / attempts."""

    def __init__(self, attempts: int, queries: QueryCounts) -> None:
        self.attempts = attempts
        self.queries = queries
        super().__init__(f"no success in {attempts} attempts ({queries.total} queries)")


class DegreeBoundError(ValueError):
    """The rejection baseline observed a degree above its declared maximum."""


def to_fraction(x: float | int | str | Fraction) -> Fraction:
    """Exact rational for a user-facing number; floats go through their shortest repr (0.1 -> 1/10)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


def log2_ceil(n: int) -> int:
    """ceil(log2 n) for n >= 1."""
    return (n - 1).bit_length()


@dataclass(frozen=True)
class SamplerParams:
    """
    Constants of one sampler configuration.

    ``default_params`` in the layering module derives them from (n, alpha, eps) and guarantees
    theta >= 4 * alpha * ceil(log2 n) / eps. Direct construction is allowed for experiments
    with other thresholds; only the basic domains are checked here.
    """

    n: int
    theta: int
    beta: Fraction
    ell: int
    eps: Fraction
    alpha: int
    rho: int = field(init=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.theta < 1:
            raise ValueError(f"theta must be >= 1, got {self.theta}")
        if not 0 < self.beta < 1:
            raise ValueError(f"beta must lie in (0, 1), got {self.beta}")
        if self.ell < 0:
            raise ValueError(f"ell must be >= 0, got {self.ell}")
        if not 0 < self.eps < 1:
            raise ValueError(f"eps must lie in (0, 1), got {self.eps}")
        if self.alpha < 1:
            raise ValueError(f"alpha must be >= 1, got {self.alpha}")
        object.__setattr__(self, "rho", self.n * self.theta * (self.ell + 1))

    @property
    def attempt_query_budget(self) -> int:
        """Worst-case oracle calls of one sample_edge_once: leaf (2) + walk (2 per step) + final neighbor."""
        return 2 * self.ell + 3

    def as_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "alpha": self.alpha,
            "eps": str(self.eps),
            "theta": self.theta,
            "beta": str(self.beta),
            "ell": self.ell,
            "rho": self.rho,
        }


@dataclass(frozen=True)
class WalkOutcome:
    """One invocation of sample_edge_once. ``edge`` is None on FAIL."""

    edge: Optional[Edge]
    queries: QueryCounts
    walk_length: int

    @property
    def failed(self) -> bool:
        return self.edge is None


@dataclass(frozen=True)
class Sample(Generic[T]):
    """A returned value together with the attempts and queries spent to obtain it."""

    value: T
    attempts: int
    queries: QueryCounts


def _leaf(session: OracleSession, theta: int) -> Optional[tuple[int, int]]:
    u = session.uniform_vertex()
    d = session.degree_query(u)
    if d > theta:
        return None
    # exact coin with bias d/theta
    if session.randbelow(theta) < d:
        return u, d
    return None


def _walk(session: OracleSession, theta: int, j: int) -> Optional[tuple[int, int]]:
    start = _leaf(session, theta)
    if start is None:
        return None
    v, d = start
    for _ in range(j):
        w = session.neighbor_query(v, session.randbelow(d) + 1)
        assert w is not None
        dw = session.degree_query(w)
        if dw <= theta:
            return None
        v, d = w, dw
    return v, d


def sample_a_leaf(session: OracleSession, theta: int) -> Optional[int]:
    """
    Draw u uniformly; FAIL if d(u) > theta, otherwise return u with probability d(u)/theta.

    Uses exactly one uniform draw and one degree query.
    """
    if theta < 1:
        raise ValueError(f"theta must be >= 1, got {theta}")
    found = _leaf(session, theta)
    return found[0] if found else None


def random_walk(session: OracleSession, params: SamplerParams, j: int) -> Optional[int]:
    """
    Walk j uniform steps from a sampled leaf; FAIL as soon as a step lands on a vertex of degree <= theta.
    """
    if not 0 <= j <= params.ell:
        raise ValueError(f"walk length must lie in [0, {params.ell}], got {j}")
    end = _walk(session, params.theta, j)
    return end[0] if end else None


def sample_edge_once(session: OracleSession, params: SamplerParams) -> WalkOutcome:
    before = session.counts
    j = session.randbelow(params.ell + 1)
    end = _walk(session, params.theta, j)
    edge: Optional[Edge] = None
    if end is not None:
        v, d = end
        w = session.neighbor_query(v, session.randbelow(d) + 1)
        assert w is not None
        edge = (v, w)
    return WalkOutcome(edge=edge, queries=session.counts - before, walk_length=j)


def default_max_attempts(params: SamplerParams, m_hint: Optional[int] = None) -> int:
    if m_hint is None:
        return DEFAULT_MAX_ATTEMPTS
    return math.ceil(100 * params.rho / max(1, m_hint))


def repeat_until_success(
    session: OracleSession, attempt: Callable[[], Optional[T]], max_attempts: int
) -> Sample[T]:
    """Call ``attempt`` until it returns a value; raise SamplingExhausted after ``max_attempts`` failures."""
    if max_attempts < 1:
        raise ValueError(f"max_attempts must be >= 1, got {max_attempts}")
    before = session.counts
    for attempts in range(1, max_attempts + 1):
        value = attempt()
        if value is not None:
            return Sample(value=value, attempts=attempts, queries=session.counts - before)
    spent = session.counts - before
    session.logger.warning("sampling exhausted after %d attempts (%d queries)", max_attempts, spent.total)
    raise SamplingExhausted(max_attempts, spent)


def sample_edge(
    session: OracleSession,
    params: SamplerParams,
    max_attempts: Optional[int] = None,
    m_hint: Optional[int] = None,
) -> Sample[Edge]:
    """Repeat sample_edge_once until an ordered edge is returned."""
    budget = max_attempts if max_attempts is not None else default_max_attempts(params, m_hint)
    return repeat_until_success(session, lambda: sample_edge_once(session, params).edge, budget)


def sample_unordered_edge(
    session: OracleSession,
    params: SamplerParams,
    max_attempts: Optional[int] = None,
    m_hint: Optional[int] = None,
) -> Sample[Edge]:
    found = sample_edge(session, params, max_attempts=max_attempts, m_hint=m_hint)
    u, v = found.value
    return Sample(value=(min(u, v), max(u, v)), attempts=found.attempts, queries=found.queries)


def sample_vertex_by_degree(
    session: OracleSession,
    params: SamplerParams,
    max_attempts: Optional[int] = None,
) -> Sample[int]:
    """Vertex with probability pointwise eps-close to d(v)/2m: the walk's endpoint without the final step."""

    def attempt() -> Optional[int]:
        j = session.randbelow(params.ell + 1)
        end = _walk(session, params.theta, j)
        return end[0] if end else None

    return repeat_until_success(session, attempt, max_attempts or DEFAULT_MAX_ATTEMPTS)


def rejection_attempt(session: OracleSession, dmax: int) -> Optional[Edge]:
    """One round of the max-degree rejection sampler: Pr[(u, v)] = 1/(n * dmax)."""
    if dmax < 1:
        raise ValueError(f"dmax must be >= 1, got {dmax}")
    u = session.uniform_vertex()
    d = session.degree_query(u)
    if d > dmax:
        raise DegreeBoundError(f"vertex {u} has degree {d} > dmax={dmax}")
    if session.randbelow(dmax) >= d:
        return None
    w = session.neighbor_query(u, session.randbelow(d) + 1)
    assert w is not None
    return (u, w)


def rejection_baseline(session: OracleSession, dmax: int, max_attempts: int = DEFAULT_MAX_ATTEMPTS) -> Sample[Edge]:
    """Exactly uniform ordered edge; expected attempts n * dmax / 2m."""
    return repeat_until_success(session, lambda: rejection_attempt(session, dmax), max_attempts)


def tvd_cap(eps: float | Fraction) -> int:
    e = to_fraction(eps)
    if not 0 < e < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    return math.ceil(1 / e)


def tvd_baseline(session: OracleSession, eps: float | Fraction) -> Optional[Edge]:
    """
    One round of the low-degree sampler: vertices above the cap c = ceil(1/eps) are ignored, the rest
    are accepted with probability d(u)/c.
    """
    cap = tvd_cap(eps)
    u = session.uniform_vertex()
    d = session.degree_query(u)
    if d > cap or session.randbelow(cap) >= d:
        return None
    w = session.neighbor_query(u, session.randbelow(d) + 1)
    assert w is not None
    return (u, w)


def tvd_sample(session: OracleSession, eps: float | Fraction, max_attempts: int = DEFAULT_MAX_ATTEMPTS) -> Sample[Edge]:
    return repeat_until_success(session, lambda: tvd_baseline(session, eps), max_attempts)
