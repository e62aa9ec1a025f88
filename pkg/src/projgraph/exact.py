"""Exact distributions over all graphs of a given size.

Everything here is exhaustive: a distribution is a table with one entry
per graph, indexed by the graph/integer bijection from
:mod:`projgraph.graph`.  Log-space arithmetic is used throughout
(max-shifted logsumexp) so large parameter values cannot overflow.
Independent-dyad families additionally get closed-form normalizers and
moments valid at any size.

Enumeration is capped at n <= 7 by default (2^21 graphs); the cap can be
raised to n = 8 explicitly, which emits a memory warning (the tables
then hold 2^28 entries).  Larger sizes are refused.
"""

from __future__ import annotations

import csv
import io
import itertools
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
from scipy.special import logsumexp

from .graph import Graph, NodeSubset, dyad_count, dyad_index, graph_from_index
from .models import (
    ModelSpec,
    NaturalParams,
    ParamVector,
    StatsVector,
    natural_params,
    edge_prob,
)

__all__ = [
    "DEFAULT_ENUMERATION_CAP",
    "MAX_ENUMERATION_CAP",
    "EnumerationCapError",
    "resolve_enum_cap",
    "enumerated_stats",
    "log_normalizer",
    "ExactDistribution",
    "build_distribution",
    "expected_stats",
    "stat_covariance",
    "marginal_distribution",
    "tv_distance",
    "ProjectivityReport",
    "projectivity_check",
    "default_theta_grid",
    "PROJECTIVITY_TOLERANCE",
    "exact_sample",
    "sample_bernoulli",
]

DEFAULT_ENUMERATION_CAP = 7
MAX_ENUMERATION_CAP = 8
PROJECTIVITY_TOLERANCE = 1e-9

_CHUNK = 1 << 20


class EnumerationCapError(Exception):
    """Raised when a computation would enumerate more graphs than allowed."""


def resolve_enum_cap(n: int, enum_cap: Optional[int] = None) -> int:
    """Validate the requested cap and check ``n`` against it.

    Returns the effective cap.  Raises ``ValueError`` for an invalid cap
    request and :class:`EnumerationCapError` when ``n`` exceeds the cap.
    Enumerating at n = 8 is allowed only by explicit override and warns:
    the tables hold 2^28 entries (gigabytes of floats).
    """
    cap = DEFAULT_ENUMERATION_CAP if enum_cap is None else enum_cap
    if enum_cap is not None and not 1 <= enum_cap <= MAX_ENUMERATION_CAP:
        raise ValueError(
            f"enumeration cap must lie in [1, {MAX_ENUMERATION_CAP}], got {enum_cap}"
        )
    if n > cap:
        raise EnumerationCapError(
            f"n={n} exceeds the enumeration cap {cap}"
            + (
                f" (override up to {MAX_ENUMERATION_CAP} is possible but costly)"
                if cap < MAX_ENUMERATION_CAP
                else ""
            )
        )
    if n > DEFAULT_ENUMERATION_CAP:
        warnings.warn(
            f"enumerating all 2^{dyad_count(n)} graphs on {n} nodes allocates "
            "multi-gigabyte tables",
            ResourceWarning,
            stacklevel=2,
        )
    return cap


@lru_cache(maxsize=8)
def _enumerated_stats_cached(family_name: str, n: int) -> np.ndarray:
    from .models import _REGISTRY

    fam = _REGISTRY[family_name]
    if fam.bulk_stats is not None:
        table = fam.bulk_stats(n)
    else:
        total = 1 << dyad_count(n)
        table = np.empty((total, fam.stat_dim), dtype=np.float64)
        for k in range(total):
            table[k] = fam.stats(graph_from_index(n, k))
    if table.shape != (1 << dyad_count(n), fam.stat_dim):
        raise ValueError(
            f"bulk statistics for family {family_name!r} have shape "
            f"{table.shape}, expected ({1 << dyad_count(n)}, {fam.stat_dim})"
        )
    table.flags.writeable = False
    return table


def enumerated_stats(
    spec: ModelSpec, n: int, enum_cap: Optional[int] = None
) -> np.ndarray:
    """Statistic table for all graphs of size n, row k = stats of graph k."""
    resolve_enum_cap(n, enum_cap)
    return _enumerated_stats_cached(spec.family, n)


def _kernel(spec: ModelSpec, theta: ParamVector, n: int, enum_cap: Optional[int]) -> np.ndarray:
    eta = natural_params(spec, theta, n).as_array()
    stats = enumerated_stats(spec, n, enum_cap)
    return stats.astype(np.float64, copy=False) @ eta


def log_normalizer(
    spec: ModelSpec, theta: ParamVector, n: int, enum_cap: Optional[int] = None
) -> float:
    """log sum over all graphs of exp(eta . s(g)).

    Independent-dyad families use the closed form C(n,2)*log(1+e^eta) at
    any size; other families enumerate (cap applies).
    """
    if spec.definition.bernoulli:
        eta = natural_params(spec, theta, n).eta[0]
        return float(dyad_count(n) * np.logaddexp(0.0, eta))
    return float(logsumexp(_kernel(spec, theta, n, enum_cap)))


@dataclass(frozen=True, eq=False)
class ExactDistribution:
    """Full probability table over all graphs of size n for one (spec, theta).

    ``log_probs[k]`` is the log probability of ``graph_from_index(n, k)``;
    the table is normalized (logsumexp equals 0 up to rounding).
    """

    n: int
    spec: ModelSpec
    theta: ParamVector
    log_probs: np.ndarray
    log_z: float
    _cdf: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def probs(self) -> np.ndarray:
        return np.exp(self.log_probs)

    def _cumulative(self) -> np.ndarray:
        if self._cdf is None:
            object.__setattr__(self, "_cdf", np.cumsum(np.exp(self.log_probs)))
        return self._cdf


def build_distribution(
    spec: ModelSpec,
    theta: ParamVector,
    n: int,
    enum_cap: Optional[int] = None,
    threads: int = 1,
) -> ExactDistribution:
    """Enumerate the exact distribution table (cap applies to all families).

    With ``threads > 1`` the kernel is filled over disjoint index ranges in
    a thread pool; the normalizing reduction always runs over the full
    table in index order, so the result is identical for any thread count.
    """
    resolve_enum_cap(n, enum_cap)
    eta = natural_params(spec, theta, n).as_array()
    stats = enumerated_stats(spec, n, enum_cap)
    total = stats.shape[0]
    kernel = np.empty(total, dtype=np.float64)
    spans = [(lo, min(lo + _CHUNK, total)) for lo in range(0, total, _CHUNK)]

    def fill(span: tuple[int, int]) -> None:
        lo, hi = span
        kernel[lo:hi] = stats[lo:hi].astype(np.float64, copy=False) @ eta

    if threads > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(fill, spans))
    else:
        for span in spans:
            fill(span)
    log_z = float(logsumexp(kernel))
    kernel -= log_z
    kernel.flags.writeable = False
    return ExactDistribution(n=n, spec=spec, theta=theta, log_probs=kernel, log_z=log_z)


def expected_stats(
    spec: ModelSpec, theta: ParamVector, n: int, enum_cap: Optional[int] = None
) -> StatsVector:
    """Mean sufficient statistics under the model at (theta, n)."""
    if spec.definition.bernoulli:
        pi = edge_prob(spec, theta, n)
        return StatsVector(values=(dyad_count(n) * pi,))
    kernel = _kernel(spec, theta, n, enum_cap)
    w = np.exp(kernel - logsumexp(kernel))
    stats = enumerated_stats(spec, n, enum_cap).astype(np.float64, copy=False)
    return StatsVector(values=tuple(w @ stats))


def stat_covariance(
    spec: ModelSpec, theta: ParamVector, n: int, enum_cap: Optional[int] = None
) -> np.ndarray:
    """Covariance matrix of the sufficient statistics at (theta, n)."""
    if spec.definition.bernoulli:
        pi = edge_prob(spec, theta, n)
        return np.array([[dyad_count(n) * pi * (1.0 - pi)]])
    kernel = _kernel(spec, theta, n, enum_cap)
    w = np.exp(kernel - logsumexp(kernel))
    stats = enumerated_stats(spec, n, enum_cap).astype(np.float64, copy=False)
    mu = w @ stats
    second = stats.T @ (stats * w[:, None])
    return second - np.outer(mu, mu)


def marginal_distribution(d: ExactDistribution, s: NodeSubset) -> np.ndarray:
    """Probability table of the induced subgraph on ``s`` under ``d``.

    Entry y of the result is the total probability of all size-n graphs
    whose induced subgraph on ``s`` has graph index y.  Prefix subsets
    reduce to a bit-mask because prefix dyads occupy the low index bits.
    """
    if s.parent_n != d.n:
        raise ValueError(
            f"invalid subset: parent_n={s.parent_n} does not match distribution n={d.n}"
        )
    m = len(s.members)
    sub_d = dyad_count(m)
    out = np.zeros(1 << sub_d, dtype=np.float64)
    total = d.log_probs.shape[0]
    prefix = s.members == tuple(range(m))
    pair_map = None
    if not prefix:
        pair_map = [
            (dyad_index(s.members[a], s.members[b]), dyad_index(a, b))
            for b in range(1, m)
            for a in range(b)
        ]
    for lo in range(0, total, _CHUNK):
        hi = min(lo + _CHUNK, total)
        idx = np.arange(lo, hi, dtype=np.int64)
        if prefix:
            sub = idx & ((1 << sub_d) - 1)
        else:
            sub = np.zeros(hi - lo, dtype=np.int64)
            for parent_k, sub_k in pair_map:
                sub |= ((idx >> parent_k) & 1) << sub_k
        out += np.bincount(sub, weights=np.exp(d.log_probs[lo:hi]), minlength=1 << sub_d)
    return out


def tv_distance(p: np.ndarray, q: np.ndarray) -> float:
    """Total variation distance, half the L1 distance between the tables."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise ValueError(f"probability tables differ in shape: {p.shape} vs {q.shape}")
    for name, table in (("first", p), ("second", q)):
        if abs(float(table.sum()) - 1.0) > 1e-8:
            raise ValueError(f"{name} table is not normalized (sum={table.sum()!r})")
    return float(0.5 * np.abs(p - q).sum())


@dataclass(frozen=True)
class ProjectivityReport:
    """Grid check of marginalization consistency between two sizes.

    A family is projective when, for every theta, the model on n_sub
    nodes coincides with the marginal of the model on n nodes and the
    natural parameters agree across sizes.  A grid can certify
    non-projectivity definitively, but projectivity only on the grid —
    the verdict wording reflects that asymmetry.
    """

    n: int
    n_sub: int
    theta_grid: tuple[ParamVector, ...]
    tv_per_theta: tuple[float, ...]
    param_equal: bool
    max_tv: float
    verdict: str

    def to_csv(self) -> str:
        dim = len(self.theta_grid[0])
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([f"theta_{k + 1}" for k in range(dim)] + ["tv", "param_equal"])
        flag = "true" if self.param_equal else "false"
        for theta, tv in zip(self.theta_grid, self.tv_per_theta):
            writer.writerow([repr(v) for v in theta.theta] + [repr(tv), flag])
        writer.writerow(["max_tv", "verdict"])
        writer.writerow([repr(self.max_tv), self.verdict])
        return buf.getvalue()


def default_theta_grid(spec: ModelSpec) -> tuple[ParamVector, ...]:
    """Product grid over {-2, -1, 0, 1, 2} per statistic component."""
    axis = (-2.0, -1.0, 0.0, 1.0, 2.0)
    return tuple(
        ParamVector(theta=point)
        for point in itertools.product(axis, repeat=spec.stat_dim)
    )


def projectivity_check(
    spec: ModelSpec,
    theta_grid: Optional[Sequence[ParamVector]] = None,
    *,
    n: int,
    n_sub: int,
    tolerance: float = PROJECTIVITY_TOLERANCE,
    enum_cap: Optional[int] = None,
    threads: int = 1,
) -> ProjectivityReport:
    """Compare the size-n_sub model with the size-n marginal over a theta grid."""
    if not 1 <= n_sub < n:
        raise ValueError(f"need 1 <= n_sub < n, got n_sub={n_sub}, n={n}")
    grid = tuple(theta_grid) if theta_grid is not None else default_theta_grid(spec)
    if not grid:
        raise ValueError("theta grid must be non-empty")
    subset = NodeSubset(parent_n=n, members=tuple(range(n_sub)))
    tvs = []
    param_equal = True
    for theta in grid:
        big = build_distribution(spec, theta, n, enum_cap, threads=threads)
        marginal = marginal_distribution(big, subset)
        small = build_distribution(spec, theta, n_sub, enum_cap, threads=threads)
        tvs.append(tv_distance(marginal, small.probs()))
        if natural_params(spec, theta, n_sub).eta != natural_params(spec, theta, n).eta:
            param_equal = False
    max_tv = max(tvs)
    projective = param_equal and max_tv <= tolerance
    return ProjectivityReport(
        n=n,
        n_sub=n_sub,
        theta_grid=grid,
        tv_per_theta=tuple(tvs),
        param_equal=param_equal,
        max_tv=max_tv,
        verdict="projective-on-grid" if projective else "non-projective",
    )


def exact_sample(d: ExactDistribution, rng: np.random.Generator) -> Graph:
    """Draw one graph from the table by inverse CDF; one uniform per draw."""
    cdf = d._cumulative()
    u = rng.random() * cdf[-1]
    k = int(np.searchsorted(cdf, u, side="right"))
    return graph_from_index(d.n, min(k, len(cdf) - 1))


def sample_bernoulli(n: int, pi: float, rng: np.random.Generator) -> Graph:
    """Graph on n nodes with each dyad independently present w.p. ``pi``."""
    if not 0.0 <= pi <= 1.0:
        raise ValueError(f"edge probability must lie in [0, 1], got {pi}")
    d = dyad_count(n)
    if d == 0:
        return Graph(n, 0)
    bits = rng.random(d) < pi
    dyads = int.from_bytes(np.packbits(bits, bitorder="little").tobytes(), "little")
    return Graph(n, dyads)
