"""Likelihoods and maximum likelihood estimation.

Observed data comes in three shapes: a fully observed graph, an induced
subgraph with known population size, or a list of independent same-size
replicate graphs.  For subgraph data two likelihoods are available:

* proper — the total model probability of every population graph whose
  induced subgraph equals the observation, valid under an ignorable
  node-sampling design (the uniform-random-subset design used by the
  experiment harness is ignorable, so no design factor is needed);
* misspecified — the subgraph-sized model evaluated at the observation,
  which coincides with the proper likelihood only for families whose
  marginals are size-consistent.

Independent-dyad families admit closed forms everywhere (the proper
likelihood is binomial in the population edge probability).  Other
families are handled by exhaustive enumeration: the proper likelihood
sums the population model over all completions of the unobserved dyads.
Estimation uses closed-form logit estimators where available and damped
Newton iteration on the moment equation elsewhere.  Data whose
sufficient statistics lie on the boundary of the attainable range have
no finite maximizer and are reported with ``boundary=True``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Optional, Sequence, Union

import numpy as np
from scipy.spatial import ConvexHull, QhullError
from scipy.special import logsumexp

from .exact import (
    enumerated_stats,
    log_normalizer,
    resolve_enum_cap,
    stat_covariance,
)
from .graph import Graph, dyad_count, edge_count
from .models import (
    ModelSpec,
    ParamVector,
    natural_params,
    sufficient_stats,
)

__all__ = [
    "FullGraph",
    "InducedSubgraph",
    "Replicates",
    "ObservedData",
    "LikelihoodKind",
    "MLEResult",
    "proper_log_likelihood",
    "completion_log_likelihood",
    "misspecified_log_likelihood",
    "log_likelihood",
    "mle",
    "fisher_information",
    "finite_difference_hessian",
    "mle_csv_header",
    "mle_csv_row",
    "format_mle_csv",
    "NEWTON_TOLERANCE",
    "NEWTON_MAX_ITERATIONS",
]

NEWTON_TOLERANCE = 1e-10
NEWTON_MAX_ITERATIONS = 100
_DIVERGENCE_NORM = 25.0
_SATURATION_TOL = 1e-10
_RECESSION_VALUE_TOL = 1e-9
_HESSIAN_STEP = 1e-4
_HULL_INTERIOR_TOL = 1e-9


@dataclass(frozen=True)
class FullGraph:
    """A completely observed graph."""

    graph: Graph


@dataclass(frozen=True)
class InducedSubgraph:
    """An induced subgraph observed from a population of known size."""

    subgraph: Graph
    population_n: int

    def __post_init__(self) -> None:
        if self.subgraph.n >= self.population_n:
            raise ValueError(
                f"subgraph size {self.subgraph.n} must be smaller than "
                f"population size {self.population_n}"
            )


@dataclass(frozen=True)
class Replicates:
    """Independent graphs of one common size."""

    graphs: tuple[Graph, ...]

    def __post_init__(self) -> None:
        graphs = tuple(self.graphs)
        object.__setattr__(self, "graphs", graphs)
        if not graphs:
            raise ValueError("replicate list must be non-empty")
        if any(g.n != graphs[0].n for g in graphs):
            raise ValueError("replicate graphs must share one node count")

    @property
    def n(self) -> int:
        return self.graphs[0].n


ObservedData = Union[FullGraph, InducedSubgraph, Replicates]


class LikelihoodKind(str, Enum):
    PROPER = "proper"
    MISSPECIFIED = "misspecified"


@dataclass(frozen=True)
class MLEResult:
    """Maximum likelihood estimate with convergence diagnostics.

    ``theta_hat`` entries are +/-inf (direction known) or nan when the
    data is boundary — no finite maximizer exists and ``std_err`` is
    absent.  ``converged`` implies the moment-equation (or gradient)
    residual dropped below tolerance; boundary results never converge.
    """

    theta_hat: tuple[float, ...]
    std_err: Optional[tuple[float, ...]]
    log_lik: float
    converged: bool
    boundary: bool
    iterations: int


def _bernoulli_log_pq(eta: float) -> tuple[float, float]:
    """(log pi, log(1-pi)) for pi = logistic(eta), computed stably."""
    return -float(np.logaddexp(0.0, -eta)), -float(np.logaddexp(0.0, eta))


def proper_log_likelihood(
    spec: ModelSpec,
    theta: ParamVector,
    y_sub: Graph,
    population_n: int,
    enum_cap: Optional[int] = None,
) -> float:
    """Log total probability of all population graphs consistent with y_sub.

    Independent-dyad families marginalize dyad-wise, giving a binomial
    closed form in the population edge probability; other families sum
    the population model over all completions of the unobserved dyads.
    """
    if y_sub.n >= population_n:
        raise ValueError(
            f"subgraph size {y_sub.n} must be smaller than population size {population_n}"
        )
    if spec.definition.bernoulli:
        eta = natural_params(spec, theta, population_n).eta[0]
        log_p, log_q = _bernoulli_log_pq(eta)
        m = edge_count(y_sub)
        d = dyad_count(y_sub.n)
        return m * log_p + (d - m) * log_q
    return completion_log_likelihood(spec, theta, y_sub, population_n, enum_cap)


def completion_log_likelihood(
    spec: ModelSpec,
    theta: ParamVector,
    y_sub: Graph,
    population_n: int,
    enum_cap: Optional[int] = None,
) -> float:
    """Proper log likelihood by explicit enumeration of completions.

    Valid for every family; ``proper_log_likelihood`` routes here for
    families without closed-form marginals.  All shipped families are
    exchangeable, so the observed nodes may be embedded as the prefix of
    the population node set: completions are then exactly the graph
    indices congruent to the observed index modulo 2^C(n',2).
    """
    if y_sub.n >= population_n:
        raise ValueError(
            f"subgraph size {y_sub.n} must be smaller than population size {population_n}"
        )
    resolve_enum_cap(population_n, enum_cap)
    stats = enumerated_stats(spec, population_n, enum_cap)
    eta = natural_params(spec, theta, population_n).as_array()
    sub_d = dyad_count(y_sub.n)
    free_d = dyad_count(population_n) - sub_d
    idx = y_sub.dyads + (np.arange(1 << free_d, dtype=np.int64) << sub_d)
    kernel = stats[idx].astype(np.float64, copy=False) @ eta
    log_z = log_normalizer(spec, theta, population_n, enum_cap)
    return float(logsumexp(kernel) - log_z)


def misspecified_log_likelihood(
    spec: ModelSpec,
    theta: ParamVector,
    y_sub: Graph,
    enum_cap: Optional[int] = None,
) -> float:
    """Log probability of y_sub under the subgraph-sized model."""
    n = y_sub.n
    eta = natural_params(spec, theta, n).as_array()
    s = sufficient_stats(spec, y_sub).as_array()
    return float(eta @ s) - log_normalizer(spec, theta, n, enum_cap)


def log_likelihood(
    spec: ModelSpec,
    theta: ParamVector,
    data: ObservedData,
    kind: LikelihoodKind = LikelihoodKind.PROPER,
    enum_cap: Optional[int] = None,
) -> float:
    """Log likelihood of the observed data under the selected kind."""
    kind = LikelihoodKind(kind)
    if isinstance(data, InducedSubgraph):
        if kind is LikelihoodKind.PROPER:
            return proper_log_likelihood(
                spec, theta, data.subgraph, data.population_n, enum_cap
            )
        return misspecified_log_likelihood(spec, theta, data.subgraph, enum_cap)
    if kind is not LikelihoodKind.PROPER:
        raise ValueError("misspecified likelihood applies only to induced-subgraph data")
    if isinstance(data, FullGraph):
        g = data.graph
        eta = natural_params(spec, theta, g.n).as_array()
        s = sufficient_stats(spec, g).as_array()
        return float(eta @ s) - log_normalizer(spec, theta, g.n, enum_cap)
    if isinstance(data, Replicates):
        n = data.n
        eta = natural_params(spec, theta, n).as_array()
        total = sum(float(eta @ sufficient_stats(spec, g).as_array()) for g in data.graphs)
        return total - len(data.graphs) * log_normalizer(spec, theta, n, enum_cap)
    raise TypeError(f"unsupported observed-data type {type(data).__name__}")


def fisher_information(
    spec: ModelSpec, theta: ParamVector, n: int, enum_cap: Optional[int] = None
) -> np.ndarray:
    """Fisher information = covariance of the sufficient statistics."""
    return stat_covariance(spec, theta, n, enum_cap)


@lru_cache(maxsize=32)
def _attainable_hull(family_name: str, n: int) -> tuple:
    """Interior-test data for the attainable statistic set of a family at n.

    Returns ("interval", lo, hi) for one-dimensional statistics and
    ("hull", equations) otherwise; ("none",) marks a degenerate point set
    with empty interior (every observation is then boundary).  Callers
    validate the enumeration cap before reaching this helper.
    """
    from .exact import _enumerated_stats_cached

    stats = _enumerated_stats_cached(family_name, n)
    points = np.unique(stats.astype(np.float64, copy=False), axis=0)
    if points.shape[1] == 1:
        return ("interval", float(points.min()), float(points.max()))
    try:
        hull = ConvexHull(points)
    except QhullError:
        return ("none",)
    equations = hull.equations.copy()
    equations.flags.writeable = False
    return ("hull", equations)


def _stats_interior(
    spec: ModelSpec, n: int, s: np.ndarray, enum_cap: Optional[int] = None
) -> bool:
    """True iff s lies strictly inside the hull of attainable statistics."""
    resolve_enum_cap(n, enum_cap)
    data = _attainable_hull(spec.family, n)
    if data[0] == "interval":
        _, lo, hi = data
        return lo < float(s[0]) < hi
    if data[0] == "none":
        return False
    _, equations = data
    slack = equations[:, :-1] @ s + equations[:, -1]
    return bool(np.max(slack) < -_HULL_INTERIOR_TOL)


def _moments(
    spec: ModelSpec, theta: ParamVector, n: int, enum_cap: Optional[int]
) -> tuple[float, np.ndarray, np.ndarray]:
    """(log normalizer, mean, covariance) of the statistics at (theta, n)."""
    stats = enumerated_stats(spec, n, enum_cap).astype(np.float64, copy=False)
    eta = natural_params(spec, theta, n).as_array()
    kernel = stats @ eta
    log_z = float(logsumexp(kernel))
    w = np.exp(kernel - log_z)
    mu = w @ stats
    cov = stats.T @ (stats * w[:, None]) - np.outer(mu, mu)
    return log_z, mu, cov


def _newton_moment_solve(
    spec: ModelSpec,
    s_target: np.ndarray,
    n: int,
    enum_cap: Optional[int],
) -> tuple[np.ndarray, bool, int]:
    """Damped Newton iteration for E_theta[s] = s_target at size n.

    Starts at theta = 0; each step is damped by halving until the
    log likelihood does not decrease.  Convergence requires the moment
    residual to drop below NEWTON_TOLERANCE in the max norm.
    """
    dim = len(s_target)
    theta = np.zeros(dim)

    def objective(t: np.ndarray) -> float:
        pv = ParamVector(theta=tuple(t))
        eta = natural_params(spec, pv, n).as_array()
        return float(eta @ s_target) - log_normalizer(spec, pv, n, enum_cap)

    current = objective(theta)
    for iteration in range(1, NEWTON_MAX_ITERATIONS + 1):
        _, mu, cov = _moments(spec, ParamVector(theta=tuple(theta)), n, enum_cap)
        resid = s_target - mu
        if float(np.max(np.abs(resid))) <= NEWTON_TOLERANCE:
            return theta, True, iteration - 1
        try:
            step = np.linalg.solve(cov, resid)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(cov, resid, rcond=None)[0]
        scale = 1.0
        for _ in range(60):
            candidate = theta + scale * step
            value = objective(candidate)
            if value >= current - 1e-15:
                theta = candidate
                current = value
                break
            scale *= 0.5
        else:
            return theta, False, iteration
    return theta, False, NEWTON_MAX_ITERATIONS


def _completion_tables(
    spec: ModelSpec,
    y_sub: Graph,
    population_n: int,
    enum_cap: Optional[int],
) -> tuple[np.ndarray, np.ndarray]:
    """Statistic rows of the completion set and of all population graphs."""
    stats = enumerated_stats(spec, population_n, enum_cap).astype(np.float64, copy=False)
    sub_d = dyad_count(y_sub.n)
    free_d = dyad_count(population_n) - sub_d
    idx = y_sub.dyads + (np.arange(1 << free_d, dtype=np.int64) << sub_d)
    return stats[idx], stats


def _log_ratio_parts(
    comp: np.ndarray, full: np.ndarray, eta: np.ndarray
) -> tuple[float, np.ndarray, np.ndarray]:
    """(value, gradient, Hessian) of eta -> lse(comp @ eta) − lse(full @ eta)."""

    def side(table: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
        kernel = table @ eta
        lse = float(logsumexp(kernel))
        w = np.exp(kernel - lse)
        mu = w @ table
        cov = table.T @ (table * w[:, None]) - np.outer(mu, mu)
        return lse, mu, cov

    lse_c, mu_c, cov_c = side(comp)
    lse_f, mu_f, cov_f = side(full)
    return lse_c - lse_f, mu_c - mu_f, cov_c - cov_f


def _recession_sup(comp: np.ndarray, full: np.ndarray) -> float:
    """Best limit of the log probability ratio along coordinate rays.

    As eta_j -> ±inf the ratio lse(comp) − lse(full) tends to −inf unless
    the completion rows attain the full table's extreme of statistic j,
    in which case it tends to the same ratio objective restricted to the
    extreme face with coordinate j removed.  The supremum of each limit
    family is again interior-or-recession, handled recursively; −inf is
    returned when no face is attainable from the completion set.
    """
    dim = full.shape[1]
    best = -math.inf
    for j in range(dim):
        for extreme in (np.max, np.min):
            target = float(extreme(full[:, j]))
            if comp.shape[0] == 0 or float(extreme(comp[:, j])) != target:
                continue
            comp_face = np.delete(comp[comp[:, j] == target], j, axis=1)
            full_face = np.delete(full[full[:, j] == target], j, axis=1)
            if dim == 1:
                cand = math.log(comp_face.shape[0]) - math.log(full_face.shape[0])
            else:
                _, value, _, _, _ = _ascend_log_ratio(comp_face, full_face)
                cand = max(value, _recession_sup(comp_face, full_face))
            best = max(best, cand)
    return best


def _ascend_log_ratio(
    comp: np.ndarray, full: np.ndarray
) -> tuple[np.ndarray, float, bool, bool, int]:
    """Damped ascent of eta -> lse(comp @ eta) − lse(full @ eta) from 0.

    Returns (eta, value, converged, boundary, iterations).  The objective
    is a log probability of the completion event, not an exponential-
    family log likelihood, so no exact pre-iteration boundary test
    exists; a supremum at infinity is detected by three signs instead.
    Saturation: the probability of a strict subset of graphs stays below
    1 at every finite eta, so a value within rounding distance of zero
    certifies divergence (the gradient underflows on such a plateau, so
    this is tested before stationarity).  Recession dominance: a
    stationary point is accepted only if it beats every attainable
    coordinate-face limit of the objective, else the apparent stall is a
    ridge running to infinity.  Radius: iterates whose norm exceeds a
    fixed bound are declared divergent.  Newton steps are used while the
    curvature is usable, with gradient ascent and step halving as
    fallback.
    """
    dim = full.shape[1]
    eta = np.zeros(dim)
    value, grad, hess = _log_ratio_parts(comp, full, eta)
    for iteration in range(1, NEWTON_MAX_ITERATIONS + 1):
        if value >= -_SATURATION_TOL:
            return eta, value, False, True, iteration - 1
        if float(np.max(np.abs(grad))) <= NEWTON_TOLERANCE:
            if _recession_sup(comp, full) >= value - _RECESSION_VALUE_TOL:
                return eta, value, False, True, iteration - 1
            return eta, value, True, False, iteration - 1
        direction: Optional[np.ndarray]
        try:
            direction = np.linalg.solve(-hess, grad)
        except np.linalg.LinAlgError:
            direction = None
        if direction is None or float(grad @ direction) <= 0.0:
            direction = grad
        scale = 1.0
        moved = False
        for _ in range(60):
            candidate = eta + scale * direction
            cand_value, cand_grad, cand_hess = _log_ratio_parts(comp, full, candidate)
            if cand_value >= value - 1e-15:
                eta, value, grad, hess = candidate, cand_value, cand_grad, cand_hess
                moved = True
                break
            scale *= 0.5
        if not moved:
            return eta, value, False, False, iteration
        if float(np.max(np.abs(eta))) > _DIVERGENCE_NORM:
            return eta, value, False, True, iteration
    return eta, value, False, False, NEWTON_MAX_ITERATIONS


def _proper_mle_enumerated(
    spec: ModelSpec,
    y_sub: Graph,
    population_n: int,
    enum_cap: Optional[int],
) -> tuple[np.ndarray, bool, bool, int]:
    """Maximize the completion log likelihood over theta."""
    resolve_enum_cap(population_n, enum_cap)
    comp, full = _completion_tables(spec, y_sub, population_n, enum_cap)
    eta, _, converged, boundary, iterations = _ascend_log_ratio(comp, full)
    zero = ParamVector(theta=(0.0,) * spec.stat_dim)
    shift = natural_params(spec, zero, population_n).as_array()
    return eta - shift, converged, boundary, iterations


def finite_difference_hessian(fn, theta: np.ndarray, step: float = _HESSIAN_STEP) -> np.ndarray:
    """Central finite-difference Hessian of a scalar function."""
    dim = len(theta)
    hess = np.empty((dim, dim))
    for i in range(dim):
        for j in range(i, dim):
            ei = np.zeros(dim)
            ej = np.zeros(dim)
            ei[i] = step
            ej[j] = step
            if i == j:
                val = (fn(theta + ei) - 2.0 * fn(theta) + fn(theta - ei)) / step**2
            else:
                val = (
                    fn(theta + ei + ej)
                    - fn(theta + ei - ej)
                    - fn(theta - ei + ej)
                    + fn(theta - ei - ej)
                ) / (4.0 * step**2)
            hess[i, j] = hess[j, i] = val
    return hess


def _std_errors_from_information(information: np.ndarray) -> Optional[tuple[float, ...]]:
    try:
        inverse = np.linalg.inv(information)
    except np.linalg.LinAlgError:
        return None
    diag = np.diag(inverse)
    if np.any(diag <= 0.0) or not np.all(np.isfinite(diag)):
        return None
    return tuple(float(v) for v in np.sqrt(diag))


def _bernoulli_closed_form(
    spec: ModelSpec,
    data: ObservedData,
    kind: LikelihoodKind,
    enum_cap: Optional[int],
) -> MLEResult:
    if isinstance(data, FullGraph):
        m, d = edge_count(data.graph), dyad_count(data.graph.n)
        shift = math.log(data.graph.n) if spec.offset_edges else 0.0
    elif isinstance(data, Replicates):
        m = sum(edge_count(g) for g in data.graphs)
        d = len(data.graphs) * dyad_count(data.n)
        shift = math.log(data.n) if spec.offset_edges else 0.0
    else:
        m, d = edge_count(data.subgraph), dyad_count(data.subgraph.n)
        if spec.offset_edges:
            size = (
                data.population_n
                if kind is LikelihoodKind.PROPER
                else data.subgraph.n
            )
            shift = math.log(size)
        else:
            shift = 0.0
    if m == 0 or m == d:
        sign = math.inf if m == d else -math.inf
        return MLEResult(
            theta_hat=(sign,),
            std_err=None,
            log_lik=math.nan,
            converged=False,
            boundary=True,
            iterations=0,
        )
    eta_hat = math.log(m) - math.log(d - m)
    theta_hat = ParamVector(theta=(eta_hat + shift,))
    pi_hat = m / d
    information = np.array([[d * pi_hat * (1.0 - pi_hat)]])
    return MLEResult(
        theta_hat=theta_hat.theta,
        std_err=_std_errors_from_information(information),
        log_lik=log_likelihood(spec, theta_hat, data, kind, enum_cap),
        converged=True,
        boundary=False,
        iterations=0,
    )


def _boundary_result(dim: int) -> MLEResult:
    return MLEResult(
        theta_hat=(math.nan,) * dim,
        std_err=None,
        log_lik=math.nan,
        converged=False,
        boundary=True,
        iterations=0,
    )


def _enumerated_mle(
    spec: ModelSpec,
    data: ObservedData,
    kind: LikelihoodKind,
    enum_cap: Optional[int],
) -> MLEResult:
    dim = spec.stat_dim
    if isinstance(data, InducedSubgraph) and kind is LikelihoodKind.PROPER:
        theta, converged, boundary, iterations = _proper_mle_enumerated(
            spec, data.subgraph, data.population_n, enum_cap
        )
        if boundary:
            return _boundary_result(dim)
        pv = ParamVector(theta=tuple(theta))
        value = proper_log_likelihood(
            spec, pv, data.subgraph, data.population_n, enum_cap
        )
        std_err = None
        if converged:

            def objective(t: np.ndarray) -> float:
                return proper_log_likelihood(
                    spec,
                    ParamVector(theta=tuple(t)),
                    data.subgraph,
                    data.population_n,
                    enum_cap,
                )

            observed_info = -finite_difference_hessian(objective, theta)
            std_err = _std_errors_from_information(observed_info)
        return MLEResult(
            theta_hat=tuple(float(v) for v in theta),
            std_err=std_err,
            log_lik=value,
            converged=converged,
            boundary=False,
            iterations=iterations,
        )

    if isinstance(data, FullGraph):
        s_target = sufficient_stats(spec, data.graph).as_array()
        size, weight = data.graph.n, 1
    elif isinstance(data, Replicates):
        stacked = np.stack(
            [sufficient_stats(spec, g).as_array() for g in data.graphs]
        )
        s_target = stacked.mean(axis=0)
        size, weight = data.n, len(data.graphs)
    else:
        s_target = sufficient_stats(spec, data.subgraph).as_array()
        size, weight = data.subgraph.n, 1

    if not _stats_interior(spec, size, s_target, enum_cap):
        return _boundary_result(dim)
    theta, converged, iterations = _newton_moment_solve(spec, s_target, size, enum_cap)
    pv = ParamVector(theta=tuple(theta))
    value = log_likelihood(spec, pv, data, kind, enum_cap)
    information = weight * fisher_information(spec, pv, size, enum_cap)
    return MLEResult(
        theta_hat=tuple(float(v) for v in theta),
        std_err=_std_errors_from_information(information) if converged else None,
        log_lik=value,
        converged=converged,
        boundary=False,
        iterations=iterations,
    )


def mle(
    spec: ModelSpec,
    data: ObservedData,
    kind: LikelihoodKind = LikelihoodKind.PROPER,
    enum_cap: Optional[int] = None,
) -> MLEResult:
    """Maximize the selected log likelihood for the observed data.

    Independent-dyad families use the logit closed form; other families
    solve the moment equation by damped Newton iteration (boundary data
    detected against the attainable-statistics hull before iterating) or,
    for the proper subgraph likelihood, ascend the enumerated objective.
    """
    kind = LikelihoodKind(kind)
    if not isinstance(data, InducedSubgraph) and kind is LikelihoodKind.MISSPECIFIED:
        raise ValueError("misspecified likelihood applies only to induced-subgraph data")
    if spec.definition.bernoulli:
        return _bernoulli_closed_form(spec, data, kind, enum_cap)
    return _enumerated_mle(spec, data, kind, enum_cap)


def mle_csv_header(spec: ModelSpec) -> list[str]:
    dim = spec.stat_dim
    return (
        ["family", "kind"]
        + [f"theta_hat_{k + 1}" for k in range(dim)]
        + [f"std_err_{k + 1}" for k in range(dim)]
        + ["log_lik", "converged", "boundary", "iterations"]
    )


def mle_csv_row(spec: ModelSpec, kind: LikelihoodKind, result: MLEResult) -> list[str]:
    dim = spec.stat_dim
    std = (
        [repr(v) for v in result.std_err]
        if result.std_err is not None
        else [""] * dim
    )
    return (
        [spec.family, LikelihoodKind(kind).value]
        + [repr(v) for v in result.theta_hat]
        + std
        + [
            repr(result.log_lik),
            "true" if result.converged else "false",
            "true" if result.boundary else "false",
            str(result.iterations),
        ]
    )


def format_mle_csv(
    spec: ModelSpec,
    entries: Sequence[tuple[LikelihoodKind, MLEResult]],
) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(mle_csv_header(spec))
    for kind, result in entries:
        writer.writerow(mle_csv_row(spec, kind, result))
    return buf.getvalue()
