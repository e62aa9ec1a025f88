"""Model families: sufficient statistics and natural-parameter maps.

A family fixes a sufficient-statistic vector s(g) and a natural-parameter
map eta(theta, n).  The distribution on graphs of size n is then
P(g) proportional to exp(eta(theta, n) . s(g)).  Three families ship:

* ``BernoulliInvariant`` — s = [edges], eta = theta (size-invariant);
  dyads are i.i.d. Bernoulli(logistic(theta)).
* ``BernoulliOffset`` — s = [edges], eta = theta - log n; the edge
  probability shrinks with n so the expected degree approaches
  exp(theta) for large n.
* ``EdgeTriangle`` — s = [edges, triangles], eta = theta
  (size-invariant); dyads are dependent whenever theta_2 != 0.

New families can be added through :func:`register_family`.  Natural-
parameter maps are restricted to per-component shifts of theta (the
offset applies to the edge term), which keeps theta-gradients equal to
eta-gradients throughout the inference code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.special import expit

from .graph import Graph, edge_count, triangle_count

__all__ = [
    "Family",
    "ModelSpec",
    "ParamVector",
    "NaturalParams",
    "StatsVector",
    "register_family",
    "unregister_family",
    "registered_families",
    "resolve_family_name",
    "model_spec",
    "natural_params",
    "edge_prob",
    "sufficient_stats",
    "log_unnormalized",
    "BERNOULLI_INVARIANT",
    "BERNOULLI_OFFSET",
    "EDGE_TRIANGLE",
]


@dataclass(frozen=True)
class StatsVector:
    """Ordered vector of sufficient statistics."""

    values: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)


@dataclass(frozen=True)
class ParamVector:
    """Parameter vector theta; the parameter space is all of R^dim."""

    theta: tuple[float, ...]

    def __post_init__(self) -> None:
        theta = tuple(float(v) for v in self.theta)
        object.__setattr__(self, "theta", theta)
        if not theta:
            raise ValueError("parameter vector must be non-empty")
        if not all(math.isfinite(v) for v in theta):
            raise ValueError(f"parameter vector must be finite, got {theta}")

    def __len__(self) -> int:
        return len(self.theta)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.theta, dtype=np.float64)


@dataclass(frozen=True)
class NaturalParams:
    """Natural parameters eta evaluated at a specific graph size n."""

    eta: tuple[float, ...]
    n: int

    def __post_init__(self) -> None:
        eta = tuple(float(v) for v in self.eta)
        object.__setattr__(self, "eta", eta)
        if not all(math.isfinite(v) for v in eta):
            raise ValueError(f"natural parameters must be finite, got {eta}")

    def as_array(self) -> np.ndarray:
        return np.asarray(self.eta, dtype=np.float64)


@dataclass(frozen=True)
class Family:
    """Pluggable family definition.

    ``stats`` maps a graph to its statistic tuple.  ``bulk_stats``, when
    provided, returns the full (2^C(n,2), stat_dim) statistic table for
    all graphs of size n in graph-index order; families without it fall
    back to a per-graph loop during enumeration.  ``bernoulli`` marks
    single-edge-statistic families with independent dyads, which unlocks
    closed-form normalizers, marginals, and estimators at any size.
    """

    name: str
    stat_dim: int
    offset_edges: bool
    stats: Callable[[Graph], tuple[float, ...]] = field(compare=False)
    bulk_stats: Optional[Callable[[int], np.ndarray]] = field(
        default=None, compare=False
    )
    bernoulli: bool = False

    def __post_init__(self) -> None:
        if self.stat_dim < 1:
            raise ValueError("stat_dim must be >= 1")
        if self.bernoulli and self.stat_dim != 1:
            raise ValueError("bernoulli families must have a single edge statistic")


_REGISTRY: dict[str, Family] = {}

BERNOULLI_INVARIANT = "BernoulliInvariant"
BERNOULLI_OFFSET = "BernoulliOffset"
EDGE_TRIANGLE = "EdgeTriangle"


def register_family(family: Family) -> None:
    """Add a family to the registry; names must be unique."""
    if family.name in _REGISTRY:
        raise ValueError(f"family {family.name!r} is already registered")
    _REGISTRY[family.name] = family


def unregister_family(name: str) -> None:
    if name in (BERNOULLI_INVARIANT, BERNOULLI_OFFSET, EDGE_TRIANGLE):
        raise ValueError(f"built-in family {name!r} cannot be unregistered")
    if name not in _REGISTRY:
        raise ValueError(f"family {name!r} is not registered")
    del _REGISTRY[name]


def registered_families() -> tuple[str, ...]:
    return tuple(_REGISTRY)


def _kebab(name: str) -> str:
    out = []
    for idx, ch in enumerate(name):
        if ch.isupper() and idx > 0:
            out.append("-")
        out.append(ch.lower())
    return "".join(out)


def resolve_family_name(name: str) -> str:
    """Accept either the canonical CamelCase name or its kebab-case form."""
    if name in _REGISTRY:
        return name
    for canonical in _REGISTRY:
        if _kebab(canonical) == name:
            return canonical
    known = sorted(_REGISTRY) + sorted(_kebab(c) for c in _REGISTRY)
    raise ValueError(f"unknown family {name!r}; known families: {', '.join(known)}")


@dataclass(frozen=True)
class ModelSpec:
    """A registered family together with its declared shape."""

    family: str
    stat_dim: int
    offset_edges: bool

    def __post_init__(self) -> None:
        fam = _REGISTRY.get(self.family)
        if fam is None:
            raise ValueError(f"unknown family {self.family!r}")
        if self.stat_dim != fam.stat_dim:
            raise ValueError(
                f"stat_dim {self.stat_dim} does not match family "
                f"{self.family!r} (expected {fam.stat_dim})"
            )
        if self.offset_edges != fam.offset_edges:
            raise ValueError(
                f"offset_edges={self.offset_edges} does not match family "
                f"{self.family!r} (expected {fam.offset_edges})"
            )

    @property
    def definition(self) -> Family:
        return _REGISTRY[self.family]


def model_spec(name: str) -> ModelSpec:
    """Build the ModelSpec for a registered family by (possibly kebab) name."""
    canonical = resolve_family_name(name)
    fam = _REGISTRY[canonical]
    return ModelSpec(family=canonical, stat_dim=fam.stat_dim, offset_edges=fam.offset_edges)


def natural_params(spec: ModelSpec, theta: ParamVector, n: int) -> NaturalParams:
    """Evaluate eta(theta, n); the offset subtracts log n from the edge term."""
    if n < 1:
        raise ValueError("node count must be >= 1")
    if len(theta) != spec.stat_dim:
        raise ValueError(
            f"parameter vector has length {len(theta)}, expected {spec.stat_dim}"
        )
    eta = list(theta.theta)
    if spec.offset_edges:
        eta[0] -= math.log(n)
    return NaturalParams(eta=tuple(eta), n=n)


def edge_prob(spec: ModelSpec, theta: ParamVector, n: int) -> float:
    """Dyad probability logistic(eta_edge) for independent-dyad families."""
    if not spec.definition.bernoulli:
        raise ValueError(f"edge_prob is unsupported for family {spec.family!r}")
    eta = natural_params(spec, theta, n).eta[0]
    return float(expit(eta))


def sufficient_stats(spec: ModelSpec, g: Graph) -> StatsVector:
    return StatsVector(values=tuple(spec.definition.stats(g)))


def log_unnormalized(spec: ModelSpec, theta: ParamVector, n: int, g: Graph) -> float:
    """Exponential-family kernel eta(theta, n) . s(g)."""
    if g.n != n:
        raise ValueError(f"graph has {g.n} nodes, expected {n}")
    eta = natural_params(spec, theta, n).as_array()
    s = sufficient_stats(spec, g).as_array()
    return float(eta @ s)


_ENUM_CHUNK = 1 << 20


def _bulk_edge_counts(n: int) -> np.ndarray:
    from .graph import dyad_count

    total = 1 << dyad_count(n)
    out = np.empty((total, 1), dtype=np.uint8)
    for lo in range(0, total, _ENUM_CHUNK):
        hi = min(lo + _ENUM_CHUNK, total)
        idx = np.arange(lo, hi, dtype=np.uint64)
        out[lo:hi, 0] = np.bitwise_count(idx).astype(np.uint8)
    return out


def _bulk_edge_triangle_counts(n: int) -> np.ndarray:
    from .graph import dyad_count, dyad_index

    total = 1 << dyad_count(n)
    masks = []
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                masks.append(
                    (1 << dyad_index(i, j))
                    | (1 << dyad_index(i, k))
                    | (1 << dyad_index(j, k))
                )
    mask_arr = np.asarray(masks, dtype=np.uint64)
    out = np.empty((total, 2), dtype=np.uint8)
    for lo in range(0, total, _ENUM_CHUNK):
        hi = min(lo + _ENUM_CHUNK, total)
        idx = np.arange(lo, hi, dtype=np.uint64)
        out[lo:hi, 0] = np.bitwise_count(idx).astype(np.uint8)
        tri = np.zeros(hi - lo, dtype=np.uint8)
        for mask in mask_arr:
            tri += (idx & mask) == mask
        out[lo:hi, 1] = tri
    return out


register_family(
    Family(
        name=BERNOULLI_INVARIANT,
        stat_dim=1,
        offset_edges=False,
        stats=lambda g: (float(edge_count(g)),),
        bulk_stats=_bulk_edge_counts,
        bernoulli=True,
    )
)

register_family(
    Family(
        name=BERNOULLI_OFFSET,
        stat_dim=1,
        offset_edges=True,
        stats=lambda g: (float(edge_count(g)),),
        bulk_stats=_bulk_edge_counts,
        bernoulli=True,
    )
)

register_family(
    Family(
        name=EDGE_TRIANGLE,
        stat_dim=2,
        offset_edges=False,
        stats=lambda g: (float(edge_count(g)), float(triangle_count(g))),
        bulk_stats=_bulk_edge_triangle_counts,
        bernoulli=False,
    )
)
