"""Samplers for the perturbed model.

Dense seed graphs with minimum degree at least ``ceil(d*n)``, binomial random
graphs, the two-round density split, one-pass uniform colouring of the union,
and uniform vertex relabeling. All randomness flows through numpy Generators;
trial i of an experiment uses the stream derived from ``(master_seed, i)`` so
parallel execution is order-independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import ConfigError
from .graph_core import ColouredGraph, Edge, Graph, edge_key

SEED_FAMILIES = ("complete", "bipartite", "two_cliques", "supercritical_gnq")

#: Resampling cap for the supercritical_gnq family, to bound runtime on
#: configs where the min-degree target is rarely met.
GNQ_MAX_ATTEMPTS = 100


def trial_rng(master_seed: int, trial_index: int) -> np.random.Generator:
    """Deterministic per-trial stream; independent of execution order."""
    return np.random.default_rng(np.random.SeedSequence(entropy=master_seed, spawn_key=(trial_index,)))


@dataclass(frozen=True)
class PerturbationConfig:
    """Parameters of one perturbed-model experiment.

    ``r`` is derived as ``round((1 + alpha) * n)`` and ``p2`` solves the
    two-round identity exactly. ``epsilon`` is the fraction of vertices the
    first-round rainbow path may miss; the default is the analysis constant
    ``d**3 / 220``, which is far stricter than small instances can meet, so
    experiments usually override it.
    """

    n: int
    d: float
    family: str
    C: float
    K: float
    alpha: float
    epsilon: float | None = None
    master_seed: int = 0

    def __post_init__(self):
        if self.n < 4:
            raise ConfigError(f"n must be at least 4, got {self.n}")
        if not 0 < self.d < 1:
            raise ConfigError(f"d must lie in (0,1), got {self.d}")
        if math.ceil(self.d * self.n) > self.n - 1:
            raise ConfigError(f"minimum degree ceil(d*n)={math.ceil(self.d * self.n)} infeasible for n={self.n}")
        if self.family not in SEED_FAMILIES:
            raise ConfigError(f"unknown seed family {self.family!r}; choose from {', '.join(SEED_FAMILIES)}")
        check_seed_feasible(self.family, self.n, self.d)
        if not 0 < self.K < self.C:
            raise ConfigError(f"need 0 < K < C, got K={self.K}, C={self.C}")
        if self.C >= self.n:
            raise ConfigError(f"need C < n, got C={self.C}, n={self.n}")
        if self.alpha <= 0:
            raise ConfigError(f"alpha must be positive, got {self.alpha}")
        if self.r < self.n + 1:
            raise ConfigError(f"palette r={self.r} must exceed n={self.n}; increase alpha")
        if not 0 < self.effective_epsilon < 1:
            raise ConfigError(f"epsilon must lie in (0,1), got {self.effective_epsilon}")

    @property
    def r(self) -> int:
        return round((1 + self.alpha) * self.n)

    @property
    def effective_epsilon(self) -> float:
        return self.d**3 / 220 if self.epsilon is None else self.epsilon

    @property
    def p2(self) -> float:
        return two_round_split(self.C, self.K, self.n)

    @property
    def rdfs_threshold(self) -> int:
        """Minimum vertex count demanded of the first-round rainbow path."""
        return math.floor((1 - self.effective_epsilon) * self.n)


def two_round_split(C: float, K: float, n: int) -> float:
    """Second-round density p2 with (1 - C/n) = (1 - K/n)(1 - p2) exactly."""
    if not 0 < K < C:
        raise ConfigError(f"need 0 < K < C, got K={K}, C={C}")
    if C >= n:
        raise ConfigError(f"need C < n, got C={C}, n={n}")
    return (C - K) / (n - K)


def _decode_pair_index(n: int, idx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Inverse of e = u*(2n-u-1)/2 + (v-u-1) over pairs u < v.
    e = idx.astype(np.float64)
    u = np.floor(((2 * n - 1) - np.sqrt((2 * n - 1) ** 2 - 8 * e)) / 2).astype(np.int64)
    # Guard against float rounding at block boundaries.
    for _ in range(2):
        off = u * (2 * n - u - 1) // 2
        u = np.where(off > idx, u - 1, u)
        off = u * (2 * n - u - 1) // 2
        nxt = (u + 1) * (2 * n - u - 2) // 2
        u = np.where(idx >= nxt, u + 1, u)
    off = u * (2 * n - u - 1) // 2
    v = idx - off + u + 1
    return u, v


def sample_gnp(n: int, p: float, rng: np.random.Generator) -> Graph:
    """Binomial random graph: each of the C(n,2) pairs kept with probability p."""
    if not 0 <= p <= 1:
        raise ConfigError(f"edge probability must lie in [0,1], got {p}")
    total = n * (n - 1) // 2
    if total == 0 or p == 0:
        return Graph(n)
    if p == 1:
        return complete_graph(n)
    m = int(rng.binomial(total, p))
    idx = np.sort(rng.choice(total, size=m, replace=False))
    us, vs = _decode_pair_index(n, idx)
    return Graph(n, zip(us.tolist(), vs.tolist()))


def complete_graph(n: int) -> Graph:
    adj = [frozenset(range(n)) - {v} for v in range(n)]
    return Graph.from_adjacency(n, adj, n * (n - 1) // 2)


def check_seed_feasible(family: str, n: int, d: float) -> None:
    """Raise ConfigError when the family cannot meet min degree ceil(d*n)."""
    target = math.ceil(d * n)
    if target > n - 1:
        raise ConfigError(f"minimum degree {target} infeasible for n={n}")
    if family == "bipartite" and target > n - target:
        raise ConfigError(f"bipartite seed needs ceil(d*n) <= n - ceil(d*n); got sides {target}/{n - target}")
    if family == "two_cliques" and n // 2 - 1 < target:
        raise ConfigError(f"two_cliques seed has min degree {n // 2 - 1} < ceil(d*n) = {target}")


def make_seed(family: str, n: int, d: float, rng: np.random.Generator | None = None) -> Graph:
    """Dense seed graph with minimum degree at least ceil(d*n).

    Families: ``complete`` is K_n; ``bipartite`` is the complete bipartite
    graph with sides ceil(d*n) and n - ceil(d*n), non-Hamiltonian for d < 1/2
    and therefore the adversarial seed; ``two_cliques`` is two cliques sharing
    one vertex, the smaller on floor(n/2) vertices; ``supercritical_gnq``
    resamples G(n, d + 0.1) until the degree target is met (rng required).
    """
    if family not in SEED_FAMILIES:
        raise ConfigError(f"unknown seed family {family!r}")
    if not 0 < d < 1:
        raise ConfigError(f"d must lie in (0,1), got {d}")
    check_seed_feasible(family, n, d)
    target = math.ceil(d * n)

    if family == "complete":
        return complete_graph(n)

    if family == "bipartite":
        small = frozenset(range(target))
        big = frozenset(range(target, n))
        adj = [big if v in small else small for v in range(n)]
        return Graph.from_adjacency(n, adj, target * (n - target))

    if family == "two_cliques":
        # Cliques {0..n//2-1} and {n//2-1..n-1} share the pivot n//2 - 1.
        pivot = n // 2 - 1
        a = frozenset(range(pivot + 1))
        b = frozenset(range(pivot, n))
        adj = []
        for v in range(n):
            if v < pivot:
                adj.append(a - {v})
            elif v == pivot:
                adj.append((a | b) - {v})
            else:
                adj.append(b - {v})
        count = (len(a) * (len(a) - 1) + len(b) * (len(b) - 1)) // 2
        return Graph.from_adjacency(n, adj, count)

    if rng is None:
        raise ConfigError("supercritical_gnq requires an rng")
    q = min(d + 0.1, 1.0)
    for _ in range(GNQ_MAX_ATTEMPTS):
        g = sample_gnp(n, q, rng)
        if g.min_degree() >= target:
            return g
    raise ConfigError(
        f"supercritical_gnq failed to reach min degree {target} within {GNQ_MAX_ATTEMPTS} samples of G({n},{q})"
    )


def colour_union(
    h: Graph,
    r1: Graph,
    r2: Graph,
    r: int,
    rng: np.random.Generator,
) -> tuple[ColouredGraph, dict[Edge, tuple[str, ...]]]:
    """Colour the union H | R1 | R2 in one pass, uniformly from {1..r}.

    Each union edge receives exactly one colour; the returned tag map records
    which rounds contributed each edge (tags may overlap). Staged colour
    exposure is a proof device only: colouring everything upfront is
    distributionally identical because the algorithm reads colours on demand.
    """
    if not (h.n == r1.n == r2.n):
        raise ConfigError("all three graphs must share the vertex set")
    parts = (("H", h), ("R1", r1), ("R2", r2))
    tags: dict[Edge, list[str]] = {}
    for name, g in parts:
        for e in g.edges():
            tags.setdefault(e, []).append(name)
    edges = sorted(tags)
    colours = rng.integers(1, r + 1, size=len(edges))
    coloured = ColouredGraph(h.n, r, ((u, v, int(c)) for (u, v), c in zip(edges, colours)))
    return coloured, {e: tuple(t) for e, t in tags.items()}


def coloured_subgraph(coloured: ColouredGraph, structure: Graph) -> ColouredGraph:
    """Restriction of a coloured graph to the edges of ``structure``."""
    return ColouredGraph(
        coloured.n,
        coloured.r,
        ((u, v, coloured.colour[(u, v)]) for u, v in structure.edges()),
    )


def relabel(g: Graph, perm: Iterable[int]):
    """Rename vertices by an explicit permutation, carrying colours along."""
    perm = list(perm)
    if sorted(perm) != list(range(g.n)):
        raise ConfigError("not a permutation of the vertex set")
    if isinstance(g, ColouredGraph):
        return ColouredGraph(g.n, g.r, ((perm[u], perm[v], c) for (u, v), c in g.colour.items()))
    return Graph(g.n, (edge_key(perm[u], perm[v]) for u, v in g.edges()))


def relabel_random(g: Graph, rng: np.random.Generator):
    """Uniform random relabeling; distribution-preserving on G(n,p) inputs."""
    return relabel(g, rng.permutation(g.n).tolist())
