"""Exponential-time ground truth for small instances.

Backtracking searches for a maximum-length rainbow path and for a rainbow
Hamilton cycle, with a node budget. When the budget runs out the result says
so explicitly rather than ever returning a wrong answer. Pruning is limited
to the running colour set on purpose: global colour-availability bounds are
deliberately not implemented so the searches stay exact.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError
from .graph_core import ColouredGraph, VertexCycle, VertexPath, edge_key

PATH_MAX_N = 14
HAMILTON_MAX_N = 12


@dataclass(frozen=True)
class OracleBudget:
    max_n: int = HAMILTON_MAX_N
    node_limit: int = 5_000_000


@dataclass(frozen=True)
class PathSearchResult:
    """Best rainbow path found; exact unless ``exhausted`` is set."""

    path: VertexPath
    exhausted: bool
    nodes: int


@dataclass(frozen=True)
class HamiltonSearchResult:
    """Rainbow Hamilton cycle or None; inconclusive when ``exhausted``."""

    cycle: VertexCycle | None
    exhausted: bool
    nodes: int


def brute_longest_rainbow_path(g: ColouredGraph, budget: OracleBudget | None = None) -> PathSearchResult:
    budget = budget or OracleBudget(max_n=PATH_MAX_N)
    if budget.max_n > PATH_MAX_N:
        raise ConfigError(f"path oracle budget max_n capped at {PATH_MAX_N}")
    n = g.n
    if n > budget.max_n:
        raise ConfigError(f"n={n} exceeds oracle budget max_n={budget.max_n}")

    adj = [sorted(g.neighbours(v)) for v in range(n)]
    cmap = g.colour
    best_seq: list[int] = [0] if n else []
    nodes = 0
    exhausted = False
    seq: list[int] = []
    on_path = [False] * n
    colours: set[int] = set()

    def extend() -> bool:
        # Returns True when the search can stop (full path or budget out).
        nonlocal nodes, exhausted, best_seq
        if len(seq) > len(best_seq):
            best_seq = list(seq)
            if len(best_seq) == n:
                return True
        tail = seq[-1]
        for w in adj[tail]:
            if on_path[w]:
                continue
            c = cmap[(tail, w) if tail < w else (w, tail)]
            if c in colours:
                continue
            nodes += 1
            if nodes > budget.node_limit:
                exhausted = True
                return True
            on_path[w] = True
            seq.append(w)
            colours.add(c)
            stop = extend()
            colours.discard(c)
            seq.pop()
            on_path[w] = False
            if stop:
                return True
        return False

    for start in range(n):
        seq = [start]
        on_path[start] = True
        colours = set()
        stop = extend()
        on_path[start] = False
        if stop:
            break

    path = VertexPath.from_seq(g, best_seq)
    return PathSearchResult(path, exhausted, nodes)


def brute_rainbow_hamilton(g: ColouredGraph, budget: OracleBudget | None = None) -> HamiltonSearchResult:
    budget = budget or OracleBudget()
    if budget.max_n > HAMILTON_MAX_N:
        raise ConfigError(f"hamilton oracle budget max_n capped at {HAMILTON_MAX_N}")
    n = g.n
    if n > budget.max_n:
        raise ConfigError(f"n={n} exceeds oracle budget max_n={budget.max_n}")
    if n < 3:
        return HamiltonSearchResult(None, False, 0)

    adj = [sorted(g.neighbours(v)) for v in range(n)]
    cmap = g.colour
    nodes = 0
    exhausted = False
    found: list[int] | None = None
    seq = [0]  # every Hamilton cycle visits 0; anchoring kills rotations
    on_path = [False] * n
    on_path[0] = True
    colours: set[int] = set()

    def extend() -> bool:
        nonlocal nodes, exhausted, found
        if len(seq) == n:
            last = seq[-1]
            # Direction fix: accept only the orientation with seq[1] < seq[-1].
            if last < seq[1] or 0 not in g.neighbours(last):
                return False
            c = cmap[(0, last) if last > 0 else (last, 0)]
            if c in colours:
                return False
            found = list(seq)
            return True
        tail = seq[-1]
        for w in adj[tail]:
            if on_path[w]:
                continue
            c = cmap[(tail, w) if tail < w else (w, tail)]
            if c in colours:
                continue
            nodes += 1
            if nodes > budget.node_limit:
                exhausted = True
                return True
            on_path[w] = True
            seq.append(w)
            colours.add(c)
            stop = extend()
            colours.discard(c)
            seq.pop()
            on_path[w] = False
            if stop:
                return True
        return False

    extend()
    if found is None:
        return HamiltonSearchResult(None, exhausted, nodes)
    cycle = VertexCycle.from_seq(g, found)
    return HamiltonSearchResult(cycle, False, nodes)


def has_rainbow_hamilton(g: ColouredGraph, budget: OracleBudget | None = None) -> bool:
    """Convenience wrapper; ConfigError if the budget was exhausted."""
    res = brute_rainbow_hamilton(g, budget)
    if res.exhausted:
        raise ConfigError("oracle budget exhausted; result inconclusive")
    return res.cycle is not None
