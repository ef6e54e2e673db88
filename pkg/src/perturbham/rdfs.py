"""Rainbow depth-first search with full trace recording.

The search keeps three vertex sets: S (exploration finished), T (not yet
visited, ordered by a permutation pi), and a stack U whose contents always
span a rainbow path. A stack extension is only allowed along an edge whose
colour is absent from the stack-path colour set A_U; the pi-smallest eligible
T-vertex is taken. One vertex moves per round, so a run over n vertices takes
exactly 2n rounds, and the balance point |S| = |T| is hit exactly once, at
round n.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import ContractError
from .graph_core import ColouredGraph, VertexPath, edge_key

PUSH = "PUSH"
POP = "POP"

Event = tuple[str, int]


@dataclass(frozen=True)
class BalancedSnapshot:
    """State (S, T, U) at the unique round where |S| = |T|; T in pi order."""

    s: frozenset[int]
    t: tuple[int, ...]
    u: tuple[int, ...]
    round_index: int


@dataclass(frozen=True)
class RdfsTrace:
    """Complete record of one run: per-round events plus key snapshots.

    ``best_u`` is the earliest maximum-size stack; ``tree_edge_count`` counts
    the distinct stack edges over the whole run (their union is a forest, so
    it never exceeds n - 1).
    """

    n: int
    pi: tuple[int, ...]
    events: tuple[Event, ...]
    best_u: tuple[int, ...]
    balanced: BalancedSnapshot
    tree_edge_count: int


@dataclass(frozen=True)
class TraceReport:
    violations: tuple[str, ...]
    rounds: int
    balanced_boundary_colours: int

    @property
    def ok(self) -> bool:
        return not self.violations


def _check_permutation(n: int, pi: Sequence[int]) -> tuple[int, ...]:
    pi = tuple(pi)
    if sorted(pi) != list(range(n)):
        raise ContractError("pi is not a permutation of the vertex set")
    return pi


def rdfs_run(g: ColouredGraph, pi: Sequence[int]) -> RdfsTrace:
    """Run rainbow DFS to completion and record the trace."""
    n = g.n
    pi = _check_permutation(n, pi)
    rank = [0] * n
    for i, v in enumerate(pi):
        rank[v] = i

    in_t = [True] * n
    in_s = [False] * n
    remaining_t = n
    cursor = 0  # scans pi for the first T vertex; T only shrinks
    stack: list[int] = []
    stack_edge_colours: list[int] = []  # colour of edge into stack[i+1]
    a_u: set[int] = set()
    events: list[Event] = []
    best: tuple[int, ...] = ()
    tree_edges = 0
    balanced: BalancedSnapshot | None = None
    adj = g._adj
    cmap = g.colour
    rounds = 0

    if n == 0:
        balanced = BalancedSnapshot(frozenset(), (), (), 0)

    while remaining_t or stack:
        rounds += 1
        if not stack:
            while not in_t[pi[cursor]]:
                cursor += 1
            v = pi[cursor]
            in_t[v] = False
            remaining_t -= 1
            stack.append(v)
            events.append((PUSH, v))
        else:
            top = stack[-1]
            best_w = -1
            best_rank = n
            for w in adj[top]:
                if in_t[w] and rank[w] < best_rank:
                    c = cmap[(top, w) if top < w else (w, top)]
                    if c not in a_u:
                        best_rank = rank[w]
                        best_w = w
            if best_w >= 0:
                c = cmap[(top, best_w) if top < best_w else (best_w, top)]
                in_t[best_w] = False
                remaining_t -= 1
                stack.append(best_w)
                stack_edge_colours.append(c)
                a_u.add(c)
                tree_edges += 1
                events.append((PUSH, best_w))
            else:
                v = stack.pop()
                if stack_edge_colours and len(stack_edge_colours) == len(stack):
                    a_u.discard(stack_edge_colours.pop())
                in_s[v] = True
                events.append((POP, v))
        if len(stack) > len(best):
            best = tuple(stack)
        if rounds == n:
            balanced = BalancedSnapshot(
                frozenset(v for v in range(n) if in_s[v]),
                tuple(v for v in pi if in_t[v]),
                tuple(stack),
                n,
            )

    assert balanced is not None
    return RdfsTrace(n, pi, tuple(events), best, balanced, tree_edges)


def longest_rainbow_path(g: ColouredGraph, pi: Sequence[int]) -> VertexPath:
    """Rainbow path spanned by the larger of the best and balanced stacks.

    The balanced-snapshot stack certifies the coverage-based length guarantee;
    the maximum stack can only be at least as long, so it is what gets
    returned (earliest maximum on ties).
    """
    trace = rdfs_run(g, pi)
    return path_from_trace(g, trace)


def path_from_trace(g: ColouredGraph, trace: RdfsTrace) -> VertexPath:
    seq = trace.best_u if len(trace.best_u) >= len(trace.balanced.u) else trace.balanced.u
    return VertexPath.from_seq(g, seq)


def check_trace(trace: RdfsTrace, g: ColouredGraph) -> TraceReport:
    """Replay a trace, validating every recorded property.

    Checks: one legal move per round with 2n rounds total (D1 and the
    partition invariant), the stack spans a rainbow path at every round (D3),
    the stack-edge union stays within the n - 1 forest bound, the stored
    snapshots match the replay, and the colour count on the boundary
    E(S, T) at the balanced snapshot stays below n.
    """
    n = g.n
    violations: list[str] = []
    state = {v: "T" for v in range(n)}
    stack: list[int] = []
    stack_edge_colours: list[int] = []
    a_u: set[int] = set()
    pushes: dict[int, int] = {}
    pops: dict[int, int] = {}
    tree_edges: set[tuple[int, int]] = set()
    best: tuple[int, ...] = ()
    balanced_colours = 0
    adj = g._adj
    cmap = g.colour

    if len(trace.events) != 2 * n:
        violations.append(f"D1: expected {2 * n} rounds, trace has {len(trace.events)}")

    for rnd, (kind, v) in enumerate(trace.events, start=1):
        if kind == PUSH:
            if state.get(v) != "T":
                violations.append(f"round {rnd}: D1/partition: PUSH {v} but vertex is in {state.get(v)}")
                continue
            if stack:
                top = stack[-1]
                if v not in adj[top]:
                    violations.append(f"round {rnd}: D3: missing edge ({top},{v})")
                    continue
                c = cmap[edge_key(top, v)]
                if c in a_u:
                    violations.append(f"round {rnd}: D3: colour repeat {c} on edge ({top},{v})")
                    continue
                a_u.add(c)
                stack_edge_colours.append(c)
                tree_edges.add(edge_key(top, v))
            state[v] = "U"
            stack.append(v)
            pushes[v] = pushes.get(v, 0) + 1
        elif kind == POP:
            if not stack or stack[-1] != v:
                violations.append(f"round {rnd}: partition: POP {v} but stack top is {stack[-1] if stack else None}")
                continue
            stack.pop()
            if stack_edge_colours and len(stack_edge_colours) == len(stack):
                a_u.discard(stack_edge_colours.pop())
            state[v] = "S"
            pops[v] = pops.get(v, 0) + 1
        else:
            violations.append(f"round {rnd}: unknown event kind {kind!r}")
            continue
        if len(stack) > len(best):
            best = tuple(stack)
        if rnd == n:
            s_now = frozenset(u for u in range(n) if state[u] == "S")
            t_now = tuple(u for u in trace.pi if state[u] == "T")
            if len(s_now) != len(t_now):
                violations.append(f"round {rnd}: balance point has |S|={len(s_now)} != |T|={len(t_now)}")
            snap = trace.balanced
            if (snap.s, snap.t, snap.u) != (s_now, t_now, tuple(stack)):
                violations.append(f"round {rnd}: stored balanced snapshot disagrees with replay")
            t_set = set(t_now)
            boundary = set()
            for u in s_now:
                for w in adj[u]:
                    if w in t_set:
                        boundary.add(cmap[edge_key(u, w)])
            balanced_colours = len(boundary)
            if balanced_colours > n - 1:
                violations.append(f"round {rnd}: D2: {balanced_colours} distinct colours on E(S,T) exceeds n-1={n - 1}")

    for v in range(n):
        if pushes.get(v, 0) != 1 or pops.get(v, 0) != 1:
            violations.append(f"D1/partition: vertex {v} pushed {pushes.get(v, 0)}x and popped {pops.get(v, 0)}x")
    if len(tree_edges) > max(n - 1, 0):
        violations.append(f"forest: {len(tree_edges)} distinct stack edges exceeds n-1={n - 1}")
    if len(tree_edges) != trace.tree_edge_count:
        violations.append(f"trace: stored tree_edge_count={trace.tree_edge_count}, replay found {len(tree_edges)}")
    if best != trace.best_u:
        violations.append("trace: stored best_u disagrees with replayed earliest maximum stack")

    return TraceReport(tuple(violations), len(trace.events), balanced_colours)


def format_trace(trace: RdfsTrace) -> str:
    """Debug dump, one line per round: ``PUSH v`` / ``POP v``."""
    return "\n".join(f"{kind} {v}" for kind, v in trace.events) + ("\n" if trace.events else "")
