"""Absorbing structure and the end-to-end rainbow-Hamilton-cycle pipeline.

Starting from a rainbow path P0 found in the first random round, the even
interior positions of P0 act as absorbers: a vertex p_j in the candidate set
B(u, v) can be cut out of its slot, an external vertex v spliced in via two
seed edges, and p_j re-attached after the current end u via a third seed
edge. The colour-refined subset B^r keeps only candidates whose three new
edge colours are pairwise distinct and unseen on the path, so every splice
preserves rainbowness. One vertex is absorbed per step until the path spans
n - 2 vertices; the two reserved vertices x and y are then spliced in by a
single second-round edge, closing a rainbow Hamilton cycle.

Stage failures are first-class results, never retried internally, so the
Monte Carlo harness measures interpretable per-stage frequencies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ContractError
from .generators import (
    PerturbationConfig,
    colour_union,
    coloured_subgraph,
    make_seed,
    sample_gnp,
)
from .graph_core import ColouredGraph, Graph, VertexCycle, VertexPath, edge_key
from .rdfs import RdfsTrace, path_from_trace, rdfs_run

STAGE_R1_PATH = "r1_path"
STAGE_ABSORPTION = "absorption"
STAGE_CLOSING = "closing"


def compute_I(path: VertexPath) -> tuple[int, ...]:
    """Interior absorber slots: vertices at even 1-based positions, last excluded."""
    seq = path.seq
    if len(seq) < 2:
        raise ContractError("path must have at least 2 vertices")
    return tuple(seq[i] for i in range(1, len(seq), 2) if i != len(seq) - 1)


class AbsorberContext:
    """Mutable state of the absorption stage for one trial.

    The path is kept as a doubly linked list for O(1) splicing. ``interior``
    and ``np_cache`` are frozen at construction from the original path: the
    splice rewires only the used slot and the end, so every unused absorber
    keeps its original two path-neighbours, which is asserted on each use.
    """

    def __init__(self, path0: VertexPath, seed: Graph, coloured: ColouredGraph):
        seq = path0.seq
        if len(seq) < 2:
            raise ContractError("initial path must have at least 2 vertices")
        self.seed = seed
        self.coloured = coloured
        self.p1 = seq[0]
        self.z = seq[-1]
        self.left: dict[int, int | None] = {}
        self.right: dict[int, int | None] = {}
        prev: int | None = None
        for v in seq:
            self.left[v] = prev
            if prev is not None:
                self.right[prev] = v
            prev = v
        self.right[seq[-1]] = None
        interior = compute_I(path0)
        self.interior = frozenset(interior)
        self.np_cache = {v: (self.left[v], self.right[v]) for v in interior}
        self.used: list[int] = []
        self.used_set: set[int] = set()
        self.path_colours: set[int] = set(path0.colours)
        self.n_path = len(seq)
        leftover = sorted(set(range(coloured.n)) - set(seq))
        if len(leftover) < 2:
            raise ContractError("need at least two leftover vertices to reserve")
        self.reserved = (leftover[0], leftover[1])
        self.queue: list[int] = leftover[2:]

    def path_seq(self) -> tuple[int, ...]:
        out = []
        v: int | None = self.p1
        while v is not None:
            out.append(v)
            v = self.right[v]
        return tuple(out)

    def as_path(self) -> VertexPath:
        return VertexPath.from_seq(self.coloured, self.path_seq())


def compute_B(u: int, v: int, ctx: AbsorberContext) -> frozenset[int]:
    """Structural absorber candidates for the pair (u, v), minus used slots.

    Keeps x in N_seed(u) among the interior slots whose two original
    path-neighbours are both seed-neighbours of v.
    """
    seed = ctx.seed
    nu = seed.neighbours(u)
    nv = seed.neighbours(v)
    out = []
    for x in ctx.interior:
        if x in ctx.used_set or x not in nu:
            continue
        a, b = ctx.np_cache[x]
        if a in nv and b in nv:
            out.append(x)
    return frozenset(out)


def compute_Br(u: int, v: int, candidates: frozenset[int], ctx: AbsorberContext) -> frozenset[int]:
    """Colour-compatible refinement of a candidate set.

    A candidate survives when the colours of the three splice edges (u to the
    slot, and v to each original path-neighbour of the slot) are pairwise
    distinct and all absent from the current path colours.
    """
    cmap = ctx.coloured.colour
    seen = ctx.path_colours
    out = []
    for x in candidates:
        a, b = ctx.np_cache[x]
        c1 = cmap[edge_key(u, x)]
        c2 = cmap[edge_key(a, v)]
        c3 = cmap[edge_key(b, v)]
        if c1 in seen or c2 in seen or c3 in seen:
            continue
        if c1 == c2 or c1 == c3 or c2 == c3:
            continue
        out.append(x)
    return frozenset(out)


def absorb(ctx: AbsorberContext, v: int, p_j: int) -> AbsorberContext:
    """Splice v into p_j's slot and append p_j after the current end.

    Preconditions are re-verified (p_j must be an unused interior slot in
    B^r(z, v) and v an unreserved leftover); a violation raises ContractError
    rather than ever producing a non-rainbow path. The path gains vertex v,
    sheds the two colours of the removed slot edges, and gains the three
    fresh splice colours; the absorber becomes the new end.
    """
    if v in ctx.reserved:
        raise ContractError(f"vertex {v} is reserved for cycle closing")
    if v not in ctx.queue:
        raise ContractError(f"vertex {v} is not an available leftover")
    if p_j not in ctx.interior or p_j in ctx.used_set:
        raise ContractError(f"vertex {p_j} is not an unused interior slot")
    a, b = ctx.np_cache[p_j]
    if (ctx.left[p_j], ctx.right[p_j]) != (a, b):
        raise ContractError(f"slot {p_j} no longer has its original neighbours")
    z = ctx.z
    seed = ctx.seed
    if p_j not in seed.neighbours(z) or a not in seed.neighbours(v) or b not in seed.neighbours(v):
        raise ContractError(f"seed adjacencies missing for absorbing {v} at slot {p_j}")
    cmap = ctx.coloured.colour
    c_end = cmap[edge_key(z, p_j)]
    c_a = cmap[edge_key(a, v)]
    c_b = cmap[edge_key(b, v)]
    fresh = {c_end, c_a, c_b}
    if len(fresh) != 3 or fresh & ctx.path_colours:
        raise ContractError(f"splice colours for {v} at slot {p_j} clash with the path")

    # v takes the slot between a and b
    ctx.right[a] = v
    ctx.left[v] = a
    ctx.right[v] = b
    ctx.left[b] = v
    # p_j goes to the end
    ctx.right[z] = p_j
    ctx.left[p_j] = z
    ctx.right[p_j] = None
    ctx.z = p_j

    ctx.path_colours.discard(cmap[edge_key(a, p_j)])
    ctx.path_colours.discard(cmap[edge_key(p_j, b)])
    ctx.path_colours.update(fresh)
    ctx.used.append(p_j)
    ctx.used_set.add(p_j)
    ctx.queue.remove(v)
    ctx.n_path += 1
    return ctx


@dataclass(frozen=True)
class AbsorptionOutcome:
    ctx: AbsorberContext | None
    failed_at: int | None  # step index of the first vertex with no absorber
    failed_vertex: int | None
    b_sizes: tuple[int, ...]
    br_sizes: tuple[int, ...]

    @property
    def ok(self) -> bool:
        return self.ctx is not None


def absorb_all(
    path0: VertexPath,
    seed: Graph,
    coloured: ColouredGraph,
    rng: np.random.Generator,
) -> AbsorptionOutcome:
    """Absorb every leftover vertex except the two reserved ones.

    Leftovers are taken in natural vertex order; the two lowest-indexed ones
    are reserved for closing. When several absorbers are eligible one is
    picked uniformly at random (existence is all the construction needs).
    Returns the extended context, or the first vertex whose candidate set
    came up empty.
    """
    ctx = AbsorberContext(path0, seed, coloured)
    b_sizes: list[int] = []
    br_sizes: list[int] = []
    for step, v in enumerate(list(ctx.queue)):
        cand = compute_B(ctx.z, v, ctx)
        refined = compute_Br(ctx.z, v, cand, ctx)
        b_sizes.append(len(cand))
        br_sizes.append(len(refined))
        if not refined:
            return AbsorptionOutcome(None, step, v, tuple(b_sizes), tuple(br_sizes))
        order = sorted(refined)
        absorb(ctx, v, order[int(rng.integers(len(order)))])
    return AbsorptionOutcome(ctx, None, None, tuple(b_sizes), tuple(br_sizes))


@dataclass(frozen=True)
class ClosingOutcome:
    cycle: VertexCycle | None
    pairs_examined: int
    x_size: int
    y_size: int
    x_prime_size: int
    y_prime_size: int

    @property
    def ok(self) -> bool:
        return self.cycle is not None


def close_cycle(
    ctx: AbsorberContext,
    r1: Graph,
    r2: Graph,
) -> ClosingOutcome:
    """Close the n-2 path into a rainbow Hamilton cycle via one R2 edge.

    Candidate slots X and Y are the absorber sets for (p1, x) and for the
    other end with y; X' and Y' discard slots any of whose three defining
    edges also lie in R1. The R2 edges between X' and Y' (not in R1) are
    scanned in canonical order for an edge whose endpoints pass the colour
    refinement on their respective sides and whose seven splice colours are
    pairwise distinct and fresh; the first hit is spliced into a cycle.
    """
    x, y = ctx.reserved
    p1, q = ctx.p1, ctx.z
    cmap = ctx.coloured.colour
    big_x = compute_B(p1, x, ctx)
    big_y = compute_B(q, y, ctx)

    def r1_free(w: int, end: int, ext: int) -> bool:
        a, b = ctx.np_cache[w]
        return not (r1.has_edge(w, end) or r1.has_edge(a, ext) or r1.has_edge(b, ext))

    x_prime = frozenset(w for w in big_x if r1_free(w, p1, x))
    y_prime = frozenset(w for w in big_y if r1_free(w, q, y))
    x_ok = compute_Br(p1, x, x_prime, ctx)
    y_ok = compute_Br(q, y, y_prime, ctx)

    candidate_edges = sorted(
        {
            edge_key(a, b)
            for a in x_prime
            for b in r2.neighbours(a)
            if b in y_prime and not r1.has_edge(a, b)
        }
    )

    pairs = 0
    for a, b in candidate_edges:
        pairs += 1
        c_edge = cmap[(a, b)]
        if c_edge in ctx.path_colours:
            continue
        for w_x, w_y in ((a, b), (b, a)):
            if w_x not in x_ok or w_y not in y_ok:
                continue
            ax, bx = ctx.np_cache[w_x]
            ay, by = ctx.np_cache[w_y]
            seven = {
                c_edge,
                cmap[edge_key(p1, w_x)],
                cmap[edge_key(x, ax)],
                cmap[edge_key(x, bx)],
                cmap[edge_key(q, w_y)],
                cmap[edge_key(y, ay)],
                cmap[edge_key(y, by)],
            }
            if len(seven) != 7:
                continue
            cycle = _build_cycle(ctx, w_x, w_y, x, y)
            return ClosingOutcome(cycle, pairs, len(big_x), len(big_y), len(x_prime), len(y_prime))
    return ClosingOutcome(None, pairs, len(big_x), len(big_y), len(x_prime), len(y_prime))


def _build_cycle(ctx: AbsorberContext, w_x: int, w_y: int, x: int, y: int) -> VertexCycle:
    """Assemble the closing walk and verify it.

    The cycle leaves w_x for p1, walks the path with x standing in w_x's slot
    and y in w_y's slot, reaches the far end, crosses to w_y, and closes over
    the R2 edge w_y w_x. Works for either relative order of the two slots.
    """
    seq = ctx.path_seq()
    pos = {v: i for i, v in enumerate(seq)}
    ia, ib = pos[w_x], pos[w_y]
    if ia < ib:
        cycle_seq = (w_x,) + seq[:ia] + (x,) + seq[ia + 1 : ib] + (y,) + seq[ib + 1 :] + (w_y,)
    else:
        cycle_seq = (w_x,) + seq[:ib] + (y,) + seq[ib + 1 : ia] + (x,) + seq[ia + 1 :] + (w_y,)
    cycle = VertexCycle.from_seq(ctx.coloured, cycle_seq)
    if len(cycle.seq) != ctx.coloured.n:
        raise ContractError(f"closing produced a {len(cycle.seq)}-cycle, expected {ctx.coloured.n}")
    return cycle


@dataclass(frozen=True)
class PipelineStats:
    rdfs_path_vertices: int
    path0_vertices: int
    b_sizes: tuple[int, ...] = ()
    br_sizes: tuple[int, ...] = ()
    absorb_steps: int = 0
    closing_pairs_examined: int | None = None
    x_size: int | None = None
    y_size: int | None = None
    x_prime_size: int | None = None
    y_prime_size: int | None = None

    @property
    def min_b_size(self) -> int | None:
        return min(self.b_sizes) if self.b_sizes else None


@dataclass(frozen=True)
class PipelineResult:
    """Outcome of one end-to-end trial; failures carry the stage they hit."""

    success: bool
    stage: str
    cycle: VertexCycle | None
    stats: PipelineStats
    diagnostics: dict = field(default_factory=dict)
    trace: RdfsTrace | None = None


def run_pipeline(
    cfg: PerturbationConfig,
    rng: np.random.Generator,
    keep_trace: bool = False,
) -> PipelineResult:
    """One full trial: seed, two random rounds, one colouring, three stages.

    The first-round rainbow path must reach floor((1 - epsilon) * n) vertices
    (r1_path failure otherwise) and is trimmed to at most n - 2 vertices so
    two leftovers can be reserved; absorption then runs over the seed and the
    closing edge comes from the second round. A success carries a cycle that
    re-verified as rainbow Hamilton before being returned.
    """
    n = cfg.n
    seed = make_seed(cfg.family, n, cfg.d, rng)
    r1 = sample_gnp(n, cfg.K / n, rng)
    r2 = sample_gnp(n, cfg.p2, rng)
    coloured, _tags = colour_union(seed, r1, r2, cfg.r, rng)
    pi = [int(v) for v in rng.permutation(n)]
    r1_coloured = coloured_subgraph(coloured, r1)
    trace = rdfs_run(r1_coloured, pi)
    found = path_from_trace(r1_coloured, trace)
    rdfs_len = len(found.seq)
    kept_trace = trace if keep_trace else None

    diagnostics: dict = {
        "threshold": cfg.rdfs_threshold,
        "d3n_over_220": cfg.d**3 * n / 220,
        "d3n_over_110": cfg.d**3 * n / 110,
    }

    if rdfs_len < cfg.rdfs_threshold:
        stats = PipelineStats(rdfs_path_vertices=rdfs_len, path0_vertices=0)
        return PipelineResult(False, STAGE_R1_PATH, None, stats, diagnostics, kept_trace)

    path0 = VertexPath.from_seq(r1_coloured, found.seq[: min(rdfs_len, n - 2)])
    outcome = absorb_all(path0, seed, coloured, rng)
    diagnostics["b_sizes_below_d3n_over_220"] = sum(
        1 for s in outcome.b_sizes if s < diagnostics["d3n_over_220"]
    )
    if not outcome.ok:
        stats = PipelineStats(
            rdfs_path_vertices=rdfs_len,
            path0_vertices=len(path0.seq),
            b_sizes=outcome.b_sizes,
            br_sizes=outcome.br_sizes,
            absorb_steps=outcome.failed_at or 0,
        )
        diagnostics["failed_vertex"] = outcome.failed_vertex
        return PipelineResult(False, STAGE_ABSORPTION, None, stats, diagnostics, kept_trace)

    ctx = outcome.ctx
    closing = close_cycle(ctx, r1, r2)
    stats = PipelineStats(
        rdfs_path_vertices=rdfs_len,
        path0_vertices=len(path0.seq),
        b_sizes=outcome.b_sizes,
        br_sizes=outcome.br_sizes,
        absorb_steps=len(outcome.b_sizes),
        closing_pairs_examined=closing.pairs_examined,
        x_size=closing.x_size,
        y_size=closing.y_size,
        x_prime_size=closing.x_prime_size,
        y_prime_size=closing.y_prime_size,
    )
    if not closing.ok:
        return PipelineResult(False, STAGE_CLOSING, None, stats, diagnostics, kept_trace)
    cycle = closing.cycle
    assert cycle is not None and cycle.is_hamilton(n)
    return PipelineResult(True, STAGE_CLOSING, cycle, stats, diagnostics, kept_trace)
