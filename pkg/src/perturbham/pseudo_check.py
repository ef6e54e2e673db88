"""Discrepancy and colour-coverage checks.

Two hypotheses get verified here: the (p, beta) discrepancy condition
|e(X,Y) - p * pairs(X,Y)| <= beta * sqrt(|X| |Y|) over vertex subsets, and
the colour-coverage condition that every pair of disjoint k-sets carries at
least a threshold number of distinct colours. The discrepancy definition
allows overlapping X and Y; e(X,Y) counts ordered adjacent pairs (edges
inside the intersection twice), and the potential-pair count excludes the
diagonal so that the complete graph at p = 1 and the empty graph at p = 0
both have discrepancy exactly zero. For disjoint X and Y this is the
textbook |e(X,Y) - p |X| |Y||. The coverage condition uses disjoint sets
only, exactly as stated.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .errors import ConfigError
from .graph_core import ColouredGraph, Graph

EXACT_MAX_N = 16
COVERAGE_MAX_N = 14


@dataclass(frozen=True)
class DiscrepancyReport:
    """Largest observed discrepancy ratio and the pair attaining it."""

    beta_observed: float
    witness: tuple[tuple[int, ...], tuple[int, ...]] | None
    mode: str
    pairs_examined: int

    def to_json_dict(self) -> dict:
        return {
            "beta_observed": self.beta_observed,
            "witness": None if self.witness is None else {"X": list(self.witness[0]), "Y": list(self.witness[1])},
            "mode": self.mode,
            "pairs_examined": self.pairs_examined,
        }


@dataclass(frozen=True)
class PseudoParams:
    """Knobs for the pseudo-randomness checks.

    The jumbledness ratio constant D induces the bound beta <= p*n/D, which in
    turn forces p >= D*D/n; that implied floor is reported, never enforced.
    """

    p: float
    D: float
    k: int
    epsilon: float | None = None
    threshold: int | None = None

    def __post_init__(self):
        if self.k < 1:
            raise ConfigError(f"k must be at least 1, got {self.k}")

    def beta_bound(self, n: int) -> float:
        return self.p * n / self.D

    def implied_p_floor(self, n: int) -> float:
        return self.D * self.D / n


@dataclass(frozen=True)
class CoverageResult:
    """Outcome of a coverage check; ``witness`` is a violating (X, Y) pair."""

    ok: bool
    witness: tuple[tuple[int, ...], tuple[int, ...]] | None
    pairs_examined: int
    no_evidence: bool = False

    def __bool__(self) -> bool:
        return self.ok


def _discrepancy(e: float, p: float, kx: int, ky: int, overlap: int) -> float:
    return abs(e - p * (kx * ky - overlap)) / np.sqrt(kx * ky)


def jumbledness_exact(g: Graph, p: float, chunk: int = 256) -> DiscrepancyReport:
    """Exact maximum discrepancy ratio over all nonempty X, Y (overlap allowed).

    Enumerates all (2^n - 1)^2 subset pairs, so n is capped at 16.
    """
    n = g.n
    if n > EXACT_MAX_N:
        raise ConfigError(f"exact mode enumerates 4^n pairs and is capped at n={EXACT_MAX_N}; use jumbledness_sampled")
    if n == 0:
        return DiscrepancyReport(0.0, None, "exact", 0)

    masks = np.arange(1, 2**n, dtype=np.int64)
    popcnt = np.array([bin(m).count("1") for m in range(2**n)], dtype=np.int64)
    member = ((masks[:, None] >> np.arange(n)) & 1).astype(np.float64)  # (2^n-1, n)
    adj = g.adjacency_matrix().astype(np.float64)
    sizes = popcnt[masks].astype(np.float64)

    best = -1.0
    best_pair = (0, 0)
    for lo in range(0, len(masks), chunk):
        ycols = member[lo : lo + chunk]  # (c, n)
        e = member @ (adj @ ycols.T)  # ordered adjacent pairs, (2^n-1, c)
        size_prod = sizes[:, None] * sizes[lo : lo + chunk][None, :]
        overlap = popcnt[masks[:, None] & masks[lo : lo + chunk][None, :]]
        disc = np.abs(e - p * (size_prod - overlap)) / np.sqrt(size_prod)
        flat = int(np.argmax(disc))
        val = float(disc.flat[flat])
        if val > best:
            best = val
            best_pair = (int(masks[flat // disc.shape[1]]), int(masks[lo + flat % disc.shape[1]]))

    wx = tuple(v for v in range(n) if best_pair[0] >> v & 1)
    wy = tuple(v for v in range(n) if best_pair[1] >> v & 1)
    return DiscrepancyReport(best, (wx, wy), "exact", len(masks) ** 2)


def jumbledness_sampled(
    g: Graph,
    p: float,
    sizes: Sequence[int],
    samples: int,
    rng: np.random.Generator,
) -> DiscrepancyReport:
    """Lower bound on the discrepancy from sampled subset pairs.

    X and Y are drawn independently and uniformly among k-subsets for k taken
    from ``sizes``; the result never exceeds the exact maximum.
    """
    n = g.n
    if any(not 1 <= k <= n for k in sizes):
        raise ConfigError(f"sizes must lie in 1..{n}")
    if samples == 0 or not sizes:
        return DiscrepancyReport(0.0, None, "sampled", 0)
    adj = g.adjacency_matrix().astype(np.float64)
    best = -1.0
    best_pair: tuple[tuple[int, ...], tuple[int, ...]] | None = None
    sizes = list(sizes)
    for _ in range(samples):
        kx = sizes[rng.integers(len(sizes))]
        ky = sizes[rng.integers(len(sizes))]
        x = np.sort(rng.choice(n, size=kx, replace=False))
        y = np.sort(rng.choice(n, size=ky, replace=False))
        e = float(adj[np.ix_(x, y)].sum())
        overlap = len(np.intersect1d(x, y, assume_unique=True))
        val = float(_discrepancy(e, p, kx, ky, overlap))
        if val > best:
            best = val
            best_pair = (tuple(int(v) for v in x), tuple(int(v) for v in y))
    return DiscrepancyReport(best, best_pair, "sampled", samples)


def _colour_bit_masks(g: ColouredGraph) -> tuple[list[list[int]], int]:
    """Per-pair colour bitmasks; distinct colours map to distinct bits."""
    bit_of: dict[int, int] = {}
    cm = [[0] * g.n for _ in range(g.n)]
    for (u, v), c in g.colour.items():
        b = bit_of.setdefault(c, len(bit_of))
        cm[u][v] = cm[v][u] = 1 << b
    return cm, len(bit_of)


def coverage_condition_exact(g: ColouredGraph, k: int, threshold: int) -> CoverageResult:
    """True iff every disjoint pair of k-sets sees >= threshold distinct colours.

    Exhaustive over unordered disjoint pairs; on failure the first violating
    pair in lexicographic enumeration order is returned as the witness.
    """
    n = g.n
    if n > COVERAGE_MAX_N:
        raise ConfigError(f"exact coverage is capped at n={COVERAGE_MAX_N}; use coverage_condition_sampled")
    if 2 * k > n:
        raise ConfigError(f"need 2k <= n, got k={k}, n={n}")
    if k * k < threshold:
        # At most k*k edges can run between the sets, so any pair violates.
        x = tuple(range(k))
        y = tuple(range(k, 2 * k))
        return CoverageResult(False, (x, y), 0)

    cm, _ = _colour_bit_masks(g)
    # row_union[x][ymask] = OR of colour masks cm[x][y] over y in ymask
    row_union = []
    for x in range(n):
        row = [0] * (1 << n)
        cx = cm[x]
        for m in range(1, 1 << n):
            low = m & -m
            row[m] = row[m ^ low] | cx[low.bit_length() - 1]
        row_union.append(row)

    examined = 0
    verts = range(n)
    for xs in combinations(verts, k):
        xmask_members = set(xs)
        rest = [v for v in verts if v not in xmask_members]
        rows = [row_union[x] for x in xs]
        for ys in combinations(rest, k):
            if ys[0] < xs[0]:
                continue  # count each unordered pair once
            examined += 1
            ymask = 0
            for y in ys:
                ymask |= 1 << y
            acc = 0
            for row in rows:
                acc |= row[ymask]
            if bin(acc).count("1") < threshold:
                return CoverageResult(False, (xs, ys), examined)
    return CoverageResult(True, None, examined)


def coverage_condition_sampled(
    g: ColouredGraph,
    k: int,
    threshold: int,
    samples: int,
    rng: np.random.Generator,
) -> CoverageResult:
    """Coverage over sampled disjoint pairs only; free of false negatives
    relative to the pairs it actually examined. Zero samples is vacuously
    true and flagged as carrying no evidence.
    """
    n = g.n
    if 2 * k > n:
        raise ConfigError(f"need 2k <= n, got k={k}, n={n}")
    if samples == 0:
        return CoverageResult(True, None, 0, no_evidence=True)
    for i in range(samples):
        perm = rng.permutation(n)
        xs = tuple(sorted(int(v) for v in perm[:k]))
        ys = tuple(sorted(int(v) for v in perm[k : 2 * k]))
        colours = set()
        for x in xs:
            for y in ys:
                c = g.colour.get((x, y) if x < y else (y, x))
                if c is not None:
                    colours.add(c)
        if len(colours) < threshold:
            return CoverageResult(False, (xs, ys), i + 1)
    return CoverageResult(True, None, samples)


def boundary_edge_count(g: Graph, xs: Sequence[int], ys: Sequence[int]) -> int:
    """e(X, Y) for disjoint X, Y: plain edge count between the sets."""
    ys_set = set(ys)
    if set(xs) & ys_set:
        raise ConfigError("sets must be disjoint")
    return sum(1 for x in xs for y in g.neighbours(x) if y in ys_set)
