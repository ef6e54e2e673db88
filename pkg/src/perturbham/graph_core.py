"""Undirected graphs, edge colourings, paths, cycles, and rainbow verification.

Vertices are 0-based integers ``{0..n-1}``; colours are 1-based integers
``{1..r}``. Edges are stored canonically as ``(min(u, v), max(u, v))``.
``Graph`` carries structure only; ``ColouredGraph`` adds a total colour map.
Both are immutable after construction and safe to share across workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import IO, Iterable, Iterator, Sequence

from .errors import ConfigError, ContractError

Edge = tuple[int, int]


def edge_key(u: int, v: int) -> Edge:
    """Canonical (min, max) form of an undirected edge."""
    return (u, v) if u < v else (v, u)


class Graph:
    """Immutable undirected simple graph on ``{0..n-1}``, no colours."""

    __slots__ = ("n", "_adj", "_edge_count")

    def __init__(self, n: int, edges: Iterable[Edge] = ()):
        if n < 0:
            raise ConfigError(f"vertex count must be non-negative, got {n}")
        adj: list[set[int]] = [set() for _ in range(n)]
        count = 0
        for u, v in edges:
            if u == v:
                raise ConfigError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ConfigError(f"edge ({u},{v}) out of range for n={n}")
            if v not in adj[u]:
                adj[u].add(v)
                adj[v].add(u)
                count += 1
        self.n = n
        self._adj: tuple[frozenset[int], ...] = tuple(frozenset(s) for s in adj)
        self._edge_count = count

    @classmethod
    def from_adjacency(cls, n: int, adj: Sequence[frozenset[int]], edge_count: int) -> "Graph":
        """Wrap a prebuilt adjacency without copying (sets may be shared)."""
        g = cls.__new__(cls)
        g.n = n
        g._adj = tuple(adj)
        g._edge_count = edge_count
        return g

    @property
    def edge_count(self) -> int:
        return self._edge_count

    def neighbours(self, v: int) -> frozenset[int]:
        return self._adj[v]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj[u]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def min_degree(self) -> int:
        if self.n == 0:
            return 0
        return min(len(s) for s in self._adj)

    def edges(self) -> Iterator[Edge]:
        """Canonical edges in sorted order (deterministic)."""
        for u in range(self.n):
            for v in sorted(self._adj[u]):
                if u < v:
                    yield (u, v)

    def adjacency_matrix(self):
        """Dense 0/1 adjacency as a numpy array (small n only)."""
        import numpy as np

        a = np.zeros((self.n, self.n), dtype=np.uint8)
        for u, v in self.edges():
            a[u, v] = 1
            a[v, u] = 1
        return a

    def __eq__(self, other) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return self.n == other.n and self._adj == other._adj

    def __hash__(self):
        return hash((self.n, self._adj))

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.n}, edges={self._edge_count})"


class ColouredGraph(Graph):
    """Graph with a total edge colouring into the palette ``{1..r}``."""

    __slots__ = ("r", "colour")

    def __init__(self, n: int, r: int, coloured_edges: Iterable[tuple[int, int, int]] = ()):
        if r < 1:
            raise ConfigError(f"palette size must be at least 1, got {r}")
        colour: dict[Edge, int] = {}
        plain: list[Edge] = []
        for u, v, c in coloured_edges:
            if not (1 <= c <= r):
                raise ConfigError(f"colour {c} outside palette {{1..{r}}}")
            key = edge_key(u, v)
            if key in colour and colour[key] != c:
                raise ContractError(f"edge {key} given colours {colour[key]} and {c}")
            colour[key] = c
            plain.append(key)
        super().__init__(n, plain)
        self.r = r
        self.colour = colour

    def psi(self, u: int, v: int) -> int:
        """Colour of the edge {u, v}; KeyError if absent."""
        return self.colour[edge_key(u, v)]

    def coloured_edges(self) -> Iterator[tuple[int, int, int]]:
        for u, v in self.edges():
            yield u, v, self.colour[(u, v)]

    def __eq__(self, other) -> bool:
        if type(other) is not ColouredGraph:
            return NotImplemented
        return self.n == other.n and self.r == other.r and self.colour == other.colour

    def __hash__(self):
        return hash((self.n, self.r, tuple(sorted(self.colour.items()))))

    def __repr__(self) -> str:
        return f"ColouredGraph(n={self.n}, r={self.r}, edges={self.edge_count})"


class GraphBuilder:
    """Single-threaded mutable builder for ColouredGraph.

    ``add_edge`` reports a collision flag instead of overwriting: re-adding an
    existing edge keeps its original colour.
    """

    def __init__(self, n: int, r: int):
        if n < 0:
            raise ConfigError(f"vertex count must be non-negative, got {n}")
        if r < 1:
            raise ConfigError(f"palette size must be at least 1, got {r}")
        self.n = n
        self.r = r
        self._colour: dict[Edge, int] = {}

    def add_edge(self, u: int, v: int, c: int) -> bool:
        """Insert edge {u, v} with colour c; return True on collision.

        On collision the edge keeps the colour it already had.
        """
        if u == v:
            raise ConfigError(f"self-loop at vertex {u}")
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise ConfigError(f"edge ({u},{v}) out of range for n={self.n}")
        if not (1 <= c <= self.r):
            raise ConfigError(f"colour {c} outside palette {{1..{self.r}}}")
        key = edge_key(u, v)
        if key in self._colour:
            return True
        self._colour[key] = c
        return False

    def build(self) -> ColouredGraph:
        return ColouredGraph(self.n, self.r, ((u, v, c) for (u, v), c in self._colour.items()))


def union(g1: ColouredGraph, g2: ColouredGraph) -> ColouredGraph:
    """Union of two coloured graphs on the same vertex set and palette.

    Shared edges must agree on colour; a disagreement is a contract violation
    because the perturbed model colours each union edge exactly once (callers
    colour the union, not the parts).
    """
    if g1.n != g2.n:
        raise ContractError(f"vertex counts differ: {g1.n} vs {g2.n}")
    if g1.r != g2.r:
        raise ContractError(f"palette sizes differ: {g1.r} vs {g2.r}")
    merged = dict(g1.colour)
    for key, c in g2.colour.items():
        if merged.get(key, c) != c:
            raise ContractError(f"edge {key} coloured {merged[key]} in one graph and {c} in the other")
        merged[key] = c
    return ColouredGraph(g1.n, g1.r, ((u, v, c) for (u, v), c in merged.items()))


REASON_MISSING_EDGE = "missing edge"
REASON_COLOUR_REPEAT = "colour repeat"


@dataclass(frozen=True)
class RainbowCheck:
    """Outcome of a rainbow verification; truthy iff the walk is rainbow."""

    ok: bool
    reason: str | None = None
    detail: Edge | None = None

    def __bool__(self) -> bool:
        return self.ok


def is_rainbow(g: ColouredGraph, seq: Sequence[int], cyclic: bool = False) -> RainbowCheck:
    """Check that seq traverses existing edges with pairwise distinct colours.

    With ``cyclic=True`` the wrap-around edge is included. The vertices of seq
    must be distinct and there must be at least two of them.
    """
    if len(seq) < 2:
        raise ValueError("sequence must contain at least 2 vertices")
    if len(set(seq)) != len(seq):
        raise ValueError("sequence vertices must be distinct")
    pairs = list(zip(seq, seq[1:]))
    if cyclic:
        pairs.append((seq[-1], seq[0]))
    seen: set[int] = set()
    for u, v in pairs:
        key = edge_key(u, v)
        c = g.colour.get(key)
        if c is None:
            return RainbowCheck(False, REASON_MISSING_EDGE, key)
        if c in seen:
            return RainbowCheck(False, REASON_COLOUR_REPEAT, key)
        seen.add(c)
    return RainbowCheck(True)


@dataclass(frozen=True)
class VertexPath:
    """A rainbow path: ordered distinct vertices plus its edge-colour set.

    Zero- and one-vertex paths are legal and have no edges.
    """

    seq: tuple[int, ...]
    colours: frozenset[int]

    @classmethod
    def from_seq(cls, g: ColouredGraph, seq: Sequence[int]) -> "VertexPath":
        seq = tuple(seq)
        if len(seq) < 2:
            if len(set(seq)) != len(seq):
                raise ContractError("path vertices must be distinct")
            return cls(seq, frozenset())
        check = is_rainbow(g, seq, cyclic=False)
        if not check:
            raise ContractError(f"not a rainbow path: {check.reason} at {check.detail}")
        cols = frozenset(g.psi(u, v) for u, v in zip(seq, seq[1:]))
        return cls(seq, cols)

    @property
    def edge_length(self) -> int:
        return max(len(self.seq) - 1, 0)


@dataclass(frozen=True)
class VertexCycle:
    """A rainbow cycle: cyclic vertex order (first vertex not repeated) and colours."""

    seq: tuple[int, ...]
    colours: frozenset[int]

    @classmethod
    def from_seq(cls, g: ColouredGraph, seq: Sequence[int]) -> "VertexCycle":
        seq = tuple(seq)
        if len(seq) < 3:
            raise ContractError("a cycle needs at least 3 vertices")
        check = is_rainbow(g, seq, cyclic=True)
        if not check:
            raise ContractError(f"not a rainbow cycle: {check.reason} at {check.detail}")
        pairs = list(zip(seq, seq[1:])) + [(seq[-1], seq[0])]
        cols = frozenset(g.psi(u, v) for u, v in pairs)
        return cls(seq, cols)

    def is_hamilton(self, n: int) -> bool:
        return len(self.seq) == n


def write_graph(g: ColouredGraph, f: IO[str]) -> None:
    """Line-oriented text format: header ``n r``, then one ``u v c`` per edge."""
    f.write(f"{g.n} {g.r}\n")
    for u, v, c in g.coloured_edges():
        f.write(f"{u} {v} {c}\n")


def read_graph(f: IO[str]) -> ColouredGraph:
    header = f.readline().split()
    if len(header) != 2:
        raise ValueError("expected header line 'n r'")
    n, r = int(header[0]), int(header[1])
    edges = []
    for lineno, line in enumerate(f, start=2):
        line = line.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected 'u v c'")
        edges.append((int(parts[0]), int(parts[1]), int(parts[2])))
    return ColouredGraph(n, r, edges)


def save_graph(g: ColouredGraph, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        write_graph(g, f)


def load_graph(path) -> ColouredGraph:
    with open(path, "r", encoding="utf-8") as f:
        return read_graph(f)
