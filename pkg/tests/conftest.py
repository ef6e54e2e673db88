"""Shared fixtures and instance builders."""

from __future__ import annotations

import numpy as np
import pytest

from perturbham.generators import sample_gnp, trial_rng
from perturbham.graph_core import ColouredGraph


def random_coloured_gnp(rng: np.random.Generator, n: int, p: float, r: int) -> ColouredGraph:
    """G(n, p) structure with iid uniform colours from {1..r}."""
    g = sample_gnp(n, p, rng)
    colours = rng.integers(1, r + 1, size=g.edge_count)
    return ColouredGraph(n, r, ((u, v, int(c)) for (u, v), c in zip(g.edges(), colours)))


def injective_complete(n: int) -> ColouredGraph:
    """K_n with globally distinct colours (one per edge)."""
    m = n * (n - 1) // 2
    edges = []
    c = 1
    for u in range(n):
        for v in range(u + 1, n):
            edges.append((u, v, c))
            c += 1
    return ColouredGraph(n, m, edges)


@pytest.fixture
def rng() -> np.random.Generator:
    return trial_rng(12345, 0)
