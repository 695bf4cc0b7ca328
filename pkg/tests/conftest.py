"""Shared builders and independent reference implementations for the tests.

The reference routines here (Floyd-Warshall, schedule replay by hand, etc.)
are deliberately written from scratch so the package code is checked against
an independent path, not against itself.
"""

from __future__ import annotations

import random

import pytest

from poisekit import Graph, MulticastInstance, generate_instance
from poisekit.errors import GenerationError

INF = 10**9


def floyd_warshall(graph: Graph) -> list[list[int]]:
    """All-pairs hop distances, independent of the package BFS."""
    n = graph.n
    dist = [[0 if i == j else INF for j in range(n)] for i in range(n)]
    for u, v in graph.arcs:
        dist[u][v] = 1
        if not graph.directed:
            dist[v][u] = 1
    for k in range(n):
        for i in range(n):
            dik = dist[i][k]
            if dik == INF:
                continue
            row_k = dist[k]
            row_i = dist[i]
            for j in range(n):
                alt = dik + row_k[j]
                if alt < row_i[j]:
                    row_i[j] = alt
    return dist


def random_graph(rng: random.Random, n: int, m: int, directed: bool) -> Graph:
    if directed:
        universe = [(u, v) for u in range(n) for v in range(n) if u != v]
    else:
        universe = [(u, v) for u in range(n) for v in range(u + 1, n)]
    return Graph(n, rng.sample(universe, min(m, len(universe))), directed)


def two_branch_instance() -> MulticastInstance:
    """0->1, 0->2, 1->3, 2->4 with terminals {3, 4}."""
    g = Graph(5, [(0, 1), (0, 2), (1, 3), (2, 4)], directed=True)
    return MulticastInstance(g, 0, {3, 4}, 2)


def hub_stars_instance() -> MulticastInstance:
    """Undirected; two 2-terminal stars behind hub 1, two more behind the root."""
    arcs = [(0, 1), (1, 2), (1, 3), (0, 4), (0, 5),
            (2, 6), (2, 7), (3, 8), (3, 9), (4, 10), (4, 11), (5, 12), (5, 13)]
    return MulticastInstance(Graph(14, arcs, directed=False), 0, range(6, 14), 8)


def middles_instance(count: int = 8) -> MulticastInstance:
    """Undirected star of middles: root - m_i - s_i, one terminal each."""
    arcs = []
    terms = []
    for i in range(count):
        m, s = 1 + 2 * i, 2 + 2 * i
        arcs += [(0, m), (m, s)]
        terms.append(s)
    return MulticastInstance(Graph(1 + 2 * count, arcs, directed=False), 0, terms, count)


def directed_stream(count: int, seed: int):
    """Seeded normalized directed instances small enough for the oracle."""
    rng = random.Random(seed)
    produced = 0
    trial = 0
    while produced < count:
        trial += 1
        n = rng.randint(4, 7)
        t = rng.randint(1, 3)
        m = rng.randint(n, int(2.5 * n))
        try:
            inst = generate_instance(
                "random-digraph",
                {"n": n, "m": min(m, n * (n - 1)), "t": t,
                 "k": rng.randint(1, t), "seed": seed * 100000 + trial},
            )
        except GenerationError:
            continue
        produced += 1
        yield inst


def undirected_stream(count: int, seed: int):
    """Seeded normalized connected undirected instances, oracle-sized."""
    rng = random.Random(seed)
    produced = 0
    trial = 0
    while produced < count:
        trial += 1
        n = rng.randint(4, 6)
        t = rng.randint(1, min(4, n - 1))
        m = rng.randint(n, int(2.2 * n))
        try:
            inst = generate_instance(
                "random-digraph",
                {"n": n, "m": min(m, n * (n - 1) // 2), "t": t,
                 "k": rng.randint(1, t), "seed": seed * 100000 + trial,
                 "directed": False, "connected": True},
            )
        except GenerationError:
            continue
        produced += 1
        yield inst


@pytest.fixture
def rng() -> random.Random:
    return random.Random(12345)
