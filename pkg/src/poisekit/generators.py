"""Seeded random and constructive multicast-instance generators.

Every model is deterministic for a fixed seed and returns a normalized
instance whose root reaches at least k terminals.
"""

from __future__ import annotations

import random
from typing import Mapping

from .errors import GenerationError
from .graph import Graph, MulticastInstance, bfs_distances, normalize_terminals

MODELS = ("random-digraph", "layered-dag", "grid", "star-of-stars")

_RETRIES = 64


def generate_instance(model: str, params: Mapping[str, object]) -> MulticastInstance:
    """Build an instance from a named model and its parameter mapping.

    Common parameters: ``seed`` (default 0), ``k`` (default: all terminals),
    ``t`` (terminal count where the model does not fix it), ``directed``
    (model-specific default), ``connected`` (resample until the whole graph
    hangs together; random-digraph only).
    """
    builders = {
        "random-digraph": _random_digraph,
        "layered-dag": _layered_dag,
        "grid": _grid,
        "star-of-stars": _star_of_stars,
    }
    if model not in builders:
        raise ValueError(f"unknown model {model!r}; choose from {', '.join(MODELS)}")
    return builders[model](dict(params))


def _int(params: dict, key: str, default=None) -> int:
    if key not in params:
        if default is None:
            raise ValueError(f"model parameter {key!r} is required")
        return int(default)
    return int(params[key])  # type: ignore[arg-type]


def _finish(graph: Graph, root: int, terms: list[int], k: int) -> MulticastInstance:
    reachable = bfs_distances(graph, [root]).keys()
    if sum(1 for t in terms if t in reachable) < k:
        raise GenerationError("root cannot reach k terminals")
    return normalize_terminals(MulticastInstance(graph, root, terms, k))


def _random_digraph(params: dict) -> MulticastInstance:
    n = _int(params, "n")
    m = _int(params, "m")
    directed = bool(params.get("directed", True))
    connected = bool(params.get("connected", False))
    seed = _int(params, "seed", 0)
    t = _int(params, "t", max(1, n // 4))
    k = _int(params, "k", t)
    if n < 2 or t > n - 1 or k > t:
        raise GenerationError("random-digraph: need n >= 2 and k <= t <= n - 1")
    rng = random.Random(seed)
    if directed:
        universe = [(u, v) for u in range(n) for v in range(n) if u != v]
    else:
        universe = [(u, v) for u in range(n) for v in range(u + 1, n)]
    if m > len(universe):
        raise GenerationError("random-digraph: m exceeds the number of possible arcs")
    for _ in range(_RETRIES):
        arcs = rng.sample(universe, m)
        graph = Graph(n, arcs, directed)
        terms = rng.sample(range(1, n), t)
        reach = bfs_distances(graph, [0])
        if connected and len(reach) < n:
            continue
        if sum(1 for s in terms if s in reach) >= k:
            return _finish(graph, 0, terms, k)
    raise GenerationError("random-digraph: could not reach k terminals after retries")


def _layered_dag(params: dict) -> MulticastInstance:
    width = _int(params, "width")
    depth = _int(params, "depth")
    directed = bool(params.get("directed", True))
    seed = _int(params, "seed", 0)
    if width < 1 or depth < 1:
        raise GenerationError("layered-dag: need width >= 1 and depth >= 1")
    t = _int(params, "t", width)
    k = _int(params, "k", t)
    if t > width or k > t:
        raise GenerationError("layered-dag: need k <= t <= width")
    rng = random.Random(seed)
    arcs: list[tuple[int, int]] = []
    layers = [[0]]
    nxt = 1
    for _ in range(depth):
        layer = list(range(nxt, nxt + width))
        nxt += width
        for v in layer:
            fanin = rng.randint(1, min(3, len(layers[-1])))
            for u in rng.sample(layers[-1], fanin):
                arcs.append((u, v))
        layers.append(layer)
    terms = sorted(rng.sample(layers[-1], t))
    return _finish(Graph(nxt, arcs, directed), 0, terms, k)


def _grid(params: dict) -> MulticastInstance:
    w = _int(params, "w")
    h = _int(params, "h")
    directed = bool(params.get("directed", False))
    seed = _int(params, "seed", 0)
    if w < 1 or h < 1 or w * h < 2:
        raise GenerationError("grid: need at least two vertices")
    n = w * h
    arcs = []
    for y in range(h):
        for x in range(w):
            v = y * w + x
            if x + 1 < w:
                arcs.append((v, v + 1))
            if y + 1 < h:
                arcs.append((v, v + w))
    corners = sorted({w - 1, (h - 1) * w, n - 1} - {0})
    if "t" in params:
        t = _int(params, "t")
        if t > n - 1:
            raise GenerationError("grid: t exceeds the number of non-root vertices")
        terms = sorted(random.Random(seed).sample(range(1, n), t))
    else:
        terms = corners
    k = _int(params, "k", len(terms))
    if k > len(terms):
        raise GenerationError(f"grid: cannot cover k={k} with {len(terms)} terminals")
    return _finish(Graph(n, arcs, directed), 0, terms, k)


def _star_of_stars(params: dict) -> MulticastInstance:
    branch = _int(params, "branch")
    leaf = _int(params, "leaf")
    directed = bool(params.get("directed", True))
    if branch < 1 or leaf < 1:
        raise GenerationError("star-of-stars: need branch >= 1 and leaf >= 1")
    arcs = []
    hubs = list(range(1, branch + 1))
    leaves = []
    nxt = branch + 1
    for hub in hubs:
        arcs.append((0, hub))
        for _ in range(leaf):
            arcs.append((hub, nxt))
            leaves.append(nxt)
            nxt += 1
    k = _int(params, "k", len(leaves))
    if k > len(leaves):
        raise GenerationError(f"star-of-stars: cannot cover k={k} with {len(leaves)} terminals")
    return _finish(Graph(nxt, arcs, directed), 0, leaves, k)
