"""Maximum coverage under a partition matroid, and the iterated cover loop.

Coverage instances pair boundary arcs (a, c) with the element set reachable
from c inside the far side of the partition.  The greedy picker is a
1/2-approximation for maximum coverage under one matroid constraint; the
iterated loop re-runs it on the uncovered remainder, which halves the
shortfall each round.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Mapping

from .errors import InfeasibleGuessError
from .graph import Graph, bfs_distances

Element = Hashable
Pair = tuple[int, int]


@dataclass(frozen=True)
class CoverageSystem:
    """Ground elements plus (a, c, covered) pairs, unique and sorted by (a, c)."""

    ground: frozenset
    pairs: tuple[tuple[int, int, frozenset], ...]

    def __init__(self, ground: Iterable[Element], pairs: Iterable[tuple[int, int, frozenset]]):
        ground = frozenset(ground)
        dedup: dict[Pair, frozenset] = {}
        for a, c, covered in pairs:
            covered = frozenset(covered)
            if not covered <= ground:
                raise ValueError(f"pair ({a}, {c}) covers elements outside the ground set")
            if (a, c) in dedup:
                raise ValueError(f"duplicate pair ({a}, {c})")
            dedup[(a, c)] = covered
        object.__setattr__(self, "ground", ground)
        object.__setattr__(
            self, "pairs", tuple((a, c, dedup[(a, c)]) for a, c in sorted(dedup))
        )


@dataclass(frozen=True)
class PartitionMatroid:
    """Pair indices partitioned by their A-side anchor, uniform capacity."""

    parts: tuple[tuple[int, tuple[int, ...]], ...]
    capacity: int

    def __init__(self, parts: Mapping[int, Iterable[int]], capacity: int):
        if capacity < 0:
            raise ValueError("capacity must be nonnegative")
        seen: set[int] = set()
        norm = []
        for a in sorted(parts):
            idxs = tuple(sorted(parts[a]))
            if seen & set(idxs):
                raise ValueError("matroid parts must be disjoint")
            seen.update(idxs)
            norm.append((a, idxs))
        object.__setattr__(self, "parts", tuple(norm))
        object.__setattr__(self, "capacity", capacity)

    @classmethod
    def for_system(cls, system: CoverageSystem, capacity: int) -> "PartitionMatroid":
        parts: dict[int, list[int]] = {}
        for i, (a, _, _) in enumerate(system.pairs):
            parts.setdefault(a, []).append(i)
        return cls(parts, capacity)

    def part_of(self) -> dict[int, int]:
        """Pair index -> anchor vertex of its part."""
        owner = {}
        for a, idxs in self.parts:
            for i in idxs:
                owner[i] = a
        return owner

    def covers_all_indices(self, count: int) -> bool:
        return sorted(i for _, idxs in self.parts for i in idxs) == list(range(count))


@dataclass
class CoverSelection:
    """Accumulated boundary arcs, the elements they cover and the iteration log."""

    chosen: set[Pair]
    covered_elements: set
    iterations: int
    log: list[dict[str, Any]] = field(default_factory=list)


def build_coverage_instance(
    graph: Graph,
    A: Iterable[int],
    C: Iterable[int],
    elements: Iterable[Element],
    element_location: Mapping[Element, Iterable[int]],
    D: int,
    root: int,
) -> CoverageSystem:
    """One pair per boundary arc (a in A, c in C); a pair covers an element
    when c is within D hops of one of the element's representative vertices
    inside the induced subgraph on C.
    """
    A = frozenset(A)
    C = frozenset(C)
    if root not in A:
        raise ValueError("root must belong to A")
    if A & C:
        raise ValueError("A and C must be disjoint")
    if A | C != set(graph.vertices()):
        raise ValueError("A and C must partition the vertex set")
    boundary: set[Pair] = set()
    for a in A:
        for c in graph.out_neighbors(a):
            if c in C:
                boundary.add((a, c))
    elements = list(elements)
    reach_cache: dict[int, dict[int, int]] = {}
    pairs = []
    for a, c in sorted(boundary):
        if c not in reach_cache:
            reach_cache[c] = bfs_distances(graph, [c], restriction=C)
        dist = reach_cache[c]
        covered = frozenset(
            e
            for e in elements
            if any(dist.get(w, D + 1) <= D for w in element_location[e])
        )
        pairs.append((a, c, covered))
    return CoverageSystem(elements, pairs)


def greedy_matroid_max(
    system: CoverageSystem,
    matroid: PartitionMatroid,
    already_covered: Iterable[Element] = (),
) -> set[int]:
    """Greedy maximum coverage under the partition matroid.

    Repeatedly adds the pair of largest marginal coverage whose part still has
    spare capacity, ties broken by (a, c) order; stops at zero marginal gain.
    The result covers at least half as much as any independent selection.
    """
    if not matroid.covers_all_indices(len(system.pairs)):
        raise ValueError("matroid must index exactly the system's pairs")
    owner = matroid.part_of()
    covered = set(already_covered)
    load: dict[int, int] = {}
    chosen: set[int] = set()
    while True:
        best_idx = None
        best_gain = 0
        for i, (_, _, cov) in enumerate(system.pairs):
            if i in chosen or load.get(owner[i], 0) >= matroid.capacity:
                continue
            gain = len(cov - covered)
            if gain > best_gain:
                best_gain, best_idx = gain, i
        if best_idx is None:
            return chosen
        chosen.add(best_idx)
        load[owner[best_idx]] = load.get(owner[best_idx], 0) + 1
        covered |= system.pairs[best_idx][2]


def default_iteration_cap(target: int) -> int:
    """Iterations at which a halving cover loop must reach a feasible target:
    ceil(log2(target)) + 1."""
    return (target - 1).bit_length() + 1 if target >= 1 else 1


def _cover_loop(
    build: Callable[[set], tuple[CoverageSystem, PartitionMatroid]],
    target: int | None,
    max_iterations: int,
    all_elements: Iterable[Element],
) -> CoverSelection:
    """Shared engine: rebuild the system on the uncovered remainder, run the
    greedy picker, accumulate, stop at the target or the iteration cap.

    With ``target=None`` (cover-all mode) a zero-gain iteration simply ends the
    loop; with a numeric target it raises, certifying the budget infeasible.
    """
    if max_iterations < 1:
        raise ValueError("max_iterations must be at least 1")
    uncovered = set(all_elements)
    selection = CoverSelection(chosen=set(), covered_elements=set(), iterations=0)
    while selection.iterations < max_iterations:
        if target is not None and len(selection.covered_elements) >= target:
            break
        if not uncovered:
            break
        system, matroid = build(uncovered)
        picks = greedy_matroid_max(system, matroid)
        newly: set = set()
        arcs = []
        per_part: dict[int, int] = {}
        for i in sorted(picks):
            a, c, cov = system.pairs[i]
            arcs.append((a, c))
            per_part[a] = per_part.get(a, 0) + 1
            newly |= cov
        selection.iterations += 1
        selection.log.append(
            {
                "iteration": selection.iterations,
                "chosen": arcs,
                "covered": sorted(newly, key=repr),
                "per_part": per_part,
            }
        )
        if not newly:
            if target is not None and len(selection.covered_elements) < target:
                raise InfeasibleGuessError(
                    "coverage stalled: an iteration covered no new elements"
                )
            break
        selection.chosen.update(arcs)
        selection.covered_elements |= newly
        uncovered -= newly
    return selection


def pm_cover(
    graph: Graph,
    root: int,
    A: Iterable[int],
    C: Iterable[int],
    elements: Iterable[Element],
    element_location: Mapping[Element, Iterable[int]],
    target: int | None,
    B: int,
    D: int,
    max_iterations: int | None = None,
) -> CoverSelection:
    """Iterated partition-matroid coverage across the (A, C) boundary.

    Each iteration rebuilds the coverage instance over the still-uncovered
    elements, so every recorded selection takes at most B pairs from any
    anchor's part.  ``target=None`` keeps everything coverable within the
    iteration cap instead of aiming for a count.
    """
    if target is not None and target < 1:
        raise ValueError("target must be at least 1 (or None for cover-all mode)")
    if max_iterations is None:
        if target is None:
            raise ValueError("cover-all mode needs an explicit max_iterations")
        max_iterations = default_iteration_cap(target)
    A = frozenset(A)
    C = frozenset(C)
    elements = list(elements)

    def build(uncovered: set) -> tuple[CoverageSystem, PartitionMatroid]:
        system = build_coverage_instance(
            graph, A, C, sorted(uncovered, key=repr), element_location, D, root
        )
        return system, PartitionMatroid.for_system(system, B)

    return _cover_loop(build, target, max_iterations, elements)


def pm_cover_system(
    system: CoverageSystem,
    capacity: int,
    target: int | None,
    max_iterations: int | None = None,
) -> CoverSelection:
    """The cover loop on a fixed abstract system (no graph rebuild step)."""
    if max_iterations is None:
        if target is None:
            raise ValueError("cover-all mode needs an explicit max_iterations")
        max_iterations = default_iteration_cap(target)

    def build(uncovered: set) -> tuple[CoverageSystem, PartitionMatroid]:
        restricted = CoverageSystem(
            uncovered, [(a, c, cov & uncovered) for a, c, cov in system.pairs]
        )
        return restricted, PartitionMatroid.for_system(restricted, capacity)

    return _cover_loop(build, target, max_iterations, system.ground)
