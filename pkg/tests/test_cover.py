import random

import pytest

from poisekit import (
    CoverageSystem,
    Graph,
    PartitionMatroid,
    build_coverage_instance,
    exact_matroid_coverage,
    greedy_matroid_max,
    pm_cover,
    pm_cover_system,
)
from poisekit.cover import default_iteration_cap
from poisekit.errors import InfeasibleGuessError


def two_branch_graph() -> Graph:
    return Graph(5, [(0, 1), (0, 2), (1, 3), (2, 4)], directed=True)


def singleton_locations(elements):
    return {e: (e,) for e in elements}


class TestBuildCoverageInstance:
    def test_two_branch_pairs(self):
        g = two_branch_graph()
        system = build_coverage_instance(
            g, {0}, {1, 2, 3, 4}, [3, 4], singleton_locations([3, 4]), D=2, root=0
        )
        assert [(a, c, set(cov)) for a, c, cov in system.pairs] == [
            (0, 1, {3}),
            (0, 2, {4}),
        ]

    def test_zero_radius_covers_nothing(self):
        g = two_branch_graph()
        system = build_coverage_instance(
            g, {0}, {1, 2, 3, 4}, [3, 4], singleton_locations([3, 4]), D=0, root=0
        )
        assert all(not cov for _, _, cov in system.pairs)

    def test_min_distance_over_representatives(self):
        g = two_branch_graph()
        system = build_coverage_instance(
            g, {0}, {1, 2, 3, 4}, ["e"], {"e": (3, 4)}, D=1, root=0
        )
        covered = {(a, c): cov for a, c, cov in system.pairs}
        assert covered[(0, 1)] == frozenset({"e"})  # via vertex 3 at distance 1
        assert covered[(0, 2)] == frozenset({"e"})

    def test_root_outside_A_rejected(self):
        g = two_branch_graph()
        with pytest.raises(ValueError):
            build_coverage_instance(
                g, {1}, {0, 2, 3, 4}, [3], singleton_locations([3]), D=1, root=0
            )

    def test_coverage_agrees_with_reference_bfs(self):
        # independent check: recompute coverage by hand BFS inside G[C]
        rng = random.Random(4)
        for _ in range(30):
            n = rng.randint(4, 10)
            arcs = set()
            for _ in range(rng.randint(n, 3 * n)):
                u, v = rng.randrange(n), rng.randrange(n)
                if u != v:
                    arcs.add((u, v))
            g = Graph(n, arcs, directed=True)
            C = set(rng.sample(range(1, n), rng.randint(1, n - 1)))
            A = set(range(n)) - C
            elements = [v for v in C if rng.random() < 0.5]
            D = rng.randint(0, 3)
            system = build_coverage_instance(
                g, A, C, elements, singleton_locations(elements), D, root=0
            )
            for a, c, cov in system.pairs:
                assert a in A and c in C and g.has_arc(a, c)
                # reference BFS restricted to C
                dist = {c: 0}
                frontier = [c]
                while frontier:
                    nxt = []
                    for u in frontier:
                        for w in g.out_neighbors(u):
                            if w in C and w not in dist:
                                dist[w] = dist[u] + 1
                                nxt.append(w)
                    frontier = nxt
                expect = {e for e in elements if dist.get(e, D + 1) <= D}
                assert set(cov) == expect


class TestGreedyMatroidMax:
    def test_forced_order_with_tie_break(self):
        system = CoverageSystem(
            {1, 2, 3},
            [(0, 1, frozenset({1, 2})), (0, 2, frozenset({2, 3})), (0, 3, frozenset({3}))],
        )
        matroid = PartitionMatroid.for_system(system, capacity=2)
        picks = greedy_matroid_max(system, matroid)
        chosen = {system.pairs[i][:2] for i in picks}
        assert chosen == {(0, 1), (0, 2)}

    def test_independence_limit(self):
        system = CoverageSystem(
            {1, 2, 3, 4, 5},
            [(0, 1, frozenset({1, 2})), (0, 2, frozenset({3, 4, 5}))],
        )
        matroid = PartitionMatroid.for_system(system, capacity=1)
        picks = greedy_matroid_max(system, matroid)
        assert {system.pairs[i][:2] for i in picks} == {(0, 2)}

    def test_half_of_optimum_on_random_systems(self, rng):
        for _ in range(120):
            system, matroid = random_system(rng, max_pairs=10, max_elems=8)
            picks = greedy_matroid_max(system, matroid)
            got = len(set().union(*(system.pairs[i][2] for i in picks)) if picks else set())
            best = exact_matroid_coverage(system, matroid)
            assert 2 * got >= best


def random_system(rng, max_pairs=10, max_elems=8, capacity=None):
    elems = list(range(rng.randint(1, max_elems)))
    n_pairs = rng.randint(1, max_pairs)
    pairs = []
    used = set()
    for _ in range(n_pairs):
        a, c = rng.randint(0, 3), rng.randint(10, 25)
        if (a, c) in used:
            continue
        used.add((a, c))
        cov = frozenset(e for e in elems if rng.random() < 0.4)
        pairs.append((a, c, cov))
    system = CoverageSystem(elems, pairs)
    cap = capacity if capacity is not None else rng.randint(1, 3)
    return system, PartitionMatroid.for_system(system, cap)


class TestPmCover:
    def test_two_branch_capacity_one_takes_two_iterations(self):
        g = two_branch_graph()
        sel = pm_cover(
            g, 0, {0}, {1, 2, 3, 4}, [3, 4], singleton_locations([3, 4]),
            target=2, B=1, D=2,
        )
        assert sel.chosen == {(0, 1), (0, 2)}
        assert sel.iterations == 2
        assert sel.covered_elements == {3, 4}

    def test_capacity_two_finishes_in_one_iteration(self):
        g = two_branch_graph()
        sel = pm_cover(
            g, 0, {0}, {1, 2, 3, 4}, [3, 4], singleton_locations([3, 4]),
            target=2, B=2, D=2,
        )
        assert sel.iterations == 1
        assert sel.covered_elements == {3, 4}

    def test_stall_raises_infeasible(self):
        g = Graph(5, [(0, 1), (0, 2)], directed=True)  # terminals unreachable in C
        with pytest.raises(InfeasibleGuessError):
            pm_cover(
                g, 0, {0}, {1, 2, 3, 4}, [3, 4], singleton_locations([3, 4]),
                target=2, B=1, D=2,
            )

    def test_per_iteration_selections_are_independent(self, rng):
        for _ in range(60):
            system, matroid = random_system(rng)
            target = rng.randint(1, len(system.ground))
            try:
                sel = pm_cover_system(system, matroid.capacity, target)
            except InfeasibleGuessError:
                continue
            for record in sel.log:
                assert all(
                    count <= matroid.capacity for count in record["per_part"].values()
                )

    def test_soundness_of_chosen_pairs(self):
        g = two_branch_graph()
        sel = pm_cover(
            g, 0, {0}, {1, 2, 3, 4}, [3, 4], singleton_locations([3, 4]),
            target=2, B=2, D=2,
        )
        for a, c in sel.chosen:
            assert a == 0 and g.has_arc(a, c)

    def test_halving_reaches_feasible_targets(self, rng):
        # whenever the exact oracle certifies a target coverable by one
        # independent selection, the loop reaches it within ceil(log2)+1 rounds
        for _ in range(80):
            system, matroid = random_system(rng)
            best = exact_matroid_coverage(system, matroid)
            if best == 0:
                continue
            target = rng.randint(1, best)
            sel = pm_cover_system(system, matroid.capacity, target)
            assert len(sel.covered_elements) >= target
            assert sel.iterations <= default_iteration_cap(target)

    def test_all_mode_stops_without_error(self):
        g = Graph(5, [(0, 1), (0, 2)], directed=True)
        sel = pm_cover(
            g, 0, {0}, {1, 2, 3, 4}, [3, 4], singleton_locations([3, 4]),
            target=None, B=1, D=2, max_iterations=3,
        )
        assert sel.covered_elements == set()


class TestExactMatroidCoverage:
    def test_single_part_capacity_one(self):
        system = CoverageSystem({1, 2, 3}, [(0, 1, frozenset({1, 2})), (0, 2, frozenset({3}))])
        matroid = PartitionMatroid.for_system(system, 1)
        assert exact_matroid_coverage(system, matroid) == 2

    def test_capacity_zero(self):
        system = CoverageSystem({1}, [(0, 1, frozenset({1}))])
        matroid = PartitionMatroid.for_system(system, 0)
        assert exact_matroid_coverage(system, matroid) == 0

    def test_two_branch_system_by_capacity(self):
        g = two_branch_graph()
        system = build_coverage_instance(
            g, {0}, {1, 2, 3, 4}, [3, 4], singleton_locations([3, 4]), D=2, root=0
        )
        assert exact_matroid_coverage(system, PartitionMatroid.for_system(system, 1)) == 1
        assert exact_matroid_coverage(system, PartitionMatroid.for_system(system, 2)) == 2

    def test_matches_brute_force_reference(self, rng):
        # independent reference: plain itertools enumeration, no pruning
        import itertools

        for _ in range(40):
            system, matroid = random_system(rng, max_pairs=7, max_elems=6)
            owner = matroid.part_of()
            best = 0
            idxs = range(len(system.pairs))
            for r in range(len(system.pairs) + 1):
                for combo in itertools.combinations(idxs, r):
                    loads = {}
                    ok = True
                    for i in combo:
                        loads[owner[i]] = loads.get(owner[i], 0) + 1
                        if loads[owner[i]] > matroid.capacity:
                            ok = False
                            break
                    if not ok:
                        continue
                    cov = set().union(*(system.pairs[i][2] for i in combo)) if combo else set()
                    best = max(best, len(cov))
            assert exact_matroid_coverage(system, matroid) == best
