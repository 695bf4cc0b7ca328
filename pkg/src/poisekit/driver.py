"""Guess sweeps over (B, D) budgets and the benchmark suites."""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any

from .directed import solve_directed
from .errors import GenerationError, InfeasibleGuessError
from .generators import generate_instance
from .graph import (
    MulticastInstance,
    PoiseGuess,
    PoiseTree,
    eccentricity,
    prune_beyond,
    tree_metrics,
)
from .oracle import DEFAULT_LIMIT_N, exact_min_poise_ktree
from .scheduling import tree_broadcast_schedule
from .undirected import solve_undirected

THREADS_ENV = "POISEKIT_THREADS"


@dataclass
class SweepReport:
    grid: dict[str, int]
    fast_sweep: bool
    records: list[dict[str, Any]] = field(default_factory=list)
    skipped: int = 0
    best: dict[str, Any] | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "grid": self.grid,
            "fast_sweep": self.fast_sweep,
            "records": self.records,
            "skipped": self.skipped,
            "best": self.best,
        }


def solver_for(instance: MulticastInstance, mode: str):
    if mode == "auto":
        mode = "directed" if instance.graph.directed else "undirected"
    if mode == "directed":
        return solve_directed
    if mode == "undirected":
        return solve_undirected
    raise ValueError(f"unknown mode {mode!r}")


def solve_guess(
    instance: MulticastInstance,
    guess: PoiseGuess,
    mode: str = "auto",
    trace: dict[str, Any] | None = None,
) -> PoiseTree:
    """Prune to the guess radius and run the matching solver.

    The instance must already be in normalized shape (leaf terminals).
    """
    solver = solver_for(instance, mode)
    pruned = prune_beyond(instance, guess.D)
    return solver(pruned, guess, trace=trace)


def _sweep_concurrency() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run_sweep(
    instance: MulticastInstance,
    mode: str = "auto",
    fast: bool = False,
) -> tuple[SweepReport, PoiseTree | None]:
    """Try every guess with D in [1, ecc(root)] and B in [1, t].

    Returns the report plus the feasible tree of minimum poise (ties broken by
    smallest (B, D)).  Concurrency across guesses is capped by the
    POISEKIT_THREADS environment variable; records are keyed by (B, D) so
    assembly order does not matter.
    """
    ecc = eccentricity(instance.graph, instance.root)
    t = len(instance.terminals)
    report = SweepReport(grid={"D_max": ecc, "B_max": t}, fast_sweep=fast)

    def attempt(guess: PoiseGuess) -> tuple[dict[str, Any], PoiseTree | None]:
        start = time.perf_counter()
        try:
            tree = solve_guess(instance, guess, mode)
            m = tree_metrics(tree, instance)
            rec = {
                "B": guess.B,
                "D": guess.D,
                "feasible": True,
                "poise": m.poise,
                "max_out_degree": m.max_out_degree,
                "height": m.height,
                "terminals_covered": m.terminals_covered,
            }
        except InfeasibleGuessError as exc:
            tree = None
            rec = {"B": guess.B, "D": guess.D, "feasible": False, "reason": str(exc)}
        rec["wall_ms"] = round((time.perf_counter() - start) * 1000.0, 3)
        return rec, tree

    results: dict[tuple[int, int], tuple[dict[str, Any], PoiseTree | None]] = {}
    if fast:
        for D in range(1, ecc + 1):
            row_best = None
            for B in range(1, t + 1):
                rec, tree = attempt(PoiseGuess(B, D))
                results[(B, D)] = (rec, tree)
                if rec["feasible"]:
                    if row_best is not None and rec["poise"] > row_best:
                        report.skipped += t - B
                        break
                    row_best = rec["poise"] if row_best is None else min(row_best, rec["poise"])
    else:
        guesses = [PoiseGuess(B, D) for D in range(1, ecc + 1) for B in range(1, t + 1)]
        workers = _sweep_concurrency()
        if workers > 1 and len(guesses) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                for guess, outcome in zip(guesses, pool.map(attempt, guesses)):
                    results[(guess.B, guess.D)] = outcome
        else:
            for guess in guesses:
                results[(guess.B, guess.D)] = attempt(guess)

    best_key = None
    best_tree = None
    for (B, D) in sorted(results):
        rec, tree = results[(B, D)]
        report.records.append(rec)
        if rec["feasible"]:
            key = (rec["poise"], B, D)
            if best_key is None or key < best_key:
                best_key = key
                best_tree = tree
                report.best = dict(rec)
    return report, best_tree


_DESK_ROWS: list[tuple[str, dict[str, Any]]] = [
    ("star-of-stars", {"branch": 2, "leaf": 2, "k": 4}),
    ("star-of-stars", {"branch": 3, "leaf": 2, "k": 5}),
    ("grid", {"w": 2, "h": 2, "k": 2}),
    ("grid", {"w": 3, "h": 3, "k": 3}),
    ("layered-dag", {"width": 3, "depth": 2, "t": 3, "k": 2}),
    ("random-digraph", {"n": 7, "m": 16, "t": 3, "k": 2}),
    ("random-digraph", {"n": 7, "m": 18, "t": 3, "k": 3}),
    ("random-digraph", {"n": 8, "m": 20, "t": 3, "k": 2}),
    ("random-digraph", {"n": 7, "m": 12, "t": 3, "k": 2, "directed": False, "connected": True}),
    ("random-digraph", {"n": 8, "m": 14, "t": 3, "k": 3, "directed": False, "connected": True}),
    ("random-digraph", {"n": 18, "m": 60, "t": 5, "k": 4}),
    ("random-digraph", {"n": 20, "m": 55, "t": 6, "k": 4, "directed": False, "connected": True}),
]

_QUICK_ROWS = _DESK_ROWS[:3]

SUITES = {"desk": _DESK_ROWS, "quick": _QUICK_ROWS}

BENCH_COLUMNS = [
    "suite", "row", "model", "params", "directed", "n", "t", "k", "seed",
    "best_B", "best_D", "solver_poise", "oracle_poise", "ratio", "rounds",
]


def bench_rows(suite: str, seed: int, with_timing: bool = False) -> list[dict[str, Any]]:
    """Deterministic benchmark rows: sweep each suite instance, compare with
    the exact oracle where it fits, and schedule the best tree."""
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(sorted(SUITES))}")
    rows = []
    for idx, (model, base) in enumerate(SUITES[suite]):
        params = dict(base)
        params["seed"] = seed * 1000 + idx
        try:
            instance = generate_instance(model, params)
        except GenerationError as exc:
            raise GenerationError(f"suite row {idx} ({model}): {exc}") from exc
        started = time.perf_counter()
        report, tree = run_sweep(instance)
        elapsed = (time.perf_counter() - started) * 1000.0
        row: dict[str, Any] = {
            "suite": suite,
            "row": idx,
            "model": model,
            "params": ";".join(f"{k}={base[k]}" for k in sorted(base)),
            "directed": int(instance.graph.directed),
            "n": instance.graph.n,
            "t": len(instance.terminals),
            "k": instance.k,
            "seed": params["seed"],
        }
        if report.best is None:
            row.update(best_B="", best_D="", solver_poise="", oracle_poise="", ratio="", rounds="")
        else:
            row["best_B"] = report.best["B"]
            row["best_D"] = report.best["D"]
            row["solver_poise"] = report.best["poise"]
            if instance.graph.n <= DEFAULT_LIMIT_N:
                optimum = exact_min_poise_ktree(instance)
                row["oracle_poise"] = optimum.poise_star
                row["ratio"] = f"{report.best['poise'] / optimum.poise_star:.4f}"
            else:
                row["oracle_poise"] = ""
                row["ratio"] = ""
            assert tree is not None
            row["rounds"] = len(tree_broadcast_schedule(tree).rounds)
        if with_timing:
            row["time_ms"] = f"{elapsed:.1f}"
        rows.append(row)
    return rows
