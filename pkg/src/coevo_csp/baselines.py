"""Comparison weight learners: randomized restarts (RNDI) and weighted hill climbing."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ContractError, CspInstance
from .search import Heuristic, Outcome, SearchLimits, initial_weights, mac_search

RNDI_RESTART_PRESETS = (5, 25, 50, 100, 150, 500)
HC_ITERATION_PRESETS = (5, 10, 25, 50, 100, 500)


@dataclass(frozen=True)
class RndiParams:
    restarts: int = 5
    node_cap_factor: int = 10
    final_heuristic: Heuristic = Heuristic.WDEG
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise ContractError("restarts must be at least 1")
        if self.node_cap_factor < 1:
            raise ContractError("node_cap_factor must be at least 1")
        object.__setattr__(self, "final_heuristic", Heuristic(self.final_heuristic))


@dataclass(frozen=True)
class HcParams:
    iterations_total: int = 50
    cutoff: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.iterations_total < 1 or self.cutoff < 1:
            raise ContractError("iterations_total and cutoff must be at least 1")


def rndi_learn(inst: CspInstance, p: RndiParams, probe_log: list | None = None) -> list:
    """Accumulate wipeout weights over R-1 node-capped random-order probes.

    Each probe's ``SearchStats`` is appended to ``probe_log`` when given.
    Probing stops early once a probe decides the instance.
    """
    weights = initial_weights(inst)
    limits = SearchLimits(node_cap=p.node_cap_factor * max(inst.n, 1))
    for probe in range(p.restarts - 1):
        stats = mac_search(inst, Heuristic.RANDOM, weights, limits, rng_seed=p.seed + probe)
        if probe_log is not None:
            probe_log.append(stats)
        if stats.outcome in (Outcome.SAT, Outcome.UNSAT):
            break
    return weights


class _Landscape:
    """Weighted violation bookkeeping for one assignment (value positions)."""

    def __init__(self, inst, weights, pos):
        self.inst = inst
        self.weights = weights
        self.pos = pos

    def violated(self, cid) -> bool:
        x, y = self.inst.constraints[cid].scope
        return not self.inst.allowed[cid][self.pos[x]][self.pos[y]]

    def violated_set(self) -> list:
        return [c.id for c in self.inst.constraints if self.violated(c.id)]

    def cost_if(self, v, k) -> float:
        """Weighted violation of v's constraints with v moved to position k."""
        total = 0
        inst, pos = self.inst, self.pos
        for cid, u in inst.adjacency[v]:
            x = inst.constraints[cid].scope[0]
            ok = inst.allowed[cid][k][pos[u]] if x == v else inst.allowed[cid][pos[u]][k]
            if not ok:
                total += self.weights[cid]
        return total

    def best_value(self, v):
        costs = [self.cost_if(v, k) for k in range(len(self.inst.domains[v]))]
        best = min(costs)
        return costs.index(best), best


def hc_learn(inst: CspInstance, p: HcParams, event_log: list | None = None) -> list:
    """Weights from restarted min-conflicts climbs with a per-climb cutoff.

    Every climbing iteration, including the one that detects a local minimum,
    consumes one unit of ``iterations_total``. At a local minimum or after
    ``cutoff`` moves the weights of the currently violated constraints go up
    by one and a new climb starts from a random assignment. ``event_log``
    receives ``(climb, reason, violated ids)`` per increment.
    """
    rng = np.random.default_rng(p.seed)
    weights = initial_weights(inst)
    sizes = [len(d) for d in inst.domains]
    used = 0
    climb = 0
    while used < p.iterations_total:
        pos = [int(rng.integers(s)) for s in sizes]
        land = _Landscape(inst, weights, pos)
        moves = 0
        while True:
            violated = land.violated_set()
            if not violated:
                return weights
            if used >= p.iterations_total:
                return weights
            used += 1
            conflicted = sorted({v for cid in violated for v in inst.constraints[cid].scope})
            improving = any(
                land.best_value(v)[1] < land.cost_if(v, pos[v]) for v in conflicted)
            if not improving:
                reason = "local_minimum"
            else:
                v = conflicted[int(rng.integers(len(conflicted)))]
                pos[v] = land.best_value(v)[0]
                moves += 1
                if moves < p.cutoff:
                    continue
                violated = land.violated_set()
                if not violated:
                    return weights
                reason = "cutoff"
            for cid in violated:
                weights[cid] += 1
            if event_log is not None:
                event_log.append((climb, reason, tuple(violated)))
            climb += 1
            break
    return weights
