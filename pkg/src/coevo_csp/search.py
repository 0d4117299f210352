"""AC-3 propagation, MAC backtracking and variable-ordering heuristics.

Current domains are kept as integer bitmasks over domain positions, so a
revision is a handful of ``&`` operations per value.
"""

from __future__ import annotations

import sys
import time
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

import numpy as np

from .core import ContractError, CspInstance


class Heuristic(str, Enum):
    LEX = "lex"
    RANDOM = "random"
    DOM = "dom"
    DEG = "deg"
    DDEG = "ddeg"
    DOM_DDEG = "dom_ddeg"
    WDEG = "wdeg"
    DOM_WDEG = "dom_wdeg"


class Outcome(str, Enum):
    SAT = "sat"
    UNSAT = "unsat"
    TIMEOUT = "timeout"
    NODE_LIMIT = "node_limit"


def initial_weights(inst: CspInstance) -> list:
    return [1] * inst.m


@dataclass(frozen=True)
class SearchLimits:
    node_cap: int | None = None
    timeout_secs: float | None = None

    def __post_init__(self):
        if self.node_cap is not None and self.node_cap <= 0:
            raise ContractError("node_cap must be positive")
        if self.timeout_secs is not None and self.timeout_secs <= 0:
            raise ContractError("timeout_secs must be positive")


@dataclass
class SearchStats:
    outcome: Outcome
    nodes: int = 0
    wipeouts: int = 0
    elapsed: float = 0.0
    solution: dict | None = None

    def same_run(self, other: "SearchStats") -> bool:
        """Equality ignoring wall-clock time."""
        return (self.outcome, self.nodes, self.wipeouts, self.solution) == (
            other.outcome, other.nodes, other.wipeouts, other.solution)


class Revision(NamedTuple):
    revised: bool
    wipeout: bool
    removed: list


class AC3Result(NamedTuple):
    consistent: bool
    culprit: int | None


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _bits(mask: int):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


@dataclass
class DomainStore:
    """Current domains with a trail of removals for chronological undo."""

    inst: CspInstance
    masks: list = field(default_factory=list)
    trail: list = field(default_factory=list)
    level: int = 0

    def __post_init__(self):
        if not self.masks:
            self.masks = [(1 << len(d)) - 1 for d in self.inst.domains]

    @classmethod
    def from_domains(cls, inst: CspInstance, domains) -> "DomainStore":
        """A store whose current domains are the given subsets of the originals."""
        masks = []
        for v, values in enumerate(domains):
            m = 0
            for val in values:
                m |= 1 << inst.value_index(v, val)
            masks.append(m)
        return cls(inst, masks)

    def domain(self, v: int) -> list:
        vals = self.inst.domains[v]
        return [vals[i] for i in _bits(self.masks[v])]

    def domains(self) -> list:
        return [self.domain(v) for v in range(self.inst.n)]

    def size(self, v: int) -> int:
        return _popcount(self.masks[v])

    def push_level(self) -> int:
        self.level += 1
        return self.level

    def remove_mask(self, v: int, removed: int) -> None:
        if removed:
            self.masks[v] &= ~removed
            self.trail.append((v, removed, self.level))

    def assign(self, v: int, pos: int) -> None:
        self.remove_mask(v, self.masks[v] & ~(1 << pos))

    def undo_to(self, level: int) -> None:
        """Restore the domains as they were when ``level`` was entered."""
        trail, masks = self.trail, self.masks
        while trail and trail[-1][2] >= level:
            v, removed, _ = trail.pop()
            masks[v] |= removed
        self.level = level - 1


def _support_tables(inst: CspInstance) -> dict:
    """For every arc (x, c, y): per position of x, bitmask of supporting positions of y."""
    tables = {}
    for c in inst.constraints:
        x, y = c.scope
        table = inst.allowed[c.id]
        fwd = []
        for row in table:
            m = 0
            for j, ok in enumerate(row):
                if ok:
                    m |= 1 << j
            fwd.append(m)
        bwd = []
        for j in range(len(inst.domains[y])):
            m = 0
            for i, row in enumerate(table):
                if row[j]:
                    m |= 1 << i
            bwd.append(m)
        tables[(x, c.id)] = fwd
        tables[(y, c.id)] = bwd
    return tables


_SUPPORT_CACHE: dict = {}


def support_tables(inst: CspInstance) -> dict:
    key = id(inst)
    hit = _SUPPORT_CACHE.get(key)
    if hit is None or hit[0] is not inst:
        hit = (inst, _support_tables(inst))
        if len(_SUPPORT_CACHE) > 64:
            _SUPPORT_CACHE.clear()
        _SUPPORT_CACHE[key] = hit
    return hit[1]


def _check_arc(inst: CspInstance, arc) -> None:
    x, cid, y = arc
    if x == y or set(inst.constraints[cid].scope) != {x, y}:
        raise ContractError(f"arc {arc} does not match the scope of constraint {cid}")


def revise(inst: CspInstance, arc, store: DomainStore, tables=None) -> Revision:
    """Remove values of x that have no support in the current domain of y."""
    _check_arc(inst, arc)
    tables = tables or support_tables(inst)
    x, cid, y = arc
    sup = tables[(x, cid)]
    dy = store.masks[y]
    removed = 0
    for i in _bits(store.masks[x]):
        if not sup[i] & dy:
            removed |= 1 << i
    store.remove_mask(x, removed)
    vals = inst.domains[x]
    return Revision(bool(removed), store.masks[x] == 0, [vals[i] for i in _bits(removed)])


def ac3(inst: CspInstance, store: DomainStore, weights, seed_arcs, tables=None,
        validate: bool = True) -> AC3Result:
    """Propagate to the arc-consistent fixpoint of the seeded arcs.

    Stops at the first wipeout and charges one unit of weight to the
    constraint that caused it.
    """
    tables = tables or support_tables(inst)
    masks = store.masks
    adjacency = inst.adjacency
    queue = deque()
    queued = set()
    for arc in seed_arcs:
        if validate:
            _check_arc(inst, arc)
        if arc not in queued:
            queued.add(arc)
            queue.append(arc)
    while queue:
        arc = queue.popleft()
        queued.discard(arc)
        x, cid, y = arc
        sup = tables[(x, cid)]
        dy = masks[y]
        dx = masks[x]
        removed = 0
        rest = dx
        i = 0
        while rest:
            if rest & 1 and not sup[i] & dy:
                removed |= 1 << i
            rest >>= 1
            i += 1
        if not removed:
            continue
        store.remove_mask(x, removed)
        if masks[x] == 0:
            weights[cid] += 1
            return AC3Result(False, cid)
        for cz, z in adjacency[x]:
            if z != y:
                nxt = (z, cz, x)
                if nxt not in queued:
                    queued.add(nxt)
                    queue.append(nxt)
    return AC3Result(True, None)


def _active_sums(inst, weights, assigned, v):
    """(number, weight sum) of constraints on v with an unassigned other end."""
    count = 0
    total = 0
    for cid, u in inst.adjacency[v]:
        if not assigned[u]:
            count += 1
            total += weights[cid]
    return count, total


def select_variable(kind, inst: CspInstance, store: DomainStore, weights, assigned, rng=None) -> int:
    """Pick the next variable to branch on; ties go to the smallest index.

    ``assigned`` is a per-variable sequence of booleans.
    """
    kind = Heuristic(kind)
    free = [v for v in range(inst.n) if not assigned[v]]
    if not free:
        raise ContractError("select_variable called with every variable assigned")
    if kind is Heuristic.LEX:
        return free[0]
    if kind is Heuristic.RANDOM:
        return free[int(rng.integers(len(free)))]
    if kind is Heuristic.DOM:
        return min(free, key=store.size)
    if kind is Heuristic.DEG:
        return min(free, key=lambda v: -inst.degree(v))

    # remaining kinds all need the dynamic degree of each free variable
    best = None
    best_num = best_den = None
    for v in free:
        count, wsum = _active_sums(inst, weights, assigned, v)
        if kind is Heuristic.DDEG:
            num, den = count, 1
            better = best is None or num > best_num
        elif kind is Heuristic.WDEG:
            num, den = wsum, 1
            better = best is None or num > best_num
        else:
            # minimise dom / deg by cross-multiplication; deg 0 acts as +inf
            num = store.size(v)
            den = count if kind is Heuristic.DOM_DDEG else wsum
            better = best is None or num * best_den < best_num * den
        if better:
            best, best_num, best_den = v, num, den
    return best


def static_order_by_wdeg(inst: CspInstance, weights) -> list:
    wdeg = [sum(weights[cid] for cid, _ in inst.adjacency[v]) for v in range(inst.n)]
    return sorted(range(inst.n), key=lambda v: (-wdeg[v], v))


class _Stop(Exception):
    def __init__(self, outcome):
        self.outcome = outcome


def mac_search(
    inst: CspInstance,
    heuristic=Heuristic.DOM_WDEG,
    weights=None,
    limits: SearchLimits | None = None,
    rng_seed: int = 0,
) -> SearchStats:
    """Backtracking search maintaining arc consistency after every assignment.

    ``weights`` is updated in place (one unit per wipeout). A node is counted
    per value assignment. Values are tried in ascending order.
    """
    heuristic = Heuristic(heuristic)
    limits = limits or SearchLimits()
    if weights is None:
        weights = initial_weights(inst)
    if len(weights) != inst.m:
        raise ContractError("weight vector length does not match the constraint count")
    rng = np.random.default_rng(rng_seed)
    tables = support_tables(inst)
    store = DomainStore(inst)
    assigned = [False] * inst.n
    stats = SearchStats(Outcome.UNSAT)
    start = time.perf_counter()
    deadline = start + limits.timeout_secs if limits.timeout_secs else None
    node_cap = limits.node_cap
    into = [[(z, cid, x) for cid, z in inst.adjacency[x]] for x in range(inst.n)]

    def propagate(arcs) -> bool:
        res = ac3(inst, store, weights, arcs, tables, validate=False)
        if not res.consistent:
            stats.wipeouts += 1
        return res.consistent

    def dfs(depth: int) -> bool:
        if depth == inst.n:
            return True
        x = select_variable(heuristic, inst, store, weights, assigned, rng)
        assigned[x] = True
        for pos in list(_bits(store.masks[x])):
            if node_cap is not None and stats.nodes >= node_cap:
                raise _Stop(Outcome.NODE_LIMIT)
            if deadline is not None and time.perf_counter() >= deadline:
                raise _Stop(Outcome.TIMEOUT)
            stats.nodes += 1
            level = store.push_level()
            store.assign(x, pos)
            if propagate(into[x]) and dfs(depth + 1):
                return True
            store.undo_to(level)
        assigned[x] = False
        return False

    if sys.getrecursionlimit() < inst.n + 200:
        sys.setrecursionlimit(inst.n + 200)
    try:
        if propagate(list(inst.arcs())) and dfs(0):
            stats.outcome = Outcome.SAT
            stats.solution = {v: store.domain(v)[0] for v in range(inst.n)}
        else:
            stats.outcome = Outcome.UNSAT
    except _Stop as stop:
        stats.outcome = stop.outcome
    stats.elapsed = time.perf_counter() - start
    return stats
