"""Binary CSP data model: domains, extensional relations, constraints, instances."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

SUPPORTS = "supports"
CONFLICTS = "conflicts"


class ContractError(ValueError):
    """Raised when an operation is called outside its precondition."""


@dataclass(frozen=True)
class Relation:
    semantics: str
    tuples: frozenset

    def __post_init__(self):
        if self.semantics not in (SUPPORTS, CONFLICTS):
            raise ContractError(f"unknown relation semantics {self.semantics!r}")
        object.__setattr__(self, "tuples", frozenset(tuple(t) for t in self.tuples))
        for t in self.tuples:
            if len(t) != 2:
                raise ContractError(f"relation tuple {t!r} is not a pair")

    def allows(self, a: int, b: int) -> bool:
        return ((a, b) in self.tuples) == (self.semantics == SUPPORTS)

    def complement(self, dom_x: Iterable[int], dom_y: Iterable[int]) -> "Relation":
        """The same relation expressed with the opposite semantics."""
        pairs = {(a, b) for a in dom_x for b in dom_y}
        other = CONFLICTS if self.semantics == SUPPORTS else SUPPORTS
        return Relation(other, frozenset(pairs - self.tuples))


@dataclass(frozen=True)
class Constraint:
    id: int
    scope: tuple
    relation: Relation

    def other(self, v: int) -> int:
        x, y = self.scope
        if v == x:
            return y
        if v == y:
            return x
        raise ContractError(f"variable {v} is not in the scope of constraint {self.id}")


@dataclass(frozen=True, eq=False)
class CspInstance:
    """An immutable binary extensional CSP.

    ``domains[v]`` is the ascending tuple of values of variable ``v``.
    ``adjacency[v]`` lists ``(constraint id, neighbour)`` pairs in constraint
    order. For every constraint ``allowed[c]`` is a boolean table indexed by
    domain *positions* ``allowed[c][i][j]`` for scope ``(x, y)``.
    """

    name: str
    domains: tuple
    constraints: tuple
    adjacency: tuple = field(init=False, repr=False)
    allowed: tuple = field(init=False, repr=False)
    _index: tuple = field(init=False, repr=False)

    def __post_init__(self):
        doms = []
        for v, dom in enumerate(self.domains):
            vals = tuple(sorted(set(int(x) for x in dom)))
            if not vals:
                raise ContractError(f"variable {v} has an empty domain")
            if len(vals) != len(tuple(dom)):
                raise ContractError(f"variable {v} has duplicate domain values")
            doms.append(vals)
        object.__setattr__(self, "domains", tuple(doms))
        n = len(doms)
        index = tuple({val: i for i, val in enumerate(dom)} for dom in doms)
        object.__setattr__(self, "_index", index)

        cons = tuple(self.constraints)
        seen_pairs = set()
        adjacency = [[] for _ in range(n)]
        allowed = []
        for cid, c in enumerate(cons):
            if c.id != cid:
                raise ContractError(f"constraint at position {cid} has id {c.id}")
            if len(c.scope) != 2:
                raise ContractError(f"constraint {cid} is not binary")
            x, y = c.scope
            if not (0 <= x < n and 0 <= y < n):
                raise ContractError(f"constraint {cid} scope {c.scope} out of range")
            if x == y:
                raise ContractError(f"constraint {cid} has a repeated scope variable")
            pair = (min(x, y), max(x, y))
            if pair in seen_pairs:
                raise ContractError(f"second constraint on variable pair {pair}")
            seen_pairs.add(pair)
            for a, b in c.relation.tuples:
                if a not in index[x] or b not in index[y]:
                    raise ContractError(
                        f"constraint {cid} tuple {(a, b)} lies outside the scope domains"
                    )
            allowed.append(tuple(
                tuple(c.relation.allows(a, b) for b in doms[y]) for a in doms[x]
            ))
            adjacency[x].append((cid, y))
            adjacency[y].append((cid, x))
        object.__setattr__(self, "constraints", cons)
        object.__setattr__(self, "adjacency", tuple(tuple(a) for a in adjacency))
        object.__setattr__(self, "allowed", tuple(allowed))

    @property
    def n(self) -> int:
        return len(self.domains)

    @property
    def m(self) -> int:
        return len(self.constraints)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def value_index(self, v: int, value: int) -> int:
        try:
            return self._index[v][value]
        except KeyError:
            raise ContractError(f"value {value} not in domain of variable {v}") from None

    def arcs(self):
        """All directed arcs ``(x, c, y)``: revise x against y through c."""
        for c in self.constraints:
            x, y = c.scope
            yield (x, c.id, y)
            yield (y, c.id, x)

    def __eq__(self, other):
        if not isinstance(other, CspInstance):
            return NotImplemented
        return (self.name, self.domains, self.constraints) == (
            other.name, other.domains, other.constraints)

    def __hash__(self):
        return hash((self.name, self.domains, self.constraints))


def make_instance(name, domains, constraints) -> CspInstance:
    """Build an instance from ``(x, y, semantics, tuples)`` specs."""
    cons = [
        Constraint(i, (x, y), Relation(sem, frozenset(map(tuple, tuples))))
        for i, (x, y, sem, tuples) in enumerate(constraints)
    ]
    return CspInstance(name, tuple(tuple(d) for d in domains), tuple(cons))


def build_adjacency(n: int, constraints) -> tuple:
    """Rebuild the per-variable incidence lists from a constraint list."""
    adj = [[] for _ in range(n)]
    for c in constraints:
        x, y = c.scope
        adj[x].append((c.id, y))
        adj[y].append((c.id, x))
    return tuple(tuple(a) for a in adj)


def check(inst: CspInstance, c: Constraint | int, x_val: int, y_val: int) -> bool:
    """True iff ``(x_val, y_val)`` is allowed by constraint ``c`` in scope order."""
    if isinstance(c, int):
        c = inst.constraints[c]
    x, y = c.scope
    i = inst.value_index(x, x_val)
    j = inst.value_index(y, y_val)
    return inst.allowed[c.id][i][j]


def _total(inst: CspInstance, a: Mapping[int, int]) -> Mapping[int, int]:
    missing = [v for v in range(inst.n) if v not in a]
    if missing:
        raise ContractError(f"assignment is partial; unbound variables {missing[:5]}")
    return a


def violated_constraints(inst: CspInstance, a: Mapping[int, int]) -> set:
    a = _total(inst, a)
    return {
        c.id for c in inst.constraints
        if not check(inst, c, a[c.scope[0]], a[c.scope[1]])
    }


def is_solution(inst: CspInstance, a: Mapping[int, int]) -> bool:
    return not violated_constraints(inst, a)
