"""Competitive coevolution of candidate solutions against constraints.

Solutions evolve; constraints never change. Each solution-vs-constraint
encounter scores +1 to the winner and -1 to the loser, and each side keeps a
bounded history of its last scores. After the run the constraint fitness is
shifted to a floor of 1 and used as a constraint weight vector.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .core import ContractError, CspInstance


@dataclass(frozen=True)
class CoevoParams:
    pop_size: int = 50
    history_len: int = 10
    encounters_per_gen: int = 20
    crossover_rate: float = 0.9
    mutation_rate: float = 0.01
    ranking_bias: float = 2.0
    tournament_size: int = 2
    generations: int = 15
    seed: int = 0

    def __post_init__(self):
        for name in ("pop_size", "history_len", "tournament_size"):
            if getattr(self, name) < 1:
                raise ContractError(f"{name} must be at least 1")
        for name in ("encounters_per_gen", "generations"):
            if getattr(self, name) < 0:
                raise ContractError(f"{name} must be non-negative")
        for name in ("crossover_rate", "mutation_rate"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ContractError(f"{name} must lie in [0, 1]")
        if not 1.0 <= self.ranking_bias <= 2.0:
            raise ContractError("ranking_bias must lie in [1, 2]")


class EncounterHistory:
    """Ring buffer of the last ``capacity`` encounter scores."""

    __slots__ = ("scores",)

    def __init__(self, capacity: int, scores=()):
        self.scores = deque(scores, maxlen=capacity)

    @property
    def capacity(self) -> int:
        return self.scores.maxlen

    @property
    def fitness(self) -> int:
        return sum(self.scores)

    def record(self, score: int) -> None:
        if score not in (1, -1):
            raise ContractError(f"encounter score must be +1 or -1, got {score}")
        self.scores.append(score)

    def copy(self) -> "EncounterHistory":
        return EncounterHistory(self.capacity, self.scores)

    def __len__(self):
        return len(self.scores)

    def __repr__(self):
        return f"EncounterHistory({list(self.scores)}, capacity={self.capacity})"


def field_widths(inst: CspInstance) -> list:
    return [max(1, math.ceil(math.log2(len(d)))) for d in inst.domains]


def chromosome_length(inst: CspInstance) -> int:
    return sum(field_widths(inst))


def decode(bits, inst: CspInstance) -> dict:
    """Read each variable's bit field (most significant bit first) modulo its domain size."""
    bits = np.asarray(bits)
    widths = field_widths(inst)
    if bits.ndim != 1 or len(bits) != sum(widths):
        raise ContractError(
            f"chromosome of length {bits.size} does not match layout of length {sum(widths)}")
    out = {}
    pos = 0
    for v, w in enumerate(widths):
        k = 0
        for b in bits[pos:pos + w]:
            k = (k << 1) | int(b)
        pos += w
        dom = inst.domains[v]
        out[v] = dom[k % len(dom)]
    return out


@dataclass
class SolutionIndividual:
    bits: np.ndarray
    history: EncounterHistory
    assignment: dict = field(default=None, repr=False)

    @property
    def fitness(self) -> int:
        return self.history.fitness


def make_individual(bits, inst: CspInstance, history_len: int) -> SolutionIndividual:
    bits = np.asarray(bits, dtype=np.uint8)
    return SolutionIndividual(bits, EncounterHistory(history_len), decode(bits, inst))


def encounter(sol: SolutionIndividual, c, inst: CspInstance, cons_history: EncounterHistory):
    """Play one encounter and record it on both sides. Returns (sol_score, cons_score)."""
    if isinstance(c, int):
        c = inst.constraints[c]
    a = sol.assignment if sol.assignment is not None else decode(sol.bits, inst)
    x, y = c.scope
    ok = inst.allowed[c.id][inst.value_index(x, a[x])][inst.value_index(y, a[y])]
    scores = (1, -1) if ok else (-1, 1)
    sol.history.record(scores[0])
    cons_history.record(scores[1])
    return scores


def tournament_select(pop, k: int, rng) -> int:
    """Index of the fittest of ``k`` uniform draws (with replacement); ties at random."""
    if not pop:
        raise ContractError("tournament over an empty population")
    draws = rng.integers(len(pop), size=k)
    fits = [pop[i].fitness for i in draws]
    top = max(fits)
    tied = [int(i) for i, f in zip(draws, fits) if f == top]
    if len(tied) == 1:
        return tied[0]
    return tied[int(rng.integers(len(tied)))]


def ranking_probabilities(n: int, bias: float) -> np.ndarray:
    """Selection probability by rank, rank 1 (worst) first."""
    if n == 1:
        return np.ones(1)
    r = np.arange(1, n + 1)
    return (2.0 - bias) / n + 2.0 * (r - 1) * (bias - 1.0) / (n * (n - 1))


def linear_ranking_select(histories, bias: float, rng) -> int:
    """Constraint id drawn with probability linear in its fitness rank."""
    n = len(histories)
    if n == 0:
        raise ContractError("no constraints to select from")
    if n == 1:
        return 0
    order = sorted(range(n), key=lambda c: (histories[c].fitness, c))
    cdf = np.cumsum(ranking_probabilities(n, bias))
    rank = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    return order[min(rank, n - 1)]


def one_point_crossover(a, b, rate: float, rng, cut: int | None = None) -> np.ndarray:
    """One child: ``a``'s prefix joined to ``b``'s suffix at a uniform cut in [1, L-1]."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ContractError("parents have different chromosome layouts")
    if len(a) < 2 or rng.random() >= rate:
        return a.copy()
    if cut is None:
        cut = int(rng.integers(1, len(a)))
    return np.concatenate([a[:cut], b[cut:]])


def bit_mutation(bits, rate: float, rng) -> np.ndarray:
    bits = np.asarray(bits)
    flips = rng.random(len(bits)) < rate
    return np.where(flips, 1 - bits, bits).astype(bits.dtype)


@dataclass
class CoevoState:
    solutions: list
    constraint_histories: list
    generation: int = 0


def init_state(inst: CspInstance, params: CoevoParams, rng) -> CoevoState:
    length = chromosome_length(inst)
    bits = rng.integers(0, 2, size=(params.pop_size, length), dtype=np.uint8)
    sols = [make_individual(row, inst, params.history_len) for row in bits]
    hists = [EncounterHistory(params.history_len) for _ in range(inst.m)]
    return CoevoState(sols, hists)


def run_generation(state: CoevoState, params: CoevoParams, inst: CspInstance, rng) -> CoevoState:
    """One steady-state generation: encounters, then a single offspring replaces the worst."""
    sols = state.solutions
    hists = state.constraint_histories
    if hists:
        for _ in range(params.encounters_per_gen):
            s = tournament_select(sols, params.tournament_size, rng)
            c = linear_ranking_select(hists, params.ranking_bias, rng)
            encounter(sols[s], c, inst, hists[c])

    p1 = sols[tournament_select(sols, params.tournament_size, rng)]
    p2 = sols[tournament_select(sols, params.tournament_size, rng)]
    child_bits = one_point_crossover(p1.bits, p2.bits, params.crossover_rate, rng)
    child_bits = bit_mutation(child_bits, params.mutation_rate, rng)
    child = make_individual(child_bits, inst, params.history_len)
    if hists:
        for _ in range(params.history_len):
            c = linear_ranking_select(hists, params.ranking_bias, rng)
            encounter(child, c, inst, hists[c])

    fits = [s.fitness for s in sols]
    worst = fits.index(min(fits))
    sols[worst] = child
    state.generation += 1
    return state


def fitness_to_weights(fitness) -> list:
    """Order-preserving shift so the smallest weight is exactly 1."""
    fitness = list(fitness)
    if not fitness:
        return []
    low = min(fitness)
    return [f - low + 1 for f in fitness]


def learn_weights(inst: CspInstance, params: CoevoParams | None = None, *, trace=None) -> list:
    """Run the coevolution and return one weight per constraint.

    If ``trace`` is a list, the state after each generation is summarised into
    it as ``(generation, solution fitnesses, constraint fitnesses)``.
    """
    params = params or CoevoParams()
    rng = np.random.default_rng(params.seed)
    state = init_state(inst, params, rng)
    for _ in range(params.generations):
        run_generation(state, params, inst, rng)
        if trace is not None:
            trace.append((
                state.generation,
                [s.fitness for s in state.solutions],
                [h.fitness for h in state.constraint_histories],
            ))
    return fitness_to_weights(h.fitness for h in state.constraint_histories)
