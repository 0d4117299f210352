"""
Binary CSPs and MAC search
==========================

Build a small instance by hand, propagate it with AC-3 and solve it with
every variable-ordering heuristic.
"""

from coevo_csp import (DomainStore, Heuristic, ac3, initial_weights, is_solution,
                       mac_search, make_instance)

# %%
# Three variables that must be pairwise different. With two colours this is
# unsatisfiable, yet arc consistency alone cannot tell.
neq = [(0, 0), (1, 1)]
triangle = make_instance("triangle", [[0, 1]] * 3,
                         [(0, 1, "conflicts", neq), (1, 2, "conflicts", neq),
                          (0, 2, "conflicts", neq)])

store = DomainStore(triangle)
print(ac3(triangle, store, initial_weights(triangle), list(triangle.arcs())))
print("domains after AC-3:", store.domains())

# %%
# Search has to branch to find the contradiction. Each failed branch is a
# domain wipeout and adds one unit of weight to the constraint responsible.
weights = initial_weights(triangle)
stats = mac_search(triangle, Heuristic.LEX, weights)
print(stats.outcome.value, "nodes:", stats.nodes, "weights:", weights)

# %%
# With a third colour every heuristic finds a solution.
neq3 = [(v, v) for v in range(3)]
colourable = make_instance("triangle3", [[0, 1, 2]] * 3,
                           [(0, 1, "conflicts", neq3), (1, 2, "conflicts", neq3),
                            (0, 2, "conflicts", neq3)])
for h in Heuristic:
    s = mac_search(colourable, h, rng_seed=1)
    print(f"{h.value:>9}: {s.outcome.value} {s.solution} valid={is_solution(colourable, s.solution)}")
