import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import ac_closure, brute_force_sat

from coevo_csp import (ContractError, DomainStore, Heuristic, ModelDParams, Outcome,
                       SearchLimits, ac3, gen_model_d, initial_weights, is_solution,
                       mac_search, make_instance, revise, select_variable,
                       static_order_by_wdeg)

NEQ = lambda d: [(v, v) for v in range(d)]  # noqa: E731


def pair(dx, dy):
    return make_instance("pair", [dx, dy], [(0, 1, "conflicts", [(1, 1), (2, 2)])])


@pytest.mark.parametrize("dx, dy, removed, wipeout", [
    ([1, 2], [2], [2], False),
    ([1], [1, 2], [], False),
    ([1], [1], [1], True),
])
def test_revise_examples(dx, dy, removed, wipeout):
    inst = pair([1, 2], [1, 2])
    store = DomainStore.from_domains(inst, [dx, dy])
    res = revise(inst, (0, 0, 1), store)
    assert res.removed == removed
    assert res.revised == bool(removed)
    assert res.wipeout == wipeout


def test_revise_rejects_foreign_arc():
    inst = make_instance("x", [[0, 1]] * 3, [(0, 1, "conflicts", [])])
    with pytest.raises(ContractError):
        revise(inst, (0, 0, 2), DomainStore(inst))


def test_ac3_empty_relation_wipes_out():
    inst = make_instance("e", [[0, 1]] * 2, [(0, 1, "supports", [])])
    w = initial_weights(inst)
    res = ac3(inst, DomainStore(inst), w, list(inst.arcs()))
    assert (res.consistent, res.culprit) == (False, 0)
    assert w == [2]


def test_ac3_chain_alternates():
    inst = make_instance("chain", [[0, 1]] * 3,
                         [(0, 1, "conflicts", NEQ(2)), (1, 2, "conflicts", NEQ(2))])
    store = DomainStore.from_domains(inst, [[0], [0, 1], [0, 1]])
    res = ac3(inst, store, initial_weights(inst), list(inst.arcs()))
    assert res.consistent
    assert store.domains() == [[0], [1], [0]]


def test_ac3_triangle_is_arc_consistent_but_unsat(triangle2):
    store = DomainStore(triangle2)
    res = ac3(triangle2, store, initial_weights(triangle2), list(triangle2.arcs()))
    assert res.consistent
    assert store.domains() == [[0, 1]] * 3 == ac_closure(triangle2)
    assert not brute_force_sat(triangle2)


def test_mac_triangle_examples(triangle2, triangle3):
    s = mac_search(triangle3, Heuristic.LEX)
    assert s.outcome is Outcome.SAT and is_solution(triangle3, s.solution)
    w = initial_weights(triangle2)
    s = mac_search(triangle2, Heuristic.LEX, w)
    assert s.outcome is Outcome.UNSAT
    assert sum(x - 1 for x in w) == s.wipeouts
    # v0=0 and v0=1 each propagate into a wipeout
    assert (s.nodes, s.wipeouts) == (2, 2)


def test_node_cap_binds_at_first_node(triangle2):
    s = mac_search(triangle2, "lex", limits=SearchLimits(node_cap=1))
    assert (s.outcome, s.nodes) == (Outcome.NODE_LIMIT, 1)


def test_limits_must_be_positive():
    with pytest.raises(ContractError):
        SearchLimits(node_cap=0)
    with pytest.raises(ContractError):
        SearchLimits(timeout_secs=-1)


def test_timeout_is_an_outcome():
    inst = gen_model_d(ModelDParams(30, 8, 140, 0.35, 2))
    s = mac_search(inst, "lex", limits=SearchLimits(timeout_secs=1e-4))
    assert s.outcome is Outcome.TIMEOUT


def star():
    # v0 in the middle of v1, v2; v3 hangs off v2
    return make_instance("star", [[0, 1, 2, 3]] * 4,
                         [(0, 1, "conflicts", []), (0, 2, "conflicts", []),
                          (2, 3, "conflicts", [])])


def test_select_lex_dom_deg_ddeg():
    inst = star()
    store = DomainStore.from_domains(inst, [[0, 1, 2], [0], [0, 1, 2, 3], [0, 1]])
    w = initial_weights(inst)
    free = [False] * 4
    assert select_variable("lex", inst, store, w, free) == 0
    assert select_variable("dom", inst, store, w, free) == 1
    assert select_variable("deg", inst, store, w, free) == 0  # tie with v2 -> smallest
    assert select_variable("ddeg", inst, store, w, [True, False, False, False]) == 2
    # equal weights: wdeg reduces to ddeg
    assert select_variable("wdeg", inst, store, w, [True, False, False, False]) == 2


def test_select_wdeg_tie_smallest_index():
    inst = make_instance("p", [[0, 1]] * 3, [(0, 1, "conflicts", []), (1, 2, "conflicts", [])])
    store = DomainStore(inst)
    # dynamic wdeg of v1 and v2 through the one constraint between them: 9 each
    assert select_variable("wdeg", inst, store, [5, 9], [True, False, False]) == 1


def test_select_dom_wdeg_ratio():
    # v0: dom 2, wdeg 1+3 = 4 (ratio 0.5); v1: dom 4, wdeg 1+15 = 16 (ratio 0.25)
    # v2: dom 4, wdeg 3 (1.33); v3: dom 4, wdeg 15 (0.267)
    inst = make_instance("q", [[0, 1], [0, 1, 2, 3], [0, 1, 2, 3], [0, 1, 2, 3]],
                         [(0, 1, "conflicts", []), (0, 2, "conflicts", []),
                          (1, 3, "conflicts", [])])
    store = DomainStore(inst)
    assert select_variable("dom_wdeg", inst, store, [1, 3, 15], [False] * 4) == 1


def test_select_random_uses_rng_and_all_assigned_is_error():
    inst = star()
    store = DomainStore(inst)
    picks = {select_variable("random", inst, store, initial_weights(inst), [False] * 4,
                             np.random.default_rng(s)) for s in range(40)}
    assert picks == {0, 1, 2, 3}
    with pytest.raises(ContractError):
        select_variable("lex", inst, store, initial_weights(inst), [True] * 4)


def test_static_order_by_wdeg():
    inst = make_instance("p", [[0, 1]] * 3, [(0, 1, "conflicts", []), (1, 2, "conflicts", [])])
    assert static_order_by_wdeg(inst, [10, 1]) == [1, 0, 2]
    assert static_order_by_wdeg(star(), [1, 1, 1]) == [0, 2, 1, 3]
    assert static_order_by_wdeg(make_instance("s", [[0]], []), []) == [0]


def test_trail_restores_root_domains():
    inst = gen_model_d(ModelDParams(8, 4, 14, 0.3, 5))
    store = DomainStore(inst)
    root = store.domains()
    w = initial_weights(inst)
    for v in range(4):
        level = store.push_level()
        store.assign(v, 0)
        ac3(inst, store, w, [(z, c, v) for c, z in inst.adjacency[v]])
        assert level == v + 1
    store.undo_to(1)
    assert store.domains() == root and store.level == 0


small_instances = st.builds(
    lambda n, d, frac, t, seed: gen_model_d(
        ModelDParams(n, d, max(1, round(frac * n * (n - 1) / 2)), t, seed)),
    st.integers(2, 7), st.integers(2, 4), st.floats(0.1, 1),
    st.sampled_from([0.1, 0.25, 0.4, 0.6]), st.integers(0, 10**6))


@settings(max_examples=40, deadline=None)
@given(small_instances, st.sampled_from(list(Heuristic)), st.integers(0, 100))
def test_mac_matches_brute_force(inst, h, seed):
    w = initial_weights(inst)
    s = mac_search(inst, h, w, rng_seed=seed)
    assert (s.outcome is Outcome.SAT) == brute_force_sat(inst)
    if s.outcome is Outcome.SAT:
        assert is_solution(inst, s.solution)
    assert sum(x - 1 for x in w) == s.wipeouts


@settings(max_examples=40, deadline=None)
@given(small_instances, st.data())
def test_ac3_equals_closure(inst, data):
    doms = [sorted(data.draw(st.sets(st.sampled_from(d), min_size=1))) for d in inst.domains]
    store = DomainStore.from_domains(inst, doms)
    res = ac3(inst, store, initial_weights(inst), list(inst.arcs()))
    expected = ac_closure(inst, doms)
    assert res.consistent == (expected is not None)
    if expected is not None:
        assert store.domains() == expected


@settings(max_examples=40, deadline=None)
@given(small_instances, st.integers(2, 50), st.data())
def test_weight_scaling_keeps_choices(inst, k, data):
    w = [data.draw(st.integers(1, 20)) for _ in range(inst.m)]
    assigned = [data.draw(st.booleans()) for _ in range(inst.n)]
    if all(assigned):
        assigned[0] = False
    store = DomainStore(inst)
    for kind in ("wdeg", "dom_wdeg"):
        assert select_variable(kind, inst, store, w, assigned) == \
            select_variable(kind, inst, store, [k * x for x in w], assigned)


@pytest.mark.parametrize("h", list(Heuristic))
def test_search_is_deterministic(h):
    inst = gen_model_d(ModelDParams(20, 6, 60, 0.35, 3))
    a = mac_search(inst, h, rng_seed=4)
    b = mac_search(inst, h, rng_seed=4)
    assert a.same_run(b)


def test_all_eight_heuristics_exhaustive_tiny():
    for seed, h in itertools.product(range(10), Heuristic):
        inst = gen_model_d(ModelDParams(5, 3, 7, 0.4, seed))
        assert (mac_search(inst, h).outcome is Outcome.SAT) == brute_force_sat(inst)
