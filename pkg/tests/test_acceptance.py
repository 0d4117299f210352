"""Exit criteria. Each test records one PASS/FAIL line, shown in the terminal summary."""

import csv
import json
import random
import statistics
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from oracles import ac_closure, bottleneck_instance, brute_force_sat

from coevo_csp import (CoevoParams, DomainStore, Heuristic, ModelDParams, ModelRbParams,
                       Outcome, RndiParams, SearchLimits, ac3, gen_model_d, gen_model_rb,
                       initial_weights, is_solution, learn_weights, mac_search, rndi_learn)
from coevo_csp.cli import main
from coevo_csp.stats import mann_whitney_u, vargha_delaney_a

pytestmark = pytest.mark.acceptance

SUITE8 = [ModelDParams(30, 8, 140, 0.35, seed) for seed in range(25)]


def report(num, title, ok, detail):
    key = (int(str(num).rstrip("abc")), str(num))
    line = f"[{'PASS' if ok else 'FAIL'}] {str(num):>2}. {title}: {detail}"
    ACCEPTANCE_LINES.append((key, line))
    assert ok, detail


def small_instance(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 8)
    d = rng.randint(2, 4)
    e = rng.randint(1, n * (n - 1) // 2)
    t = rng.choice([0.1, 0.2, 0.3, 0.4, 0.5, 0.6])
    return gen_model_d(ModelDParams(n, d, e, t, seed))


# wipeout bookkeeping shared by criteria 1-3
_bookkeeping = {"searches": 0, "bad": 0}


def _audit(inst, h, seed):
    w = initial_weights(inst)
    s = mac_search(inst, h, w, rng_seed=seed)
    _bookkeeping["searches"] += 1
    _bookkeeping["bad"] += sum(x - 1 for x in w) != s.wipeouts
    return s


def test_01_oracle_satisfiability():
    start = time.perf_counter()
    wrong = 0
    for seed in range(200):
        inst = small_instance(seed)
        truth = brute_force_sat(inst)
        for h in Heuristic:
            s = _audit(inst, h, seed)
            wrong += (s.outcome is Outcome.SAT) != truth
            if s.outcome is Outcome.SAT:
                wrong += not is_solution(inst, s.solution)
    elapsed = time.perf_counter() - start
    report(1, "MAC agrees with brute force (200 instances x 8 heuristics)",
           wrong == 0 and elapsed < 60, f"{wrong} disagreements, {elapsed:.1f}s")


def test_02_ac3_matches_closure():
    start = time.perf_counter()
    wrong = 0
    for seed in range(200):
        inst = small_instance(1000 + seed)
        rng = random.Random(seed)
        for full in (True, False):
            doms = [list(d) if full else sorted(rng.sample(d, rng.randint(1, len(d))))
                    for d in inst.domains]
            store = DomainStore.from_domains(inst, doms)
            res = ac3(inst, store, initial_weights(inst), list(inst.arcs()))
            expected = ac_closure(inst, doms)
            if expected is None:
                wrong += res.consistent
            else:
                wrong += not res.consistent or store.domains() != expected
        _audit(inst, Heuristic.DOM_WDEG, seed)
    elapsed = time.perf_counter() - start
    report(2, "AC-3 fixpoint equals brute-force closure (200 instances)",
           wrong == 0 and elapsed < 60, f"{wrong} mismatches, {elapsed:.1f}s")


def test_03_weight_bookkeeping():
    if _bookkeeping["searches"] == 0:
        test_01_oracle_satisfiability()
    report(3, "sum(w - 1) == wipeouts on every search of suites 1-2",
           _bookkeeping["bad"] == 0,
           f"{_bookkeeping['bad']} violations over {_bookkeeping['searches']} searches")


def test_04_forced_rb():
    planted_ok = solved = 0
    for seed in range(100):
        n = 15 + seed % 16
        inst, planted = gen_model_rb(ModelRbParams(n, 0.8, 0.8, 0.6, True, seed))
        planted_ok += is_solution(inst, planted)
        s = mac_search(inst, Heuristic.DOM_WDEG, limits=SearchLimits(node_cap=10**6))
        solved += s.outcome is Outcome.SAT
    report(4, "forced Model RB: planted solution valid and MAC finds a solution",
           planted_ok == 100 and solved == 100, f"planted {planted_ok}/100, sat {solved}/100")


def test_05a_vargha_delaney():
    rng = random.Random(5)
    bad = 0
    for _ in range(1000):
        a = [rng.randint(0, 9) for _ in range(rng.randint(1, 30))]
        b = [rng.randint(0, 9) for _ in range(rng.randint(1, 30))]
        bad += vargha_delaney_a(a, b) + vargha_delaney_a(b, a) != 1
        bad += vargha_delaney_a(a, list(a)) != 0.5
    report("5a", "A(x,x) = 0.5 and A(a,b) + A(b,a) = 1 over 1000 pairs", bad == 0,
           f"{bad} violations")


def test_05b_exact_p():
    p = mann_whitney_u([1, 2, 3], [4, 5, 6]).p
    report("5b", "exact p for {1,2,3} vs {4,5,6}", p == 0.1, f"p = {p!r}")


def test_05c_exact_vs_normal():
    rng = random.Random(55)
    worst = 0.0
    failures = 0
    for _ in range(500):
        na = rng.randint(1, 15)
        nb = rng.randint(1, 16 - na)
        a = [rng.randint(0, 9) for _ in range(na)]
        b = [rng.randint(0, 9) for _ in range(nb)]
        gap = abs(mann_whitney_u(a, b, "exact").p - mann_whitney_u(a, b, "normal").p)
        worst = max(worst, gap)
        failures += gap > 0.05
    report("5c", "exact vs normal p within 0.05 (500 pairs, pooled size <= 16)",
           failures == 0, f"{failures}/500 pairs exceed 0.05, worst gap {worst:.3f}")


def test_06_coevolution_finds_bottleneck():
    start = time.perf_counter()
    wins = 0
    for seed in range(50):
        inst, empty = bottleneck_instance(np.random.default_rng(seed))
        w = learn_weights(inst, CoevoParams(generations=15, seed=seed))
        wins += w[empty] == max(w) and w.count(w[empty]) == 1
    elapsed = time.perf_counter() - start
    report(6, "empty constraint gets the strictly largest learned weight",
           wins >= 45 and elapsed < 120, f"{wins}/50 runs, {elapsed:.1f}s")


def test_07_coevolution_invariants():
    rng = random.Random(7)
    bad = 0
    for k in range(100):
        n = rng.randint(2, 12)
        inst = gen_model_d(ModelDParams(n, rng.randint(1, 6), rng.randint(1, n * (n - 1) // 2),
                                        rng.choice([0.1, 0.3, 0.5]), k))
        params = CoevoParams(pop_size=rng.randint(2, 50), history_len=10,
                             encounters_per_gen=rng.randint(0, 30),
                             generations=rng.randint(1, 15), seed=k)
        trace = []
        w = learn_weights(inst, params, trace=trace)
        bad += any(not -10 <= f <= 10 for _, s, c in trace for f in s + c)
        bad += min(w) != 1
        bad += learn_weights(inst, params) != w
    report(7, "fitness in [-10, 10], min weight 1, seeded determinism (100 configs)",
           bad == 0, f"{bad} violations")


def test_08_dom_wdeg_beats_lex():
    start = time.perf_counter()
    lex, dw = [], []
    for p in SUITE8:
        inst = gen_model_d(p)
        lex.append(mac_search(inst, Heuristic.LEX).nodes)
        dw.append(mac_search(inst, Heuristic.DOM_WDEG).nodes)
    elapsed = time.perf_counter() - start
    ml, md = statistics.median(lex), statistics.median(dw)
    report(8, "median nodes plain-mac(dom_wdeg) < plain-mac(lex) at n=30 d=8 t=0.35 e=140",
           md < ml and elapsed < 600, f"dom_wdeg {md} vs lex {ml}, {elapsed:.1f}s")


def test_09_rndi_identity():
    bad = 0
    probes = 0
    for p in SUITE8:
        inst = gen_model_d(p)
        log = []
        w = rndi_learn(inst, RndiParams(restarts=5, node_cap_factor=10, seed=p.seed), log)
        probes += len(log)
        bad += sum(x - 1 for x in w) != sum(s.wipeouts for s in log)
        bad += any(s.nodes > 10 * inst.n for s in log)
    report(9, "RNDI (R=5, C=10n) weights equal summed probe wipeouts", bad == 0,
           f"{bad} violations over {len(SUITE8)} instances, {probes} probes")


def test_10_bench_determinism(tmp_path, capsys):
    cfg = tmp_path / "bench.json"
    src = {"model": "d", "n": 20, "d": 6, "e": 60, "tightness": 0.35, "seed": 4}
    cfg.write_text(json.dumps({"experiments": [
        {"instance": src, "method": "coevo+mac", "runs": 5, "params": {"generations": 5}},
        {"instance": src, "method": "rndi+mac", "runs": 5},
        {"instance": src, "method": "hc+mac", "runs": 5},
        {"instance": src, "method": "plain-mac", "heuristic": "dom_wdeg", "runs": 5},
    ]}))
    clock = {"learn_time", "search_time", "t", "mean_t"}

    def snapshot(d):
        out = {}
        for f in sorted(d.iterdir()):
            rows = list(csv.DictReader(f.open()))
            if f.name == "comparisons.csv":
                rows = [r for r in rows if r["metric"] != "t"]
            out[f.name] = [{k: v for k, v in r.items() if k not in clock} for r in rows]
        return out

    snaps = []
    for k in range(2):
        d = tmp_path / f"run{k}"
        assert main(["bench", str(cfg), "--out-dir", str(d)]) == 0
        snaps.append(snapshot(d))
    capsys.readouterr()
    report(10, "bench re-run gives identical CSVs apart from wall-clock columns",
           snaps[0] == snaps[1] and len(snaps[0]) == 6, f"{len(snaps[0])} files compared")
