"""Seeded multi-run experiments and the pairwise statistical comparison table."""

from __future__ import annotations

import csv
import io
import itertools
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from .baselines import HcParams, RndiParams, hc_learn, rndi_learn
from .coevo import CoevoParams, learn_weights
from .core import CspInstance
from .generators import (GeoParams, ModelDParams, ModelRbParams, gen_geo, gen_model_d,
                         gen_model_rb)
from .io import read_instance
from .search import Heuristic, Outcome, SearchLimits, initial_weights, mac_search
from .stats import mann_whitney_u, vargha_delaney_a

METHODS = ("coevo+mac", "rndi+mac", "hc+mac", "plain-mac")
RUN_FIELDS = ("run", "seed", "method", "outcome", "n", "wipeouts",
              "learn_time", "search_time", "t")
WALL_CLOCK_FIELDS = ("learn_time", "search_time", "t")
ALPHA = 0.05


@dataclass
class ExperimentConfig:
    """What to run. ``instance`` is a file path or a generator spec dict
    (``{"model": "d" | "rb" | "geo", ...params}``)."""

    instance: object
    method: str = "coevo+mac"
    params: dict = field(default_factory=dict)
    heuristic: str | None = None
    runs: int = 50
    timeout_secs: float = 1200.0
    base_seed: int = 0
    label: str | None = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.runs < 1:
            raise ValueError("runs must be at least 1")
        if self.timeout_secs <= 0:
            raise ValueError("timeout_secs must be positive")

    @property
    def name(self) -> str:
        if self.label:
            return self.label
        if self.method == "plain-mac":
            return f"plain-mac({self.final_heuristic.value})"
        return self.method

    @property
    def final_heuristic(self) -> Heuristic:
        if self.heuristic:
            return Heuristic(self.heuristic)
        if self.method == "rndi+mac":
            return Heuristic(self.params.get("final_heuristic", "wdeg"))
        if self.method == "plain-mac":
            return Heuristic.DOM_WDEG
        return Heuristic.WDEG

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        return cls(**d)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class RunRecord:
    run: int
    seed: int
    method: str
    outcome: str
    n: int
    wipeouts: int
    learn_time: float
    search_time: float
    t: float


def load_instance(source) -> CspInstance:
    if isinstance(source, CspInstance):
        return source
    if isinstance(source, dict):
        spec = dict(source)
        model = spec.pop("model")
        if model == "d":
            return gen_model_d(ModelDParams(**spec))
        if model == "rb":
            return gen_model_rb(ModelRbParams(**spec))[0]
        if model == "geo":
            return gen_geo(GeoParams(**spec))
        raise ValueError(f"unknown generator model {model!r}")
    return read_instance(source)


def learn(inst: CspInstance, method: str, params: dict, seed: int) -> list:
    """Weights produced by a method's learning phase (all ones for plain MAC)."""
    params = {k: v for k, v in params.items() if k != "seed"}
    if method == "coevo+mac":
        return learn_weights(inst, CoevoParams(seed=seed, **params))
    if method == "rndi+mac":
        return rndi_learn(inst, RndiParams(seed=seed, **params))
    if method == "hc+mac":
        return hc_learn(inst, HcParams(seed=seed, **params))
    if method == "plain-mac":
        return initial_weights(inst)
    raise ValueError(f"unknown method {method!r}")


def run_once(inst: CspInstance, cfg: ExperimentConfig, run: int) -> RunRecord:
    seed = cfg.base_seed + run
    start = time.perf_counter()
    weights = learn(inst, cfg.method, cfg.params, seed)
    learn_time = time.perf_counter() - start
    remaining = cfg.timeout_secs - learn_time
    if remaining <= 0:
        return RunRecord(run, seed, cfg.name, Outcome.TIMEOUT.value, 0, 0,
                         learn_time, 0.0, cfg.timeout_secs)
    stats = mac_search(inst, cfg.final_heuristic, weights,
                       SearchLimits(timeout_secs=remaining), rng_seed=seed)
    t = learn_time + stats.elapsed
    if stats.outcome is Outcome.TIMEOUT:
        t = cfg.timeout_secs
    return RunRecord(run, seed, cfg.name, stats.outcome.value, stats.nodes, stats.wipeouts,
                     learn_time, stats.elapsed, t)


def _run_job(args):
    inst, cfg, run = args
    return run_once(inst, cfg, run)


def run_experiment(cfg: ExperimentConfig, jobs: int = 1) -> list:
    """Run ``cfg.runs`` seeded pipelines; records come back in run order."""
    inst = load_instance(cfg.instance)
    if jobs <= 1:
        return [run_once(inst, cfg, r) for r in range(cfg.runs)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_job, [(inst, cfg, r) for r in range(cfg.runs)]))


def records_to_csv(records, wall_clock: bool = True) -> str:
    fields = [f for f in RUN_FIELDS if wall_clock or f not in WALL_CLOCK_FIELDS]
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in records:
        row = asdict(r)
        for k in WALL_CLOCK_FIELDS:
            row[k] = f"{row[k]:.6f}"
        w.writerow(row)
    return buf.getvalue()


def read_column(path, col: str) -> list:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or col not in reader.fieldnames:
            raise KeyError(f"{path}: no column {col!r}")
        return [float(row[col]) for row in reader]


@dataclass
class ComparisonResult:
    first: str
    second: str
    metric: str
    U: float
    p_value: float
    a_measure: float

    @property
    def significant(self) -> bool:
        return self.p_value < ALPHA

    def cell(self) -> str:
        return f"{self.a_measure:.3f}(*)" if self.significant else "-"


def compare(first, second, a, b, metric) -> ComparisonResult:
    res = mann_whitney_u(a, b)
    return ComparisonResult(first, second, metric, res.U, res.p, vargha_delaney_a(a, b))


@dataclass
class Summary:
    means: dict
    comparisons: list

    def means_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["method", "runs", "mean_t", "mean_n"])
        for m, (runs, t, n) in self.means.items():
            w.writerow([m, runs, f"{t:.6f}", f"{n:.2f}"])
        return buf.getvalue()

    def comparisons_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["first", "second", "metric", "U", "p_value", "a_measure", "significant"])
        for c in self.comparisons:
            w.writerow([c.first, c.second, c.metric, f"{c.U:g}", f"{c.p_value:.6g}",
                        f"{c.a_measure:.6f}", int(c.significant)])
        return buf.getvalue()

    def text(self) -> str:
        width = max([len(m) for m in self.means] + [6])
        lines = [f"{'method':<{width}}  {'runs':>5}  {'mean t':>12}  {'mean n':>12}"]
        for m, (runs, t, n) in self.means.items():
            lines.append(f"{m:<{width}}  {runs:>5}  {t:>12.4f}  {n:>12.2f}")
        if self.comparisons:
            lines.append("")
            pairs = {}
            for c in self.comparisons:
                pairs.setdefault(f"{c.first} vs {c.second}", {})[c.metric] = c.cell()
            pw = max(len(k) for k in pairs)
            lines.append(f"{'comparison':<{pw}}  {'t':>10}  {'n':>10}")
            for k, cells in pairs.items():
                lines.append(f"{k:<{pw}}  {cells.get('t', ''):>10}  {cells.get('n', ''):>10}")
        return "\n".join(lines) + "\n"


def summarize(records_by_method: dict) -> Summary:
    """Means per method plus U/p/A for every method pair on t and n."""
    means = {}
    for m, recs in records_by_method.items():
        recs = list(recs)
        means[m] = (len(recs), sum(r.t for r in recs) / len(recs),
                    sum(r.n for r in recs) / len(recs))
    comps = []
    for m1, m2 in itertools.combinations(records_by_method, 2):
        r1, r2 = records_by_method[m1], records_by_method[m2]
        for metric in ("t", "n"):
            comps.append(compare(m1, m2, [getattr(r, metric) for r in r1],
                                 [getattr(r, metric) for r in r2], metric))
    return Summary(means, comps)
