"""Command-line entry point.

Exit codes: 0 ok, 1 usage error, 2 input error, 3 internal error. Errors are
printed to stderr as a single ``error: <kind>: <message>`` line.
"""

from __future__ import annotations

import argparse
import json
import os
import secrets
import sys
import time
from pathlib import Path

from . import __version__
from .baselines import HC_ITERATION_PRESETS, RNDI_RESTART_PRESETS
from .bench import ExperimentConfig, learn, records_to_csv, run_experiment, summarize
from .generators import (GeneratorError, GeoParams, ModelDParams, ModelRbParams, gen_geo,
                         gen_model_d, gen_model_rb)
from .io import ParseError, read_instance, read_xcsp, serialize_native
from .search import Heuristic, SearchLimits, mac_search

DATA_DIR_ENV = "COEVO_CSP_DATA"
DEFAULT_SEED = 0
EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3

LEARNER_FLAGS = {
    "coevo+mac": ("pop_size", "history_len", "encounters_per_gen", "crossover_rate",
                  "mutation_rate", "ranking_bias", "tournament_size", "generations"),
    "rndi+mac": ("restarts", "node_cap_factor", "final_heuristic"),
    "hc+mac": ("iterations_total", "cutoff"),
    "plain-mac": (),
}


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _seed(text: str) -> int:
    if text == "random":
        return secrets.randbits(31)
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("seed must be an integer or 'random'") from None


def _resolve(path: str) -> Path:
    p = Path(path)
    base = os.environ.get(DATA_DIR_ENV)
    if not p.is_absolute() and not p.exists() and base:
        p = Path(base) / p
    return p


def _load(path: str):
    p = _resolve(path)
    try:
        return read_instance(p)
    except OSError as exc:
        raise InputError(f"cannot read {p}: {exc.strerror}") from None
    except ParseError as exc:
        raise InputError(f"{p}: {exc}") from None


def _add_learner_flags(p):
    g = p.add_argument_group("learner parameters (override --config)")
    g.add_argument("--config", help="JSON file with learner parameters")
    g.add_argument("--generations", type=int, help="coevolution generations (default 15)")
    g.add_argument("--pop-size", type=int, help="solution population size (default 50)")
    g.add_argument("--history-len", type=int, help="encounter history length (default 10)")
    g.add_argument("--encounters-per-gen", type=int, help="encounters per generation (default 20)")
    g.add_argument("--crossover-rate", type=float, help="one-point crossover rate (default 0.9)")
    g.add_argument("--mutation-rate", type=float, help="per-bit mutation rate (default 0.01)")
    g.add_argument("--ranking-bias", type=float, help="linear ranking bias in [1,2] (default 2.0)")
    g.add_argument("--tournament-size", type=int, help="tournament size (default 2)")
    g.add_argument("--restarts", type=int,
                   help=f"RNDI restarts R (default 5; presets {RNDI_RESTART_PRESETS})")
    g.add_argument("--node-cap-factor", type=int, help="RNDI per-probe node cap C/n (default 10)")
    g.add_argument("--final-heuristic", choices=[h.value for h in Heuristic],
                   help="RNDI final-run heuristic (default wdeg)")
    g.add_argument("--iterations-total", type=int,
                   help=f"HC iteration budget (default 50; presets {HC_ITERATION_PRESETS})")
    g.add_argument("--cutoff", type=int, help="HC per-climb cutoff (default 50)")


def _learner_params(args, method: str) -> dict:
    params = {}
    if args.config:
        try:
            with open(_resolve(args.config), encoding="utf-8") as fh:
                params.update(json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot load config {args.config}: {exc}") from None
    for name in LEARNER_FLAGS.get(method, ()):
        val = getattr(args, name, None)
        if val is not None:
            params[name] = val
    allowed = set(LEARNER_FLAGS[method])
    unknown = set(params) - allowed - {"seed"}
    if unknown:
        raise UsageError(f"parameters {sorted(unknown)} do not apply to method {method}")
    return params


def _method(name: str) -> str:
    return name if name in LEARNER_FLAGS else {"coevo": "coevo+mac", "rndi": "rndi+mac",
                                               "hc": "hc+mac"}.get(name, name)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="coevo-csp",
                     description="Binary CSP solving with learned constraint weights.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write a random instance in the native format")
    g.add_argument("--model", choices=["d", "rb", "geo"], required=True)
    g.add_argument("--n", type=int, required=True, help="number of variables")
    g.add_argument("--d", type=int, help="domain size (model d, geo)")
    g.add_argument("--e", type=int, help="number of constraints (model d)")
    g.add_argument("--t", type=float, help="tightness: fraction of forbidden pairs")
    g.add_argument("--alpha", type=float, help="model rb: d = round(n^alpha)")
    g.add_argument("--r", type=float, help="model rb: e = round(r n ln n)")
    g.add_argument("--no-forced", action="store_true", help="model rb: do not plant a solution")
    g.add_argument("--distance", type=float, help="geo: connection radius in [0, sqrt 2]")
    g.add_argument("--seed", type=_seed, default=DEFAULT_SEED,
                   help="integer seed or 'random' (default 0)")
    g.add_argument("-o", "--output", help="output file (default stdout)")

    s = sub.add_parser("solve", help="learn weights (optional) and run MAC on an instance")
    s.add_argument("instance", help="instance file (.xml = XCSP 2.1, else native)")
    s.add_argument("--method", default="plain-mac", choices=list(LEARNER_FLAGS))
    s.add_argument("--heuristic", choices=[h.value for h in Heuristic],
                   help="MAC heuristic (default: wdeg after learning, dom_wdeg for plain-mac)")
    s.add_argument("--seed", type=_seed, default=DEFAULT_SEED)
    s.add_argument("--timeout", type=float, help="wall-clock cap on the MAC search (seconds)")
    s.add_argument("--node-cap", type=int, help="maximum MAC nodes")
    s.add_argument("--show-solution", action="store_true", help="print the solution if found")
    _add_learner_flags(s)

    lw = sub.add_parser("learn-weights", help="print the learned per-constraint weights")
    lw.add_argument("instance")
    lw.add_argument("--method", default="coevo", choices=["coevo", "rndi", "hc"])
    lw.add_argument("--seed", type=_seed, default=DEFAULT_SEED)
    _add_learner_flags(lw)

    b = sub.add_parser("bench", help="run seeded experiments and write CSV results")
    b.add_argument("config", nargs="?",
                   help="JSON experiment file: one config object or {\"experiments\": [...]}")
    b.add_argument("--instance", help="instance file (when no config file is given)")
    b.add_argument("--method", action="append", choices=list(LEARNER_FLAGS),
                   help="method to run; repeat to compare several")
    b.add_argument("--heuristic", choices=[h.value for h in Heuristic])
    b.add_argument("--runs", type=int, default=50)
    b.add_argument("--timeout", type=float, default=1200.0)
    b.add_argument("--seed", type=_seed, default=DEFAULT_SEED, help="base seed")
    b.add_argument("--out-dir", default=".", help="directory for the CSV files")
    b.add_argument("--jobs", type=int, default=1, help="parallel worker processes")

    st = sub.add_parser("stats", help="Mann-Whitney U and Vargha-Delaney A on two CSV columns")
    st.add_argument("first")
    st.add_argument("second")
    st.add_argument("--col", default="t", help="column name (default t)")

    c = sub.add_parser("convert", help="transcode an XCSP 2.1 file to the native format")
    c.add_argument("input")
    c.add_argument("-o", "--output", help="output file (default stdout)")
    return parser


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"model {args.model} needs --{' --'.join(missing)}")


def cmd_generate(args) -> None:
    try:
        if args.model == "d":
            _need(args, "d", "e", "t")
            inst = gen_model_d(ModelDParams(args.n, args.d, args.e, args.t, args.seed))
        elif args.model == "rb":
            _need(args, "alpha", "r", "t")
            inst, _ = gen_model_rb(ModelRbParams(args.n, args.alpha, args.r, args.t,
                                                 not args.no_forced, args.seed))
        else:
            _need(args, "d", "distance", "t")
            inst = gen_geo(GeoParams(args.n, args.d, args.distance, args.t, args.seed))
    except GeneratorError as exc:
        raise UsageError(str(exc)) from None
    _emit(serialize_native(inst, {"generator": args.model, "seed": args.seed}), args.output)


def cmd_solve(args) -> None:
    inst = _load(args.instance)
    params = _learner_params(args, args.method)
    cfg = ExperimentConfig(args.instance, args.method, params, args.heuristic, runs=1,
                           base_seed=args.seed)
    start = time.perf_counter()
    weights = _learn(inst, args.method, params, args.seed)
    learn_time = time.perf_counter() - start
    try:
        limits = SearchLimits(node_cap=args.node_cap, timeout_secs=args.timeout)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    stats = mac_search(inst, cfg.final_heuristic, weights, limits, rng_seed=args.seed)
    print(f"instance {inst.name}")
    print(f"method {cfg.name}")
    print(f"seed {args.seed}")
    print(f"outcome {stats.outcome.value}")
    print(f"t {learn_time + stats.elapsed:.6f}")
    print(f"n {stats.nodes}")
    print(f"wipeouts {stats.wipeouts}")
    if args.show_solution and stats.solution is not None:
        print("solution " + " ".join(str(stats.solution[v]) for v in range(inst.n)))


def _learn(inst, method, params, seed):
    try:
        return learn(inst, method, params, seed)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid learner parameters: {exc}") from None


def cmd_learn_weights(args) -> None:
    inst = _load(args.instance)
    method = _method(args.method)
    weights = _learn(inst, method, _learner_params(args, method), args.seed)
    print(f"# method {method} seed {args.seed} constraints {inst.m}")
    for cid, w in enumerate(weights):
        print(f"{cid} {w}")


def _bench_configs(args) -> list:
    if args.config:
        try:
            with open(_resolve(args.config), encoding="utf-8") as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot load bench config {args.config}: {exc}") from None
        items = doc.get("experiments", [doc]) if isinstance(doc, dict) else doc
        cfgs = []
        for item in items:
            inst = item.get("instance")
            if isinstance(inst, str):
                item = dict(item, instance=str(_resolve(inst)))
            try:
                cfgs.append(ExperimentConfig.from_dict(item))
            except (TypeError, ValueError) as exc:
                raise InputError(f"bad experiment config: {exc}") from None
        return cfgs
    if not args.instance:
        raise UsageError("bench needs a config file or --instance")
    methods = args.method or ["plain-mac"]
    try:
        return [ExperimentConfig(str(_resolve(args.instance)), m, {}, args.heuristic,
                                 args.runs, args.timeout, args.seed) for m in methods]
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_bench(args) -> None:
    cfgs = _bench_configs(args)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    by_method = {}
    for cfg in cfgs:
        try:
            records = run_experiment(cfg, jobs=args.jobs)
        except (OSError, ParseError) as exc:
            raise InputError(f"cannot load instance {cfg.instance}: {exc}") from None
        if cfg.name in by_method:
            raise UsageError(f"duplicate experiment name {cfg.name}; set distinct labels")
        by_method[cfg.name] = records
        fname = "runs-" + cfg.name.replace("(", "-").replace(")", "").replace("+", "_") + ".csv"
        (out / fname).write_text(records_to_csv(records), encoding="utf-8")
    summary = summarize(by_method)
    (out / "summary.csv").write_text(summary.means_csv(), encoding="utf-8")
    (out / "comparisons.csv").write_text(summary.comparisons_csv(), encoding="utf-8")
    sys.stdout.write(summary.text())


def cmd_stats(args) -> None:
    from .bench import compare, read_column
    cols = []
    for path in (args.first, args.second):
        try:
            cols.append(read_column(_resolve(path), args.col))
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc.strerror}") from None
        except (KeyError, ValueError) as exc:
            raise InputError(str(exc)) from None
    if not cols[0] or not cols[1]:
        raise InputError("both CSV files need at least one row")
    res = compare(args.first, args.second, cols[0], cols[1], args.col)
    print(f"metric {args.col}")
    print(f"U {res.U:g}")
    print(f"p {res.p_value:.6g}")
    print(f"A {res.a_measure:.6f}")
    print(f"significant {'yes' if res.significant else 'no'}")


def cmd_convert(args) -> None:
    p = _resolve(args.input)
    try:
        inst = read_xcsp(p)
    except OSError as exc:
        raise InputError(f"cannot read {p}: {exc.strerror}") from None
    except ParseError as exc:
        raise InputError(f"{p}: {exc}") from None
    _emit(serialize_native(inst), args.output)


COMMANDS = {
    "generate": cmd_generate,
    "solve": cmd_solve,
    "learn-weights": cmd_learn_weights,
    "bench": cmd_bench,
    "stats": cmd_stats,
    "convert": cmd_convert,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: usage: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"error: input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SystemExit as exc:
        # --help / --version
        return int(exc.code or 0)
    except Exception as exc:  # noqa: BLE001
        print(f"error: internal: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
