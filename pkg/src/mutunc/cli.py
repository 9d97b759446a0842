"""Command-line front end: ``check``, ``repro``, ``search`` and ``sweep``.

Every command writes a CSV table and a JSON-lines witness log into the
output directory (``--out``, or ``$MUTUNC_OUT``, default ``results``) and,
unless ``--no-plots`` is given, a PNG figure next to them.

Exit codes: 0 nothing violated / everything reproduced, 2 a (verified)
violation was found, 1 bad input.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import coefficients as co
from . import ga, scenario_io, scenarios, search
from .relations import RELATIONS, SHAPES, EnsembleScenario, evaluate

log = logging.getLogger("mutunc")

EXIT_OK, EXIT_INPUT, EXIT_VIOLATION = 0, 1, 2

CHECK_FIELDS = ["scenario", "relation", "d", "seed", "lhs", "rhs", "slack", "violated", "method", "wall_time"]
SEARCH_FIELDS = ["relation", "d", "seed", "mode", "generation", "best_fitness", "scale",
                 "lhs", "rhs", "slack", "violated", "method", "wall_time"]
SWEEP_FIELDS = ["relation", "d", "param", "value", "seed", "strategy", "evaluations",
                "min_slack", "violated", "method", "wall_time"]
REPRO_FIELDS = ["scenario", "key", "expected", "got", "tolerance", "ok", "source"]


class InputError(Exception):
    pass


# -- helpers -------------------------------------------------------------------

def _jsonable(x):
    if isinstance(x, np.ndarray):
        if np.iscomplexobj(x):
            return np.stack([x.real, x.imag], axis=-1).tolist()
        return x.tolist()
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _out_dir(args) -> Path:
    out = Path(args.out or os.environ.get("MUTUNC_OUT", "results"))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _workers(args) -> int:
    if getattr(args, "serial", False):
        return 1
    if getattr(args, "workers", None):
        return int(args.workers)
    return int(os.environ.get("MUTUNC_THREADS", "1"))


def _write_csv(path: Path, fields: list[str], rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fields, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: ("" if r.get(k) is None else r.get(k)) for k in fields})


def _write_jsonl(path: Path, records: list[dict]) -> None:
    with open(path, "w") as fh:
        for r in records:
            fh.write(json.dumps(_jsonable(r)) + "\n")


def _report_record(rep) -> dict:
    return {
        "relation": rep.relation, "lhs": rep.lhs, "rhs": rep.rhs, "slack": rep.slack,
        "sense": rep.sense, "tolerance": rep.tolerance, "violated": rep.violated,
        "method": rep.method, "degenerate": rep.degenerate, "conjecture": rep.conjecture,
        "terms": rep.terms, "witnesses": rep.witnesses,
    }


def _parse_number_list(text: str, name: str) -> list:
    """``"2,3,4"``, ``"2..4"`` or ``"2,inf"``; ``inf`` is kept as a float."""
    items: list = []
    for part in (p.strip() for p in text.split(",")):
        if not part:
            continue
        if ".." in part:
            lo, hi = part.split("..")
            items.extend(range(int(lo), int(hi) + 1))
        elif part in ("inf", "infinity"):
            items.append(math.inf)
        else:
            v = float(part)
            items.append(int(v) if v.is_integer() and name == "dim" else v)
    if not items:
        raise InputError(f"empty {name} range")
    return items


def _budget(args) -> co.OptimizerBudget:
    return co.OptimizerBudget(generations=args.budget, seed=args.seed or 0)


def applicable_relations(s) -> list[str]:
    if isinstance(s, EnsembleScenario):
        return ["hall"]
    na, nb = len(s.alice_bases), len(s.bob_bases)
    out = []
    for rel, (ra, rb) in SHAPES.items():
        if nb < rb:
            continue
        if ra == 0 or ra == na:
            if rel == "two-vs-two-fixed-v" and "V" not in s.params:
                continue
            out.append(rel)
    return out


# -- commands ------------------------------------------------------------------

def cmd_check(args) -> int:
    try:
        s = scenario_io.load(args.scenario)
    except (OSError, scenario_io.ScenarioParseError) as e:
        print(f"error: {args.scenario}: {e}", file=sys.stderr)
        return EXIT_INPUT
    relations = args.relation or applicable_relations(s)
    usable = applicable_relations(s)
    bad = [r for r in relations if r not in usable]
    if bad:
        print(f"error: relation(s) {', '.join(bad)} do not apply to this scenario "
              f"(applicable: {', '.join(usable)})", file=sys.stderr)
        return EXIT_INPUT
    rows, logs = [], []
    for rel in relations:
        t0 = time.perf_counter()
        try:
            rep = evaluate(rel, s, budget=_budget(args), coefficient=args.coefficient)
        except ValueError as e:
            print(f"error: {rel}: {e}", file=sys.stderr)
            return EXIT_INPUT
        dt = time.perf_counter() - t0
        row = {"scenario": s.label, **rep.row(), "d": s.dim, "seed": "", "wall_time": f"{dt:.4f}"}
        rows.append(row)
        logs.append({"scenario": s.label, **_report_record(rep)})
        flag = "VIOLATED" if rep.violated else "ok"
        print(f"{rel:20s} lhs={rep.lhs:.9f} rhs={rep.rhs:.9f} slack={rep.slack:+.9f} {flag}")
    out = _out_dir(args)
    _write_csv(out / "check.csv", CHECK_FIELDS, rows)
    _write_jsonl(out / "check.jsonl", logs)
    if not args.no_plots:
        from .plotting import plot_slacks
        plot_slacks(rows, out / "check.png", title=s.label)
    return EXIT_VIOLATION if any(r["violated"] for r in rows) else EXIT_OK


def cmd_repro(args) -> int:
    if args.all:
        ids = sorted(scenarios.REGISTRY)
    elif args.id:
        ids = [args.id]
    else:
        print("error: give --id NAME or --all", file=sys.stderr)
        return EXIT_INPUT
    rows, ok_all = [], True
    for sid in ids:
        try:
            named = scenarios.get(sid)
        except KeyError as e:
            print(f"error: {e.args[0]}", file=sys.stderr)
            return EXIT_INPUT
        t0 = time.perf_counter()
        for exp, got, ok in scenarios.check_expectations(named, budget=_budget(args)):
            ok_all &= ok
            rows.append({"scenario": sid, "key": exp.key, "expected": exp.value, "got": got,
                         "tolerance": exp.tolerance, "ok": ok, "source": exp.source})
            print(f"{sid:24s} {exp.key:26s} expected={exp.value!s:22s} got={got!s:22s} "
                  f"{'ok' if ok else 'MISMATCH'}")
        log.info("%s reproduced in %.3fs", sid, time.perf_counter() - t0)
    out = _out_dir(args)
    _write_csv(out / "repro.csv", REPRO_FIELDS, rows)
    _write_jsonl(out / "repro.jsonl", rows)
    return EXIT_OK if ok_all else EXIT_INPUT


def _search_fixed(args) -> tuple[dict, bool]:
    fixed: dict = {}
    free_alpha = False
    if args.relation == "renyi":
        if args.alpha in (None, "free"):
            free_alpha = True
        else:
            fixed["alpha"] = _parse_number_list(args.alpha, "alpha")[0]
    if args.relation == "exotic":
        fixed["p"] = args.p
    return fixed, free_alpha


def _run_one_search(args, relation, d, seed, fixed, free_alpha):
    codec = search.ScenarioCodec.for_relation(relation, d, args.mode, free_alpha)
    cfg = ga.GAConfig(population_size=args.population, elite_count=args.elite,
                      generations=args.generations, seed=seed)
    budget = co.OptimizerBudget(generations=args.budget, seed=seed)
    return search.run_search(relation, cfg, codec, fixed=fixed, coefficient=args.coefficient,
                             budget=budget, workers=_workers(args))


def cmd_search(args) -> int:
    if args.relation not in RELATIONS or args.relation == "two-vs-two-fixed-v":
        print(f"error: invalid search target {args.relation!r}", file=sys.stderr)
        return EXIT_INPUT
    if args.seed is None:
        print("error: --seed is required for search", file=sys.stderr)
        return EXIT_INPUT
    try:
        fixed, free_alpha = _search_fixed(args)
    except (InputError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    d = args.dim
    rec = _run_one_search(args, args.relation, d, args.seed, fixed, free_alpha)
    stem = f"search_{args.relation}_d{d}_{args.mode}_s{args.seed}"
    rows = [{"relation": rec.relation, "d": d, "seed": args.seed, "mode": args.mode, "generation": g,
             "best_fitness": f, "scale": s} for g, f, s in rec.history]
    rep = rec.report
    rows.append({"relation": rec.relation, "d": d, "seed": args.seed, "mode": args.mode,
                 "generation": rec.history[-1][0], "best_fitness": rec.best_fitness,
                 "lhs": rep.lhs, "rhs": rep.rhs, "slack": rep.slack, "violated": rep.violated,
                 "method": rep.method, "wall_time": f"{rec.wall_time:.3f}"})
    out = _out_dir(args)
    _write_csv(out / f"{stem}.csv", SEARCH_FIELDS, rows)
    best_path = scenario_io.save(rec.best_scenario, out / f"{stem}_best.json")
    _write_jsonl(out / f"{stem}.jsonl", [{
        "relation": rec.relation, "d": d, "seed": args.seed, "mode": args.mode,
        "config": rec.config.to_dict(), "coefficient": rec.coefficient,
        "best_genome": rec.best_genome, "best_fitness": rec.best_fitness,
        "report": _report_record(rep), "reverified": rec.reverified, "notes": rec.notes,
        "best_scenario_file": best_path.name,
    }])
    if not args.no_plots:
        from .plotting import plot_search_history
        plot_search_history(rec.history, out / f"{stem}.png", title=f"{rec.relation}, d={d}")
    print(f"{rec.relation} d={d} seed={args.seed}: best fitness {rec.best_fitness:+.9g}; "
          f"verified slack {rep.slack:+.9g} ({'VIOLATED' if rep.violated else 'no violation'})")
    print(f"best scenario written to {best_path}")
    return EXIT_VIOLATION if rec.violation else EXIT_OK


def _random_cell(args, relation, d, params, seed):
    n_alice, _ = SHAPES[relation]
    worst, method = math.inf, ""
    for t in range(args.trials):
        named = scenarios.random_scenario(d, args.mode, seed=seed * 1_000_003 + t, n_alice=n_alice)
        s = named.scenario
        s.params.update(params)
        rep = evaluate(relation, s, budget=co.OptimizerBudget(generations=args.budget, seed=seed),
                       coefficient=args.coefficient or (co.ANALYTIC if relation == "two-vs-two" else co.OPTIMIZED))
        if rep.slack < worst:
            worst, method = rep.slack, rep.method
    return worst, worst < -(1e-6 if relation in ("two-vs-two", "two-vs-two-sum") else 1e-9), method


def cmd_sweep(args) -> int:
    if args.relation not in RELATIONS or args.relation == "two-vs-two-fixed-v":
        print(f"error: invalid sweep target {args.relation!r}", file=sys.stderr)
        return EXIT_INPUT
    if args.seed is None:
        print("error: --seed is required for sweep", file=sys.stderr)
        return EXIT_INPUT
    try:
        dims = _parse_number_list(args.dims, "dim")
        if args.relation == "renyi":
            param, values = "alpha", _parse_number_list(args.alpha or "2,4,8,16,inf", "alpha")
        elif args.relation == "exotic":
            param, values = "p", _parse_number_list(args.p_values or str(args.p), "p")
        else:
            param, values = "", [""]
    except (InputError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    cells = []
    for d in dims:
        for v in values:
            params = {param: v} if param else {}
            t0 = time.perf_counter()
            if args.strategy == "random":
                slack, violated, method = _random_cell(args, args.relation, d, params, args.seed)
                evals = args.trials
            else:
                rec = _run_one_search(args, args.relation, d, args.seed, params, False)
                slack, violated, method = rec.report.slack, rec.report.violated, rec.report.method
                evals = args.generations
            dt = time.perf_counter() - t0
            value = "inf" if v == math.inf else v
            cells.append({"relation": args.relation, "d": d, "param": param, "value": value,
                          param or "value": value, "seed": args.seed, "strategy": args.strategy,
                          "evaluations": evals, "min_slack": slack, "violated": violated,
                          "method": method, "wall_time": f"{dt:.3f}"})
            print(f"{args.relation} d={d} {param}={value}: min slack {slack:+.9g}"
                  f"{' VIOLATED' if violated else ''}")
    out = _out_dir(args)
    stem = f"sweep_{args.relation}_{args.strategy}_s{args.seed}"
    _write_csv(out / f"{stem}.csv", SWEEP_FIELDS, cells)
    _write_jsonl(out / f"{stem}.jsonl", cells)
    if not args.no_plots:
        from .plotting import plot_sweep
        plot_sweep(cells, out / f"{stem}.png", param or "value", title=args.relation)
    return EXIT_VIOLATION if any(c["violated"] for c in cells) else EXIT_OK


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mutunc",
        description="Evaluate and search mutual-information uncertainty relations.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="output directory (default $MUTUNC_OUT or ./results)")
        p.add_argument("--no-plots", action="store_true", help="skip PNG figures")
        p.add_argument("--budget", type=int, default=60,
                       help="inner GA generations per restart for optimized coefficients")
        p.add_argument("--coefficient", choices=[co.OPTIMIZED, co.ANALYTIC], default=None,
                       help="how c' is computed (search default: analytic)")
        p.add_argument("--config", help="JSON file with option defaults")

    p = sub.add_parser("check", help="evaluate relations on a scenario file")
    common(p)
    p.add_argument("--scenario", required=True)
    p.add_argument("--relation", action="append", choices=sorted(RELATIONS))
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("repro", help="reproduce built-in scenarios against pinned values")
    common(p)
    p.add_argument("--id")
    p.add_argument("--all", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_repro)

    def searching(p):
        common(p)
        p.add_argument("--relation", required=True)
        p.add_argument("--seed", type=int)
        p.add_argument("--generations", type=int, default=2000)
        p.add_argument("--population", type=int, default=25)
        p.add_argument("--elite", type=int, default=3)
        p.add_argument("--mode", choices=search.MODES, default="pure")
        p.add_argument("--alpha", help="Renyi order(s); 'free' lets the search choose (search only)")
        p.add_argument("--p", type=float, default=0.5, help="exponent for the exotic relation")
        p.add_argument("--serial", action="store_true", help="evaluate fitness serially")
        p.add_argument("--workers", type=int, help="fitness threads (default $MUTUNC_THREADS or 1)")

    p = sub.add_parser("search", help="genetic search for a violation")
    searching(p)
    p.add_argument("--dim", type=int, required=True)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("sweep", help="grid of searches over dimension and relation parameter")
    searching(p)
    p.add_argument("--dim", dest="dims", required=True, help="e.g. 2,3,4 or 2..8")
    p.add_argument("--p-values", help="list of exponents for the exotic relation")
    p.add_argument("--strategy", choices=["ga", "random"], default="ga")
    p.add_argument("--trials", type=int, default=10_000, help="scenarios per cell (random strategy)")
    p.set_defaults(func=cmd_sweep)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if not getattr(args, "config", None):
        return args
    try:
        cfg = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read config {args.config}: {e}") from None
    explicit = parser.parse_args(argv)
    defaults = parser.parse_args([args.command] + _required_stub(args))
    for k, v in cfg.items():
        key = k.replace("-", "_")
        if not hasattr(args, key):
            raise InputError(f"unknown config key {k!r}")
        if getattr(explicit, key) == getattr(defaults, key, None):
            setattr(args, key, v)
    return args


def _required_stub(args) -> list[str]:
    """Minimal arguments that satisfy the required options of ``args.command``."""
    stub = {"check": ["--scenario", "x"], "search": ["--relation", "x", "--dim", "1"],
            "sweep": ["--relation", "x", "--dim", "1"]}
    return stub.get(args.command, [])


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _apply_config(parser, argv)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (KeyError, ValueError, InputError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
