"""Command-line front end.

Subcommands: ``estimate`` (complexity sweeps), ``verify`` (estimator
invariant suites), ``cat`` (order-kernel lemma suites), ``report`` (tidy CSV
from sweep artifacts).  Exit codes: 0 success, 2 configuration or validation
error, 3 I/O error, 4 invariant failure.

``ENTROLAB_THREADS`` caps sweep workers; output bytes do not depend on it.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import suites
from .complexity import (
    METHODS,
    entropy_extrapolate,
    pressure_sweep,
    sweep_to_csv,
    sweeps_to_json,
)
from .errors import EntrolabError, InsufficientGrid, ParamOutOfRange
from .systems import MAP_RULES, SystemSpec, build_system, ingest_trajectory

SCHEMA_VERSION = "1"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_INVARIANT = 4

DEFAULT_CONFIG = {
    "system": {"kind": "dyadic_doubling", "m": 6},
    "methods": list(METHODS),
    "eps_grid": [0.5, 0.25, 0.125, 0.0625],
    "n_max": 5,
    "mode": "exact",
    "budget": 200_000,
    "piece_budget": 300_000,
    "window": None,
    "out": "out",
    "format": "both",
    "extrapolation_tolerance": 0.05,
    "verify": {
        "count": 12,
        "max_points": 64,
        "n_max": 3,
        "seed": 20260811,
        "cat_trials": 150,
        "entangle_instances": 60,
    },
}

VERIFY_POINT_GUARD = 256


class ConfigError(Exception):
    pass


def _threads() -> int:
    raw = os.environ.get("ENTROLAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"ENTROLAB_THREADS must be an integer, got {raw!r}")


def _parse_system_flag(text: str) -> dict:
    kind, _, rest = text.partition(":")
    params: dict = {"kind": kind}
    if rest:
        for item in rest.split(","):
            key, _, value = item.partition("=")
            if not key or not value:
                raise ConfigError(f"bad system parameter {item!r}; use key=value")
            try:
                params[key] = int(value)
            except ValueError:
                params[key] = value
    return params


def load_config(args) -> dict:
    config = json.loads(json.dumps(DEFAULT_CONFIG))  # deep copy
    if getattr(args, "config", None):
        path = Path(args.config)
        try:
            text = path.read_text()
        except OSError as exc:
            raise IOError(f"cannot read config {path}: {exc}")
        try:
            loaded = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}")
        if not isinstance(loaded, dict):
            raise ConfigError(f"config {path} must hold a JSON object")
        for key, value in loaded.items():
            if key == "verify" and isinstance(value, dict):
                config["verify"].update(value)
            else:
                config[key] = value
    if getattr(args, "system", None):
        config["system"] = _parse_system_flag(args.system)
    if getattr(args, "eps_grid", None):
        try:
            config["eps_grid"] = [float(x) for x in args.eps_grid.split(",") if x]
        except ValueError:
            raise ConfigError(f"bad --eps-grid value {args.eps_grid!r}")
    if getattr(args, "n_max", None) is not None:
        config["n_max"] = args.n_max
    if getattr(args, "mode", None):
        config["mode"] = args.mode
    if getattr(args, "budget", None) is not None:
        config["budget"] = args.budget
    if getattr(args, "out", None):
        config["out"] = args.out
    if getattr(args, "format", None):
        config["format"] = args.format
    validate_config(config)
    return config


def validate_config(config: dict) -> None:
    methods = config["methods"]
    if not methods or any(m not in METHODS for m in methods):
        raise ConfigError(f"methods must be a non-empty subset of {METHODS}, got {methods}")
    grid = config["eps_grid"]
    if not grid:
        raise ConfigError("eps_grid is empty")
    for e in grid:
        if not 0.0 < float(e) <= 1.0:
            raise ConfigError(f"eps grid entry {e} outside (0, 1]")
    if any(b >= a for a, b in zip(grid, grid[1:])):
        raise ConfigError(f"eps grid must be strictly decreasing, got {grid}")
    if int(config["n_max"]) < 2:
        raise ConfigError(f"n_max must be >= 2, got {config['n_max']}")
    if config["mode"] not in ("exact", "greedy"):
        raise ConfigError(f"mode must be exact or greedy, got {config['mode']!r}")
    if config["format"] not in ("csv", "json", "both"):
        raise ConfigError(f"format must be csv, json or both, got {config['format']!r}")
    if not isinstance(config["system"], dict) or "kind" not in config["system"]:
        raise ConfigError("system must be an object with a 'kind' field")


def build_configured_system(system_cfg: dict):
    kind = system_cfg["kind"]
    params = {k: v for k, v in system_cfg.items() if k != "kind"}
    if kind == "custom":
        points = params.get("points")
        if not points:
            raise ConfigError("custom system needs a 'points' CSV path")
        rule = params.get("map_rule", "successor")
        if rule not in MAP_RULES:
            raise ConfigError(f"map_rule must be one of {MAP_RULES}, got {rule!r}")
        return ingest_trajectory(points, rule)
    return build_system(SystemSpec(kind, params))


def _dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _write(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise IOError(f"cannot write {path}: {exc}")


# ---------------------------------------------------------------------------
# estimate
# ---------------------------------------------------------------------------


def cmd_estimate(args) -> int:
    try:
        config = load_config(args)
        space, emap = build_configured_system(config["system"])
    except (ConfigError, ParamOutOfRange, EntrolabError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IOError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO

    workers = _threads()
    out_dir = Path(config["out"])
    window = tuple(config["window"]) if config["window"] else None
    per_method = {}
    for method in config["methods"]:
        per_method[method] = pressure_sweep(
            space,
            emap,
            method,
            config["eps_grid"],
            int(config["n_max"]),
            mode=config["mode"],
            budget=int(config["budget"]),
            piece_budget=int(config["piece_budget"]),
            window=window,
            workers=workers,
        )

    summary_methods = {}
    for method, estimates in per_method.items():
        entry = {
            "loglims": {repr(e.eps): e.loglim for e in estimates},
            "modes_at_smallest_eps": list(estimates[-1].modes),
            "truncated": any(e.truncated for e in estimates),
        }
        try:
            extr = entropy_extrapolate(estimates, tol=float(config["extrapolation_tolerance"]))
            entry["extrapolation"] = {
                "value": extr.value,
                "spread": extr.spread,
                "stabilized": extr.stabilized,
                "tolerance": extr.tolerance,
                "eps_used": list(extr.eps_used),
            }
        except InsufficientGrid as exc:
            entry["extrapolation"] = {"error": str(exc)}
        summary_methods[method] = entry

    finals = {m: ests[-1].loglim for m, ests in per_method.items()}
    pairs = {}
    names = sorted(finals)
    for i, a in enumerate(names):
        for b in names[i + 1 :]:
            pairs[f"{a}|{b}"] = abs(finals[a] - finals[b])
    summary = {
        "schema_version": SCHEMA_VERSION,
        "system": config["system"],
        "eps_grid": [float(e) for e in config["eps_grid"]],
        "n_max": int(config["n_max"]),
        "mode": config["mode"],
        "points": space.size,
        "methods": summary_methods,
        "discrepancy": {
            "max_abs": max(pairs.values()) if pairs else 0.0,
            "pairs": pairs,
        },
    }

    try:
        if config["format"] in ("csv", "both"):
            for method, estimates in per_method.items():
                _write(out_dir / f"{method}.csv", sweep_to_csv(estimates))
        if config["format"] in ("json", "both"):
            _write(out_dir / "sweep.json", _dump_json(sweeps_to_json(per_method)))
        _write(out_dir / "summary.json", _dump_json(summary))
    except IOError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"estimate: wrote {out_dir}/summary.json")
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def cmd_verify(args) -> int:
    try:
        config = load_config(args)
        vcfg = config["verify"]
        corpus = []
        if getattr(args, "full_corpus", False):
            corpus = suites.verify_corpus(
                seed=int(vcfg["seed"]),
                count=int(vcfg["count"]),
                max_points=int(vcfg["max_points"]),
            )
        else:
            space, emap = build_configured_system(config["system"])
            corpus = [("configured", space, emap)]
            rng = np.random.default_rng(int(vcfg["seed"]))
            for i in range(max(0, int(vcfg["count"]) - 1)):
                n = int(rng.integers(6, min(33, int(vcfg["max_points"]) + 1)))
                sp = suites.random_metric_space(rng, n)
                corpus.append((f"random_{i}", sp, suites.random_endomap(rng, sp)))
    except (ConfigError, ParamOutOfRange, EntrolabError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IOError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO

    for name, space, _ in corpus:
        if space.size > VERIFY_POINT_GUARD:
            print(
                f"error: verify scale guard: system {name} has {space.size} points "
                f"(limit {VERIFY_POINT_GUARD})",
                file=sys.stderr,
            )
            return EXIT_CONFIG

    eps_grid = [float(e) for e in config["eps_grid"]]
    n_max = int(vcfg["n_max"])
    budget = int(config["budget"])
    piece_budget = int(config["piece_budget"])
    rng = np.random.default_rng(int(vcfg["seed"]) + 1)

    results = {
        "sandwich_metric": suites.SuiteResult("sandwich_metric"),
        "sandwich_cover": suites.SuiteResult("sandwich_cover"),
        "count_monotonicity": suites.SuiteResult("count_monotonicity"),
        "isometry_nullity": suites.SuiteResult("isometry_nullity"),
        "greedy_bracket": suites.SuiteResult("greedy_bracket"),
        "lebesgue_lemma": suites.SuiteResult("lebesgue_lemma"),
    }
    for name, space, emap in corpus:
        catalogue = suites.cover_catalogue(space, rng)
        seeds = catalogue[:6]
        suites.suite_sandwich_a(space, emap, eps_grid, n_max, budget, results["sandwich_metric"])
        suites.suite_sandwich_b(
            space, emap, seeds, eps_grid, n_max, budget, piece_budget, results["sandwich_cover"]
        )
        suites.suite_monotonicity(
            space, emap, eps_grid, n_max, budget, results["count_monotonicity"]
        )
        suites.suite_isometry(space, emap, eps_grid, n_max, budget, results["isometry_nullity"])
        suites.suite_greedy_bracket(
            space, emap, eps_grid, min(n_max, 3), budget, results["greedy_bracket"]
        )
        suites.suite_lebesgue(space, catalogue, results["lebesgue_lemma"])

    report = {
        "schema_version": SCHEMA_VERSION,
        "systems": len(corpus),
        "invariants": [r.to_json() for r in results.values()],
        "ok": all(r.ok for r in results.values()),
    }
    text = _dump_json(report)
    if getattr(args, "out", None):
        try:
            _write(Path(args.out) / "verify_report.json", text)
        except IOError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO
    sys.stdout.write(text)
    if not report["ok"]:
        failing = next(r for r in results.values() if not r.ok)
        print(
            f"invariant failed: {failing.name}: {json.dumps(failing.failures[0], sort_keys=True)}",
            file=sys.stderr,
        )
        return EXIT_INVARIANT
    return EXIT_OK


# ---------------------------------------------------------------------------
# cat
# ---------------------------------------------------------------------------


def _load_fixture_cases(path: Path) -> list:
    from .order import FinitePreorder, MonotoneMap

    files = sorted(p for p in path.iterdir() if p.suffix == ".json")
    if not files:
        raise ConfigError(f"fixture directory {path} holds no .json files")
    cases = []
    for file in files:
        try:
            obj = json.loads(file.read_text())
        except OSError as exc:
            raise IOError(f"cannot read fixture {file}: {exc}")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"fixture {file} is not valid JSON: {exc}")
        try:
            for case in obj["cases"]:
                dom = FinitePreorder(np.asarray(case["dom"], dtype=bool))
                cod = FinitePreorder(np.asarray(case["cod"], dtype=bool))
                maps = [MonotoneMap(dom, cod, tuple(v)) for v in case["maps"]]
                cases.append((file.name, dom, cod, maps))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"fixture {file} invalid: {exc}")
    return cases


def cmd_cat(args) -> int:
    trials = int(getattr(args, "trials", 0) or DEFAULT_CONFIG["verify"]["cat_trials"])
    entangle_n = int(
        getattr(args, "entangle", 0) or DEFAULT_CONFIG["verify"]["entangle_instances"]
    )
    rng = np.random.default_rng(20260811)

    lemma_results: list[suites.SuiteResult] = []
    try:
        if getattr(args, "fixtures", None):
            fixture_dir = Path(args.fixtures)
            if not fixture_dir.is_dir():
                print(f"error: fixture path {fixture_dir} is not a directory", file=sys.stderr)
                return EXIT_CONFIG
            cases = _load_fixture_cases(fixture_dir)
            res = suites.SuiteResult("pointwise_transformation")
            for name, dom, cod, maps in cases:
                for F in maps:
                    for G in maps:
                        from .order import nat_trans_exists

                        res.record(
                            nat_trans_exists(F, G) == suites.naturality_bruteforce(F, G),
                            {"fixture": name, "F": F.values, "G": G.values},
                        )
            lemma_results.append(res)
        else:
            lemma_results.append(suites.suite_od30(rng, trials))
            lemma_results.append(suites.suite_kan(rng, max(20, trials // 3)))
            lemma_results.append(suites.suite_sd40(rng, trials))
            lemma_results.append(suites.suite_df30(rng, trials))
            lemma_results.append(suites.suite_ddp3(rng, trials))
            lemma_results.append(suites.suite_qlf_actn(rng, trials))
            lemma_results.append(suites.suite_lim_qual(rng, trials))
            lemma_results.append(suites.suite_ddkw(rng, trials))
            lemma_results.append(suites.suite_entangle(rng, entangle_n))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IOError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO

    report = {
        "schema_version": SCHEMA_VERSION,
        "lemmas": [r.to_json() for r in lemma_results],
        "ok": all(r.ok for r in lemma_results),
    }
    text = _dump_json(report)
    if getattr(args, "out", None):
        try:
            _write(Path(args.out) / "cat_report.json", text)
        except IOError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO
    sys.stdout.write(text)
    if not report["ok"]:
        failing = next(r for r in lemma_results if not r.ok)
        print(
            f"counterexample in {failing.name}: "
            f"{json.dumps(failing.failures[0], sort_keys=True, default=str)}",
            file=sys.stderr,
        )
        return EXIT_INVARIANT
    return EXIT_OK


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------


def cmd_report(args) -> int:
    artifacts = Path(args.artifacts)
    sweep_path = artifacts / "sweep.json"
    try:
        text = sweep_path.read_text()
    except OSError as exc:
        print(f"error: cannot read {sweep_path}: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        print(
            f"error: {sweep_path}: invalid JSON at line {exc.lineno} column {exc.colno}",
            file=sys.stderr,
        )
        return EXIT_IO
    try:
        methods = obj["methods"]
        lines = ["method,eps,n,log_rate"]
        for method in sorted(methods):
            for est in methods[method]:
                for i, lr in enumerate(est["log_rates"]):
                    lines.append(f"{method},{est['eps']!r},{i + 1},{lr!r}")
    except (KeyError, TypeError) as exc:
        print(f"error: {sweep_path}: unexpected artifact shape ({exc})", file=sys.stderr)
        return EXIT_IO
    out_text = "\n".join(lines) + "\n"
    if getattr(args, "out", None):
        try:
            _write(Path(args.out) / "tidy.csv", out_text)
        except IOError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO
    else:
        sys.stdout.write(out_text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file; flags override its values")
    parser.add_argument("--system", help="system KIND or KIND:key=val,... (e.g. dyadic_doubling:m=8)")
    parser.add_argument("--eps-grid", dest="eps_grid", help="comma-separated decreasing grains")
    parser.add_argument("--n-max", dest="n_max", type=int, help="largest horizon")
    parser.add_argument("--mode", choices=["exact", "greedy"], help="solver mode")
    parser.add_argument("--budget", type=int, help="branch-and-bound node budget")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--format", choices=["csv", "json", "both"], help="artifact formats")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="entrolab",
        description="complexity estimators for finite metric dynamical systems",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_est = sub.add_parser("estimate", help="run complexity sweeps")
    _add_common(p_est)

    p_ver = sub.add_parser("verify", help="run estimator invariant suites")
    _add_common(p_ver)
    p_ver.add_argument(
        "--full-corpus",
        action="store_true",
        help="use the built-in + random corpus instead of the configured system",
    )

    p_cat = sub.add_parser("cat", help="run order-kernel lemma suites")
    p_cat.add_argument("--fixtures", help="directory of fixture JSON files")
    p_cat.add_argument("--trials", type=int, help="random trials per lemma")
    p_cat.add_argument("--entangle", type=int, help="entanglement instances")
    p_cat.add_argument("--out", help="output directory")

    p_rep = sub.add_parser("report", help="emit tidy CSV from sweep artifacts")
    p_rep.add_argument("--artifacts", required=True, help="directory written by estimate")
    p_rep.add_argument("--out", help="output directory (default: stdout)")

    args = parser.parse_args(argv)
    try:
        if args.command == "estimate":
            return cmd_estimate(args)
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "cat":
            return cmd_cat(args)
        if args.command == "report":
            return cmd_report(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    parser.error("unknown command")
    return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
