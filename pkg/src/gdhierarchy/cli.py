"""Command line entry point: ``gdh solve | numbers | verify``.

Exit status: 0 success, 1 at least one check failed, 2 malformed flags,
3 configuration error, 4 unreadable or missing state file.

Every flag may also come from a JSON config file (``--config``) whose keys
are the long flag names with dashes or underscores; command-line values win.
``GDH_THREADS`` sets the worker count for ``verify`` (``--threads`` overrides).
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .checks import CHECKS, CheckReport, run_checks
from .potentials import build_table
from .solver import ConfigError, HierarchyState, TruncationSpec, save_json, solve_jets
from .wave import WaveState, solve_phi

log = logging.getLogger("gdhierarchy")

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_CONFIG, EXIT_STATE = 0, 1, 2, 3, 4
FLAVORS = ("closed", "extended", "open", "conjectural")


class StateError(OSError):
    pass


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gdh", description="Exact Gelfand-Dickey hierarchy engine")
    p.add_argument("--config", help="JSON file supplying defaults for any flag")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve the hierarchy and the wave function")
    s.add_argument("--r", type=int)
    s.add_argument("--times", type=int, help="number of times T1..TN")
    s.add_argument("--degree", type=int, help="cap on the T2..TN degree")
    s.add_argument("--genus-max", type=int)
    s.add_argument("--depth", type=int, help="retained negative orders M")
    s.add_argument("--strata", type=int, help="number J of operator strata kept in reports")
    s.add_argument("--out")

    n = sub.add_parser("numbers", help="extract correlators from a solved state")
    n.add_argument("--state")
    n.add_argument("--flavor", choices=FLAVORS)
    n.add_argument("--genus", type=int)
    n.add_argument("--out")
    n.add_argument("--csv", help="CSV path (default: --out with .csv suffix)")

    v = sub.add_parser("verify", help="run residual checks on a solved state")
    v.add_argument("--state")
    v.add_argument("--checks", help=f"comma list from {','.join(CHECKS)}")
    v.add_argument("--report")
    v.add_argument("--threads", type=int)
    v.add_argument("--stable", action="store_true", default=None,
                   help="write millis as 0 so reports are byte-identical across runs")
    return p


DEFAULTS = {
    "solve": {"r": None, "times": None, "degree": None, "genus_max": 1, "depth": None,
              "strata": 2, "out": "state.json"},
    "numbers": {"state": "state.json", "flavor": None, "genus": 0, "out": "correlators.json",
                "csv": None},
    "verify": {"state": "state.json", "checks": None, "report": "report.json", "threads": None,
               "stable": False},
}
REQUIRED = {"solve": ("r", "times", "degree"), "numbers": ("flavor",), "verify": ()}


def _merge_config(args: argparse.Namespace) -> argparse.Namespace:
    conf = {}
    if args.config:
        try:
            with open(args.config) as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object")
        if isinstance(raw.get(args.command), dict):
            section = raw[args.command]
        else:
            section = {k: v for k, v in raw.items() if k not in DEFAULTS}
        conf = {k.replace("-", "_"): v for k, v in section.items()}
    defaults = DEFAULTS[args.command]
    known = {k for d in DEFAULTS.values() for k in d}
    unknown = set(conf) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for key, dflt in defaults.items():
        if getattr(args, key, None) is None:
            setattr(args, key, conf.get(key, dflt))
    missing = [k for k in REQUIRED[args.command] if getattr(args, k) is None]
    if missing:
        raise ConfigError("missing required value(s): " + ", ".join("--" + m.replace("_", "-")
                                                                   for m in missing))
    return args


def load_wave(path) -> WaveState:
    p = Path(path)
    if not p.is_file():
        raise StateError(f"state file {path} not found")
    try:
        with open(p) as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise StateError(f"cannot read state file {path}: {exc}") from exc
    state = HierarchyState.from_json_obj(obj)
    if "wave" in obj:
        return WaveState.from_json_obj(state, obj["wave"])
    return solve_phi(state)


def cmd_solve(args) -> int:
    spec = TruncationSpec(r=args.r, N=args.times, D=args.degree, G=args.genus_max,
                          M=args.depth, J=args.strata)
    state = solve_jets(spec, log=log.info)
    ws = solve_phi(state, log=log.info)
    obj = state.to_json_obj()
    obj["wave"] = ws.to_json_obj()
    save_json(obj, args.out)
    log.info("wrote %s", args.out)
    return EXIT_OK


def cmd_numbers(args) -> int:
    ws = load_wave(args.state)
    try:
        tbl = build_table(args.flavor, args.genus, ws.state, ws)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    Path(args.out).write_text(tbl.to_json())
    csv_path = args.csv or str(Path(args.out).with_suffix(".csv"))
    Path(csv_path).write_text(tbl.to_csv())
    log.info("%d entries -> %s, %s", len(tbl.entries), args.out, csv_path)
    return EXIT_OK


def _thread_count(args) -> int:
    if args.threads:
        return max(1, args.threads)
    env = os.environ.get("GDH_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ConfigError(f"GDH_THREADS must be an integer, got {env!r}") from exc
    return 1


def cmd_verify(args) -> int:
    ws = load_wave(args.state)
    spec = ws.spec
    if args.checks:
        names = [c.strip() for c in args.checks.split(",") if c.strip()]
    else:
        names = [c for c in CHECKS if c != "r2bridge" or spec.r == 2]
    unknown = [c for c in names if c not in CHECKS]
    if unknown:
        raise ConfigError(f"unknown check(s) {unknown}; choose from {', '.join(CHECKS)}")
    # Preconditions are configuration errors, never silent skips.
    if "dilaton" in names:
        spec.require_dilaton()
    if "r2bridge" in names and spec.r != 2:
        raise ConfigError("the r2bridge check needs a state solved with r=2")
    tables = None
    if "dimension" in names:
        tables = [build_table("closed", 0, ws.state, ws), build_table("open", 0, ws.state, ws),
                  build_table("extended", 0, ws.state, ws)]
        tables += [build_table("conjectural", g, ws.state, ws) for g in range(1, spec.G + 1)]
    threads = _thread_count(args)
    # Warm the shared caches once so worker threads only read them.
    ws.state.powers(-1)
    ws.state.powers(0)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(lambda name: run_checks(ws, [name], tables), names))
    reports: list[CheckReport] = [rep for part in parts for rep in part]
    if args.stable:
        for rep in reports:
            rep.millis = 0
    _write_report(args.report, reports)
    for rep in reports:
        log.info("%-9s %-4s %s", rep.check, rep.status, json.dumps(rep.params, sort_keys=True))
    return EXIT_OK if all(rep.passed for rep in reports) else EXIT_FAILED


def _write_report(path, reports):
    if path:
        with open(path, "w") as fh:
            json.dump([r.to_json_obj() for r in reports], fh, sort_keys=True, indent=1)
            fh.write("\n")


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(message)s", stream=sys.stderr)
    handlers = {"solve": cmd_solve, "numbers": cmd_numbers, "verify": cmd_verify}
    try:
        args = _merge_config(args)
        return handlers[args.command](args)
    except ConfigError as exc:
        _error(args, "configuration", exc)
        return EXIT_CONFIG
    except StateError as exc:
        _error(args, "state", exc)
        return EXIT_STATE


def _error(args, kind, exc):
    print(f"gdh: {kind} error: {exc}", file=sys.stderr)
    report = getattr(args, "report", None)
    if args.command == "verify" and report:
        rep = CheckReport("error", {"kind": kind}, status="error",
                          residual_monomials_if_failed=[str(exc)])
        _write_report(report, [rep])


if __name__ == "__main__":
    sys.exit(main())
