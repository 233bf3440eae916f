"""Command-line driver for scenario files.

Usage:
  modcalc run so3.scn
  modcalc run flat_so3_coupling.scn --format structured --out report.json
  modcalc check-syntax my_scenario.scn
  modcalc examples

Bundled scenarios can be named without a path (``modcalc run so3.scn``).
Exit status: 0 when every check passed or was inconclusive, 1 when a check
failed, 2 when the scenario could not be loaded.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

from modcalc.errors import ModcalcError
from modcalc.report import emit, run
from modcalc.scenario import load_scenario

EXIT_OK, EXIT_FAIL, EXIT_LOAD = 0, 1, 2


def bundled_scenarios() -> dict:
    """File name -> path of every scenario shipped with the package."""
    root = resources.files("modcalc") / "scenarios"
    return {p.name: Path(str(p)) for p in sorted(root.iterdir(), key=lambda p: p.name) if p.name.endswith(".scn")}


def resolve_path(name: str) -> Path:
    path = Path(name)
    if path.exists():
        return path
    bundled = bundled_scenarios()
    if name in bundled:
        return bundled[name]
    if name + ".scn" in bundled:
        return bundled[name + ".scn"]
    return path


def _load(name, err):
    try:
        return load_scenario(resolve_path(name))
    except FileNotFoundError:
        print(f"error: no such scenario file: {name}", file=err)
    except ModcalcError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=err)
    return None


def cmd_run(args, out, err) -> int:
    sc = _load(args.file, err)
    if sc is None:
        return EXIT_LOAD
    report = run(sc, seed=args.seed, parallel=args.parallel)
    text = emit(report, args.format, timing=args.timing)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        if args.format == "structured":
            out.write(emit(report, "text", timing=args.timing))
        else:
            out.write(text)
    else:
        out.write(text)
    return report.exit_code


def cmd_check_syntax(args, out, err) -> int:
    sc = _load(args.file, err)
    if sc is None:
        return EXIT_LOAD
    out.write(f"OK {sc.name}: {len(sc.checks)} checks, {len(sc.tensors)} tensors, {len(sc.volumes)} volumes\n")
    return EXIT_OK


def cmd_examples(args, out, err) -> int:
    for name, path in bundled_scenarios().items():
        data = json.loads(path.read_text(encoding="utf-8"))
        out.write(f"{name:26s} {data.get('description', '')}".rstrip() + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="modcalc", description="Run exact Poisson-geometry checks from scenario files.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the checks of a scenario file")
    p_run.add_argument("file", help="scenario path, or the name of a bundled scenario")
    p_run.add_argument("--seed", type=int, default=None, help="seed for property suites (overrides the file)")
    p_run.add_argument("--parallel", action="store_true", help="run checks concurrently; report order is unchanged")
    p_run.add_argument("--format", choices=("text", "structured"), default="text")
    p_run.add_argument("--out", help="write the report to this path")
    p_run.add_argument("--timing", action="store_true", help="include per-check wall-clock times")
    p_run.set_defaults(func=cmd_run)

    p_syn = sub.add_parser("check-syntax", help="load a scenario and report problems without running it")
    p_syn.add_argument("file")
    p_syn.set_defaults(func=cmd_check_syntax)

    p_ex = sub.add_parser("examples", help="list the bundled scenarios")
    p_ex.set_defaults(func=cmd_examples)
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    return args.func(args, out, err)


if __name__ == "__main__":
    sys.exit(main())
