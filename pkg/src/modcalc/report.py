"""Running scenarios and rendering their reports as text or JSON."""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from modcalc.scenario import FAIL, INCONCLUSIVE, PASS, CheckOutcome, Scenario, run_check

__all__ = ["Report", "run", "emit"]


@dataclass
class Report:
    scenario: str
    seed: int
    outcomes: list = field(default_factory=list)
    assumptions: list = field(default_factory=list)

    @property
    def failed(self) -> bool:
        return any(o.status == FAIL for o in self.outcomes)

    @property
    def exit_code(self) -> int:
        return 1 if self.failed else 0

    def counts(self) -> dict:
        out = {PASS: 0, FAIL: 0, INCONCLUSIVE: 0}
        for o in self.outcomes:
            out[o.status] += 1
        return out


def run(sc: Scenario, seed: int | None = None, parallel: bool = False) -> Report:
    """Execute every check of the scenario; the report keeps file order.

    ``seed`` overrides the scenario seed for property suites that do not
    pin their own.
    """
    if seed is not None:
        sc.seed = seed
    if parallel and len(sc.checks) > 1:
        with ThreadPoolExecutor() as pool:
            outcomes = list(pool.map(lambda spec: run_check(sc, spec), sc.checks))
    else:
        outcomes = [run_check(sc, spec) for spec in sc.checks]
    return Report(sc.name, sc.seed, outcomes, list(sc.assertions))


def _detail_lines(key, value):
    if isinstance(value, list):
        if value and isinstance(value[0], list):
            value = "; ".join("[" + ", ".join(row) + "]" for row in value)
        else:
            value = "; ".join(str(v) for v in value)
    elif isinstance(value, bool):
        value = "true" if value else "false"
    return f"    {key} = {value}"


def _text(report: Report, timing: bool) -> str:
    lines = [f"SCENARIO {report.scenario} (seed {report.seed})"]
    for a in report.assumptions:
        lines.append(f"ASSUME {a}")
    for o in report.outcomes:
        suffix = f" ({o.seconds:.3f}s)" if timing else ""
        lines.append(f"CHECK {o.label}: {o.status}{suffix}")
        for key, value in o.details.items():
            lines.append(_detail_lines(key, value))
    c = report.counts()
    lines.append(f"SUMMARY pass={c[PASS]} fail={c[FAIL]} inconclusive={c[INCONCLUSIVE]}")
    return "\n".join(lines) + "\n"


def _outcome_dict(o: CheckOutcome, timing: bool) -> dict:
    out = {"label": o.label, "check": o.check, "status": o.status, "details": o.details}
    if timing:
        out["seconds"] = round(o.seconds, 6)
    return out


def _structured(report: Report, timing: bool) -> str:
    doc = {
        "scenario": report.scenario,
        "seed": report.seed,
        "assumptions": report.assumptions,
        "checks": [_outcome_dict(o, timing) for o in report.outcomes],
        "summary": {k.lower(): v for k, v in report.counts().items()},
        "exit_code": report.exit_code,
    }
    return json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n"


def emit(report: Report, fmt: str = "text", timing: bool = False) -> str:
    """Render a report; timings are left out unless asked for, keeping output reproducible."""
    if fmt == "text":
        return _text(report, timing)
    if fmt == "structured":
        return _structured(report, timing)
    raise ValueError(f"unknown report format {fmt!r}")
