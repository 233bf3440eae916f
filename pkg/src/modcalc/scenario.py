"""Scenario files: loading, name resolution and check execution.

A scenario is a JSON object::

    {
      "name": "so3",
      "chart": {"coordinates": ["x1", "x2", "x3"]},
      "samples": [["1", "2", "3"]],
      "assertions": [{"nonvanishing": "x1^2 + x2^2"}],
      "functions": {"f": "x1^4 + x2^4"},
      "connections": {"gamma": [["x1", "0"]]},
      "tensors": {"Pi": {"kind": "multivector", "frame": "coordinate",
                         "components": [{"indices": ["x1", "x2"], "coeff": "x3"}]}},
      "volumes": {"Omega": {"type": "total", "density": "1"}},
      "checks": [{"check": "modular", "bivector": "Pi", "volume": "Omega"}]
    }

The chart is either ``{"coordinates": [...]}`` or an adapted split
``{"horizontal": [...], "vertical": [...]}``.  Expressions use the ratfun
grammar.  Check arguments are names defined in the file; arguments that
take a scalar (``function``, ``factor``, ``certificate``) also accept an
inline expression, and ``expect`` accepts a tensor name or tensor text.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from modcalc import coupling, foliated, poisson, properties
from modcalc.errors import (
    ModcalcError,
    PoleAtPoint,
    SampleViolatesAssertion,
    ScenarioSyntaxError,
    UnknownCheckName,
    UnresolvedReference,
)
from modcalc.exterior import (
    DifferentialForm,
    Multivector,
    VolumeForm,
    format_tensor,
    parse_tensor,
)
from modcalc.foliated import AdaptedSplit, ConnectionForm, LeafVolume, TransversalVolume
from modcalc.ratfun import Chart, ScalarFunction

__all__ = ["Scenario", "CheckSpec", "CheckOutcome", "load_scenario", "parse_scenario", "run_check", "CHECKS"]

PASS, FAIL, INCONCLUSIVE = "PASS", "FAIL", "INCONCLUSIVE"


@dataclass
class CheckSpec:
    check: str
    label: str
    args: dict


@dataclass
class CheckOutcome:
    label: str
    check: str
    status: str
    details: dict = field(default_factory=dict)
    seconds: float = 0.0


@dataclass
class Scenario:
    name: str
    chart: Chart
    split: AdaptedSplit | None
    samples: tuple
    seed: int
    assertions: list
    functions: dict
    connections: dict
    tensors: dict
    volumes: dict
    checks: list
    source: str = ""
    _cache: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def cached(self, key, build):
        """Memoize derived data (decompositions) shared between checks."""
        with self._lock:
            if key in self._cache:
                return self._cache[key]
        value = build()
        with self._lock:
            self._cache.setdefault(key, value)
            return self._cache[key]


# ------------------------------------------------------------------- loading
def load_scenario(path) -> Scenario:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    return parse_scenario(text, source=str(path))


def _fail(message, doc=None, where=None):
    """Structural error; locate the offending key in the raw text if possible."""
    line = column = None
    if doc is not None and where is not None:
        pos = doc.find(json.dumps(where))
        if pos >= 0:
            line = doc.count("\n", 0, pos) + 1
            column = pos - (doc.rfind("\n", 0, pos) + 1) + 1
    return ScenarioSyntaxError(message, line, column)


def parse_scenario(text: str, source: str = "<string>") -> Scenario:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioSyntaxError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(data, dict):
        raise ScenarioSyntaxError("a scenario must be a JSON object", 1, 1)
    loader = _Loader(data, text)
    return loader.build(source)


class _Loader:
    def __init__(self, data, text):
        self.data = data
        self.text = text

    def error(self, message, where=None):
        return _fail(message, self.text, where)

    def expr(self, chart, value, where):
        if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
            value = str(value)
        if not isinstance(value, str):
            raise self.error(f"expected an expression string at {where!r}", where)
        try:
            return chart.parse(value)
        except ModcalcError as exc:
            raise ScenarioSyntaxError(f"{where}: {exc}", *self._locate(value)) from None

    def _locate(self, value):
        pos = self.text.find(json.dumps(value))
        if pos < 0:
            return None, None
        return self.text.count("\n", 0, pos) + 1, pos - (self.text.rfind("\n", 0, pos) + 1) + 1

    def build(self, source):
        data = self.data
        known = {
            "name", "description", "chart", "samples", "seed", "assertions", "functions",
            "connections", "tensors", "volumes", "checks",
        }
        for key in data:
            if key not in known:
                raise self.error(f"unknown top-level key {key!r}", key)
        chart, split = self.chart(data.get("chart"))
        samples = tuple(self.point(chart, pt) for pt in data.get("samples", ()))
        seed = data.get("seed", 0)
        if not isinstance(seed, int) or isinstance(seed, bool):
            raise self.error("seed must be an integer", "seed")
        functions = {
            name: self.expr(chart, value, name) for name, value in data.get("functions", {}).items()
        }
        connections = {}
        for name, rows in data.get("connections", {}).items():
            if split is None:
                raise self.error("connections need an adapted split chart", name)
            try:
                matrix = [[self.expr(chart, v, name) for v in row] for row in rows]
                connections[name] = ConnectionForm(split, matrix)
            except (TypeError, ValueError) as exc:
                raise self.error(f"connection {name!r}: {exc}", name) from None
        tensors = {}
        for name, spec in data.get("tensors", {}).items():
            tensors[name] = self.tensor(chart, name, spec, connections)
        assertions = self.assertions(chart, data.get("assertions", ()), samples)
        volumes = {
            name: self.volume(chart, split, name, spec, samples)
            for name, spec in data.get("volumes", {}).items()
        }
        names = {**functions, **connections, **tensors, **volumes}
        if len(names) != len(functions) + len(connections) + len(tensors) + len(volumes):
            raise self.error("a name is defined twice across functions/connections/tensors/volumes")
        checks = [self.check(i, spec, names, split) for i, spec in enumerate(data.get("checks", ()))]
        return Scenario(
            name=str(data.get("name", Path(source).stem)),
            chart=chart,
            split=split,
            samples=samples,
            seed=seed,
            assertions=assertions,
            functions=functions,
            connections=connections,
            tensors=tensors,
            volumes=volumes,
            checks=checks,
            source=source,
        )

    def chart(self, spec):
        if not isinstance(spec, dict):
            raise self.error("missing 'chart' object", "chart")
        try:
            if "coordinates" in spec:
                return Chart(spec["coordinates"]), None
            if "horizontal" in spec and "vertical" in spec:
                split = AdaptedSplit(spec["horizontal"], spec["vertical"])
                return split.chart, split
        except (TypeError, ValueError, ModcalcError) as exc:
            raise self.error(f"bad chart: {exc}", "chart") from None
        raise self.error("chart needs 'coordinates' or 'horizontal' and 'vertical'", "chart")

    def point(self, chart, pt):
        if not isinstance(pt, list) or len(pt) != chart.dim:
            raise self.error(f"sample point {pt!r} needs {chart.dim} coordinates", "samples")
        try:
            return tuple(Fraction(str(v)) for v in pt)
        except (ValueError, ZeroDivisionError):
            raise self.error(f"sample point {pt!r} has a non-rational entry", "samples") from None

    def tensor(self, chart, name, spec, connections):
        if not isinstance(spec, dict):
            raise self.error(f"tensor {name!r} must be an object", name)
        kind = spec.get("kind", "multivector")
        if kind not in ("multivector", "form"):
            raise self.error(f"tensor {name!r}: kind must be 'multivector' or 'form'", name)
        frame = spec.get("frame", "coordinate")
        connection = None
        if frame == "adapted":
            cname = spec.get("connection")
            if cname not in connections:
                raise UnresolvedReference(f"tensor {name!r} refers to unknown connection {cname!r}")
            connection = connections[cname]
        elif frame != "coordinate":
            raise self.error(f"tensor {name!r}: frame must be 'coordinate' or 'adapted'", name)
        comps = {}
        for entry in spec.get("components", ()):
            try:
                idx = tuple(entry["indices"])
                coeff = entry["coeff"]
            except (KeyError, TypeError):
                raise self.error(f"tensor {name!r}: components need 'indices' and 'coeff'", name) from None
            for label in idx:
                if label not in chart.names:
                    raise UnresolvedReference(f"tensor {name!r} uses unknown coordinate {label!r}")
            comps[idx] = comps.get(idx, chart.zero()) + self.expr(chart, coeff, name)
        cls = Multivector if kind == "multivector" else DifferentialForm
        try:
            return cls(chart, comps, connection)
        except (ValueError, ModcalcError) as exc:
            raise self.error(f"tensor {name!r}: {exc}", name) from None

    def assertions(self, chart, specs, samples):
        out = []
        for spec in specs:
            if not isinstance(spec, dict) or "nonvanishing" not in spec:
                raise self.error("assertions are objects {\"nonvanishing\": expr}", "assertions")
            f = self.expr(chart, spec["nonvanishing"], "assertions")
            for pt in samples:
                try:
                    value = f.evaluate(pt)
                except PoleAtPoint:
                    value = None
                if not value:
                    raise SampleViolatesAssertion(f"{f} does not stay nonzero at sample ({', '.join(str(v) for v in pt)})")
            out.append(f"nonvanishing: {f} (checked at {len(samples)} samples)")
        return out

    def volume(self, chart, split, name, spec, samples):
        if not isinstance(spec, dict):
            raise self.error(f"volume {name!r} must be an object", name)
        kind = spec.get("type", "total")
        density = self.expr(chart, spec.get("density", "1"), name)
        pts = samples if "samples" not in spec else tuple(self.point(chart, p) for p in spec["samples"])
        try:
            if kind == "total":
                return VolumeForm(chart, density, pts)
            if split is None:
                raise self.error(f"volume {name!r}: leaf/transversal volumes need an adapted split", name)
            if kind == "leaf":
                return LeafVolume(split, density, pts)
            if kind == "transversal":
                return TransversalVolume(split, density, pts)
        except ModcalcError as exc:
            if isinstance(exc, ScenarioSyntaxError):
                raise
            raise SampleViolatesAssertion(f"volume {name!r}: {exc}") from None
        raise self.error(f"volume {name!r}: type must be total, leaf or transversal", name)

    def check(self, position, spec, names, split):
        if not isinstance(spec, dict) or "check" not in spec:
            raise self.error(f"check #{position + 1} must be an object with a 'check' key", "checks")
        kind = spec["check"]
        if kind not in CHECKS:
            raise UnknownCheckName(f"unknown check {kind!r}; known: {', '.join(sorted(CHECKS))}")
        runner = CHECKS[kind]
        args = {k: v for k, v in spec.items() if k not in ("check", "label")}
        for key in args:
            if key not in runner.required + runner.optional:
                raise self.error(f"check {kind!r} takes no argument {key!r}", key)
        for key in runner.required:
            if key not in args:
                raise self.error(f"check {kind!r} needs argument {key!r}", kind)
        for key, value in args.items():
            if key in runner.names and value not in names:
                raise UnresolvedReference(f"check {kind!r}: {key} = {value!r} is not defined")
        if runner.needs_split and split is None:
            raise self.error(f"check {kind!r} needs an adapted split chart", kind)
        return CheckSpec(kind, spec.get("label", kind), args)


# ------------------------------------------------------------------ checking
class _Check:
    def __init__(self, func, required=(), optional=(), names=(), needs_split=False):
        self.func = func
        self.required = tuple(required)
        self.optional = tuple(optional)
        self.names = tuple(names)
        self.needs_split = needs_split


CHECKS: dict = {}


def _register(name, required=(), optional=(), names=None, needs_split=False):
    def deco(func):
        refs = names if names is not None else tuple(required) + tuple(optional)
        CHECKS[name] = _Check(func, required, optional, refs, needs_split)
        return func

    return deco


def _get(sc: Scenario, name):
    for table in (sc.tensors, sc.volumes, sc.connections, sc.functions):
        if name in table:
            return table[name]
    raise UnresolvedReference(name)


def _scalar(sc: Scenario, value):
    if isinstance(value, str) and value in sc.functions:
        return sc.functions[value]
    return sc.chart.parse(str(value))


def _expected(sc: Scenario, value, kind):
    if value in sc.tensors:
        return sc.tensors[value]
    return parse_tensor(str(value), sc.chart, kind)


def _connection(sc: Scenario, args):
    if "connection" in args:
        return sc.connections[args["connection"]]
    return ConnectionForm(sc.split)


def _geometric_data(sc: Scenario, name):
    return sc.cached(("decompose", name), lambda: coupling.decompose(sc.tensors[name], sc.split, sc.samples))


def _compare(details, value, sc, args, kind, key="value"):
    details[key] = _fmt(value)
    if "expect" not in args:
        return PASS
    expected = _expected(sc, args["expect"], kind)
    if value == expected:
        return PASS
    details["expected"] = _fmt(expected)
    details["residual"] = _fmt(value - expected)
    return FAIL


def _fmt(t):
    """Print a tensor in the coordinate frame so the text re-parses on the chart."""
    if getattr(t, "connection", None) is not None:
        t = foliated.to_coordinate(t)
    return format_tensor(t)


def _status(ok):
    return PASS if ok else FAIL


@_register("jacobi", ["bivector"])
def _check_jacobi(sc, args, details):
    pi = sc.tensors[args["bivector"]]
    ok = poisson.jacobi_check(pi)
    if not ok:
        from modcalc.exterior import schouten_bracket

        details["residual"] = _fmt(schouten_bracket(pi, pi))
    return _status(ok)


@_register("modular", ["bivector", "volume"], ["expect"], names=["bivector", "volume"])
def _check_modular(sc, args, details):
    z = poisson.modular_field(sc.tensors[args["bivector"]], sc.volumes[args["volume"]])
    return _compare(details, z, sc, args, "multivector", "Z")


@_register("modular_transition", ["bivector", "volume", "factor"], names=["bivector", "volume"])
def _check_modular_transition(sc, args, details):
    f = _scalar(sc, args["factor"])
    details["factor"] = str(f)
    return _status(poisson.modular_transition_check(sc.tensors[args["bivector"]], sc.volumes[args["volume"]], f))


@_register(
    "foliated_modular", ["bivector", "volume"], ["connection", "expect"],
    names=["bivector", "volume", "connection"], needs_split=True,
)
def _check_foliated_modular(sc, args, details):
    pf = poisson.PoissonFoliationData(sc.tensors[args["bivector"]], sc.split)
    z = poisson.foliated_modular_field(pf, sc.volumes[args["volume"]], _connection(sc, args))
    return _compare(details, z, sc, args, "multivector", "Z_P")


@_register("reeb", ["volume"], ["connection", "expect"], names=["volume", "connection"], needs_split=True)
def _check_reeb(sc, args, details):
    gamma = _connection(sc, args)
    lam = foliated.reeb_form(sc.volumes[args["volume"]], gamma)
    closed = foliated.d01(lam, gamma).is_zero()
    details["d01_lambda_zero"] = closed
    status = _compare(details, foliated.to_coordinate(lam), sc, args, "form", "lambda")
    return status if closed else FAIL


@_register("divergence_form", ["volume"], ["connection", "expect"], names=["volume", "connection"], needs_split=True)
def _check_divergence_form(sc, args, details):
    theta = foliated.divergence_form(sc.volumes[args["volume"]], _connection(sc, args))
    return _compare(details, theta, sc, args, "form", "theta")


@_register("casimir", ["bivector", "function"], names=["bivector"])
def _check_casimir(sc, args, details):
    pi = sc.tensors[args["bivector"]]
    f = _scalar(sc, args["function"])
    ham = poisson.hamiltonian_field(pi, f)
    details["function"] = str(f)
    if not ham.is_zero():
        details["residual"] = _fmt(ham)
    return _status(ham.is_zero())


@_register("casimir_member", ["form", "bivector"], ["connection"], needs_split=True)
def _check_casimir_member(sc, args, details):
    pf = poisson.PoissonFoliationData(sc.tensors[args["bivector"]], sc.split)
    return _status(poisson.casimir_complex_member(sc.tensors[args["form"]], pf, _connection(sc, args)))


@_register(
    "casimir_cocycle", ["bivector"], ["form", "volume", "connection"], needs_split=True,
)
def _check_casimir_cocycle(sc, args, details):
    """Cocycle test for a given (1,0)-form, or for the divergence form of a leaf volume."""
    gamma = _connection(sc, args)
    if "form" in args:
        theta = sc.tensors[args["form"]]
    elif "volume" in args:
        theta = foliated.divergence_form(sc.volumes[args["volume"]], gamma)
    else:
        raise ValueError("casimir_cocycle needs 'form' or 'volume'")
    details["theta"] = _fmt(theta)
    pf = poisson.PoissonFoliationData(sc.tensors[args["bivector"]], sc.split)
    return _status(poisson.casimir_cocycle_check(theta, pf, gamma))


@_register(
    "mods_reeb", ["bivector", "leaf_volume", "transversal_volume"], ["connection"], needs_split=True,
)
def _check_mods_reeb(sc, args, details):
    pf = poisson.PoissonFoliationData(sc.tensors[args["bivector"]], sc.split)
    return _status(
        poisson.mods_reeb_identity_check(
            pf, sc.volumes[args["leaf_volume"]], sc.volumes[args["transversal_volume"]], _connection(sc, args)
        )
    )


@_register("is_coupling", ["bivector"], needs_split=True)
def _check_is_coupling(sc, args, details):
    generic, bad = coupling.coupling_status(sc.tensors[args["bivector"]], sc.split, sc.samples)
    if bad:
        details["degenerate_samples"] = [list(map(str, pt)) for pt in bad]
    return _status(generic and not bad)


def _format_data(gd, details):
    details["Gamma"] = [[str(v) for v in row] for row in gd.gamma.gamma]
    details["sigma"] = _fmt(gd.sigma)
    details["P"] = _fmt(gd.P.bivector)


@_register("decompose", ["bivector"], needs_split=True)
def _check_decompose(sc, args, details):
    gd = _geometric_data(sc, args["bivector"])
    _format_data(gd, details)
    round_trip = coupling.reconstruct(gd) == sc.tensors[args["bivector"]]
    details["round_trip"] = round_trip
    return _status(round_trip)


@_register("structure_equations", ["bivector"], needs_split=True)
def _check_structure_equations(sc, args, details):
    rep = coupling.structure_equations_check(_geometric_data(sc, args["bivector"]))
    details.update({"SE0": rep.se0_ok, "SE1": rep.se1_ok, "SE2": rep.se2_ok, "jacobi_P": rep.jacobi_ok})
    for key, value in rep.details.items():
        details[f"residual_{key}"] = _fmt(value) if hasattr(value, "components") else str(value)
    return _status(rep.ok)


@_register("coupling_modular", ["bivector", "volume"], needs_split=True)
def _check_coupling_modular(sc, args, details):
    md = coupling.modular_decomposition_check(_geometric_data(sc, args["bivector"]), sc.volumes[args["volume"]])
    details["Z"] = _fmt(md.Z)
    details["Z_10"] = _fmt(md.Z10)
    details["Z_01"] = _fmt(md.Z01)
    details["sigma_power_identity"] = md.sigma_power_ok
    details["curvature_identity"] = md.curvature_identity_ok
    if not md.ok:
        details["residual_10"] = _fmt(md.Z10 - md.expected10)
        details["residual_01"] = _fmt(md.Z01 - md.expected01)
    return _status(md.ok)


@_register("gauge", ["bivector", "mu"], ["expect"], names=["bivector", "mu"], needs_split=True)
def _check_gauge(sc, args, details):
    new = coupling.gauge_transform(sc.tensors[args["bivector"]], sc.tensors[args["mu"]], sc.samples, sc.split)
    is_poisson = poisson.jacobi_check(new)
    details["jacobi"] = is_poisson
    status = _compare(details, new, sc, args, "multivector", "Pi_gauged")
    return status if is_poisson else FAIL


@_register("gauge_relations", ["bivector", "mu", "volume"], needs_split=True)
def _check_gauge_relations(sc, args, details):
    new, residuals = coupling.gauge_relations(
        sc.tensors[args["bivector"]], sc.tensors[args["mu"]], sc.volumes[args["volume"]], sc.split, sc.samples
    )
    details["Pi_gauged"] = _fmt(new)
    for key, value in residuals.items():
        details[f"residual_{key}"] = _fmt(value) if hasattr(value, "components") else str(value)
    return _status(not residuals)


@_register("unimodularity_certificate", ["bivector", "volume"], needs_split=True)
def _check_unimodularity(sc, args, details):
    cert = coupling.unimodularity_certificate(_geometric_data(sc, args["bivector"]), sc.volumes[args["volume"]])
    details["verdict"] = cert.verdict
    details["zp_zero"] = cert.zp_zero
    details["theta_closed_zero"] = cert.theta_closed_zero
    if cert.verdict != "unimodular-certified":
        details["Z_P"] = _fmt(cert.foliated_modular)
        details["theta"] = _fmt(cert.theta)
        return INCONCLUSIVE
    return PASS


@_register("hamiltonian_certificate", ["bivector", "volume", "certificate"], names=["bivector", "volume"])
def _check_hamiltonian(sc, args, details):
    value = args["certificate"]
    if isinstance(value, str) and value in sc.tensors:
        cert = sc.tensors[value]
    else:
        cert = _scalar(sc, value)
    details["certificate"] = _fmt(cert) if isinstance(cert, DifferentialForm) else str(cert)
    pi = sc.tensors[args["bivector"]]
    omega = sc.volumes[args["volume"]]
    ok = coupling.hamiltonian_certificate(pi, omega, cert)
    details["Z"] = _fmt(poisson.modular_field(pi, omega))
    return _status(ok)


@_register("flat_coupling_build", ["sigma", "P"], ["leaf_samples", "omega"], names=["sigma", "P", "omega"], needs_split=True)
def _check_flat_coupling_build(sc, args, details):
    leaf = None
    if "leaf_samples" in args:
        leaf = {"samples": [[Fraction(str(v)) for v in pt] for pt in args["leaf_samples"]]}
        if "omega" in args:
            leaf["omega"] = sc.tensors[args["omega"]]
    result = coupling.flat_coupling_build(sc.split, sc.tensors[args["sigma"]], sc.tensors[args["P"]], leaf, sc.samples)
    details["Pi"] = _fmt(result.bivector)
    details.update({f"leaf_{k}": v for k, v in result.leaf_checks.items()})
    details["structure_equations"] = result.report.ok
    return _status(result.report.ok)


@_register("property_suite", ["name"], ["seed", "cases"], names=())
def _check_property_suite(sc, args, details):
    name = args["name"]
    if name not in properties.SUITES:
        raise UnknownCheckName(f"unknown property suite {name!r}")
    seed = args.get("seed", sc.seed)
    cases = args.get("cases", 100)
    result = properties.run_suite(name, seed, cases)
    details["seed"] = seed
    details["cases"] = result.cases
    details["checks"] = result.checks
    if result.skipped:
        details["skipped"] = result.skipped
    if result.failures:
        details["failures"] = [f"case {c}: {label}" for c, label, _ in result.failures[:10]]
    return _status(result.ok)


def run_check(sc: Scenario, spec: CheckSpec) -> CheckOutcome:
    """Run one check; kernel errors become a FAIL outcome with the message."""
    import time

    details: dict = {}
    start = time.perf_counter()
    try:
        status = CHECKS[spec.check].func(sc, spec.args, details)
    except (ModcalcError, ValueError, ArithmeticError, AssertionError) as exc:
        status = FAIL
        details["error"] = f"{type(exc).__name__}: {exc}"
    return CheckOutcome(spec.label, spec.check, status, details, time.perf_counter() - start)
