"""Command-line front end (``spinor-light``).

Every subcommand reads a JSON config (``--config``) or a built-in recipe
(``--recipe``), writes its table to ``--out`` (stdout when omitted) and,
when writing to a file, a ``<out>.manifest.json`` sidecar.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import ast
import io
import json
import math
import operator
import re
import sys
import time

import jsonschema
import numpy as np

from . import __version__, kernels, maxwell_bloch, medium, scattering, timedomain
from . import bvp_solver as bvp, sweep_engine as sweeps
from .errors import ConfigError, NotConverged, PhaseSingular, SpinorLightError
from .medium import MediumConfig
from .tables import write_series_csv

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
COMMANDS = ("dispersion", "scatter", "sweep", "bvp", "timedomain", "mb", "validate")

# fields that carry a frequency and therefore accept a "Hz" suffix
FREQUENCY_FIELDS = ("omega", "delta", "gamma", "d_omega")
MEDIUM_FIELDS = ("omega", "phase_s", "delta", "gamma", "v0", "g2n", "c", "length", "s_min", "hbar")

_number = {"oneOf": [{"type": "number"}, {"type": "string"}]}
_range = {
    "type": "object",
    "properties": {"start": _number, "stop": _number, "num": {"type": "integer", "minimum": 1}},
    "required": ["start", "stop", "num"],
    "additionalProperties": False,
}
CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "spinor-light config",
    "type": "object",
    "properties": {
        **{k: _number for k in MEDIUM_FIELDS},
        "d_omega": _number,
        "variant": {"enum": list(scattering.VARIANTS)},
        "axis": {"enum": list(scattering.AXES)},
        "grid": {"oneOf": [_range, {"type": "array", "items": _number, "minItems": 1}]},
        "dk": _range,
        "backend": {"type": "string"},
        "steps": {"type": "integer", "minimum": bvp.MIN_STEPS},
        "n_z": {"type": "integer", "minimum": 2},
        "t_max": _number,
        "kind": {"enum": ["auto", "dirac", "general"]},
        "courant": {"type": "number", "exclusiveMinimum": 0},
        "probe_rabi": {"type": "number", "exclusiveMinimum": 0},
        "workers": {"type": "integer", "minimum": 1},
    },
    "required": ["omega", "phase_s"],
    "additionalProperties": False,
}

COLUMN_DOCS = {
    "sweep": {"axis": "value of the swept parameter (SI units of that parameter)",
              "r2": "reflection probability |R|^2", "t2": "transmission probability |T|^2",
              "defect": "1 - |R|^2 - |T|^2 (zero without loss)"},
    "dispersion": {"dk": "wavenumber offset (1/m)", "omega_plus": "upper branch (rad/s)",
                   "omega_minus": "lower branch (rad/s)",
                   "asymptote": "v0 |sin S| dk, the large-dk line (rad/s)"},
    "timedomain": {"time": "s", "transmitted": "|E1(L,t)|^2 for a unit drive",
                   "reflected": "|E2(0,t)|^2 for a unit drive", "norm": "stored field norm"},
    "mb": {"time": "s",
           "transmitted": "|e1(L,t)|^2, e = probe Rabi frequency / omega "
                          "(divide by probe_rabi^2 for |T|^2)",
           "reflected": "|e2(0,t)|^2, same units as transmitted",
           "norm": "field plus atomic norm (photon-number weighted)"},
    "scatter / bvp (JSON)": {"r_re, r_im, t_re, t_im": "complex amplitudes R and T",
                             "r2, t2, defect": "as for sweep"},
}


# ---------------------------------------------------------------------------
# value parsing: numbers, "pi" expressions and unit suffixes
# ---------------------------------------------------------------------------

_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
        ast.Div: operator.truediv, ast.Pow: operator.pow, ast.USub: operator.neg,
        ast.UAdd: operator.pos}
_NAMES = {"pi": math.pi, "inf": math.inf}
_UNIT = re.compile(r"^(?P<expr>.*?)\s*(?P<unit>Hz|rad/s)?\s*$")


def _eval_node(node):
    if isinstance(node, ast.Expression):
        return _eval_node(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return float(node.value)
    if isinstance(node, ast.Name) and node.id in _NAMES:
        return _NAMES[node.id]
    if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
        return _OPS[type(node.op)](_eval_node(node.left), _eval_node(node.right))
    if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
        return _OPS[type(node.op)](_eval_node(node.operand))
    raise ValueError("unsupported expression")


def parse_value(raw, name: str = "value") -> float:
    """Number, arithmetic string (``"pi/4"``, ``"2*pi*1e3"``) or, for frequencies, ``"5 Hz"``."""
    if isinstance(raw, bool):
        raise ConfigError(f"{name}: expected a number, got {raw!r}")
    if isinstance(raw, (int, float)):
        return float(raw)
    m = _UNIT.match(str(raw))
    expr, unit = m.group("expr"), m.group("unit")
    if unit and name not in FREQUENCY_FIELDS:
        raise ConfigError(f"{name}: unit {unit!r} only allowed on {FREQUENCY_FIELDS}")
    try:
        value = _eval_node(ast.parse(expr.strip(), mode="eval"))
    except (SyntaxError, ValueError, ZeroDivisionError, OverflowError):
        raise ConfigError(f"{name}: cannot parse {raw!r}") from None
    return value * (2 * math.pi if unit == "Hz" else 1.0)


# ---------------------------------------------------------------------------
# config handling
# ---------------------------------------------------------------------------

RECIPES = {
    "fig4": {"omega": 1.0, "phase_s": "pi/2", "delta": 1.0, "v0": 1.0,
             "dk": {"start": -5.0, "stop": 5.0, "num": 201}},
    "fig5a": {"omega": 1.0, "phase_s": "pi/3", "delta": 0.0, "v0": 1.0, "d_omega": 1.0,
              "axis": "length", "grid": {"start": 0.0, "stop": 12.0, "num": 601},
              "variant": "zero_delta"},
    "fig5b": {"omega": 1.0, "phase_s": "pi/4", "delta": 0.0, "v0": 1.0, "d_omega": 1.0,
              "axis": "length", "grid": {"start": 0.0, "stop": 12.0, "num": 601},
              "variant": "zero_delta"},
    "fig5c": {"omega": 1.0, "phase_s": "pi/6", "delta": 0.0, "v0": 1.0, "d_omega": 1.0,
              "axis": "length", "grid": {"start": 0.0, "stop": 12.0, "num": 601},
              "variant": "zero_delta"},
    # L = v0 = 1, so delta reads as L / lambda_C
    "fig6": {"omega": 1.0, "phase_s": "pi/2", "delta": 1.0, "v0": 1.0, "length": 1.0,
             "d_omega": 0.0, "axis": "delta", "grid": {"start": 0.0, "stop": 5.0, "num": 501},
             "variant": "gap_center"},
    "loss": {"omega": 10.0, "phase_s": "pi/2", "delta": 1.0, "v0": 1.0, "length": 1.0,
             "axis": "gamma", "grid": {"start": 0.0, "stop": 500.0, "num": 201},
             "variant": "lossy"},
}


def validate_document(doc) -> dict:
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    try:
        jsonschema.validate(doc, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {where}: {exc.message}") from None
    return doc


def medium_from_document(doc: dict) -> MediumConfig:
    raw = {k: parse_value(doc[k], k) for k in MEDIUM_FIELDS if k in doc}
    try:
        return MediumConfig.from_dict(raw)
    except PhaseSingular as exc:
        raise ConfigError(str(exc)) from None


def _range_values(spec, name) -> np.ndarray:
    if isinstance(spec, list):
        return np.array([parse_value(x, name) for x in spec])
    return np.linspace(parse_value(spec["start"], name), parse_value(spec["stop"], name),
                       spec["num"])


def normalized_document(doc: dict, cfg: MediumConfig) -> dict:
    """Config with every value resolved to plain numbers; re-parses to the same config."""
    out = {k: v for k, v in doc.items() if k not in MEDIUM_FIELDS}
    out.update(cfg.to_dict())
    if "d_omega" in out:
        out["d_omega"] = parse_value(out["d_omega"], "d_omega")
    if "t_max" in out:
        out["t_max"] = parse_value(out["t_max"], "t_max")
    if "grid" in doc:
        out["grid"] = [float(x) for x in _range_values(doc["grid"], doc.get("axis", "grid"))]
    return out


def load_config(args) -> dict | None:
    if args.recipe:
        if args.recipe not in RECIPES:
            raise ConfigError(f"unknown recipe {args.recipe!r}; expected one of {sorted(RECIPES)}")
        doc = dict(RECIPES[args.recipe])
    elif args.config:
        try:
            with open(args.config) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        if not text.strip():
            return None
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
    else:
        return None
    if doc == {}:
        return None
    return validate_document(doc)


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

class _Out:
    def __init__(self, path):
        self.path = path

    def text(self, content: str) -> None:
        if self.path in (None, "-"):
            sys.stdout.write(content)
        else:
            with open(self.path, "w", newline="") as fh:
                fh.write(content)

    def manifest(self, command: str, doc: dict, start: float, extra: dict | None = None) -> dict:
        man = {"command": command, "config": doc, "version": __version__,
               "kernel_backend": kernels.kernel_backend(),
               "wall_time": time.perf_counter() - start, **(extra or {})}
        if self.path not in (None, "-"):
            with open(f"{self.path}.manifest.json", "w") as fh:
                json.dump(man, fh, indent=1)
        return man


def _json(obj) -> str:
    return json.dumps(obj, indent=1, default=float) + "\n"


def _settings(doc: dict, args) -> dict:
    s = {}
    for key in ("steps", "n_z", "t_max", "kind", "courant", "probe_rabi"):
        if key in doc:
            s[key] = doc[key]
    if args.steps is not None:
        s["steps"] = args.steps
    if args.grid is not None:
        s["n_z"] = args.grid
    if "t_max" in s:
        s["t_max"] = parse_value(s["t_max"], "t_max")
    return s


def _derived(cfg: MediumConfig) -> dict:
    out = {"v0": cfg.v0, "slow_light_ratio": cfg.slow_light_ratio,
           "characteristic_speed": medium.characteristic_speed(cfg),
           "effective_decay": medium.effective_decay(cfg)}
    if cfg.length > 0:
        out["oscillation_period"] = medium.oscillation_period(cfg)
    if cfg.delta != 0:
        out["compton_length"] = medium.compton_length(cfg)
        out["effective_mass"] = medium.effective_mass(cfg)
    return out


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_dispersion(doc, args, out: _Out) -> int:
    start = time.perf_counter()
    cfg = medium_from_document(doc)
    speed = cfg.v0 * abs(cfg.sin_s)
    spec = doc.get("dk")
    if spec is None:
        unit = abs(cfg.delta) / speed if cfg.delta else 1.0 / max(cfg.length, 1e-300)
        spec = {"start": -5.0 * unit, "stop": 5.0 * unit, "num": 201}
    if args.grid is not None:
        spec = {**spec, "num": args.grid}
    dk = _range_values(spec, "dk")
    pts = medium.dispersion(cfg, dk)
    buf = io.StringIO()
    write_series_csv(buf, {"dk": dk, "omega_plus": pts.omega_plus,
                           "omega_minus": pts.omega_minus, "asymptote": speed * np.abs(dk)})
    out.text(buf.getvalue())
    out.manifest("dispersion", normalized_document(doc, cfg), start, {"points": int(dk.size)})
    return EXIT_OK


def cmd_scatter(doc, args, out: _Out) -> int:
    start = time.perf_counter()
    cfg = medium_from_document(doc)
    dw = parse_value(doc.get("d_omega", 0.0), "d_omega")
    variant = doc.get("variant", "exact")
    res = scattering.scatter_variant(cfg, dw, variant)
    body = {"variant": variant, "d_omega": dw, **res.to_dict(), **_derived(cfg)}
    out.text(_json(body))
    out.manifest("scatter", normalized_document(doc, cfg), start)
    return EXIT_OK


def _sweep_plan(doc, args) -> sweeps.SweepPlan:
    cfg = medium_from_document(doc)
    if "axis" not in doc or "grid" not in doc:
        raise ConfigError("sweep needs 'axis' and 'grid'")
    grid = _range_values(doc["grid"], doc["axis"])
    backend = args.backend or doc.get("backend", "scatter")
    name, variant = sweeps.parse_backend(backend)
    if ":" not in backend and name == "scatter":
        variant = doc.get("variant", "exact")
    known = sweeps.BACKEND_SETTINGS[name]
    settings = {k: v for k, v in _settings(doc, args).items() if k in known}
    return sweeps.SweepPlan(cfg, doc["axis"], tuple(grid), name, variant,
                            parse_value(doc.get("d_omega", 0.0), "d_omega"), settings)


def cmd_sweep(doc, args, out: _Out) -> int:
    if "dk" in doc and "axis" not in doc:
        return cmd_dispersion(doc, args, out)
    plan = _sweep_plan(doc, args)
    workers = args.workers or doc.get("workers") or sweeps.default_workers()
    run = sweeps.run_sweep(plan, workers)
    out.text(run.table.to_csv())
    if out.path not in (None, "-"):
        run.manifest.write(f"{out.path}.manifest.json")
    failed = [p for p in run.manifest.points if p["status"].startswith("error")]
    for p in failed:
        print(f"row {p['index']} ({p['value']:g}): {p['status']}", file=sys.stderr)
    return EXIT_NUMERIC if failed else EXIT_OK


def cmd_bvp(doc, args, out: _Out) -> int:
    start = time.perf_counter()
    cfg = medium_from_document(doc)
    dw = parse_value(doc.get("d_omega", 0.0), "d_omega")
    steps = _settings(doc, args).get("steps", 4096)
    sol = bvp.solve_rt(cfg, dw, steps)
    ref = scattering.scatter(cfg, dw)
    body = {"steps": sol.step_count, "r_re": sol.r.real, "r_im": sol.r.imag,
            "t_re": sol.t.real, "t_im": sol.t.imag, "r2": sol.r2, "t2": sol.t2,
            "defect": 1.0 - sol.r2 - sol.t2, "estimated_error": sol.estimated_error,
            "deviation_from_closed_form": max(abs(sol.r - ref.r), abs(sol.t - ref.t))}
    out.text(_json(body))
    out.manifest("bvp", normalized_document(doc, cfg), start, {"steps": steps})
    return EXIT_OK


def _steady_summary(res, extra=None) -> dict:
    return {"r2": res.r2, "t2": res.t2, "converged": res.converged, "drift": res.drift,
            **(extra or {})}


def cmd_timedomain(doc, args, out: _Out) -> int:
    start = time.perf_counter()
    cfg = medium_from_document(doc)
    dw = parse_value(doc.get("d_omega", 0.0), "d_omega")
    s = {**sweeps.BACKEND_SETTINGS["timedomain"], **_settings(doc, args)}
    res = timedomain.run_to_steady_state(cfg, dw, s["n_z"], s["t_max"], kind=s["kind"],
                                         courant=s["courant"])
    buf = io.StringIO()
    res.record.to_csv(buf)
    out.text(buf.getvalue())
    summary = _steady_summary(res)
    print(_json(summary), end="", file=sys.stderr)
    out.manifest("timedomain", normalized_document(doc, cfg), start,
                 {"settings": s, "result": summary})
    return EXIT_OK if res.converged else EXIT_NUMERIC


def cmd_mb(doc, args, out: _Out) -> int:
    start = time.perf_counter()
    cfg = medium_from_document(doc)
    dw = parse_value(doc.get("d_omega", 0.0), "d_omega")
    s = {**sweeps.BACKEND_SETTINGS["mb"], **_settings(doc, args)}
    res = maxwell_bloch.run_mb_steady(cfg, dw, s["n_z"], s["t_max"], probe_rabi=s["probe_rabi"])
    buf = io.StringIO()
    res.record.to_csv(buf)
    out.text(buf.getvalue())
    summary = _steady_summary(res, {k: v for k, v in res.diagnostics.items()})
    print(_json(summary), end="", file=sys.stderr)
    out.manifest("mb", normalized_document(doc, cfg), start, {"settings": s, "result": summary})
    return EXIT_OK if res.converged else EXIT_NUMERIC


def cmd_validate(args) -> int:
    from . import validation

    select = None
    if args.criteria:
        try:
            select = {int(x) for x in args.criteria.split(",")}
        except ValueError:
            raise ConfigError("--criteria takes comma-separated integers") from None
    results = validation.run_all(select, echo=print)
    passed = sum(c.passed for c in results)
    print(f"{passed}/{len(results)} criteria passed")
    return EXIT_OK if passed == len(results) else 1


HANDLERS = {"dispersion": cmd_dispersion, "scatter": cmd_scatter, "sweep": cmd_sweep,
            "bvp": cmd_bvp, "timedomain": cmd_timedomain, "mb": cmd_mb}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinor-light",
        description="Spinor slow light: dispersion, scattering and time-domain solvers.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--schema", action="store_true",
                        help="print the config schema and output column docs, then exit")
    sub = parser.add_subparsers(dest="command")
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--schema", action="store_true", help=argparse.SUPPRESS)
        if name == "validate":
            p.add_argument("--criteria", help="comma-separated criterion numbers")
            continue
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--recipe", help=f"built-in parameters: {', '.join(RECIPES)}")
        p.add_argument("--backend", help=f"sweep backend: {', '.join(sweeps.BACKENDS)} "
                                         "(scatter:<variant> picks a closed form)")
        p.add_argument("--steps", type=int, help="RK4 steps (bvp)")
        p.add_argument("--grid", type=int, help="grid size (n_z, or dk points)")
        p.add_argument("--workers", type=int,
                       help=f"sweep threads (default ${sweeps.WORKERS_ENV} or 1)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.schema or getattr(args, "schema", False):
        print(_json({"config": CONFIG_SCHEMA, "columns": COLUMN_DOCS,
                     "recipes": RECIPES, "exit_codes": {"ok": 0, "config": 2, "numerical": 3}}),
              end="")
        return EXIT_OK
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "validate":
            return cmd_validate(args)
        doc = load_config(args)
        if doc is None:
            parser.print_usage(sys.stderr)
            print(f"{parser.prog} {args.command}: a --config or --recipe is required",
                  file=sys.stderr)
            return EXIT_CONFIG
        return HANDLERS[args.command](doc, args, _Out(args.out))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NotConverged as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except SpinorLightError as exc:
        print(f"numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
