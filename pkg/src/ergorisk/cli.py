"""Command-line front end.

Commands::

    ergorisk assess --model model.json [--t 50 100] [--out csv|json]
    ergorisk toy --case c --sweep time --grid 0.5:50:12:log
    ergorisk reproduce --case all --strategy two_rate --t 1,50,100
    ergorisk oracle --n 1000000 --seed 7 --t 50 --y-mode non_ergodic

Floats are printed in scientific notation with six significant digits so
identical invocations give byte-identical output. Exit status is 2 for
input problems and 3 when an integral or calibration fails to converge.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np
from jsonschema import Draft202012Validator
from jsonschema.exceptions import best_match

from . import casebook, pulse_oracle, toymodel
from .errors import CalibrationError, ConvergenceError, DomainError, HazardTableError
from .fragility import decompose
from .hazard import PowerLaw, PulseLognormal, Tabulated
from .probcore import LognormalSpec
from .riskengine import QuadratureSettings, assess

EXIT_INPUT = 2
EXIT_NUMERIC = 3

_LOGNORMAL = {
    "type": "object",
    "required": ["median", "dispersion"],
    "additionalProperties": False,
    "properties": {
        "median": {"type": "number", "exclusiveMinimum": 0},
        "dispersion": {"type": "number", "minimum": 0},
    },
}
_POSITIVE = {"type": "number", "exclusiveMinimum": 0}

MODEL_SCHEMA = {
    "type": "object",
    "required": ["fragility", "hazard"],
    "additionalProperties": False,
    "properties": {
        "fragility": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"x": _LOGNORMAL, "y": _LOGNORMAL, "z": _LOGNORMAL},
            "oneOf": [
                {"required": ["x", "y"], "not": {"required": ["z"]}},
                {"required": ["x", "z"], "not": {"required": ["y"]}},
            ],
        },
        "hazard": {
            "type": "object",
            "minProperties": 1,
            "maxProperties": 1,
            "additionalProperties": False,
            "properties": {
                "pulse": {
                    "type": "object",
                    "required": ["eta", "median", "dispersion"],
                    "additionalProperties": False,
                    "properties": {
                        "eta": {"type": "number", "minimum": 0},
                        "median": _POSITIVE,
                        "dispersion": {"type": "number", "minimum": 0},
                    },
                },
                "power_law": {
                    "type": "object",
                    "required": ["k0", "k"],
                    "additionalProperties": False,
                    "properties": {"k0": _POSITIVE, "k": _POSITIVE, "im_min": _POSITIVE},
                },
                "table": {
                    "oneOf": [
                        {"type": "string"},
                        {
                            "type": "object",
                            "required": ["path"],
                            "additionalProperties": False,
                            "properties": {"path": {"type": "string"}, "extrapolate": {"type": "boolean"}},
                        },
                    ]
                },
            },
        },
        "analysis": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "t_D": {"type": "array", "minItems": 1, "items": _POSITIVE},
                "margin": _POSITIVE,
                "quadrature": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "u_span": _POSITIVE,
                        "n_outer": {"type": "integer", "minimum": 3},
                        "n_inner": {"type": "integer", "minimum": 3},
                        "rel_tol": _POSITIVE,
                    },
                },
            },
        },
    },
}

REPORT_FIELDS = (
    "t_D", "lambda_rtr", "lambda_ensemble", "lambda_exact", "pf_rtr", "pf_exact", "pf_ensemble",
    "err_pct_pf", "err_pct_lambda", "error_parameter", "var_product", "ratio_pf", "ratio_lambda",
)


class InputError(Exception):
    """Bad command-line input or model file; maps to exit status 2."""


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(value).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if math.isnan(v):
        return "nan"
    return f"{v:.5e}"


def _json_value(value):
    if value is None or isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return int(value)
    v = float(value)
    return None if math.isnan(v) else float(f"{v:.5e}")


def write_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_json(header, rows) -> str:
    return json.dumps([{k: _json_value(v) for k, v in zip(header, row)} for row in rows], indent=2) + "\n"


# -- model files ------------------------------------------------------------


def load_model(path):
    """Parse and validate a model file; returns (x, y, hazard, analysis dict)."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise InputError(f"cannot read model file {path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON: {exc}") from None
    err = best_match(Draft202012Validator(MODEL_SCHEMA).iter_errors(doc))
    if err is not None:
        raise InputError(f"{path}: schema violation at {err.json_path}: {err.message}")

    try:
        frag = doc["fragility"]
        x = LognormalSpec(**frag["x"])
        y = LognormalSpec(**frag["y"]) if "y" in frag else decompose(LognormalSpec(**frag["z"]), x)

        (kind, spec), = doc["hazard"].items()
        if kind == "pulse":
            hazard = PulseLognormal(spec["eta"], LognormalSpec(spec["median"], spec["dispersion"]))
        elif kind == "power_law":
            hazard = PowerLaw(spec["k0"], spec["k"], spec.get("im_min"))
        else:
            table = {"path": spec} if isinstance(spec, str) else spec
            table_path = Path(table["path"])
            if not table_path.is_absolute():
                table_path = path.parent / table_path
            try:
                hazard = Tabulated.from_csv(table_path, table.get("extrapolate", False))
            except OSError as exc:
                raise InputError(f"cannot read hazard table {table_path}: {exc.strerror or exc}") from None
    except (DomainError, HazardTableError) as exc:
        raise InputError(f"{path}: {exc}") from None
    return x, y, hazard, doc.get("analysis", {})


def _quadrature(overrides):
    try:
        return QuadratureSettings(**overrides)
    except DomainError as exc:
        raise InputError(f"quadrature settings: {exc}") from None


# -- commands -----------------------------------------------------------------


def cmd_assess(args):
    x, y, hazard, analysis = load_model(args.model)
    q = _quadrature(analysis.get("quadrature", {}))
    t_values = args.t or analysis.get("t_D") or [50.0]
    margin = analysis.get("margin")
    rows = []
    for t in t_values:
        d = assess(x, y, hazard, margin, t, q).as_dict()
        rows.append([d[f] for f in REPORT_FIELDS])
    return REPORT_FIELDS, rows


def parse_grid(spec: str):
    """``start:stop:num[:log]`` or a comma-separated list of values."""
    try:
        if ":" in spec:
            parts = spec.split(":")
            if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] not in ("lin", "log")):
                raise ValueError
            start, stop, num = float(parts[0]), float(parts[1]), int(parts[2])
            if num < 1:
                raise ValueError
            if len(parts) == 4 and parts[3] == "log":
                return np.geomspace(start, stop, num).tolist()
            return np.linspace(start, stop, num).tolist()
        return [float(v) for v in spec.split(",") if v.strip()]
    except ValueError:
        raise InputError(f"bad grid specification {spec!r}; use start:stop:num[:log] or v1,v2,...") from None


def _toy_problem(args):
    p = toymodel.TOY_CASES[args.case]
    if args.eta is not None:
        p = toymodel.ToyProblem(args.eta, p.s, p.x, p.y)
    return p


def cmd_toy(args):
    p = _toy_problem(args)
    if args.sweep == "sigma":
        axis = "sigma_lnY"
        default = ",".join(f"{p.y.dispersion * f:.6g}" for f in np.linspace(0.8, 1.2, 9))
    else:
        axis = "t_D"
        default = "1:200:20:log"
    grid = parse_grid(args.grid or default)
    try:
        rows = toymodel.toy_error_sweep(p, axis, grid, t_D=args.t, convention=args.convention)
    except DomainError as exc:
        raise InputError(str(exc)) from None
    return ("axis", "pf_exact", "pf_ensemble", "err_pct"), rows


REPRODUCE_HEADER = (
    ("case", "t_D", "strategy", "hazard_k0", "hazard_k")
    + casebook.TARGET_FIELDS
    + tuple(f"paper_{f}" for f in casebook.TARGET_FIELDS)
    + tuple(f"delta_{f}" for f in casebook.TARGET_FIELDS)
)


def _parse_t_list(values):
    out = []
    for v in values:
        for part in str(v).split(","):
            if part.strip():
                try:
                    t = float(part)
                except ValueError:
                    raise InputError(f"bad lifetime {part!r}") from None
                if not t > 0:
                    raise InputError("lifetimes must be positive")
                out.append(t)
    return out


def cmd_reproduce(args):
    if args.case == "all":
        cases = casebook.builtin_cases()
    else:
        try:
            cases = [casebook.get_case(int(args.case))]
        except (ValueError, DomainError):
            raise InputError(f"--case must be 1..7 or 'all', got {args.case!r}") from None
    t_values = _parse_t_list(args.t)
    rows = []
    for case in cases:
        for res in casebook.reproduce(case, t_values, args.strategy):
            model = res.model_columns()
            targets = res.paper_targets or {}
            row = [case.case_id, res.t_D, args.strategy, res.hazard_used.k0, res.hazard_used.k]
            row += [model[f] for f in casebook.TARGET_FIELDS]
            row += [targets.get(f) for f in casebook.TARGET_FIELDS]
            row += [res.deltas.get(f) for f in casebook.TARGET_FIELDS]
            rows.append(row)
    return REPRODUCE_HEADER, rows


def cmd_oracle(args):
    base = toymodel.TOY_CASES[args.case]

    def spec(default, median, dispersion):
        return LognormalSpec(default.median if median is None else median,
                             default.dispersion if dispersion is None else dispersion)

    try:
        problem = toymodel.ToyProblem(
            base.eta if args.eta is None else args.eta,
            spec(base.s, args.s_median, args.s_dispersion),
            spec(base.x, args.x_median, args.x_dispersion),
            spec(base.y, args.y_median, args.y_dispersion),
        )
        config = pulse_oracle.PulseSimConfig(problem, args.t, args.n, args.seed, args.y_mode)
        est = pulse_oracle.simulate(config)
    except DomainError as exc:
        raise InputError(str(exc)) from None
    return ("pf_hat", "std_error", "n"), [[est.pf_hat, est.std_error, est.n]]


def build_parser():
    parser = argparse.ArgumentParser(prog="ergorisk", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("assess", help="rates and lifetime probabilities for a model file")
    p.add_argument("--model", required=True, help="JSON model file")
    p.add_argument("--t", type=float, nargs="+", help="lifetimes in years (overrides the model file)")
    p.set_defaults(func=cmd_assess)

    p = sub.add_parser("toy", help="error sweeps of the pulse-load toy problem")
    p.add_argument("--case", choices=sorted(toymodel.TOY_CASES), default="ref")
    p.add_argument("--sweep", choices=("sigma", "time"), default="time")
    p.add_argument("--grid", help="start:stop:num[:log] or comma list")
    p.add_argument("--t", type=float, default=50.0, help="lifetime for the sigma sweep")
    p.add_argument("--eta", type=float, help="pulse rate override (1/year)")
    p.add_argument("--convention", choices=toymodel.CONVENTIONS, default="printed")
    p.set_defaults(func=cmd_toy)

    p = sub.add_parser("reproduce", help="rebuild the frame-case result tables")
    p.add_argument("--case", default="all", help="1..7 or all")
    p.add_argument("--strategy", choices=casebook.STRATEGIES, default="two_rate")
    p.add_argument("--t", nargs="+", default=["1,50,100"], help="lifetimes, comma or space separated")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("oracle", help="Monte Carlo estimate for the toy problem")
    p.add_argument("--n", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--t", type=float, default=50.0)
    p.add_argument("--y-mode", choices=pulse_oracle.Y_MODES, default="non_ergodic")
    p.add_argument("--case", choices=sorted(toymodel.TOY_CASES), default="ref")
    p.add_argument("--eta", type=float)
    for name in ("s", "x", "y"):
        p.add_argument(f"--{name}-median", type=float)
        p.add_argument(f"--{name}-dispersion", type=float)
    p.set_defaults(func=cmd_oracle)

    for p in sub.choices.values():
        p.add_argument("--out", choices=("csv", "json"), default="csv")
        p.add_argument("--output", help="write to this file instead of stdout")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        header, rows = args.func(args)
    except InputError as exc:
        print(f"ergorisk: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ConvergenceError, CalibrationError) as exc:
        print(f"ergorisk: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    text = write_json(header, rows) if args.out == "json" else write_csv(header, rows)
    if args.output:
        try:
            Path(args.output).write_text(text)
        except OSError as exc:
            print(f"ergorisk: error: cannot write {args.output}: {exc.strerror or exc}", file=sys.stderr)
            return EXIT_INPUT
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
