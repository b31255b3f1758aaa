"""``segre-ode`` command line: JSON in, JSON (or a table) out.

Exit codes: 0 success, 2 schema error, 3 violated precondition.  Every
report echoes the numeric parameters it was computed with, and floats are
written with 17 significant digits so that reruns are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import bbsolver, fixtures, linalg3, numint
from .errors import SchemaError, SegreODEError
from .hypersurface import P0Hypersurface, associate_ode, recover_hypersurface, validate_hypersurface
from .ode import (NonminimalODE, ReducedODE, check_relations, fuchsian_test, ode_from_json_any,
                  reduce)
from .pipeline import VerdictParams, run_verdict
from .series import DEFAULT_ORDER, ORD_TOL, parse_complex

SCHEMA_VERSION = 1
EXIT_OK, EXIT_SCHEMA, EXIT_PRECONDITION = 0, 2, 3

COMMANDS = ("associate", "relations", "classify", "reduce", "solve-formal", "monodromy",
            "growth", "verdict", "segre-check", "centralizer", "map-linear")


@dataclass
class RunConfig:
    command: str
    input: str | None = None
    examples: list = field(default_factory=list)
    order: int = DEFAULT_ORDER
    tol_ord: float = ORD_TOL
    tol_res: float = 1e-9
    tol_trivial: float = numint.TRIVIAL_TOL
    loop_radius: float = numint.DEFAULT_RADIUS
    turns: float = 1.0
    path: str | None = None
    fmt: str = "json"
    jobs: int = 1
    sign: str = "+"
    theta: float | None = None
    r_min: float | None = None
    terms: int = 20
    basepoint: str = "1"
    psi1: str | None = None
    psi2: str | None = None
    points: str | None = None

    def validate(self):
        if self.command not in COMMANDS:
            raise SchemaError(f"unknown subcommand {self.command!r}")
        for name in ("tol_ord", "tol_res", "tol_trivial", "loop_radius"):
            if not getattr(self, name) > 0:
                raise SchemaError(f"{name} must be positive")
        if self.order < 4:
            raise SchemaError("order must be at least 4")
        if self.fmt not in ("json", "table"):
            raise SchemaError("format must be json or table")
        if self.sign not in ("+", "-"):
            raise SchemaError("sign must be '+' or '-'")
        if self.jobs < 1:
            raise SchemaError("jobs must be at least 1")

    def params(self) -> dict:
        keys = ("order", "tol_ord", "tol_res", "tol_trivial", "loop_radius", "turns", "sign")
        out = {k: getattr(self, k) for k in keys}
        if self.command == "growth":
            out["theta"] = self.theta
            out["r_min"] = self.r_min
        if self.path:
            out["path"] = json.loads(self.path)
        return out


# -- deterministic serialization ------------------------------------------------

def _float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x + 0.0, ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with floats at 17 significant digits and infinities as strings."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return dumps([obj.real, obj.imag], indent, _level)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {dumps(v, indent, _level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(isinstance(v, (int, float, np.number)) and not isinstance(v, bool) for v in seq):
            return "[" + ", ".join(dumps(v) for v in seq) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _table(report: dict, prefix: str = "") -> list:
    rows = []
    for k, v in report.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            rows.extend(_table(v, key + "."))
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            for i, item in enumerate(v):
                rows.extend(_table(item, f"{key}[{i}]."))
        else:
            rows.append((key, dumps(v, indent=0).replace("\n", "")))
    return rows


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return dumps(report) + "\n"
    rows = _table(report)
    width = max((len(k) for k, _ in rows), default=0)
    return "".join(f"{k.ljust(width)}  {v}\n" for k, v in rows)


# -- inputs -----------------------------------------------------------------------

def _load_input(text_or_path: str):
    if text_or_path == "-":
        raw = sys.stdin.read()
    elif text_or_path.lstrip().startswith(("{", "[")):
        raw = text_or_path
    else:
        try:
            with open(text_or_path, encoding="utf-8") as fh:
                raw = fh.read()
        except OSError as exc:
            raise SchemaError(f"cannot read input: {exc}") from None
    try:
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"malformed JSON: {exc}") from None


def _json_arg(text, what):
    try:
        return json.loads(text)
    except (json.JSONDecodeError, TypeError) as exc:
        raise SchemaError(f"malformed {what}: {exc}") from None


def _complex_arg(text) -> complex:
    obj = _json_arg(text, "complex number")
    return parse_complex(obj)


def _pair_arg(text):
    obj = _json_arg(text, "initial pair")
    if not (isinstance(obj, list) and len(obj) == 2):
        raise SchemaError("initial data must be a pair [z, dz]")
    return tuple(parse_complex(c) for c in obj)


class Subject:
    """One unit of work: a named example or a parsed JSON document."""

    def __init__(self, label, obj=None, example=None):
        self.label = label
        self.obj = obj
        self.example = example

    def hypersurface(self, order) -> P0Hypersurface:
        if self.example:
            return fixtures.parse_example(self.example, order).hypersurface
        return P0Hypersurface.from_json(self.obj, order)

    def is_hypersurface(self) -> bool:
        return self.example is None and isinstance(self.obj, dict) and "phi" in self.obj

    def ode(self, order):
        if self.example:
            return fixtures.parse_example(self.example, order).ode
        if self.is_hypersurface():
            return associate_ode(P0Hypersurface.from_json(self.obj, order))
        if isinstance(self.obj, dict) and isinstance(self.obj.get("ode"), dict):
            return ode_from_json_any(self.obj["ode"], order)
        return ode_from_json_any(self.obj, order)

    def nonminimal(self, order) -> NonminimalODE:
        ode = self.ode(order)
        return ode.as_nonminimal() if isinstance(ode, ReducedODE) else ode


# -- subcommands ---------------------------------------------------------------------

def _cmd_associate(cfg, subj):
    h = subj.hypersurface(cfg.order)
    ode = associate_ode(h)
    return {"hypersurface": {"m": h.m, "sign": h.sign_str},
            "validation": validate_hypersurface(h).to_json(), **_ode_body(ode)}


def _ode_body(ode):
    body = ode.to_json()
    body.pop("schema", None)
    return body


def _cmd_relations(cfg, subj):
    ode = subj.nonminimal(cfg.order)
    rep = check_relations(ode, cfg.sign)
    out = rep.to_json()
    if rep.passed:
        h = recover_hypersurface(ode, cfg.sign)
        out["recovered"] = {k: v for k, v in h.to_json().items() if k != "schema"}
    return out


def _cmd_classify(cfg, subj):
    target = subj.hypersurface(cfg.order) if subj.is_hypersurface() else subj.nonminimal(cfg.order)
    return fuchsian_test(target, cfg.tol_ord).to_json()


def _cmd_reduce(cfg, subj):
    red = reduce(subj.nonminimal(cfg.order), cfg.tol_ord)
    body = red.to_json()
    body.pop("schema", None)
    return body


def _cmd_solve_formal(cfg, subj):
    ode = subj.ode(cfg.order)
    red = ode if isinstance(ode, ReducedODE) else reduce(ode, cfg.tol_ord)
    sys_ = bbsolver.linearize(red)
    sol = bbsolver.formal_solve(sys_, cfg.order, cfg.tol_res)
    out = sol.to_json()
    out["coeffs"] = out["coeffs"][:cfg.terms]
    out["u_coeffs"] = out["u_coeffs"][:cfg.terms]
    out["system"] = sys_.to_json()
    out["l"] = red.l
    return out


def _loop(cfg):
    if cfg.path:
        path = numint.PathSpec.from_json(_json_arg(cfg.path, "path"))
        if path.kind != "circle":
            raise SchemaError("monodromy needs a circle path")
        return path.radius, path.theta0, path.turns
    return cfg.loop_radius, 0.0, cfg.turns


def _cmd_monodromy(cfg, subj):
    radius, theta0, turns = _loop(cfg)
    rep = numint.monodromy(subj.nonminimal(cfg.order), radius, theta0, turns, cfg.tol_trivial)
    return rep.to_json()


def _cmd_growth(cfg, subj):
    ode = subj.nonminimal(cfg.order)
    thetas = [cfg.theta] if cfg.theta is not None else None
    from .pipeline import growth_rays
    reps = [numint.growth_exponent(ode, (1.0, 1.0), th, cfg.loop_radius, cfg.r_min)
            for th in (thetas or growth_rays())]
    label = "irregular" if any(g.super_polynomial for g in reps) else "moderate"
    return {"growth": label, "rays": [g.to_json() for g in reps]}


def _cmd_verdict(cfg, subj):
    params = VerdictParams(cfg.order, cfg.tol_ord, cfg.tol_res, cfg.tol_trivial,
                           cfg.loop_radius, cfg.turns)
    return run_verdict(subj.nonminimal(cfg.order), params).to_json()


def _cmd_segre_check(cfg, subj):
    ode = subj.nonminimal(cfg.order)
    if subj.example:
        ws = fixtures.graph_samples()
        z, dz, d2z = fixtures.fixture_graph(subj.example, ws)
    else:
        samples = subj.obj.get("samples") if isinstance(subj.obj, dict) else None
        if not isinstance(samples, list) or not samples:
            raise SchemaError("segre-check input needs a non-empty 'samples' list")
        try:
            cols = {k: np.array([parse_complex(s[k]) for s in samples])
                    for k in ("w", "z", "dz", "d2z")}
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"malformed sample: {exc}") from None
        ws, z, dz, d2z = cols["w"], cols["z"], cols["dz"], cols["d2z"]
    return {"samples": int(np.size(ws)),
            "max_residual": numint.segre_residual(ode, ws, z, dz, d2z)}


def _cmd_centralizer(cfg, subj):
    if subj.example:
        raise SchemaError("centralizer takes a 3x3 matrix via --input")
    try:
        rep = linalg3.centralizer_report(linalg3.matrix_from_json(subj.obj))
    except ValueError as exc:
        raise SchemaError(str(exc)) from None
    return rep.to_json()


def _cmd_map_linear(cfg, subj):
    ode = subj.nonminimal(cfg.order)
    base = _complex_arg(cfg.basepoint)
    psi1 = _pair_arg(cfg.psi1) if cfg.psi1 else (1.0, 0.0)
    psi2 = _pair_arg(cfg.psi2) if cfg.psi2 else (0.0, 1.0)
    if cfg.points:
        pts = [parse_complex(p) for p in _json_arg(cfg.points, "points")]
    else:
        pts = list(base * np.exp(1j * np.linspace(0, np.pi / 2, 9)[1:]))
    amap = numint.associated_map_linear(ode, base, psi1, psi2)
    psi = amap.psi(pts)
    images = amap(np.zeros(len(pts)), pts)
    return {"basepoint": [base.real, base.imag],
            "psi1_init": [[c.real, c.imag] for c in map(complex, psi1)],
            "psi2_init": [[c.real, c.imag] for c in map(complex, psi2)],
            "points": [{"w": [complex(w).real, complex(w).imag],
                        "psi1": [p[0].real, p[0].imag], "psi2": [p[1].real, p[1].imag],
                        "image_w": [img[1].real, img[1].imag]}
                       for w, p, img in zip(pts, psi, images)]}


HANDLERS = {
    "associate": _cmd_associate, "relations": _cmd_relations, "classify": _cmd_classify,
    "reduce": _cmd_reduce, "solve-formal": _cmd_solve_formal, "monodromy": _cmd_monodromy,
    "growth": _cmd_growth, "verdict": _cmd_verdict, "segre-check": _cmd_segre_check,
    "centralizer": _cmd_centralizer, "map-linear": _cmd_map_linear,
}


def _run_one(cfg_dict, label, obj, example):
    """Worker entry point (top level so it can be pickled)."""
    cfg = RunConfig(**cfg_dict)
    subj = Subject(label, obj, example)
    try:
        return ("ok", HANDLERS[cfg.command](cfg, subj))
    except SchemaError as exc:
        return ("schema", str(exc))
    except SegreODEError as exc:
        return ("precondition", (exc.precondition, str(exc)))


def run(cfg: RunConfig) -> tuple[int, str, str]:
    """Execute a configuration; returns (exit code, stdout text, stderr text)."""
    try:
        cfg.validate()
        if cfg.path:
            _json_arg(cfg.path, "path")
        subjects = [Subject(ex, example=ex) for ex in cfg.examples]
        if cfg.input is not None:
            label = ("stdin" if cfg.input == "-" else
                     "inline" if cfg.input.lstrip().startswith(("{", "[")) else cfg.input)
            subjects.append(Subject(label, _load_input(cfg.input)))
        if not subjects:
            raise SchemaError("no input: pass --input or --example")
    except SchemaError as exc:
        return EXIT_SCHEMA, "", f"schema error: {exc}\n"
    cfg_dict = asdict(cfg)
    args = [(cfg_dict, s.label, s.obj, s.example) for s in subjects]
    if cfg.jobs > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_run_one, *zip(*args)))
    else:
        results = [_run_one(*a) for a in args]
    for kind, payload in results:
        if kind == "schema":
            return EXIT_SCHEMA, "", f"schema error: {payload}\n"
    for kind, payload in results:
        if kind == "precondition":
            name, msg = payload
            return EXIT_PRECONDITION, "", f"precondition violated: {name}: {msg}\n"
    head = {"schema": SCHEMA_VERSION, "command": cfg.command, "params": cfg.params()}
    if len(subjects) == 1:
        report = {**head, "input": subjects[0].label, **results[0][1]}
    else:
        report = {**head, "runs": [{"input": s.label, **r[1]} for s, r in zip(subjects, results)]}
    return EXIT_OK, render(report, cfg.fmt), ""


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="JSON file, '-' for stdin, or inline JSON")
    common.add_argument("--example", action="append", default=[], dest="examples",
                        help="built-in fixture: m-gamma:<g>, mm0:<m> or ex68 (repeatable)")
    common.add_argument("--order", type=int, default=DEFAULT_ORDER, help="truncation order N")
    common.add_argument("--tol-ord", type=float, default=ORD_TOL)
    common.add_argument("--tol-res", type=float, default=1e-9)
    common.add_argument("--tol-trivial", type=float, default=numint.TRIVIAL_TOL)
    common.add_argument("--loop-radius", type=float, default=numint.DEFAULT_RADIUS)
    common.add_argument("--turns", type=float, default=1.0)
    common.add_argument("--path", help='loop as JSON, e.g. {"kind": "circle", "radius": 0.5}')
    common.add_argument("--format", choices=("json", "table"), default="json", dest="fmt")
    common.add_argument("--jobs", type=int, default=1, help="parallel workers across inputs")
    common.add_argument("--sign", choices=("+", "-"), default="+")
    common.add_argument("--theta", type=float, help="growth ray angle (default: 8 rays)")
    common.add_argument("--r-min", type=float, help="innermost growth radius")
    common.add_argument("--terms", type=int, default=20, help="coefficients shown by solve-formal")
    common.add_argument("--basepoint", default="1", help="map-linear basepoint as JSON")
    common.add_argument("--psi1", help="map-linear initial pair [z, dz] for psi1")
    common.add_argument("--psi2", help="map-linear initial pair [z, dz] for psi2")
    common.add_argument("--points", help="map-linear evaluation points as a JSON list")
    parser = argparse.ArgumentParser(prog="segre-ode", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    cfg = RunConfig(**vars(ns))
    code, out, err = run(cfg)
    if out:
        sys.stdout.write(out)
    if err:
        sys.stderr.write(err)
    return code


if __name__ == "__main__":
    sys.exit(main())
