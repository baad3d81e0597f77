"""Command-line front end: ``branchcut run | example | export``."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__
from .config import DEFAULT, Tolerances
from .errors import BranchcutError, InputError, NumericError, SchemaError
from .serialize import dumps, plain, to_csv

TOL_FLAGS = {
    "tol_geom": ("eps_geom", float),
    "theta_min": ("theta_min", float),
    "tol_jet": ("eps_jet", float),
    "tol_quad": ("eps_quad", float),
    "tol_laurent": ("eps_laurent", float),
    "tol_tail": ("eps_tail", float),
    "word_length": ("word_length", int),
    "jet_order": ("jet_order", int),
}


# ---------------------------------------------------------------------------
# spec parsing


def _require(spec: dict, key: str, kind: str):
    if key not in spec:
        raise SchemaError(f"{kind}: missing field '{key}'", field=key)
    return spec[key]


def _complex(v, where: str) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v):
        return complex(v[0], v[1])
    raise SchemaError(f"{where}: expected a number or [re, im]", field=where)


def _int(spec: dict, key: str, default: int, lo: int = 0) -> int:
    v = spec.get(key, default)
    if not isinstance(v, int) or isinstance(v, bool) or v < lo:
        raise SchemaError(f"field '{key}' must be an integer >= {lo}", field=key)
    return v


def _assignment(spec: dict, tol: Tolerances):
    from .cauchy import IntegrandAssignment

    d = _require(spec, "assignment", spec.get("kind", "?"))
    if not isinstance(d, dict):
        raise SchemaError("field 'assignment' must be an object", field="assignment")
    try:
        return IntegrandAssignment.from_json(d, tol)
    except KeyError as e:
        raise SchemaError(f"assignment: missing field {e}", field=f"assignment.{e.args[0]}") from e


def _path(d, tol: Tolerances, where: str = "gamma"):
    from .paths import PiecewisePath

    if not isinstance(d, dict):
        raise SchemaError(f"field '{where}' must be a path object", field=where)
    return PiecewisePath.from_json(d, tol)


def _run_integral(spec: dict, tol: Tolerances) -> dict:
    from .cauchy import eval_cauchy

    a = _assignment(spec, tol)
    ts = [_complex(t, f"t[{k}]") for k, t in enumerate(_require(spec, "t", "integral"))]
    vals = [eval_cauchy(a, t, tol) for t in ts]
    biggest = max((abs(v) for v in vals), default=0.0)
    return {"t": ts, "values": vals, "max_abs": biggest, "zero": biggest < 1e-8}


def _run_moments(spec: dict, tol: Tolerances) -> dict:
    from .cauchy import moment_sequence

    a = _assignment(spec, tol)
    table = moment_sequence(a, _int(spec, "K", 10), tol)
    out = table.to_json()
    out["all_zero"] = bool(np.all(np.abs(table.values) < 1e-8))
    return out


def _run_monodromy(spec: dict, tol: Tolerances) -> dict:
    from .monodromy import MonodromyContext, classify_monodromy, default_basepoint, vanishing_test

    a = _assignment(spec, tol)
    c = _complex(spec["basepoint"], "basepoint") if "basepoint" in spec else default_basepoint(a)
    ctx = MonodromyContext(a, c)
    v = classify_monodromy(a, L=_int(spec, "L", tol.word_length, 1), ctx=ctx)
    out = {"classification": v.classification, "order": v.order, "verdict": v.to_json()}
    if spec.get("vanishing", True):
        vt = vanishing_test(a, ctx=ctx, verdict=v)
        out["vanishes"] = vt.vanishes_on_D0
        out["vanishing"] = vt.to_json()
    return out


def _run_polymoments(spec: dict, tol: Tolerances) -> dict:
    from .moments import poly_moments

    for k in ("P", "Q", "a", "b"):
        _require(spec, k, "polymoments")
    t = poly_moments(spec["P"], spec["Q"], spec["a"], spec["b"], _int(spec, "K", 20))
    out = t.to_json()
    out["all_zero"] = bool(all(v == 0 for v in t.exact)) if t.exact is not None else \
        bool(np.all(np.abs(t.values) < 1e-25))
    return out


def _run_doublemoments(spec: dict, tol: Tolerances) -> dict:
    from .moments import double_moment_analysis

    for k in ("P", "Q"):
        _require(spec, k, "doublemoments")
    gamma = _path(spec["gamma"], tol) if "gamma" in spec else None
    rep = double_moment_analysis(spec["P"], spec["Q"], gamma, _int(spec, "I", 4), _int(spec, "J", 4),
                                 spec.get("a"), spec.get("b"), tol)
    return rep.to_json()


def _run_definiteness(spec: dict, tol: Tolerances) -> dict:
    from .moments import definiteness_evidence

    for k in ("P", "a", "b"):
        _require(spec, k, "definiteness")
    gamma = _path(spec["gamma"], tol) if "gamma" in spec else None
    return definiteness_evidence(spec["P"], spec["a"], spec["b"], gamma, spec.get("witness_q"),
                                 _int(spec, "K", 20), tol).to_json()


def _run_example(spec: dict, tol: Tolerances) -> dict:
    from .examples import run_example

    out = run_example(_int(spec, "id", 1, 1), tol).to_json()
    out.pop("seconds", None)  # keeps run reports byte-identical across runs
    return out


KINDS: dict[str, Callable[[dict, Tolerances], dict]] = {
    "integral": _run_integral,
    "moments": _run_moments,
    "monodromy": _run_monodromy,
    "polymoments": _run_polymoments,
    "doublemoments": _run_doublemoments,
    "definiteness": _run_definiteness,
    "example": _run_example,
}


def load_spec(path: str | Path) -> dict:
    text = Path(path).read_text()
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"{path}:{e.lineno}:{e.colno}: {e.msg}", line=e.lineno, column=e.colno) from e
    if not isinstance(spec, dict):
        raise SchemaError("problem spec must be a JSON object")
    kind = spec.get("kind")
    if kind not in KINDS:
        raise SchemaError(f"field 'kind' must be one of {sorted(KINDS)}, got {kind!r}", field="kind")
    if "tolerances" in spec:
        t = spec["tolerances"]
        known = set(DEFAULT.to_dict())
        if not isinstance(t, dict) or set(t) - known:
            raise SchemaError(f"tolerances: unknown keys {sorted(set(t) - known) if isinstance(t, dict) else t}",
                              field="tolerances")
    return spec


def _check_expectations(result: dict, expect: dict) -> list[dict]:
    checks = []
    for key, want in sorted(expect.items()):
        got = result.get(key, None)
        ok = plain(got) == plain(want)
        checks.append({"field": key, "expected": want, "got": plain(got), "passed": ok})
    return checks


def run(spec: dict, tol: Tolerances = DEFAULT, seed: int | None = None) -> dict:
    """Execute a validated spec and return the report."""
    seed = spec.get("seed", 0) if seed is None else seed
    np.random.seed(seed)
    tol = tol.with_(**spec.get("tolerances", {}))
    result = KINDS[spec["kind"]](spec, tol)
    checks = _check_expectations(result, spec.get("expect", {}))
    passed = all(c["passed"] for c in checks)
    if spec["kind"] == "example":
        passed = passed and bool(result.get("passed"))
    return {"kind": spec["kind"], "seed": seed, "version": __version__, "tolerances": tol.to_dict(),
            "result": result, "expectations": checks, "passed": passed}


# ---------------------------------------------------------------------------
# commands


def _tolerances(args) -> Tolerances:
    kw = {}
    for flag, (name, _) in TOL_FLAGS.items():
        v = getattr(args, flag, None)
        if v is not None:
            kw[name] = v
    return DEFAULT.with_(**kw)


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_run(args) -> int:
    spec = load_spec(args.spec)
    report = run(spec, _tolerances(args), args.seed)
    _write(dumps(report), args.out)
    if args.out:
        print(f"{spec['kind']}: {'PASS' if report['passed'] else 'FAIL'}")
    return 0 if report["passed"] else 1


def cmd_example(args) -> int:
    from .examples import run_example

    tol = _tolerances(args)
    ids = list(range(1, 9)) if args.id == "all" else [_parse_id(args.id)]
    reports = []
    for n in ids:
        rep = run_example(n, tol)
        reports.append(rep)
        print(f"example {n}: {'PASS' if rep.passed else 'FAIL'}  ({rep.seconds:.2f} s)  {rep.title}")
        for c in rep.checks:
            if not c.passed:
                print(f"    failed: {c.name}  measured={plain(c.measured)}")
    ok = all(r.passed for r in reports)
    if args.out:
        Path(args.out).write_text(dumps({"examples": reports, "passed": ok, "version": __version__}))
    return 0 if ok else 1


def _parse_id(s: str) -> int:
    try:
        n = int(s)
    except ValueError:
        raise SchemaError(f"example id must be 1..8 or 'all', got {s!r}") from None
    if not 1 <= n <= 8:
        raise SchemaError(f"example id must be 1..8, got {n}")
    return n


def cmd_export(args) -> int:
    try:
        report = json.loads(Path(args.report).read_text())
    except json.JSONDecodeError as e:
        raise SchemaError(f"{args.report}:{e.lineno}:{e.colno}: {e.msg}") from e
    if args.format == "csv":
        try:
            text = to_csv(report)
        except LookupError as e:
            raise SchemaError(str(e)) from e
    else:
        text = dumps(report)
    _write(text, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="branchcut", description="Cauchy-type integrals of algebraic functions.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def tol_args(sp):
        for flag, (name, typ) in TOL_FLAGS.items():
            sp.add_argument("--" + flag.replace("_", "-"), dest=flag, type=typ, default=None,
                            help=f"override {name} (default {getattr(DEFAULT, name)})")

    r = sub.add_parser("run", help="run a JSON problem spec")
    r.add_argument("spec")
    r.add_argument("--out", default=None)
    r.add_argument("--seed", type=int, default=None)
    tol_args(r)
    r.set_defaults(func=cmd_run)

    e = sub.add_parser("example", help="run a worked example (1..8 or all)")
    e.add_argument("id")
    e.add_argument("--out", default=None)
    tol_args(e)
    e.set_defaults(func=cmd_example)

    x = sub.add_parser("export", help="re-export a report as JSON or CSV")
    x.add_argument("report")
    x.add_argument("--format", choices=("json", "csv"), default="json")
    x.add_argument("--out", default=None)
    x.set_defaults(func=cmd_export)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as e:
        print(f"input error: {e}", file=sys.stderr)
        return 2
    except NumericError as e:
        print(f"numeric error: {e}", file=sys.stderr)
        return 3
    except BranchcutError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"io error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
