"""Command-line entry point.

Exit status: 0 when every checked invariant holds, 1 on an invariant
violation (a potential counterexample), 2 on bad input.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import explorer, scenario_io
from .models import STANDARD_Q_BASIS, example_processes

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc}") from exc


def _load_scenario(path: str):
    try:
        return scenario_io.load(path)
    except FileNotFoundError as exc:
        raise InputError(f"{path}: no such file") from exc
    except scenario_io.ScenarioError as exc:
        raise InputError(f"{path}: schema error at {exc}") from exc


def cmd_verify(args) -> int:
    p = _load_scenario(args.scenario)
    result = explorer.verify(p, args.tolerance)
    if args.json:
        doc = {
            "report": result.report.to_dict(),
            "checks": {k: {"value": float(v), "ok": bool(ok)} for k, (v, ok) in result.checks.items()},
            "ok": bool(result.ok),
        }
        _write(None, _dump_json(doc) + "\n")
    else:
        for k, v in result.report.to_dict().items():
            print(f"{k:24s} {v!r}")
        for k, (v, ok) in result.checks.items():
            print(f"check {k:26s} {'PASS' if ok else 'FAIL'}  {v!r}")
    return EXIT_OK if result.ok else EXIT_VIOLATION


def cmd_fuzz(args) -> int:
    summary = explorer.fuzz(
        args.samples, dim_a=args.dim_a, seed=args.seed, mode=args.mode,
        z_samples=args.pointers, tolerance=args.tolerance, workers=args.workers,
    )
    if args.reports:
        lines = "".join(json.dumps(s.report.to_dict(), sort_keys=True) + "\n" for s in summary.samples)
        _write(args.reports, lines)
    doc = summary.to_dict()
    if not summary.ok:
        worst = explorer.fuzz_scenario(args.seed, summary.worst_index, args.samples, args.dim_a, args.mode)
        out = args.out or "counterexample.json"
        _write(out, scenario_io.dumps(worst, label=f"fuzz counterexample seed={args.seed} index={summary.worst_index}"))
        doc["counterexample"] = out
    print(_dump_json(doc))
    return EXIT_OK if summary.ok else EXIT_VIOLATION


def cmd_sweep(args) -> int:
    try:
        doc = json.loads(Path(args.spec).read_text(encoding="utf-8"))
        if args.seed is not None:
            doc["seed"] = args.seed
        if args.samples is not None:
            doc["samples_per_point"] = args.samples
        spec = explorer.SweepSpec.from_dict(doc)
    except FileNotFoundError as exc:
        raise InputError(f"{args.spec}: no such file") from exc
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{args.spec}: invalid sweep spec: {exc}") from exc
    _write(args.out, explorer.sweep(spec, workers=args.workers))
    return EXIT_OK


def _optimization_spec(args) -> explorer.OptimizationSpec:
    doc = {}
    if args.spec:
        try:
            doc = json.loads(Path(args.spec).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"{args.spec}: {exc}") from exc
    h_s = doc.get("h_s", args.h_s)
    try:
        h_s = explorer._system_hamiltonian(h_s)
        q_basis = STANDARD_Q_BASIS
        if "q_basis" in doc:
            q_basis = tuple(scenario_io._vector(q, f"q_basis[{j}]", 2) for j, q in enumerate(doc["q_basis"]))
        overrides = {
            "v_max": args.v_max, "tau_max": args.tau_max, "dim_a": args.dim_a,
            "restarts": args.restarts, "max_iters": args.max_iters, "seed": args.seed,
            "search_space": args.search_space,
        }
        fields = {k: doc[k] for k in ("v_max", "tau_max", "dim_a", "restarts", "max_iters",
                                      "seed", "search_space", "hbar") if k in doc}
        fields.update({k: v for k, v in overrides.items() if v is not None})
        return explorer.OptimizationSpec(h_s=np.asarray(h_s), q_basis=q_basis, **fields)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"invalid optimization spec: {exc}") from exc


def cmd_optimize(args) -> int:
    spec = _optimization_spec(args)
    result = explorer.optimize(spec)
    if args.out:
        _write(args.out, scenario_io.dumps(result.process, label="optimized protocol"))
    doc = result.to_dict()
    doc["spec"] = {
        "v_max": spec.v_max, "tau_max": spec.tau_max, "dim_a": spec.dim_a,
        "restarts": spec.restarts, "max_iters": spec.max_iters, "seed": spec.seed,
        "search_space": spec.search_space,
    }
    text = _dump_json(doc) + "\n"
    _write(args.report, text)
    return EXIT_OK if result.report.slack >= -args.tolerance else EXIT_VIOLATION


def cmd_examples(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, proc in example_processes().items():
        _write(str(out / f"{name}.json"), scenario_io.dumps(proc, label=name))
        print(out / f"{name}.json")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="measbound",
        description="Simulate two-level measurement processes and check the interaction/accuracy trade-off bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed_default=None):
        p.add_argument("--tolerance", type=float, default=explorer.DEFAULT_TOLERANCE)
        p.add_argument("--seed", type=int, default=seed_default)

    p = sub.add_parser("verify", help="check every bound for one scenario file")
    p.add_argument("scenario")
    p.add_argument("--json", action="store_true", help="emit a JSON document")
    p.add_argument("--tolerance", type=float, default=explorer.DEFAULT_TOLERANCE)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("fuzz", help="check the bounds on random scenarios")
    common(p, seed_default=42)
    p.add_argument("--samples", type=int, default=1000, help="number of scenarios")
    p.add_argument("--dim-a", type=int, default=None, help="apparatus dimension (default: random 2..6)")
    p.add_argument("--mode", choices=("generic", "commuting"), default="generic")
    p.add_argument("--pointers", type=int, default=8, help="random pointer projectors per scenario")
    p.add_argument("--out", help="where to dump a counterexample scenario")
    p.add_argument("--reports", help="write every BoundReport as JSON lines")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_fuzz)

    p = sub.add_parser("sweep", help="evaluate a parameter grid and emit CSV")
    p.add_argument("spec", help="sweep spec JSON file")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--samples", type=int, default=None, help="override samples_per_point")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("optimize", help="search for low-error protocols under a norm budget")
    common(p)
    p.add_argument("--spec", help="optimization spec JSON file")
    p.add_argument("--h-s", default="zero", help="zero, sigma_x, sigma_y or sigma_z")
    p.add_argument("--v-max", type=float)
    p.add_argument("--tau-max", type=float)
    p.add_argument("--dim-a", type=int)
    p.add_argument("--restarts", type=int)
    p.add_argument("--max-iters", type=int)
    p.add_argument("--search-space", choices=("full", "commuting"))
    p.add_argument("--out", help="scenario file for the best protocol")
    p.add_argument("--report", help="JSON report path (default stdout)")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("examples", help="write the four shipped example scenarios")
    p.add_argument("--out", default="scenarios")
    p.set_defaults(func=cmd_examples)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
