"""Command-line entry point: ``hamindex <command> [options]``.

Exit status: 0 success, 2 invalid input, 3 numeric non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .config import build_coefficient, build_model, load_config
from .errors import (CriticalPointNotFound, EvaluationError, HamIndexError, InvalidArgumentError,
                     NonConvergenceError, QuadratureError)
from .flow import fundamental_solution, monodromy
from .index import assemble_galerkin_form, maslov_index_report
from .iteration import check_iteration_inequalities
from .models import Grid, verify_hypotheses
from .solver import (SolutionRecord, SolverOptions, find_critical_point, fourier_gcd, linking_gap,
                     minimal_period, subharmonic_family)

SCHEMA_VERSION = "1.0"
COMMANDS = ("index", "iterate", "solve", "subharmonics", "linking", "hypotheses", "minimal-period")
EXIT_OK, EXIT_INVALID, EXIT_NONCONVERGENCE = 0, 2, 3

DEFAULTS = {"m": 32, "steps": 512, "T": 2 * math.pi, "k": 1, "kmax": 3, "theta": 4.0, "seed": 0,
            "tol": 1e-8, "mmax": 5, "nsamples": 500, "format": "json"}


@dataclass
class RunConfig:
    command: str
    options: dict
    model: dict | None = None
    coefficient: dict | None = None
    grid: dict = field(default_factory=dict)
    record: dict | None = None
    out: str | None = None
    fmt: str = "json"

    def echo(self) -> dict:
        return {"command": self.command, "options": self.options, "model": self.model,
                "coefficient": self.coefficient, "grid": self.grid or None, "format": self.fmt}


# --------------------------------------------------------------------------- formatting

def _num(x: float) -> str:
    if math.isnan(x):
        return '"NaN"'
    if math.isinf(x):
        return '"Infinity"' if x > 0 else '"-Infinity"'
    if x == int(x) and abs(x) < 1e16:
        return repr(float(x))
    return format(x, ".17g")


def to_json(obj, indent: int = 2, _level: int = 0) -> str:
    """Deterministic JSON with floats at 17 significant digits and sorted keys."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_string(str(k))}: {to_json(v, indent, _level + 1)}" for k, v in sorted(obj.items(),
                                                                                          key=lambda kv: str(kv[0]))]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.number)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(to_json(v, indent, _level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + to_json(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, np.ndarray):
        return to_json(obj.tolist(), indent, _level)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(float(obj))
    return _string(str(obj))


def _string(s: str) -> str:
    import json

    return json.dumps(s)


def envelope(cfg: RunConfig, results) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": cfg.command, "config_echo": cfg.echo(),
            "results": results, "generator": f"hamindex {__version__}"}


def rows_to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([format(v, ".17g") if isinstance(v, float) else v for v in r])
    return buf.getvalue()


# --------------------------------------------------------------------------- commands

def _require(cfg: RunConfig, key: str):
    val = getattr(cfg, key)
    if val is None:
        raise InvalidArgumentError(f"command {cfg.command!r} needs a '{key}' section in the config")
    return val


def _alpha(cfg) -> float:
    T = float(cfg.options["T"])
    if T <= 0:
        raise InvalidArgumentError("T must be positive")
    return T / (2 * math.pi)


def _solver_options(cfg) -> SolverOptions:
    return SolverOptions(residual_tol=float(cfg.options["tol"]), seed=int(cfg.options["seed"]))


def cmd_index(cfg: RunConfig):
    B = build_coefficient(_require(cfg, "coefficient"))
    gamma = fundamental_solution(B, steps=int(cfg.options["steps"]))
    report = maslov_index_report(B, monodromy_matrix=monodromy(gamma))
    results = report.as_dict()
    results["max_symplectic_defect"] = gamma.max_defect()
    results["monodromy"] = report.monodromy
    csv_text = None
    if cfg.fmt == "csv":
        level = report.levels[-1]["level"]
        eigs = assemble_galerkin_form(B, B.period, level).eigenvalues()
        csv_text = rows_to_csv(["level", "k", "eigenvalue"], [(level, k, float(e)) for k, e in enumerate(eigs)])
    return results, csv_text


def cmd_iterate(cfg: RunConfig):
    B = build_coefficient(_require(cfg, "coefficient"))
    mmax = int(cfg.options["mmax"])
    if mmax < 2:
        raise InvalidArgumentError("--mmax must be >= 2")
    return check_iteration_inequalities(B, B.period, mmax).as_dict(), None


def _model(cfg):
    return build_model(_require(cfg, "model"))


def _check_level(cfg):
    m = int(cfg.options["m"])
    if m < 8:
        raise InvalidArgumentError("--m must be >= 8")
    return m


def cmd_solve(cfg: RunConfig):
    model = _model(cfg)
    rec = find_critical_point(model, _alpha(cfg), int(cfg.options["k"]), _check_level(cfg), _solver_options(cfg))
    return rec.as_dict(), None


def cmd_subharmonics(cfg: RunConfig):
    model = _model(cfg)
    fam = subharmonic_family(model, _alpha(cfg), int(cfg.options["kmax"]), _check_level(cfg), _solver_options(cfg))
    csv_text = None
    if cfg.fmt == "csv":
        rows = [(d["k1"], d["k2"], d["distinct"], d["min_distance"], d["shift"]) for row in fam.distinct for d in row]
        csv_text = rows_to_csv(["k1", "k2", "distinct", "min_distance", "shift"], rows)
    return fam.as_dict(), csv_text


def cmd_linking(cfg: RunConfig):
    model = _model(cfg)
    rep = linking_gap(model, _alpha(cfg), int(cfg.options["m"]), float(cfg.options["theta"]),
                      int(cfg.options["nsamples"]), int(cfg.options["seed"]))
    return rep.as_dict(), None


def cmd_hypotheses(cfg: RunConfig):
    model = _model(cfg)
    grid = Grid(**{**cfg.grid, "seed": int(cfg.options["seed"])})
    return verify_hypotheses(model, grid).as_dict(), None


def cmd_minimal_period(cfg: RunConfig):
    if cfg.record is not None:
        rec = SolutionRecord.from_dict(cfg.record)
    else:
        model = _model(cfg)
        rec = find_critical_point(model, _alpha(cfg), int(cfg.options["k"]), _check_level(cfg),
                                  _solver_options(cfg))
    tol = float(cfg.options["tol"]) if cfg.record is not None else 1e-6
    return {"k": rec.k, "T": 2 * math.pi * rec.alpha, "period": rec.period,
            "minimal_period": minimal_period(rec, tol), "fourier_gcd": fourier_gcd(rec, tol),
            "mode_threshold": tol}, None


HANDLERS = {"index": cmd_index, "iterate": cmd_iterate, "solve": cmd_solve, "subharmonics": cmd_subharmonics,
            "linking": cmd_linking, "hypotheses": cmd_hypotheses, "minimal-period": cmd_minimal_period}
CSV_COMMANDS = {"index", "subharmonics"}


# --------------------------------------------------------------------------- driver

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hamindex", description="Maslov-type indices and periodic orbits "
                                     "of Hamiltonian systems.")
    parser.add_argument("--version", action="version", version=f"hamindex {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=str, help="YAML or JSON config file")
        p.add_argument("--out", type=str, help="output path (stdout when omitted)")
        p.add_argument("--format", choices=("json", "csv"))
        p.add_argument("--m", type=int, help="Galerkin truncation level")
        p.add_argument("--steps", type=int, help="initial integration steps per period")
        p.add_argument("--T", type=float, help="period of the sought orbit in original time")
        p.add_argument("--k", type=int, help="subharmonic multiple")
        p.add_argument("--kmax", type=int, help="largest subharmonic multiple")
        p.add_argument("--mmax", type=int, help="largest iterate for the inequality check")
        p.add_argument("--theta", type=float, help="linking sphere radius")
        p.add_argument("--nsamples", type=int, help="samples per linking set")
        p.add_argument("--seed", type=int, help="random seed")
        p.add_argument("--tol", type=float, help="residual / mode tolerance")
    return parser


def resolve(args) -> RunConfig:
    data = load_config(args.config) if args.config else {}
    opts = dict(DEFAULTS)
    file_opts = data.get("options") or {}
    unknown = set(file_opts) - set(DEFAULTS)
    if unknown:
        raise InvalidArgumentError(f"unknown options: {sorted(unknown)}")
    opts.update(file_opts)
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            opts[key] = val
    for key in ("tol",):
        if float(opts[key]) <= 0:
            raise InvalidArgumentError(f"{key} must be positive")
    if int(opts["steps"]) < 16:
        raise InvalidArgumentError("steps must be >= 16")
    fmt = opts.pop("format")
    if fmt not in ("json", "csv"):
        raise InvalidArgumentError("format must be json or csv")
    if fmt == "csv" and args.command not in CSV_COMMANDS:
        raise InvalidArgumentError(f"csv output is only available for {sorted(CSV_COMMANDS)}")
    record = data.get("record")
    if isinstance(record, str):
        base = Path(args.config).parent if args.config else Path(".")
        rec_data = load_config(base / record)
        record = rec_data.get("results", rec_data)
    grid = data.get("grid") or {}
    bad = set(grid) - set(Grid.__dataclass_fields__) - {"seed"}
    if bad:
        raise InvalidArgumentError(f"unknown grid keys: {sorted(bad)}")
    grid = {k: v for k, v in grid.items() if k != "seed"}
    return RunConfig(args.command, opts, data.get("model"), data.get("coefficient"), grid, record,
                     args.out or data.get("out"), fmt)


def run(cfg: RunConfig) -> tuple[int, str]:
    """Execute a resolved config; returns (exit status, report text)."""
    try:
        results, csv_text = HANDLERS[cfg.command](cfg)
        return EXIT_OK, csv_text if csv_text is not None else to_json(envelope(cfg, results)) + "\n"
    except (NonConvergenceError, CriticalPointNotFound, QuadratureError) as exc:
        diag = getattr(exc, "diagnostic", None) or {"attempts": getattr(exc, "attempts", [])}
        return EXIT_NONCONVERGENCE, to_json(envelope(cfg, {"error": str(exc), "kind": type(exc).__name__,
                                                            "diagnostic": diag})) + "\n"
    except (InvalidArgumentError, EvaluationError, ValueError, KeyError, TypeError) as exc:
        msg = str(exc) if not isinstance(exc, KeyError) else f"missing key {exc}"
        return EXIT_INVALID, to_json(envelope(cfg, {"error": msg, "kind": type(exc).__name__})) + "\n"
    except HamIndexError as exc:
        return EXIT_NONCONVERGENCE, to_json(envelope(cfg, {"error": str(exc), "kind": type(exc).__name__})) + "\n"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve(args)
    except (InvalidArgumentError, ValueError, TypeError) as exc:
        print(f"hamindex: {exc}", file=sys.stderr)
        return EXIT_INVALID
    status, text = run(cfg)
    if status != EXIT_OK:
        print(f"hamindex: {cfg.command} failed (exit {status})", file=sys.stderr)
    if cfg.out:
        try:
            Path(cfg.out).write_text(text)
        except OSError as exc:
            print(f"hamindex: cannot write {cfg.out}: {exc.strerror}", file=sys.stderr)
            return EXIT_INVALID
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
