"""Batch command line front end.

Verbs: analyze (sweep report), verify (theorem suites), interpolate
(window interpolation), generate (sequence table).  Exit codes: 0
success, 1 suite failure, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .config import (
    AnalyzeConfig,
    ConfigError,
    InterpolateConfig,
    VerifyConfig,
    load_yaml,
)
from .diskgeom import generate_sequence
from .interpolation import (
    InterpolationProblem,
    NearSingularError,
    iterative_solve,
    min_norm_interpolant,
    scaled_solver,
    exact_solver,
)
from .kernels import hardy_family, model_family
from .report import SweepReport
from .spectral import ConvergenceError
from .suites import default_verify_config, run_suites
from .sweep import analyze_sweep

__all__ = ["main", "entrypoint"]

EXIT_OK = 0
EXIT_SUITE_FAILURE = 1
EXIT_CONFIG_ERROR = 2
EXIT_NUMERICAL_FAILURE = 3


def _write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _apply_overrides(d: dict, args: argparse.Namespace) -> dict:
    if args.seed is not None:
        d["seed"] = args.seed
    if getattr(args, "jobs", None) is not None:
        d["jobs"] = args.jobs
    out = dict(d.get("output") or {})
    if args.out is not None:
        out["path"] = args.out
    if args.format is not None:
        out["format"] = args.format
    if out:
        d["output"] = out
    return d


def _cmd_analyze(args: argparse.Namespace) -> int:
    if args.config is None:
        raise ConfigError("--config", "analyze requires a config file")
    cfg = AnalyzeConfig.from_dict(_apply_overrides(load_yaml(args.config), args))
    report = analyze_sweep(cfg)
    text = report.to_csv() if cfg.output.fmt == "csv" else report.to_json()
    _write(text, cfg.output.path)
    if report.failed_rows:
        sys.stderr.write(
            f"numerical failures in rows N = {list(report.failed_rows)}\n")
        return EXIT_NUMERICAL_FAILURE
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace) -> int:
    if args.config is None:
        cfg = default_verify_config(seed=args.seed or 0)
    else:
        d = load_yaml(args.config)
        if args.seed is not None:
            d["seed"] = args.seed
        cfg = VerifyConfig.from_dict(d)
    results = run_suites(cfg)
    lines = []
    for r in results:
        lines.append(f"{r.name}: {'PASS' if r.passed else 'FAIL'}")
        for detail in r.details:
            lines.append(f"  {detail}")
    text = "\n".join(lines) + "\n"
    _write(text, args.out)
    return EXIT_OK if all(r.passed for r in results) else EXIT_SUITE_FAILURE


def _read_targets(path: str, n: int) -> np.ndarray:
    """Targets file: one `index,re,im` row per constrained point."""
    targets = np.zeros(n, dtype=complex)
    seen = set()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            rows = fh.read().splitlines()
    except FileNotFoundError:
        raise ConfigError("targets", f"targets file not found: {path}")
    for lineno, raw in enumerate(rows, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 3:
            raise ConfigError(f"targets:{lineno}",
                              f"expected `index,re,im`, got {raw!r}")
        try:
            idx = int(parts[0])
            re_v, im_v = float(parts[1]), float(parts[2])
        except ValueError:
            raise ConfigError(f"targets:{lineno}", f"malformed row {raw!r}")
        if not (1 <= idx <= n):
            raise ConfigError(f"targets:{lineno}",
                              f"index {idx} outside window of length {n}")
        if idx in seen:
            raise ConfigError(f"targets:{lineno}", f"duplicate index {idx}")
        seen.add(idx)
        targets[idx - 1] = complex(re_v, im_v)
    return targets


def _cmd_interpolate(args: argparse.Namespace) -> int:
    if args.config is None:
        raise ConfigError("--config", "interpolate requires a config file")
    d = load_yaml(args.config)
    if args.seed is not None:
        d["seed"] = args.seed
    out = dict(d.get("output") or {})
    if args.out is not None:
        out["path"] = args.out
    if args.format is not None:
        out["format"] = args.format
    if out:
        d["output"] = out
    cfg = InterpolateConfig.from_dict(d)

    seq = generate_sequence(cfg.sequence)
    stop = cfg.m_cutoff if cfg.m_cutoff is not None else len(seq)
    if stop > len(seq):
        raise ConfigError("window.m_cutoff", f"exceeds stored points ({len(seq)})")
    n = stop - cfg.n_start + 1
    if n < 1:
        raise ConfigError("window.n_start", "window is empty")
    targets = (_read_targets(cfg.targets_path, n)
               if cfg.targets_path else np.zeros(n, dtype=complex))

    family = (model_family(cfg.theta()) if cfg.family == "model"
              else hardy_family())
    problem = InterpolationProblem(family, seq, cfg.n_start, stop, targets)
    payload: dict = {
        "window": [cfg.n_start, stop],
        "family": cfg.family,
        "mode": cfg.mode,
    }
    if cfg.mode == "direct":
        sol = min_norm_interpolant(problem, tol=cfg.tolerances.solve,
                                   seed=cfg.seed)
        coeffs = sol.coeffs
        payload["norm"] = sol.norm
        payload["residual"] = sol.residual
        payload["lambda_min"] = sol.lambda_min
    else:
        solver = (scaled_solver(problem, cfg.injected_residual,
                                tol=cfg.tolerances.solve, seed=cfg.seed)
                  if cfg.injected_residual
                  else exact_solver(problem, tol=cfg.tolerances.solve,
                                    seed=cfg.seed))
        sol, trace = iterative_solve(problem, solver, epsilon=cfg.epsilon,
                                     tol=cfg.tolerances.solve, seed=cfg.seed)
        coeffs = sol.coeffs
        payload["norm"] = sol.norm
        payload["residual"] = sol.residual
        payload["steps"] = [
            {"k": s.k, "target_norm": s.target_norm, "f_norm": s.f_norm,
             "residual_after": s.residual_after} for s in trace.steps]
    payload["coefficients"] = [[c.real, c.imag] for c in coeffs]
    combo = problem.combination(coeffs)
    samples = []
    for arg, gap in cfg.eval_points:
        v = combo.evaluate_many([gap], [arg])[0]
        samples.append({"arg": arg, "gap": gap, "value": [v.real, v.imag]})
    payload["samples"] = samples

    if cfg.output.fmt == "json":
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    else:
        lines = ["section,key,re,im"]
        lines.append(f"summary,norm,{payload['norm']!r},")
        lines.append(f"summary,residual,{payload['residual']!r},")
        for i, (re_v, im_v) in enumerate(payload["coefficients"], start=cfg.n_start):
            lines.append(f"coefficient,{i},{re_v!r},{im_v!r}")
        for s in samples:
            lines.append(f"sample,({s['arg']!r};{s['gap']!r}),"
                         f"{s['value'][0]!r},{s['value'][1]!r}")
        text = "\n".join(lines) + "\n"
    _write(text, cfg.output.path)
    return EXIT_OK


def _cmd_generate(args: argparse.Namespace) -> int:
    if args.config is None:
        raise ConfigError("--config", "generate requires a config file")
    d = load_yaml(args.config)
    cfg = AnalyzeConfig.from_dict(_apply_overrides(d, args))
    seq = generate_sequence(cfg.sequence)
    if cfg.output.fmt == "json":
        payload = {
            "spec": cfg.to_dict()["sequence"],
            "count": len(seq),
            "truncated": seq.truncated,
            "blaschke_sum": seq.blaschke_sum,
            "tail_gap_sum": seq.tail_gap_sum,
            "points": [{"n": j, "arg": float(seq.args[j - 1]),
                        "gap": float(seq.gaps[j - 1]),
                        "modulus": float(1.0 - seq.gaps[j - 1])}
                       for j in range(1, len(seq) + 1)],
        }
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    else:
        lines = ["n,arg,gap,modulus"]
        for j in range(1, len(seq) + 1):
            g = float(seq.gaps[j - 1])
            lines.append(f"{j},{float(seq.args[j-1])!r},{g!r},{1.0 - g!r}")
        text = "\n".join(lines) + "\n"
    _write(text, cfg.output.path)
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thinseq",
        description="Thinness profiles and interpolation/embedding constants "
                    "for sequences in the unit disk.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (("analyze", _cmd_analyze), ("verify", _cmd_verify),
                     ("interpolate", _cmd_interpolate), ("generate", _cmd_generate)):
        p = sub.add_parser(name)
        p.add_argument("--config", metavar="PATH", default=None)
        p.add_argument("--out", metavar="PATH", default=None)
        p.add_argument("--format", choices=("csv", "json"), default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--jobs", type=int, default=None)
        p.set_defaults(func=fn)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG_ERROR
    except (ConvergenceError, NearSingularError) as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERICAL_FAILURE


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
