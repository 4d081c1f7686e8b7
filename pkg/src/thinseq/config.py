"""Run configuration: a single YAML file with nested sections.

Every command reads one config file; parse errors name the offending
field by its dotted path.  Configurations round-trip through
to_dict/from_dict, and random seeds are explicit fields defaulting to 0
so that every randomized step (eigen restarts, property samples) is
reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import yaml

from .carleson import GridSpec
from .diskgeom import BlaschkeSequence, SequenceSpec, generate_sequence
from .inner import (
    AtomicSingular,
    FiniteBlaschke,
    InnerFunction,
    TruncatedBlaschke,
    monomial,
    truncated_blaschke,
)
from .diskgeom import GapPoint

__all__ = [
    "ConfigError",
    "Tolerances",
    "WindowPolicy",
    "OutputSpec",
    "AnalyzeConfig",
    "CorpusEntry",
    "VerifyConfig",
    "InterpolateConfig",
    "load_yaml",
    "parse_sequence_spec",
    "sequence_spec_to_dict",
    "parse_theta",
    "theta_to_dict",
    "build_theta",
]


class ConfigError(ValueError):
    """Configuration error naming the offending field."""

    def __init__(self, path: str, message: str) -> None:
        super().__init__(f"{path}: {message}")
        self.path = path


def load_yaml(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except FileNotFoundError:
        raise ConfigError(path, "config file not found")
    except yaml.YAMLError as exc:
        raise ConfigError(path, f"not valid YAML ({exc})")
    if not isinstance(data, dict):
        raise ConfigError(path, "top level must be a mapping")
    return data


def _get(d: dict, path: str, key: str, default=None, required=False):
    if key not in d or d[key] is None:
        if required:
            raise ConfigError(f"{path}.{key}", "required field missing")
        return default
    return d[key]


def _num(d: dict, path: str, key: str, default=None, required=False,
         lo=None, hi=None, kind=float):
    v = _get(d, path, key, default, required)
    if v is None:
        return None
    try:
        v = kind(v)
    except (TypeError, ValueError):
        raise ConfigError(f"{path}.{key}", f"expected a number, got {v!r}")
    if lo is not None and v < lo:
        raise ConfigError(f"{path}.{key}", f"must be >= {lo}, got {v}")
    if hi is not None and v > hi:
        raise ConfigError(f"{path}.{key}", f"must be <= {hi}, got {v}")
    return v


# ---------------------------------------------------------------------------
# Sequence and inner-function specs
# ---------------------------------------------------------------------------

def parse_sequence_spec(d: Any, path: str = "sequence") -> SequenceSpec:
    if not isinstance(d, dict):
        raise ConfigError(path, "expected a mapping")
    kind = _get(d, path, "kind", required=True)
    count = _num(d, path, "count", default=0, kind=int) or 0
    q = _num(d, path, "q")
    points = None
    if kind == "explicit":
        raw = _get(d, path, "points", required=True)
        if not isinstance(raw, list) or not raw:
            raise ConfigError(f"{path}.points", "expected a nonempty list")
        points = []
        for i, row in enumerate(raw):
            if not (isinstance(row, (list, tuple)) and len(row) == 2):
                raise ConfigError(f"{path}.points[{i}]", "expected [arg, gap]")
            points.append((float(row[0]), float(row[1])))
        points = tuple(points)
    try:
        return SequenceSpec(kind=str(kind), count=count, q=q, points=points)
    except ValueError as exc:
        # SequenceSpec reports "sequence.q: ..." style messages already
        raise ConfigError(path, str(exc))


def sequence_spec_to_dict(spec: SequenceSpec) -> dict:
    d: dict[str, Any] = {"kind": spec.kind}
    if spec.kind == "explicit":
        d["points"] = [[a, g] for a, g in (spec.points or ())]
    else:
        d["count"] = spec.count
        if spec.q is not None:
            d["q"] = spec.q
    return d


def parse_theta(d: Any, path: str = "theta") -> tuple[InnerFunction, dict] | None:
    """Parse an inner-function spec; returns (theta, normalized dict)."""
    if d is None:
        return None
    if not isinstance(d, dict):
        raise ConfigError(path, "expected a mapping")
    raw_factors = _get(d, path, "factors", required=True)
    if not isinstance(raw_factors, list) or not raw_factors:
        raise ConfigError(f"{path}.factors", "expected a nonempty list")
    factors = []
    norm = []
    for i, f in enumerate(raw_factors):
        fpath = f"{path}.factors[{i}]"
        if not isinstance(f, dict):
            raise ConfigError(fpath, "expected a mapping")
        kind = _get(f, fpath, "kind", required=True)
        if kind == "atomic-singular":
            mass = _num(f, fpath, "mass", required=True)
            barg = _num(f, fpath, "boundary_arg", default=0.0)
            if mass <= 0:
                raise ConfigError(f"{fpath}.mass", "must be positive")
            factors.append(AtomicSingular(mass=mass, boundary_arg=barg))
            norm.append({"kind": kind, "mass": mass, "boundary_arg": barg})
        elif kind == "monomial":
            power = _num(f, fpath, "power", required=True, kind=int, lo=1)
            factors.append(monomial(power).factors[0])
            norm.append({"kind": kind, "power": power})
        elif kind == "finite-blaschke":
            raw = _get(f, fpath, "zeros", required=True)
            if not isinstance(raw, list) or not raw:
                raise ConfigError(f"{fpath}.zeros", "expected a nonempty list")
            zeros = []
            for k, row in enumerate(raw):
                if not (isinstance(row, (list, tuple)) and len(row) == 2):
                    raise ConfigError(f"{fpath}.zeros[{k}]", "expected [arg, gap]")
                zeros.append(GapPoint(arg=float(row[0]), gap=float(row[1])))
            factors.append(FiniteBlaschke(zeros=tuple(zeros)))
            norm.append({"kind": kind,
                         "zeros": [[z.arg, z.gap] for z in zeros]})
        elif kind == "truncated-blaschke":
            sub = parse_sequence_spec(_get(f, fpath, "sequence", required=True),
                                      f"{fpath}.sequence")
            seq = generate_sequence(sub)
            cutoff = _num(f, fpath, "cutoff", default=len(seq), kind=int, lo=1)
            if cutoff > len(seq):
                raise ConfigError(f"{fpath}.cutoff",
                                  f"exceeds stored points ({len(seq)})")
            factors.append(truncated_blaschke(seq, cutoff))
            norm.append({"kind": kind, "sequence": sequence_spec_to_dict(sub),
                         "cutoff": cutoff})
        else:
            raise ConfigError(f"{fpath}.kind", f"unknown factor kind {kind!r}")
    return InnerFunction(factors=tuple(factors)), {"factors": norm}


def theta_to_dict(norm: dict | None) -> dict | None:
    return norm


def build_theta(d: Any, path: str = "theta") -> InnerFunction | None:
    parsed = parse_theta(d, path)
    return parsed[0] if parsed else None


# ---------------------------------------------------------------------------
# Shared sections
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Tolerances:
    eig: float = 1e-10
    solve: float = 1e-10
    tail: float = 0.01

    @classmethod
    def parse(cls, d: Any, path: str = "tolerances") -> "Tolerances":
        if d is None:
            return cls()
        if not isinstance(d, dict):
            raise ConfigError(path, "expected a mapping")
        out = cls(eig=_num(d, path, "eig", default=cls.eig),
                  solve=_num(d, path, "solve", default=cls.solve),
                  tail=_num(d, path, "tail", default=cls.tail))
        for name in ("eig", "solve", "tail"):
            if getattr(out, name) <= 0:
                raise ConfigError(f"{path}.{name}", "must be positive")
        return out

    def to_dict(self) -> dict:
        return {"eig": self.eig, "solve": self.solve, "tail": self.tail}


def parse_grid(d: Any, path: str = "grid") -> GridSpec:
    if d is None:
        return GridSpec()
    if not isinstance(d, dict):
        raise ConfigError(path, "expected a mapping")
    try:
        return GridSpec(
            max_depth=_num(d, path, "max_depth", default=40, kind=int, lo=1),
            n_angles=_num(d, path, "n_angles", default=256, kind=int, lo=8),
            refine_passes=_num(d, path, "refine_passes", default=3, kind=int, lo=0),
        )
    except ValueError as exc:
        raise ConfigError(path, str(exc))


def grid_to_dict(g: GridSpec) -> dict:
    return {"max_depth": g.max_depth, "n_angles": g.n_angles,
            "refine_passes": g.refine_passes}


@dataclass(frozen=True)
class WindowPolicy:
    """Sweep policy: N runs over [n_start, n_stop], each window ends at
    m_cutoff (defaults resolve against the stored point count)."""

    n_start: int = 1
    n_stop: int | None = None
    m_cutoff: int | None = None

    @classmethod
    def parse(cls, d: Any, path: str = "window") -> "WindowPolicy":
        if d is None:
            return cls()
        if not isinstance(d, dict):
            raise ConfigError(path, "expected a mapping")
        return cls(n_start=_num(d, path, "n_start", default=1, kind=int, lo=1),
                   n_stop=_num(d, path, "n_stop", kind=int, lo=1),
                   m_cutoff=_num(d, path, "m_cutoff", kind=int, lo=1))

    def to_dict(self) -> dict:
        d: dict[str, Any] = {"n_start": self.n_start}
        if self.n_stop is not None:
            d["n_stop"] = self.n_stop
        if self.m_cutoff is not None:
            d["m_cutoff"] = self.m_cutoff
        return d

    def resolve(self, n_points: int, path: str = "window") -> tuple[int, int, int]:
        m = self.m_cutoff if self.m_cutoff is not None else n_points
        if m > n_points:
            raise ConfigError(f"{path}.m_cutoff",
                              f"exceeds stored points ({n_points})")
        stop = self.n_stop if self.n_stop is not None else m
        if stop > m:
            raise ConfigError(f"{path}.n_stop", f"exceeds m_cutoff ({m})")
        if self.n_start > stop:
            raise ConfigError(f"{path}.n_start", f"exceeds n_stop ({stop})")
        return self.n_start, stop, m


@dataclass(frozen=True)
class OutputSpec:
    path: str | None = None
    fmt: str = "csv"

    @classmethod
    def parse(cls, d: Any, path: str = "output") -> "OutputSpec":
        if d is None:
            return cls()
        if not isinstance(d, dict):
            raise ConfigError(path, "expected a mapping")
        fmt = _get(d, path, "format", default="csv")
        if fmt not in ("csv", "json"):
            raise ConfigError(f"{path}.format", f"must be csv or json, got {fmt!r}")
        return cls(path=_get(d, path, "path"), fmt=fmt)

    def to_dict(self) -> dict:
        d: dict[str, Any] = {"format": self.fmt}
        if self.path is not None:
            d["path"] = self.path
        return d


# ---------------------------------------------------------------------------
# Per-command configs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AnalyzeConfig:
    sequence: SequenceSpec
    theta_dict: dict | None
    window: WindowPolicy
    tolerances: Tolerances
    grid: GridSpec
    seed: int
    jobs: int
    output: OutputSpec

    @classmethod
    def from_dict(cls, d: dict) -> "AnalyzeConfig":
        return cls(
            sequence=parse_sequence_spec(_get(d, "config", "sequence", required=True)),
            theta_dict=(parse_theta(d.get("theta"))[1] if d.get("theta") else None),
            window=WindowPolicy.parse(d.get("window")),
            tolerances=Tolerances.parse(d.get("tolerances")),
            grid=parse_grid(d.get("grid")),
            seed=_num(d, "config", "seed", default=0, kind=int) or 0,
            jobs=_num(d, "config", "jobs", default=1, kind=int, lo=1),
            output=OutputSpec.parse(d.get("output")),
        )

    def theta(self) -> InnerFunction | None:
        return build_theta(self.theta_dict) if self.theta_dict else None

    def to_dict(self) -> dict:
        d: dict[str, Any] = {
            "sequence": sequence_spec_to_dict(self.sequence),
            "window": self.window.to_dict(),
            "tolerances": self.tolerances.to_dict(),
            "grid": grid_to_dict(self.grid),
            "seed": self.seed,
            "jobs": self.jobs,
            "output": self.output.to_dict(),
        }
        if self.theta_dict:
            d["theta"] = self.theta_dict
        return d


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    sequence: SequenceSpec
    theta_dict: dict | None
    expect: str  # "thin" | "non-thin"

    def theta(self) -> InnerFunction | None:
        return build_theta(self.theta_dict) if self.theta_dict else None

    def to_dict(self) -> dict:
        d: dict[str, Any] = {"name": self.name,
                             "sequence": sequence_spec_to_dict(self.sequence),
                             "expect": self.expect}
        if self.theta_dict:
            d["theta"] = self.theta_dict
        return d


@dataclass(frozen=True)
class VerifyConfig:
    corpus: tuple[CorpusEntry, ...]
    beurling_window: SequenceSpec | None
    suites: tuple[str, ...] | None
    tolerances: Tolerances
    grid: GridSpec
    seed: int

    @classmethod
    def from_dict(cls, d: dict) -> "VerifyConfig":
        raw = _get(d, "config", "corpus", default=[])
        if raw is None or not isinstance(raw, list):
            raise ConfigError("corpus", "expected a list")
        entries = []
        for i, e in enumerate(raw):
            path = f"corpus[{i}]"
            if not isinstance(e, dict):
                raise ConfigError(path, "expected a mapping")
            expect = _get(e, path, "expect", required=True)
            if expect not in ("thin", "non-thin"):
                raise ConfigError(f"{path}.expect",
                                  f"must be thin or non-thin, got {expect!r}")
            entries.append(CorpusEntry(
                name=str(_get(e, path, "name", default=f"entry-{i}")),
                sequence=parse_sequence_spec(
                    _get(e, path, "sequence", required=True), f"{path}.sequence"),
                theta_dict=(parse_theta(e.get("theta"), f"{path}.theta")[1]
                            if e.get("theta") else None),
                expect=expect))
        suites = d.get("suites")
        if suites is not None:
            if not isinstance(suites, list) or not all(isinstance(s, str) for s in suites):
                raise ConfigError("suites", "expected a list of suite names")
            suites = tuple(suites)
        bw = d.get("beurling_window")
        return cls(corpus=tuple(entries),
                   beurling_window=(parse_sequence_spec(bw, "beurling_window")
                                    if bw else None),
                   suites=suites,
                   tolerances=Tolerances.parse(d.get("tolerances")),
                   grid=parse_grid(d.get("grid")),
                   seed=_num(d, "config", "seed", default=0, kind=int) or 0)


@dataclass(frozen=True)
class InterpolateConfig:
    sequence: SequenceSpec
    family: str  # "hardy" | "model"
    theta_dict: dict | None
    n_start: int
    m_cutoff: int | None
    targets_path: str | None
    eval_points: tuple[tuple[float, float], ...]
    mode: str  # "direct" | "iterative"
    epsilon: float
    injected_residual: float | None
    tolerances: Tolerances
    seed: int
    output: OutputSpec

    @classmethod
    def from_dict(cls, d: dict) -> "InterpolateConfig":
        family = _get(d, "config", "family", default="hardy")
        if family not in ("hardy", "model"):
            raise ConfigError("family", f"must be hardy or model, got {family!r}")
        theta_dict = (parse_theta(d.get("theta"))[1] if d.get("theta") else None)
        if family == "model" and theta_dict is None:
            raise ConfigError("theta", "model family requires a theta section")
        mode = _get(d, "config", "mode", default="direct")
        if mode not in ("direct", "iterative"):
            raise ConfigError("mode", f"must be direct or iterative, got {mode!r}")
        win = d.get("window") or {}
        eval_raw = _get(d, "config", "eval_points", default=[])
        pts = []
        for i, row in enumerate(eval_raw or []):
            if not (isinstance(row, (list, tuple)) and len(row) == 2):
                raise ConfigError(f"eval_points[{i}]", "expected [arg, gap]")
            pts.append((float(row[0]), float(row[1])))
        eps = _num(d, "config", "epsilon", default=1.0 / 3.0)
        if not (0.0 < eps < 1.0):
            raise ConfigError("epsilon", f"must lie in (0, 1), got {eps}")
        inj = _num(d, "config", "injected_residual")
        if inj is not None and not (0.0 <= inj < 1.0):
            raise ConfigError("injected_residual", f"must lie in [0, 1), got {inj}")
        return cls(
            sequence=parse_sequence_spec(_get(d, "config", "sequence", required=True)),
            family=family, theta_dict=theta_dict,
            n_start=_num(win, "window", "n_start", default=1, kind=int, lo=1),
            m_cutoff=_num(win, "window", "m_cutoff", kind=int, lo=1),
            targets_path=_get(d, "config", "targets"),
            eval_points=tuple(pts), mode=mode, epsilon=eps,
            injected_residual=inj,
            tolerances=Tolerances.parse(d.get("tolerances")),
            seed=_num(d, "config", "seed", default=0, kind=int) or 0,
            output=OutputSpec.parse(d.get("output")))

    def theta(self) -> InnerFunction | None:
        return build_theta(self.theta_dict) if self.theta_dict else None
