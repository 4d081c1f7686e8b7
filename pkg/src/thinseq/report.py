"""Sweep report rows and their CSV/JSON serialization.

The CSV column order is fixed; every quantity is followed by its error
bar.  Serialization is deterministic: identical rows produce identical
bytes (floats are written in shortest round-trip form).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from typing import Any

__all__ = ["SweepRow", "SweepReport", "CSV_COLUMNS"]

CSV_COLUMNS = [
    "N",
    "delta_min", "delta_min_err",
    "c_N", "c_N_err",
    "C_N", "C_N_err",
    "C_mu", "C_mu_err",
    "R2_nu", "R2_nu_err",
    "kappa", "kappa_err",
    "C_theta_sigma", "C_theta_sigma_err",
    "R2_theta_sigma", "R2_theta_sigma_err",
    "eis_hardy", "eis_hardy_err",
    "eis_model", "eis_model_err",
]


@dataclass(frozen=True)
class SweepRow:
    N: int
    delta_min: float | None = None
    delta_min_err: float | None = None
    c_N: float | None = None
    c_N_err: float | None = None
    C_N: float | None = None
    C_N_err: float | None = None
    C_mu: float | None = None
    C_mu_err: float | None = None
    R2_nu: float | None = None
    R2_nu_err: float | None = None
    kappa: float | None = None
    kappa_err: float | None = None
    C_theta_sigma: float | None = None
    C_theta_sigma_err: float | None = None
    R2_theta_sigma: float | None = None
    R2_theta_sigma_err: float | None = None
    eis_hardy: float | None = None
    eis_hardy_err: float | None = None
    eis_model: float | None = None
    eis_model_err: float | None = None
    error: str | None = None

    def to_dict(self) -> dict[str, Any]:
        d = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if v is not None or f.name in ("N",):
                d[f.name] = v
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SweepRow":
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in d.items() if k in known})


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, int):
        return str(v)
    return repr(float(v))


@dataclass(frozen=True)
class SweepReport:
    rows: tuple[SweepRow, ...]
    config: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        lines = [",".join(CSV_COLUMNS)]
        for row in self.rows:
            lines.append(",".join(_cell(getattr(row, c)) for c in CSV_COLUMNS))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        payload = {
            "config": self.config,
            "rows": [row.to_dict() for row in self.rows],
            "errors": {str(row.N): row.error for row in self.rows if row.error},
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "SweepReport":
        payload = json.loads(text)
        rows = tuple(SweepRow.from_dict(r) for r in payload.get("rows", []))
        return cls(rows=rows, config=payload.get("config", {}))

    @property
    def failed_rows(self) -> tuple[int, ...]:
        return tuple(row.N for row in self.rows if row.error)
