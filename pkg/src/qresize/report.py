"""Run reports: stable-key JSON with 12-significant-digit floats."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

from .circuit import CircuitStats

SCHEMA_VERSION = "1"


@dataclass
class RunReport:
    flow: str
    seed: int
    config: dict
    input_stats: dict
    output_stats: dict
    applied_pairs: list = field(default_factory=list)
    distances: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    schema_version: str = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return _round_floats(asdict(self))


def stats_dict(stats: CircuitStats) -> dict:
    return {
        "width": stats.width,
        "cx_count": stats.cx_count,
        "two_qubit_depth": stats.two_qubit_depth,
        "weighted_depth": stats.weighted_depth,
        "mmr_count": stats.mmr_count,
    }


def _round_floats(value):
    if isinstance(value, float):
        return float(f"{value:.12g}")
    if isinstance(value, dict):
        return {k: _round_floats(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round_floats(v) for v in value]
    return value


def render_report(report: RunReport) -> str:
    return json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n"


def write_report(report: RunReport, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(render_report(report))
