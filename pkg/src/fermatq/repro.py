"""Re-run the reference tables and diff every cell against the stored fixtures."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

from .core import build_table
from .patterns import count_pattern, make_pattern

TABLE_IDS = ("T1", "A11", "A12", "A2")


def load_fixtures() -> dict:
    text = resources.files("fermatq").joinpath("data/tables.json").read_text(encoding="utf-8")
    return json.loads(text)


def truncate_3(x: Fraction) -> str:
    """Ratios are printed truncated, not rounded, to three decimals."""
    k = math.floor(x * 1000)
    return f"{k // 1000}.{k % 1000:03d}"


@dataclass
class Cell:
    name: str
    expected: object
    actual: object

    @property
    def match(self) -> bool:
        return self.expected == self.actual

    def as_dict(self) -> dict:
        return {"name": self.name, "expected": self.expected, "actual": self.actual, "match": self.match}


@dataclass
class ReproReport:
    table: str
    job: dict
    cells: list[Cell] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def ok(self) -> bool:
        return all(c.match for c in self.cells)

    @property
    def mismatches(self) -> list[Cell]:
        return [c for c in self.cells if not c.match]

    def as_dict(self) -> dict:
        return {
            "table": self.table,
            "job": self.job,
            "ok": self.ok,
            "cells": len(self.cells),
            "mismatches": len(self.mismatches),
            "results": [c.as_dict() for c in self.cells],
        }


def repro_t1(fx: dict) -> ReproReport:
    p = fx["p"]
    t = build_table(p)
    rep = ReproReport("T1", {"p": p})
    for b, (e, a) in enumerate(zip(fx["inverses"], t.inverses), start=1):
        rep.cells.append(Cell(f"inv[{b}]", e, a))
    for a_idx, row in enumerate(fx["rows"]):
        got = t.row(a_idx)
        for b, (e, v) in enumerate(zip(row, got), start=1):
            rep.cells.append(Cell(f"A[{a_idx},{b}]", e, v))
    return rep


def repro_pattern_table(name: str, fx: dict, workers: int | None = None) -> ReproReport:
    p = fx["p"]
    t = build_table(p)
    rep = ReproReport(name, {"p": p, "rows": len(fx["rows"])})
    for i, row in enumerate(fx["rows"], start=1):
        pattern = make_pattern(row["vectors"])
        r = count_pattern(t, pattern, row["sigma"], workers=workers)
        main = Fraction(p * p, math.factorial(pattern.N))
        rep.cells.append(Cell(f"row{i}.region_card", row["region_card"], r.region_card))
        rep.cells.append(Cell(f"row{i}.count", row["count"], r.count))
        rep.cells.append(Cell(f"row{i}.ratio", row["ratio"], truncate_3(main / r.count) if r.count else "inf"))
    return rep


def run_repro(table: str, workers: int | None = None) -> ReproReport:
    fixtures = load_fixtures()
    if table not in TABLE_IDS:
        raise ValueError(f"unknown table {table!r}; choose from {', '.join(TABLE_IDS)}")
    if table == "T1":
        return repro_t1(fixtures["T1"])
    return repro_pattern_table(table, fixtures[table], workers)
