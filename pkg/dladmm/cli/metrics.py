"""Append-only per-iteration metrics files (CSV or JSON lines) and the run summary."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from types import TracebackType
from typing import IO, Any, Literal

from dladmm.admm.trainer import IterationRecord

MetricsFormat = Literal["csv", "jsonl"]


def _json_safe(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


class MetricsWriter:
    """Writes one row per :class:`IterationRecord`, flushing after each.

    CSV columns follow :meth:`IterationRecord.as_row`; the header is taken from the
    first record.
    """

    def __init__(self, path: Path, fmt: MetricsFormat = "csv") -> None:
        self.path = path
        self.fmt = fmt
        self.rows = 0
        self._handle: IO[str] | None = None
        self._csv: csv.DictWriter[str] | None = None

    def __enter__(self) -> MetricsWriter:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._handle = self.path.open("w", encoding="utf-8", newline="")
        return self

    def __exit__(self, exc_type: type[BaseException] | None, exc: BaseException | None, tb: TracebackType | None) -> None:
        if self._handle is not None:
            self._handle.close()
            self._handle = None

    def write(self, record: IterationRecord) -> None:
        if self._handle is None:
            raise RuntimeError("MetricsWriter used outside its context")
        row = record.as_row()
        if self.fmt == "csv":
            if self._csv is None:
                self._csv = csv.DictWriter(self._handle, fieldnames=list(row))
                self._csv.writeheader()
            self._csv.writerow(row)
        else:
            self._handle.write(json.dumps({key: _json_safe(value) for key, value in row.items()}) + "\n")
        self._handle.flush()
        self.rows += 1


def summarize(history: list[IterationRecord]) -> dict[str, Any]:
    """Best and final accuracies, final energies and total wall time of a run."""
    if not history:
        return {"iterations": 0}
    final = history[-1]
    tests = [r.test_accuracy for r in history if r.test_accuracy is not None]
    return {
        "iterations": len(history),
        "best_train_accuracy": max(r.train_accuracy for r in history),
        "best_test_accuracy": max(tests) if tests else None,
        "final_train_accuracy": final.train_accuracy,
        "final_test_accuracy": final.test_accuracy,
        "final_objective": final.objective_F,
        "final_lagrangian": final.lagrangian,
        "final_residual_norm": final.residual_norm,
        "total_seconds": sum(r.wall_ms for r in history) / 1000.0,
    }


def write_summary(path: Path, summary: dict[str, Any]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps({key: _json_safe(value) for key, value in summary.items()}, indent=2) + "\n", encoding="utf-8")
