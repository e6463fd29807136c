"""
CSV and JSON writers for run traces and experiment summaries.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from src.errors import ExperimentIOError
from src.optimizer.base import RunTrace, TraceRecord

logger = logging.getLogger(__name__)

CSV_COLUMNS = [
    "seed",
    "iter",
    "y",
    "best_y",
    "simple_regret",
    "delta_n",
    "projection_residual",
    "wall_ms",
]
FORMATS = ("csv", "json")
_OPTIONAL_FIELDS = ("z", "simple_regret", "delta_n", "projection_residual")

PathLike = Union[str, Path]


class NumpyEncoder(json.JSONEncoder):
    """JSON encoder that handles numpy arrays and scalars."""

    def default(self, obj):
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        if isinstance(obj, np.generic):
            return obj.item()
        return json.JSONEncoder.default(self, obj)


def trace_rows(trace: RunTrace) -> List[Dict[str, Any]]:
    """CSV rows of a trace, one per record."""
    return [
        {
            "seed": trace.seed,
            "iter": record.iter,
            "y": record.y,
            "best_y": record.best_y,
            "simple_regret": record.simple_regret,
            "delta_n": record.delta_n,
            "projection_residual": record.projection_residual,
            "wall_ms": record.wall_ms,
        }
        for record in trace.records
    ]


def record_to_dict(record: TraceRecord, seed: int) -> Dict[str, Any]:
    """JSON view of a record; absent optional values are omitted."""
    data: Dict[str, Any] = {
        "seed": seed,
        "iter": record.iter,
        "phase": record.phase.value,
        "x": record.x,
        "y": record.y,
        "best_y": record.best_y,
        "wall_ms": record.wall_ms,
    }
    for name in _OPTIONAL_FIELDS:
        value = getattr(record, name)
        if value is not None:
            data[name] = value
    return data


def summary_row(summary: Dict[str, Any]) -> Dict[str, Any]:
    """CSV encoding of an experiment summary in the trace columns."""
    return {
        "seed": "summary",
        "iter": summary["n_seeds"],
        "y": summary["q1"],
        "best_y": summary["q3"],
        "simple_regret": summary["median"],
        "delta_n": None,
        "projection_residual": None,
        "wall_ms": None,
    }


def _check_format(fmt: str) -> str:
    fmt = fmt.lower()
    if fmt not in FORMATS:
        raise ValueError(f"Unknown output format {fmt!r}; expected one of {FORMATS}")
    return fmt


def _write_csv(frame: pd.DataFrame, path: Path) -> None:
    frame.to_csv(path, index=False, na_rep="")


def _write_json(payload: Dict[str, Any], path: Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, cls=NumpyEncoder, indent=2)


def ensure_writable(path: PathLike) -> Path:
    """Create the parent directory and check the file can be opened for writing."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "a", encoding="utf-8"):
            pass
    except OSError as exc:
        raise ExperimentIOError(f"Cannot write results to {path}: {exc}") from exc
    return path


def emit_trace(
    trace: RunTrace, fmt: str, path: PathLike, config: Optional[Dict[str, Any]] = None
) -> Path:
    """
    Write a single trace.

    Args:
        trace: Run trace
        fmt: "csv" or "json"
        path: Output file
        config: Configuration echoed in the JSON header

    Returns:
        The written path

    Raises:
        ExperimentIOError: if the file cannot be written
    """
    return emit_experiment([trace], fmt, path, config, summary=None)


def emit_experiment(
    traces: Sequence[RunTrace],
    fmt: str,
    path: PathLike,
    config: Optional[Dict[str, Any]] = None,
    summary: Optional[Dict[str, Any]] = None,
) -> Path:
    """Write several traces, in the given order, plus an optional summary."""
    fmt = _check_format(fmt)
    path = Path(path)
    config = dict(config or {})
    if len(traces) == 1:
        config.setdefault("algorithm", traces[0].algorithm)
        config.setdefault("seed", traces[0].seed)

    try:
        if fmt == "csv":
            rows = [row for trace in traces for row in trace_rows(trace)]
            if summary is not None:
                rows.append(summary_row(summary))
            _write_csv(pd.DataFrame(rows, columns=CSV_COLUMNS), path)
        else:
            records: List[Dict[str, Any]] = [
                record_to_dict(record, trace.seed) for trace in traces for record in trace.records
            ]
            payload: Dict[str, Any] = {"config": config, "records": records}
            if summary is not None:
                payload["summary"] = summary
            _write_json(payload, path)
    except OSError as exc:
        raise ExperimentIOError(f"Failed to write {fmt} results to {path}: {exc}") from exc

    logger.info(f"Wrote {sum(len(trace) for trace in traces)} records to {path}")
    return path
