"""
JSON and CSV emitters for protocol reports and sweep tables.

JSON documents carry schema_version and the resolved RunConfig; complex
numbers are [re, im] pairs. Keys are sorted and floats use repr, so a fixed
config and seed always produce the same bytes.
"""

import csv
import io
import json
from dataclasses import asdict, is_dataclass
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np

from .config import PhysicalParams, RunConfig
from .models import (
    BasisState,
    DensityMatrix,
    MeasurementOutcome,
    OperatorMatrix,
    ProtocolReport,
    Propagator,
    QuantumState,
)

SCHEMA_VERSION = "1"

VERIFY_CSV_HEADER = ("gt", "max_abs_err_eq8", "max_abs_err_eq14")
EVOLVE_CSV_HEADER = ("gt", "basis_label", "re", "im", "prob")
REPORT_CSV_HEADER = ("index", "protocol", "time", "observable", "value")


def complex_pair(value: complex) -> List[float]:
    value = complex(value)
    return [float(value.real), float(value.imag)]


def _array_to_json(array: np.ndarray) -> Any:
    if np.iscomplexobj(array):
        return [_array_to_json(row) for row in array] if array.ndim > 1 else [complex_pair(z) for z in array]
    return array.tolist()


class ReportJSONEncoder(json.JSONEncoder):
    """Custom JSON encoder for simulator data types."""

    def default(self, obj: Any) -> Any:
        """Convert simulator objects to JSON-serializable format."""
        if isinstance(obj, complex):
            return complex_pair(obj)
        elif isinstance(obj, np.ndarray):
            return _array_to_json(obj)
        elif isinstance(obj, np.complexfloating):
            return complex_pair(obj)
        elif isinstance(obj, np.floating):
            return float(obj)
        elif isinstance(obj, np.integer):
            return int(obj)
        elif isinstance(obj, np.bool_):
            return bool(obj)
        elif isinstance(obj, Enum):
            return obj.value
        elif isinstance(obj, BasisState):
            return obj.label
        elif isinstance(obj, QuantumState):
            return {"basis": [s.label for s in obj.basis], "amplitudes": obj.amplitudes}
        elif isinstance(obj, DensityMatrix):
            return {"dims": list(obj.dims), "subsystems": list(obj.subsystems), "entries": obj.entries}
        elif isinstance(obj, (OperatorMatrix, Propagator)):
            entries = obj.entries if isinstance(obj, OperatorMatrix) else obj.matrix
            return {"basis": [s.label for s in obj.basis], "entries": entries}
        elif isinstance(obj, MeasurementOutcome):
            return {
                "photon_count": obj.photon_count,
                "probability": obj.probability,
                "conditional_state": obj.conditional_state,
            }
        elif isinstance(obj, (PhysicalParams, RunConfig)):
            return obj.to_dict()
        elif is_dataclass(obj):
            return asdict(obj)
        return super().default(obj)


def _plain(value: Any) -> Any:
    """Replace complex scalars nested in dicts and lists, which json never hands to default()."""
    if isinstance(value, (complex, np.complexfloating)):
        return complex_pair(value)
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def report_to_dict(report: ProtocolReport) -> Dict[str, Any]:
    return {
        "protocol_name": report.protocol_name,
        "params": report.params.to_dict(),
        "schedule": [[event, float(time)] for event, time in report.schedule],
        "outcomes": report.outcomes,
        "final_states": report.final_states,
        "final_densities": report.final_densities,
        "figures_of_merit": {k: float(v) for k, v in report.figures_of_merit.items()},
        "details": _plain(report.details),
        "seed": report.seed,
        "schema_version": report.schema_version,
    }


def serialize_to_json(obj: Any) -> str:
    """Serialize an object to a sorted, indented JSON string."""
    try:
        return json.dumps(_plain(obj), cls=ReportJSONEncoder, ensure_ascii=False, sort_keys=True,
                          indent=2, allow_nan=False)
    except (TypeError, ValueError) as e:
        raise ValueError(f"Failed to serialize object to JSON: {e}")


def serialize_to_bytes(obj: Any) -> bytes:
    """Serialize an object to JSON bytes."""
    return (serialize_to_json(obj) + "\n").encode('utf-8')


def deserialize_from_json(json_str: str) -> Dict[str, Any]:
    """Parse an emitted JSON document."""
    try:
        data = json.loads(json_str)
    except json.JSONDecodeError as e:
        raise ValueError(f"Failed to deserialize JSON document: {e}")
    if not isinstance(data, dict) or "schema_version" not in data:
        raise ValueError("JSON document has no schema_version")
    return data


def deserialize_from_bytes(json_bytes: bytes) -> Dict[str, Any]:
    """Parse emitted JSON bytes."""
    try:
        return deserialize_from_json(json_bytes.decode('utf-8'))
    except UnicodeDecodeError as e:
        raise ValueError(f"Failed to decode bytes to UTF-8: {e}")


def document(config: Optional[RunConfig], **body: Any) -> Dict[str, Any]:
    """Top-level JSON document: schema version, resolved config and the payload."""
    payload = {"schema_version": SCHEMA_VERSION, "config": config.to_dict() if config else None}
    payload.update(body)
    return payload


def _csv_bytes(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> bytes:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buffer.getvalue().encode('utf-8')


def verify_rows_to_csv(rows: Iterable[Sequence[float]]) -> bytes:
    return _csv_bytes(VERIFY_CSV_HEADER, rows)


def evolve_rows_to_csv(rows: Iterable[Sequence[Any]]) -> bytes:
    return _csv_bytes(EVOLVE_CSV_HEADER, rows)


def state_rows(gt: float, state: QuantumState) -> List[List[Any]]:
    """One (gt, label, re, im, prob) row per basis state."""
    return [
        [float(gt), s.label, float(a.real), float(a.imag), float(abs(a) ** 2)]
        for s, a in zip(state.basis, state.amplitudes)
    ]


def reports_to_csv(reports: Sequence[ProtocolReport]) -> bytes:
    """One row per figure of merit, stamped with the report's final schedule time."""
    rows = []
    for index, report in enumerate(reports):
        end = float(report.schedule[-1][1]) if report.schedule else 0.0
        for name in sorted(report.figures_of_merit):
            rows.append([index, report.protocol_name, end, name, float(report.figures_of_merit[name])])
    return _csv_bytes(REPORT_CSV_HEADER, rows)


def emit(reports: Sequence[ProtocolReport], fmt: str, config: Optional[RunConfig] = None) -> bytes:
    """Serialize protocol reports as JSON (versioned document) or CSV."""
    if fmt == "csv":
        return reports_to_csv(reports)
    if fmt == "json":
        return serialize_to_bytes(document(config, reports=[report_to_dict(r) for r in reports]))
    raise ValueError(f"Unsupported output format '{fmt}'")
