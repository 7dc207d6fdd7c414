"""
Unit tests for serialization utilities.
"""

import csv
import io
import json
import pytest
import sys
import os

import numpy as np

# Add the parent directory to the path so we can import the package
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from zeeman_cavity.config import PhysicalParams, RunConfig
from zeeman_cavity.models import BasisState, DensityMatrix, ProtocolReport, QuantumState
from zeeman_cavity.protocols import epr_generate
from zeeman_cavity.serialization import (
    EVOLVE_CSV_HEADER,
    REPORT_CSV_HEADER,
    VERIFY_CSV_HEADER,
    ReportJSONEncoder,
    deserialize_from_bytes,
    deserialize_from_json,
    emit,
    evolve_rows_to_csv,
    reports_to_csv,
    serialize_to_bytes,
    serialize_to_json,
    state_rows,
    verify_rows_to_csv,
)
from zeeman_cavity.state_space import sector_basis


def parse_csv(payload: bytes):
    return list(csv.reader(io.StringIO(payload.decode('utf-8'))))


class TestReportJSONEncoder:
    """Test ReportJSONEncoder class."""

    def test_complex_as_pair(self):
        assert json.loads(json.dumps(1.5 - 2j, cls=ReportJSONEncoder)) == [1.5, -2.0]

    def test_numpy_values(self):
        data = {"x": np.float64(0.25), "n": np.int64(3), "v": np.array([1j, 2.0])}
        decoded = json.loads(json.dumps(data, cls=ReportJSONEncoder))
        assert decoded == {"x": 0.25, "n": 3, "v": [[0.0, 1.0], [2.0, 0.0]]}

    def test_basis_state_label(self):
        assert json.loads(json.dumps(BasisState(2, -1, -1), cls=ReportJSONEncoder)) == "|2>(-1,-1)"

    def test_quantum_state(self):
        basis = sector_basis(-1).basis
        state = QuantumState.basis_vector(basis, BasisState(0, 0, -1))
        decoded = json.loads(json.dumps(state, cls=ReportJSONEncoder))
        assert decoded["basis"] == ["|1>(-1,-1)", "|0>(0,-1)", "|0>(-1,0)"]
        assert decoded["amplitudes"][1] == [1.0, 0.0]

    def test_density_matrix(self):
        rho = DensityMatrix((2,), np.diag([0.25, 0.75]), ("atom1",))
        decoded = json.loads(json.dumps(rho, cls=ReportJSONEncoder))
        assert decoded["dims"] == [2]
        assert decoded["subsystems"] == ["atom1"]
        assert decoded["entries"][1][1] == [0.75, 0.0]


class TestSerializationFunctions:
    """Test serialization utility functions."""

    def test_nested_complex_values(self):
        text = serialize_to_json({"schema_version": "1", "phase": {"c1": -1j}})
        assert json.loads(text)["phase"]["c1"] == [-0.0, -1.0]

    def test_sorted_keys(self):
        text = serialize_to_json({"b": 1, "a": 2})
        assert text.index('"a"') < text.index('"b"')

    def test_nan_rejected(self):
        with pytest.raises(ValueError, match="Failed to serialize"):
            serialize_to_json({"value": float('nan')})

    def test_unserializable(self):
        with pytest.raises(ValueError, match="Failed to serialize"):
            serialize_to_json({"value": object()})

    def test_bytes_round_trip(self):
        payload = serialize_to_bytes({"schema_version": "1", "figures": {"fidelity": 0.999}})
        assert payload.endswith(b"\n")
        assert deserialize_from_bytes(payload)["figures"]["fidelity"] == 0.999

    def test_schema_version_required(self):
        with pytest.raises(ValueError, match="schema_version"):
            deserialize_from_json('{"reports": []}')

    def test_invalid_json(self):
        with pytest.raises(ValueError, match="Failed to deserialize"):
            deserialize_from_json('{"schema_version": ')

    def test_invalid_utf8(self):
        with pytest.raises(ValueError, match="UTF-8"):
            deserialize_from_bytes(b'\xff\xfe')


class TestReportEmission:
    """Test JSON and CSV report emission."""

    def setup_method(self):
        self.config = RunConfig(protocol="epr", seed=5)
        self.report = epr_generate(1, PhysicalParams())
        self.report.seed = 5

    def test_json_document(self):
        document = deserialize_from_bytes(emit([self.report], "json", self.config))
        assert document["schema_version"] == "1"
        assert document["config"]["protocol"] == "epr"
        assert document["config"]["seed"] == 5
        report = document["reports"][0]
        assert report["protocol_name"] == "epr"
        assert report["seed"] == 5
        expected = 0.5 * np.sin(2 * np.pi / np.sqrt(7)) ** 2
        assert report["figures_of_merit"]["success_probability"] == pytest.approx(expected, abs=1e-10)
        assert report["final_states"]["target"]["amplitudes"][0] == pytest.approx([2 ** -0.5, 0.0])

    def test_json_is_byte_stable(self):
        first = emit([self.report], "json", self.config)
        second = emit([epr_generate(1, PhysicalParams())], "json", self.config)
        assert first != second
        again = epr_generate(1, PhysicalParams())
        again.seed = 5
        assert emit([again], "json", self.config) == first

    def test_report_csv(self):
        rows = parse_csv(reports_to_csv([self.report]))
        assert tuple(rows[0]) == REPORT_CSV_HEADER
        names = [row[3] for row in rows[1:]]
        assert names == sorted(self.report.figures_of_merit)
        assert all(row[1] == "epr" for row in rows[1:])

    def test_report_csv_time_from_schedule(self):
        report = ProtocolReport("custom", PhysicalParams(), schedule=[("start", 0.0), ("end", 2.5)],
                                figures_of_merit={"negativity": 0.5})
        rows = parse_csv(reports_to_csv([report]))
        assert rows[1] == ["0", "custom", "2.5", "negativity", "0.5"]

    def test_unknown_format(self):
        with pytest.raises(ValueError, match="Unsupported output format"):
            emit([self.report], "xml", self.config)


class TestSweepCSV:
    """Test the verify and evolve table writers."""

    def test_verify_header(self):
        rows = parse_csv(verify_rows_to_csv([(0.0, 1e-16, 2e-16)]))
        assert tuple(rows[0]) == VERIFY_CSV_HEADER
        assert float(rows[1][2]) == 2e-16

    def test_float_precision_survives(self):
        value = 0.1 + 0.2
        rows = parse_csv(verify_rows_to_csv([(value, 0.0, 0.0)]))
        assert float(rows[1][0]) == value

    def test_single_state_rows(self):
        basis = sector_basis(-2).basis
        state = QuantumState.basis_vector(basis, BasisState(0, -1, -1))
        rows = parse_csv(evolve_rows_to_csv(state_rows(1.5, state)))
        assert tuple(rows[0]) == EVOLVE_CSV_HEADER
        assert len(rows) == 2
        assert rows[1] == ["1.5", "|0>(-1,-1)", "1.0", "0.0", "1.0"]
