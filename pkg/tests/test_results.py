"""
Unit tests for CSV / JSON result persistence
"""

import json

import pytest

from frappe_bench.bench.results import (
    CSV_HEADER,
    ResultWriter,
    convert_results,
    emit_results,
    read_results,
    result_record,
)
from frappe_bench.models.experiment import (
    ExperimentResult,
    MetricReport,
    NoiseFamily,
    PlanCell,
    Scenario,
)
from frappe_bench.models.solver_config import AlgorithmName


def make_result(**overrides) -> ExperimentResult:
    fields = {
        "scenario": Scenario.NOISE_TABLE,
        "algorithm": AlgorithmName.FRAPPE,
        "cell": PlanCell(
            n_samples=2000, n_features=100, sparsity=10, epsilon=0.5, delta=1e-3, noise=NoiseFamily.CAUCHY
        ),
        "replication": 3,
        "metrics": MetricReport(mse_weights=0.123456789, f1=0.8, precision=1.0, recall=2 / 3, sparsity=7),
        "seconds": 1.25,
        "hyperparameter": 0.031622776601683794,
        "seed": 20240101,
    }
    fields.update(overrides)
    return ExperimentResult(**fields)


class TestRecords:
    """Test flattening results into rows"""

    def test_column_order(self):
        """Records carry exactly the header columns"""
        assert tuple(result_record(make_result())) == CSV_HEADER

    def test_error_row(self):
        """Failed tasks put the message in the hyperparameter column and leave metrics empty"""
        record = result_record(make_result(metrics=None, status="error", error="boom", hyperparameter=None))
        assert record["hyperparameter"] == "error: boom"
        assert record["mse"] is None
        assert record["f1"] is None

    def test_real_data_row(self):
        """Real-data cells report prediction MSE and noise 'real'"""
        cell = PlanCell(n_samples=400, n_features=13, epsilon=0.2, delta=1e-3)
        record = result_record(
            make_result(scenario=Scenario.REAL_DATA, cell=cell, metrics=MetricReport(mse_pred=2.5, mae_pred=1.1, sparsity=4))
        )
        assert record["noise"] == "real"
        assert record["mse"] == 2.5
        assert record["s"] is None


class TestCsv:
    """Test the CSV format"""

    def test_empty_result_set(self, tmp_path):
        """Zero results give the header line only"""
        path = tmp_path / "empty.csv"
        emit_results([], str(path))
        assert path.read_text() == ",".join(CSV_HEADER) + "\n"

    def test_one_result(self, tmp_path):
        """One result gives header plus one row"""
        path = tmp_path / "one.csv"
        emit_results([make_result()], str(path))
        lines = path.read_text().splitlines()
        assert len(lines) == 2
        assert lines[1].startswith("noise-table,frappe,2000,100,10,0.5,cauchy,3,0.123456789,,0.8,7,1.25,")

    def test_read_back(self, tmp_path):
        """Parsed values come back typed"""
        path = tmp_path / "rows.csv"
        emit_results([make_result(), make_result(metrics=None, status="error", error="x", hyperparameter=None)], str(path))
        rows = read_results(str(path))
        assert rows[0]["N"] == 2000
        assert rows[0]["hyperparameter"] == 0.031622776601683794
        assert rows[0]["mae"] is None
        assert rows[1]["hyperparameter"] == "error: x"


class TestJson:
    """Test the JSON format"""

    def test_empty_array(self, tmp_path):
        """Zero results give an empty array"""
        path = tmp_path / "empty.json"
        emit_results([], str(path), "json")
        assert json.loads(path.read_text()) == []

    def test_records(self, tmp_path):
        """One object per result with the header keys"""
        path = tmp_path / "rows.json"
        emit_results([make_result(), make_result(replication=4)], str(path), "json")
        rows = json.loads(path.read_text())
        assert [r["replication"] for r in rows] == [3, 4]
        assert list(rows[0]) == list(CSV_HEADER)

    def test_csv_json_csv_is_byte_identical(self, tmp_path):
        """Converting CSV -> JSON -> CSV reproduces the original file"""
        results = [
            make_result(),
            make_result(algorithm=AlgorithmName.DP_IGHT, hyperparameter=7.0, seconds=0.1 + 0.2),
            make_result(metrics=None, status="error", error="n=1 exceeds N", hyperparameter=None),
        ]
        original = tmp_path / "a.csv"
        emit_results(results, str(original))
        convert_results(str(original), str(tmp_path / "b.json"), "json")
        convert_results(str(tmp_path / "b.json"), str(tmp_path / "c.csv"), "csv")
        assert (tmp_path / "c.csv").read_bytes() == original.read_bytes()


class TestResultWriter:
    """Test the streaming writer"""

    def test_unknown_format(self, tmp_path):
        """Only csv and json are supported"""
        with pytest.raises(ValueError):
            ResultWriter(str(tmp_path / "r.xml"), "xml")

    def test_creates_parent_directory(self, tmp_path):
        """Missing output directories are created"""
        path = tmp_path / "nested" / "dir" / "r.csv"
        with ResultWriter(str(path)) as writer:
            writer.write(make_result())
        assert writer.count == 1
        assert path.exists()

    def test_write_requires_open(self, tmp_path):
        """Writing before open is a programming error"""
        with pytest.raises(RuntimeError):
            ResultWriter(str(tmp_path / "r.csv")).write(make_result())


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
