"""
Tests for fault_complex.storage and fault_complex.errors
==========================================================

Covers:
- Atomic text / JSON writes
- CSV writing, appending and header checks
- Value formatting
- Exit-code mapping of the exception hierarchy
"""

import json

import pytest

from fault_complex.errors import (
    DecoderInconsistencyError,
    FaultComplexError,
    FitConvergenceError,
    InconsistentComplexError,
    InvalidComplexError,
    SpecError,
    SubsystemPreconditionError,
    exit_code_for,
)
from fault_complex.storage import (
    atomic_write_json,
    atomic_write_text,
    format_value,
    read_csv_rows,
    write_csv_rows,
)


class TestAtomicWrites:

    def test_write_text_creates_parents(self, tmp_path):
        path = tmp_path / "nested" / "out.txt"
        atomic_write_text(path, "hello\n")
        assert path.read_text() == "hello\n"

    def test_no_temp_files_left(self, tmp_path):
        atomic_write_json(tmp_path / "a.json", {"x": 1})
        assert [p.name for p in tmp_path.iterdir()] == ["a.json"]

    def test_json(self, tmp_path):
        path = tmp_path / "a.json"
        atomic_write_json(path, {"weight": "inf", "dims": [1, 2]})
        assert json.loads(path.read_text()) == {"weight": "inf", "dims": [1, 2]}

    def test_overwrite(self, tmp_path):
        path = tmp_path / "a.txt"
        atomic_write_text(path, "one")
        atomic_write_text(path, "two")
        assert path.read_text() == "two"


class TestCsv:

    def test_write_and_read(self, tmp_path):
        path = tmp_path / "r.csv"
        write_csv_rows(path, ["a", "b"], [{"a": 1, "b": 0.5}, {"a": 2, "b": True}])
        assert read_csv_rows(path) == [{"a": "1", "b": "0.5"}, {"a": "2", "b": "true"}]

    def test_header_only(self, tmp_path):
        path = tmp_path / "r.csv"
        write_csv_rows(path, ["a", "b"], [])
        assert path.read_text() == "a,b\n"

    def test_append_keeps_rows(self, tmp_path):
        path = tmp_path / "r.csv"
        write_csv_rows(path, ["a"], [{"a": 1}])
        write_csv_rows(path, ["a"], [{"a": 2}], append=True)
        assert [row["a"] for row in read_csv_rows(path)] == ["1", "2"]

    def test_append_header_mismatch(self, tmp_path):
        path = tmp_path / "r.csv"
        write_csv_rows(path, ["a"], [{"a": 1}])
        with pytest.raises(SpecError):
            write_csv_rows(path, ["b"], [{"b": 2}], append=True)

    def test_overwrite_without_append(self, tmp_path):
        path = tmp_path / "r.csv"
        write_csv_rows(path, ["a"], [{"a": 1}])
        write_csv_rows(path, ["a"], [{"a": 2}])
        assert [row["a"] for row in read_csv_rows(path)] == ["2"]

    def test_read_missing(self, tmp_path):
        with pytest.raises(SpecError):
            read_csv_rows(tmp_path / "none.csv")

    def test_format_value(self):
        assert format_value(0.1) == "0.1"
        assert format_value(1e-20) == "1e-20"
        assert format_value(False) == "false"
        assert format_value(7) == "7"


class TestExitCodes:

    def test_mapping(self):
        assert exit_code_for(SpecError("x")) == 2
        assert exit_code_for(SubsystemPreconditionError(["a", "b"])) == 2
        assert exit_code_for(InvalidComplexError("x")) == 3
        assert exit_code_for(InconsistentComplexError("x")) == 3
        assert exit_code_for(DecoderInconsistencyError("x")) == 4
        assert exit_code_for(FitConvergenceError("x")) == 5
        assert exit_code_for(RuntimeError("x")) == 1

    def test_class_attribute_is_the_source(self):
        class Custom(SpecError):
            exit_code = 7

        assert exit_code_for(Custom("x")) == 7
        assert exit_code_for(FaultComplexError("x")) == 1

    def test_spec_error_is_value_error(self):
        assert isinstance(SpecError("x"), ValueError)

    def test_decoder_context(self):
        err = DecoderInconsistencyError("bad", {"rank": 2}).with_context(window_start=3)
        assert err.diagnostics == {"rank": 2, "window_start": 3}
        assert "window_start=3" in str(err)

    def test_subsystem_violations(self):
        err = SubsystemPreconditionError(["first", "second"])
        assert err.violations == ["first", "second"]
        assert "first; second" in str(err)
