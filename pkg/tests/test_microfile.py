import csv
import logging

import numpy as np
import pytest

from groupanon import reference as ref
from groupanon.errors import ParseError, SchemaError
from groupanon.microfile import (
    Attribute,
    GroupSpec,
    Microfile,
    check_group_in_superset,
    load_microfile,
    members,
    superset_members,
    write_microfile,
)

TOY_SCHEMA = (
    Attribute("area", "nominal", "parameter"),
    Attribute("service", "nominal", "vital", weight=1.0),
    Attribute("pay", "ordinal", "influential", weight=1.0),
)


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    return path


def toy_file(tmp_path, rows=None):
    rows = rows if rows is not None else [
        ["a1", "1", "100"],
        ["a2", "0", "200"],
        ["a1", "1", "150"],
    ]
    return write_csv(tmp_path / "toy.csv", ["area", "service", "pay"], rows)


class TestAttribute:
    def test_rejects_unknown_kind(self):
        with pytest.raises(SchemaError, match="kind"):
            Attribute("x", "continuous", "plain")

    def test_rejects_unknown_role(self):
        with pytest.raises(SchemaError, match="role"):
            Attribute("x", "nominal", "key")

    @pytest.mark.parametrize("role", ["vital", "influential"])
    def test_weighted_roles_require_weight(self, role):
        with pytest.raises(SchemaError, match="weight"):
            Attribute("x", "nominal", role)
        with pytest.raises(SchemaError, match="weight"):
            Attribute("x", "nominal", role, weight=-1.0)

    def test_plain_role_rejects_weight(self):
        with pytest.raises(SchemaError, match="weight"):
            Attribute("x", "nominal", "plain", weight=1.0)


class TestLoad:
    def test_identifier_column_dropped(self, tmp_path, caplog):
        path = write_csv(
            tmp_path / "f.csv",
            ["ssn", "area", "service", "pay"],
            [["123", "a1", "1", "10"]],
        )
        with caplog.at_level(logging.WARNING):
            m = load_microfile(path, TOY_SCHEMA, identifiers=["ssn"])
        assert len(m.attributes) == 3
        assert "ssn" not in m.columns
        assert any("identifier" in rec.message for rec in caplog.records)

    def test_fixture_counts_match_reference(self):
        # independent oracle: count members per area straight off the CSV
        counts = {code: 0 for code in ref.AREA_CODES}
        with open(ref.fixture_path()) as fh:
            rows = list(csv.DictReader(fh))
        for row in rows:
            if row["military_service"] == "1":
                counts[row["area"]] += 1
        oracle = np.array([counts[code] for code in ref.AREA_CODES], dtype=float)
        assert np.array_equal(oracle, ref.QUANTITY)

        m = ref.load_quantity_microfile()
        assert m.n_records == len(rows)

    def test_ragged_row_names_the_row(self, tmp_path):
        path = tmp_path / "ragged.csv"
        path.write_text("area,service,pay\na1,1,10\na2,0\n")
        with pytest.raises(ParseError, match="row 3"):
            load_microfile(path, TOY_SCHEMA)

    def test_missing_declared_column(self, tmp_path):
        path = write_csv(tmp_path / "f.csv", ["area", "service"], [["a1", "1"]])
        with pytest.raises(SchemaError, match="pay"):
            load_microfile(path, TOY_SCHEMA)

    def test_non_numeric_ordinal_names_row(self, tmp_path):
        path = toy_file(tmp_path, [["a1", "1", "100"], ["a2", "0", "lots"]])
        with pytest.raises(ParseError, match="row 3"):
            load_microfile(path, TOY_SCHEMA)

    def test_empty_file_is_an_error(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(ParseError, match="empty"):
            load_microfile(path, TOY_SCHEMA)

    def test_empty_value_rejected_outside_plain_columns(self, tmp_path):
        path = toy_file(tmp_path, [["a1", "", "100"]])
        with pytest.raises(ParseError, match="vital"):
            load_microfile(path, TOY_SCHEMA)

    def test_empty_value_allowed_in_plain_ordinal(self, tmp_path):
        schema = TOY_SCHEMA[:2] + (Attribute("pay", "ordinal", "plain"),)
        path = toy_file(tmp_path, [["a1", "1", ""]])
        m = load_microfile(path, schema)
        assert np.isnan(m.column("pay")[0])

    def test_undeclared_columns_ignored(self, tmp_path):
        path = write_csv(
            tmp_path / "f.csv",
            ["area", "service", "pay", "note"],
            [["a1", "1", "10", "hello"]],
        )
        m = load_microfile(path, TOY_SCHEMA)
        assert set(m.columns) == {"area", "service", "pay"}


class TestWrite:
    def test_roundtrip_identity(self, tmp_path):
        m = load_microfile(toy_file(tmp_path), TOY_SCHEMA)
        out = tmp_path / "copy.csv"
        write_microfile(m, out)
        m2 = load_microfile(out, TOY_SCHEMA)
        assert m2.attributes == m.attributes
        for name in m.columns:
            assert np.array_equal(m.columns[name], m2.columns[name])

    def test_roundtrip_preserves_text(self, tmp_path):
        path = toy_file(tmp_path)
        m = load_microfile(path, TOY_SCHEMA)
        out = tmp_path / "copy.csv"
        write_microfile(m, out)
        assert out.read_text() == path.read_text()

    def test_empty_record_set_writes_header_only(self, tmp_path):
        path = write_csv(tmp_path / "f.csv", ["area", "service", "pay"], [])
        m = load_microfile(path, TOY_SCHEMA)
        assert m.n_records == 0
        out = tmp_path / "empty_out.csv"
        write_microfile(m, out)
        assert out.read_text().strip() == "area,service,pay"

    def test_record_count_invariant(self, tmp_path, fixture_microfile):
        out = tmp_path / "again.csv"
        write_microfile(fixture_microfile, out)
        m2 = load_microfile(out, ref.FIXTURE_SCHEMA)
        assert m2.n_records == fixture_microfile.n_records

    def test_packaged_fixture_matches_its_generator(self, tmp_path):
        # the committed CSV must be reproducible byte for byte
        out = tmp_path / "regen.csv"
        write_microfile(ref.build_quantity_microfile(), out)
        with open(ref.fixture_path(), "rb") as fh:
            assert out.read_bytes() == fh.read()


class TestMembers:
    def test_empty_vital_matches_everything(self, tmp_path):
        m = load_microfile(toy_file(tmp_path), TOY_SCHEMA)
        g = GroupSpec.create({}, "area", ["a1", "a2", "a3", "a4"])
        assert list(members(m, g)) == [0, 1, 2]

    def test_fixture_member_total(self, fixture_microfile, fixture_group):
        assert members(fixture_microfile, fixture_group).size == 6272

    def test_absent_vital_value_matches_nothing(self, tmp_path):
        m = load_microfile(toy_file(tmp_path), TOY_SCHEMA)
        g = GroupSpec.create({"service": {"9"}}, "area", ["a1", "a2", "a3", "a4"])
        assert members(m, g).size == 0

    def test_group_is_subset_of_superset(self, fixture_microfile, fixture_group):
        inside = set(members(fixture_microfile, fixture_group))
        wider = set(superset_members(fixture_microfile, fixture_group))
        assert inside <= wider
        check_group_in_superset(fixture_microfile, fixture_group)

    def test_group_outside_superset_detected(self, tmp_path):
        schema = TOY_SCHEMA + (Attribute("sex", "nominal", "plain"),)
        path = write_csv(
            tmp_path / "f.csv",
            ["area", "service", "pay", "sex"],
            [["a1", "1", "10", "2"]],
        )
        m = load_microfile(path, schema)
        g = GroupSpec.create(
            {"service": {"1"}}, "area", ["a1", "a2", "a3", "a4"], superset_vital={"sex": {"1"}}
        )
        with pytest.raises(SchemaError, match="outside"):
            check_group_in_superset(m, g)


class TestGroupSpec:
    def test_parameter_cannot_be_vital(self):
        with pytest.raises(SchemaError, match="parameter"):
            GroupSpec.create({"area": {"a1"}}, "area", ["a1", "a2", "a3", "a4"])

    def test_parameter_order_needs_four_values(self):
        with pytest.raises(SchemaError, match="at least 4"):
            GroupSpec.create({"v": {"1"}}, "area", ["a1", "a2"])

    def test_parameter_order_must_be_distinct(self):
        with pytest.raises(SchemaError, match="duplicate"):
            GroupSpec.create({"v": {"1"}}, "area", ["a1", "a1", "a2", "a3"])


class TestMicrofileInvariants:
    def test_columns_must_match_attributes(self):
        with pytest.raises(SchemaError, match="columns"):
            Microfile(TOY_SCHEMA, {"area": np.array(["a1"])})

    def test_ragged_columns_rejected(self):
        cols = {
            "area": np.array(["a1", "a2"]),
            "service": np.array(["1", "0"]),
            "pay": np.array([1.0]),
        }
        with pytest.raises(SchemaError, match="ragged"):
            Microfile(TOY_SCHEMA, cols)

    def test_columns_are_read_only(self, fixture_microfile):
        with pytest.raises(ValueError):
            fixture_microfile.column("area")[0] = "zzz"

    def test_with_column_rejects_wrong_length(self, fixture_microfile):
        with pytest.raises(SchemaError, match="length"):
            fixture_microfile.with_column("area", np.array(["a"]))
