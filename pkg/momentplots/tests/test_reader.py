import numpy as np
import pytest

from momentplots import (
    SPHERE_COLUMNS,
    SchemaError,
    TrajectoryTable,
    column_checksum,
    read_trajectory,
)


def test_reads_sphere_sample(data):
    table = read_trajectory(data / "sample_semiclassical.csv")
    assert table.mode == "sphere"
    assert table.columns == SPHERE_COLUMNS
    assert table.data.shape == (41, 18)
    assert table.config["t_end"] == 2.0
    assert table.hbar() == 1.0
    t = table.column("t")
    assert t[0] == 0.0 and t[-1] == 2.0
    # dg columns are the serialized uncertainty products, already floored
    assert np.all(table.column("dg_theta") >= 0.25 - 1e-9)


def test_reads_circle_sample(data):
    table = read_trajectory(data / "sample_circle.csv")
    assert table.mode == "circle"
    assert table.data.shape == (41, 8)
    with pytest.raises(SchemaError, match="phi_unwrapped"):
        table.column("phi_unwrapped")


def _write_sample_variant(tmp_path, data, mangle):
    lines = (data / "sample_semiclassical.csv").read_text().splitlines()
    path = tmp_path / "variant.csv"
    path.write_text("\n".join(mangle(lines)) + "\n")
    return path


def test_renamed_column_is_named(tmp_path, data):
    def mangle(lines):
        lines[2] = lines[2].replace("g1100", "g11_00")
        return lines

    with pytest.raises(SchemaError, match="g1100") as err:
        read_trajectory(_write_sample_variant(tmp_path, data, mangle))
    assert err.value.column == "g1100"


def test_missing_trailing_column_is_named(tmp_path, data):
    def mangle(lines):
        lines[2] = lines[2].rsplit(",", 1)[0]
        return lines

    with pytest.raises(SchemaError, match="energy.*missing"):
        read_trajectory(_write_sample_variant(tmp_path, data, mangle))


def test_extra_column_is_named(tmp_path, data):
    def mangle(lines):
        lines[2] += ",bogus"
        return lines

    with pytest.raises(SchemaError, match="bogus"):
        read_trajectory(_write_sample_variant(tmp_path, data, mangle))


def test_missing_format_line(tmp_path, data):
    def mangle(lines):
        return lines[1:]

    with pytest.raises(ValueError, match="missing format line"):
        read_trajectory(_write_sample_variant(tmp_path, data, mangle))


def test_empty_body_rejected(tmp_path, data):
    def mangle(lines):
        return lines[:3]

    with pytest.raises(ValueError, match="no data rows"):
        read_trajectory(_write_sample_variant(tmp_path, data, mangle))


def test_ragged_row_rejected(tmp_path, data):
    def mangle(lines):
        lines[5] = lines[5].rsplit(",", 2)[0]
        return lines

    with pytest.raises(ValueError, match="expected 18"):
        read_trajectory(_write_sample_variant(tmp_path, data, mangle))


def test_hbar_found_in_nested_config():
    data = np.zeros((2, 18))
    nested = TrajectoryTable("x", "sphere", {"table1": {"hbar": 2.0}}, data)
    assert nested.hbar() == 2.0
    bare = TrajectoryTable("x", "sphere", {}, data)
    assert bare.hbar() == 1.0


def test_checksum_tracks_values_and_column_choice(data):
    table = read_trajectory(data / "sample_semiclassical.csv")
    base = column_checksum([table], [("t", "theta")])
    assert base == column_checksum([table], [("t", "theta")])
    assert base != column_checksum([table], [("t", "phi_unwrapped")])

    bumped = table.data.copy()
    bumped[7, 1] += 1e-12
    other = TrajectoryTable(table.path, table.mode, table.config, bumped)
    assert base != column_checksum([other], [("t", "theta")])
    # columns outside the consumed set do not enter the digest
    elsewhere = table.data.copy()
    elsewhere[7, 4] += 1.0
    assert base == column_checksum(
        [TrajectoryTable(table.path, table.mode, table.config, elsewhere)],
        [("t", "theta")],
    )
