import os

import pytest

from momentplots import report_figures
from momentplots.cli import main


def _names(paths):
    return sorted(os.path.basename(p) for p in paths)


def test_table1_figure_set(data, tmp_path):
    pair = [str(data / "sample_semiclassical.csv"), str(data / "sample_classical.csv")]
    written = report_figures("table1", pair, str(tmp_path))
    assert _names(written) == [
        "table1_angles.png", "table1_angles.svg",
        "table1_path3d.png", "table1_path3d.svg",
        "table1_uncertainty.png", "table1_uncertainty.svg",
    ]
    for p in written:
        assert os.path.getsize(p) > 1000


def test_table2_figure_set(sweep_paths, tmp_path):
    written = report_figures("table2", sweep_paths, str(tmp_path))
    assert _names(written) == ["table2_spread_contour.png", "table2_spread_contour.svg"]


def test_makarov_figure_set(data, sweep_paths, tmp_path):
    pair = [str(data / "sample_semiclassical.csv"), str(data / "sample_classical.csv")]
    written = report_figures("makarov_metrics", pair + sweep_paths, str(tmp_path))
    assert len(written) == 8
    assert any("spread_contour" in p for p in written)


def test_unknown_report_rejected(data, tmp_path):
    with pytest.raises(ValueError, match="unknown report"):
        report_figures("table9", [str(data / "sample_semiclassical.csv")], str(tmp_path))


def test_early_stopped_grid_member_is_left_out(data, sweep_paths, tmp_path):
    # one member with a truncated time grid must not sink the whole contour
    lines = open(sweep_paths[2]).read().splitlines()
    short = tmp_path / "short.csv"
    short.write_text("\n".join(lines[:-6]) + "\n")
    inputs = sweep_paths[:2] + [str(short)] + sweep_paths[3:]
    written = report_figures("table2", inputs, str(tmp_path))
    assert _names(written) == ["table2_spread_contour.png", "table2_spread_contour.svg"]


def test_cli_renders(data, tmp_path, capsys):
    out = tmp_path / "fig"
    code = main(["uncertainty_panels", str(data / "sample_semiclassical.csv"),
                 "--out", str(out)])
    assert code == 0
    assert out.with_suffix(".png").exists() and out.with_suffix(".svg").exists()
    assert "wrote" in capsys.readouterr().out


def test_cli_names_offending_column(data, tmp_path, capsys):
    lines = (data / "sample_semiclassical.csv").read_text().splitlines()
    lines[2] = lines[2].replace("p_phi", "pphi")
    bad = tmp_path / "bad.csv"
    bad.write_text("\n".join(lines) + "\n")
    code = main(["uncertainty_panels", str(bad), "--out", str(tmp_path / "fig")])
    assert code == 2
    err = capsys.readouterr().err
    assert "p_phi" in err and "schema mismatch" in err


def test_cli_single_format(data, tmp_path):
    out = tmp_path / "only_svg"
    code = main(["angle_timeseries_with_belts", str(data / "sample_circle.csv"),
                 "--out", str(out), "--format", "svg", "--label", "rotor"])
    assert code == 0
    assert out.with_suffix(".svg").exists()
    assert not out.with_suffix(".png").exists()
