import numpy as np
import pytest

from core.errors import ContractError, DimensionError
from models.report_models import HeatmapGrid
from services.output_service import OutputService, format_cell, heatmap_from_rows, read_csv
from templates.plot_style import FIDELITY_RAMP, fidelity_colormap


def test_format_cell():
    assert format_cell(1.0 / 3.0) == "0.333333333333"
    assert format_cell(np.float64(2.5e-13)) == "2.5e-13"
    assert format_cell(np.int64(7)) == "7"
    assert format_cell(True) == "true"
    assert format_cell("lab") == "lab"


def test_csv_layout(output_dir):
    service = OutputService(output_dir)
    path = service.write_csv("table.csv", "n_sites=4; chi=1.0", ["t", "value"], [(0.0, 1.0), (0.5, 0.25)])
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines == ["# config: n_sites=4; chi=1.0", "t,value", "0,1", "0.5,0.25"]

    comment, header, rows = read_csv(path)
    assert comment == "n_sites=4; chi=1.0"
    assert header == ["t", "value"]
    assert rows == [[0.0, 1.0], [0.5, 0.25]]


def test_heatmap_rows_round_trip(output_dir):
    grid = HeatmapGrid(x=[0.0, 0.5, 1.0], y=[5.0, 40.0], z=[[1.0, 0.9, 0.8], [1.0, 0.99, 0.98]])
    service = OutputService(output_dir)
    path = service.write_csv("grid.csv", "", ["chi_t", "ratio", "fidelity"], grid.long_rows())
    _, header, rows = read_csv(path)
    x, y, z = heatmap_from_rows(header, rows)
    assert np.allclose(x, grid.x)
    assert np.allclose(y, grid.y)
    assert np.allclose(z, grid.z)


def test_svg_rendering_is_deterministic(output_dir):
    grid = HeatmapGrid(x=np.linspace(0, 1, 4), y=[2.0, 20.0, 80.0], z=np.full((3, 4), 0.5))
    service = OutputService(output_dir)
    service.write_csv("grid.csv", "x", ["chi_t", "ratio", "fidelity"], grid.long_rows())
    first = service.render_heatmap("grid.csv", "a.svg", title="N = 4").read_bytes()
    second = service.render_heatmap("grid.csv", "b.svg", title="N = 4").read_bytes()
    assert first == second
    assert b"<svg" in first


def test_curve_rendering(output_dir):
    service = OutputService(output_dir)
    service.write_csv("curves.csv", "x", ["t", "sx_qs", "sx_direct"], [(0.0, 2.0, 2.0), (1.0, 1.0, 1.1)])
    path = service.render_curves("curves.csv", "curves.svg")
    assert path.exists()
    assert path.read_bytes() == service.render_curves("curves.csv", "again.svg").read_bytes()


def test_sixteen_step_ramp():
    assert len(FIDELITY_RAMP) == 16
    assert fidelity_colormap().N == 16


def test_heatmap_grid_validation():
    with pytest.raises(DimensionError):
        HeatmapGrid(x=[0.0, 1.0], y=[1.0], z=[[0.5]])
    with pytest.raises(ContractError):
        HeatmapGrid(x=[0.0], y=[1.0], z=[[1.5]])
