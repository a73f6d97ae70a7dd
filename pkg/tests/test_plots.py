"""Tests for the error plots."""

import xml.etree.ElementTree as ET

import numpy as np
import pandas as pd
import pytest

from cli.plots import error_figure, render_svg, write_html
from utils.exceptions import ReportError

SVG = "{http://www.w3.org/2000/svg}"


@pytest.fixture
def frame():
    t = np.linspace(0.625, 2.5, 20)
    return pd.DataFrame({
        "t": t,
        "err_bk_L2": 2e-3 + 1e-4 * t,
        "err_star_L2": 4e-4 * np.exp(-t),
        "err_svda_L2": 5e-4 + 1e-5 * t ** 2,
    })


class TestSVG:
    def test_three_curves(self, frame):
        root = ET.fromstring(render_svg(frame))
        polylines = root.findall(f"{SVG}polyline")
        assert len(polylines) == 3
        assert [p.get("data-column") for p in polylines] == ["err_bk_L2", "err_star_L2", "err_svda_L2"]
        assert all(len(p.get("points").split()) == 20 for p in polylines)

    def test_ranges_match_the_data(self, frame):
        root = ET.fromstring(render_svg(frame))
        for polyline in root.findall(f"{SVG}polyline"):
            column = frame[polyline.get("data-column")]
            assert float(polyline.get("data-ymin")) == pytest.approx(column.min(), rel=1e-12)
            assert float(polyline.get("data-ymax")) == pytest.approx(column.max(), rel=1e-12)

    def test_points_stay_inside_the_canvas(self, frame):
        root = ET.fromstring(render_svg(frame))
        width, height = float(root.get("width")), float(root.get("height"))
        for polyline in root.findall(f"{SVG}polyline"):
            xy = np.array([p.split(",") for p in polyline.get("points").split()], dtype=float)
            assert np.all((xy[:, 0] >= 0) & (xy[:, 0] <= width))
            assert np.all((xy[:, 1] >= 0) & (xy[:, 1] <= height))

    def test_zero_errors_are_drawn(self, frame):
        frame["err_svda_L2"] = 0.0
        root = ET.fromstring(render_svg(frame))
        assert len(root.findall(f"{SVG}polyline")) == 3

    def test_missing_column(self, frame):
        with pytest.raises(ReportError):
            render_svg(frame.drop(columns=["err_star_L2"]))

    def test_empty_frame(self, frame):
        with pytest.raises(ReportError):
            render_svg(frame.iloc[0:0])


class TestHTML:
    def test_log_axis_and_div_id(self, frame, tmp_path):
        fig = error_figure(frame)
        assert fig.layout.yaxis.type == "log"
        assert len(fig.data) == 3
        path = tmp_path / "errors.html"
        write_html(frame, path)
        assert 'id="svda-errors"' in path.read_text()
