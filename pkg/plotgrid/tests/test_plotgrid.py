from pathlib import Path

import matplotlib.pyplot as plt
import pytest

from plotgrid import PlotSpec, plotted_data, read_rows, render_grid
from plotgrid.cli import main

DATA = Path(__file__).parent / "data"
GOLDEN = DATA / "golden_desk.csv"
HEADER = "rule,op,p,phi,level,num_elections,frac_changed,avg_replaced,std_replaced,seed\n"


@pytest.fixture(autouse=True)
def close_figures():
    yield
    plt.close("all")


class TestReadRows:
    def test_golden_csv_loads(self):
        rows = read_rows(str(GOLDEN), "frac_changed")
        assert len(rows) == 384
        assert {r.rule for r in rows} == {"av", "greedycc", "greedypav", "phragmen"}

    def test_bad_header_rejected(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(ValueError):
            read_rows(str(bad), "frac_changed")

    def test_empty_data_rejected(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text(HEADER)
        with pytest.raises(ValueError):
            read_rows(str(empty), "frac_changed")


class TestRenderGrid:
    @pytest.mark.parametrize("metric", ["frac_changed", "avg_replaced"])
    def test_golden_csv_gives_four_by_four_grid(self, tmp_path, metric):
        out = tmp_path / f"{metric}.png"
        fig = render_grid(PlotSpec(str(GOLDEN), metric, str(out)))
        assert out.exists() and out.stat().st_size > 0
        panels = [ax for ax in fig.axes if ax.get_subplotspec() is not None]
        assert len(panels) == 16  # 4 rules x 4 phi values
        # blue/orange series per p, solid/dashed per op: 4 lines per panel
        for ax in panels:
            lines = ax.get_lines()
            assert len(lines) == 4
            assert {line.get_color() for line in lines} == {"tab:blue", "tab:orange"}
            assert {line.get_linestyle() for line in lines} == {"-", "--"}

    def test_band_only_for_avg_replaced(self, tmp_path):
        fig_frac = render_grid(PlotSpec(str(GOLDEN), "frac_changed", str(tmp_path / "f.png")))
        fig_avg = render_grid(PlotSpec(str(GOLDEN), "avg_replaced", str(tmp_path / "a.png")))
        frac_polys = sum(len(ax.collections) for ax in fig_frac.axes)
        avg_polys = sum(len(ax.collections) for ax in fig_avg.axes)
        assert frac_polys == 0
        assert avg_polys > 0

    def test_single_cell_csv_gives_one_panel(self, tmp_path):
        csv_path = tmp_path / "one.csv"
        csv_path.write_text(
            HEADER + "av,add,0.100000,0.500000,0.050000,5,0.200000,0.400000,0.100000,7\n"
        )
        fig = render_grid(PlotSpec(str(csv_path), "frac_changed", str(tmp_path / "one.png")))
        panels = [ax for ax in fig.axes if ax.get_subplotspec() is not None]
        assert len(panels) == 1

    @pytest.mark.parametrize("metric", ["frac_changed", "avg_replaced"])
    def test_level_zero_rows_plot_at_exact_zero(self, tmp_path, metric):
        fig = render_grid(PlotSpec(str(GOLDEN), metric, str(tmp_path / "z.png")))
        for panel in plotted_data(fig):
            for line in panel:
                for x, y in line:
                    if x == 0.0:
                        assert y == 0.0

    def test_rerender_is_structurally_identical(self, tmp_path):
        spec1 = PlotSpec(str(GOLDEN), "avg_replaced", str(tmp_path / "r1.png"))
        spec2 = PlotSpec(str(GOLDEN), "avg_replaced", str(tmp_path / "r2.png"))
        data1 = plotted_data(render_grid(spec1))
        data2 = plotted_data(render_grid(spec2))
        assert data1 == data2
        assert (tmp_path / "r1.png").read_bytes() == (tmp_path / "r2.png").read_bytes()

    def test_unknown_metric_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            PlotSpec(str(GOLDEN), "std_replaced", str(tmp_path / "x.png"))


class TestCli:
    def test_renders_golden(self, tmp_path):
        out = tmp_path / "grid.png"
        rc = main(["--csv", str(GOLDEN), "--metric", "frac_changed", "--out", str(out)])
        assert rc == 0
        assert out.exists()

    def test_missing_file_fails_with_message(self, tmp_path, capsys):
        rc = main(["--csv", str(tmp_path / "nope.csv"), "--metric", "frac_changed",
                   "--out", str(tmp_path / "o.png")])
        assert rc == 1
        assert "error" in capsys.readouterr().err

    def test_phi_order_flag(self, tmp_path):
        out = tmp_path / "grid.png"
        rc = main(["--csv", str(GOLDEN), "--metric", "avg_replaced", "--out", str(out),
                   "--phi-order", "1,0.75,0.5,0.25"])
        assert rc == 0

    def test_phi_order_missing_from_data_fails(self, tmp_path, capsys):
        rc = main(["--csv", str(GOLDEN), "--metric", "avg_replaced",
                   "--out", str(tmp_path / "o.png"), "--phi-order", "0.9"])
        assert rc == 1
        assert "phi values" in capsys.readouterr().err
