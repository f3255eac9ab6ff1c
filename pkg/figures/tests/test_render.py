import csv
import json
import os
import subprocess
import sys

import numpy as np
import pytest

from figures import FigureRecipe, RecipeError, render
from figures.recipes import read_csv


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def make_recipe(tmp_path, kind, csv_name, x, y, out_name, **extra):
    recipe = {"kind": kind, "input": csv_name, "output": out_name,
              "x": x, "y": y}
    recipe.update(extra)
    path = tmp_path / f"{out_name}.recipe.json"
    path.write_text(json.dumps(recipe))
    return path


def test_line_plot_values_equal_csv(tmp_path):
    xs = np.linspace(0, 1, 17)
    ys = np.sin(xs)
    write_csv(tmp_path / "d.csv", ["t", "value"],
              [("%.12e" % a, "%.12e" % b) for a, b in zip(xs, ys)])
    rpath = make_recipe(tmp_path, "line", "d.csv", "t", ["value"], "d.png")
    fig, ax, plotted = render(FigureRecipe.from_json(rpath))
    px, py = plotted["value"]
    line = ax.get_lines()[0]
    assert np.array_equal(line.get_xdata(), px)
    assert np.array_equal(line.get_ydata(), py)
    # plotted values equal the CSV exactly (round trip through %.12e)
    _, cols = read_csv(tmp_path / "d.csv")
    assert np.array_equal(py, np.array([float(v) for v in cols["value"]]))
    assert (tmp_path / "d.png").exists()


def test_polar_plot(tmp_path):
    th = np.linspace(-np.pi, np.pi, 25)
    write_csv(tmp_path / "p.csv", ["angle", "R"],
              [("%.12e" % a, "%.12e" % abs(np.cos(a))) for a in th])
    rpath = make_recipe(tmp_path, "polar", "p.csv", "angle", ["R"], "p.png")
    fig, ax, plotted = render(FigureRecipe.from_json(rpath))
    assert ax.name == "polar"
    assert (tmp_path / "p.png").exists()


def test_heatmap_with_labels(tmp_path):
    rows = []
    for x in (0.1, 0.2):
        for y in (0.5, 1.0):
            rows.append(("%.12e" % x, "%.12e" % y,
                         "SF" if x > 0.15 else "MI(1)"))
    write_csv(tmp_path / "h.csv", ["x", "y", "phase_label"], rows)
    rpath = make_recipe(tmp_path, "heatmap", "h.csv", "x", ["phase_label"],
                        "h.png", label_column="y")
    fig, ax, plotted = render(FigureRecipe.from_json(rpath))
    assert (tmp_path / "h.png").exists()


def test_schema_mismatch_names_column(tmp_path):
    write_csv(tmp_path / "bad.csv", ["a", "b"], [("1.0", "2.0")])
    rpath = make_recipe(tmp_path, "line", "bad.csv", "t", ["value"],
                        "bad.png")
    with pytest.raises(RecipeError, match="'t'"):
        render(FigureRecipe.from_json(rpath))


def test_empty_csv_is_explicit_error(tmp_path):
    (tmp_path / "empty.csv").write_text("")
    rpath = make_recipe(tmp_path, "line", "empty.csv", "t", ["v"], "e.png")
    with pytest.raises(RecipeError, match="empty"):
        render(FigureRecipe.from_json(rpath))


def test_cli_entry(tmp_path):
    xs = np.linspace(0, 1, 5)
    write_csv(tmp_path / "c.csv", ["t", "v"],
              [("%.12e" % a, "%.12e" % (2 * a)) for a in xs])
    rpath = make_recipe(tmp_path, "line", "c.csv", "t", ["v"], "c.png")
    proc = subprocess.run([sys.executable, "-m", "figures.render",
                           str(rpath)], capture_output=True, text=True)
    assert proc.returncode == 0
    assert (tmp_path / "c.png").exists()


def test_renders_real_pipeline_output(tmp_path):
    """End to end: run a primary-package config, render its CSV, and check
    the plotted values equal the file contents exactly."""
    pytest.importorskip("latticeqed")
    import json as _json
    cfg = {"task": "scatter", "mode": "angular", "name": "pipe",
           "angular": {"state": "SF", "n_atoms": 6, "n_sites": 6,
                       "k_sites": 6, "n_angles": 48}}
    cfg_path = tmp_path / "pipe.json"
    cfg_path.write_text(_json.dumps(cfg))
    from latticeqed.cli import main as lq_main
    assert lq_main(["--config", str(cfg_path), "--out", str(tmp_path)]) == 0
    rpath = make_recipe(tmp_path, "polar", "pipe.csv", "angle", ["R"],
                        "pipe.png")
    fig, ax, plotted = render(FigureRecipe.from_json(rpath))
    _, cols = read_csv(tmp_path / "pipe.csv")
    assert np.array_equal(plotted["R"][1],
                          np.array([float(v) for v in cols["R"]]))
    assert (tmp_path / "pipe.png").exists()
