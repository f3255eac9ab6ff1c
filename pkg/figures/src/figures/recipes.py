"""Figure recipes: validated CSV input -> one deterministic image.

A recipe is a JSON object:
    {"kind": "polar" | "line" | "comb" | "heatmap",
     "input": "run.csv", "output": "run.png",
     "x": "angle", "y": ["R"], ...}

Each kind validates the CSV header against the documented schema before
touching the data; a mismatch error names the offending column.
"""

import csv
import json
import os
from dataclasses import dataclass, field

import numpy as np

from .style import apply

KNOWN_KINDS = ("polar", "line", "comb", "heatmap")


class RecipeError(ValueError):
    pass


@dataclass
class FigureRecipe:
    kind: str
    input_path: str
    output_path: str
    x: str = None
    y: list = field(default_factory=list)
    label_column: str = None
    title: str = ""
    x_label: str = ""
    y_label: str = ""

    @classmethod
    def from_json(cls, path):
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        known = {"kind", "input", "output", "x", "y", "label_column",
                 "title", "x_label", "y_label"}
        for key in raw:
            if key not in known:
                raise RecipeError(f"unknown recipe key {key!r}")
        kind = raw.get("kind")
        if kind not in KNOWN_KINDS:
            raise RecipeError(f"unknown plot kind {kind!r}")
        base = os.path.dirname(os.path.abspath(path))

        def resolve(p):
            return p if os.path.isabs(p) else os.path.join(base, p)

        return cls(kind=kind, input_path=resolve(raw["input"]),
                   output_path=resolve(raw["output"]), x=raw.get("x"),
                   y=list(raw.get("y", [])),
                   label_column=raw.get("label_column"),
                   title=raw.get("title", ""),
                   x_label=raw.get("x_label", ""),
                   y_label=raw.get("y_label", ""))


def read_csv(path):
    """Header plus float columns; empty files are an explicit error."""
    if not os.path.exists(path):
        raise RecipeError(f"input file {path!r} does not exist")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        rows = list(reader)
    if not rows or len(rows) < 2:
        raise RecipeError(f"input file {path!r} is empty")
    header = rows[0]
    columns = {h: [] for h in header}
    for row in rows[1:]:
        for h, cell in zip(header, row):
            columns[h].append(cell)
    return header, columns


def require_columns(header, wanted, path):
    for col in wanted:
        if col not in header:
            raise RecipeError(
                f"column {col!r} missing from {os.path.basename(path)} "
                f"(have {header})")


def _floats(values):
    return np.array([float(v) for v in values])


def render(recipe):
    """Render one recipe; returns (figure, axes, plotted data dict)."""
    plt = apply()
    header, columns = read_csv(recipe.input_path)
    wanted = ([recipe.x] if recipe.x else []) + list(recipe.y)
    require_columns(header, wanted, recipe.input_path)
    plotted = {}

    if recipe.kind in ("line", "comb"):
        fig, ax = plt.subplots()
        x = _floats(columns[recipe.x])
        for name in recipe.y:
            y = _floats(columns[name])
            if recipe.kind == "comb":
                ax.plot(x, y, label=name, drawstyle="steps-mid")
            else:
                ax.plot(x, y, label=name)
            plotted[name] = (x, y)
        ax.legend()
    elif recipe.kind == "polar":
        fig = plt.figure()
        ax = fig.add_subplot(projection="polar")
        theta = _floats(columns[recipe.x])
        for name in recipe.y:
            y = _floats(columns[name])
            ax.plot(theta, y, label=name)
            plotted[name] = (theta, y)
        ax.legend(loc="upper right")
    elif recipe.kind == "heatmap":
        if len(recipe.y) != 1:
            raise RecipeError("heatmap needs exactly one value column")
        fig, ax = plt.subplots()
        x = _floats(columns[recipe.x])
        name = recipe.y[0]
        try:
            z = _floats(columns[name])
        except ValueError:
            # categorical values (phase labels) become integer codes
            cats = sorted(set(columns[name]))
            codes = {c: i for i, c in enumerate(cats)}
            z = np.array([codes[c] for c in columns[name]], dtype=float)
        y_col = recipe.label_column or _second_axis(header, recipe)
        yv = _floats(columns[y_col])
        xs = np.unique(x)
        ys = np.unique(yv)
        grid = np.full((len(ys), len(xs)), np.nan)
        for xi, yi, zi in zip(x, yv, z):
            grid[np.searchsorted(ys, yi), np.searchsorted(xs, xi)] = zi
        mesh = ax.pcolormesh(xs, ys, grid, shading="nearest")
        fig.colorbar(mesh, ax=ax, label=name)
        plotted[name] = (x, yv, z)
    else:
        raise RecipeError(f"unknown plot kind {recipe.kind!r}")

    ax.set_title(recipe.title)
    ax.set_xlabel(recipe.x_label or (recipe.x or ""))
    if recipe.y_label:
        ax.set_ylabel(recipe.y_label)
    fig.tight_layout()
    fig.savefig(recipe.output_path, metadata={})
    return fig, ax, plotted


def _second_axis(header, recipe):
    for col in header:
        if col != recipe.x and col not in recipe.y:
            return col
    raise RecipeError("heatmap needs a second coordinate column")
