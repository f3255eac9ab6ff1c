"""Shared plot styling: fixed fonts and DPI keep renders deterministic."""

import matplotlib

matplotlib.use("Agg")

STYLE = {
    "figure.dpi": 150,
    "savefig.dpi": 150,
    "font.family": "DejaVu Sans",
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.4,
    "figure.figsize": (6.0, 4.0),
}


def apply():
    import matplotlib.pyplot as plt
    plt.rcParams.update(STYLE)
    return plt
