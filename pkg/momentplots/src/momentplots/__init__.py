"""Static figure generation from momentflow CSV output.

Everything is driven by FigureRecipe values; report_figures is the hook the
simulator's report command calls when asked for figures.
"""
from pathlib import Path

import numpy as np

from .reader import (
    CIRCLE_COLUMNS,
    SPHERE_COLUMNS,
    SchemaError,
    TrajectoryTable,
    column_checksum,
    read_trajectory,
)
from .render import BELTS, CONTOUR, FORMATS, KINDS, SPHERE3D, UNCERTAINTY, FigureRecipe, render
from .style import BASE_RCPARAMS, StyleOptions

__all__ = [
    "BASE_RCPARAMS", "BELTS", "CIRCLE_COLUMNS", "CONTOUR", "FORMATS",
    "FigureRecipe", "KINDS", "SPHERE3D", "SPHERE_COLUMNS", "SchemaError",
    "StyleOptions", "TrajectoryTable", "UNCERTAINTY", "column_checksum",
    "read_trajectory", "render", "report_figures",
]


def _common_grid(paths: list[str]) -> list[str]:
    """The largest subset of paths sharing one time grid.

    A contour is only well posed over a shared grid, and sweep members that
    stopped on an event carry a truncated one; those are left out of the
    map rather than failing the whole report.
    """
    groups: dict[bytes, list[str]] = {}
    for path in paths:
        t = read_trajectory(path).column("t")
        groups.setdefault(np.ascontiguousarray(t).tobytes(), []).append(path)
    return max(groups.values(), key=len) if groups else []


def report_figures(which: str, csv_paths: list[str], outdir: str) -> list[str]:
    """Render the figure set for one report; returns written file paths.

    table1 ships a trajectory pair (moments first, comparison second) and
    gets the path, belt, and uncertainty figures.  table2 ships one
    trajectory per momentum grid value and gets the spread contour.
    makarov_metrics ships a timing pair followed by its grid members and
    gets all of the above.
    """
    out = Path(outdir)
    recipes = []

    def add(kind: str, inputs: list[str], tag: str) -> None:
        recipes.append(FigureRecipe(kind=kind, inputs=tuple(inputs),
                                    output=str(out / f"{which}_{tag}")))

    if which == "table1":
        add(SPHERE3D, csv_paths, "path3d")
        add(BELTS, csv_paths, "angles")
        add(UNCERTAINTY, csv_paths[:1], "uncertainty")
    elif which == "table2":
        grid = _common_grid(csv_paths)
        if len(grid) >= 2:
            add(CONTOUR, grid, "spread_contour")
    elif which == "makarov_metrics":
        pair, grid = csv_paths[:2], _common_grid(csv_paths[2:])
        add(SPHERE3D, pair, "path3d")
        add(BELTS, pair, "angles")
        add(UNCERTAINTY, pair[:1], "uncertainty")
        if len(grid) >= 2:
            add(CONTOUR, grid, "spread_contour")
    else:
        raise ValueError(f"unknown report {which!r}")

    written = []
    for recipe in recipes:
        written.extend(render(recipe))
    return written
