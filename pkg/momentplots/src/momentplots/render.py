"""The four figure recipes and the renderer that turns one into files.

A recipe fully determines its output: same input files and style, same
bytes.  Figures are built on explicit Figure objects (no pyplot, no global
state) and written through an in-memory buffer, so a failing render never
leaves a partial file behind.
"""
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib as mpl
import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.backends.backend_svg import FigureCanvasSVG
from matplotlib.figure import Figure

from .reader import TrajectoryTable, column_checksum, read_trajectory
from .style import BASE_RCPARAMS, StyleOptions

SPHERE3D = "sphere3d_trajectories"
BELTS = "angle_timeseries_with_belts"
CONTOUR = "contour_map_vs_a_t"
UNCERTAINTY = "uncertainty_panels"
KINDS = (SPHERE3D, BELTS, CONTOUR, UNCERTAINTY)

FORMATS = ("png", "svg")


@dataclass(frozen=True)
class FigureRecipe:
    """One figure: what kind, from which files, in which style, to where.

    `output` is the path without extension; one file per requested format
    is written next to it.
    """

    kind: str
    inputs: tuple[str, ...]
    output: str
    formats: tuple[str, ...] = FORMATS
    style: StyleOptions = field(default_factory=StyleOptions)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; expected one of {KINDS}")
        if not self.inputs:
            raise ValueError("a recipe needs at least one input file")
        bad = [f for f in self.formats if f not in FORMATS]
        if bad:
            raise ValueError(f"unsupported format {bad[0]!r}; expected a subset of {FORMATS}")


def render(recipe: FigureRecipe) -> list[str]:
    """Render one recipe; returns the written file paths."""
    tables = [read_trajectory(p) for p in recipe.inputs]
    with mpl.rc_context(BASE_RCPARAMS):
        fig = Figure()
        consumed = _BUILDERS[recipe.kind](fig, tables, recipe.style)
        digest = column_checksum(tables, consumed)
        return _save(fig, recipe, digest)


def _save(fig: Figure, recipe: FigureRecipe, digest: str) -> list[str]:
    written = []
    note = f"column sha256 {digest}"
    for fmt in recipe.formats:
        # render fully into memory first; the target file is only touched
        # once the whole image exists
        buf = io.BytesIO()
        if fmt == "png":
            FigureCanvasAgg(fig)
            fig.savefig(buf, format="png",
                        metadata={"Software": "momentplots", "Description": note})
        else:
            FigureCanvasSVG(fig)
            # Date: None drops the embedded timestamp so bytes are stable
            fig.savefig(buf, format="svg",
                        metadata={"Date": None, "Creator": "momentplots",
                                  "Description": note})
        path = Path(f"{recipe.output}.{fmt}")
        path.write_bytes(buf.getvalue())
        written.append(str(path))
    return written


# ---- sphere3d_trajectories -------------------------------------------------


def _wrap(phi: np.ndarray) -> np.ndarray:
    """Azimuth wrapped to [0, 2pi); display only, files stay unwrapped."""
    return np.remainder(phi, 2.0 * math.pi)


def _build_sphere3d(fig: Figure, tables: list[TrajectoryTable], style: StyleOptions):
    for table in tables:
        if table.mode != "sphere":
            raise ValueError(f"{table.path}: 3d paths need sphere trajectories")
    ax = fig.add_subplot(projection="3d")
    ax.set_proj_type("ortho")

    u = np.linspace(0.0, 2.0 * math.pi, 25)
    v = np.linspace(0.0, math.pi, 13)
    xs = np.outer(np.cos(u), np.sin(v))
    ys = np.outer(np.sin(u), np.sin(v))
    zs = np.outer(np.ones_like(u), np.cos(v))
    ax.plot_wireframe(xs, ys, zs, color=style.sphere_wire_color, linewidth=0.4)

    colors = (style.primary_color, style.comparison_color,
              "#2ca02c", "#9467bd", "#8c564b", "#e377c2")
    consumed = []
    for i, table in enumerate(tables):
        theta = table.column("theta")
        phi = _wrap(table.column("phi_unwrapped"))
        x = np.sin(theta) * np.cos(phi)
        y = np.sin(theta) * np.sin(phi)
        z = np.cos(theta)
        color = colors[i % len(colors)]
        ax.plot(x, y, z, color=color, label=style.label(i, f"run {i}"))
        ax.scatter([x[0]], [y[0]], [z[0]], color=color, s=14)
        consumed.append(("theta", "phi_unwrapped"))
    ax.set_box_aspect((1.0, 1.0, 1.0))
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_zlabel("z")
    ax.set_title(style.title or "trajectories on the unit sphere")
    if len(tables) > 1:
        ax.legend(loc="upper left")
    return consumed


# ---- angle_timeseries_with_belts --------------------------------------------


def _build_belts(fig: Figure, tables: list[TrajectoryTable], style: StyleOptions):
    """Angles vs time for the first input, one belt of one standard deviation
    around each angle; further inputs are drawn dashed for comparison,
    without belts (a zeroed twin has no spread to show)."""
    main = tables[0]
    if main.mode == "sphere":
        specs = [("theta", "g2000", "polar angle [rad]"),
                 ("phi_unwrapped", "g0020", "azimuth, unwrapped [rad]")]
    else:
        specs = [("theta", "g20", "angle, unwrapped [rad]")]
    axes = fig.subplots(len(specs), 1, sharex=True)
    axes = np.atleast_1d(axes)
    t = main.column("t")
    consumed = [("t",) + tuple(n for pair in specs for n in pair[:2])]
    for ax, (angle, variance, label) in zip(axes, specs):
        mean = main.column(angle)
        half = np.sqrt(main.column(variance))
        ax.fill_between(t, mean - half, mean + half,
                        color=style.belt_color, alpha=style.belt_alpha, linewidth=0.0)
        ax.plot(t, mean, color=style.primary_color, label=style.label(0, "with moments"))
        ax.set_ylabel(label)
    for i, other in enumerate(tables[1:], start=1):
        if other.mode != main.mode:
            raise ValueError(f"{other.path}: comparison run has a different schema")
        ot = other.column("t")
        for ax, (angle, _, _) in zip(axes, specs):
            ax.plot(ot, other.column(angle), color=style.comparison_color,
                    linestyle="--", label=style.label(i, "comparison"))
        consumed.append(("t",) + tuple(pair[0] for pair in specs))
    axes[-1].set_xlabel("t")
    axes[0].set_title(style.title or "angles with one-sigma uncertainty belts")
    axes[0].legend(loc="best")
    return consumed


# ---- contour_map_vs_a_t ------------------------------------------------------


def _build_contour(fig: Figure, tables: list[TrajectoryTable], style: StyleOptions):
    """Polar angle spread over the (initial polar momentum, time) plane.

    Each input is one grid row; its momentum value is read off the first
    p_theta sample (the sweep writes it there), never recomputed.  All rows
    must share the time grid or the map is ill-posed.
    """
    if len(tables) < 2:
        raise ValueError("a contour map needs at least two grid trajectories")
    rows = []
    t0 = tables[0].column("t")
    for table in tables:
        if table.mode != "sphere":
            raise ValueError(f"{table.path}: contour maps need sphere trajectories")
        t = table.column("t")
        if t.shape != t0.shape or not np.array_equal(t, t0):
            raise ValueError(f"{table.path}: time grid differs from {tables[0].path}")
        rows.append((float(table.column("p_theta")[0]), np.sqrt(table.column("g2000"))))
    values = [v for v, _ in rows]
    if len(set(values)) != len(values):
        raise ValueError("duplicate momentum values; one trajectory per grid value")
    rows.sort(key=lambda pair: pair[0])
    a = np.array([v for v, _ in rows])
    z = np.vstack([spread for _, spread in rows])

    ax = fig.add_subplot()
    filled = ax.contourf(t0, a, z, levels=style.contour_levels, cmap=style.colormap)
    fig.colorbar(filled, ax=ax, label="polar angle spread [rad]")
    ax.set_xlabel("t")
    ax.set_ylabel("initial polar momentum")
    ax.set_title(style.title or "wave packet spread across the momentum grid")
    return [("t", "p_theta", "g2000")] * len(tables)


# ---- uncertainty_panels ------------------------------------------------------


def _build_uncertainty(fig: Figure, tables: list[TrajectoryTable], style: StyleOptions):
    if len(tables) != 1:
        raise ValueError("uncertainty panels take exactly one trajectory")
    main = tables[0]
    floor = 0.25 * main.hbar() ** 2
    names = ("dg_theta", "dg_phi") if main.mode == "sphere" else ("dg_theta",)
    axes = np.atleast_1d(fig.subplots(len(names), 1, sharex=True))
    t = main.column("t")
    for ax, name in zip(axes, names):
        ax.plot(t, main.column(name), color=style.primary_color)
        ax.axhline(floor, color=style.floor_color, linestyle=":",
                   label="floor hbar^2/4")
        ax.set_ylabel(name)
    axes[-1].set_xlabel("t")
    axes[0].set_title(style.title or "canonical-pair uncertainty products")
    axes[0].legend(loc="best")
    return [("t",) + names]


_BUILDERS = {
    SPHERE3D: _build_sphere3d,
    BELTS: _build_belts,
    CONTOUR: _build_contour,
    UNCERTAINTY: _build_uncertainty,
}
