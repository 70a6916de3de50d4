"""Deterministic matplotlib styling.

Every knob that could leak run-to-run variation into the output bytes is
pinned here: figure geometry, fonts, the SVG id salt.  Renders happen inside
rc_context(BASE_RCPARAMS) so no global state survives a call.
"""
from dataclasses import dataclass, field

#: rcParams applied around every render; svg.hashsalt makes SVG element ids
#: a pure function of the figure content instead of a per-process random id
BASE_RCPARAMS = {
    "figure.figsize": (6.4, 4.8),
    "figure.dpi": 100,
    "savefig.dpi": 150,
    "font.family": "DejaVu Sans",
    "font.size": 10.0,
    "axes.titlesize": 11.0,
    "axes.labelsize": 10.0,
    "legend.fontsize": 9.0,
    "lines.linewidth": 1.4,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "svg.fonttype": "none",
    "svg.hashsalt": "momentplots",
    "path.simplify": False,
}


@dataclass(frozen=True)
class StyleOptions:
    """Colors and labels a recipe may override; defaults cover every kind."""

    primary_color: str = "#1f77b4"
    comparison_color: str = "#d62728"
    belt_color: str = "#1f77b4"
    belt_alpha: float = 0.25
    floor_color: str = "#555555"
    sphere_wire_color: str = "#bbbbbb"
    colormap: str = "viridis"
    contour_levels: int = 21
    labels: tuple[str, ...] = field(default_factory=tuple)
    title: str = ""

    def label(self, i: int, default: str) -> str:
        return self.labels[i] if i < len(self.labels) else default
