"""Export hierarchical explanations as static HTML/SVG heatmap grids or
canonical JSON.

One row per timestep, one column per token; each partition span draws as
a merged cell colored by its creation-time importance, normalized by the
global max-abs score (all-zero scores render neutral). The color map is
odd-symmetric around the neutral midpoint.
"""
from __future__ import annotations

from dataclasses import dataclass

from .core import format_score
from .errors import ConfigError
from .hedge import Explanation, to_json

CELL_W = 64
CELL_H = 28

# per-channel decrements away from the white midpoint (negative, positive);
# the two weight tuples are permutations of each other so +v and -v land
# exactly equidistant from the midpoint
PALETTES = {
    "red-green": ((0.0, 1.0, 1.0), (1.0, 0.0, 1.0)),
    "colorblind": ((0.0, 0.5, 1.0), (0.5, 1.0, 0.0)),
}
COLOR_DEPTH = 200


@dataclass(frozen=True)
class RenderSpec:
    fmt: str = "html"
    palette: str = "red-green"

    def __post_init__(self):
        if self.fmt not in ("html", "svg", "json"):
            raise ConfigError(f"unsupported render format {self.fmt!r}")
        if self.palette not in PALETTES:
            raise ConfigError(f"unknown palette {self.palette!r}")


def color_for(score: float, scale: float, palette: str) -> str:
    """Diverging color; scale <= 0 (all-zero scores) maps to neutral."""
    neg, pos = PALETTES[palette]
    v = 0.0 if scale <= 0 else max(-1.0, min(1.0, score / scale))
    weights = pos if v >= 0 else neg
    rgb = tuple(255 - round(w * COLOR_DEPTH * abs(v)) for w in weights)
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def render_svg(expl: Explanation, spec: RenderSpec) -> str:
    n = expl.seq.n
    rows = len(expl.hierarchy.partitions)
    scores = {c.span: c.score for c in expl.contributions}
    scale = max((abs(c.score) for c in expl.contributions), default=0.0)
    width = n * CELL_W
    height = (rows + 1) * CELL_H
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" font-family="monospace" font-size="12">'
    ]
    for t, part in enumerate(expl.hierarchy.partitions):
        y = t * CELL_H
        for span in part.spans:
            x = span.start * CELL_W
            w = span.length * CELL_W
            fill = color_for(scores[span], scale, spec.palette)
            out.append(
                f'<rect x="{x}" y="{y}" width="{w}" height="{CELL_H}" '
                f'fill="{fill}" stroke="#444" stroke-width="1">'
                f'<title>t={t} [{span.start},{span.end}) '
                f'score={format_score(scores[span])}</title></rect>'
            )
    y_text = rows * CELL_H + CELL_H - 9
    for i, tok in enumerate(expl.seq.tokens):
        cx = i * CELL_W + CELL_W // 2
        out.append(
            f'<text x="{cx}" y="{y_text}" text-anchor="middle">{_esc(tok)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out)


def _esc(s: str) -> str:
    return (s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;"))


def render(expl: Explanation, spec: RenderSpec) -> bytes:
    """Deterministic document bytes for the requested format."""
    if spec.fmt == "json":
        return to_json(expl).encode("utf-8")
    svg = render_svg(expl, spec)
    if spec.fmt == "svg":
        return svg.encode("utf-8")
    html = (
        "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n"
        "<title>hierarchical explanation</title>\n"
        "<style>body{margin:2em;background:#fafafa}</style>\n"
        "</head>\n<body>\n" + svg + "\n</body>\n</html>\n"
    )
    return html.encode("utf-8")
