import re

import pytest

from conftest import make_predictor, seq
from hedge_kit.errors import ConfigError
from hedge_kit.hedge import explain
from hedge_kit.predictor import BuiltinModel
from hedge_kit.render import CELL_W, RenderSpec, color_for, render


@pytest.fixture
def expl(negation_predictor):
    return explain(negation_predictor, seq("a", "not", "bad", "movie"))


class TestRenderSpec:
    def test_rejects_unknown_format(self):
        with pytest.raises(ConfigError):
            RenderSpec(fmt="pdf")

    def test_rejects_unknown_palette(self):
        with pytest.raises(ConfigError):
            RenderSpec(palette="rainbow")


class TestColorMapping:
    def test_neutral_midpoint(self):
        assert color_for(0.0, 1.0, "red-green") == "#ffffff"

    def test_all_zero_scale_is_neutral(self):
        assert color_for(0.7, 0.0, "red-green") == "#ffffff"

    def test_odd_symmetric(self):
        def dist(c):
            r, g, b = (int(c[i:i + 2], 16) for i in (1, 3, 5))
            return abs(255 - r) + abs(255 - g) + abs(255 - b)

        for v in (0.2, 0.5, 1.0):
            assert dist(color_for(v, 1.0, "red-green")) == \
                   dist(color_for(-v, 1.0, "red-green"))

    def test_sign_convention(self):
        # positive leans green, negative leans red
        pos = color_for(1.0, 1.0, "red-green")
        neg = color_for(-1.0, 1.0, "red-green")
        assert int(pos[3:5], 16) > int(pos[1:3], 16)
        assert int(neg[1:3], 16) > int(neg[3:5], 16)


class TestRender:
    def test_single_cell_document(self, negation_predictor):
        e = explain(negation_predictor, seq("bad"))
        svg = render(e, RenderSpec(fmt="svg")).decode()
        assert svg.count("<rect") == 1

    def test_all_zero_scores_neutral(self):
        p = make_predictor(BuiltinModel())
        e = explain(p, seq("x", "y"))
        svg = render(e, RenderSpec(fmt="svg")).decode()
        fills = re.findall(r'fill="(#\w{6})"', svg)
        assert set(fills) == {"#ffffff"}

    def test_deterministic_bytes(self, expl):
        for fmt in ("html", "svg", "json"):
            spec = RenderSpec(fmt=fmt)
            assert render(expl, spec) == render(expl, spec)

    def test_every_column_covered_in_every_row(self, expl):
        svg = render(expl, RenderSpec(fmt="svg")).decode()
        n = expl.seq.n
        rows = {}
        for m in re.finditer(r'<rect x="(\d+)" y="(\d+)" width="(\d+)"', svg):
            x, y, w = map(int, m.groups())
            rows.setdefault(y, []).append((x, x + w))
        assert len(rows) == len(expl.hierarchy.partitions)
        for cells in rows.values():
            cells.sort()
            assert cells[0][0] == 0 and cells[-1][1] == n * CELL_W
            for (a, b), (c, d) in zip(cells, cells[1:]):
                assert b == c

    def test_html_wraps_svg(self, expl):
        html = render(expl, RenderSpec(fmt="html")).decode()
        assert html.startswith("<!DOCTYPE html>") and "<svg" in html

    def test_json_is_canonical_explanation(self, expl):
        import json

        from hedge_kit.hedge import to_json
        doc = render(expl, RenderSpec(fmt="json")).decode()
        assert doc == to_json(expl)
        assert json.loads(doc)["tokens"] == list(expl.seq.tokens)

    def test_colorblind_palette(self, expl):
        out = render(expl, RenderSpec(fmt="svg", palette="colorblind"))
        assert out != render(expl, RenderSpec(fmt="svg"))
