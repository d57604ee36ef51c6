import xml.etree.ElementTree as ET
from fractions import Fraction

import numpy as np

from elephant_lab.export import fmt, jsonable
from elephant_lab.stats import pooled_chisquare
from elephant_lab.streams import stream
from elephant_lab.svg import Plot


def test_chisquare_accepts_correct_law_and_rejects_wrong_one():
    pmf = {0: Fraction(1, 2), 1: Fraction(3, 10), 2: Fraction(1, 5)}
    rng = stream(0, "test.chi")
    x = rng.choice(3, 20000, p=[0.5, 0.3, 0.2])
    assert pooled_chisquare(x, pmf).pvalue > 0.001
    y = rng.choice(3, 20000, p=[0.45, 0.35, 0.2])
    assert pooled_chisquare(y, pmf).pvalue < 1e-6


def test_chisquare_outside_support_and_rows():
    pmf = {(0, 1): Fraction(1, 2), (1, 0): Fraction(1, 2)}
    res = pooled_chisquare(np.array([[0, 1], [1, 1]]), pmf)
    assert res.outside_support == 1 and res.pvalue == 0


def test_chisquare_pools_rare_cells():
    pmf = {k: Fraction(1, 2**(k + 1)) for k in range(30)}
    pmf[29] *= 2
    x = stream(1, "test.chi").geometric(0.5, 5000) - 1
    x = np.minimum(x, 29)
    res = pooled_chisquare(x, pmf)
    assert res.dof < 15 and res.pvalue > 0.001


def test_fixed_formatting():
    assert fmt(0.1) == "0.10000000000000001"
    assert fmt(Fraction(3, 4)) == "3/4"
    assert jsonable(Fraction(3, 4)) == {"numerator": 3, "denominator": 4}
    assert jsonable(np.array([1.5, 2])) == [1.5, 2.0]


def test_svg_is_valid_and_deterministic():
    edges = np.linspace(-1, 1, 6)
    plot = Plot(title="t <x>", xlabel="x", ylabel="y").histogram(edges, [0.1, 0.4, 0.5, 0.3, 0.1], "h") \
        .line(np.linspace(-1, 1, 50), np.linspace(0, 0.5, 50), "f")
    text = plot.render()
    root = ET.fromstring(text)
    tags = {el.tag.split("}")[1] for el in root.iter()}
    assert {"polyline", "rect", "text", "line"} <= tags
    assert text == plot.render()


def test_empty_plot_renders():
    ET.fromstring(Plot().render())
