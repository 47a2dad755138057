import json
import math
import re

import pytest

from korenblum.config import RunConfig, load_config, parse_config_text
from korenblum.errors import DomainError
from korenblum.report import VerificationReport
from korenblum import svg


def test_config_defaults_and_overrides():
    cfg = RunConfig()
    assert cfg.M.describe() == "logpower:1.0,1.0"
    new = cfg.updated(depth=7, s=None)
    assert new.depth == 7 and new.s == cfg.s
    assert "out" not in cfg.echo()
    assert cfg.to_dict()["out"] == "out"


def test_config_text_with_and_without_sections():
    cfg = parse_config_text("s = 2\nminorant = logpower:1,2\ndepth = 6\n")
    assert (cfg.s, cfg.depth, cfg.minorant) == (2.0, 6, "logpower:1,2")
    cfg = parse_config_text("[run]\nsample-density = 5\n\n[paths]\nout = /tmp/x\n")
    assert cfg.sample_density == 5 and cfg.out == "/tmp/x"


@pytest.mark.parametrize("text", ["bogus = 1\n", "depth = many\n", "s = -1\n", "minorant = what\n",
                                  "[run\ns=1\n", "star_t = 2\n"])
def test_config_errors(text):
    with pytest.raises(DomainError):
        parse_config_text(text)


def test_load_config(tmp_path):
    p = tmp_path / "run.ini"
    p.write_text("depth = 4\n", encoding="utf-8")
    assert load_config(p).depth == 4
    assert load_config(None) == RunConfig()
    with pytest.raises(DomainError):
        load_config(tmp_path / "missing.ini")


def test_report_roundtrip():
    rep = VerificationReport()
    rep.check("a", True, "ok", 1.5)
    rep.check("b", False, "bad", math.inf)
    for i, v in enumerate([2.0, 3.0, 4.0]):
        rep.ratio("r").add(i, v)
    assert not rep.passed
    assert [c.name for c in rep.failures()] == ["b"]
    assert rep.ratios["r"].bracket == (2.0, 4.0)
    assert rep.ratios["r"].width == 2.0
    data = json.loads(rep.to_json())
    assert data["schema_version"] == 1
    assert rep.to_json().endswith("}\n")
    assert rep.to_json() == rep.to_json()


def test_svg_counts_blocks_and_marks():
    blocks = [(0.1 * i, 0.1 * i + 0.05, 0.01, 0.02) for i in range(5)]
    doc = svg.render(blocks, marks=[0.0, 1.0], stars=[[0.0, 1.0]], title="t")
    assert doc.startswith('<?xml version="1.0"')
    assert len(re.findall(r'<path class="block"', doc)) == 5
    assert len(re.findall(r'class="mark"', doc)) == 2
    assert 'class="star"' in doc
    big = svg.render([], marks=[0.0] * (svg.MAX_MARKS + 1))
    assert "marks omitted" in big


def test_star_outline_touches_marks():
    pts = svg.star_outline([0.0], 0.1, samples=8)
    assert pts[0] == (0.0, 1.0)
    assert all(0.0 <= r <= 1.0 for _, r in pts)
