import json
import shutil
from pathlib import Path

import numpy as np
import pytest

from starlike_tiling import cli
from starlike_tiling.config import TilingConfig

CONFIGS = Path(__file__).resolve().parent.parent / "demos" / "configs"


def run(argv, capsys):
    try:
        code = cli.main(argv)
    except SystemExit as exc:
        code = exc.code
    out = capsys.readouterr()
    return code, out.out, out.err


def small_config(tmp_path, name="lp2-2d.json", **sampling):
    data = json.loads((CONFIGS / name).read_text())
    data["net"]["trials"] = 2000
    data["sampling"].update({"count": 200, **sampling})
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return path


def test_constants(capsys):
    code, out, _ = run(["constants", "--variant", "A", "--a", "1.3", "--b", "0.9"], capsys)
    assert code == 0
    assert "K bound  177  (177)" in out
    code, out, _ = run(["constants", "--variant", "B", "--a", "9/5", "--b", "4/5"], capsys)
    assert code == 0 and "(235/2)" in out


def test_constants_infeasible(capsys):
    code, _, err = run(["constants", "--a", "2.5", "--b", "-1"], capsys)
    assert code == 2 and "1<a<2" in err and "a+b>2" in err
    code, _, err = run(["constants", "--a", "1.3", "--b", "0.9", "--r", "0.2", "--delta", "5/9"], capsys)
    assert code == 2


def test_help_lists_flags(capsys):
    code, out, _ = run(["verify", "--help"], capsys)
    assert code == 0
    for flag in ("--config", "--no-cache", "--samples", "--seed", "--out"):
        assert flag in out
    code, out, _ = run(["render", "--help"], capsys)
    for flag in ("--plane", "--bbox", "--pixels", "--out"):
        assert flag in out


def test_config_roundtrip():
    for path in sorted(CONFIGS.glob("*.json")):
        cfg = TilingConfig.load(path)
        again = TilingConfig.from_dict(json.loads(cfg.dumps()))
        assert again.dumps() == cfg.dumps()
        assert json.loads(cfg.dumps()) == json.loads(path.read_text())


def test_bad_config(tmp_path, capsys):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"version": 99}))
    assert run(["locate", "--config", str(p), "--point", "0,0"], capsys)[0] == 2
    p.write_text("{not json")
    assert run(["verify", "--config", str(p)], capsys)[0] == 2


def test_locate_matches_library(tmp_path, capsys):
    from starlike_tiling.config import build_tiling

    path = small_config(tmp_path)
    T = build_tiling(TilingConfig.load(path))
    for x in ([0.0, 0.0], [-3.7, 8.25], [9.9, -0.4]):
        code, out, _ = run(["locate", "--config", str(path), "--point", f"{x[0]},{x[1]}"], capsys)
        assert code == 0
        row = json.loads(out)
        tid = T.locate_full(np.array(x))
        assert row["tile"] == tid.to_dict()
        assert np.allclose(row["center"], T.full_center(tid))


def test_locate_dimension_mismatch(tmp_path, capsys):
    code, _, err = run(["locate", "--config", str(small_config(tmp_path)), "--point", "1,2,3"], capsys)
    assert code == 3 and "coordinates" in err


def test_verify_exit_codes(tmp_path, capsys):
    path = small_config(tmp_path)
    out = tmp_path / "rep.json"
    assert run(["verify", "--config", str(path), "--out", str(out)], capsys)[0] == 0
    assert json.loads(out.read_text())["passed"]
    assert out.with_suffix(".samples.jsonl").exists()
    assert run(["verify", "--config", str(path), "--out", str(tmp_path / "no" / "r.json")], capsys)[0] == 4


def test_verify_failure_exit(tmp_path, capsys):
    data = json.loads(small_config(tmp_path).read_text())
    data["template"]["r"] = "1/5"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    code, out, _ = run(["verify", "--config", str(bad), "--out", str(tmp_path / "b.json")], capsys)
    assert code == 1 and "FAIL  template.L.c" in out


def test_render(tmp_path, capsys):
    path = small_config(tmp_path)
    svg = tmp_path / "s.svg"
    code, _, _ = run(["render", "--config", str(path), "--bbox", "-4:4", "--pixels", "40",
                      "--out", str(svg)], capsys)
    assert code == 0
    text = svg.read_text()
    assert text.startswith("<svg") or text.startswith("<?xml")
    assert text.count("<rect") > 1
    assert run(["render", "--config", str(path), "--plane", "1:3"], capsys)[0] == 3


def test_net_summary(tmp_path, capsys):
    code, out, _ = run(["net", "--config", str(small_config(tmp_path))], capsys)
    assert code == 0
    levels = json.loads(out)["levels"]
    assert levels["0"]["sites_per_period"] == 1 and levels["1"]["m"] == 1  # Z_1 is a line
