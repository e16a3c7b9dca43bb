import json

import pytest

from tentsurgery.cli import main, read_config


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze(capsys):
    code, out, _ = run(capsys, "analyze", "--beta", "golden", "--json")
    d = json.loads(out)
    assert code == 0 and (d["t"], d["m"]) == (0, 3)
    code, out, _ = run(capsys, "analyze", "--beta", "full", "--json")
    assert (json.loads(out)["t"], json.loads(out)["m"]) == (2, 1)
    code, out, _ = run(capsys, "analyze", "--beta-poly", "1,0,-2", "--isolate", "1", "2", "--json")
    assert json.loads(out)["renorm_depth"] == 1


def test_analyze_not_finite(capsys):
    code, _, err = run(capsys, "analyze", "--beta-poly", "2,-3", "--isolate", "1", "2", "--max-iter", "50")
    assert code == 1 and "dense" in err


def test_count_rows(capsys):
    code, out, _ = run(capsys, "count", "--beta", "full", "--depth", "8")
    rows = out.strip().splitlines()
    assert code == 0 and rows[0].startswith("n,F_tree,F_recursion")
    assert rows[6].split(",")[:3] == ["5", "8", "8"]


def test_usage_errors(capsys):
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "eval", "--beta", "full")[0] == 2
    assert run(capsys, "eval", "--beta", "nope", "--x", "1")[0] == 2
    assert run(capsys, "eval", "--beta", "full", "--x", "1", "--eps", "-1")[0] == 2
    assert run(capsys, "analyze", "--beta-poly", "1,0,-2")[0] == 2


def test_build_eval_roundtrip(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("TENTSURGERY_OUT", str(tmp_path))
    assert run(capsys, "build", "--beta", "sqrt2", "--depth", "7", "--out", "d.json")[0] == 0
    desc = tmp_path / "d.json"
    assert desc.exists()
    _, a, _ = run(capsys, "eval", "--descriptor", str(desc), "--x", "1.7", "--json")
    _, b, _ = run(capsys, "eval", "--beta", "sqrt2", "--depth", "7", "--x", "1.7", "--json")
    assert json.loads(a) == json.loads(b)


def test_eval_width(capsys):
    code, out, _ = run(capsys, "eval", "--beta", "full", "--x", "0.5", "--eps", "1e-6", "--json")
    assert code == 0 and json.loads(out)["radius"] <= 1e-6


def test_verify_exit_codes(capsys, tmp_path):
    code, out, _ = run(capsys, "verify", "--beta", "full", "--suite", "lengths", "--out", str(tmp_path / "v.json"))
    assert code == 0 and "19/6" in out
    rows = json.loads((tmp_path / "v.json").read_text())
    assert all(r["status"] == "PASS" for r in rows)
    code, out, _ = run(capsys, "verify", "--beta", "golden", "--depth", "6", "--suite", "absorption")
    assert code == 1 and "FAIL" in out
    assert run(capsys, "verify", "--beta", "full", "--suite", "bogus")[0] == 2


@pytest.mark.parametrize("what", ["map", "tree", "lengths"])
def test_plot_deterministic(tmp_path, capsys, what):
    a, b = tmp_path / "a" / f"{what}.svg", tmp_path / "b" / f"{what}.svg"
    for p in (a, b):
        assert run(capsys, "plot", "--beta", "golden", "--depth", "6", "--what", what,
                   "--samples", "300", "--out", str(p))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.with_suffix(".csv").read_bytes() == b.with_suffix(".csv").read_bytes()
    assert a.read_text().startswith("<?xml") and "</svg>" in a.read_text()


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nbeta = full\ndepth = 6\njson = true\n")
    assert read_config(cfg)["beta"] == "full"
    code, out, _ = run(capsys, "analyze", "--config", str(cfg))
    assert code == 0 and json.loads(out)["m"] == 1
    cfg.write_text("colour = blue\n")
    assert run(capsys, "analyze", "--config", str(cfg))[0] == 2


def test_basin_plot_small(descriptors):
    from tentsurgery.plot import basin_figure

    svg, table = basin_figure(descriptors("full", 6), samples=12, max_iter=40)
    rows = table.strip().splitlines()
    assert rows[0] == "y0,classification,entered_at" and len(rows) == 13
    assert svg == basin_figure(descriptors("full", 6), samples=12, max_iter=40)[0]
