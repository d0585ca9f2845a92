import json
import subprocess
import sys
from pathlib import Path

import pytest

import dot
from lenslab.cli import main
from lenslab.laws import FiniteLens


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def lens_file(tmp_path):
    def write(doc):
        path = tmp_path / "lens.json"
        path.write_text(json.dumps(doc))
        return str(path)
    return write


def test_laws(capsys):
    code, out, _ = run(capsys, "laws")
    assert code == 0
    assert "∀s,s′: put(s, get(s′)) = s′" in out
    assert sum(1 for line in out.splitlines() if not line.startswith(" ")) == 11
    wp = next(line for line in out.splitlines() if line.startswith("WP"))
    assert "GetPut" in wp and "PutGet" in wp


def test_laws_structured(capsys):
    code, out, _ = run(capsys, "laws", "--format", "structured")
    doc = json.loads(out)
    assert doc["schema"] == "lenslab/laws/1"
    assert len(doc["laws"]) == 11


def test_check_identity(capsys, lens_file):
    path = lens_file({"s_size": 2, "v_size": 2, "get": [0, 1], "put": [[0, 1], [0, 1]]})
    code, out, _ = run(capsys, "check", path)
    assert code == 0
    assert "profile: {SG, GP, PG, PP, WP, UD, PT, SS, PS, VD, PI}" in out


def test_check_put_only_failure(capsys, lens_file):
    path = lens_file({"s_size": 1, "v_size": 2, "put": [[0, 0]]})
    code, out, _ = run(capsys, "check", path, "--laws", "PI")
    assert code == 1
    assert "PI: FAILS" in out and "v'=1" in out


def test_check_get_law_on_put_only_lens(capsys, lens_file):
    path = lens_file({"s_size": 1, "v_size": 2, "put": [[0, 0]]})
    code, _, err = run(capsys, "check", path, "--laws", "sg")
    assert code == 2 and "put-only" in err


def test_check_malformed(capsys, lens_file):
    path = lens_file({"s_size": 2, "v_size": 1, "get": [0, 0], "put": [[0], [2]]})
    code, _, err = run(capsys, "check", path)
    assert code == 2
    assert "put[1][0]" in err


def test_check_unreadable(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "check", str(bad))[0] == 2
    assert run(capsys, "check", str(tmp_path / "missing.json"))[0] == 2


def test_closure(capsys):
    code, out, _ = run(capsys, "closure", "SG", "PG")
    assert code == 0
    assert "= {SG, GP, PG, PP, WP, UD, PT, SS, PS, VD, PI}" in out


def test_closure_unknown_law(capsys):
    assert run(capsys, "closure", "SG", "XX")[0] == 2


def test_implies_derivable(capsys):
    code, out, _ = run(capsys, "implies", "WP", "SS", "VD", "->", "PG")
    assert code == 0 and "derivable" in out


def test_implies_refuted_prints_reparsable_lens(capsys):
    code, out, _ = run(capsys, "implies", "GP", "->", "SG", "--format", "structured")
    assert code == 1
    doc = json.loads(out)
    assert doc["status"] == "refuted"
    lens = FiniteLens.from_dict(doc["counterexample"]["lens"])
    assert lens == FiniteLens(2, 1, [0, 0], [[0], [1]])


def test_implies_text_lens_line_reparses(capsys):
    code, out, _ = run(capsys, "implies", "gp", "sg")
    line = next(l for l in out.splitlines() if l.strip().startswith("lens:"))
    FiniteLens.from_dict(json.loads(line.split("lens:", 1)[1]))


def test_implies_open(capsys):
    code, out, _ = run(capsys, "implies", "GP", "PG", "UD", "->", "PP")
    assert code == 3 and "open" in out


def test_implies_sampling_requires_seed(capsys):
    assert run(capsys, "implies", "GP", "PG", "UD", "->", "PP", "--samples", "10")[0] == 2


def test_implies_sampling_with_seed(capsys):
    code, out, _ = run(capsys, "implies", "GP", "PG", "UD", "->", "PP", "--samples", "1000",
                       "--seed", "5", "--sample-s", "4", "--format", "structured")
    assert code == 3
    assert json.loads(out)["sampled"] == {"s_size": 4, "v_size": 3, "samples": 1000, "seed": 5}


def test_implies_bad_usage(capsys):
    assert run(capsys, "implies", "GP", "->", "GP")[0] == 2
    assert run(capsys, "implies", "->", "GP")[0] == 2


def test_sweep(capsys):
    code, out, _ = run(capsys, "sweep", "--max-s", "3", "--max-v", "3")
    assert code == 0
    assert "total: 537950 lenses, 0 violations" in out


def test_sweep_budget_is_usage_error(capsys):
    assert run(capsys, "sweep", "--budget", "10")[0] == 2


def test_env_defaults_and_flag_precedence(capsys, monkeypatch):
    monkeypatch.setenv("LENSLAB_MAX_S", "2")
    monkeypatch.setenv("LENSLAB_MAX_V", "2")
    code, out, _ = run(capsys, "sweep")
    assert "total: 71 lenses" in out
    code, out, _ = run(capsys, "sweep", "--max-v", "1")
    assert "total: 5 lenses" in out


def test_bad_env_is_usage_error(capsys, monkeypatch):
    monkeypatch.setenv("LENSLAB_BUDGET", "lots")
    assert run(capsys, "sweep")[0] == 2


def test_census(capsys):
    code, out, _ = run(capsys, "census", "2", "2", "--format", "structured")
    doc = json.loads(out)
    assert code == 0 and doc["total"] == 64
    assert sum(r["count"] for r in doc["profiles"]) == 64


def test_survey_structured(capsys):
    code, out, _ = run(capsys, "survey", "1", "--max-s", "2", "--max-v", "2", "--format", "structured")
    doc = json.loads(out)
    assert code == 0
    assert len(doc["candidates"]) == 110
    assert sum(doc["summary"].values()) == 110


def test_dot_golden(capsys, tmp_path):
    golden = Path(__file__).parent / "golden" / "implication.dot"
    code, out, _ = run(capsys, "dot")
    assert code == 0
    assert out == golden.read_text(encoding="utf-8")
    target = tmp_path / "g.dot"
    assert run(capsys, "dot", "--out", str(target))[0] == 0
    assert target.read_text(encoding="utf-8") == out
    assert len(dot.parse(out)[0]) == 19


def test_gallery_entry(capsys):
    code, out, _ = run(capsys, "gallery", "gp_diff", "--window", "4")
    assert code == 0
    assert "SG: refuted" in out and "s'=1" in out


def test_gallery_all(capsys):
    code, out, _ = run(capsys, "gallery", "--format", "structured")
    doc = json.loads(out)
    assert code == 0 and len(doc["reports"]) == 12


def test_gallery_unknown(capsys):
    assert run(capsys, "gallery", "nope")[0] == 2


def test_gallery_window_too_small(capsys):
    assert run(capsys, "gallery", "pi_pow", "--window", "1")[0] == 2


def test_usage_error_exit_code(capsys):
    assert run(capsys)[0] == 2
    assert run(capsys, "bogus")[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "lenslab", "closure", "PP"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "{PP, PT}" in proc.stdout
