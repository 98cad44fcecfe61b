import json

import pytest
from click.testing import CliRunner

from afm_forge.cli import main
from tests.conftest import WIKI_CSV, WIKI_DK


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def workdir(tmp_path):
    (tmp_path / "wiki.csv").write_text(WIKI_CSV)
    (tmp_path / "wiki.dk.json").write_text(json.dumps(WIKI_DK))
    return tmp_path


def test_synth_writes_model(runner, workdir):
    out = workdir / "wiki.afm.json"
    text = workdir / "wiki.txt"
    r = runner.invoke(main, ["synth", str(workdir / "wiki.csv"),
                             "--dk", str(workdir / "wiki.dk.json"),
                             "-o", str(out), "--text-out", str(text)])
    assert r.exit_code == 0, r.output
    doc = json.loads(out.read_text())
    assert doc["hierarchy"]["root"] == "Wiki engine"
    assert "GPL => LicensePrice <= 10" in doc["constraints"]
    assert "Wiki engine" in text.read_text()


def test_synth_without_dk_uses_heuristics(runner, workdir):
    out = workdir / "h.afm.json"
    # the Identifier column stays, so every row is unique under it; classify
    # heuristics treat it as enumerated features, which still synthesizes
    r = runner.invoke(main, ["synth", str(workdir / "wiki.csv"),
                             "--no-interactive", "-o", str(out)])
    assert r.exit_code == 0, r.output


def test_synth_no_phi(runner, workdir):
    out = workdir / "d.afm.json"
    r = runner.invoke(main, ["synth", str(workdir / "wiki.csv"),
                             "--dk", str(workdir / "wiki.dk.json"),
                             "--no-phi", "-o", str(out)])
    assert r.exit_code == 0
    doc = json.loads(out.read_text())
    assert doc["mode"] == "diagram-only" and doc["phi"] is None


def test_synth_missing_file_is_input_error(runner, workdir):
    r = runner.invoke(main, ["synth", str(workdir / "nope.csv")])
    assert r.exit_code != 0


def test_synth_bad_matrix_exit_4(runner, tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("A,B\n1,2\n1,2\n")
    r = runner.invoke(main, ["synth", str(p)])
    assert r.exit_code == 4
    assert "DuplicateRow" in r.output


def test_check_accepts_good_model(runner, workdir):
    out = workdir / "wiki.afm.json"
    runner.invoke(main, ["synth", str(workdir / "wiki.csv"),
                         "--dk", str(workdir / "wiki.dk.json"), "-o", str(out)])
    r = runner.invoke(main, ["check", str(out), str(workdir / "wiki.csv")])
    assert r.exit_code == 0, r.output
    assert "sound=true complete=true" in r.output
    assert "maximal: ok" in r.output


def test_check_flags_diagram_only(runner, workdir):
    out = workdir / "d.afm.json"
    runner.invoke(main, ["synth", str(workdir / "wiki.csv"),
                         "--dk", str(workdir / "wiki.dk.json"),
                         "--no-phi", "-o", str(out)])
    r = runner.invoke(main, ["check", str(out), str(workdir / "wiki.csv")])
    assert r.exit_code == 2
    assert "sound=false" in r.output
    assert "extra:" in r.output


def test_check_flags_tampered_mandatory(runner, workdir):
    out = workdir / "wiki.afm.json"
    runner.invoke(main, ["synth", str(workdir / "wiki.csv"),
                         "--dk", str(workdir / "wiki.dk.json"), "-o", str(out)])
    doc = json.loads(out.read_text())
    doc["mandatory"] = []
    out.write_text(json.dumps(doc))
    r = runner.invoke(main, ["check", str(out), str(workdir / "wiki.csv")])
    assert r.exit_code == 2
    assert "VIOLATIONS" in r.output


def test_check_budget_exit_3(runner, workdir):
    out = workdir / "wiki.afm.json"
    runner.invoke(main, ["synth", str(workdir / "wiki.csv"),
                         "--dk", str(workdir / "wiki.dk.json"), "-o", str(out)])
    r = runner.invoke(main, ["check", str(out), str(workdir / "wiki.csv"),
                             "--budget", "3"])
    assert r.exit_code == 3


def test_gen_deterministic(runner, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    r1 = runner.invoke(main, ["gen", "-v", "5", "-c", "8", "-d", "3",
                              "--seed", "42", "-o", str(a)])
    r2 = runner.invoke(main, ["gen", "-v", "5", "-c", "8", "-d", "3",
                              "--seed", "42", "-o", str(b)])
    assert r1.exit_code == 0 and r2.exit_code == 0
    assert a.read_text() == b.read_text()
    header = a.read_text().splitlines()[0]
    assert header.count(",") == 4


def test_bench_writes_reports(runner, tmp_path):
    out = tmp_path / "bench.csv"
    plot = tmp_path / "plot.tsv"
    r = runner.invoke(main, ["bench", "--sweep", "c=8,16", "--v", "4", "--d", "3",
                             "--reps", "1", "-o", str(out), "--plot-data", str(plot)])
    assert r.exit_code == 0, r.output
    assert out.read_text().startswith("v,c,d,seed,rep,backend")
    assert "time-vs-c" in r.output
    assert plot.read_text().startswith("series\tx\ty")


def test_bench_or_groups_timeout_column(runner, tmp_path):
    out = tmp_path / "bench.csv"
    r = runner.invoke(main, ["bench", "--sweep", "v=3,4", "--c", "8", "--d", "3",
                             "--reps", "1", "--or-groups", "--timeout", "10s",
                             "-o", str(out)])
    assert r.exit_code == 0, r.output
    assert "timeout rate" in r.output
    assert "timed_out" in out.read_text().splitlines()[0]


def test_bench_backend_both(runner, tmp_path):
    out = tmp_path / "bench.csv"
    r = runner.invoke(main, ["bench", "--sweep", "c=8,16", "--v", "4", "--d", "3",
                             "--reps", "1", "--backend", "both", "-o", str(out)])
    assert r.exit_code == 0, r.output
    body = out.read_text()
    assert ",numba," in body and ",numpy," in body


def test_bench_bad_sweep_exit_4(runner, tmp_path):
    r = runner.invoke(main, ["bench", "--sweep", "x=1:2", "--v", "4", "--d", "3",
                             "-o", str(tmp_path / "x.csv")])
    assert r.exit_code == 4


def test_bi_dump(runner, workdir):
    r = runner.invoke(main, ["bi", str(workdir / "wiki.csv"),
                             "--dk", str(workdir / "wiki.dk.json")])
    assert r.exit_code == 0
    lines = r.output.strip().splitlines()
    assert lines == sorted(lines)


def test_determinism_two_runs(runner, workdir):
    outs = []
    for name in ("one.json", "two.json"):
        out = workdir / name
        r = runner.invoke(main, ["synth", str(workdir / "wiki.csv"),
                                 "--dk", str(workdir / "wiki.dk.json"), "-o", str(out)])
        assert r.exit_code == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_interactive_synth(runner, workdir):
    # drop placements from the knowledge file; answer the two place
    # questions and the bounds question on the terminal
    dk = dict(WIKI_DK)
    dk.pop("placements")
    dk.pop("interesting_values")
    p = workdir / "partial.dk.json"
    p.write_text(json.dumps(dk))
    out = workdir / "i.afm.json"
    r = runner.invoke(main, ["synth", str(workdir / "wiki.csv"), "--dk", str(p),
                             "--interactive", "-o", str(out)],
                      input="0\n0\n10\n")
    assert r.exit_code == 0, r.output
    doc = json.loads(out.read_text())
    assert doc["provenance"]["decisions"]


def test_check_flags_phi_with_removed_row(runner, workdir):
    out = workdir / "wiki.afm.json"
    runner.invoke(main, ["synth", str(workdir / "wiki.csv"),
                         "--dk", str(workdir / "wiki.dk.json"), "-o", str(out)])
    doc = json.loads(out.read_text())
    doc["phi"]["rows"] = doc["phi"]["rows"][:-1]
    out.write_text(json.dumps(doc))
    r = runner.invoke(main, ["check", str(out), str(workdir / "wiki.csv")])
    assert r.exit_code == 2
    assert "complete=false" in r.output
    assert "missing:" in r.output
