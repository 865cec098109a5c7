import io
import json
from pathlib import Path

import pytest

from portaut.cli import main

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
FIG1, FIG2, FIG3, FIG4 = (str(FIXTURES / f"fig{i}.pa") for i in range(1, 5))


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_parse_fig1():
    code, text = run("parse", FIG1)
    assert code == 0
    assert "fig1a: connector, 5 primitives, 6 nodes" in text


def test_parse_errors(tmp_path, capsys):
    empty = tmp_path / "empty.pa"
    empty.write_text("")
    assert run("parse", str(empty))[0] == 1
    assert "1:1: empty input" in capsys.readouterr().err
    bad = tmp_path / "bad.pa"
    bad.write_text("connector c {\n  nodes A;\n  primitive s : Sync(A, Z);\n}\n")
    assert run("parse", str(bad))[0] == 1
    assert "port Z is not a node" in capsys.readouterr().err
    assert run("parse", str(tmp_path / "missing.pa"))[0] == 1


def test_parse_emit_round_trips(tmp_path):
    code, text = run("parse", FIG4, "--emit")
    assert code == 0
    again = tmp_path / "again.pa"
    again.write_text(text)
    assert run("parse", str(again), "--emit")[1] == text


def test_sem_fig1a_dot():
    code, dot = run("sem", FIG1, "fig1a", "--prune", "--format", "dot", "--hide-hidden")
    assert code == 0
    assert dot.count("[shape=circle]") == 3
    for label in ("{A}", "{B}", "{C}", "{D}", "∅"):
        assert f'[label="{label}"]' in dot
    assert run("sem", FIG1, "fig1a", "--prune", "--format", "dot", "--hide-hidden")[1] == dot


def test_sem_hide_hidden_json():
    code, text = run("sem", FIG1, "fig1a", "--prune", "--hide-hidden", "--format", "json")
    assert code == 0
    data = json.loads(text)
    assert sorted(data["ports"]) == ["A", "B", "C", "D"]
    assert len(data["states"]) == 3


def test_pullback_summary_reachable():
    assert run("pullback", FIG3, "rule_leg", "host_leg", "--format", "summary")[1].startswith("pullback: 8 states")
    code, text = run("pullback", FIG3, "rule_leg", "host_leg", "--reachable", "--format", "summary")
    assert code == 0 and text.startswith("pullback: 3 states, 7 transitions")


def test_sem_single_sync(tmp_path):
    path = tmp_path / "sync.pa"
    path.write_text("connector c { nodes A B; primitive s : Sync(A, B); }")
    code, text = run("sem", str(path), "c")
    data = json.loads(text)
    assert code == 0 and len(data["states"]) == 1
    assert data["transitions"] == [
        {"from": "(q0)", "label": [], "to": "(q0)"},
        {"from": "(q0)", "label": ["A", "B"], "to": "(q0)"},
    ]


def test_size_guard_exit_code(monkeypatch, capsys):
    monkeypatch.setenv("PORTAUT_STATE_CAP", "4")
    assert run("sem", FIG1, "fig1a")[0] == 3
    assert "estimate 8" in capsys.readouterr().err


def test_usage_errors():
    assert run()[0] == 2
    assert run("sem", FIG1)[0] == 2
    assert run("check")[0] == 2


def test_iso_and_pullback():
    assert run("iso", FIG1, "fig1a", "fig1c", "--sem", "--hide-hidden")[0] == 0
    assert run("iso", FIG1, "fig1a", "fig1c", "--sem")[0] == 1
    code, text = run("pullback", FIG3, "rule_leg", "host_leg", "--reachable")
    assert code == 0 and len(json.loads(text)["states"]) == 3
    assert run("product", FIG2, "source", "target", "--format", "summary")[0] == 0


def test_pushout_and_check():
    code, text = run("pushout", FIG4, "rule", "match", "--format", "json")
    assert code == 0
    assert len(json.loads(text)["primitives"]) == 5
    assert run("check", FIG4, "rule", "match") == (0, "compositionality: pass\n")


def test_check_corrupted_span(tmp_path):
    src = Path(FIG4).read_text() + """
morphism broken : ring -> with_ab {
  prim router -> router;  prim buffer -> buffer;  prim merger -> merger;
  node A -> A;  node B -> B;  node C -> C;  node D -> D;  node _h1 -> _h1;  node _h2 -> _h2;
  witness buffer { state q0 -> q1; state q1 -> q0; port _h1 -> _h1; port _h2 -> _h2; }
}
"""
    path = tmp_path / "broken.pa"
    path.write_text(src)
    # ordinary commands refuse the file outright
    assert run("parse", str(path))[0] == 1
    out = tmp_path / "cex"
    code, text = run("check", str(path), "broken", "match", "--out", str(out))
    assert code == 1
    assert "left: witness for buffer" in text
    assert "witness for buffer" in (out / "span-0.txt").read_text()
    assert json.loads((out / "span-0-left.json").read_text())["witnesses"]["buffer"]["state_map"] == {
        "q0": "q1", "q1": "q0"
    }


def test_check_reports_counterexample(tmp_path):
    path = tmp_path / "dangling.pa"
    path.write_text("""
connector c0 { nodes A; }
connector c1 { nodes A B; primitive s : Sync(A, B); }
morphism f : c0 -> c1 { node A -> A; }
morphism g : c0 -> c0 { node A -> A; }
""")
    out = tmp_path / "cex"
    code, text = run("check", str(path), "f", "g", "--out", str(out))
    assert code == 1 and "FAIL" in text
    assert sorted(p.name for p in out.iterdir()) == ["span-0-left.json", "span-0-right.json", "span-0.txt"]


def test_random_check_deterministic():
    first = run("check", "--random", "10", "--seed", "42")
    assert first[0] == 0
    assert first == run("check", "--random", "10", "--seed", "42")
    assert "compositionality: pass (10 cases" in first[1]


def test_petri_commands():
    code, text = run("encode-petri", FIG1, "fig1b")
    assert code == 0 and set(json.loads(text)["primitives"]) == {"c1", "s", "w1"}
    code, text = run("marking-graph", FIG1, "fig1b")
    assert code == 0 and len(json.loads(text)["states"]) == 3


def test_reconfigure():
    code, text = run("reconfigure", FIG4, "rule", "match", "--after", "C")
    assert code == 0 and text.startswith("verdict: VALID")
    report = json.loads(text[text.index("{"):])
    assert report["verdict"] == "VALID"
    assert sum(p["reachable"] for p in report["preimages"]) == 1
    code, text = run("reconfigure", FIG4, "rule", "match", "--after", "C,B")
    assert code == 1 and text.startswith("verdict: INVALID-STATE")
    code, text = run("reconfigure", FIG4, "keep", "match", "--after", "C,D,A")
    assert code == 0 and "VALID" in text


def test_reconfigure_explicit_state(capsys):
    assert run("reconfigure", FIG4, "rule", "match", "--state", "(q1,q1,q0,q0)")[0] == 0
    assert run("reconfigure", FIG4, "rule", "match", "--state", "(x)")[0] == 1
    assert "not a reachable state" in capsys.readouterr().err


@pytest.mark.parametrize("fmt", ["json", "dot", "text"])
def test_export(fmt):
    code, text = run("export", FIG1, "fig1c", "--format", fmt)
    assert code == 0 and text
    assert run("export", FIG1, "fig1c", "--format", fmt)[1] == text


def test_simulate_search():
    code, text = run("simulate-search", FIG2, "source", "target")
    assert code == 0 and json.loads(text)["state_map"]["q1"] == "p1"
    assert run("simulate-search", FIG2, "target", "source")[0] == 1
