import io
import json
import os

import pytest

from relhom import cli, suite

FIX = os.path.join(os.path.dirname(__file__), os.pardir, "fixtures")


def run(*argv):
    out = io.StringIO()
    code = cli.run(list(argv), out)
    return code, out.getvalue()


def fx(name):
    return os.path.join(FIX, f"{name}.rs")


def test_decide_examples():
    code, text = run("decide", fx("tri"), "--J", "0,1,2")
    assert code == 0 and "holds: true" in text and "mixing gap 12" in text
    code, text = run("--json", "decide", fx("k2"))
    obj = json.loads(text)
    assert code == 1 and obj["verdict"] is False and obj["witness"] == ["(0|1)", "(1|0)"]
    code, _ = run("decide", "missing.rs")
    assert code == 2


def test_json_shape_and_determinism():
    a = run("--json", "--seed", "3", "decide", fx("tri"), "--J", "0,1,2")
    b = run("--json", "--seed", "3", "decide", fx("tri"), "--J", "0,1,2")
    assert a == b
    obj = json.loads(a[1])
    assert {"verdict", "witness", "timing"} <= set(obj) and obj["timing"] is None
    assert obj["result"]["gap"] == 12 and len(obj["result"]["phase2"]) == 6
    _, text = run("--json", "--timing", "decide", fx("edge"))
    assert isinstance(json.loads(text)["timing"], float)


def test_usage_errors():
    assert run("bogus")[0] == 2
    assert run("decide", fx("tri"), "--J", "9")[0] == 2
    assert run("homs", fx("edge"), fx("k2"))[0] == 2
    assert run("mixing", "gap", fx("k2"))[0] == 2
    code, text = run("--json", "gibbs", "z", fx("k2"), fx("k2"), "--V", "0", "--phi", "0=1")
    assert code == 2 and "error" in json.loads(text)


def test_bad_file_is_a_parse_error(tmp_path):
    p = tmp_path / "bad.rs"
    p.write_text("signature R/2\nuniverse a\nrel R = (a,a,a)\n")
    code, text = run("decide", str(p))
    assert code == 2 and "line 3" in text


def test_cap_exceeded():
    code, text = run("--cap", "2", "homs", fx("c3"), fx("c3"))
    assert code == 3 and "cap" in text


def test_make():
    code, text = run("make", "square", fx("edge"))
    assert code == 0 and text.startswith("signature R/2\nuniverse (0|0) (0|1) (1|0) (1|1)")
    assert run("make", "link", "2", "--signature", "E/2")[1].count("(") == 7
    assert "const_0/1" in run("make", "constants", "fixture:c3")[1]
    assert run("make", "fixture", "nope")[0] == 2
    code, text = run("make", "forest", "fixture:edge", "--depth", "1")
    assert code == 0 and "0:1.R.0.2" in text
    assert run("make", "product", "fixture:edge")[0] == 2


def test_dismantle():
    code, text = run("dismantle", "fixture:sft3")
    assert code == 0 and text.startswith("folds: c->b, b->a")
    assert run("dismantle", "fixture:edge")[0] == 1
    # c is the only dominated element, so protecting it stops everything
    code, text = run("dismantle", "fixture:sft3", "--J", "c")
    assert code == 1 and text.startswith("folds: none")
    assert run("dismantle", "fixture:sft3", "--J", "a")[0] == 0


def test_homs_and_homgraph():
    code, text = run("--json", "homs", "fixture:k2", "fixture:k2")
    assert code == 0 and json.loads(text)["result"]["count"] == 2
    assert run("homgraph", "b5", "fixture:k2")[0] == 1
    assert run("homgraph", "b3", "fixture:tri", "--J", "0,1,2")[0] == 0
    assert run("homgraph", "components", "fixture:k2", "fixture:k2")[0] == 1
    code, text = run("--json", "homgraph", "links", "fixture:k2", "fixture:k2", "--length", "2")
    assert code == 0 and json.loads(text)["result"]["homs"] == 2
    code, text = run("homgraph", "connected", "fixture:pt1", "fixture:pt1", "--phi", "e=e", "--psi", "e=e")
    assert code == 0 and "length 0" in text


def test_mixing():
    code, text = run("--json", "mixing", "gap", "fixture:k2", "fixture:pt1")
    assert code == 0 and json.loads(text)["result"]["gap"] == 0
    assert run("mixing", "tssm", "fixture:k2", "fixture:k2", "--g", "1")[0] == 1
    assert run("mixing", "c2", "fixture:k2", "--g", "2", "--depth", "4")[0] == 1
    code, _ = run("mixing", "construct", "fixture:edge", "fixture:edge", "--J", "0,1", "--V", "0", "--W", "1",
                  "--phi", "0=0,1=1", "--psi", "0=0,1=1")
    assert code == 2  # the two ends are closer than the gap


def test_gibbs():
    assert run("gibbs", "hardcore", "--degree", "6")[1].strip() == "15625/4096"
    assert run("gibbs", "hardcore", "--degree", "2")[0] == 2
    code, text = run("gibbs", "influence", "fixture:k2")
    assert code == 0 and text.startswith("gap: 1")
    code, text = run("gibbs", "marginal", "fixture:pt1", "fixture:pt1", "--V", "e", "--phi", "e=e", "--x", "e",
                     "--lambda", "e=3/2")
    assert code == 0 and text.strip() == "e: 1"
    code, text = run("--json", "gibbs", "z", "fixture:pt1", "fixture:pt1", "--V", "e", "--phi", "e=e",
                     "--lambda", "e=3/2")
    assert json.loads(text)["result"]["Z"] == "3/2"
    code, text = run("--json", "gibbs", "jsm", "fixture:k2", "fixture:k2", "--V-family", "0")
    assert code == 0 and json.loads(text)["result"]["pairs_tested"] == 1


def test_duality():
    assert run("duality", "core", "fixture:c3")[0] == 0
    assert run("duality", "core", "fixture:sft3")[0] == 1
    assert run("duality", "check-a1c", "fixture:c3")[0] == 1
    code, text = run("--json", "duality", "enumerate", "fixture:c3", "--max-size", "3")
    assert code == 1 and len(json.loads(text)["witness"]) == 3
    assert run("duality", "enumerate", "fixture:c3", "--max-size", "6", "--trees")[0] == 0
    assert run("duality", "extend", "fixture:c3", "fixture:k2", "--map", "0=0")[0] == 1
    assert run("duality", "extend", "fixture:pt1", "fixture:k2", "--map", "0=e")[0] == 0


def test_paper_suite_reports_failures(monkeypatch):
    def fake(seed, level):
        return [suite.CriterionResult(1, "one", True, 0.0, {"a": True}),
                suite.CriterionResult(7, "seven", False, 0.0, {"b": False})]
    monkeypatch.setattr(suite, "run_suite", fake)
    code, text = run("--json", "paper-suite")
    obj = json.loads(text)
    assert code == 1 and obj["witness"] == [7]
    code, text = run("paper-suite")
    assert "criterion  7 FAIL" in text


def test_threads_flag_is_accepted():
    assert run("--threads", "4", "decide", "fixture:pt1")[0] == 0


@pytest.mark.parametrize("argv", [["--help"], ["decide", "--help"]])
def test_help_exits_cleanly(argv, capsys):
    assert cli.run(argv) == 0
