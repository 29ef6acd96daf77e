import json
from importlib import resources

import jsonschema
import pytest

from arborfa.cli import main

SPECS = {
    "a.dsl": "group A { gens: a; rels: a^2; }\n",
    "bad.dsl": "group A { gens: a; rels: b; }\n",
    "fa_z.json": {"a": "group Z { gens: z; }", "b": {"presentation": "group B { gens: t; rels: t^3; }", "certificates": ["is-finite"]}, "x": "regular"},
    "fa_cox.json": {"a": "a.dsl", "b": {"name": "W", "coxeter": [[1, 3, 3], [3, 1, 3], [3, 3, 1]]}},
    "fa_orbits.json": {
        "a": "a.dsl",
        "b": {"presentation": "group B { gens: t; rels: t^2; }", "certificates": ["is-finite"]},
        "x": {"points": 3, "action": ["(0 1)"]},
    },
    "hfa.json": {
        "a": "a.dsl",
        "b": {"name": "SL3(Z)", "certificates": [{"claim": "hereditary-FA", "provenance": "asserted"}, {"claim": "is-infinite", "provenance": "asserted"}]},
    },
    "gamma.json": {"a": "a.dsl", "b": "group B { gens: t; }", "f": ["t", "t^2"], "k": 2},
    "k.json": {"a": "a.dsl", "b": "group B { gens: t; rels: t^3; }", "x": {"points": 3, "action": ["(0 1 2)"]}},
    "k_bad.json": {"a": "a.dsl", "b": "group B { gens: t; }", "sb_in_c": [True]},
    "dinf.json": {
        "h": {"degree": 2, "generators": ["(0 1)"], "symbols": ["a"]},
        "l": {"degree": 2, "generators": ["(0 1)"], "symbols": ["b"]},
        "k": {"degree": 1, "generators": []},
        "words": ["a b", "a"],
    },
    "fq.json": {"a": "a.dsl", "a1": {"degree": 2, "generators": ["(0 1)"]}, "b_prime": {"degree": 7, "generators": ["(0 1 2 3 4 5 6)"]}, "f": [1], "c": 2, "d": 4},
    "fq_bad.json": {"a": "a.dsl", "a1": {"degree": 2, "generators": ["(0 1)"]}, "b_prime": {"degree": 3, "generators": ["(0 1 2)"]}, "f": [1, 2], "c": 1, "d": 2},
}

COMMANDS = [
    ["abelianize", "a.dsl"],
    ["decide-fa", "fa_z.json"],
    ["decide-fa", "fa_cox.json"],
    ["decide-fa", "fa_orbits.json"],
    ["decide-hfa", "hfa.json"],
    ["build-gamma", "gamma.json", "--symmetrize", "--export"],
    ["build-k", "k.json", "--export"],
    ["ball", "dinf.json", "3"],
    ["free-quotient", "fq.json"],
    ["verify-lemmas", "--seed", "0", "--cases", "30"],
]


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    for name, content in SPECS.items():
        text = content if isinstance(content, str) else json.dumps(content)
        (tmp_path / name).write_text(text)
    monkeypatch.chdir(tmp_path)
    return tmp_path


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def schema_for(command):
    text = resources.files("arborfa").joinpath("schemas", f"{command}.schema.json").read_text()
    return json.loads(text)


@pytest.mark.parametrize("argv", COMMANDS, ids=lambda a: " ".join(a))
def test_outputs_validate_and_are_deterministic(workdir, capsys, argv):
    code, first, _ = run(capsys, argv)
    assert code == 0
    code, second, _ = run(capsys, argv)
    assert first == second
    doc = json.loads(first)
    assert doc["schema"] == "arbor-fa/1"
    jsonschema.validate(doc, schema_for(argv[0]))


def test_abelianize_example(workdir, capsys):
    _, out, _ = run(capsys, ["abelianize", "a.dsl"])
    assert json.loads(out)["result"] == {"free_rank": 0, "torsion": [2]}


def test_decide_fa_expect(workdir, capsys):
    code, out, _ = run(capsys, ["decide-fa", "fa_z.json", "--expect", "has-fa"])
    doc = json.loads(out)
    assert code == 1 and doc["verdict"]["status"] == "NoFA"
    assert any("finite abelianisation" in e["cite"] for e in doc["verdict"]["trail"])
    code, out, _ = run(capsys, ["decide-fa", "fa_cox.json", "--expect", "has-fa"])
    assert code == 0 and json.loads(out)["verdict"]["status"] == "HasFA"
    code, out, _ = run(capsys, ["decide-fa", "fa_orbits.json"])
    assert json.loads(out)["verdict"]["status"] == "Unknown"


def test_decide_hereditary(workdir, capsys):
    _, out, _ = run(capsys, ["decide-hfa", "hfa.json"])
    v = json.loads(out)["verdict"]
    assert v["status"] == "HasFA" and v["hereditary"] is True


def test_ball_payload(workdir, capsys):
    _, out, _ = run(capsys, ["ball", "dinf.json", "3"])
    doc = json.loads(out)
    assert len(doc["ball"]["vertices"]) == 7 and doc["degenerate"] is True
    assert doc["tree"].splitlines()[0] == "7"
    assert [e["translation_length"] for e in doc["elements"]] == [2, 0]
    assert len(doc["elements"][0]["axis"]) == 7


def test_verify_lemmas_payload(workdir, capsys):
    _, out, _ = run(capsys, ["verify-lemmas", "--cases", "10"])
    assert json.loads(out)["result"] == {"helly_violations": 0, "commuting_violations": 0}


def test_out_flag(workdir, capsys):
    code, out, _ = run(capsys, ["abelianize", "a.dsl", "--out", "res.json"])
    assert code == 0 and out == ""
    assert json.loads((workdir / "res.json").read_text())["result"]["torsion"] == [2]


@pytest.mark.parametrize(
    "argv, needle",
    [
        (["abelianize", "bad.dsl"], "line 1"),
        (["abelianize", "missing.dsl"], "cannot read"),
        (["build-k", "k_bad.json"], "S_B-C is non-empty"),
        (["free-quotient", "fq_bad.json"], "WitnessError"),
        (["ball", "dinf.json", "-1"], "radius"),
    ],
)
def test_input_errors_exit_2(workdir, capsys, argv, needle):
    code, out, err = run(capsys, argv)
    assert code == 2 and out == ""
    assert needle in err
