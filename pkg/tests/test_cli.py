import io
import json
from pathlib import Path

import pytest

from aspkr.automata import characteristic_automaton
from aspkr.cli import run
from aspkr.decompose import worked_example
from aspkr.formats import automaton_to_json, certificate_to_json, dumps, product_to_json

GOLDEN = Path(__file__).parent / "golden"


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(map(str, argv)), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, text in {
        "b": "a :- not b.\nb :- not a.\n",
        "r": "a :- not a.\n",
        "c": "a.\nb :- a.\nc :- a, b.\n",
        "loop": "a :- b.\nb :- a.\n",
        "bad": "a :- .\n",
    }.items():
        paths[name] = tmp_path / f"{name}.lp"
        paths[name].write_text(text)
    P, pp, cert = worked_example("B")
    target = characteristic_automaton(P)
    for name, obj in {
        "bprod": product_to_json(pp),
        "bchar": automaton_to_json(target),
        "bcert": certificate_to_json(cert, pp, target),
    }.items():
        paths[name] = tmp_path / f"{name}.json"
        paths[name].write_text(dumps(obj))
    paths["dir"] = tmp_path
    return paths


def test_answersets(files):
    assert call("answersets", files["b"]) == (0, "{a}\n{b}\n", "")
    assert call("answersets", files["r"]) == (0, "no answer sets\n", "")


def test_classify(files):
    code, out, _ = call("classify", files["loop"])
    assert code == 0 and "tight: no" in out


def test_charaut_text_matches_golden(files):
    code, out, _ = call("charaut", files["b"])
    assert code == 0
    assert out == (GOLDEN / "psi_b_table.txt").read_text()
    assert call("charaut", "--lazy", files["b"])[1] == out


def test_charaut_formats(files):
    code, out, _ = call("charaut", "--json", files["b"])
    assert json.loads(out)["states"] == ["{}", "{a}", "{b}", "{a,b}"]
    code, out, _ = call("charaut", "--dot", files["b"])
    assert out.startswith("digraph {")
    assert call("charaut", "--dot", "--json", files["b"])[0] == 2


def test_verify_example_b(files):
    code, out, _ = call("verify", "--product", files["bprod"], "--target", files["bchar"], "--cert", files["bcert"])
    assert (code, out) == (0, "verified: isomorphic\n")


def test_verify_failure_exit_code(files):
    cert = json.loads(files["bcert"].read_text())
    cert["h1"][1], cert["h1"][2] = cert["h1"][2], cert["h1"][1]
    files["bcert"].write_text(json.dumps(cert))
    code, out, _ = call("verify", "--product", files["bprod"], "--target", files["bchar"], "--cert", files["bcert"])
    assert code == 1 and out.startswith("FAILED")


def test_compile_positive_then_trace(files):
    bundle = files["dir"] / "c.json"
    code, out, _ = call("compile-positive", files["c"], "-o", bundle)
    assert code == 0 and "verified: isomorphic" in out
    spec = files["dir"] / "cspec.json"
    spec.write_text(dumps(json.loads(bundle.read_text())["spec"]))
    code, out, _ = call("product-step", spec, "--state", "({},{},{})", "--input", "{}", "--iterate")
    assert out.splitlines() == ["({},{},{})", "({1},{},{})", "({1},{1},{})", "({1},{1},{1})"]
    assert call("product-step", spec, "--state", "({},{},{})", "--input", "{b}")[1] == "({1},{},{})\n"
    assert call("answersets-via", "--program", files["c"], "--bundle", bundle)[1] == "{a,b,c}\n"


def test_kr_pipeline_roundtrip(files):
    bundle = files["dir"] / "b.json"
    code, out, _ = call("kr-pipeline", files["b"], "-o", bundle)
    assert code == 0
    obj = json.loads(bundle.read_text())
    assert obj["status"] == "verified" and obj["answer_sets"] == ["{a}", "{b}"]
    assert call("answersets-via", "--program", files["b"], "--bundle", bundle) == (0, "{a}\n{b}\n", "")


def test_decompose_and_inconclusive(files):
    aut = files["dir"] / "e.json"
    aut.write_text(call("canonical", "elevator", "--as-automaton")[1])
    code, out, _ = call("decompose", aut, "--max-factors", "1", "-o", files["dir"] / "e_bundle.json")
    assert code == 3 and out.endswith("inconclusive\n")
    assert json.loads((files["dir"] / "e_bundle.json").read_text())["status"] == "inconclusive"
    code, out, _ = call("decompose", "--program", files["r"])
    assert code == 0 and "reset x1" in out


def test_canonical_and_tn(files):
    assert call("canonical", "reset")[1] == "1 :- not 1.\n"
    assert call("canonical", "facts", "2")[1] == "a1.\na2.\n"
    assert call("tn-embed", "2") == (0, "embedding: ok (8 equations)\n", "")
    assert call("tn-embed", "4")[0] == 1


def test_errors_and_usage(files):
    assert call("bogus")[0] == 2
    code, _, err = call("answersets", files["bad"])
    assert code == 1 and "line 1" in err and err.count("\n") == 1
    assert call("answersets", files["dir"] / "missing.lp")[0] == 1
    assert call("--atoms-cap", "1", "answersets", files["b"])[0] == 1
    assert call("--atoms-cap", "0", "answersets", files["b"])[0] == 2
    broken = files["dir"] / "broken.json"
    broken.write_text("{not json")
    assert call("verify", "--product", broken, "--target", files["bchar"], "--cert", files["bcert"])[0] == 1


def test_output_is_byte_stable(files):
    first = call("kr-pipeline", files["b"], "-o", "-")
    second = call("kr-pipeline", files["b"], "-o", "-")
    assert first == second
