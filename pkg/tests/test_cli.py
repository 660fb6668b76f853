import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from johncut.cli import EXIT_ERROR, EXIT_FAIL, EXIT_PASS, main
from johncut.fixtures import circle_ring
from johncut.report import RunConfig, dumps, load_input, strip_timing, verify_report
from johncut.errors import MalformedInput

SVG_NS = "{http://www.w3.org/2000/svg}"


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def square_json(tmp_path):
    return write(tmp_path / "square.json", {"vertices": [[0, 0], [1, 0], [1, 1], [0, 1]]})


@pytest.fixture
def notch_json(tmp_path):
    assert main(["generate", "notched-rect", "--param", "gap=0.1", "--out", str(tmp_path / "notch.json")]) == EXIT_PASS
    return str(tmp_path / "notch.json")


def test_generate_writes_polygon(tmp_path):
    out = tmp_path / "k.json"
    assert main(["generate", "koch-variant", "--param", "i=1", "--out", str(out)]) == EXIT_PASS
    data = json.loads(out.read_text())
    assert data["kind"] == "koch-variant" and len(data["vertices"]) == 12
    kind, P = load_input(out)
    assert kind == "polygon" and P.perimeter == pytest.approx(4.0)


def test_generate_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        main(["generate", "blob", "--param", "seed=3", "--out", str(p)])
    assert a.read_bytes() == b.read_bytes()


def test_generate_unknown_kind():
    assert main(["generate", "hexagon"]) == EXIT_ERROR


def test_generate_bad_param():
    assert main(["generate", "comb", "--param", "teeth"]) == EXIT_ERROR


def test_decompose_lshape_with_svg(tmp_path):
    src = tmp_path / "lshape.json"
    main(["generate", "l-shape", "--out", str(src)])
    out, svg = tmp_path / "r.json", tmp_path / "r.svg"
    code = main(["decompose", "--input", str(src), "--theta", "0.25", "--out", str(out), "--svg", str(svg)])
    assert code == EXIT_PASS
    rep = json.loads(out.read_text())
    assert rep["ledger"]["ledger_pass"] and rep["status"] == "pass"
    root = ET.parse(svg).getroot()
    assert root.tag == SVG_NS + "svg"
    group = root.find(f"{SVG_NS}g[@id='pieces']")
    assert int(group.get("data-count")) == len(rep["partition"]["pieces"])
    assert len(group.findall(f"{SVG_NS}path")) == len(rep["partition"]["pieces"])


def test_decompose_koch2_logs_pieces(tmp_path, capsys):
    src = tmp_path / "koch2.json"
    main(["generate", "koch-variant", "--param", "i=2", "--out", str(src)])
    capsys.readouterr()
    assert main(["decompose", "--input", str(src), "--theta", "0.25", "--out", str(tmp_path / "r.json")]) == EXIT_PASS
    assert "pieces=" in capsys.readouterr().err


def test_decompose_notch_svg_counts_match(tmp_path, notch_json):
    out, svg = tmp_path / "r.json", tmp_path / "r.svg"
    main(["decompose", "--input", notch_json, "--theta", "0.5", "--out", str(out), "--svg", str(svg)])
    rep = json.loads(out.read_text())
    root = ET.parse(svg).getroot()
    group = root.find(f"{SVG_NS}g[@id='pieces']")
    assert int(group.get("data-count")) == len(rep["partition"]["pieces"]) >= 2
    assert len(root.find(f"{SVG_NS}g[@id='cuts']")) == len(rep["partition"]["cuts"])


def test_malformed_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["decompose", "--input", str(bad)]) == EXIT_ERROR
    assert "cannot parse" in capsys.readouterr().err


@pytest.mark.parametrize("payload", [{"points": []}, {"vertices": [[0, 0], [1, 1]]}, 7,
                                     {"vertices": [[0, 0], [1, 1], [1, 0], [0, 1]]}])
def test_bad_inputs_exit_2(tmp_path, payload):
    assert main(["certify", "--input", write(tmp_path / "x.json", payload), "--check", "john"]) == EXIT_ERROR


def test_missing_file():
    assert main(["certify", "--input", "/nonexistent/x.json", "--check", "john"]) == EXIT_ERROR


def test_bad_ratio_flag(square_json):
    assert main(["decompose", "--input", square_json, "--theta", "1.5"]) == EXIT_ERROR
    assert main(["certify", "--input", square_json, "--check", "nope"]) == EXIT_ERROR


def test_certify_square_john_passes(square_json, tmp_path):
    out = tmp_path / "c.json"
    assert main(["certify", "--input", square_json, "--check", "john", "--rho", "0.5", "--out", str(out)]) == EXIT_PASS
    rep = json.loads(out.read_text())
    assert rep["status"] == "pass" and rep["param"] == 0.5


def test_certify_notch_semiconvex_fails_with_chord(notch_json, tmp_path):
    out = tmp_path / "c.json"
    code = main(["certify", "--input", notch_json, "--check", "semiconvex", "--vartheta", "0.1", "--out", str(out)])
    assert code == EXIT_FAIL
    cert = json.loads(out.read_text())["certificate"]
    assert cert["status"] == "fail"
    v, w, length = cert["counterexample"]["chord"]
    assert v == [5.0, 0.1] and length == pytest.approx(0.1)


def test_certify_square_rotund(square_json):
    assert main(["certify", "--input", square_json, "--check", "rotund", "--omega", "0.36"]) == EXIT_FAIL
    assert main(["certify", "--input", square_json, "--check", "rotund", "--omega", "0.35"]) == EXIT_PASS


def test_certify_rejects_domain(tmp_path):
    path = write(tmp_path / "d.json", {"outer": circle_ring(1.0, 64).tolist()})
    assert main(["certify", "--input", path, "--check", "john"]) == EXIT_ERROR


def test_reports_are_deterministic(tmp_path, notch_json):
    outs = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in outs:
        main(["decompose", "--input", notch_json, "--theta", "0.5", "--seed", "7", "--out", str(p)])
    a, b = (json.loads(p.read_text()) for p in outs)
    assert dumps(strip_timing(a)) == dumps(strip_timing(b))
    assert verify_report(a) == {"match": True, "mismatches": []}


def test_certify_report_reverifies(square_json, tmp_path):
    out = tmp_path / "c.json"
    main(["certify", "--input", square_json, "--check", "rotund", "--omega", "0.36", "--out", str(out)])
    assert verify_report(json.loads(out.read_text()))["match"]


def test_run_config_validation():
    with pytest.raises(MalformedInput):
        RunConfig(eta=0)
    with pytest.raises(MalformedInput):
        RunConfig(samples=0)
    assert RunConfig(stress=True).n_points == 800


def test_module_entry_point(square_json):
    proc = subprocess.run([sys.executable, "-m", "johncut", "certify", "--input", square_json, "--check", "rotund",
                           "--omega", "0.3"], capture_output=True, text=True)
    assert proc.returncode == EXIT_PASS
    assert json.loads(proc.stdout)["status"] == "pass"
