import json

import numpy as np
import pytest

from sipovm import documents as docs
from sipovm.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def strip_stamp(text):
    obj = json.loads(text)
    obj["metadata"].pop("created_at")
    return obj


def test_wigner_writes_document(tmp_path, capsys):
    path = tmp_path / "w3.json"
    code, out, _ = run(capsys, "wigner", "--dim", "3", "--out", str(path))
    assert code == 0
    assert "κ = 0.5" in out
    doc = docs.read(path)
    assert doc.kind == "povm" and doc.dimension == 3 and len(doc.payload["elements"]) == 9

    code, out, _ = run(capsys, "verify", "--in", str(path), "--json")
    assert code == 0
    rep = json.loads(out)["payload"]
    assert rep["is_symmetric"] is True and rep["n"] == 9


def test_search_frame_qubit(tmp_path, capsys):
    path = tmp_path / "f2.json"
    code, out, _ = run(capsys, "search", "--dim", "2", "--method", "frame", "--restarts", "10", "--seed", "7",
                       "--tol", "1e-9", "--out", str(path), "--json")
    assert code == 0
    rep = json.loads(out)["payload"]
    assert rep["certified"] and rep["residual"] <= 1e-9
    assert docs.read(path).kind == "fiducial"
    code, _, _ = run(capsys, "verify", "--in", str(path))
    assert code == 0


@pytest.mark.parametrize(
    "argv, kind",
    [
        (["wigner", "--dim", "5"], "povm"),
        (["random-si", "--dim", "3", "--seed", "4"], "povm"),
        (["covariant", "--dim", "3", "--phases", "pi"], "povm"),
        (["covariant", "--dim", "2", "--phases", "zero"], "povm"),
        (["search", "--dim", "3", "--method", "phase", "--restarts", "20"], "phases"),
        (["search", "--dim", "4", "--restarts", "20"], "fiducial"),
    ],
)
def test_products_verify(tmp_path, capsys, argv, kind):
    path = tmp_path / "doc.json"
    code, _, _ = run(capsys, *argv, "--out", str(path))
    assert code == 0
    assert docs.read(path).kind == kind
    code, _, _ = run(capsys, "verify", "--in", str(path))
    assert code == 0


def test_covariant_from_phase_file(tmp_path, capsys):
    ph = tmp_path / "ph.json"
    assert run(capsys, "search", "--dim", "3", "--method", "phase", "--out", str(ph))[0] == 0
    code, out, _ = run(capsys, "covariant", "--phases", str(ph), "--json")
    assert code == 0 and json.loads(out)["payload"]["is_rank_one_sic"]


def test_wigner_function_and_reconstruct(tmp_path, capsys):
    rho = np.diag([1.0, 0, 0]).astype(complex)
    state = tmp_path / "state.json"
    docs.write(docs.Document("state", 3, {"matrix": docs.complex_to_json(rho)}, docs.make_metadata()), state)
    wf = tmp_path / "wf.json"
    code, out, _ = run(capsys, "wigner-function", "--state", str(state), "--out", str(wf), "--json")
    assert code == 0
    W = np.array(docs.read(wf).payload["values"])
    assert np.allclose(W[0], 1 / 3) and np.allclose(W[1:], 0)

    # probabilities under the Wigner POVM reconstruct the state
    povm = tmp_path / "w3.json"
    run(capsys, "wigner", "--dim", "3", "--out", str(povm))
    probs = ((W + 1 / 3) / 4).reshape(-1).tolist()
    pf = tmp_path / "p.json"
    docs.write(docs.Document("probabilities", 3, {"probabilities": probs}, docs.make_metadata()), pf)
    out_state = tmp_path / "rec.json"
    code, _, _ = run(capsys, "reconstruct", "--povm", str(povm), "--probs", str(pf), "--out", str(out_state))
    assert code == 0
    rec = docs.complex_from_json(docs.read(out_state).payload["matrix"])
    assert np.max(np.abs(rec - rho)) <= 1e-10

    code, _, _ = run(capsys, "wigner-function", "--probs", str(pf))
    assert code == 0
    code, _, _ = run(capsys, "reconstruct", "--probs", str(wf), "--out", str(out_state))
    assert code == 0
    assert np.max(np.abs(docs.complex_from_json(docs.read(out_state).payload["matrix"]) - rho)) <= 1e-12


def test_mub_check(tmp_path, capsys):
    F = np.fft.fft(np.eye(3)) / np.sqrt(3)
    good = tmp_path / "mub.json"
    docs.write(docs.Document("bases", 3, {"bases": docs.complex_to_json([np.eye(3), F])}, {}), good)
    assert run(capsys, "mub-check", "--bases", str(good))[0] == 0
    bad = tmp_path / "bad.json"
    docs.write(docs.Document("bases", 3, {"bases": docs.complex_to_json([np.eye(3), np.eye(3)])}, {}), bad)
    assert run(capsys, "mub-check", "--bases", str(bad))[0] == 1


def test_negative_verification_exits_one(tmp_path, capsys):
    path = tmp_path / "fid.json"
    docs.write(docs.Document("fiducial", 2, {"vector": docs.complex_to_json([1, 0])}, {}), path)
    assert run(capsys, "verify", "--in", str(path))[0] == 1
    assert run(capsys, "search", "--dim", "5", "--restarts", "1", "--max-iter", "2")[0] == 1


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["bogus"],
        ["wigner"],
        ["wigner", "--dim", "4"],
        ["wigner", "--dim", "1"],
        ["search", "--dim", "3", "--method", "simplex"],
        ["search", "--dim", "3", "--frobnicate"],
        ["covariant", "--phases", "zero"],
        ["covariant", "--dim", "4", "--phases", "zero"],
        ["verify", "--in", "/nonexistent/file.json"],
        ["wigner", "--dim", "3", "--tol", "-1"],
    ],
)
def test_usage_errors_exit_two(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err


def test_bad_document_exits_two(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"kind": "povm", "payload": {}}')
    code, _, err = run(capsys, "verify", "--in", str(path))
    assert code == 2 and "$.dimension" in err
    path.write_text("{oops")
    assert run(capsys, "verify", "--in", str(path))[0] == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["wigner", "--dim", "3"],
        ["random-si", "--dim", "4", "--seed", "9"],
        ["covariant", "--dim", "3", "--phases", "pi"],
        ["search", "--dim", "3", "--seed", "5"],
        ["search", "--dim", "4", "--method", "phase", "--seed", "5"],
    ],
)
def test_json_output_is_deterministic(capsys, argv):
    a = run(capsys, *argv, "--json")[1]
    b = run(capsys, *argv, "--json")[1]
    assert strip_stamp(a) == strip_stamp(b)
    assert a.replace(json.loads(a)["metadata"]["created_at"], "") == b.replace(json.loads(b)["metadata"]["created_at"], "")


def test_module_entry_point():
    import subprocess
    import sys

    r = subprocess.run([sys.executable, "-m", "sipovm", "wigner", "--dim", "3"], capture_output=True, text=True)
    assert r.returncode == 0 and "κ = 0.5" in r.stdout
