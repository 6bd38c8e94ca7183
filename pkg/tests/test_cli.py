import io
import json
import subprocess
import sys

import pytest

from modeq.cli import run_command


def run(*argv):
    buf = io.StringIO()
    code = run_command(list(argv), stdout=buf)
    text = buf.getvalue()
    return code, json.loads(text) if text.startswith("{") else text


def test_ring_features():
    code, out = run("ring", "new", "--spec", "zmod4", "--features")
    assert code == 0 and out["violation"] is False
    assert out["report"]["features"]["units"] == ["1", "3"]


def test_ring_iso_inline_json():
    code, out = run("ring", "iso", "--spec", '{"kind": "zmod", "n": 4}', "--other", "f2x2")
    assert code == 0


def test_group_identities():
    code, out = run("group", "identities", "--ring", "zmod3", "--n", "3")
    assert code == 0


def test_lattice_space_ops():
    code, out = run("lattice", "space", "--ring", "zmod2", "--rank", "2", "--ops")
    assert code == 0


def test_cat_gr_certificate(tmp_path):
    spec = tmp_path / "zmod4.json"
    spec.write_text(json.dumps({"kind": "zmod", "n": 4}))
    code, out = run("cat", "gr", "--ring", str(spec), "--bound", "16")
    assert code == 0
    assert "Z/4" in json.dumps(out["report"], ensure_ascii=False)


def test_out_dir(tmp_path):
    code, out = run("--out", str(tmp_path), "ultra", "enum", "--index", "3")
    assert code == 0
    written = tmp_path / "ultra_enum.json"
    assert out.strip() == str(written)
    assert json.loads(written.read_text())["report"]


@pytest.mark.parametrize("argv", [
    ("bogus",),
    ("ring", "new"),
    ("ring", "new", "--spec", "zmod"),
    ("ultra", "enum", "--index", "0"),
])
def test_usage_errors(argv):
    assert run(*argv)[0] == 2


def test_cap_override(monkeypatch, capsys):
    monkeypatch.setenv("MODEQ_CAP_OVERRIDE", "lattice_enum=8")
    assert run("lattice", "space", "--ring", "zmod4", "--rank", "2")[0] == 2
    assert "cap lattice_enum exceeded" in capsys.readouterr().err


def test_deterministic_output():
    a = run("lattice", "recover", "--ring", "zmod2", "--rank", "3")
    b = run("lattice", "recover", "--ring", "zmod2", "--rank", "3")
    assert a == b and a[0] == 0


def test_console_entry_point():
    p = subprocess.run([sys.executable, "-m", "modeq.cli", "ultra", "enum", "--index", "2"],
                       capture_output=True, text=True, timeout=120)
    assert p.returncode == 0 and json.loads(p.stdout)["command"]
