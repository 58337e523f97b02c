import csv
import io
import json
import subprocess
import sys

import pytest

from dwork import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_spectrum_json(capsys):
    code, out = run(capsys, "spectrum", "-n", "3")
    doc = json.loads(out)
    assert code == 0
    assert doc["schema"] == 1
    assert [r["count"] for r in doc["spectrum"]] == [1, 4, 10, 16, 19, 16, 10, 4, 1]
    assert doc["total"] == 81 and doc["table_match"] and doc["consistent"]


def test_spectrum_is_deterministic(capsys):
    _, a = run(capsys, "spectrum", "-n", "2")
    _, b = run(capsys, "spectrum", "-n", "2")
    assert a == b


def test_spectrum_csv(capsys):
    code, out = run(capsys, "--format", "csv", "spectrum", "-n", "2")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["beta", "count"]
    assert [int(r[1]) for r in rows[1:]] == [1, 3, 3, 1]


def test_spectrum_n1_usage_error():
    with pytest.raises(SystemExit) as exc:
        cli.main(["spectrum", "-n", "1"])
    assert exc.value.code == 2


@pytest.mark.parametrize("m", ["10x0", "100", "1,0,0,0,0"])
def test_malformed_m_usage_error(m):
    with pytest.raises(SystemExit) as exc:
        cli.main(["sector", "-n", "3", "-m", m, "--actions", "operator"])
    assert exc.value.code == 2


def test_unknown_suite_usage_error():
    with pytest.raises(SystemExit) as exc:
        cli.main(["verify", "nonsense"])
    assert exc.value.code == 2


@pytest.mark.parametrize("argv", [["--precision", "32", "spectrum", "-n", "2"],
                                  ["--step-safety", "1.5", "spectrum", "-n", "2"],
                                  ["sector", "-n", "3", "-m", "1000", "--actions", "fly"]])
def test_bad_flags(argv):
    with pytest.raises(SystemExit) as exc:
        cli.main(argv)
    assert exc.value.code == 2


def test_sector_signature_and_concordance(capsys):
    code, out = run(capsys, "sector", "-n", "3", "-m", "1000", "--actions", "signature,operator")
    doc = json.loads(out)
    assert code == 0
    assert doc["signature"] == [4, 4, "inf"]
    assert doc["operator"]["reduced"]["order"] == 2
    assert doc["concordance"][0]["verdict"] == "pass"


def test_sector_permuted_m_finds_table_row(capsys):
    code, out = run(capsys, "sector", "-n", "3", "-m", "0001", "--actions", "signature")
    assert json.loads(out)["concordance"][0]["name"] == "quartic[1000]"


def test_cubic_monodromy(capsys, tmp_path):
    path = tmp_path / "cubic.json"
    code = cli.main(["sector", "-n", "2", "-m", "000", "--actions", "monodromy", "--out", str(path)])
    doc = json.loads(path.read_text())
    assert code == 0
    assert doc["concordance"][0]["signature"] == [3, "inf", "inf"]
    entry = doc["monodromy"]["matrices"]["M0"][0][0]["re"]
    assert len(entry.replace("-", "").replace(".", "").split("e")[0]) == 50


def test_sector_solve(capsys):
    code, out = run(capsys, "--trunc", "10", "sector", "-n", "2", "-m", "100", "--actions", "solve")
    doc = json.loads(out)
    assert code == 0
    (sol,) = doc["solve"]["solutions"]
    assert sol["exponent"] == "0/1" and sol["trunc"] == 10


def test_env_precision(capsys, monkeypatch):
    monkeypatch.setenv("DWORK_PRECISION", "128")
    code, out = run(capsys, "sector", "-n", "2", "-m", "110", "--actions", "monodromy")
    assert json.loads(out)["monodromy"]["precision"] == 128


def test_verify_yy_exit_code_counts_failures(capsys):
    code, out = run(capsys, "verify", "yy")
    doc = json.loads(out)
    verdicts = {r["name"]: r["verdict"] for r in doc["suites"]["yy"]}
    assert code == doc["failures"] == sum(v == "fail" for v in verdicts.values())
    assert verdicts["relation_1_wronskian"] == verdicts["relation_2"] == "pass"
    assert verdicts["relation_3_corrected"] == verdicts["closure"] == "pass"


def test_verify_mirror_csv(capsys):
    code, out = run(capsys, "--format", "csv", "verify", "mirror")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["suite", "name", "verdict", "residual_norm"]
    assert code == 0 and all(r[2] == "pass" for r in rows[1:])


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "dwork.cli", "spectrum", "-n", "2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["total"] == 8
