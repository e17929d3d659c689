import json
import shutil
import subprocess
import sys

import pytest

from su3ade import graphs
from su3ade.cli import main


@pytest.fixture
def data_copy(tmp_path):
    dst = tmp_path / "data"
    shutil.copytree(graphs.default_data_dir(), dst)
    return dst


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_graphs_list(capsys):
    code, out, _ = run(capsys, "graphs", "list")
    names = {line.split()[0] for line in out.splitlines()}
    assert code == 0
    assert {f"A{m}" for m in range(4, 13)} | {f"D{m}" for m in range(5, 13)} | {"E8", "E8*"} <= names


def test_graphs_show(capsys):
    code, out, _ = run(capsys, "graphs", "show", "A4", "--json")
    d = json.loads(out)
    assert code == 0 and len(d["vertices"]) == 3 and len(d["edges"]) == 3
    assert run(capsys, "graphs", "show", "NOPE")[0] == 2


def test_verify_nimrep(capsys):
    code, out, _ = run(capsys, "verify", "nimrep", "--graph", "E8", "--invariant", "E8", "--level", "5")
    assert code == 0 and "nimrep-spectrum" in out
    code, out, _ = run(capsys, "verify", "nimrep", "--graph", "E8", "--invariant", "A", "--level", "5")
    assert code == 1 and "size" in out


def test_verify_invariant_json(capsys):
    code, out, _ = run(capsys, "--json", "verify", "invariant", "--invariant", "E8", "--level", "5")
    assert code == 0 and json.loads(out)["passed"] is True


def test_verify_hilbert(capsys):
    code, out, _ = run(capsys, "verify", "hilbert", "--graph", "A5", "--cells", "cells/A5.json")
    assert code == 0 and "degree 2: equal" in out


def test_verify_hecke(capsys):
    assert run(capsys, "verify", "hecke", "--graph", "A4", "--p-max", "3")[0] == 0


def test_corrupt_cells_exit_1(capsys, tmp_path):
    d = json.loads((graphs.default_data_dir() / "cells" / "A5.json").read_text())
    d["cells"][0]["re"] *= 2
    p = tmp_path / "corrupt.json"
    p.write_text(json.dumps(d))
    code, out, _ = run(capsys, "verify", "cells", str(p))
    assert code == 1 and "FAIL" in out


def test_bad_input_exit_2(capsys, tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    assert run(capsys, "verify", "cells", str(p))[0] == 2
    assert run(capsys, "verify", "cells", str(tmp_path / "missing.json"))[0] == 2
    assert run(capsys, "--data-dir", str(tmp_path), "graphs", "list")[0] == 2
    assert run(capsys, "--tol", "-1", "graphs", "list")[0] == 2


def test_solve_then_verify(capsys, data_copy):
    out_file = data_copy / "cells" / "A4.json"
    code, _, _ = run(capsys, "--data-dir", str(data_copy), "cells", "solve", "--graph", "A4",
                     "--seed", "1", "--out", str(out_file))
    assert code == 0
    code, out, _ = run(capsys, "--data-dir", str(data_copy), "cells", "verify", str(out_file))
    assert code == 0 and "PASS" in out
    # the manifest follows the rewritten file, so the catalog still loads
    assert graphs.Catalog(data_copy).cell_files["A4"] == out_file


def test_global_flags_after_subcommand(capsys, data_copy):
    code, out, _ = run(capsys, "graphs", "list", "--data-dir", str(data_copy), "--json")
    assert code == 0 and isinstance(json.loads(out), list)


def test_env_data_dir(capsys, data_copy, monkeypatch):
    monkeypatch.setenv("SU3_DATA_DIR", str(data_copy))
    (data_copy / "manifest.json").unlink()
    assert run(capsys, "graphs", "list")[0] == 2


def test_measure_csv(capsys):
    argv = ("measure", "graph", "--graph", "E8", "--moments", "3", "3", "--csv")
    code, first, _ = run(capsys, *argv)
    lines = first.strip().splitlines()
    assert code == 0 and lines[0] == "m,n,re,im" and len(lines) == 17
    assert run(capsys, *argv)[1] == first


def test_measure_subgroup(capsys, tmp_path):
    from su3ade.specmeasure import abelian_class_data
    p = tmp_path / "z3z3.json"
    p.write_text(json.dumps(abelian_class_data(3, 3).to_dict()))
    code, out, _ = run(capsys, "measure", "subgroup", "--classes", str(p), "--moments", "2", "2", "--csv")
    assert code == 0 and "1,1,3.000000000000e+00" in out


def test_hilbert_modes(capsys):
    code, out, _ = run(capsys, "hilbert", "--graph", "D6", "--mode", "both", "--csv")
    assert code == 0 and out.startswith("degree,src,dst,dim,mode")


def test_supertransitivity(capsys):
    assert run(capsys, "supertransitivity", "--graph", "D6")[1].strip() == "D6: 1"


def test_invariants_and_nimrep(capsys):
    code, out, _ = run(capsys, "invariants", "--level", "5")
    assert code == 0 and len(out.strip().splitlines()) == 6
    assert run(capsys, "nimrep", "--graph", "A5")[0] == 0


def test_entry_point():
    res = subprocess.run([sys.executable, "-m", "su3ade.cli", "graphs", "show", "NOPE"],
                         capture_output=True, text=True)
    assert res.returncode == 2 and "unknown graph" in res.stderr
