import json
import subprocess
import sys

import pytest

from dessin_homology import cli
from dessin_homology.cli import EXIT_CHECKPOINT, EXIT_OK, EXIT_VERIFY, main, one_face_gluings

# at 5 edges the printed table also lists 4 schemes of order 4, which would
# contradict its own total of 21 and the n_4 cell count; they are left out
G2_SCHEMES = {
    (9, 1): 3, (9, 2): 5, (9, 3): 1,
    (8, 1): 24, (8, 2): 4, (8, 4): 1,
    (7, 1): 41, (7, 2): 11,
    (6, 1): 37, (6, 2): 5, (6, 3): 1, (6, 4): 1, (6, 6): 1,
    (5, 1): 14, (5, 2): 5, (5, 5): 1, (5, 10): 1,
    (4, 1): 2, (4, 2): 1, (4, 8): 1,
}


def read(path):
    return json.loads(path.read_text())


def run_g1(workdir, *extra):
    return main(["all", "--genus", "1", "--workdir", str(workdir), *extra])


def test_genus1_end_to_end(tmp_path, capsys):
    wd = tmp_path / "g1"
    assert run_g1(wd) == EXIT_OK
    assert read(wd / "betti.json")["betti"] == [1, 2]
    assert read(wd / "ranks.json")["ranks"] == [1]
    chi = read(wd / "chi.json")
    assert chi["chi"] == -1 and chi["chi_over_group_order"] == "-1/6"
    for name in ("schemes.csv", "bases.csv", "cells.csv", "d1.sms", "counts.json", "manifest.json"):
        assert (wd / name).exists()
    assert (wd / "cells.csv").read_text().splitlines()[0] == "dim,index,dessin_code,basis_hash"
    assert (wd / "schemes.csv").read_text().splitlines() == ["edges,symmetry_order,count", "3,6,1", "2,4,1"]
    assert "betti.json" in capsys.readouterr().out


@pytest.mark.parametrize("method", ["elimination", "wiedemann", "dense"])
def test_rank_methods_agree(tmp_path, method):
    wd = tmp_path / method
    assert run_g1(wd, "--method", method) == EXIT_OK
    cert = read(wd / "ranks.json")["certificates"]["1"]
    assert cert["rank"] == 1 and cert["method"] == method
    assert read(wd / "betti.json")["betti"] == [1, 2]


def test_verify_passes_on_genus1(tmp_path, capsys):
    wd = tmp_path / "g1"
    run_g1(wd)
    assert main(["verify", "--genus", "1", "--workdir", str(wd), "--sample-minors", "3"]) == EXIT_OK
    assert "all checks passed" in capsys.readouterr().out


def test_verify_catches_a_flipped_bit(tmp_path, capsys):
    wd = tmp_path / "g1"
    run_g1(wd)
    sms = wd / "d1.sms"
    lines = sms.read_text().splitlines()
    # drop the entry (1, 1): the matrix is no longer all ones
    lines.remove("1 1 1")
    sms.write_text("\n".join(lines) + "\n")
    assert main(["verify", "--genus", "1", "--workdir", str(wd)]) == EXIT_VERIFY
    assert "FAIL d1" in capsys.readouterr().out


def test_verify_catches_corrupt_betti(tmp_path):
    wd = tmp_path / "g1"
    run_g1(wd)
    data = read(wd / "betti.json")
    data["betti"] = [1, 3]
    (wd / "betti.json").write_text(json.dumps(data))
    assert main(["verify", "--genus", "1", "--workdir", str(wd)]) == EXIT_VERIFY


def test_checkpoint_mismatch(tmp_path):
    wd = tmp_path / "g1"
    run_g1(wd)
    assert run_g1(wd, "--seed", "7") == EXIT_CHECKPOINT
    assert run_g1(wd, "--method", "dense") == EXIT_CHECKPOINT
    # thread count does not affect results, so it is not part of the checkpoint
    assert run_g1(wd, "--threads", "4") == EXIT_OK


def _snapshot(wd):
    return {p.name: p.read_bytes() for p in sorted(wd.iterdir()) if p.name != "ranks.json"}


def _certs_without_timing(wd):
    data = read(wd / "ranks.json")
    for c in data["certificates"].values():
        c.pop("seconds")
    return data


def test_resumed_run_matches_uninterrupted(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run_g1(a) == EXIT_OK
    assert run_g1(b, "--stages", "schemes,bases,complex") == EXIT_OK
    assert not (b / "ranks.json").exists()
    assert run_g1(b) == EXIT_OK
    assert _snapshot(a) == _snapshot(b)
    assert _certs_without_timing(a) == _certs_without_timing(b)


def test_same_seed_gives_identical_artifacts(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for wd in (a, b):
        assert run_g1(wd, "--method", "wiedemann", "--seed", "11") == EXIT_OK
    assert _snapshot(a) == _snapshot(b)
    assert _certs_without_timing(a) == _certs_without_timing(b)


def test_rerun_skips_completed_stages(tmp_path, caplog):
    wd = tmp_path / "g1"
    run_g1(wd)
    before = (wd / "d1.sms").stat().st_mtime_ns
    with caplog.at_level("INFO", logger="dessin_homology"):
        assert run_g1(wd) == EXIT_OK
    assert (wd / "d1.sms").stat().st_mtime_ns == before
    assert "already complete" in caplog.text


def test_bad_stage_list(tmp_path):
    assert run_g1(tmp_path / "x", "--stages", "bases,complex") == 1
    assert run_g1(tmp_path / "y", "--stages", "schemes,complex") == 1


def test_bad_modulus(tmp_path):
    assert main(["schemes", "--genus", "1", "--modulus", "5", "--workdir", str(tmp_path)]) == 1


def test_environment_override(tmp_path, monkeypatch):
    monkeypatch.setenv("DESSIN_HOMOLOGY_METHOD", "dense")
    monkeypatch.setenv("DESSIN_HOMOLOGY_WORKDIR", str(tmp_path / "env"))
    assert main(["all", "--genus", "1"]) == EXIT_OK
    assert read(tmp_path / "env" / "ranks.json")["certificates"]["1"]["method"] == "dense"


def test_large_genus_is_gated(tmp_path):
    with pytest.raises(SystemExit, match="allow-large"):
        main(["schemes", "--genus", "3", "--workdir", str(tmp_path)])


def test_one_face_gluing_counts():
    # rooted one-face gluings of a 2n-gon: genus-0 Catalan numbers, and the
    # classical 1, 10, 21 for a hexagon/octagon
    assert [one_face_gluings(0, n) for n in range(1, 6)] == [1, 2, 5, 14, 42]
    assert one_face_gluings(1, 2) == 1
    assert one_face_gluings(1, 3) == 10
    assert one_face_gluings(2, 4) == 21


def test_genus2_scheme_table(tmp_path):
    wd = tmp_path / "g2"
    assert main(["schemes", "--genus", "2", "--workdir", str(wd)]) == EXIT_OK
    rows = (wd / "schemes.csv").read_text().splitlines()
    assert rows[0] == "edges,symmetry_order,count"
    table = {(int(e), int(r)): int(c) for e, r, c in (row.split(",") for row in rows[1:])}
    assert table == G2_SCHEMES


def test_module_entry_point(tmp_path):
    out = subprocess.run(
        [sys.executable, "-m", "dessin_homology.cli", "all", "--genus", "1", "--workdir", str(tmp_path / "m")],
        capture_output=True, text=True, check=False,
    )
    assert out.returncode == 0, out.stderr
    assert '"betti": [1, 2]' in out.stdout


def test_stage_list_constant():
    assert cli.STAGES == ["schemes", "bases", "complex", "rank", "betti"]
