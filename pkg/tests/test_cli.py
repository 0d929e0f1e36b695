"""Exit codes, JSON round-trips, and golden-file byte stability."""

import json
import os
import subprocess
import sys
from pathlib import Path

GOLDEN = Path(__file__).parent / "golden"


def run(*argv, env_extra=None):
    env = dict(os.environ)
    env.pop("ELLFORGE_THREADS", None)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        [sys.executable, "-m", "ellforge.cli", *argv],
        capture_output=True,
        env=env,
    )


# ---------------------------------------------------------------------------
# check runner


def test_sigma_identity_suite_passes():
    proc = run("check", "sigma-identity")
    assert proc.returncode == 0
    assert b"sigma-identity: PASS" in proc.stdout


def test_check_list_names_every_suite():
    proc = run("check", "--list")
    assert proc.returncode == 0
    names = proc.stdout.decode().split()
    assert "sigma-identity" in names
    assert "sheaf" in names
    assert len(names) == 11


def test_unknown_suite_is_usage_error():
    proc = run("check", "no-such-suite")
    assert proc.returncode == 2


def test_impossible_tolerance_fails_with_exit_one():
    proc = run("check", "group-law", "--tol", "1e-30")
    assert proc.returncode == 1
    assert b"FAIL" in proc.stdout


def test_thread_cap_env_keeps_results():
    serial = run("check", "sectors")
    threaded = run("check", "sectors", env_extra={"ELLFORGE_THREADS": "4"})
    assert serial.returncode == threaded.returncode == 0
    # first line is deterministic up to the trailing runtime
    first = serial.stdout.decode().splitlines()[0]
    other = threaded.stdout.decode().splitlines()[0]
    assert first.split("(")[0] == other.split("(")[0]


def test_seed_is_printed_and_respected():
    a = run("check", "looijenga", "--seed", "7")
    b = run("check", "looijenga", "--seed", "8")
    assert a.returncode == b.returncode == 0
    assert b"seed 7" in a.stdout
    assert b"seed 8" in b.stdout


# ---------------------------------------------------------------------------
# emitters


def test_additive_law_is_x_plus_y():
    proc = run("fgl", "--coordinate", "additive", "--degree", "3", "--json")
    assert proc.returncode == 0
    payload = json.loads(proc.stdout)
    entries = {(e["i"], e["j"]) for e in payload["coefficients"]}
    assert entries == {(0, 1), (1, 0)}
    for e in payload["coefficients"]:
        assert e["series"]["coeffs"] == [[0, "1"]]


def test_bad_coordinate_is_usage_error():
    proc = run("fgl", "--coordinate", "bogus")
    assert proc.returncode == 2


def test_malformed_numeric_flag_is_usage_error():
    proc = run("euler", "--roots", "x", "--nilpotency", "4")
    assert proc.returncode == 2


def test_odd_eisenstein_weight_rejected():
    proc = run("modforms", "--k", "5")
    assert proc.returncode == 2


def test_sectors_reads_group_table(tmp_path):
    table = tmp_path / "z2.json"
    table.write_text('{"order": 2, "mul": [[0, 1], [1, 0]]}')
    proc = run("sectors", "--group-table", str(table), "--json")
    assert proc.returncode == 0
    payload = json.loads(proc.stdout)
    assert payload["pair_count"] == 4
    assert len(payload["orbits"]) == 2
    assert max(o["index"] for o in payload["orbits"]) == 3


def test_sectors_missing_file_is_input_error():
    proc = run("sectors", "--group-table", "/nonexistent/table.json")
    assert proc.returncode == 2


def test_sectors_invalid_table_is_input_error(tmp_path):
    table = tmp_path / "bad.json"
    table.write_text('{"order": 2, "mul": [[0, 0], [0, 0]]}')
    proc = run("sectors", "--group-table", str(table))
    assert proc.returncode == 2


def test_derham_relations_pass():
    proc = run("derham", "--group", "su2", "--check-relations", "--degree", "4")
    assert proc.returncode == 0
    assert b"all relations: ok" in proc.stdout


def test_derham_cohomology_dims():
    proc = run("derham", "--cohomology", "--weights", "1,1", "--degree", "4", "--json")
    assert proc.returncode == 0
    payload = json.loads(proc.stdout)
    assert payload["dims"] == [1, 0, 1, 0, 1]
    assert payload["free_rank_one"] is True


def test_derham_needs_exactly_one_mode():
    proc = run("derham", "--group", "su2")
    assert proc.returncode == 2
    proc = run("derham", "--group", "su2", "--check-relations", "--cohomology")
    assert proc.returncode == 2


def test_derham_basic_dump_contains_elements():
    proc = run("derham", "--group", "su2", "--basic", "--degree", "4", "--json")
    assert proc.returncode == 0
    payload = json.loads(proc.stdout)
    assert payload["dimension"] == 1
    assert len(payload["basis"]) == 1


def test_sheaf_sections_report():
    proc = run(
        "sheaf", "--weights", "1,2", "--anchor", "1/2,0", "--sections",
        "--degree", "4", "--json",
    )
    assert proc.returncode == 0
    payload = json.loads(proc.stdout)
    assert payload["fixed"] == [1]
    assert payload["cohomology_dims"] == [1, 0, 1, 0, 1]


def test_sheaf_bad_anchor_is_usage_error():
    proc = run("sheaf", "--weights", "1,2", "--anchor", "1/x,0", "--sections")
    assert proc.returncode == 2


# ---------------------------------------------------------------------------
# determinism and golden files


def _golden_bytes(name):
    return (GOLDEN / name).read_bytes()


EMIT_CASES = [
    (["euler", "--roots", "2", "--nilpotency", "4", "--qorder", "2"], "euler_r2_n4_q2.txt"),
    (["fgl", "--coordinate", "additive", "--degree", "3", "--json"], "fgl_additive_d3.json"),
    (["sigma", "--qorder", "3", "--zorder", "4", "--json"], "sigma_q3_z4.json"),
    (
        ["sheaf", "--weights", "1,2", "--anchor", "1/2,0", "--sections", "--degree", "4"],
        "sheaf_w12_sections.txt",
    ),
    (
        ["sectors", "--group-table", str(GOLDEN / "z2_table.json"), "--json"],
        "sectors_z2.json",
    ),
]


def test_emitters_match_golden_files_twice():
    for argv, name in EMIT_CASES:
        first = run(*argv)
        second = run(*argv)
        assert first.returncode == 0, (argv, first.stderr)
        assert first.stdout == second.stdout
        assert first.stdout == _golden_bytes(name), argv


def test_json_reingest_is_byte_identical(tmp_path):
    for argv, name in EMIT_CASES:
        if not name.endswith(".json"):
            continue
        saved = tmp_path / name
        saved.write_bytes(run(*argv).stdout)
        again = run(*argv, "--from", str(saved))
        assert again.returncode == 0
        assert again.stdout == saved.read_bytes()


def test_reingest_requires_json_mode(tmp_path):
    saved = tmp_path / "sigma.json"
    saved.write_bytes(run("sigma", "--qorder", "2", "--zorder", "2", "--json").stdout)
    proc = run("sigma", "--from", str(saved))
    assert proc.returncode == 2
