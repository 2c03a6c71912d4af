import json
import subprocess
import sys

import pytest

from qsmooth import cli
from qsmooth.cache import GBCache
from qsmooth.manifest import ManifestError, parse_manifest

NODE_MANIFEST = """\
name = node-germ

[germ]
name = node
variables = x y z w
equation = x^2 + y^2 + z^2 + w^2
expected_tjurina = 1
"""


def read_bundled(name: str) -> str:
    with open(cli.bundled_manifests()[name], "r", encoding="utf-8") as fh:
        return fh.read()


def run_cli(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


# -- manifest parsing ---------------------------------------------------------


def test_parse_manifest_roundtrip():
    m = parse_manifest(read_bundled("example1"))
    assert m.name == "example-1"
    assert m.first("ambient").get("kind") == "projective"
    assert len(m.all("singular_point")) == 1


def test_parse_manifest_requires_name():
    with pytest.raises(ManifestError):
        parse_manifest("[ambient]\nkind = projective\n")


def test_parse_manifest_bad_lines():
    with pytest.raises(ManifestError) as err:
        parse_manifest("name = x\n[oops\n")
    assert err.value.line == 2
    with pytest.raises(ManifestError) as err2:
        parse_manifest("name = x\njust words\n")
    assert err2.value.line == 2


def test_manifest_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.qsm"
    bad.write_text("name = broken\n[ambient]\nkind = dodecahedron\n")
    code, _, err = run_cli(["run", str(bad), "--no-cache"], capsys)
    assert code == cli.EXIT_MANIFEST_ERROR
    assert "dodecahedron" in err


def test_missing_manifest_exit_code(capsys):
    code, _, err = run_cli(["run", "/nonexistent.qsm", "--no-cache"], capsys)
    assert code == cli.EXIT_MANIFEST_ERROR


# -- verification runs --------------------------------------------------------


def test_run_example1_passes(tmp_path, capsys):
    report = tmp_path / "report.jsonl"
    code, out, _ = run_cli(
        ["run", "example1", "--no-cache", "--report", str(report)], capsys
    )
    assert code == cli.EXIT_OK
    assert "VERDICT pass" in out
    lines = [json.loads(l) for l in report.read_text().splitlines()]
    assert lines[0]["record"] == "header"
    assert lines[-1] == {"record": "verdict", "status": "pass"}
    steps = {l["step"]: l for l in lines if l["record"] == "step"}
    assert steps["germ(1:0:0:0:0)"]["detail"]["tjurina"] == 16
    assert steps["singular_locus"]["status"] == "pass"


def test_run_misdeclared_smooth_claim_fails(tmp_path, capsys):
    text = read_bundled("example1")
    # drop the singular-point claim: the hypersurface is *not* smooth
    lines = [
        l
        for l in text.splitlines()
        if not l.startswith(("coords", "expected_tjurina"))
    ]
    text = "\n".join(l for l in lines if l.strip() != "[singular_point]")
    bad = tmp_path / "smoothclaim.qsm"
    bad.write_text(text + "\n")
    code, out, _ = run_cli(["run", str(bad), "--no-cache", "--skip-family"], capsys)
    assert code == cli.EXIT_VERIFICATION_FAILED
    assert "VERDICT fail" in out


def test_run_off_scheme_point_is_error(tmp_path, capsys):
    text = read_bundled("example1").replace(
        "coords = 1 0 0 0 0", "coords = 0 0 0 0 1"
    )
    bad = tmp_path / "offscheme.qsm"
    bad.write_text(text)
    code, out, _ = run_cli(["run", str(bad), "--no-cache", "--skip-family"], capsys)
    assert code == cli.EXIT_INTERNAL_ERROR
    assert "not on the scheme" in out


def test_germ_only_node(tmp_path, capsys):
    path = tmp_path / "node.qsm"
    path.write_text(NODE_MANIFEST)
    report = tmp_path / "node.jsonl"
    code, out, _ = run_cli(
        ["run", str(path), "--germ-only", "--no-cache", "--report", str(report)],
        capsys,
    )
    assert code == cli.EXIT_OK
    lines = [json.loads(l) for l in report.read_text().splitlines()]
    steps = {l["step"]: l for l in lines if l["record"] == "step"}
    assert steps["germ:node:t1"]["detail"]["tjurina"] == 1
    assert steps["germ:node:direction"]["detail"]["good_direction"] == ["1"]
    assert steps["germ:node:bertini"]["detail"]["bertini_agrees"] is True


def test_germ_with_action_and_submodule(tmp_path, capsys):
    manifest = """\
name = equivariant-germ

[germ]
name = invariant-node
variables = x y z w
equation = x^2 + y^2 + z^2 + w^2
action_order = 2
action_weights = 1 1 1 1
"""
    path = tmp_path / "g.qsm"
    path.write_text(manifest)
    code, out, _ = run_cli(["run", str(path), "--no-cache"], capsys)
    assert code == cli.EXIT_OK
    assert "germ:invariant-node:ordinary" in out


def test_germ_full_span_submodule_errors(tmp_path, capsys):
    manifest = """\
name = improper

[germ]
name = overfull
variables = x y
equation = x^2 + y^3
submodule_generator = 1
"""
    path = tmp_path / "g.qsm"
    path.write_text(manifest)
    code, out, _ = run_cli(["run", str(path), "--no-cache"], capsys)
    assert code == cli.EXIT_INTERNAL_ERROR
    assert "not proper" in out


def test_skip_family_is_skipped(tmp_path, capsys):
    code, out, _ = run_cli(
        ["run", "example1", "--no-cache", "--skip-family"], capsys
    )
    assert code == cli.EXIT_OK
    assert "SKIPPED  family_smoothing" in out


def test_max_degree_budget_aborts(capsys):
    code, out, _ = run_cli(
        ["run", "example1", "--no-cache", "--max-degree", "1"], capsys
    )
    assert code == cli.EXIT_INTERNAL_ERROR


def test_exit_zero_iff_all_pass_or_skipped(tmp_path, capsys):
    report = tmp_path / "r.jsonl"
    code, _, _ = run_cli(
        ["run", "example1", "--no-cache", "--skip-family", "--report", str(report)],
        capsys,
    )
    lines = [json.loads(l) for l in report.read_text().splitlines()]
    statuses = {l["status"] for l in lines if l["record"] == "step"}
    assert statuses <= {"pass", "skipped"}
    assert code == cli.EXIT_OK


# -- cache --------------------------------------------------------------------


def test_cache_clear_empty(tmp_path, capsys):
    code, out, _ = run_cli(
        ["cache", "clear", "--cache-dir", str(tmp_path / "gbcache")], capsys
    )
    assert code == cli.EXIT_OK
    assert "removed 0 entries" in out


def test_cache_roundtrip_and_verify(tmp_path, capsys):
    cache_dir = tmp_path / "gbcache"
    code, _, _ = run_cli(
        ["run", "example4", "--cache-dir", str(cache_dir)], capsys
    )
    assert code == cli.EXIT_OK
    cache = GBCache(str(cache_dir))
    assert cache.entries()
    code, out, _ = run_cli(
        ["cache", "verify", "--cache-dir", str(cache_dir)], capsys
    )
    assert code == cli.EXIT_OK
    assert "0 flagged" in out


def test_cache_corruption_flagged_and_quarantined(tmp_path, capsys):
    cache_dir = tmp_path / "gbcache"
    run_cli(["run", "example4", "--cache-dir", str(cache_dir)], capsys)
    cache = GBCache(str(cache_dir))
    victim = cache_dir / cache.entries()[0]
    victim.write_text(victim.read_text().replace("---", "--- garbage\n", 1))
    code, out, _ = run_cli(
        ["cache", "verify", "--cache-dir", str(cache_dir)], capsys
    )
    assert code == cli.EXIT_VERIFICATION_FAILED
    assert "1 flagged" in out
    quarantined = list(cache_dir.glob("*.quarantined"))
    assert len(quarantined) == 1


def test_warm_cache_report_byte_identical(tmp_path, capsys):
    cache_dir = tmp_path / "gbcache"
    r1 = tmp_path / "r1.jsonl"
    r2 = tmp_path / "r2.jsonl"
    code1, _, _ = run_cli(
        ["run", "example4", "--cache-dir", str(cache_dir), "--report", str(r1)],
        capsys,
    )
    code2, _, _ = run_cli(
        ["run", "example4", "--cache-dir", str(cache_dir), "--report", str(r2)],
        capsys,
    )
    assert code1 == code2 == cli.EXIT_OK

    def strip_wall(path):
        out = []
        for line in path.read_text().splitlines():
            record = json.loads(line)
            record.pop("wall_ms", None)
            out.append(json.dumps(record, sort_keys=True))
        return out

    assert strip_wall(r1) == strip_wall(r2)


def test_cached_run_gives_same_answers(tmp_path, capsys):
    """A warm cache must reproduce the cold-run certificates exactly."""
    cache_dir = tmp_path / "gbcache"
    path = tmp_path / "node.qsm"
    path.write_text(NODE_MANIFEST)
    r1, r2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    run_cli(["run", str(path), "--cache-dir", str(cache_dir), "--report", str(r1)], capsys)
    run_cli(["run", str(path), "--cache-dir", str(cache_dir), "--report", str(r2)], capsys)
    a = [json.loads(l) for l in r1.read_text().splitlines()]
    b = [json.loads(l) for l in r2.read_text().splitlines()]
    for ra, rb in zip(a, b):
        ra.pop("wall_ms", None)
        rb.pop("wall_ms", None)
    assert a == b


# -- misc ---------------------------------------------------------------------


def test_bundled_listing(capsys):
    code, out, _ = run_cli(["bundled"], capsys)
    assert code == cli.EXIT_OK
    for name in ("example1", "example2", "example3", "example4"):
        assert name in out


def test_console_entry_point_runs():
    result = subprocess.run(
        [sys.executable, "-m", "qsmooth.cli", "bundled"],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0
    assert "example1" in result.stdout
