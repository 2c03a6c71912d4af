"""Manifest-driven command line runner.

  qsmooth run MANIFEST [MANIFEST ...]   verify manifests (paths or bundled names)
  qsmooth cache {list,clear,verify}     administer the Groebner-basis cache
  qsmooth bundled                       list the bundled example manifests

Exit codes: 0 all steps pass or are skipped; 1 a verification step failed;
2 the manifest could not be parsed; 3 an internal computation error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from importlib import resources
from typing import Optional

from . import __version__, gb
from .cache import ENV_CACHE_DIR, GBCache, default_cache_dir
from .equiv import (
    character_decomposition,
    class_character,
    invariant_good_direction,
    is_ordinary,
)
from .geom import StepRecord, example_pipeline
from .manifest import (
    GermEntry,
    Manifest,
    ManifestError,
    build_germ_entries,
    build_pipeline_spec,
    has_ambient,
    has_germs,
    load_manifest,
)
from .gb import VectorPolynomial
from .poly import poly_to_text
from .t1 import (
    ProperSubmodule,
    T1Class,
    good_direction_for_submodule,
    minimalize,
    t1_module,
    verify_good_direction_bertini,
)

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_MANIFEST_ERROR = 2
EXIT_INTERNAL_ERROR = 3


def bundled_manifests() -> dict:
    root = resources.files("qsmooth").joinpath("manifests")
    out = {}
    if root.is_dir():
        for entry in sorted(root.iterdir(), key=lambda e: e.name):
            if entry.name.endswith(".qsm"):
                out[entry.name[: -len(".qsm")]] = str(entry)
    return out


def _resolve_manifest(arg: str) -> str:
    import os

    if os.path.exists(arg):
        return arg
    bundled = bundled_manifests()
    if arg in bundled:
        return bundled[arg]
    raise ManifestError(f"no such manifest file or bundled name: {arg!r}")


# -- germ-section runner ------------------------------------------------------


def _germ_records(entry: GermEntry, max_degree: Optional[int]) -> list:
    records = []

    def step(name, fn):
        t0 = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # noqa: BLE001 - aggregated per step by contract
            wall = int((time.perf_counter() - t0) * 1000)
            records.append(StepRecord(name, "error", {"error": str(exc)}, wall))
            return None
        wall = int((time.perf_counter() - t0) * 1000)
        records.append(StepRecord(name, "pass" if ok else "fail", detail, wall))
        return ok

    state = {}

    def do_minimalize():
        germ = minimalize(entry.raw_equations, entry.var_names)
        state["germ"] = germ
        return True, {
            "variables": list(germ.names()),
            "equations": [poly_to_text(f, germ.names()) for f in germ.equations],
            "embedding_dimension": germ.e,
            "codimension": germ.d,
        }

    if step(f"germ:{entry.name}:minimalize", do_minimalize) is None:
        return records
    germ = state["germ"]

    def do_t1():
        t1p = t1_module(germ, max_degree)
        state["t1"] = t1p
        detail = {"tjurina": t1p.tjurina}
        ok = t1p.tjurina is not None
        if entry.expected_tjurina is not None:
            detail["expected_tjurina"] = entry.expected_tjurina
            ok = t1p.tjurina == entry.expected_tjurina
        return ok, detail

    if step(f"germ:{entry.name}:t1", do_t1) is None:
        return records
    t1p = state["t1"]

    action = entry.action
    ordinary = None
    if action is not None:
        def do_ordinary():
            nonlocal ordinary
            kept = [entry.var_names.index(n) for n in germ.names()]
            act = action.restrict(kept)
            state["action"] = act
            ordinary = is_ordinary(germ, act)
            detail = {"ordinary": ordinary}
            if ordinary and t1p.tjurina:
                decomp = character_decomposition(t1p, act)
                detail["character_dimensions"] = {
                    str(k): v for k, v in sorted(decomp.items())
                }
            return ordinary, detail

        step(f"germ:{entry.name}:ordinary", do_ordinary)

    if germ.is_smooth():
        records.append(
            StepRecord(
                f"germ:{entry.name}:direction",
                "skipped",
                {"reason": "smooth germ: no deformation directions"},
                0,
            )
        )
        return records

    def do_direction():
        module = ProperSubmodule(
            tuple(
                T1Class(t1p, VectorPolynomial(tuple(row)))
                for row in entry.submodule_rows
            )
        )
        act = state.get("action")
        if act is not None and ordinary:
            cls = invariant_good_direction(t1p, act, module)
        else:
            cls = good_direction_for_submodule(t1p, module)
        state["cls"] = cls
        detail = {
            "good_direction": [
                poly_to_text(p, germ.names()) for p in cls.representative.components
            ],
            "constant_part": [str(c) for c in cls.representative.constant_vector()],
        }
        if act is not None and ordinary:
            detail["character"] = class_character(cls, act)
        return True, detail

    if step(f"germ:{entry.name}:direction", do_direction) is None:
        return records

    def do_bertini():
        agrees = verify_good_direction_bertini(germ, state["cls"])
        return agrees, {"bertini_agrees": agrees}

    step(f"germ:{entry.name}:bertini", do_bertini)
    return records


# -- reports ------------------------------------------------------------------


@dataclass
class RunResult:
    manifest_name: str
    records: list
    exit_code: int


def _verdict(records) -> str:
    if any(r.status == "error" for r in records):
        return "error"
    if any(r.status == "fail" for r in records):
        return "fail"
    return "pass"


def _exit_for(records) -> int:
    verdict = _verdict(records)
    if verdict == "error":
        return EXIT_INTERNAL_ERROR
    if verdict == "fail":
        return EXIT_VERIFICATION_FAILED
    return EXIT_OK


def run_manifest(
    manifest: Manifest,
    germ_only: bool = False,
    skip_family: bool = False,
    max_degree: Optional[int] = None,
) -> RunResult:
    records = []
    if has_ambient(manifest) and not germ_only:
        spec = build_pipeline_spec(manifest, skip_family=skip_family,
                                   max_degree=max_degree)
        records.extend(example_pipeline(spec))
    if has_germs(manifest):
        for entry in build_germ_entries(manifest):
            records.extend(_germ_records(entry, max_degree))
    if not records:
        raise ManifestError(
            "manifest drives nothing: declare an [ambient]+[equation] run "
            "and/or [germ] sections"
        )
    return RunResult(manifest.name, records, _exit_for(records))


def write_human_report(result: RunResult, stream) -> None:
    print(f"== {result.manifest_name}", file=stream)
    for r in result.records:
        print(f"{r.status.upper():8s} {r.name:32s} {r.wall_ms:7d} ms", file=stream)
        if r.status == "fail":
            for line in r.detail.get("failures", []):
                print(f"         - {line}", file=stream)
        if r.status == "error":
            print(f"         ! {r.detail.get('error', '')}", file=stream)
    counts = {}
    for r in result.records:
        counts[r.status] = counts.get(r.status, 0) + 1
    summary = ", ".join(f"{v} {k}" for k, v in sorted(counts.items()))
    print(f"VERDICT {_verdict(result.records)} ({summary})", file=stream)


def machine_report_lines(result: RunResult) -> list:
    lines = [
        json.dumps(
            {
                "record": "header",
                "manifest": result.manifest_name,
                "version": __version__,
            },
            sort_keys=True,
        )
    ]
    for r in result.records:
        lines.append(
            json.dumps(
                {
                    "record": "step",
                    "step": r.name,
                    "status": r.status,
                    "detail": r.detail,
                    "wall_ms": r.wall_ms,
                },
                sort_keys=True,
                default=str,
            )
        )
    lines.append(
        json.dumps(
            {"record": "verdict", "status": _verdict(result.records)}, sort_keys=True
        )
    )
    return lines


# -- entry points ---------------------------------------------------------------


def _cmd_run(args) -> int:
    cache = None
    if not args.no_cache:
        cache_dir = args.cache_dir or default_cache_dir()
        cache = GBCache(cache_dir)
    gb.set_cache(cache)
    try:
        paths = [_resolve_manifest(a) for a in args.manifest]
        manifests = [load_manifest(p) for p in paths]
    except ManifestError as exc:
        print(f"manifest error: {exc}", file=sys.stderr)
        return EXIT_MANIFEST_ERROR
    except OSError as exc:
        print(f"manifest error: {exc}", file=sys.stderr)
        return EXIT_MANIFEST_ERROR

    results = []
    try:
        if args.jobs > 1 and len(manifests) > 1:
            results = _run_parallel(paths, args)
        else:
            for manifest in manifests:
                results.append(
                    run_manifest(
                        manifest,
                        germ_only=args.germ_only,
                        skip_family=args.skip_family,
                        max_degree=args.max_degree,
                    )
                )
    except ManifestError as exc:
        print(f"manifest error: {exc}", file=sys.stderr)
        return EXIT_MANIFEST_ERROR

    report_lines = []
    for result in results:
        write_human_report(result, sys.stdout)
        report_lines.extend(machine_report_lines(result))
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write("\n".join(report_lines) + "\n")
    return max((r.exit_code for r in results), default=EXIT_OK)


def _run_one_path(path, germ_only, skip_family, max_degree, cache_dir):
    if cache_dir:
        gb.set_cache(GBCache(cache_dir))
    result = run_manifest(
        load_manifest(path),
        germ_only=germ_only,
        skip_family=skip_family,
        max_degree=max_degree,
    )
    return result


def _run_parallel(paths, args) -> list:
    from concurrent.futures import ProcessPoolExecutor

    cache_dir = None
    if not args.no_cache:
        cache_dir = args.cache_dir or default_cache_dir()
    with ProcessPoolExecutor(max_workers=args.jobs) as pool:
        futures = [
            pool.submit(
                _run_one_path,
                p,
                args.germ_only,
                args.skip_family,
                args.max_degree,
                cache_dir,
            )
            for p in paths
        ]
        return [f.result() for f in futures]


def _cmd_cache(args) -> int:
    cache_dir = args.cache_dir or default_cache_dir()
    cache = GBCache(cache_dir)
    if args.action == "list":
        entries = cache.entries()
        print(f"{len(entries)} entries in {cache_dir}")
        for e in entries:
            print(f"  {e}")
        return EXIT_OK
    if args.action == "clear":
        removed = cache.clear()
        print(f"removed {removed} entries from {cache_dir}")
        return EXIT_OK
    results = cache.verify()
    bad = [r for r in results if r[1] != "ok"]
    for name, status in results:
        print(f"{status:10s} {name}")
    print(f"{len(results)} entries, {len(bad)} flagged")
    return EXIT_OK if not bad else EXIT_VERIFICATION_FAILED


def _cmd_bundled(_args) -> int:
    for name, path in bundled_manifests().items():
        print(f"{name:12s} {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsmooth",
        description="Exact verification of singular loci, Tjurina modules, "
        "equivariant good directions, and smoothing families.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="verify one or more manifests")
    run.add_argument("manifest", nargs="+",
                     help="manifest path or bundled name (see 'qsmooth bundled')")
    run.add_argument("--germ-only", action="store_true",
                     help="run only the [germ] sections")
    run.add_argument("--skip-family", action="store_true",
                     help="skip the smoothing-family verification step")
    run.add_argument("--report", metavar="PATH",
                     help="write the machine-readable report (JSON lines)")
    run.add_argument("--cache-dir", metavar="PATH",
                     help=f"Groebner cache directory (or ${ENV_CACHE_DIR})")
    run.add_argument("--no-cache", action="store_true",
                     help="disable the Groebner cache")
    run.add_argument("--max-degree", type=int, default=None, metavar="N",
                     help="abort any basis computation whose lead degree exceeds N")
    run.add_argument("--jobs", type=int, default=1, metavar="N",
                     help="verify multiple manifests concurrently")
    run.set_defaults(fn=_cmd_run)

    cache = sub.add_parser("cache", help="administer the Groebner-basis cache")
    cache.add_argument("action", choices=["list", "clear", "verify"])
    cache.add_argument("--cache-dir", metavar="PATH")
    cache.set_defaults(fn=_cmd_cache)

    bundled = sub.add_parser("bundled", help="list bundled example manifests")
    bundled.set_defaults(fn=_cmd_bundled)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except gb.DegreeBudgetExceeded as exc:
        print(f"computation aborted: {exc}", file=sys.stderr)
        return EXIT_INTERNAL_ERROR
    finally:
        gb.set_cache(None)


if __name__ == "__main__":
    sys.exit(main())
