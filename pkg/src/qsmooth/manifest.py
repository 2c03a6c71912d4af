"""Verification manifests: a small line-based text format.

Grammar (documented in the README, stable):

  file     := line*
  line     := blank | comment | header | binding
  comment  := '#' .... (full line)
  header   := '[' section-name ']'
  binding  := key '=' value          (inside the current section)

Sections may repeat; repeated keys inside one section accumulate in order.
Bindings before any header belong to the top-level section "".  Whitespace
around keys and values is trimmed; values are otherwise verbatim.

Recognized sections: [ambient], [variables], [equation], [action],
[singular_point]*, [smoothing], [quotient_point]*, [paper_counts],
[claims], [germ]*.  See the bundled manifests for worked examples.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .equiv import CyclicAction
from .geom import (
    AmbientSpace,
    DiagonalProjectiveAction,
    GeometryError,
    HypersurfaceScheme,
    PipelineSpec,
    SmoothingFamily,
)
from .poly import ParseError, Polynomial, parse
from .t1 import GermPresentation, minimalize


class ManifestError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass
class Section:
    name: str
    line: int
    entries: list = field(default_factory=list)  # (key, value, line)

    def get(self, key: str, default=None):
        for k, v, _ in self.entries:
            if k == key:
                return v
        return default

    def get_all(self, key: str) -> list:
        return [v for k, v, _ in self.entries if k == key]

    def require(self, key: str) -> str:
        value = self.get(key)
        if value is None:
            raise ManifestError(f"section [{self.name}] is missing '{key}'", self.line)
        return value


@dataclass
class Manifest:
    name: str
    sections: list

    def first(self, name: str) -> Optional[Section]:
        for s in self.sections:
            if s.name == name:
                return s
        return None

    def all(self, name: str) -> list:
        return [s for s in self.sections if s.name == name]


def parse_manifest(text: str) -> Manifest:
    sections = [Section("", 0)]
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("["):
            if not line.endswith("]") or len(line) < 3:
                raise ManifestError("malformed section header", lineno)
            sections.append(Section(line[1:-1].strip(), lineno))
            continue
        if "=" not in line:
            raise ManifestError("expected 'key = value'", lineno)
        key, _, value = line.partition("=")
        sections[-1].entries.append((key.strip(), value.strip(), lineno))
    top = sections[0]
    name = top.get("name")
    if name is None:
        raise ManifestError("manifest needs a top-level 'name = ...' binding")
    return Manifest(name, sections)


def load_manifest(path: str) -> Manifest:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_manifest(fh.read())


# -- interpretation ---------------------------------------------------------


def _ints(value: str, where: Section, key: str) -> list:
    try:
        return [int(tok) for tok in value.split()]
    except ValueError as exc:
        raise ManifestError(f"[{where.name}] {key}: expected integers", where.line) from exc


def has_ambient(manifest: Manifest) -> bool:
    return manifest.first("ambient") is not None


def has_germs(manifest: Manifest) -> bool:
    return bool(manifest.all("germ"))


def build_pipeline_spec(manifest: Manifest, skip_family: bool = False,
                        max_degree: Optional[int] = None) -> PipelineSpec:
    amb_sec = manifest.first("ambient")
    if amb_sec is None:
        raise ManifestError("manifest has no [ambient] section")
    kind = amb_sec.require("kind")
    if kind == "projective":
        dims = _ints(amb_sec.require("dims"), amb_sec, "dims")
        if len(dims) != 1:
            raise ManifestError("projective ambient takes a single dimension",
                                amb_sec.line)
        ambient = AmbientSpace.projective(dims[0])
    elif kind == "product":
        dims = _ints(amb_sec.require("dims"), amb_sec, "dims")
        ambient = AmbientSpace.product(dims)
    elif kind == "weighted":
        weights = _ints(amb_sec.require("weights"), amb_sec, "weights")
        ambient = AmbientSpace.weighted(weights)
    else:
        raise ManifestError(f"unknown ambient kind {kind!r}", amb_sec.line)

    var_sec = manifest.first("variables")
    if var_sec is None:
        raise ManifestError("manifest has no [variables] section")
    names = var_sec.require("names").split()
    if len(names) != ambient.ncoords:
        raise ManifestError(
            f"{len(names)} variables declared for an ambient with "
            f"{ambient.ncoords} coordinates",
            var_sec.line,
        )

    eq_sec = manifest.first("equation")
    if eq_sec is None:
        raise ManifestError("manifest has no [equation] section")
    try:
        F = parse(eq_sec.require("text"), names)
    except ParseError as exc:
        raise ManifestError(f"equation: {exc}", eq_sec.line) from exc
    try:
        scheme = HypersurfaceScheme(ambient, F, tuple(names))
    except GeometryError as exc:
        raise ManifestError(str(exc), eq_sec.line) from exc

    action = None
    act_sec = manifest.first("action")
    if act_sec is not None:
        order = int(act_sec.require("order"))
        weights = _ints(act_sec.require("weights"), act_sec, "weights")
        if len(weights) != ambient.ncoords:
            raise ManifestError("action weight arity mismatch", act_sec.line)
        action = DiagonalProjectiveAction(order, tuple(weights))

    points = []
    expected = {}
    for sec in manifest.all("singular_point"):
        coords = tuple(_ints(sec.require("coords"), sec, "coords"))
        if len(coords) != ambient.ncoords:
            raise ManifestError("singular point arity mismatch", sec.line)
        points.append(coords)
        exp = sec.get("expected_tjurina")
        if exp is not None:
            expected[coords] = int(exp)

    family = None
    sm_sec = manifest.first("smoothing")
    if sm_sec is not None:
        try:
            P = parse(sm_sec.require("text"), names)
        except ParseError as exc:
            raise ManifestError(f"smoothing: {exc}", sm_sec.line) from exc
        try:
            family = SmoothingFamily(scheme, P)
        except GeometryError as exc:
            raise ManifestError(str(exc), sm_sec.line) from exc

    quotient_points = []
    for sec in manifest.all("quotient_point"):
        entry = {
            "order": int(sec.require("order")),
            "weights": tuple(_ints(sec.require("weights"), sec, "weights")),
        }
        if sec.get("count") is not None:
            entry["count"] = int(sec.get("count"))
        if sec.get("label") is not None:
            entry["label"] = sec.get("label")
        quotient_points.append(entry)

    paper_count = None
    pc_sec = manifest.first("paper_counts")
    if pc_sec is not None and pc_sec.get("quotient_singularities") is not None:
        paper_count = int(pc_sec.get("quotient_singularities"))

    claims = {}
    cl_sec = manifest.first("claims")
    if cl_sec is not None:
        claims = {k: v for k, v, _ in cl_sec.entries}

    return PipelineSpec(
        scheme=scheme,
        action=action,
        claimed_singular_points=tuple(points),
        expected_tjurina=expected,
        family=family,
        quotient_points=tuple(quotient_points),
        paper_quotient_count=paper_count,
        claims=claims,
        skip_family=skip_family,
        max_degree=max_degree,
    )


@dataclass
class GermEntry:
    name: str
    raw_equations: list
    var_names: list
    action: Optional[CyclicAction]
    submodule_rows: list  # list of list[Polynomial] (d components each)
    expected_tjurina: Optional[int]


def build_germ_entries(manifest: Manifest) -> list:
    out = []
    for idx, sec in enumerate(manifest.all("germ")):
        name = sec.get("name", f"germ-{idx + 1}")
        names = sec.require("variables").split()
        texts = sec.get_all("equation")
        if not texts:
            raise ManifestError(f"[germ] {name} has no equations", sec.line)
        try:
            eqs = [parse(t, names) for t in texts]
        except ParseError as exc:
            raise ManifestError(f"[germ] {name}: {exc}", sec.line) from exc
        action = None
        if sec.get("action_order") is not None:
            weights = _ints(sec.require("action_weights"), sec, "action_weights")
            if len(weights) != len(names):
                raise ManifestError("germ action weight arity mismatch", sec.line)
            action = CyclicAction(int(sec.get("action_order")), tuple(weights))
        rows = []
        for row_text in sec.get_all("submodule_generator"):
            comps = [t.strip() for t in row_text.split(";")]
            if len(comps) != len(eqs):
                raise ManifestError(
                    f"[germ] {name}: submodule generator needs {len(eqs)} components",
                    sec.line,
                )
            try:
                rows.append([parse(t, names) for t in comps])
            except ParseError as exc:
                raise ManifestError(f"[germ] {name}: {exc}", sec.line) from exc
        expected = sec.get("expected_tjurina")
        out.append(
            GermEntry(
                name=name,
                raw_equations=eqs,
                var_names=names,
                action=action,
                submodule_rows=rows,
                expected_tjurina=int(expected) if expected is not None else None,
            )
        )
    return out


def minimalized(entry: GermEntry) -> GermPresentation:
    return minimalize(entry.raw_equations, entry.var_names)
