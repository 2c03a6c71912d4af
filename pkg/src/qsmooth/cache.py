"""On-disk cache of reduced Groebner bases, keyed by a content hash of the
generators and the monomial order.

Entry format (one file per key, named <key-sha256>.gb):

  qsmooth-gb-cache 1
  key-sha256 <hex>
  payload-sha256 <hex>
  rank <d>
  nvars <e>
  ---
  [poly; poly; ...]        one canonical-form generator per line

The payload hash covers everything after the '---' separator; verification
recomputes it and quarantines any mismatching entry instead of using it.
"""

from __future__ import annotations

import hashlib
import os
from typing import Optional

from .gb import GroebnerBasis, VectorPolynomial
from .poly import MonomialOrder, parse

_MAGIC = "qsmooth-gb-cache 1"
ENV_CACHE_DIR = "QSMOOTH_CACHE_DIR"


def _sha(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class GBCache:
    def __init__(self, directory: str):
        self.directory = directory
        os.makedirs(directory, exist_ok=True)

    # -- engine hooks ------------------------------------------------------

    def get(self, key_text: str, order: MonomialOrder, rank: int,
            nvars: int) -> Optional[GroebnerBasis]:
        path = os.path.join(self.directory, _sha(key_text) + ".gb")
        if not os.path.exists(path):
            return None
        parsed = self._read_entry(path)
        if parsed is None:
            return None
        header, payload = parsed
        if header.get("key-sha256") != _sha(key_text):
            return None
        if header.get("payload-sha256") != _sha(payload):
            return None
        if int(header["rank"]) != rank or int(header["nvars"]) != nvars:
            return None
        gens = _payload_to_generators(payload, rank, nvars)
        return GroebnerBasis(tuple(gens), order, rank, nvars)

    def put(self, key_text: str, basis: GroebnerBasis) -> None:
        payload = basis.canonical_text()
        lines = [
            _MAGIC,
            f"key-sha256 {_sha(key_text)}",
            f"payload-sha256 {_sha(payload)}",
            f"rank {basis.rank}",
            f"nvars {basis.nvars}",
            "---",
        ]
        body = "\n".join(lines) + "\n" + payload
        path = os.path.join(self.directory, _sha(key_text) + ".gb")
        tmp = path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(body)
        os.replace(tmp, path)

    # -- administration ------------------------------------------------------

    def entries(self) -> list:
        return sorted(
            f for f in os.listdir(self.directory) if f.endswith(".gb")
        )

    def clear(self) -> int:
        removed = 0
        for f in self.entries():
            os.remove(os.path.join(self.directory, f))
            removed += 1
        return removed

    def verify(self) -> list:
        """Recompute hashes; quarantine mismatching or unreadable entries.
        Returns (entry, status) pairs, status in ok|corrupt|unreadable."""
        results = []
        for f in self.entries():
            path = os.path.join(self.directory, f)
            parsed = self._read_entry(path)
            if parsed is None:
                self._quarantine(path)
                results.append((f, "unreadable"))
                continue
            header, payload = parsed
            ok = (
                header.get("payload-sha256") == _sha(payload)
                and header.get("key-sha256") == f[: -len(".gb")]
            )
            if ok:
                results.append((f, "ok"))
            else:
                self._quarantine(path)
                results.append((f, "corrupt"))
        return results

    def _quarantine(self, path: str) -> None:
        os.replace(path, path + ".quarantined")

    @staticmethod
    def _read_entry(path: str):
        try:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError:
            return None
        if "---" not in text:
            return None
        head, _, payload = text.partition("---\n")
        lines = head.splitlines()
        if not lines or lines[0] != _MAGIC:
            return None
        header = {}
        for line in lines[1:]:
            if line.strip():
                key, _, value = line.partition(" ")
                header[key] = value.strip()
        for needed in ("key-sha256", "payload-sha256", "rank", "nvars"):
            if needed not in header:
                return None
        return header, payload


def _payload_to_generators(payload: str, rank: int, nvars: int) -> list:
    names = [f"x{i}" for i in range(nvars)]
    gens = []
    for line in payload.splitlines():
        line = line.strip()
        if not line:
            continue
        if not (line.startswith("[") and line.endswith("]")):
            raise ValueError(f"malformed cache payload line: {line!r}")
        comps = [parse(part.strip(), names) for part in line[1:-1].split(";")]
        if len(comps) != rank:
            raise ValueError("cache payload rank mismatch")
        gens.append(VectorPolynomial(tuple(comps)))
    return gens


def default_cache_dir() -> str:
    env = os.environ.get(ENV_CACHE_DIR)
    if env:
        return env
    base = os.environ.get("XDG_CACHE_HOME", os.path.expanduser("~/.cache"))
    return os.path.join(base, "qsmooth", "gb")
