"""Replayable two-pass stream sources over bipartite graphs, plus result files.

A stream yields ``(left vertex id, neighborhood)`` records in a fixed order
and may be read exactly twice; a third pass violates the arrival model and
raises.  Text formats are UTF-8 with LF line endings:

* adjacency: one line per left vertex (implicit id = line order), the line
  holding the whitespace-separated right ids; a blank line is a degree-0
  vertex.  An optional first line ``%sofa n=<n> [m=<m>]`` carries the
  universe size.
* edge-list: one ``<left> <right>`` pair per line, all edges of a left
  vertex contiguous.  A left id that reappears after a different id is a
  fatal format error.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence

from sofa.vectors import SparseBinaryVector

__all__ = [
    "StreamFormatError",
    "PassBudgetError",
    "StreamSource",
    "MemoryStream",
    "AdjacencyStream",
    "EdgeListStream",
    "open_stream",
    "ClusteringArtifact",
    "write_artifact",
    "read_artifact",
]


class StreamFormatError(ValueError):
    """Malformed stream file or record."""


class PassBudgetError(RuntimeError):
    """A third pass over a two-pass stream was requested."""


Record = tuple[int, SparseBinaryVector]


class StreamSource:
    """Base class: ordered record source supporting exactly two passes."""

    def __init__(self, n: int):
        if n < 0:
            raise ValueError("universe size must be nonnegative")
        self.n = int(n)
        self.m: int | None = None
        self.passes_taken = 0

    def records(self) -> Iterator[Record]:
        if self.passes_taken >= 2:
            raise PassBudgetError("stream supports exactly two passes")
        self.passes_taken += 1
        return self._counting_iter()

    def _counting_iter(self) -> Iterator[Record]:
        count = 0
        for rec in self._iter():
            count += 1
            yield rec
        if self.m is None:
            self.m = count
        elif self.m != count:
            raise StreamFormatError(
                f"record count changed between passes: {self.m} != {count}"
            )

    def _iter(self) -> Iterator[Record]:
        raise NotImplementedError


class MemoryStream(StreamSource):
    """In-memory stream over a fixed record list."""

    def __init__(self, records: Sequence, n: int):
        super().__init__(n)
        norm: list[Record] = []
        for pos, item in enumerate(records):
            if isinstance(item, SparseBinaryVector):
                uid, vec = pos, item
            else:
                uid, vec = int(item[0]), item[1]
            if vec.n != self.n:
                raise StreamFormatError(
                    f"record {pos}: universe size {vec.n} != stream size {self.n}"
                )
            norm.append((uid, vec))
        self._records = norm
        self.m = len(norm)

    def _iter(self) -> Iterator[Record]:
        return iter(self._records)


def _parse_header(line: str) -> dict[str, int] | None:
    if not line.startswith("%sofa"):
        return None
    out: dict[str, int] = {}
    for tok in line.split()[1:]:
        key, _, val = tok.partition("=")
        if key not in ("n", "m") or not val:
            raise StreamFormatError(f"bad header token {tok!r}")
        out[key] = int(val)
    return out


class _FileStream(StreamSource):
    def __init__(self, path, n: int | None = None):
        self.path = Path(path)
        with self.path.open("r", encoding="utf-8") as fh:
            first = fh.readline()
        header = _parse_header(first) if first else None
        self._skip_header = header is not None
        if header and "n" in header:
            if n is not None and int(n) != header["n"]:
                raise StreamFormatError(
                    f"universe size {n} conflicts with header n={header['n']}"
                )
            n = header["n"]
        if n is None:
            raise StreamFormatError(
                "universe size required (pass n= or add a %sofa header)"
            )
        super().__init__(n)
        if header and "m" in header:
            self.m = header["m"]

    def _lines(self) -> Iterator[tuple[int, str]]:
        with self.path.open("r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if lineno == 1 and self._skip_header:
                    continue
                yield lineno, line.rstrip("\n")

    def _vector(self, tokens: list[str], lineno: int) -> SparseBinaryVector:
        try:
            ids = sorted(map(int, tokens))
        except ValueError as exc:
            raise StreamFormatError(f"line {lineno}: non-integer vertex id") from exc
        try:
            return SparseBinaryVector(ids, self.n)
        except ValueError as exc:
            raise StreamFormatError(f"line {lineno}: {exc}") from exc


class AdjacencyStream(_FileStream):
    """One line per left vertex; implicit ids follow line order."""

    def _iter(self) -> Iterator[Record]:
        uid = 0
        for lineno, line in self._lines():
            tokens = line.split()
            yield uid, self._vector(tokens, lineno)
            uid += 1


class EdgeListStream(_FileStream):
    """``<left> <right>`` pairs, grouped by left vertex."""

    def _iter(self) -> Iterator[Record]:
        seen: set[int] = set()
        current: int | None = None
        bucket: list[str] = []
        last_lineno = 0
        for lineno, line in self._lines():
            if not line.strip():
                continue
            tokens = line.split()
            if len(tokens) != 2:
                raise StreamFormatError(f"line {lineno}: expected '<left> <right>'")
            try:
                left = int(tokens[0])
            except ValueError as exc:
                raise StreamFormatError(f"line {lineno}: non-integer vertex id") from exc
            if left != current:
                if current is not None:
                    yield current, self._vector(bucket, last_lineno)
                if left in seen:
                    raise StreamFormatError(
                        f"line {lineno}: left vertex {left} reappears after another "
                        "vertex; edges of one vertex must be contiguous"
                    )
                seen.add(left)
                current = left
                bucket = []
            bucket.append(tokens[1])
            last_lineno = lineno
        if current is not None:
            yield current, self._vector(bucket, last_lineno)


def open_stream(path, format: str = "adjacency", n: int | None = None) -> StreamSource:
    """Open an on-disk stream in the given format."""
    if format == "adjacency":
        return AdjacencyStream(path, n=n)
    if format == "edge-list":
        return EdgeListStream(path, n=n)
    raise ValueError(f"unknown stream format {format!r}")


# --------------------------------------------------------------------------
# clustering artifacts

_MODES = ("bicluster", "bmf")


@dataclass
class ClusteringArtifact:
    """Recovered right clusters plus the per-left-vertex assignment.

    In bicluster mode every assigned vertex carries exactly one cluster id;
    in bmf mode a vertex may belong to any number of clusters.  ``params``
    records the run configuration (theta, alpha, c_max, capacity, seed, ...)
    as JSON-scalar values.
    """

    mode: str
    right_clusters: list[list[int]]
    left: dict[int, tuple[int, ...]]
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.mode not in _MODES:
            raise ValueError(f"mode must be one of {_MODES}")
        k = len(self.right_clusters)
        self.right_clusters = [sorted(int(j) for j in c) for c in self.right_clusters]
        norm: dict[int, tuple[int, ...]] = {}
        for uid, ids in self.left.items():
            ids = tuple(sorted(int(i) for i in ids))
            if any(i < 0 or i >= k for i in ids):
                raise ValueError(f"vertex {uid}: cluster id out of range [0, {k})")
            if self.mode == "bicluster" and len(ids) > 1:
                raise ValueError(f"vertex {uid}: multiple ids in bicluster mode")
            norm[int(uid)] = ids
        self.left = norm

    @property
    def k(self) -> int:
        return len(self.right_clusters)


def _ids_field(ids) -> str:
    return " ".join(map(str, ids)) if len(ids) else "-"


def _parse_ids(text: str) -> list[int]:
    text = text.strip()
    if text in ("", "-"):
        return []
    return [int(t) for t in text.split()]


def write_artifact(artifact: ClusteringArtifact, path, format: str = "tsv") -> None:
    """Serialize an artifact; identical artifacts yield identical bytes."""
    lines: list[str] = []
    params = sorted(artifact.params.items())
    if format == "tsv":
        lines.append("#sofa-artifact\ttsv\tv1")
        lines.append(f"#mode\t{artifact.mode}")
        lines.append(f"#k\t{artifact.k}")
        for key, val in params:
            lines.append(f"#param\t{key}\t{json.dumps(val)}")
        for i, cluster in enumerate(artifact.right_clusters):
            lines.append(f"R\t{i}\t{_ids_field(cluster)}")
        for uid in sorted(artifact.left):
            lines.append(f"L\t{uid}\t{_ids_field(artifact.left[uid])}")
    elif format == "structured-text":
        lines.append("sofa-artifact v1")
        lines.append(f"mode: {artifact.mode}")
        lines.append(f"k: {artifact.k}")
        for key, val in params:
            lines.append(f"param {key}: {json.dumps(val)}")
        for i, cluster in enumerate(artifact.right_clusters):
            lines.append(f"right {i}: {_ids_field(cluster)}")
        for uid in sorted(artifact.left):
            lines.append(f"left {uid}: {_ids_field(artifact.left[uid])}")
    else:
        raise ValueError(f"unknown artifact format {format!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def read_artifact(path) -> ClusteringArtifact:
    """Parse an artifact written by :func:`write_artifact` (either format)."""
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines:
        raise StreamFormatError("empty artifact file")
    if lines[0].startswith("#sofa-artifact"):
        return _read_artifact_tsv(lines)
    if lines[0] == "sofa-artifact v1":
        return _read_artifact_text(lines)
    raise StreamFormatError("unrecognized artifact header")


def _read_artifact_tsv(lines: list[str]) -> ClusteringArtifact:
    mode = None
    k = 0
    params: dict = {}
    rights: dict[int, list[int]] = {}
    left: dict[int, tuple[int, ...]] = {}
    for line in lines[1:]:
        if not line:
            continue
        parts = line.split("\t")
        tag = parts[0]
        if tag == "#mode":
            mode = parts[1]
        elif tag == "#k":
            k = int(parts[1])
        elif tag == "#param":
            params[parts[1]] = json.loads(parts[2])
        elif tag == "R":
            rights[int(parts[1])] = _parse_ids(parts[2] if len(parts) > 2 else "")
        elif tag == "L":
            left[int(parts[1])] = tuple(_parse_ids(parts[2] if len(parts) > 2 else ""))
        else:
            raise StreamFormatError(f"bad artifact line: {line!r}")
    return _assemble(mode, k, params, rights, left)


def _read_artifact_text(lines: list[str]) -> ClusteringArtifact:
    mode = None
    k = 0
    params: dict = {}
    rights: dict[int, list[int]] = {}
    left: dict[int, tuple[int, ...]] = {}
    for line in lines[1:]:
        if not line.strip():
            continue
        key, _, rest = line.partition(":")
        key = key.strip()
        rest = rest.strip()
        if key == "mode":
            mode = rest
        elif key == "k":
            k = int(rest)
        elif key.startswith("param "):
            params[key.split(None, 1)[1]] = json.loads(rest)
        elif key.startswith("right "):
            rights[int(key.split()[1])] = _parse_ids(rest)
        elif key.startswith("left "):
            left[int(key.split()[1])] = tuple(_parse_ids(rest))
        else:
            raise StreamFormatError(f"bad artifact line: {line!r}")
    return _assemble(mode, k, params, rights, left)


def _assemble(mode, k, params, rights, left) -> ClusteringArtifact:
    if mode is None:
        raise StreamFormatError("artifact missing mode")
    if sorted(rights) != list(range(k)):
        raise StreamFormatError("artifact cluster ids must be 0..k-1")
    clusters = [rights[i] for i in range(k)]
    return ClusteringArtifact(mode=mode, right_clusters=clusters, left=left, params=params)
