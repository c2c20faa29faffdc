"""Immutable inlink store over a single page/entity id space.

Source pages and entities share one id space, so an entity id is also a page
id. The graph keeps, for every entity, the sorted duplicate-free tuple of
pages linking to it, and the size ``W`` of the page universe used by the
relatedness measures.
"""

from __future__ import annotations

import struct
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Optional, Tuple

from .errors import GraphValidationError, IngestionError

SNAPSHOT_MAGIC = b"NICEGRPH"
SNAPSHOT_VERSION = 1

_EMPTY: Tuple[int, ...] = ()
_EMPTY_SET: frozenset = frozenset()


class LinkGraph:
    """Read-only entity link graph.

    Instances are built by :func:`build_graph` or :func:`load_snapshot` and
    never change afterwards, so they can be shared freely between threads.
    """

    __slots__ = ("_inlinks", "_sets", "_total_pages", "_metadata")

    def __init__(
        self,
        inlinks: Mapping[int, Tuple[int, ...]],
        total_pages: int,
        metadata: Optional[Mapping[int, Tuple[str, Optional[str]]]] = None,
    ):
        if total_pages < 1:
            raise GraphValidationError(f"total_pages must be >= 1, got {total_pages}")
        store = {}
        for e, pages in inlinks.items():
            pages = tuple(pages)
            if any(b <= a for a, b in zip(pages, pages[1:])):
                raise GraphValidationError(f"inlinks of entity {e} are not sorted and unique")
            if len(pages) > total_pages:
                raise GraphValidationError(
                    f"entity {e} has {len(pages)} inlinks but total_pages is {total_pages}"
                )
            store[e] = pages
        object.__setattr__(self, "_inlinks", MappingProxyType(store))
        object.__setattr__(
            self, "_sets", MappingProxyType({e: frozenset(p) for e, p in store.items()})
        )
        object.__setattr__(self, "_total_pages", int(total_pages))
        object.__setattr__(self, "_metadata", MappingProxyType(dict(metadata or {})))

    def __setattr__(self, name, value):
        raise AttributeError("LinkGraph is immutable")

    @property
    def total_pages(self) -> int:
        return self._total_pages

    @property
    def metadata(self) -> Mapping[int, Tuple[str, Optional[str]]]:
        return self._metadata

    def inlinks(self, e: int) -> Tuple[int, ...]:
        """Sorted inlink ids of ``e``; empty for unknown entities."""
        return self._inlinks.get(e, _EMPTY)

    def inlink_set(self, e: int) -> frozenset:
        return self._sets.get(e, _EMPTY_SET)

    def entities(self) -> list:
        return sorted(self._inlinks)

    def title(self, e: int) -> Optional[str]:
        meta = self._metadata.get(e)
        return meta[0] if meta else None

    def ner_type(self, e: int) -> Optional[str]:
        meta = self._metadata.get(e)
        return meta[1] if meta else None

    def type_dict(self) -> dict:
        """Entity -> NER type for every entity whose metadata carries a type."""
        return {e: t for e, (_, t) in self._metadata.items() if t}

    def __len__(self):
        return len(self._inlinks)

    def __eq__(self, other):
        if not isinstance(other, LinkGraph):
            return NotImplemented
        return (
            self._total_pages == other._total_pages
            and dict(self._inlinks) == dict(other._inlinks)
            and dict(self._metadata) == dict(other._metadata)
        )

    def __hash__(self):
        return hash((self._total_pages, len(self._inlinks)))

    def __repr__(self):
        return f"LinkGraph(entities={len(self)}, total_pages={self._total_pages})"

    def __reduce__(self):
        return (LinkGraph, (dict(self._inlinks), self._total_pages, dict(self._metadata)))


def _check_id(value, what):
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise GraphValidationError(f"{what} must be a non-negative integer, got {value!r}")
    return value


def build_graph(
    link_edges: Iterable[Tuple[int, int]],
    entity_metadata: Iterable[Tuple[int, str, Optional[str]]] = (),
    total_pages_override: Optional[int] = None,
) -> LinkGraph:
    """Build a :class:`LinkGraph` from ``(source, target)`` edges.

    Duplicate edges collapse. Without an override, ``W`` is the number of
    distinct ids seen as edge source, edge target or metadata id (at least 1).
    Metadata-only entities get an empty inlink tuple. Later metadata rows for
    the same id replace earlier ones; an empty type becomes ``None``.
    """
    sources: dict = {}
    universe = set()
    for src, dst in link_edges:
        _check_id(src, "source id")
        _check_id(dst, "target id")
        sources.setdefault(dst, set()).add(src)
        universe.add(src)
        universe.add(dst)

    metadata = {}
    for eid, title, ner_type in entity_metadata:
        _check_id(eid, "entity id")
        metadata[eid] = (title, ner_type or None)
        universe.add(eid)

    inlinks = {e: tuple(sorted(s)) for e, s in sources.items()}
    for eid in metadata:
        inlinks.setdefault(eid, _EMPTY)

    largest = max((len(p) for p in inlinks.values()), default=0)
    if total_pages_override is not None:
        if isinstance(total_pages_override, bool) or int(total_pages_override) < 1:
            raise GraphValidationError(
                f"total_pages override must be a positive integer, got {total_pages_override!r}"
            )
        if total_pages_override < largest:
            raise GraphValidationError(
                f"total_pages override {total_pages_override} is smaller than the largest "
                f"inlink set ({largest})"
            )
        total = int(total_pages_override)
    else:
        total = max(1, len(universe))
    return LinkGraph(inlinks, total, metadata)


# --- TSV ingestion -----------------------------------------------------------


def _parse_int(text, line_no, path, column):
    try:
        value = int(text)
    except ValueError:
        raise IngestionError(f"{column} is not an integer: {text!r}", line_no, path) from None
    if value < 0:
        raise IngestionError(f"{column} is negative: {value}", line_no, path)
    return value


def _lines(path):
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            yield line_no, line


def read_edges(path) -> Iterator[Tuple[int, int]]:
    """Yield ``(source, target)`` pairs from a ``source<TAB>target`` file."""
    for line_no, line in _lines(path):
        cols = line.split("\t")
        if len(cols) != 2:
            raise IngestionError(f"expected 2 columns, got {len(cols)}", line_no, path)
        yield (
            _parse_int(cols[0], line_no, path, "source id"),
            _parse_int(cols[1], line_no, path, "target id"),
        )


def read_metadata(path) -> Iterator[Tuple[int, str, Optional[str]]]:
    """Yield ``(id, title, type)`` rows; an empty type column means untyped."""
    for line_no, line in _lines(path):
        cols = line.split("\t")
        if len(cols) != 3:
            raise IngestionError(f"expected 3 columns, got {len(cols)}", line_no, path)
        yield _parse_int(cols[0], line_no, path, "entity id"), cols[1], cols[2] or None


def read_type_dict(path) -> dict:
    """Load an ``entity_id<TAB>type_label`` dictionary."""
    types = {}
    for line_no, line in _lines(path):
        cols = line.split("\t")
        if len(cols) != 2:
            raise IngestionError(f"expected 2 columns, got {len(cols)}", line_no, path)
        types[_parse_int(cols[0], line_no, path, "entity id")] = cols[1]
    return types


def load_graph_files(edges_path, metadata_path=None, total_pages_override=None) -> LinkGraph:
    metadata = read_metadata(metadata_path) if metadata_path else ()
    return build_graph(read_edges(edges_path), metadata, total_pages_override)


def write_tsv(g: LinkGraph, edges_path, metadata_path=None) -> None:
    """Write ``g`` back out in the edge/metadata text formats."""
    with open(edges_path, "w", encoding="utf-8") as fh:
        for e in g.entities():
            for src in g.inlinks(e):
                fh.write(f"{src}\t{e}\n")
    if metadata_path is not None:
        with open(metadata_path, "w", encoding="utf-8") as fh:
            for eid in sorted(g.metadata):
                title, ner_type = g.metadata[eid]
                fh.write(f"{eid}\t{title}\t{ner_type or ''}\n")


# --- binary snapshot ---------------------------------------------------------
#
# Layout (all integers little-endian):
#   magic[8] version:u32 total_pages:u64 n_entities:u64 n_metadata:u64
#   n_entities x { id:u64 count:u64 count x page:u64 }
#   n_metadata x { id:u64 title_len:u32 title[title_len]
#                  type_len:i32 (-1 = no type) type[type_len] }


def save_snapshot(g: LinkGraph, path) -> None:
    chunks = [
        SNAPSHOT_MAGIC,
        struct.pack("<IQQQ", SNAPSHOT_VERSION, g.total_pages, len(g), len(g.metadata)),
    ]
    for e in g.entities():
        pages = g.inlinks(e)
        chunks.append(struct.pack(f"<QQ{len(pages)}Q", e, len(pages), *pages))
    for eid in sorted(g.metadata):
        title, ner_type = g.metadata[eid]
        tb = title.encode("utf-8")
        chunks.append(struct.pack("<QI", eid, len(tb)) + tb)
        if ner_type is None:
            chunks.append(struct.pack("<i", -1))
        else:
            nb = ner_type.encode("utf-8")
            chunks.append(struct.pack("<i", len(nb)) + nb)
    Path(path).write_bytes(b"".join(chunks))


class _Reader:
    def __init__(self, data):
        self.data = data
        self.pos = 0

    def take(self, fmt):
        size = struct.calcsize(fmt)
        if self.pos + size > len(self.data):
            raise GraphValidationError("snapshot is truncated")
        out = struct.unpack_from(fmt, self.data, self.pos)
        self.pos += size
        return out

    def raw(self, n):
        if self.pos + n > len(self.data):
            raise GraphValidationError("snapshot is truncated")
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out


def load_snapshot(path) -> LinkGraph:
    data = Path(path).read_bytes()
    if not data.startswith(SNAPSHOT_MAGIC):
        raise GraphValidationError(f"{path} is not a graph snapshot")
    r = _Reader(data)
    r.pos = len(SNAPSHOT_MAGIC)
    version, total, n_entities, n_meta = r.take("<IQQQ")
    if version != SNAPSHOT_VERSION:
        raise GraphValidationError(f"unsupported snapshot version {version}")
    inlinks = {}
    for _ in range(n_entities):
        eid, count = r.take("<QQ")
        inlinks[eid] = r.take(f"<{count}Q")
    metadata = {}
    for _ in range(n_meta):
        eid, tlen = r.take("<QI")
        title = r.raw(tlen).decode("utf-8")
        (nlen,) = r.take("<i")
        ner_type = None if nlen < 0 else r.raw(nlen).decode("utf-8")
        metadata[eid] = (title, ner_type)
    if r.pos != len(data):
        raise GraphValidationError("trailing bytes after snapshot payload")
    return LinkGraph(inlinks, total, metadata)
