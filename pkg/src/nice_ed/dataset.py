"""JSONL datasets and TSV prediction files."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .errors import SchemaError
from .model import Candidate, Document, Mention

NIL = -1

MentionKey = Tuple[str, int]


@dataclass(frozen=True)
class Dataset:
    documents: Tuple[Document, ...] = ()

    def __len__(self):
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)

    def by_id(self) -> Dict[str, Document]:
        return {d.doc_id: d for d in self.documents}

    def target_keys(self) -> List[MentionKey]:
        return [(d.doc_id, i) for d in self.documents for i, _ in d.targets()]


def _require(obj, key, kind, line_no, path, optional=False, default=None):
    if key not in obj or obj[key] is None:
        if optional:
            return default
        raise SchemaError("missing required value", line_no, path + key)
    value = obj[key]
    if kind is int:
        ok = isinstance(value, int) and not isinstance(value, bool)
    elif kind is float:
        ok = isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)
        value = float(value) if ok else value
    else:
        ok = isinstance(value, kind)
    if not ok:
        raise SchemaError(f"expected {kind.__name__}, got {value!r}", line_no, path + key)
    return value


def _parse_candidate(raw, line_no, path):
    if not isinstance(raw, dict):
        raise SchemaError("candidate must be an object", line_no, path.rstrip("."))
    entity = _require(raw, "entity", int, line_no, path)
    if entity < 0:
        raise SchemaError(f"entity id must be non-negative, got {entity}", line_no, path + "entity")
    prior = _require(raw, "prior", float, line_no, path, optional=True)
    score = _require(raw, "input_score", float, line_no, path, optional=True)
    return Candidate(entity, prior, score)


def _parse_types(raw, line_no, path):
    preds = []
    for j, item in enumerate(raw):
        where = f"{path}[{j}]"
        if not isinstance(item, (list, tuple)) or len(item) != 2:
            raise SchemaError("type prediction must be a [label, confidence] pair", line_no, where)
        label, conf = item
        if not isinstance(label, str):
            raise SchemaError("type label must be a string", line_no, where)
        if isinstance(conf, bool) or not isinstance(conf, (int, float)) or not 0.0 <= conf <= 1.0:
            raise SchemaError(f"confidence must be a number in [0, 1], got {conf!r}", line_no, where)
        if preds and conf > preds[-1][1]:
            raise SchemaError("type predictions must be sorted by descending confidence", line_no, where)
        preds.append((label, float(conf)))
    return tuple(preds)


def _parse_mention(raw, line_no, path):
    if not isinstance(raw, dict):
        raise SchemaError("mention must be an object", line_no, path.rstrip("."))
    start = _require(raw, "start", int, line_no, path)
    end = _require(raw, "end", int, line_no, path)
    surface = _require(raw, "surface", str, line_no, path)
    is_target = _require(raw, "is_target", bool, line_no, path, optional=True, default=False)
    gold = _require(raw, "gold", int, line_no, path, optional=True)
    types = _require(raw, "type_predictions", list, line_no, path, optional=True, default=[])
    cands = _require(raw, "candidates", list, line_no, path)
    if is_target and gold is None:
        raise SchemaError("target mention has no gold label", line_no, path + "gold")
    if is_target and not cands:
        raise SchemaError("target mention has no candidates", line_no, path + "candidates")
    return Mention(
        start=start,
        end=end,
        surface=surface,
        candidates=tuple(_parse_candidate(c, line_no, f"{path}candidates[{k}].") for k, c in enumerate(cands)),
        type_predictions=_parse_types(types, line_no, path + "type_predictions"),
        is_target=is_target,
        gold=gold,
    )


def parse_document(obj, line_no=None) -> Document:
    if not isinstance(obj, dict):
        raise SchemaError("document must be a JSON object", line_no)
    doc_id = _require(obj, "doc_id", str, line_no, "")
    mentions = _require(obj, "mentions", list, line_no, "")
    return Document(
        doc_id,
        tuple(_parse_mention(m, line_no, f"mentions[{i}].") for i, m in enumerate(mentions)),
    )


def load_dataset(path) -> Dataset:
    docs = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"invalid JSON: {exc.msg}", line_no) from None
            doc = parse_document(obj, line_no)
            if doc.doc_id in seen:
                raise SchemaError(f"duplicate doc_id {doc.doc_id!r}", line_no, "doc_id")
            seen.add(doc.doc_id)
            docs.append(doc)
    return Dataset(tuple(docs))


def document_to_json(doc: Document) -> dict:
    return {
        "doc_id": doc.doc_id,
        "mentions": [
            {
                "start": m.start,
                "end": m.end,
                "surface": m.surface,
                "is_target": m.is_target,
                "gold": m.gold,
                "type_predictions": [[label, conf] for label, conf in m.type_predictions],
                "candidates": [
                    {"entity": c.entity, "prior": c.prior, "input_score": c.input_score}
                    for c in m.candidates
                ],
            }
            for m in doc.mentions
        ],
    }


def save_dataset(dataset, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for doc in dataset:
            fh.write(json.dumps(document_to_json(doc), sort_keys=True) + "\n")


# --- predictions -------------------------------------------------------------


def read_predictions(path) -> Dict[MentionKey, Optional[int]]:
    """``doc_id<TAB>mention_index<TAB>entity_id``; entity ``-1`` is NIL (None)."""
    preds: Dict[MentionKey, Optional[int]] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 3:
                raise SchemaError(f"expected 3 columns, got {len(cols)}", line_no)
            try:
                index, entity = int(cols[1]), int(cols[2])
            except ValueError:
                raise SchemaError("mention_index and entity_id must be integers", line_no) from None
            key = (cols[0], index)
            if key in preds:
                raise SchemaError(f"duplicate prediction for {key}", line_no)
            preds[key] = None if entity == NIL else entity
    return preds


def format_predictions(preds: Dict[MentionKey, Optional[int]]) -> str:
    lines = []
    for (doc_id, index) in sorted(preds):
        entity = preds[(doc_id, index)]
        lines.append(f"{doc_id}\t{index}\t{NIL if entity is None else entity}\n")
    return "".join(lines)


def write_predictions(preds, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_predictions(preds))
