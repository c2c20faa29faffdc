"""Input records: documents, mentions and their candidate entities."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple


@dataclass(frozen=True)
class Candidate:
    entity: int
    prior: Optional[float] = None
    input_score: Optional[float] = None


@dataclass(frozen=True)
class Mention:
    start: int
    end: int
    surface: str
    candidates: Tuple[Candidate, ...] = ()
    # (label, confidence) pairs, highest confidence first
    type_predictions: Tuple[Tuple[str, float], ...] = ()
    is_target: bool = False
    gold: Optional[int] = None


@dataclass(frozen=True)
class Document:
    doc_id: str
    mentions: Tuple[Mention, ...] = field(default_factory=tuple)

    def targets(self) -> List[Tuple[int, Mention]]:
        return [(i, m) for i, m in enumerate(self.mentions) if m.is_target]
