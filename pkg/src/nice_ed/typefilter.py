"""NER-type based candidate filtering.

The mention's predicted type set is the top-1 label when the classifier is
confident enough, otherwise its top-k labels. Candidates whose known type
falls outside that set are dropped.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Set, Tuple

from .errors import ConfigurationError

DISABLED_THRESHOLD = -1.0


class UnknownTypePolicy(str, enum.Enum):
    KEEP = "keep"
    DROP = "drop"


@dataclass(frozen=True)
class FilterConfig:
    k: int = 3
    t: float = 1.0
    enabled: bool = True
    unknown_type_policy: UnknownTypePolicy = UnknownTypePolicy.KEEP
    # Only one policy exists: an emptied list falls back to the unfiltered one.
    empty_result_policy: str = "fallback_to_unfiltered"

    def __post_init__(self):
        if self.k < 1:
            raise ConfigurationError(f"filter k must be >= 1, got {self.k}")
        if self.t != DISABLED_THRESHOLD and not 0.0 <= self.t <= 1.0:
            raise ConfigurationError(f"filter threshold must be in [0, 1] or -1, got {self.t}")
        object.__setattr__(self, "unknown_type_policy", UnknownTypePolicy(self.unknown_type_policy))
        if self.empty_result_policy != "fallback_to_unfiltered":
            raise ConfigurationError(f"unknown empty_result_policy {self.empty_result_policy!r}")

    @property
    def active(self) -> bool:
        return self.enabled and self.t != DISABLED_THRESHOLD


def predicted_type_set(pred: Sequence[Tuple[str, float]], cfg: FilterConfig) -> Set[str]:
    """Labels a candidate's type must belong to.

    Confidence must be strictly above ``t`` for the top-1 shortcut, so with
    ``t = 1`` the top-k labels are always used.
    """
    if not pred:
        return set()
    if pred[0][1] > cfg.t:
        return {pred[0][0]}
    return {label for label, _ in pred[: cfg.k]}


def filter_candidates(
    candidates: Sequence,
    type_of: Mapping[int, Optional[str]],
    predicted: Set[str],
    cfg: FilterConfig,
) -> list:
    """Keep candidates whose type is in ``predicted``, preserving order.

    Returns the input unchanged when filtering is off, when there is no
    predicted type to match against, or when nothing would survive.
    """
    candidates = list(candidates)
    if not cfg.active or not predicted:
        return candidates
    keep_unknown = cfg.unknown_type_policy is UnknownTypePolicy.KEEP
    kept = []
    for cand in candidates:
        ner_type = type_of.get(cand.entity)
        if ner_type is None:
            if keep_unknown:
                kept.append(cand)
        elif ner_type in predicted:
            kept.append(cand)
    return kept if kept else candidates
