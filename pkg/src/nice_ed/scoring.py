"""Candidate input scores and the final weighted score."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import List, Sequence

from .errors import ConfigurationError, ContractViolation, DataValidationError

WEIGHT_TOL = 1e-9


class Fallback(str, enum.Enum):
    PRIOR = "prior"
    UNIFORM = "uniform"


@dataclass(frozen=True)
class CombinationWeights:
    """Weights of coherence, input score and prior; they must sum to 1."""

    a_coherence: float = 0.7
    a_input: float = 0.3
    a_prior: float = 0.0

    def __post_init__(self):
        ws = (self.a_coherence, self.a_input, self.a_prior)
        if any(not math.isfinite(w) or w < 0 for w in ws):
            raise ConfigurationError(f"weights must be finite and non-negative, got {ws}")
        if abs(math.fsum(ws) - 1.0) > WEIGHT_TOL:
            raise ConfigurationError(f"weights must sum to 1, got {ws} (sum {math.fsum(ws)})")

    @classmethod
    def from_alpha(cls, alpha: float) -> "CombinationWeights":
        return cls(alpha, 1.0 - alpha, 0.0)

    @classmethod
    def parse(cls, text: str) -> "CombinationWeights":
        parts = [p.strip() for p in text.split(",")]
        if len(parts) not in (2, 3):
            raise ConfigurationError(f"expected 'a,b' or 'a,b,c' weights, got {text!r}")
        try:
            values = [float(p) for p in parts]
        except ValueError:
            raise ConfigurationError(f"non-numeric weight in {text!r}") from None
        return cls(*values)

    def as_tuple(self):
        return (self.a_coherence, self.a_input, self.a_prior)


def normalize_scores(raw: Sequence[float]) -> List[float]:
    """Per-mention min-max scaling; a constant vector maps to all 0.5."""
    if len(raw) == 0:
        raise ContractViolation("cannot normalize an empty score list")
    if any(not math.isfinite(x) for x in raw):
        raise ContractViolation(f"non-finite score in {list(raw)}")
    lo, hi = min(raw), max(raw)
    if hi == lo:
        return [0.5] * len(raw)
    span = hi - lo
    return [(x - lo) / span for x in raw]


def combine(coherence: float, input_score: float, prior: float, w: CombinationWeights) -> float:
    total = w.a_coherence * coherence + w.a_input * input_score + w.a_prior * prior
    # weights may sum to 1 +- 1e-9
    return 0.0 if total < 0.0 else 1.0 if total > 1.0 else total


def input_scores_for(candidates: Sequence, fallback=Fallback.PRIOR, mention_name="mention") -> List[float]:
    """Normalized input scores aligned with ``candidates``.

    Uses the candidates' own input scores when all of them carry one. Else
    falls back to normalized priors (if requested and all present), else to a
    uniform 0.5.
    """
    if not candidates:
        raise ContractViolation(f"{mention_name} has no candidates")
    scored = [c.input_score is not None for c in candidates]
    if all(scored):
        return normalize_scores([c.input_score for c in candidates])
    if any(scored):
        raise DataValidationError(
            f"{mention_name}: input_score present on {sum(scored)} of {len(scored)} candidates"
        )
    if Fallback(fallback) is Fallback.PRIOR and all(c.prior is not None for c in candidates):
        return normalize_scores([c.prior for c in candidates])
    return [0.5] * len(candidates)


def prior_term(candidate) -> float:
    """Raw prior clipped to [0, 1]; a missing prior contributes nothing."""
    p = candidate.prior
    if p is None:
        return 0.0
    return 0.0 if p < 0.0 else 1.0 if p > 1.0 else p
