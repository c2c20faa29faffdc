"""Link-overlap relatedness between entities and its aggregation.

Every measure returns a score in [0, 1]. Degenerate inputs (unknown
entities, empty inlink sets, zero denominators) score 0 instead of raising,
so the disambiguation loop stays total over noisy candidate lists.
"""

from __future__ import annotations

import enum
import math
from typing import Callable, Dict, Iterable, Sequence

from .errors import ContractViolation
from .linkgraph import LinkGraph


class Measure(str, enum.Enum):
    MILNE_WITTEN = "milne_witten"
    JACCARD = "jaccard"
    PMI = "pmi"
    CONDITIONAL_PROBABILITY = "conditional_probability"


class Aggregation(str, enum.Enum):
    MAX = "max"
    MIN = "min"
    AVG = "avg"


def _clamp(x: float) -> float:
    return 0.0 if x < 0.0 else 1.0 if x > 1.0 else x


def milne_witten(g: LinkGraph, e1: int, e2: int) -> float:
    """``1 - d`` where ``d`` is the Milne-Witten link distance, clamped to [0, 1].

    ``d = log(max(|L1|,|L2|) / |L1 & L2|) / log(W / min(|L1|,|L2|))``
    """
    l1, l2 = g.inlink_set(e1), g.inlink_set(e2)
    if e1 == e2 and l1:
        return 1.0
    if not l1 or not l2:
        return 0.0
    overlap = len(l1 & l2)
    if overlap == 0:
        return 0.0
    n1, n2 = len(l1), len(l2)
    denom = math.log(g.total_pages / min(n1, n2))
    if denom <= 0.0:
        return 0.0
    distance = math.log(max(n1, n2) / overlap) / denom
    return _clamp(1.0 - distance)


def jaccard(g: LinkGraph, e1: int, e2: int) -> float:
    l1, l2 = g.inlink_set(e1), g.inlink_set(e2)
    union = len(l1 | l2)
    if union == 0:
        return 0.0
    return len(l1 & l2) / union


def pmi(g: LinkGraph, e1: int, e2: int) -> float:
    """Pointwise mutual information of the two inlink sets, divided by ``log W``.

    Negative association clamps to 0.
    """
    l1, l2 = g.inlink_set(e1), g.inlink_set(e2)
    if not l1 or not l2:
        return 0.0
    overlap = len(l1 & l2)
    if overlap == 0:
        return 0.0
    W = g.total_pages
    norm = math.log(W)
    if norm <= 0.0:
        return 0.0
    raw = math.log(overlap * W / (len(l1) * len(l2)))
    return _clamp(raw / norm)


def conditional_probability(g: LinkGraph, candidate: int, anchor: int) -> float:
    """Share of the candidate's inlinks that also link to ``anchor``.

    Directed: ``|L_cand & L_anchor| / |L_cand|``.
    """
    lc = g.inlink_set(candidate)
    if not lc:
        return 0.0
    return len(lc & g.inlink_set(anchor)) / len(lc)


MEASURES: Dict[Measure, Callable[[LinkGraph, int, int], float]] = {
    Measure.MILNE_WITTEN: milne_witten,
    Measure.JACCARD: jaccard,
    Measure.PMI: pmi,
    Measure.CONDITIONAL_PROBABILITY: conditional_probability,
}

# Measures whose value does not depend on argument order, bit for bit.
SYMMETRIC = frozenset({Measure.MILNE_WITTEN, Measure.JACCARD, Measure.PMI})


def relatedness(g: LinkGraph, measure, e1: int, e2: int) -> float:
    return MEASURES[Measure(measure)](g, e1, e2)


def aggregate(scores: Sequence[float], mode) -> float:
    if len(scores) == 0:
        raise ContractViolation("cannot aggregate an empty list of scores")
    mode = Aggregation(mode)
    if mode is Aggregation.MAX:
        return max(scores)
    if mode is Aggregation.MIN:
        return min(scores)
    return math.fsum(scores) / len(scores)


class PairCache:
    """Memo table for pairwise relatedness on one graph.

    Symmetric measures share one slot per unordered pair. Plain dict
    get/set is atomic under the GIL, so one cache may be shared by threads;
    process workers each build their own.
    """

    def __init__(self, graph: LinkGraph):
        self.graph = graph
        self._table: dict = {}
        self.hits = 0
        self.misses = 0

    def get(self, measure, e1: int, e2: int) -> float:
        measure = Measure(measure)
        if measure in SYMMETRIC and e2 < e1:
            e1, e2 = e2, e1
        key = (measure, e1, e2)
        value = self._table.get(key)
        if value is None:
            self.misses += 1
            value = MEASURES[measure](self.graph, e1, e2)
            self._table[key] = value
        else:
            self.hits += 1
        return value

    def __len__(self):
        return len(self._table)


def pairwise(g: LinkGraph, measure, candidate: int, anchors: Iterable[int], cache=None) -> list:
    if cache is not None:
        return [cache.get(measure, candidate, a) for a in anchors]
    fn = MEASURES[Measure(measure)]
    return [fn(g, candidate, a) for a in anchors]
