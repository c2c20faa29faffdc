"""Iterative collective disambiguation of the mentions of one document.

The least ambiguous mention (fewest candidates after type filtering) is
resolved first from its input scores alone. Every later step takes the least
ambiguous remaining mention and picks the candidate with the best weighted
mix of aggregated relatedness to the already resolved entities, input score
and prior.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Mapping, Optional, Sequence

from .config import PipelineConfig
from .errors import ContractViolation
from .linkgraph import LinkGraph
from .model import Candidate, Document, Mention
from .relatedness import PairCache, aggregate, pairwise
from .scoring import combine, input_scores_for, prior_term
from .typefilter import filter_candidates, predicted_type_set


@dataclass(frozen=True)
class ScoreBreakdown:
    coherence: Optional[float]  # None for the seed
    input: float
    prior: float
    final: float


@dataclass(frozen=True)
class Assignment:
    mention_index: int
    entity: int
    is_seed: bool
    step: int
    score_breakdown: ScoreBreakdown


@dataclass(frozen=True)
class PreparedMention:
    """A mention after filtering, with scores aligned to ``candidates``."""

    index: int
    start: int
    candidates: tuple
    input_scores: tuple

    @property
    def n_candidates(self):
        return len(self.candidates)


class IceState:
    """Unresolved mentions (``todo``) and resolutions in order (``answered``)."""

    def __init__(self, mentions: Sequence[PreparedMention]):
        self.todo = list(mentions)
        self.answered: list = []

    def pop_least_ambiguous(self) -> PreparedMention:
        chosen = find_least_ambiguous(self.todo)
        self.todo.remove(chosen)
        return chosen

    def answer(self, mention: PreparedMention, entity: int):
        self.answered.append((mention.index, entity))

    def answered_entities(self) -> list:
        return [e for _, e in self.answered]


def _prior_rank(c: Candidate) -> float:
    return -1.0 if c.prior is None else c.prior


def prepare_mention(
    mention: Mention, index: int, type_of: Mapping[int, Optional[str]], cfg: PipelineConfig,
    doc_id: str = "",
) -> PreparedMention:
    if not mention.candidates:
        raise ContractViolation(f"mention {doc_id}#{index} ({mention.surface!r}) has no candidates")
    if cfg.filter.active:
        predicted = predicted_type_set(mention.type_predictions, cfg.filter)
        cands = filter_candidates(mention.candidates, type_of, predicted, cfg.filter)
    else:
        cands = list(mention.candidates)
    scores = input_scores_for(cands, cfg.fallback, mention_name=f"mention {doc_id}#{index}")
    return PreparedMention(index, mention.start, tuple(cands), tuple(scores))


def find_least_ambiguous(todo: Sequence[PreparedMention]) -> PreparedMention:
    """Fewest candidates; ties go to the earliest span start, then input order."""
    if not todo:
        raise ContractViolation("find_least_ambiguous called with no unresolved mentions")
    return min(todo, key=lambda m: (m.n_candidates, m.start, m.index))


def _seed_position(pm: PreparedMention) -> int:
    return max(
        range(pm.n_candidates),
        key=lambda i: (pm.input_scores[i], _prior_rank(pm.candidates[i]), -pm.candidates[i].entity),
    )


def disamb_seed(pm: PreparedMention) -> int:
    """Best input score; ties go to the higher prior, then the lower entity id."""
    return pm.candidates[_seed_position(pm)].entity


def aggr_rel(
    candidate: int,
    answered: Sequence[int],
    graph: LinkGraph,
    measure,
    mode,
    cache: Optional[PairCache] = None,
) -> float:
    if not answered:
        raise ContractViolation("aggregated relatedness needs at least one resolved entity")
    return aggregate(pairwise(graph, measure, candidate, answered, cache), mode)


def _step_choice(pm, anchors, graph, cfg, cache):
    best_key = None
    best = None
    for i, cand in enumerate(pm.candidates):
        coherence = aggr_rel(cand.entity, anchors, graph, cfg.measure, cfg.aggregation, cache)
        prior = prior_term(cand)
        final = combine(coherence, pm.input_scores[i], prior, cfg.weights)
        key = (final, pm.input_scores[i], _prior_rank(cand), -cand.entity)
        if best_key is None or key > best_key:
            best_key = key
            best = (cand.entity, ScoreBreakdown(coherence, pm.input_scores[i], prior, final))
    return best


def disambiguate_document(
    doc: Document,
    graph: LinkGraph,
    type_dict: Optional[Mapping[int, Optional[str]]] = None,
    cfg: Optional[PipelineConfig] = None,
    cache: Optional[PairCache] = None,
) -> List[Assignment]:
    """Resolve every mention of ``doc``; results are ordered by mention index.

    ``type_dict`` defaults to the NER types stored in the graph metadata.
    Mentions without any candidate cannot be resolved and are skipped.
    """
    cfg = cfg or PipelineConfig()
    if type_dict is None:
        type_dict = graph.type_dict()
    prepared = [
        prepare_mention(m, i, type_dict, cfg, doc.doc_id)
        for i, m in enumerate(doc.mentions)
        if m.candidates
    ]
    if not prepared:
        return []
    state = IceState(prepared)
    out = []

    seed = state.pop_least_ambiguous()
    pos = _seed_position(seed)
    cand = seed.candidates[pos]
    score = seed.input_scores[pos]
    state.answer(seed, cand.entity)
    out.append(Assignment(seed.index, cand.entity, True, 1, ScoreBreakdown(None, score, prior_term(cand), score)))

    while state.todo:
        pm = state.pop_least_ambiguous()
        # anchors are frozen for the whole step
        entity, breakdown = _step_choice(pm, state.answered_entities(), graph, cfg, cache)
        state.answer(pm, entity)
        out.append(Assignment(pm.index, entity, False, len(state.answered), breakdown))

    out.sort(key=lambda a: a.mention_index)
    return out


def input_argmax(doc: Document, type_dict=None, cfg: Optional[PipelineConfig] = None, graph=None) -> dict:
    """Mention index -> choice from input scores alone, ignoring other mentions."""
    cfg = cfg or PipelineConfig()
    if type_dict is None:
        type_dict = graph.type_dict() if graph is not None else {}
    return {
        i: disamb_seed(prepare_mention(m, i, type_dict, cfg, doc.doc_id))
        for i, m in enumerate(doc.mentions)
        if m.candidates
    }


TRACE_HEADER = "doc_id\tstep\tmention_index\tentity\tis_seed\tcoherence\tinput\tprior\tfinal"


def _fmt(x):
    return "" if x is None else repr(float(x))


def trace_lines(doc_id: str, assignments: Sequence[Assignment]) -> List[str]:
    rows = []
    for a in sorted(assignments, key=lambda a: a.step):
        b = a.score_breakdown
        rows.append(
            "\t".join(
                [doc_id, str(a.step), str(a.mention_index), str(a.entity), str(int(a.is_seed)),
                 _fmt(b.coherence), _fmt(b.input), _fmt(b.prior), _fmt(b.final)]
            )
        )
    return rows
