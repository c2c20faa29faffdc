import random

import pytest

from nice_ed.config import PipelineConfig
from nice_ed.errors import ContractViolation
from nice_ed.ice import (
    PreparedMention,
    aggr_rel,
    disamb_seed,
    disambiguate_document,
    find_least_ambiguous,
    input_argmax,
    trace_lines,
)
from nice_ed.linkgraph import build_graph
from nice_ed.model import Candidate, Document, Mention
from nice_ed.relatedness import Aggregation, Measure, PairCache, milne_witten
from nice_ed.scoring import CombinationWeights
from nice_ed.typefilter import FilterConfig

from reference_ice import reference_ice
from synthetic import random_oracle_case

A1, B1, B2 = 100, 101, 102


@pytest.fixture
def trace_graph():
    # W = 64, |L_a1| = |L_b1| = 2 sharing one page: d = ln 2 / ln 32 = 0.2
    edges = [(1, A1), (2, A1), (2, B1), (3, B1)]
    # b2 has 22 inlinks, one shared with a1: d = ln 22 / ln 32
    edges += [(1, B2)] + [(p, B2) for p in range(10, 31)]
    return build_graph(edges, total_pages_override=64)


@pytest.fixture
def trace_doc():
    return Document("toy", (
        Mention(0, 1, "A", (Candidate(A1, input_score=0.4),)),
        Mention(5, 6, "B", (Candidate(B1, input_score=0.2), Candidate(B2, input_score=0.6)), is_target=True, gold=B1),
    ))


def test_hand_trace(trace_graph, trace_doc):
    assert milne_witten(trace_graph, B1, A1) == pytest.approx(0.8)
    mw_b2 = milne_witten(trace_graph, B2, A1)
    assert mw_b2 == pytest.approx(0.1, abs=0.01)

    out = disambiguate_document(trace_doc, trace_graph, {}, PipelineConfig())
    seed, b = out
    assert seed.is_seed and seed.entity == A1 and seed.step == 1
    assert seed.score_breakdown.coherence is None
    assert b.entity == B1 and b.step == 2 and not b.is_seed
    assert b.score_breakdown.final == pytest.approx(0.7 * 0.8 + 0.3 * 0.0)  # 0.56
    assert b.score_breakdown.coherence == pytest.approx(0.8)
    # the losing candidate would have scored 0.7 * ~0.1 + 0.3 * 1.0, about 0.37
    assert 0.7 * mw_b2 + 0.3 * 1.0 == pytest.approx(0.37, abs=0.01)


def test_single_mention_reduces_to_seed(trace_graph):
    doc = Document("one", (Mention(0, 1, "B", (Candidate(B1, input_score=0.2), Candidate(B2, input_score=0.6))),))
    (a,) = disambiguate_document(doc, trace_graph, {}, PipelineConfig())
    assert a.entity == B2 and a.is_seed


def test_empty_document():
    assert disambiguate_document(Document("x"), build_graph([(1, 2)])) == []


def _pm(index, start, n, scores=None, priors=None):
    cands = tuple(Candidate(10 + j, None if priors is None else priors[j]) for j in range(n))
    return PreparedMention(index, start, cands, tuple(scores or [0.5] * n))


def test_find_least_ambiguous():
    assert find_least_ambiguous([_pm(0, 0, 3), _pm(1, 0, 1), _pm(2, 0, 2)]).index == 1
    assert find_least_ambiguous([_pm(0, 10, 2), _pm(1, 4, 2)]).index == 1
    assert find_least_ambiguous([_pm(0, 4, 2), _pm(1, 4, 2)]).index == 0
    assert find_least_ambiguous([_pm(0, 7, 5)]).index == 0
    with pytest.raises(ContractViolation):
        find_least_ambiguous([])


def test_disamb_seed_ties():
    assert disamb_seed(_pm(0, 0, 2, [0.2, 0.9])) == 11
    assert disamb_seed(_pm(0, 0, 1)) == 10
    assert disamb_seed(_pm(0, 0, 2, [0.5, 0.5], [0.8, 0.1])) == 10
    assert disamb_seed(_pm(0, 0, 2, [0.5, 0.5], [0.1, 0.8])) == 11
    # full tie: lower entity id
    assert disamb_seed(_pm(0, 0, 3, [0.5, 0.5, 0.5])) == 10


def test_aggr_rel(trace_graph):
    g = trace_graph
    mw_b2 = milne_witten(g, B2, A1)
    assert aggr_rel(A1, [B1, B2], g, "milne_witten", "max") == pytest.approx(0.8)
    assert aggr_rel(A1, [B1, B2], g, "milne_witten", "min") == pytest.approx(mw_b2)
    assert aggr_rel(A1, [B1, B2], g, "milne_witten", "avg") == pytest.approx((0.8 + mw_b2) / 2)
    assert aggr_rel(A1, [A1], g, Measure.MILNE_WITTEN, Aggregation.MAX) == 1.0
    with pytest.raises(ContractViolation):
        aggr_rel(A1, [], g, "milne_witten", "max")


def test_filtering_precedes_ambiguity_count():
    g = build_graph([(1, 10), (1, 11), (2, 12)], [(10, "a", "PER"), (11, "b", "LOC"), (12, "c", "PER")])
    doc = Document("f", (
        # 2 candidates before filtering, 1 after
        Mention(50, 51, "x", (Candidate(10, input_score=0.1), Candidate(11, input_score=0.9)), (("PER", 0.99),)),
        Mention(0, 1, "y", (Candidate(12, input_score=0.1), Candidate(10, input_score=0.9))),
    ))
    cfg = PipelineConfig(filter=FilterConfig(t=0.5))
    out = disambiguate_document(doc, g, None, cfg)
    assert out[0].is_seed and out[0].entity == 10


def test_answered_entities_may_repeat():
    g = build_graph([(1, 10), (2, 10)], total_pages_override=50)
    doc = Document("r", tuple(Mention(i, i + 1, "s", (Candidate(10, input_score=1.0),)) for i in range(3)))
    assert [a.entity for a in disambiguate_document(doc, g)] == [10, 10, 10]


def test_mentions_without_candidates_are_skipped(trace_graph):
    doc = Document("s", (Mention(0, 1, "none", ()), Mention(2, 3, "A", (Candidate(A1, input_score=1.0),))))
    out = disambiguate_document(doc, trace_graph)
    assert [(a.mention_index, a.entity) for a in out] == [(1, A1)]


def test_trace_lines(trace_graph, trace_doc):
    lines = trace_lines("toy", disambiguate_document(trace_doc, trace_graph))
    first = lines[0].split("\t")
    assert first[:5] == ["toy", "1", "0", str(A1), "1"]
    assert first[5] == ""
    assert lines[1].split("\t")[:5] == ["toy", "2", "1", str(B1), "0"]


def _check_against_reference(rng, cfg):
    graph, inlinks, types, doc, dicts = random_oracle_case(rng)
    got = {a.mention_index: a.entity for a in disambiguate_document(doc, graph, types, cfg, PairCache(graph))}
    want = reference_ice(dicts, inlinks, graph.total_pages, types, cfg.weights.a_coherence,
                         cfg.aggregation.value, cfg.filter.k, cfg.filter.t if cfg.filter.active else -1)
    assert got == want, (doc, cfg)


@pytest.mark.parametrize("seed", range(4))
def test_matches_reference_on_random_documents(seed):
    rng = random.Random(seed)
    for _ in range(100):
        cfg = PipelineConfig(
            weights=CombinationWeights.from_alpha(rng.choice([0.0, 0.3, 0.5, 0.7, 1.0])),
            filter=FilterConfig(t=rng.choice([-1.0, 0.5, 0.9, 1.0])),
            aggregation=rng.choice(list(Aggregation)),
        )
        _check_against_reference(rng, cfg)


@pytest.mark.parametrize("seed", range(3))
def test_zero_coherence_weight_is_input_argmax(seed):
    rng = random.Random(100 + seed)
    cfg = PipelineConfig(weights=CombinationWeights(0, 1, 0))
    for _ in range(100):
        graph, _, types, doc, _ = random_oracle_case(rng, max_mentions=5, max_candidates=4)
        got = {a.mention_index: a.entity for a in disambiguate_document(doc, graph, types, cfg)}
        assert got == input_argmax(doc, types, cfg)


def test_invariants_on_random_documents():
    rng = random.Random(5)
    for _ in range(200):
        graph, _, types, doc, _ = random_oracle_case(rng, max_mentions=6, max_candidates=4)
        out = disambiguate_document(doc, graph, types)
        assert len(out) == len(doc.mentions)
        assert sorted(a.step for a in out) == list(range(1, len(out) + 1))
        assert sum(a.is_seed for a in out) == 1
        for a in out:
            assert a.entity in {c.entity for c in doc.mentions[a.mention_index].candidates}
            assert 0.0 <= a.score_breakdown.final <= 1.0
        assert out == disambiguate_document(doc, graph, types)
