"""Run the disambiguation engine over many documents, optionally in parallel."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

from .config import PipelineConfig
from .ice import Assignment, disambiguate_document
from .linkgraph import LinkGraph
from .model import Document
from .relatedness import PairCache

# per-process worker context, set by _init_worker
_WORKER: dict = {}


def _init_worker(graph, type_dict, cfg):
    _WORKER["graph"] = graph
    _WORKER["type_dict"] = type_dict
    _WORKER["cfg"] = cfg
    _WORKER["cache"] = PairCache(graph)


def _run_one(doc):
    return disambiguate_document(doc, _WORKER["graph"], _WORKER["type_dict"], _WORKER["cfg"], _WORKER["cache"])


def run_corpus(
    docs: Sequence[Document],
    graph: LinkGraph,
    type_dict=None,
    cfg: Optional[PipelineConfig] = None,
    cache: Optional[PairCache] = None,
) -> Dict[str, List[Assignment]]:
    """doc_id -> assignments. Output does not depend on ``cfg.parallelism``."""
    cfg = cfg or PipelineConfig()
    if type_dict is None:
        type_dict = graph.type_dict()
    docs = list(docs)
    workers = min(cfg.parallelism, max(1, len(docs)))
    if workers <= 1:
        cache = cache if cache is not None else PairCache(graph)
        results = [disambiguate_document(d, graph, type_dict, cfg, cache) for d in docs]
    else:
        chunk = max(1, len(docs) // (workers * 4))
        with ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(graph, type_dict, cfg)) as ex:
            results = list(ex.map(_run_one, docs, chunksize=chunk))
    return {d.doc_id: r for d, r in zip(docs, results)}


def predictions_from(
    docs: Sequence[Document], results: Dict[str, List[Assignment]], all_mentions: bool = False
) -> Dict[Tuple[str, int], Optional[int]]:
    """Prediction map for target mentions (or every mention).

    A target mention the engine could not resolve is reported as NIL.
    """
    preds = {}
    for doc in docs:
        chosen = {a.mention_index: a.entity for a in results[doc.doc_id]}
        for i, m in enumerate(doc.mentions):
            if m.is_target or all_mentions:
                if i in chosen or m.is_target:
                    preds[(doc.doc_id, i)] = chosen.get(i)
    return preds
