"""Micro-F1 scoring, grid-search tuning and Top/Shadow overshadowing analysis."""

from __future__ import annotations

import csv
import io
import itertools
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

from .config import PipelineConfig
from .dataset import Dataset, MentionKey
from .errors import ContractViolation, DataValidationError
from .pipeline import predictions_from, run_corpus
from .relatedness import Aggregation, Measure, PairCache
from .scoring import CombinationWeights
from .typefilter import DISABLED_THRESHOLD


@dataclass(frozen=True)
class EvalReport:
    n_gold: int
    n_predicted: int
    n_correct: int
    micro_precision: float
    micro_recall: float
    micro_f1: float

    def to_dict(self):
        return asdict(self)

    def to_text(self) -> str:
        rows = [
            ("gold mentions", str(self.n_gold)),
            ("predicted", str(self.n_predicted)),
            ("correct", str(self.n_correct)),
            ("micro precision", f"{self.micro_precision:.4f}"),
            ("micro recall", f"{self.micro_recall:.4f}"),
            ("micro F1", f"{self.micro_f1:.4f}"),
        ]
        width = max(len(name) for name, _ in rows)
        return "\n".join(f"{name:<{width}}  {value:>8}" for name, value in rows)


def micro_f1(predictions: Dict[MentionKey, Optional[int]], dataset: Dataset) -> EvalReport:
    """Pool all target mentions; ``None`` predictions count as NIL.

    Predictions on auxiliary (non-target) mentions are accepted and ignored.
    """
    docs = dataset.by_id()
    for doc_id, index in predictions:
        doc = docs.get(doc_id)
        if doc is None or not 0 <= index < len(doc.mentions):
            raise DataValidationError(f"prediction for unknown mention {doc_id}#{index}")

    n_gold = n_pred = n_correct = 0
    for doc_id, index in dataset.target_keys():
        n_gold += 1
        pred = predictions.get((doc_id, index))
        if pred is None:
            continue
        n_pred += 1
        if pred == docs[doc_id].mentions[index].gold:
            n_correct += 1

    p = n_correct / n_pred if n_pred else 0.0
    r = n_correct / n_gold if n_gold else 0.0
    f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return EvalReport(n_gold, n_pred, n_correct, p, r, f1)


def evaluate_config(dataset: Dataset, graph, type_dict, cfg: PipelineConfig, cache=None) -> EvalReport:
    results = run_corpus(dataset.documents, graph, type_dict, cfg, cache)
    return micro_f1(predictions_from(dataset.documents, results), dataset)


# --- grid search -------------------------------------------------------------


def _steps(lo_tenths, hi_tenths):
    return [round(i / 10, 1) for i in range(lo_tenths, hi_tenths + 1)]


@dataclass(frozen=True)
class SweepGrid:
    """Parameter axes; cells are enumerated alpha-major, aggregation-minor.

    A threshold of -1 means the type filter is switched off.
    """

    alphas: Tuple[float, ...] = tuple(_steps(0, 10))
    thresholds: Tuple[float, ...] = (DISABLED_THRESHOLD,) + tuple(_steps(5, 10))
    measures: Tuple[Measure, ...] = tuple(Measure)
    aggregations: Tuple[Aggregation, ...] = tuple(Aggregation)

    def cells(self):
        return itertools.product(
            self.alphas, self.thresholds, [Measure(m) for m in self.measures],
            [Aggregation(a) for a in self.aggregations],
        )

    def __len__(self):
        return len(self.alphas) * len(self.thresholds) * len(self.measures) * len(self.aggregations)


@dataclass(frozen=True)
class SweepRow:
    alpha: float
    threshold: float
    measure: Measure
    aggregation: Aggregation
    micro_f1: float


SWEEP_HEADER = ["alpha", "threshold", "measure", "aggregation", "micro_f1"]


def cell_config(base: PipelineConfig, alpha, threshold, measure, aggregation) -> PipelineConfig:
    return replace(
        base,
        weights=CombinationWeights.from_alpha(alpha),
        filter=replace(base.filter, t=threshold),
        measure=measure,
        aggregation=aggregation,
        parallelism=1,
    )


_SWEEP: dict = {}


def _init_sweep(dev, graph, type_dict, base):
    _SWEEP.update(dev=dev, graph=graph, type_dict=type_dict, base=base, cache=PairCache(graph))


def _score_cell(cell):
    cfg = cell_config(_SWEEP["base"], *cell)
    return evaluate_config(_SWEEP["dev"], _SWEEP["graph"], _SWEEP["type_dict"], cfg, _SWEEP["cache"]).micro_f1


def grid_search(
    dev: Dataset,
    grid: SweepGrid,
    graph,
    type_dict=None,
    base: Optional[PipelineConfig] = None,
    parallelism: int = 1,
) -> Tuple[PipelineConfig, List[SweepRow]]:
    """Score every grid cell on ``dev``; return the best config and all rows.

    The first cell in enumeration order wins ties.
    """
    if len(dev) == 0:
        raise ContractViolation("grid search needs a non-empty development set")
    if len(grid) == 0:
        raise ContractViolation("grid search needs at least one grid cell")
    base = base or PipelineConfig()
    if type_dict is None:
        type_dict = graph.type_dict()
    cells = list(grid.cells())
    if parallelism > 1:
        chunk = max(1, len(cells) // (parallelism * 4))
        with ProcessPoolExecutor(parallelism, initializer=_init_sweep,
                                 initargs=(dev, graph, type_dict, base)) as ex:
            scores = list(ex.map(_score_cell, cells, chunksize=chunk))
    else:
        _init_sweep(dev, graph, type_dict, base)
        try:
            scores = [_score_cell(c) for c in cells]
        finally:
            _SWEEP.clear()

    rows = [SweepRow(*cell, score) for cell, score in zip(cells, scores)]
    best = max(range(len(rows)), key=lambda i: (rows[i].micro_f1, -i))
    b = rows[best]
    return cell_config(base, b.alpha, b.threshold, b.measure, b.aggregation), rows


def _num(x: float) -> str:
    return format(float(x), "g")


def sweep_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for r in rows:
        writer.writerow([_num(r.alpha), _num(r.threshold), r.measure.value, r.aggregation.value, repr(r.micro_f1)])
    return buf.getvalue()


# --- overshadowing -----------------------------------------------------------

OVERSHADOW_COLUMNS = (
    "pred(top) != pred(shadow), %",
    "pred(top) is correct, %",
    "pred(shadow) is correct, %",
)


@dataclass(frozen=True)
class OvershadowReport:
    n_pairs: int
    pct_pred_differs: float
    pct_top_correct: float
    pct_shadow_correct: float
    pairs: Tuple[Tuple[MentionKey, MentionKey], ...] = field(default=(), compare=False, repr=False)

    def to_dict(self):
        return {
            "n_pairs": self.n_pairs,
            OVERSHADOW_COLUMNS[0]: self.pct_pred_differs,
            OVERSHADOW_COLUMNS[1]: self.pct_top_correct,
            OVERSHADOW_COLUMNS[2]: self.pct_shadow_correct,
        }

    def to_text(self, label="system") -> str:
        head = ["", *OVERSHADOW_COLUMNS]
        row = [label, f"{self.pct_pred_differs:.1f}", f"{self.pct_top_correct:.1f}",
               f"{self.pct_shadow_correct:.1f}"]
        widths = [max(len(a), len(b)) for a, b in zip(head, row)]

        def fmt(cells):
            return "  ".join(c.rjust(w) if i else c.ljust(w) for i, (c, w) in enumerate(zip(cells, widths)))

        return f"{fmt(head)}\n{fmt(row)}\npairs: {self.n_pairs}"


def _targets_by_surface(dataset: Dataset) -> Dict[str, List[Tuple[MentionKey, Optional[int]]]]:
    groups = defaultdict(list)
    for doc in dataset:
        for i, m in doc.targets():
            groups[m.surface].append(((doc.doc_id, i), m.gold))
    for entries in groups.values():
        entries.sort(key=lambda e: e[0])
    return groups


def pair_entries(dataset_top: Dataset, dataset_shadow: Dataset):
    """Match Top and Shadow target mentions sharing an exact surface form.

    Within one surface form, entries pair up in (doc_id, index) order;
    leftovers on either side are dropped.
    """
    top = _targets_by_surface(dataset_top)
    shadow = _targets_by_surface(dataset_shadow)
    pairs = []
    for surface in sorted(top.keys() & shadow.keys()):
        pairs.extend(zip(top[surface], shadow[surface]))
    return pairs


def overshadow_analysis(preds_top, preds_shadow, dataset_top: Dataset, dataset_shadow: Dataset) -> OvershadowReport:
    pairs = pair_entries(dataset_top, dataset_shadow)
    if not pairs:
        raise DataValidationError("no Top/Shadow entries share a surface form; analysis is undefined")
    differs = top_ok = shadow_ok = 0
    for (tkey, tgold), (skey, sgold) in pairs:
        tp, sp = preds_top.get(tkey), preds_shadow.get(skey)
        differs += tp != sp
        top_ok += tp is not None and tp == tgold
        shadow_ok += sp is not None and sp == sgold
    n = len(pairs)
    return OvershadowReport(
        n, 100.0 * differs / n, 100.0 * top_ok / n, 100.0 * shadow_ok / n,
        pairs=tuple((t[0], s[0]) for t, s in pairs),
    )
