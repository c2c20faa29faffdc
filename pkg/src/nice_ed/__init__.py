"""Type-filtered iterative collective entity disambiguation over a link graph."""

from .config import PipelineConfig
from .dataset import Dataset, load_dataset
from .errors import NiceError
from .ice import Assignment, disambiguate_document
from .linkgraph import LinkGraph, build_graph, load_snapshot, save_snapshot
from .model import Candidate, Document, Mention
from .relatedness import Aggregation, Measure, PairCache
from .scoring import CombinationWeights

__all__ = [
    "Aggregation",
    "Assignment",
    "Candidate",
    "CombinationWeights",
    "Dataset",
    "Document",
    "LinkGraph",
    "Measure",
    "Mention",
    "NiceError",
    "PairCache",
    "PipelineConfig",
    "build_graph",
    "disambiguate_document",
    "load_dataset",
    "load_snapshot",
    "save_snapshot",
]
