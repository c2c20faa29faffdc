"""Pipeline configuration and its layered loading (defaults < file < flags)."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .errors import ConfigurationError
from .relatedness import Aggregation, Measure
from .scoring import CombinationWeights, Fallback
from .typefilter import FilterConfig


@dataclass(frozen=True)
class PipelineConfig:
    """Everything that changes a disambiguation run.

    The defaults are the tuned setup: coherence weight 0.7, top-3 type
    filter with threshold 1, Milne-Witten relatedness, max aggregation.
    """

    weights: CombinationWeights = field(default_factory=CombinationWeights)
    filter: FilterConfig = field(default_factory=FilterConfig)
    measure: Measure = Measure.MILNE_WITTEN
    aggregation: Aggregation = Aggregation.MAX
    fallback: Fallback = Fallback.PRIOR
    parallelism: int = 1

    def __post_init__(self):
        object.__setattr__(self, "measure", Measure(self.measure))
        object.__setattr__(self, "aggregation", Aggregation(self.aggregation))
        object.__setattr__(self, "fallback", Fallback(self.fallback))
        if self.parallelism < 1:
            raise ConfigurationError(f"parallelism must be >= 1, got {self.parallelism}")

    def with_alpha(self, alpha: float) -> "PipelineConfig":
        return replace(self, weights=CombinationWeights.from_alpha(alpha))

    def with_threshold(self, t: float) -> "PipelineConfig":
        return replace(self, filter=replace(self.filter, t=t))


# keys accepted in a key=value config file
CONFIG_KEYS = (
    "alpha",
    "weights",
    "filter_threshold",
    "filter_k",
    "filter",
    "unknown_type_policy",
    "measure",
    "aggregation",
    "fallback",
    "parallelism",
)


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment line."""
    settings = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigurationError(f"{path}:{line_no}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in CONFIG_KEYS:
                raise ConfigurationError(f"{path}:{line_no}: unknown key {key!r}")
            settings[key] = value
    return settings


def _as_bool(value) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise ConfigurationError(f"not a boolean: {value!r}")


def build_config(settings: dict, base: PipelineConfig = None) -> PipelineConfig:
    """Apply string-or-typed ``settings`` on top of ``base``.

    ``weights`` wins over ``alpha`` when both are given.
    """
    cfg = base or PipelineConfig()
    try:
        if settings.get("alpha") is not None:
            cfg = cfg.with_alpha(float(settings["alpha"]))
        if settings.get("weights") is not None:
            w = settings["weights"]
            if not isinstance(w, CombinationWeights):
                w = CombinationWeights.parse(str(w))
            cfg = replace(cfg, weights=w)
        flt = cfg.filter
        if settings.get("filter_threshold") is not None:
            flt = replace(flt, t=float(settings["filter_threshold"]))
        if settings.get("filter_k") is not None:
            flt = replace(flt, k=int(settings["filter_k"]))
        if settings.get("filter") is not None:
            flt = replace(flt, enabled=_as_bool(settings["filter"]))
        if settings.get("unknown_type_policy") is not None:
            flt = replace(flt, unknown_type_policy=settings["unknown_type_policy"])
        cfg = replace(cfg, filter=flt)
        for key in ("measure", "aggregation", "fallback"):
            if settings.get(key) is not None:
                cfg = replace(cfg, **{key: settings[key]})
        if settings.get("parallelism") is not None:
            cfg = replace(cfg, parallelism=int(settings["parallelism"]))
    except ConfigurationError:
        raise
    except ValueError as exc:
        raise ConfigurationError(str(exc)) from None
    return cfg
