"""Pipeline configuration: YAML schema, defaults, and aggregated validation.

The config file is a single YAML document; every tunable the stages use
lives here (the stage code has no hard-coded analysis constants).  See
README for the documented schema.  ``validate_config`` collects every
violation instead of failing on the first.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from pathlib import Path

import yaml

from .errors import ConfigError
from .textnet import REMOVE_AFTER, REMOVE_BEFORE
from .community import ALGORITHMS

KCORE_RULES = ("below-median", "at-least")


@dataclass(frozen=True)
class PipelineConfig:
    # inputs
    catalog: Path
    interactions: Path
    stopwords: str = "builtin"
    delimiter: str = ","
    column_map: dict = field(default_factory=dict)
    # run identity
    seed: int | None = None
    output_dir: Path = Path("out")
    workers: int = 1
    # sampling
    confidence: float = 0.85
    margin_of_error: float = 0.2
    min_genre_count: int = 100
    excluded_genres: frozenset = frozenset()
    # item network
    tau: float = 0.75
    drop_isolated: bool = False
    user_projection: bool = False
    # text
    stopword_mode: str = REMOVE_AFTER
    threshold_rule: str = "manual"
    threshold_value: int = 20
    plateau_window: int = 3
    plateau_tol: float = 0.05
    sweep_min: int = 1
    sweep_max: int = 50
    # clustering
    algorithms: tuple = ALGORITHMS
    weighted_cluster_graph: bool = True
    # stats
    kcore_rule: str = "below-median"
    kcore_at_least: int = 0
    clique_time_budget_s: float = 10.0
    # ergm
    ergm_terms: tuple | str = "all"
    gof_nsim: int = 100
    export_design: bool = False

    def rule_tuple(self):
        if self.threshold_rule == "manual":
            return ("manual", self.threshold_value)
        return ("plateau", self.plateau_window, self.plateau_tol)

    def kcore_rule_tuple(self):
        if self.kcore_rule == "below-median":
            return ("below-median",)
        return ("at-least", self.kcore_at_least)

    def echo(self) -> dict:
        """JSON-friendly view for the run report."""
        out = {}
        for name, value in self.__dict__.items():
            if isinstance(value, Path):
                out[name] = str(value)
            elif isinstance(value, frozenset):
                out[name] = sorted(value)
            elif isinstance(value, tuple):
                out[name] = list(value)
            else:
                out[name] = value
        return out


_SECTIONS = {
    "inputs": ("catalog", "interactions", "stopwords", "delimiter", "column_map"),
    "sampling": ("confidence", "margin_of_error", "min_genre_count", "excluded_genres"),
    "network": ("tau", "drop_isolated", "user_projection"),
    "text": ("stopword_mode", "threshold_rule", "threshold_value",
             "plateau_window", "plateau_tol", "sweep_min", "sweep_max"),
    "cluster": ("algorithms", "weighted_cluster_graph"),
    "stats": ("kcore_rule", "kcore_at_least", "clique_time_budget_s"),
    "ergm": ("ergm_terms", "gof_nsim", "export_design"),
}
_TOP_LEVEL = ("seed", "output_dir", "workers")


def _flatten(raw: dict, problems: list[str]) -> dict:
    flat: dict = {}
    known_sections = set(_SECTIONS)
    for key, value in raw.items():
        if key in known_sections:
            if not isinstance(value, dict):
                problems.append(f"section {key!r} must be a mapping")
                continue
            allowed = _SECTIONS[key]
            for k, v in value.items():
                if k not in allowed:
                    problems.append(f"unknown field {key}.{k}")
                else:
                    flat[k] = v
        elif key in _TOP_LEVEL:
            flat[key] = value
        else:
            problems.append(f"unknown top-level field {key!r}")
    return flat


def validate_config(path, overrides: dict | None = None) -> PipelineConfig:
    """Parse + validate; raises ConfigError listing every violation found."""
    problems: list[str] = []
    path = Path(path)
    if not path.exists():
        raise ConfigError([f"config file {path} does not exist"])
    try:
        raw = yaml.safe_load(path.read_text("utf-8")) or {}
    except yaml.YAMLError as exc:
        raise ConfigError([f"config is not valid YAML: {exc}"]) from None
    if not isinstance(raw, dict):
        raise ConfigError(["config root must be a mapping"])

    flat = _flatten(raw, problems)
    flat.update(overrides or {})

    for req in ("catalog", "interactions"):
        if req not in flat:
            problems.append(f"inputs.{req} is required")
    if flat.get("seed") is None:
        problems.append("seed is required")
    elif not isinstance(flat["seed"], int) or isinstance(flat["seed"], bool):
        problems.append(f"seed must be an integer, got {flat['seed']!r}")

    def check(name, ok, message):
        if name in flat and not ok(flat[name]):
            problems.append(message.format(value=flat[name]))

    check("confidence", lambda v: isinstance(v, (int, float)) and 0 < v < 1,
          "sampling.confidence {value!r} outside (0, 1)")
    check("margin_of_error", lambda v: isinstance(v, (int, float)) and v > 0,
          "sampling.margin_of_error {value!r} must be > 0")
    check("min_genre_count", lambda v: isinstance(v, int) and v >= 0,
          "sampling.min_genre_count {value!r} must be a nonnegative integer")
    check("tau", lambda v: isinstance(v, (int, float)) and 0 < v <= 1,
          "network.tau {value!r} outside (0, 1]")
    check("stopword_mode", lambda v: v in (REMOVE_AFTER, REMOVE_BEFORE),
          "text.stopword_mode {value!r} not one of remove-after, remove-before")
    check("threshold_rule", lambda v: v in ("manual", "plateau"),
          "text.threshold_rule {value!r} not one of manual, plateau")
    check("threshold_value", lambda v: isinstance(v, int) and v >= 1,
          "text.threshold_value {value!r} must be an integer >= 1")
    check("plateau_window", lambda v: isinstance(v, int) and v >= 1,
          "text.plateau_window {value!r} must be an integer >= 1")
    check("plateau_tol", lambda v: isinstance(v, (int, float)) and v > 0,
          "text.plateau_tol {value!r} must be > 0")
    check("sweep_min", lambda v: isinstance(v, int) and v >= 1,
          "text.sweep_min {value!r} must be an integer >= 1")
    check("sweep_max", lambda v: isinstance(v, int) and v >= 1,
          "text.sweep_max {value!r} must be an integer >= 1")
    check("gof_nsim", lambda v: isinstance(v, int) and v >= 1,
          "ergm.gof_nsim {value!r} must be an integer >= 1")
    check("workers", lambda v: isinstance(v, int) and v >= 1,
          "workers {value!r} must be an integer >= 1")
    check("kcore_rule", lambda v: v in KCORE_RULES,
          "stats.kcore_rule {value!r} not one of below-median, at-least")
    if "algorithms" in flat:
        algos = flat["algorithms"]
        if not isinstance(algos, (list, tuple)) or not algos:
            problems.append("cluster.algorithms must be a nonempty list")
        else:
            for a in algos:
                if a not in ALGORITHMS:
                    problems.append(f"cluster.algorithms: unknown algorithm {a!r}")
            flat["algorithms"] = tuple(algos)
    if "excluded_genres" in flat:
        eg = flat["excluded_genres"]
        if not isinstance(eg, (list, tuple)):
            problems.append("sampling.excluded_genres must be a list")
        else:
            flat["excluded_genres"] = frozenset(str(g) for g in eg)
    if "ergm_terms" in flat and flat["ergm_terms"] != "all":
        terms = flat["ergm_terms"]
        if not isinstance(terms, (list, tuple)):
            problems.append("ergm.ergm_terms must be 'all' or a list like [edges, c1, c3]")
        else:
            flat["ergm_terms"] = tuple(terms)
    if "column_map" in flat and not isinstance(flat["column_map"], dict):
        problems.append("inputs.column_map must be a mapping")

    env_workers = os.environ.get("COVIEW_WORKERS")
    if env_workers:
        try:
            flat["workers"] = int(env_workers)
        except ValueError:
            problems.append(f"COVIEW_WORKERS {env_workers!r} is not an integer")

    # paths from the file resolve relative to the file; CLI overrides
    # (already absolute or cwd-relative) pass through unchanged
    base = path.parent
    overridden = set(overrides or {})

    def resolve(key):
        if key in flat and flat[key] is not None:
            p = Path(flat[key])
            if key not in overridden and not p.is_absolute():
                p = base / p
            flat[key] = p

    for key in ("catalog", "interactions", "output_dir"):
        resolve(key)
    if flat.get("stopwords", "builtin") != "builtin" and "stopwords" not in overridden:
        p = Path(flat["stopwords"])
        flat["stopwords"] = str(p if p.is_absolute() else base / p)
    out_dir = flat.get("output_dir", Path("out"))
    for key in ("catalog", "interactions"):
        p = flat.get(key)
        if isinstance(p, Path) and p.resolve() == Path(out_dir).resolve():
            problems.append(f"inputs.{key} must be distinct from the output directory")

    if problems:
        raise ConfigError(problems)
    return PipelineConfig(**flat)


def with_overrides(config: PipelineConfig, **kwargs) -> PipelineConfig:
    kwargs = {k: v for k, v in kwargs.items() if v is not None}
    return replace(config, **kwargs) if kwargs else config
