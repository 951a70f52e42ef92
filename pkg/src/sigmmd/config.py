"""Dict/JSON serialization for every configurable object.

Each *_to_dict / *_from_dict pair round-trips exactly; unknown keys and
kinds raise ConfigError with the offending name so CLI users get a
pointed message rather than a traceback.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .ingest import PriceSchema
from .preprocess import LeadLag, Pipeline, Scale, Standardize, TimeAugment
from .sig_kernel import PDEBackend, TruncatedBackend, WeightFunction
from .simulate import GBM, OU, Garch, MixtureGBMOU, ScaledBM, SimSpec
from .static_kernels import StaticKernel
from .two_sample import PowerStudyConfig, StatisticConfig, TwoSampleConfig


def _take(d: dict, context: str, required=(), optional=()):
    """Validate keys and return a merged kwargs dict."""
    if not isinstance(d, dict):
        raise ConfigError(f"{context} must be a JSON object")
    unknown = set(d) - set(required) - set(optional) - {"kind"}
    if unknown:
        raise ConfigError(f"{context}: unknown keys {sorted(unknown)}")
    missing = [k for k in required if k not in d]
    if missing:
        raise ConfigError(f"{context}: missing keys {missing}")
    return {k: d[k] for k in d if k != "kind"}


# ---------------------------------------------------------------------------
# simulators
# ---------------------------------------------------------------------------

_MODEL_FIELDS = {
    "scaled_bm": (ScaledBM, ("sigma",)),
    "gbm": (GBM, ("mu", "sigma", "s0")),
    "ou": (OU, ("theta", "sigma_tilde", "g0")),
    "garch": (Garch, ("mu", "omega", "alpha1", "beta1", "cumulative")),
}


def model_to_dict(model) -> dict:
    if isinstance(model, MixtureGBMOU):
        return {"kind": "mixture", "gbm": model_to_dict(model.gbm),
                "ou": model_to_dict(model.ou)}
    if model.name not in _MODEL_FIELDS:
        raise ConfigError(f"unknown model {model.name!r}")
    _, fields = _MODEL_FIELDS[model.name]
    return {"kind": model.name, **{f: getattr(model, f) for f in fields}}


def model_from_dict(d: dict):
    if not isinstance(d, dict) or "kind" not in d:
        raise ConfigError("model must be an object with a 'kind' key")
    kind = d["kind"]
    if kind == "mixture":
        kw = _take(d, "mixture model", optional=("gbm", "ou"))
        return MixtureGBMOU(
            gbm=model_from_dict(kw.get("gbm", {"kind": "gbm"})),
            ou=model_from_dict(kw.get("ou", {"kind": "ou"})))
    if kind not in _MODEL_FIELDS:
        raise ConfigError(f"unknown model kind {kind!r}")
    cls, fields = _MODEL_FIELDS[kind]
    return cls(**_take(d, f"{kind} model", optional=fields))


def spec_to_dict(spec: SimSpec) -> dict:
    return {"model": model_to_dict(spec.model), "n_steps": spec.n_steps,
            "horizon": spec.horizon, "seed": spec.seed}


def spec_from_dict(d: dict) -> SimSpec:
    kw = _take(d, "simulation spec", required=("model",),
               optional=("n_steps", "horizon", "seed"))
    kw["model"] = model_from_dict(kw["model"])
    return SimSpec(**kw)


def specs_from_value(value) -> SimSpec | tuple[SimSpec, ...]:
    """A single spec object or a list of them (multichannel)."""
    if isinstance(value, list):
        if not value:
            raise ConfigError("spec list is empty")
        return tuple(spec_from_dict(v) for v in value)
    return spec_from_dict(value)


def specs_to_value(spec) -> dict | list:
    if isinstance(spec, (tuple, list)):
        return [spec_to_dict(s) for s in spec]
    return spec_to_dict(spec)


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------

def weights_to_dict(w: WeightFunction) -> dict:
    if w.kind == "unit":
        return {"kind": "unit"}
    if w.kind == "geometric":
        return {"kind": "geometric", "theta": w.theta}
    return {"kind": "table", "table": list(w.table)}


def weights_from_dict(d: dict) -> WeightFunction:
    kw = _take(d, "weights", optional=("theta", "table"))
    kind = d.get("kind", "unit")
    if "table" in kw:
        kw["table"] = tuple(kw["table"])
    return WeightFunction(kind=kind, **kw)


def static_kernel_to_dict(k: StaticKernel) -> dict:
    out = {"kind": k.kind}
    if k.kind == "rbf":
        out["sigma_rbf"] = k.sigma_rbf
    return out


def static_kernel_from_dict(d: dict) -> StaticKernel:
    kw = _take(d, "static kernel", optional=("sigma_rbf",))
    return StaticKernel(kind=d.get("kind", "linear"), **kw)


def backend_to_dict(backend) -> dict:
    if isinstance(backend, TruncatedBackend):
        return {"kind": "truncated", "depth": backend.depth,
                "weights": weights_to_dict(backend.weights)}
    if isinstance(backend, PDEBackend):
        return {"kind": "pde",
                "static_kernel": static_kernel_to_dict(backend.static_kernel),
                "dyadic_order": backend.dyadic_order,
                "weights": weights_to_dict(backend.weights),
                "lift_scale": backend.lift_scale}
    raise ConfigError(f"unknown kernel backend {type(backend).__name__}")


def backend_from_dict(d: dict):
    if not isinstance(d, dict) or "kind" not in d:
        raise ConfigError("kernel must be an object with a 'kind' key")
    if d["kind"] == "truncated":
        kw = _take(d, "truncated kernel", optional=("depth", "weights"))
        if "weights" in kw:
            kw["weights"] = weights_from_dict(kw["weights"])
        return TruncatedBackend(**kw)
    if d["kind"] == "pde":
        kw = _take(d, "pde kernel",
                   optional=("static_kernel", "dyadic_order", "weights", "lift_scale"))
        if "static_kernel" in kw:
            kw["static_kernel"] = static_kernel_from_dict(kw["static_kernel"])
        if "weights" in kw:
            kw["weights"] = weights_from_dict(kw["weights"])
        return PDEBackend(**kw)
    raise ConfigError(f"unknown kernel kind {d['kind']!r}")


# ---------------------------------------------------------------------------
# preprocessing pipelines
# ---------------------------------------------------------------------------

def pipeline_to_dict(p: Pipeline) -> dict:
    steps = []
    for s in p.steps:
        if isinstance(s, Scale):
            steps.append({"kind": "scale", "c": s.c,
                          "skip_time_channel": s.skip_time_channel})
        elif isinstance(s, Standardize) and s.stats is not None:
            mu, sigma = s.stats
            steps.append({"kind": "standardize",
                          "stats": [list(map(float, mu)), list(map(float, sigma))]})
        else:
            steps.append({"kind": s.name})
    return {"steps": steps}


def pipeline_from_dict(d: dict) -> Pipeline:
    kw = _take(d, "pipeline", optional=("steps",))
    steps = []
    for sd in kw.get("steps", []):
        if not isinstance(sd, dict) or "kind" not in sd:
            raise ConfigError("each pipeline step needs a 'kind' key")
        kind = sd["kind"]
        if kind == "time_augment":
            _take(sd, "time_augment step")
            steps.append(TimeAugment())
        elif kind == "lead_lag":
            _take(sd, "lead_lag step")
            steps.append(LeadLag())
        elif kind == "standardize":
            skw = _take(sd, "standardize step", optional=("stats",))
            stats = skw.get("stats")
            if stats is not None:
                stats = (np.asarray(stats[0], float), np.asarray(stats[1], float))
            steps.append(Standardize(stats=stats))
        elif kind == "scale":
            skw = _take(sd, "scale step", required=("c",),
                        optional=("skip_time_channel",))
            steps.append(Scale(**skw))
        else:
            raise ConfigError(f"unknown pipeline step {kind!r}")
    return Pipeline(tuple(steps))


# ---------------------------------------------------------------------------
# test and power study configs
# ---------------------------------------------------------------------------

def statistic_to_dict(s: StatisticConfig) -> dict:
    return {"estimator": s.estimator, "kernel": backend_to_dict(s.kernel)}


def statistic_from_dict(d: dict) -> StatisticConfig:
    kw = _take(d, "statistic", optional=("estimator", "kernel"))
    if "kernel" in kw:
        kw["kernel"] = backend_from_dict(kw["kernel"])
    return StatisticConfig(**kw)


def two_sample_config_to_dict(c: TwoSampleConfig) -> dict:
    return {"statistic": statistic_to_dict(c.statistic), "alpha": c.alpha,
            "null_method": c.null_method, "B": c.B, "seed": c.seed,
            "pipeline": pipeline_to_dict(c.pipeline)}


def two_sample_config_from_dict(d: dict) -> TwoSampleConfig:
    kw = _take(d, "two-sample test config",
               optional=("statistic", "alpha", "null_method", "B", "seed", "pipeline"))
    if "statistic" in kw:
        kw["statistic"] = statistic_from_dict(kw["statistic"])
    if "pipeline" in kw:
        kw["pipeline"] = pipeline_from_dict(kw["pipeline"])
    return TwoSampleConfig(**kw)


def power_config_to_dict(c: PowerStudyConfig) -> dict:
    return {"spec_x": specs_to_value(c.spec_x), "spec_y": specs_to_value(c.spec_y),
            "scalings": list(c.scalings), "batch_sizes": list(c.batch_sizes),
            "estimators": list(c.estimators), "kernel": backend_to_dict(c.kernel),
            "pipeline": pipeline_to_dict(c.pipeline), "scaling_mode": c.scaling_mode,
            "alpha": c.alpha, "B": c.B, "reps": c.reps,
            "pool_factor": c.pool_factor, "seed": c.seed,
            "compute_type1": c.compute_type1, "null_style": c.null_style}


def power_config_from_dict(d: dict) -> PowerStudyConfig:
    kw = _take(d, "power config", required=("spec_x", "spec_y"),
               optional=("scalings", "batch_sizes", "estimators", "kernel",
                         "pipeline", "scaling_mode", "alpha", "B", "reps",
                         "pool_factor", "seed", "compute_type1", "null_style"))
    kw["spec_x"] = specs_from_value(kw["spec_x"])
    kw["spec_y"] = specs_from_value(kw["spec_y"])
    for key in ("scalings", "batch_sizes", "estimators"):
        if key in kw:
            kw[key] = tuple(kw[key])
    if "kernel" in kw:
        kw["kernel"] = backend_from_dict(kw["kernel"])
    if "pipeline" in kw:
        kw["pipeline"] = pipeline_from_dict(kw["pipeline"])
    return PowerStudyConfig(**kw)


# ---------------------------------------------------------------------------
# batch sources: where the CLI gets its paths from
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BatchSource:
    """Either a portable path JSON file or a simulator draw."""

    file: str | None = None
    sim: SimSpec | tuple[SimSpec, ...] | None = None
    n_paths: int = 0

    def __post_init__(self):
        if (self.file is None) == (self.sim is None):
            raise ConfigError("a batch source needs exactly one of 'file' or 'sim'")
        if self.sim is not None and self.n_paths < 1:
            raise ConfigError("a simulated batch source needs n_paths >= 1")


def batch_source_to_dict(b: BatchSource) -> dict:
    if b.file is not None:
        return {"file": b.file}
    return {"sim": specs_to_value(b.sim), "n_paths": b.n_paths}


def batch_source_from_dict(d: dict) -> BatchSource:
    kw = _take(d, "batch source", optional=("file", "sim", "n_paths"))
    if "sim" in kw:
        kw["sim"] = specs_from_value(kw["sim"])
    return BatchSource(**kw)


def load_batch(source: BatchSource):
    from .pathio import read_paths
    from .simulate import multichannel_batch, simulate_batch
    if source.file is not None:
        return read_paths(source.file)
    if isinstance(source.sim, tuple):
        return multichannel_batch(list(source.sim), source.n_paths)
    return simulate_batch(source.sim, source.n_paths)


# ---------------------------------------------------------------------------
# price schema
# ---------------------------------------------------------------------------

def schema_to_dict(s: PriceSchema) -> dict:
    return {"date_column": s.date_column, "price_columns": list(s.price_columns)}


def schema_from_dict(d: dict) -> PriceSchema:
    kw = _take(d, "price schema", optional=("date_column", "price_columns"))
    if "price_columns" in kw:
        cols = kw["price_columns"]
        kw["price_columns"] = (cols,) if isinstance(cols, str) else tuple(cols)
    return PriceSchema(**kw)
