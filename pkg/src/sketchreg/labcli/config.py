"""Experiment configuration: a JSON document validated with pydantic.

Unknown keys are rejected everywhere. Validation problems surface as
:class:`ConfigError` carrying the dotted path of the offending field.
"""
import json
import math
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..errors import ConfigError, InvalidModel
from ..filters import FilterSpec
from ..synthworld import default_dimension, make_model

SKETCH_KINDS = ("identity", "gaussian", "rademacher", "ros_hadamard", "nystrom_uniform", "nystrom_als")

# Calibrated multipliers of the sketch-dimension rules (see README).
DEFAULT_C = {"rate": 1.0, "effdim": 1.0, "leverage": 1.0}


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ModelCfg(_Strict):
    gamma: float = Field(gt=0, le=1)
    zeta: float = Field(ge=0)
    R: float = Field(1.0, gt=0)
    noise_sigma: float = Field(0.5, ge=0)
    eps: float = Field(0.05, gt=0)
    d: Optional[int] = Field(None, ge=8)
    sign_seed: Optional[int] = None


class DatasetCfg(_Strict):
    path: str
    format: Literal["csv", "binary-f64le"] = "csv"
    n_features: Optional[int] = Field(None, ge=1)
    header: Optional[bool] = None
    kernel: Literal["linear", "gaussian", "sobolev"] = "gaussian"
    bandwidth: float = Field(1.0, gt=0)
    test_fraction: float = Field(0.25, gt=0, lt=1)


class LambdaRule(_Strict):
    style: Literal["theory", "fixed"] = "theory"
    value: Optional[float] = Field(None, gt=0)
    # overrides the theory exponent -1/max(1, 2 zeta + gamma)
    exponent: Optional[float] = Field(None, lt=0)
    allow_out_of_range: bool = False

    @model_validator(mode="after")
    def _value_for_fixed(self):
        if self.style == "fixed" and self.value is None:
            raise ValueError("fixed lambda rule needs a value")
        return self


class SketchCfg(_Strict):
    kind: Literal[SKETCH_KINDS] = "identity"
    # rate:     m = C n^exponent log n, exponent from the three regimes by default
    # effdim:   m = C lam^-gamma log n
    # leverage: m = C L^2 N_x(lam) log n with L the reported score factor
    rule: Literal["rate", "effdim", "leverage"] = "rate"
    C: Optional[float] = Field(None, gt=0)
    exponent: Optional[float] = Field(None, ge=0)
    m0: Optional[int] = Field(None, ge=1)

    @property
    def multiplier(self):
        return self.C if self.C is not None else DEFAULT_C[self.rule]


class FilterCfg(_Strict):
    family: Literal["iterated_ridge", "spectral_cutoff"] = "iterated_ridge"
    tau: float = Field(1, gt=0)

    @model_validator(mode="after")
    def _integer_tau(self):
        if self.family == "iterated_ridge" and self.tau != int(self.tau):
            raise ValueError("iterated_ridge needs an integer tau")
        return self

    def spec(self):
        if self.family == "iterated_ridge":
            return FilterSpec.iterated_ridge(int(self.tau))
        return FilterSpec.spectral_cutoff(float(self.tau))


class OutputCfg(_Strict):
    csv: str = "results.csv"
    svg: Optional[str] = None


class ExperimentConfig(_Strict):
    mode: Literal["rates", "sketchdim", "diagnose", "bench"]
    model: Optional[ModelCfg] = None
    dataset: Optional[DatasetCfg] = None
    n_grid: List[int] = Field(default_factory=lambda: [256, 512, 1024, 2048, 4096, 8192])
    m_grid: Optional[List[int]] = None
    trials: int = Field(20, ge=1)
    lambda_rule: LambdaRule = LambdaRule()
    sketch: SketchCfg = SketchCfg()
    filter: FilterCfg = FilterCfg()
    norm_a: float = Field(0.0, ge=0, le=0.5)
    master_seed: int = Field(0, ge=0, lt=2**64)
    threads: int = Field(1, ge=1)
    slope_tol: Optional[float] = Field(None, gt=0)
    output: OutputCfg = OutputCfg()

    @field_validator("n_grid")
    @classmethod
    def _increasing(cls, v):
        if not v:
            raise ValueError("n_grid must not be empty")
        if any(n < 1 for n in v):
            raise ValueError("n_grid entries must be positive")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("n_grid must be strictly increasing")
        return v

    @field_validator("m_grid")
    @classmethod
    def _m_increasing(cls, v):
        if v is not None and (not v or any(m < 1 for m in v) or any(b <= a for a, b in zip(v, v[1:]))):
            raise ValueError("m_grid must be a nonempty, strictly increasing list of positive integers")
        return v

    @model_validator(mode="after")
    def _mode_inputs(self):
        if self.mode == "bench":
            if self.dataset is None:
                raise ValueError("bench mode needs a dataset")
            if self.lambda_rule.style == "theory" and self.lambda_rule.exponent is None:
                raise ValueError("bench mode needs a fixed lambda or an explicit exponent")
            if self.sketch.kind != "identity" and not (
                    self.sketch.rule == "leverage"
                    or (self.sketch.rule == "rate" and self.sketch.exponent is not None)):
                raise ValueError("bench mode needs the leverage rule or an explicit rate exponent")
        elif self.model is None:
            raise ValueError(f"{self.mode} mode needs a synthetic model")
        if self.mode == "sketchdim" and self.m_grid is None:
            raise ValueError("sketchdim mode needs m_grid")
        if self.model is not None and self.norm_a > self.model.zeta:
            raise ValueError("norm_a must not exceed zeta")
        return self

    # derived quantities -------------------------------------------------

    def lambda_exponent(self):
        if self.lambda_rule.exponent is not None:
            return self.lambda_rule.exponent
        return -1.0 / max(1.0, 2 * self.model.zeta + self.model.gamma)

    def lam(self, n):
        if self.lambda_rule.style == "fixed":
            return self.lambda_rule.value
        return float(n) ** self.lambda_exponent()

    def build_model(self):
        mc = self.model
        d = mc.d if mc.d is not None else default_dimension(mc.gamma, mc.zeta, max(self.n_grid))
        try:
            return make_model(mc.gamma, mc.zeta, d, mc.R, mc.noise_sigma, mc.eps, mc.sign_seed)
        except InvalidModel as exc:
            raise ConfigError(str(exc), "model") from exc


def rate_exponent(gamma, zeta, a=0.0):
    """Exponent of ``n`` in the minimal sketch dimension, by regime."""
    s = 2 * zeta + gamma
    if s <= 1:
        return gamma
    if zeta >= 1:
        return gamma * (zeta - a) / ((1 - a) * s)
    return gamma / s


def target_slope(gamma, zeta, a=0.0):
    """Predicted log-log slope of the error norm in ``n``."""
    s = 2 * zeta + gamma
    return -(zeta - a) / s if s > 1 else -(zeta - a)


def _error_path(err):
    loc = ".".join(str(p) for p in err["loc"] if not (isinstance(p, str) and p.startswith("function-")))
    return loc or "<root>"


def parse_config(doc):
    """Validate a decoded JSON document."""
    try:
        return ExperimentConfig.model_validate(doc)
    except ValidationError as exc:
        first = exc.errors()[0]
        path = _error_path(first)
        raise ConfigError(first["msg"], path) from None


def _set_path(doc, key, raw):
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    parts = key.split(".")
    node = doc
    for p in parts[:-1]:
        child = node.get(p)
        if child is None:
            child = node[p] = {}
        if not isinstance(child, dict):
            raise ConfigError(f"cannot set {key}: {p} is not an object", key)
        node = child
    node[parts[-1]] = value


def apply_overrides(doc, overrides):
    """Apply ``key=value`` strings (dotted keys, JSON values) to a config dict."""
    doc = json.loads(json.dumps(doc))
    for item in overrides or ():
        key, sep, raw = item.partition("=")
        if not sep or not key:
            raise ConfigError(f"override {item!r} is not key=value", item)
        _set_path(doc, key.strip(), raw.strip())
    return doc


def load_config(path, overrides=None):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}", str(path)) from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}", str(path)) from None
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object", "<root>")
    return parse_config(apply_overrides(doc, overrides))


def sketch_dim(cfg, n, lam, model=None, eff_dim=None, als_factor=None):
    """Sketch dimension ``m`` for sample size ``n`` under the configured rule."""
    sk = cfg.sketch
    if sk.kind == "identity":
        return n
    C = sk.multiplier
    log_n = math.log(n)
    if sk.rule == "rate":
        gamma, zeta = model.gamma, model.zeta
        expo = sk.exponent if sk.exponent is not None else rate_exponent(gamma, zeta, cfg.norm_a)
        m = C * n**expo * log_n
    elif sk.rule == "effdim":
        m = C * lam ** (-model.gamma) * log_n
    else:
        if eff_dim is None:
            raise ConfigError("leverage rule needs an effective dimension estimate", "sketch.rule")
        L = als_factor if als_factor is not None else 1.0
        m = C * L**2 * eff_dim * log_n
    m = max(1, math.ceil(m))
    if sk.kind in ("nystrom_uniform", "ros_hadamard"):
        m = min(m, n)
    return m
