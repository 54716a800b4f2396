"""
Run Configuration
==================

Pydantic schema for ``fxc simulate`` configs, loaded from JSON or YAML.
String values of the form ``${ENV_VAR}`` are replaced from the
environment before validation.

Example (YAML):

    code: {family: toric, dimension: 3, sizes: [3, 4, 5]}
    repetition: {delta: 8}
    noise: {model: phenomenological, p: [0.08, 0.09, 0.10, 0.11]}
    window: {w: 3, c: 1}
    experiment: {name: sustainable-3d, kind: memory, side: primal, trials: 2000}
    output: {csv: results/3d.csv}
"""

import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Literal, Mapping, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .decoder import DecodeConfig, WindowConfig
from .errors import SpecError
from .experiment import ExperimentSpec
from .noise import GkpSpec, PhenomenologicalSpec

try:
    import yaml
    YAML_AVAILABLE = True
except ImportError:
    YAML_AVAILABLE = False

logger = logging.getLogger(__name__)

SEED_ENV_VAR = "FXC_SEED"
_PARSE_ERRORS = (json.JSONDecodeError, UnicodeDecodeError) + ((yaml.YAMLError,) if YAML_AVAILABLE else ())
MAX_SEED = 2 ** 64 - 1


def _as_list(value: Union[float, List[float]]) -> List[float]:
    return list(value) if isinstance(value, list) else [value]


class CodeSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    family: Literal["toric", "surface", "rep"]
    dimension: Optional[int] = None
    pattern: Optional[str] = None
    sizes: List[int] = Field(min_length=1)
    primal_grade: Optional[int] = None

    @model_validator(mode="after")
    def _family_fields(self) -> "CodeSection":
        if self.family == "toric" and self.dimension is None:
            raise ValueError("toric codes need 'dimension'")
        if self.family == "surface" and not self.pattern:
            raise ValueError("surface codes need 'pattern'")
        return self

    def name(self, size: int) -> str:
        if self.family == "toric":
            return f"toric:{self.dimension}:{size}"
        if self.family == "surface":
            return f"surface:{self.pattern}:{size}"
        return f"rep:full:{size}"


class RepetitionSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    variant: Optional[Literal["full_rank", "cyclic"]] = None
    delta: int = Field(default=1, ge=1)


class NoiseSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    model: Literal["phenomenological", "gkp"] = "phenomenological"
    p: Union[float, List[float]] = 0.01
    squeezing_db: Union[float, List[float]] = 10.0
    analog_priors: bool = True
    clear_boundaries: bool = True

    @field_validator("p")
    @classmethod
    def _p_range(cls, value):
        if any(not 0.0 <= v <= 1.0 for v in _as_list(value)):
            raise ValueError("p must lie in [0, 1]")
        return value

    @field_validator("squeezing_db")
    @classmethod
    def _db_range(cls, value):
        if any(v < 0.0 for v in _as_list(value)):
            raise ValueError("squeezing_db must be >= 0")
        return value

    def params(self) -> List[float]:
        return _as_list(self.p if self.model == "phenomenological" else self.squeezing_db)

    def spec(self, value: float) -> Union[PhenomenologicalSpec, GkpSpec]:
        if self.model == "phenomenological":
            return PhenomenologicalSpec(value, self.clear_boundaries)
        return GkpSpec(value, self.analog_priors, self.clear_boundaries)


class DecodeSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    bp_iters: int = Field(default=30, ge=0)
    min_sum_scale: float = Field(default=1.0, gt=0.0, le=1.0)
    osd_order: int = Field(default=60, ge=0)
    osd_strategy: Literal["osd0", "combination_sweep"] = "combination_sweep"

    def to_config(self) -> DecodeConfig:
        return DecodeConfig(self.bp_iters, self.min_sum_scale, self.osd_order, self.osd_strategy)


class WindowSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    w: int = Field(ge=1)
    c: int = Field(ge=1)

    @model_validator(mode="after")
    def _commit_within_window(self) -> "WindowSection":
        if self.c > self.w:
            raise ValueError(f"c={self.c} exceeds w={self.w}")
        return self

    def to_config(self) -> WindowConfig:
        return WindowConfig(self.w, self.c)


class ExperimentSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str = "run"
    kind: Literal["memory", "stability", "sustainable"] = "memory"
    side: Literal["primal", "dual", "both"] = "primal"
    trials: int = Field(default=1000, ge=1)
    rounds_list: Optional[List[int]] = None
    target_failures: Optional[int] = Field(default=None, ge=1)
    max_trials: Optional[int] = Field(default=None, ge=1)
    chunk_size: int = Field(default=100, ge=1)


class OutputSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    csv: Optional[str] = None


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    code: CodeSection
    repetition: RepetitionSection = Field(default_factory=RepetitionSection)
    noise: NoiseSection = Field(default_factory=NoiseSection)
    decode: DecodeSection = Field(default_factory=DecodeSection)
    window: Optional[WindowSection] = None
    experiment: ExperimentSection = Field(default_factory=ExperimentSection)
    output: OutputSection = Field(default_factory=OutputSection)
    seed: Optional[int] = Field(default=None, ge=0, le=MAX_SEED)

    def experiment_specs(self, seed: int, workers: int = 1,
                         trials: Optional[int] = None) -> List[Tuple[ExperimentSpec, Optional[List[int]]]]:
        """One (spec, rounds_list) per code size and noise value."""
        exp = self.experiment
        window = self.window.to_config() if self.window else None
        specs = []
        for size in self.code.sizes:
            for value in self.noise.params():
                spec = ExperimentSpec(
                    kind=exp.kind,
                    code=self.code.name(size),
                    delta=self.repetition.delta,
                    side=exp.side,
                    noise=self.noise.spec(value),
                    decode=self.decode.to_config(),
                    window=window,
                    trials=trials or exp.trials,
                    master_seed=seed,
                    name=exp.name,
                    variant=self.repetition.variant,
                    primal_grade=self.code.primal_grade,
                    target_failures=exp.target_failures,
                    max_trials=exp.max_trials,
                    chunk_size=exp.chunk_size,
                    workers=workers,
                )
                specs.append((spec, exp.rounds_list))
        return specs


# ─── Loading ───

def resolve_env_vars(value: Any) -> Any:
    """Replace ``${ENV_VAR}`` strings recursively; unknown variables stay as-is."""
    if isinstance(value, str) and value.startswith("${") and value.endswith("}"):
        return os.environ.get(value[2:-1], value)
    if isinstance(value, dict):
        return {k: resolve_env_vars(v) for k, v in value.items()}
    if isinstance(value, list):
        return [resolve_env_vars(v) for v in value]
    return value


def _read_raw(path: Path) -> Any:
    content = path.read_text()
    if path.suffix in (".yaml", ".yml"):
        if not YAML_AVAILABLE:
            raise SpecError("PyYAML not installed. Install with: pip install pyyaml")
        return yaml.safe_load(content) or {}
    if path.suffix != ".json":
        logger.warning(f"Unknown config format: {path.suffix}, trying JSON")
    return json.loads(content)


def _field_path(error: Mapping[str, Any]) -> str:
    return ".".join(str(part) for part in error.get("loc", ())) or "<root>"


def parse_config(data: Any) -> RunConfig:
    if not isinstance(data, dict):
        raise SpecError("Config did not parse to a mapping")
    try:
        return RunConfig.model_validate(resolve_env_vars(data))
    except ValidationError as e:
        problems = "; ".join(f"{_field_path(err)}: {err['msg']}" for err in e.errors())
        raise SpecError(f"Invalid config: {problems}") from e


def load_config(config_path: Union[str, Path]) -> RunConfig:
    """Load and validate a run config from JSON or YAML."""
    path = Path(config_path)
    if not path.exists():
        raise SpecError(f"Config file not found: {config_path}")
    try:
        raw = _read_raw(path)
    except _PARSE_ERRORS as e:
        raise SpecError(f"Failed to parse {config_path}: {e}") from e
    config = parse_config(raw)
    logger.info(f"Loaded config from {config_path}")
    return config


def resolve_seed(flag: Optional[int], config: Optional[RunConfig] = None,
                 environ: Optional[Mapping[str, str]] = None) -> int:
    """--seed, then the config seed, then $FXC_SEED, then 0."""
    if flag is not None:
        return flag
    if config is not None and config.seed is not None:
        return config.seed
    env = os.environ if environ is None else environ
    raw = env.get(SEED_ENV_VAR)
    if raw:
        try:
            seed = int(raw)
        except ValueError:
            raise SpecError(f"{SEED_ENV_VAR} must be an integer, got '{raw}'") from None
        if not 0 <= seed <= MAX_SEED:
            raise SpecError(f"{SEED_ENV_VAR} must be an unsigned 64-bit integer")
        return seed
    return 0
