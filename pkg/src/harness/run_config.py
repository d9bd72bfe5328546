"""Per-run experiment configuration loaded from YAML."""

import hashlib
import json
from pathlib import Path
from typing import Optional, Union

import yaml
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from src.config import DEFAULT_ONTOLOGY_PATH, PROJECT_ROOT, settings
from src.entities.models import ConversationalWorld
from src.entities.world import new_world
from src.errors import ConfigError
from src.ontology.generator import generate_kb
from src.ontology.loader import load_ontology
from src.ontology.models import KnowledgeBase, ObjectTypeDef
from src.policy.checkpoint import POLICY_KINDS
from src.policy.learners import LearnerConfig
from src.usersim.agenda import UserConfig
from src.usersim.error_model import ENVIRONMENTS, EnvironmentName, ErrorModelConfig
from src.usersim.goal import OrderMode


class WorldObjectConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    id: str = Field(min_length=1)
    type: str = Field(min_length=1)


class GeneratedKBConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    seed: int = 0
    sizes: Optional[dict[str, int]] = None


class KBConfig(BaseModel):
    """Record source: generated, a separate ontology file, or (neither) the ontology's own records."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    generate: Optional[GeneratedKBConfig] = None
    file: Optional[Path] = None

    @model_validator(mode="after")
    def check_source(self) -> "KBConfig":
        if self.generate is not None and self.file is not None:
            raise ValueError("give either 'generate' or 'file', not both")
        return self


class RewardConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    success: float = 30.0
    turn: float = -1.0


def _default_world() -> list[WorldObjectConfig]:
    return [
        WorldObjectConfig(id="CamHotels", type="CamHotels"),
        WorldObjectConfig(id="CamRestaurants", type="CamRestaurants"),
    ]


class RunConfig(BaseModel):
    """
    One experiment run: environment, simulated user, world, policies,
    dialogue counts and seeds. Unknown keys are rejected.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    experiment: str = "exp1"
    environment: Union[EnvironmentName, ErrorModelConfig] = "env1"
    relation_probability: float = Field(default=0.0, ge=0.0, le=1.0)
    world: list[WorldObjectConfig] = Field(default_factory=_default_world)
    policies: dict[str, str] = Field(
        default_factory=lambda: {"CamHotels": "handcrafted", "CamRestaurants": "cedm"}
    )
    train_dialogues: int = Field(default=4000, ge=0)
    test_dialogues: int = Field(default=1000, ge=1)
    seeds: list[int] = Field(default_factory=lambda: [0, 1, 2, 3, 4], min_length=1)
    order_mode: OrderMode = "fixed"
    max_turns: int = Field(default=25, ge=1)
    reward: RewardConfig = Field(default_factory=RewardConfig)
    output_dir: Path = Path("runs")
    ontology: Path = DEFAULT_ONTOLOGY_PATH
    kb: KBConfig = Field(default_factory=lambda: KBConfig(generate=GeneratedKBConfig()))
    train_logs: bool = False
    learner: LearnerConfig = Field(default_factory=LearnerConfig)
    user: UserConfig = Field(default_factory=UserConfig)

    @field_validator("seeds")
    @classmethod
    def unique_seeds(cls, v: list[int]) -> list[int]:
        if len(set(v)) != len(v):
            raise ValueError("seeds must be unique")
        return v

    @model_validator(mode="after")
    def check_world(self) -> "RunConfig":
        ids = [obj.id for obj in self.world]
        if not ids:
            raise ValueError("the world needs at least one object")
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate world ids in {ids}")
        if set(self.policies) != set(ids):
            raise ValueError(f"policies must be given for exactly the world objects {ids}")
        unknown = {kind for kind in self.policies.values() if kind not in POLICY_KINDS}
        if unknown:
            raise ValueError(f"unknown policy kind(s) {sorted(unknown)}")
        return self

    @property
    def error_model(self) -> ErrorModelConfig:
        if isinstance(self.environment, str):
            return ENVIRONMENTS[self.environment]
        return self.environment

    @property
    def env_name(self) -> str:
        if isinstance(self.environment, str):
            return self.environment
        for name, env in ENVIRONMENTS.items():
            if env == self.environment:
                return name
        return f"ser{self.environment.ser:g}-n{self.environment.nbest}"

    @property
    def relations_enabled(self) -> bool:
        """The tracker runs in multi-domain mode as soon as one object uses the baseline."""
        return "mddm-baseline" not in self.policies.values()

    @property
    def trainable(self) -> bool:
        return any(kind != "handcrafted" for kind in self.policies.values())

    def config_hash(self) -> str:
        payload = json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:12]

    def resolved_output_dir(self) -> Path:
        """``output_dir``, re-rooted under ``CEDM_OUTPUT_ROOT`` when that is set."""
        if settings.output_root is not None:
            return Path(settings.output_root) / self.output_dir.name
        return self.output_dir

    def with_overrides(
        self, seed: Optional[int] = None, relation_probability: Optional[float] = None
    ) -> "RunConfig":
        data = self.model_dump()
        if seed is not None:
            data["seeds"] = [seed]
        if relation_probability is not None:
            data["relation_probability"] = relation_probability
        try:
            return RunConfig.model_validate(data)
        except ValidationError as e:
            first = e.errors()[0]
            raise ConfigError(first["msg"], location=".".join(str(p) for p in first["loc"])) from e

    # resources

    def load_resources(self) -> tuple[list[ObjectTypeDef], KnowledgeBase]:
        types, kb = load_ontology(_resolve(self.ontology))
        if self.kb.generate is not None:
            kb = generate_kb(self.kb.generate.seed, self.kb.generate.sizes, types)
        elif self.kb.file is not None:
            _, kb = load_ontology(_resolve(self.kb.file))
        by_name = {t.name: t for t in types}
        missing = [obj.type for obj in self.world if obj.type not in by_name]
        if missing:
            raise ConfigError(f"unknown object type(s) {missing}", location="world")
        return types, kb

    def world_spec(self, types: list[ObjectTypeDef]) -> list[tuple[str, ObjectTypeDef]]:
        by_name = {t.name: t for t in types}
        return [(obj.id, by_name[obj.type]) for obj in self.world]

    def new_world(self, types: list[ObjectTypeDef]) -> ConversationalWorld:
        return new_world(self.world_spec(types))


def _resolve(path: Path) -> Path:
    path = Path(path)
    return path if path.is_absolute() or path.exists() else PROJECT_ROOT / path


def parse_run_config(text: str, path: Union[Path, str] = "<string>") -> RunConfig:
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigError(f"parse error: {e}", location=str(path)) from e
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError("document must be a mapping", location=str(path))
    try:
        config = RunConfig.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        keys = ".".join(str(part) for part in first["loc"])
        raise ConfigError(first["msg"], location=f"{path}:{keys}" if keys else str(path)) from e
    logger.debug(f"Loaded run config {path} ({config.experiment}, {config.env_name}, r={config.relation_probability})")
    return config


def load_run_config(path: Union[Path, str]) -> RunConfig:
    """
    Load a YAML run configuration.

    Raises:
        ConfigError: On I/O, YAML or validation errors (message carries file and key path)
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read file: {e}", location=str(path)) from e
    return parse_run_config(text, path)
