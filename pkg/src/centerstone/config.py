"""Scenario configuration: schema, validation and JSON round-trip."""
from __future__ import annotations

import hashlib
import json
import os
import re
from pathlib import Path
from typing import Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

SCHEMA_VERSION = 1
SEED_ENV = "CENTERSTONE_SEED"

_METHOD_RE = re.compile(r"^(centerpoint|tverberg|iterated-radon(:[0-9]+)?)$")


class ConfigError(ValueError):
    """Invalid scenario file; ``line`` points into the source text when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class Workspace(_Model):
    lower: list[float]
    upper: list[float]

    @model_validator(mode="after")
    def _ordered(self):
        if len(self.lower) != len(self.upper):
            raise ValueError("workspace bounds must have the same dimension")
        if any(lo >= hi for lo, hi in zip(self.lower, self.upper)):
            raise ValueError("workspace lower bounds must be below upper bounds")
        return self

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= np.asarray(self.lower)) and np.all(x <= np.asarray(self.upper)))


class Behavior(_Model):
    kind: Literal["stationary", "oscillating", "move-away", "equivocate"] = "stationary"
    square_side: float = Field(0.1, gt=0)
    speed: float = Field(0.02, gt=0)
    spread: float = Field(0.05, ge=0)
    inner: Optional["Behavior"] = None

    @model_validator(mode="after")
    def _inner(self):
        if self.kind == "equivocate" and self.inner is not None and self.inner.kind == "equivocate":
            raise ValueError("equivocate cannot wrap another equivocate behavior")
        return self


class Agent(_Model):
    id: int = Field(ge=0)
    role: Literal["normal", "adversarial"] = "normal"
    position: list[float]
    behavior: Optional[Behavior] = None


class Generator(_Model):
    normal: int = Field(ge=1)
    adversarial: int = Field(0, ge=0)
    placement: Literal["uniform"] = "uniform"
    behavior: Behavior = Behavior()


class FixedNetwork(_Model):
    mode: Literal["fixed"] = "fixed"
    edges: list[tuple[int, int]]
    directed: bool = False


class DiskNetwork(_Model):
    mode: Literal["disk"] = "disk"
    radius: float

    @field_validator("radius")
    @classmethod
    def _positive(cls, v):
        if not v > 0:
            raise ValueError("sensing radius must be positive")
        return v


class ScenarioConfig(_Model):
    schema_version: int = SCHEMA_VERSION
    name: str = "custom"
    dimension: int = Field(ge=1)
    workspace: Workspace
    agents: Optional[list[Agent]] = None
    generator: Optional[Generator] = None
    network: Union[FixedNetwork, DiskNetwork] = Field(discriminator="mode")
    method: str = "centerpoint"
    alpha: float = 0.8
    epsilon: float = Field(1e-3, gt=0)
    max_steps: int = Field(500, ge=1)
    seed: Optional[int] = None

    @field_validator("schema_version")
    @classmethod
    def _version(cls, v):
        if v != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {v} (expected {SCHEMA_VERSION})")
        return v

    @field_validator("method")
    @classmethod
    def _method(cls, v):
        if not _METHOD_RE.match(v):
            raise ValueError(f"unknown safe-point method {v!r}")
        if v.startswith("iterated-radon:") and int(v.split(":")[1]) < 2:
            raise ValueError("iterated-radon needs r > 1")
        return v

    @field_validator("alpha")
    @classmethod
    def _alpha(cls, v):
        if not 0 < v <= 1:
            raise ValueError("alpha must lie in (0, 1]")
        return v

    @model_validator(mode="after")
    def _consistent(self):
        d = self.dimension
        if len(self.workspace.lower) != d:
            raise ValueError(f"workspace has dimension {len(self.workspace.lower)}, scenario has {d}")
        if (self.agents is None) == (self.generator is None):
            raise ValueError("give exactly one of 'agents' or 'generator'")
        if self.agents is not None:
            ids = [a.id for a in self.agents]
            if sorted(ids) != list(range(len(ids))):
                raise ValueError("agent ids must be 0..N-1 without gaps")
            for a in self.agents:
                if len(a.position) != d:
                    raise ValueError(f"agent {a.id} has dimension {len(a.position)}, scenario has {d}")
            if not any(a.role == "normal" for a in self.agents):
                raise ValueError("scenario needs at least one normal agent")
            count = len(self.agents)
        else:
            count = self.generator.normal + self.generator.adversarial
        if isinstance(self.network, FixedNetwork):
            for a, b in self.network.edges:
                if not (0 <= a < count and 0 <= b < count):
                    raise ValueError(f"edge ({a}, {b}) refers to an unknown agent")
        return self

    def with_overrides(self, **changes) -> "ScenarioConfig":
        data = self.model_dump()
        data.update({k: v for k, v in changes.items() if v is not None})
        return ScenarioConfig.model_validate(data)

    def resolved_seed(self) -> int:
        if self.seed is not None:
            return self.seed
        env = os.environ.get(SEED_ENV)
        return int(env) if env else 0

    def materialize(self) -> list[Agent]:
        """Explicit agent list; generator placements are drawn from the seed."""
        if self.agents is not None:
            return list(self.agents)
        g = self.generator
        rng = np.random.default_rng([self.resolved_seed(), 0x5CE7])
        lo, hi = np.asarray(self.workspace.lower), np.asarray(self.workspace.upper)
        pts = rng.uniform(lo, hi, size=(g.normal + g.adversarial, self.dimension))
        agents = []
        for i, x in enumerate(pts):
            adversarial = i >= g.normal
            agents.append(Agent(
                id=i,
                role="adversarial" if adversarial else "normal",
                position=[float(v) for v in x],
                behavior=g.behavior if adversarial else None,
            ))
        return agents

    def digest(self) -> str:
        return hashlib.sha256(dumps(self).encode()).hexdigest()[:16]


def dumps(config: ScenarioConfig) -> str:
    return json.dumps(config.model_dump(mode="json", exclude_none=True), sort_keys=True, separators=(",", ":"))


def save(config: ScenarioConfig, path) -> None:
    text = json.dumps(config.model_dump(mode="json", exclude_none=True), indent=2, sort_keys=True)
    Path(path).write_text(text + "\n")


def loads(text: str) -> ScenarioConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(exc.msg, exc.lineno) from None
    try:
        return ScenarioConfig.model_validate(data)
    except ValidationError as exc:
        err = exc.errors()[0]
        where = ".".join(str(p) for p in err["loc"]) or "<root>"
        raise ConfigError(f"{where}: {err['msg']}", _locate(text, err["loc"])) from None


def load(path) -> ScenarioConfig:
    return loads(Path(path).read_text())


def _locate(text: str, loc) -> int | None:
    """Best-effort line of the JSON value addressed by a validation ``loc``."""
    pos = 0
    found = None
    for key in loc:
        if not isinstance(key, str):
            continue
        hit = text.find(f'"{key}"', pos)
        if hit < 0:
            continue
        pos = hit
        found = text.count("\n", 0, hit) + 1
    if found is None:
        return 1 if text else None
    return found
