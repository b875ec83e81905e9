"""Run configuration: one JSON document with a section per concern."""

from __future__ import annotations

import os
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from dladmm.admm.model import Architecture, Hyperparams, RiskSpec
from dladmm.baselines.base import OptimizerSpec
from dladmm.data.dataset import split_paths
from dladmm.errors import ConfigurationError, DatasetError

OUTPUT_DIR_ENV = "DLADMM_OUTPUT_DIR"


class DataConfig(BaseModel):
    """Where the IDX files live and how much of each split to use."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: Literal["mnist", "fashion_mnist"] = "mnist"
    dir: Path
    num_classes: int = Field(default=10, ge=2)
    train_subsample: int | None = Field(default=None, ge=1)
    test_subsample: int | None = Field(default=None, ge=1)
    seed: int = 0


class BenchConfig(BaseModel):
    """Scaling sweep: hidden widths at a fixed sample count, sample counts at a fixed width, each per ρ."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    hidden_sizes: tuple[int, ...] = (50, 100, 200, 400)
    sample_counts: tuple[int, ...] = (1000, 2000, 4000)
    rhos: tuple[float, ...] = (1.0,)
    hidden_layers: int = Field(default=2, ge=1)
    fixed_samples: int = Field(default=1000, ge=1)
    fixed_hidden: int = Field(default=100, ge=1)
    warmup_iters: int = Field(default=2, ge=0)
    timed_iters: int = Field(default=5, ge=5)


class OutputConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    dir: Path = Path("runs")
    metrics_format: Literal["csv", "jsonl"] = "csv"
    checkpoint: bool = True

    def resolved_dir(self) -> Path:
        """``DLADMM_OUTPUT_DIR`` if set, else ``dir``."""
        override = os.environ.get(OUTPUT_DIR_ENV)
        return Path(override) if override else self.dir


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    data: DataConfig
    model: Architecture
    hyper: Hyperparams = Hyperparams()
    risk: RiskSpec = RiskSpec()
    baseline: OptimizerSpec = OptimizerSpec()
    bench: BenchConfig = BenchConfig()
    output: OutputConfig = OutputConfig()

    @classmethod
    def parse(cls, text: str, source: str = "<config>") -> RunConfig:
        try:
            return cls.model_validate_json(text)
        except ValidationError as e:
            raise ConfigurationError(f"{source}: {e}") from e

    @classmethod
    def load(cls, path: str | Path) -> RunConfig:
        """Read and validate a config file.

        Raises:
            ConfigurationError: The file is unreadable, not JSON or fails validation.

        """
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigurationError(f"cannot read config {path}: {e.strerror or e}") from e
        return cls.parse(text, source=str(path))

    def dump(self) -> str:
        return self.model_dump_json(indent=2)

    def check_paths(self) -> None:
        """Fail with :class:`DatasetError` unless both splits are present under ``data.dir``."""
        if not self.data.dir.is_dir():
            raise DatasetError(f"dataset directory not found: {self.data.dir}")
        split_paths(self.data.dir, "train")
        split_paths(self.data.dir, "test")
