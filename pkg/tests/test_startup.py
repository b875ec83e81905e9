#!/usr/bin/env python3
"""Regression tests for package imports and the ``python -m dladmm.cli`` entry point.

These run the CLI in a fresh interpreter so broken imports or entry-point wiring show up
even when the in-process tests pass.
"""

import importlib
import os
import subprocess
import sys
from pathlib import Path
from typing import Any

import pytest

PROJECT_ROOT = Path(__file__).parent.parent

MODULES = [
    "dladmm",
    "dladmm.errors",
    "dladmm.log",
    "dladmm.config",
    "dladmm.admm.model",
    "dladmm.admm.energy",
    "dladmm.admm.subproblems",
    "dladmm.admm.trainer",
    "dladmm.baselines.base",
    "dladmm.baselines.optimizers",
    "dladmm.baselines.backprop",
    "dladmm.baselines.runner",
    "dladmm.data.idx",
    "dladmm.data.dataset",
    "dladmm.cli.main",
    "dladmm.cli.metrics",
    "dladmm.cli.checkpoint",
    "dladmm.cli.bench",
]


class ExecutableNotFoundError(FileNotFoundError):
    """Executable not found or not accessible."""


def _safe_subprocess_run(cmd: list[str], **kwargs: Any) -> subprocess.CompletedProcess[str]:
    """Run subprocess with validated command to prevent injection."""
    if not cmd or not Path(cmd[0]).exists() or not os.access(cmd[0], os.X_OK):
        raise ExecutableNotFoundError()
    kwargs.setdefault("check", False)
    return subprocess.run(cmd, **kwargs)  # noqa: S603, PLW1510


def _run_cli(*args: str) -> subprocess.CompletedProcess[str]:
    return _safe_subprocess_run(
        [sys.executable, "-m", "dladmm.cli", *args],
        cwd=PROJECT_ROOT,
        capture_output=True,
        text=True,
        timeout=120,
    )


class TestStartup:
    """Imports and entry point."""

    @pytest.mark.parametrize("module", MODULES)
    def test_imports(self, module: str) -> None:
        """Every module imports cleanly."""
        assert importlib.import_module(module) is not None

    def test_module_help(self) -> None:
        """``python -m dladmm.cli --help`` lists every command."""
        result = _run_cli("--help")
        assert result.returncode == 0, result.stderr
        for command in ("train", "baseline", "bench", "eval"):
            assert command in result.stdout

    def test_missing_config_exit_code(self, tmp_path: Path) -> None:
        """A missing config file is reported with exit code 2 from a fresh process."""
        result = _run_cli("train", str(tmp_path / "missing.json"))
        assert result.returncode == 2
