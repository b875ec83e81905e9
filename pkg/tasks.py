"""Invoke tasks for dladmm.

This module provides task automation for the dladmm project using Invoke.
All tasks can be run using `uv run invoke <task-name>`.

## Available Tasks

### Development Setup
- `setup` - Complete development environment setup
- `install` - Install dependencies with uv

### Testing
- `test` - Run tests (--slow for the MNIST experiments, --startup, --coverage)
- `nox` - Run Nox sessions for multi-environment testing

### Code Quality
- `format_code` - Format code with Ruff (--check for validation only)
- `lint` - Run linting with Ruff
- `type_check` - Run type checking with MyPy
- `check_all` - Run all code quality checks

### Experiments
- `train` - Train with dlADMM from a config (default: configs/mnist_desk.json)
- `baseline` - Run the configured gradient baseline
- `bench` - Run the scaling benchmark

### Maintenance
- `clean` - Clean build artifacts, caches and run outputs (--runs)
- `build` - Build the package

## Usage Examples

```bash
uv run invoke setup
uv run invoke test
uv run invoke test --slow
uv run invoke train --config configs/mnist_converge.json
uv run invoke bench
```

## Configuration

Tasks are configured with the following constants:
- PACKAGE_NAME: "dladmm"
- TEST_DIR: "tests"
- CONFIGS_DIR: "configs"
"""

import sys
from typing import Any

from invoke import Context, task  # type: ignore[import-not-found]

PACKAGE_NAME = "dladmm"
TEST_DIR = "tests"
CONFIGS_DIR = "configs"


def run_uv(c: Context, command: str, *args: str) -> Any:
    """Run a uv command and stop on failure."""
    full_command = f"uv {command}"
    if args:
        full_command += " " + " ".join(args)

    result = c.run(full_command, warn=True)
    if result.exited != 0:
        sys.exit(result.exited)
    return result


@task  # type: ignore[misc]
def show_help(c: Context) -> None:
    """Show available tasks."""
    c.run("invoke --list")


@task  # type: ignore[misc]
def install(c: Context) -> None:
    """Install dependencies with uv."""
    run_uv(c, "sync", "--dev")


@task  # type: ignore[misc]
def test(c: Context, slow: bool = False, startup: bool = False, coverage: bool = False) -> None:
    """Run tests."""
    if slow:
        run_uv(c, "run", "pytest", f"{TEST_DIR}/", "-m", "slow")
    elif startup:
        run_uv(c, "run", "pytest", f"{TEST_DIR}/test_startup.py")
    elif coverage:
        run_uv(c, "run", "pytest", f"{TEST_DIR}/", "--cov", PACKAGE_NAME, "--cov-report=html", "--cov-report=term")
    else:
        run_uv(c, "run", "pytest", f"{TEST_DIR}/")


@task  # type: ignore[misc]
def format_code(c: Context, check: bool = False) -> None:
    """Format code with Ruff."""
    if check:
        run_uv(c, "run", "ruff", "format", "--check", ".")
    else:
        run_uv(c, "run", "ruff", "check", ".", "--fix")
        run_uv(c, "run", "ruff", "format", ".")


@task  # type: ignore[misc]
def lint(c: Context) -> None:
    """Run linting with Ruff."""
    run_uv(c, "run", "ruff", "check", ".")


@task  # type: ignore[misc]
def type_check(c: Context) -> None:
    """Run type checking with mypy."""
    run_uv(c, "run", "mypy", f"{PACKAGE_NAME}/")


@task  # type: ignore[misc]
def check_all(c: Context) -> None:
    """Run all code quality checks."""
    lint(c)
    type_check(c)


@task  # type: ignore[misc]
def train(c: Context, config: str = f"{CONFIGS_DIR}/mnist_desk.json", log_level: str = "INFO") -> None:
    """Train with dlADMM."""
    run_uv(c, "run", "dladmm", "--log-level", log_level, "train", config)


@task  # type: ignore[misc]
def baseline(c: Context, config: str = f"{CONFIGS_DIR}/mnist_desk.json") -> None:
    """Run the configured gradient baseline."""
    run_uv(c, "run", "dladmm", "baseline", config)


@task  # type: ignore[misc]
def bench(c: Context, config: str = f"{CONFIGS_DIR}/bench.json") -> None:
    """Run the scaling benchmark."""
    run_uv(c, "run", "dladmm", "bench", config)


@task  # type: ignore[misc]
def build(c: Context) -> None:
    """Build the package."""
    run_uv(c, "build")


@task  # type: ignore[misc]
def clean(c: Context, runs: bool = False) -> None:
    """Clean build artifacts and temporary files."""
    c.run("rm -rf build/ dist/ *.egg-info/ .pytest_cache/ .mypy_cache/ htmlcov/ .coverage", warn=True)
    c.run("find . -type d -name '__pycache__' -exec rm -rf {} + 2>/dev/null || true", warn=True)
    if runs:
        c.run("rm -rf runs/", warn=True)


@task  # type: ignore[misc]
def setup(c: Context) -> None:
    """Complete development setup."""
    install(c)
    format_code(c)
    check_all(c)


@task  # type: ignore[misc]
def ci(c: Context) -> None:
    """Run CI pipeline locally."""
    check_all(c)
    test(c)


@task  # type: ignore[misc]
def nox(c: Context, session: str = "test") -> None:
    """Run Nox sessions."""
    run_uv(c, "run", "nox", "-s", session)


@task(default=True)  # type: ignore[misc]
def default(c: Context) -> None:
    """Show help by default."""
    show_help(c)
