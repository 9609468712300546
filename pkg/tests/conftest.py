"""Shared fixtures for the test suite.

Numerical modules snapshot ``config = Config()`` at import time but read
``os.environ`` lazily on each property access, so tests set env vars via
``monkeypatch.setenv`` and the module-level config picks them up. The
``clean_env`` fixture strips the env vars these tests touch so a developer's
shell environment (a stray ``DI_HBAR`` for instance) can't leak into a run.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, Optional

import pytest

from discrete_interaction.operators import Grid1D
from discrete_interaction.utils.constants import Boundary


_ENV_VARS = (
    "DI_HBAR", "DI_STABILITY_FACTOR", "DI_EXACT_TESTING_TOL",
    "DI_OUTPUT_DIR", "DI_OUTPUT_FORMAT", "DI_PROGRESS", "LOG_LEVEL",
)


@pytest.fixture
def clean_env(monkeypatch):
    """Strip env vars the library config reads, so the host shell can't leak in."""
    for var in _ENV_VARS:
        monkeypatch.delenv(var, raising=False)
    return monkeypatch


@pytest.fixture
def periodic_grid():
    """Build a symmetric periodic grid ``[-x_max, x_max)`` with ``n`` points."""

    def _make(n: int = 64, x_max: float = 10.0) -> Grid1D:
        return Grid1D(-x_max, x_max, n, Boundary.PERIODIC)

    return _make


@pytest.fixture
def vanishing_grid():
    """Build a grid whose wave functions vanish outside ``[x_min, x_max]``."""

    def _make(n: int = 64, x_min: float = -10.0, x_max: float = 10.0) -> Grid1D:
        return Grid1D(x_min, x_max, n, Boundary.VANISHING)

    return _make


@pytest.fixture
def write_config(tmp_path):
    """Write an experiment config and return its path.

    ``body`` is serialized as JSON unless ``raw=`` supplies the file text
    verbatim (for malformed cases). ``name`` picks the file name, and with
    it JSON or YAML parsing.
    """

    def _write(
        body: Optional[Dict[str, Any]] = None,
        *,
        name: str = "config.json",
        raw: Optional[str] = None,
    ) -> Path:
        path = tmp_path / name
        text = raw if raw is not None else json.dumps(body, indent=2)
        path.write_text(text, encoding="utf-8")
        return path

    return _write
