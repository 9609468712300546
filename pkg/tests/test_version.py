"""Guard the single-sourced package version.

``discrete_interaction/__init__.py`` holds the one version literal and
``setup.py`` parses it at build time, so the importable ``__version__`` and
the packaged version cannot drift.
"""

from __future__ import annotations

import re
from pathlib import Path

import discrete_interaction

REPO_ROOT = Path(__file__).resolve().parent.parent
INIT_PY = REPO_ROOT / "discrete_interaction" / "__init__.py"
SETUP_PY = REPO_ROOT / "setup.py"

# Same pattern as _read_version() in setup.py.
_VERSION_RE = re.compile(r'^__version__\s*=\s*["\']([^"\']+)["\']', re.M)


def test_version_literal_matches_runtime_attribute() -> None:
    match = _VERSION_RE.search(INIT_PY.read_text())
    assert match is not None, "__version__ literal not found in __init__.py"
    assert re.fullmatch(r"\d+\.\d+\.\d+([.\-+].+)?", discrete_interaction.__version__)
    assert match.group(1) == discrete_interaction.__version__


def test_setup_py_derives_version() -> None:
    source = SETUP_PY.read_text()
    hardcoded = re.search(r'version\s*=\s*["\'][^"\']+["\']', source)
    assert hardcoded is None, f"setup.py hardcodes a version literal ({hardcoded.group(0)!r})"
    assert "_read_version()" in source
