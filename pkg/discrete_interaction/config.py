"""Lazy, env-driven configuration.

Every env-driven field is a ``@property`` that reads ``os.environ`` on
access. Module-level ``config = Config()`` snapshots in the numerical
modules stay valid even when env vars are set after those modules import,
e.g. a test that sets ``DI_HBAR`` after ``discrete_interaction.operators``
has already been imported.

Tests inject pinpoint values via ``Config(FIELD=value)``; instance
overrides win over env. Production callers pass no kwargs.
"""

from typing import Any, Dict, Optional
import os

from .utils.constants import LogLevel, OutputFormat


# Sentinel signalling "caller did not pass this field as an override".
_MISSING = object()

_TRUTHY = frozenset({"1", "true", "yes", "on"})


class Config:
    # Whitelist of valid override keys. A typo at the call site raises
    # immediately rather than silently no-op'ing.
    _ENV_FIELDS = frozenset({
        "HBAR",
        "STABILITY_FACTOR",
        "EXACT_TESTING_TOL",
        "OUTPUT_DIR",
        "OUTPUT_FORMAT",
        "SHOW_PROGRESS",
        "LOG_LEVEL",
    })

    # Fields whose properties unconditionally coerce via ``float(...)``;
    # ``None`` can't be coerced, so reject it at construction.
    _NUMERIC_FIELDS = frozenset({"HBAR", "STABILITY_FACTOR", "EXACT_TESTING_TOL"})

    def __init__(self, **overrides: Any) -> None:
        unknown = set(overrides) - self._ENV_FIELDS
        if unknown:
            raise TypeError(
                f"Config got unexpected keyword arguments: {sorted(unknown)}"
            )
        for field in self._NUMERIC_FIELDS & set(overrides):
            if overrides[field] is None:
                raise TypeError(
                    f"Config({field}=None) is invalid: {field} is numeric "
                    "and cannot be suppressed via None. Omit the kwarg to "
                    "fall back to env / default."
                )
        self._overrides: Dict[str, Any] = dict(overrides)

    def _override(self, name: str, default: Any = _MISSING) -> Any:
        """Return the per-instance override for ``name`` if one was passed,
        otherwise ``default`` (sentinel by default, callers branch on it)."""
        if name in self._overrides:
            return self._overrides[name]
        return default

    # ===== Physics =====
    # Units are natural: hbar defaults to 1 and every module accepts an
    # explicit value that wins over this one.
    @property
    def HBAR(self) -> float:
        ov = self._override("HBAR")
        raw = ov if ov is not _MISSING else os.environ.get("DI_HBAR", "1.0")
        return float(raw)

    @property
    def STABILITY_FACTOR(self) -> float:
        ov = self._override("STABILITY_FACTOR")
        raw = ov if ov is not _MISSING else os.environ.get("DI_STABILITY_FACTOR", "0.25")
        return float(raw)

    @property
    def EXACT_TESTING_TOL(self) -> float:
        ov = self._override("EXACT_TESTING_TOL")
        raw = ov if ov is not _MISSING else os.environ.get("DI_EXACT_TESTING_TOL", "1e-9")
        return float(raw)

    # ===== Artifacts =====
    @property
    def OUTPUT_DIR(self) -> str:
        ov = self._override("OUTPUT_DIR")
        return ov if ov is not _MISSING else os.environ.get("DI_OUTPUT_DIR", "results")

    @property
    def OUTPUT_FORMAT(self) -> str:
        ov = self._override("OUTPUT_FORMAT")
        return ov if ov is not _MISSING else os.environ.get("DI_OUTPUT_FORMAT", OutputFormat.CSV)

    @property
    def SHOW_PROGRESS(self) -> bool:
        ov = self._override("SHOW_PROGRESS")
        if ov is not _MISSING:
            return bool(ov)
        return os.environ.get("DI_PROGRESS", "").strip().lower() in _TRUTHY

    # ===== Logging =====
    @property
    def LOG_LEVEL(self) -> int:
        ov = self._override("LOG_LEVEL")
        if ov is not _MISSING:
            return ov if isinstance(ov, int) else LogLevel.get_level_code(ov)
        return LogLevel.get_level_code(os.environ.get("LOG_LEVEL", "WARNING"))

    def resolve_hbar(self, hbar: Optional[float]) -> float:
        """Return ``hbar`` when the caller passed one, else the configured value."""
        return self.HBAR if hbar is None else float(hbar)

    def validate(self) -> None:
        """Fail fast on physically meaningless settings.

        Called explicitly by the CLI entrypoint before any numerics run,
        rather than from ``__init__``, so module-level ``Config()``
        instances never blow up at import time.

        Raises:
            ValueError: with a single, comma-joined list of offending
                fields and their values.
        """
        problems = []

        try:
            if self.HBAR <= 0:
                problems.append(f"DI_HBAR must be positive (got {self.HBAR})")
        except ValueError:
            problems.append("DI_HBAR is not a number")

        try:
            factor = self.STABILITY_FACTOR
            if not 0 < factor <= 1:
                problems.append(
                    f"DI_STABILITY_FACTOR must lie in (0, 1] (got {factor})"
                )
        except ValueError:
            problems.append("DI_STABILITY_FACTOR is not a number")

        try:
            if self.EXACT_TESTING_TOL <= 0:
                problems.append(
                    f"DI_EXACT_TESTING_TOL must be positive (got {self.EXACT_TESTING_TOL})"
                )
        except ValueError:
            problems.append("DI_EXACT_TESTING_TOL is not a number")

        if not OutputFormat.is_valid_format(self.OUTPUT_FORMAT):
            problems.append(
                f"DI_OUTPUT_FORMAT must be one of {OutputFormat.get_all_formats()} "
                f"(got {self.OUTPUT_FORMAT!r})"
            )

        if problems:
            raise ValueError("Invalid configuration: " + ", ".join(problems) + ".")
