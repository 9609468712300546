"""Batch experiment entrypoint: ``discrete_interaction.cli.run:main``.

The ``run`` flow:

    1. Check the environment-driven ``Config`` (``Config.validate()``).
    2. Parse the config file and validate it against
       ``schema/experiment.v1.json``. Fail fast with one line per violation,
       ``<line>:<column> <dotted.path>: <message>``, sorted by path. Nothing
       is written before validation passes.
    3. Resolve defaults via ``conventions.resolve`` (pure). ``--out`` and
       ``--format`` win over the config, which wins over ``DI_OUTPUT_DIR`` /
       ``DI_OUTPUT_FORMAT``.
    4. Dispatch to the experiment through ``map_experiment`` and execute it.
    5. Write ``<experiment>-<metric>.csv|json`` per metric table and
       ``<experiment>-report.json`` echoing the resolved parameters, the
       produced files and every check. The report carries no timing so
       identical configs give identical artifacts.

Exit codes: 0 when every check passed, 1 when a check failed or the
experiment raised, 2 for usage and config errors.

Configs are JSON (the canonical format) or YAML. YAML files go through the
YAML 1.1 safe loader, where ``1e-3`` is a string; write ``0.001`` instead.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple

import pandas as pd
import yaml
from jsonschema import Draft7Validator, ValidationError

from ..config import Config
from ..errors import DIError
from ..experiments.base import CheckResult
from ..utils.constants import BOLD, GREEN, RED, RESET, OutputFormat
from ..utils.experiments_mapping import list_experiments, map_experiment
from ..utils.logging import setup_logging
from .conventions import ResolvedExperiment, resolve


logger = logging.getLogger(__name__)


# The schema is bundled inside the package at discrete_interaction/schema/,
# one parent up from this file, so it is found after a pip install too.
_SCHEMA_PATH = Path(__file__).resolve().parent.parent / "schema" / "experiment.v1.json"


# ---------------------------------------------------------------------------
# Run report
# ---------------------------------------------------------------------------

@dataclass
class RunReport:
    """Outcome of one ``run``.

    Attributes:
        experiment: Experiment name
        parameters: Resolved parameters the experiment ran with
        files: Artifact file names, relative to the output directory
        checks: Built-in assertions in evaluation order
        wall_time: Seconds spent in the experiment; not written to disk
    """

    experiment: str
    parameters: Dict[str, Any]
    files: List[str] = field(default_factory=list)
    checks: List[CheckResult] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "experiment": self.experiment,
            "parameters": self.parameters,
            "files": list(self.files),
            "checks": [c.to_dict() for c in self.checks],
            "passed": self.passed,
        }


def run_experiment(resolved: ResolvedExperiment) -> RunReport:
    """Execute a resolved experiment and write its artifacts.

    Args:
        resolved: Output of :func:`conventions.resolve`

    Returns:
        RunReport for the run; its report file is already on disk

    Raises:
        DIError: an experiment hit a documented numerical error
    """
    experiment = map_experiment(resolved.experiment)
    start = time.perf_counter()
    result = experiment.execute(resolved.parameters)
    wall_time = time.perf_counter() - start

    out_dir = Path(resolved.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = []
    for metric, table in result.tables.items():
        path = out_dir / f"{resolved.experiment}-{metric}.{resolved.format}"
        _write_table(table, path, resolved.format)
        files.append(path.name)

    report = RunReport(
        experiment=resolved.experiment,
        parameters=resolved.parameters,
        files=files,
        checks=result.checks,
        wall_time=wall_time,
    )
    report_path = out_dir / f"{resolved.experiment}-report.json"
    report_path.write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    logger.info(f"Wrote {len(files)} table(s) and {report_path.name} to {out_dir} in {wall_time:.2f}s")
    return report


def _write_table(table: pd.DataFrame, path: Path, fmt: str) -> None:
    if fmt == OutputFormat.JSON:
        table.to_json(path, orient="records", indent=2, double_precision=15)
    else:
        table.to_csv(path, index=False)


# ---------------------------------------------------------------------------
# Public entrypoint
# ---------------------------------------------------------------------------

def main(argv: List[str] | None = None) -> int:
    """Entrypoint registered as the ``di-lab`` console script.

    Returns the process exit code; the console-script wrapper turns it into
    ``sys.exit``. Returning rather than raising keeps it testable in pytest.
    """
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse has already printed usage; --help exits 0
        return 0 if exc.code == 0 else 2

    if args.command == "list":
        return _list_command()
    if args.command == "validate":
        return _validate_command(Path(args.config))
    return _run_command(Path(args.config), args.out, args.format)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="di-lab",
        description="Run discrete-interaction numerical experiments from config files.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    subparsers.add_parser("list", help="list the available experiments")

    validate = subparsers.add_parser("validate", help="check a config file against the schema")
    validate.add_argument("--config", required=True, help="path to a JSON or YAML config")

    run = subparsers.add_parser("run", help="run the experiment a config file names")
    run.add_argument("--config", required=True, help="path to a JSON or YAML config")
    run.add_argument("--out", default=None, help="artifact directory (overrides the config)")
    run.add_argument(
        "--format",
        default=None,
        choices=OutputFormat.get_all_formats(),
        help="table format (overrides the config)",
    )
    return parser


def _list_command() -> int:
    for name, description in list_experiments():
        print(f"{name:<20} {description}")
    return 0


def _validate_command(path: Path) -> int:
    _, failure = _load_and_validate(path)
    if failure is not None:
        return _fail(failure)
    print("ok")
    return 0


def _run_command(path: Path, out: Optional[str], fmt: Optional[str]) -> int:
    config = Config()
    try:
        config.validate()
    except ValueError as e:
        return _fail(str(e))

    raw_config, failure = _load_and_validate(path)
    if raw_config is None:
        return _fail(failure or f"{path}: empty config")

    resolved = resolve(
        raw_config,
        out=out,
        fmt=fmt,
        default_output_dir=config.OUTPUT_DIR,
        default_format=config.OUTPUT_FORMAT,
    )
    setup_logging(config)

    try:
        report = run_experiment(resolved)
    except DIError as exc:
        print(f"{resolved.experiment} failed: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        # Anything else is still a failed run, reported as one line rather
        # than a traceback.
        logger.debug("Experiment raised", exc_info=True)
        print(f"{resolved.experiment} failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1

    _print_summary(report)
    if not report.passed:
        for check in report.checks:
            if not check.passed:
                print(f"{report.experiment}: check {check.name} failed: {check.message}", file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------
# Loading and validation
# ---------------------------------------------------------------------------

def _load_schema() -> Dict[str, Any]:
    return json.loads(_SCHEMA_PATH.read_text(encoding="utf-8"))


def _load_and_validate(path: Path) -> Tuple[Optional[Dict[str, Any]], Optional[str]]:
    """Parse and schema-check a config file.

    Returns ``(config, None)`` on success and ``(None, message)`` otherwise.
    """
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        return None, f"{path}: cannot read config: {e.strerror or e}"

    try:
        raw_config = _parse(path, text)
    except json.JSONDecodeError as e:
        return None, f"{path}:{e.lineno}:{e.colno}: not valid JSON: {e.msg}"
    except yaml.YAMLError as e:
        return None, f"{path}:{_yaml_error_position(e)}: not valid YAML: {_yaml_problem(e)}"

    if not isinstance(raw_config, dict):
        return None, f"{path}: config must be a mapping at the top level (experiment / parameters / ...)."

    errors = list(_validate(raw_config))
    if errors:
        root = _compose(text)
        return None, (
            f"{path}: {len(errors)} validation error(s):\n" + _format_errors(errors, root)
        )
    return raw_config, None


def _parse(path: Path, text: str) -> Any:
    # json keeps 1e-3 a float; the YAML 1.1 resolver would not
    if path.suffix.lower() == ".json":
        return json.loads(text)
    return yaml.safe_load(text)


def _compose(text: str) -> Optional[yaml.Node]:
    """Node tree carrying source positions, or None if it cannot be built."""
    try:
        return yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError:
        return None


def _yaml_error_position(error: yaml.YAMLError) -> str:
    mark = getattr(error, "problem_mark", None)
    if mark is None:
        return "?:?"
    return f"{mark.line + 1}:{mark.column + 1}"


def _yaml_problem(error: yaml.YAMLError) -> str:
    problem = getattr(error, "problem", None)
    return problem or str(error).splitlines()[0]


def _validate(raw_config: Dict[str, Any]) -> Iterable[ValidationError]:
    """Every validation error against the v1 schema, sorted by path.

    Sorting keeps the output deterministic regardless of jsonschema's
    internal traversal order.
    """
    validator = Draft7Validator(_load_schema())
    return sorted(
        validator.iter_errors(raw_config),
        key=lambda e: ([str(p) for p in e.absolute_path], e.message),
    )


def _format_errors(errors: List[ValidationError], root: Optional[yaml.Node]) -> str:
    """Format errors as ``  <line>:<column> <dotted.path>: <message>``."""
    lines = []
    for e in errors:
        path = [str(p) for p in e.absolute_path]
        at_key = False
        if e.validator == "additionalProperties" and isinstance(e.instance, dict):
            # point at the first unexpected key instead of its parent
            allowed = set(e.schema.get("properties", {}))
            extra = sorted(k for k in e.instance if k not in allowed)
            if extra:
                path = path + [str(extra[0])]
                at_key = True
        line, column = _locate(root, path, at_key)
        dotted = ".".join(str(p) for p in e.absolute_path) or "<root>"
        lines.append(f"  {line}:{column} {dotted}: {e.message}")
    return "\n".join(lines)


def _locate(root: Optional[yaml.Node], path: List[str], at_key: bool = False) -> Tuple[Any, Any]:
    """1-based line and column of the deepest node along ``path``.

    With ``at_key`` the last path element is reported at its key rather
    than its value.
    """
    if root is None:
        return "?", "?"
    node = root
    for depth, key in enumerate(path):
        child = None
        if isinstance(node, yaml.MappingNode):
            for key_node, value_node in node.value:
                if key_node.value == key:
                    last = depth == len(path) - 1
                    child = key_node if (at_key and last) else value_node
                    break
        elif isinstance(node, yaml.SequenceNode) and key.isdigit() and int(key) < len(node.value):
            child = node.value[int(key)]
        if child is None:
            break
        node = child
    mark = node.start_mark
    return mark.line + 1, mark.column + 1


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _print_summary(report: RunReport) -> None:
    colour = sys.stdout.isatty()
    passed = sum(c.passed for c in report.checks)
    title = f"{report.experiment}: {passed}/{len(report.checks)} checks passed"
    print(f"{BOLD}{title}{RESET}" if colour else title)
    width = max((len(c.name) for c in report.checks), default=0)
    for check in report.checks:
        status = "PASS" if check.passed else "FAIL"
        if colour:
            status = f"{GREEN if check.passed else RED}{status}{RESET}"
        print(f"  {status}  {check.name:<{width}}  {check.message}")
    for name in report.files:
        print(f"  wrote {name}")


def _fail(message: str) -> int:
    """Print to stderr and return 2. Logging may not be configured yet when
    a config fails, so a plain stderr write is the reliable channel."""
    print(message, file=sys.stderr)
    return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
