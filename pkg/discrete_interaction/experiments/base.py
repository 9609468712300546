"""Base Experiment Module.

This module provides the base experiment class and the check result data
structure shared by every batch experiment the CLI can run.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional
import logging
import math

import pandas as pd
from tqdm import tqdm

from discrete_interaction.config import Config
from discrete_interaction.utils.logging import setup_logging

config = Config()
setup_logging(config)
logger = logging.getLogger(__name__)
logger.setLevel(config.LOG_LEVEL)


@dataclass
class CheckResult:
    """Data class to hold the outcome of one built-in assertion.

    Attributes:
        name: Metric name, unique within an experiment
        passed: Whether the assertion held
        value: Measured value
        threshold: Bound the value was compared against
        message: Human-readable description of the comparison
    """

    name: str
    passed: bool
    value: float
    threshold: float
    message: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "value": _json_number(self.value),
            "threshold": _json_number(self.threshold),
            "message": self.message,
        }


@dataclass
class ExperimentResult:
    """Metric tables and checks produced by one experiment run.

    Attributes:
        experiment: Experiment name
        tables: Metric name -> DataFrame; column names carry units in brackets
        checks: Built-in assertions in evaluation order
    """

    experiment: str
    tables: Dict[str, pd.DataFrame] = field(default_factory=dict)
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed_checks(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.passed]


def _json_number(value: float) -> Any:
    """Floats that JSON cannot carry (inf, nan) are written as strings."""
    value = float(value)
    if math.isfinite(value):
        return value
    return str(value)


class BaseExperiment(ABC):
    """Base class for all batch experiments.

    Subclasses declare their ``name`` and a one-line ``description``;
    :meth:`run` receives fully resolved parameters.

    Attributes:
        name: Experiment name as used on the command line
        description: One-line summary printed by ``di-lab list``
    """

    name: str = ""
    description: str = ""

    def __init__(self) -> None:
        self.experiment_id = f"{self.name.replace('-', '_')}_experiment"
        self._checks: List[CheckResult] = []

    def execute(self, parameters: Dict[str, Any]) -> ExperimentResult:
        """Run the experiment and collect the checks it recorded."""
        self._checks = []
        logger.info(f"Running experiment {self.name}")
        tables = self.run(parameters)
        result = ExperimentResult(self.name, tables, list(self._checks))
        logger.info(
            f"Experiment {self.name}: {len(result.checks) - len(result.failed_checks())}"
            f"/{len(result.checks)} checks passed"
        )
        return result

    @abstractmethod
    def run(self, parameters: Dict[str, Any]) -> Dict[str, pd.DataFrame]:
        """Compute the metric tables, recording checks along the way.

        Args:
            parameters: Resolved parameters (defaults already merged)

        Returns:
            Mapping of metric name to table
        """
        pass

    def _check_below(self, name: str, value: float, threshold: float, what: str = "") -> CheckResult:
        return self._create_check(name, value < threshold, value, threshold,
                                  f"{what or name} = {value:.3e} (limit {threshold:.1e})")

    def _check_at_least(self, name: str, value: float, threshold: float, what: str = "") -> CheckResult:
        return self._create_check(name, value >= threshold, value, threshold,
                                  f"{what or name} = {value:.4g} (needs >= {threshold:.4g})")

    def _check_true(self, name: str, condition: bool, message: str) -> CheckResult:
        return self._create_check(name, bool(condition), 1.0 if condition else 0.0, 1.0, message)

    def _create_check(
        self,
        name: str,
        passed: bool,
        value: float,
        threshold: float,
        message: Optional[str] = None,
    ) -> CheckResult:
        """Create and record a check result.

        Args:
            name: Metric name
            passed: Whether the check held
            value: Measured value
            threshold: Bound it was compared against
            message: Description of the comparison

        Returns:
            CheckResult object
        """
        check = CheckResult(
            name=name,
            passed=bool(passed),
            value=float(value),
            threshold=float(threshold),
            message=message or "",
        )
        if not check.passed:
            logger.warning(f"{self.name}: check {name} failed: {check.message}")
        self._checks.append(check)
        return check

    def _create_progress_bar(self, total: int, desc: str = None) -> tqdm:
        """Create a progress bar for long experiment loops.

        Args:
            total: Total number of items to process
            desc: Description for the progress bar

        Returns:
            tqdm progress bar instance
        """

        progress_desc = desc or f"{self.name} - Running"
        return tqdm(
            total=total,
            desc=progress_desc,
            unit="items",
            leave=False,
            ncols=100,
            disable=not config.SHOW_PROGRESS,
            bar_format="{l_bar}{bar}| {n_fmt}/{total_fmt} [{elapsed}<{remaining}, {rate_fmt}]",
        )

    def __str__(self) -> str:
        """String representation of the experiment."""
        return f"{self.__class__.__name__}(name='{self.name}')"

    def __repr__(self) -> str:
        """Detailed string representation of the experiment."""
        return (
            f"{self.__class__.__name__}(name='{self.name}', id='{self.experiment_id}')"
        )
