"""Exception hierarchy shared by all simulator modules."""

from typing import List, Optional


class WesSimError(Exception):
    """Base class for every error raised by the simulator."""


class InvalidParamsError(WesSimError):
    """Workflow generation parameters violate their invariants."""


class WorkflowValidationError(WesSimError):
    """An operation required a valid DAG but received an invalid one."""

    def __init__(self, message: str, violations: Optional[List] = None):
        super().__init__(message)
        self.violations = list(violations or [])


class UnknownPresetError(WesSimError):
    """A cluster preset name was not recognised."""


class InfrastructureError(WesSimError):
    """A staging or transfer request cannot be served by the infrastructure."""


class UnschedulableTaskError(WesSimError):
    """A task can never be placed on any node of the cluster."""

    def __init__(self, task_id: str, reason: str):
        super().__init__(f"task {task_id!r} is unschedulable: {reason}")
        self.task_id = task_id
        self.reason = reason


class ProfileCoverageError(WesSimError):
    """The profile set does not define a template used by the workflow."""


class SimulationError(WesSimError):
    """The simulation reached an inconsistent state (e.g. deadlock)."""


class CostModelError(WesSimError):
    """Cost arithmetic received non-positive inputs."""


class CalibrationError(WesSimError):
    """The calibration harness was given unusable targets."""
