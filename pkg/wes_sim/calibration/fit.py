"""
Calibration harness: fit profile constants so simulated makespans match
observed ones.

The objective (maximum relative makespan error over all targets) is piecewise
constant in scheduling decisions, so the search is a coordinate search on a
logarithmic grid of multipliers with geometric step shrinking instead of a
gradient method.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from importlib import resources
from pathlib import Path
from typing import Dict, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field, model_validator

from wes_sim.config import settings
from wes_sim.engine.model import SimOptions, default_sim_options
from wes_sim.engine.simulator import simulate
from wes_sim.errors import CalibrationError
from wes_sim.infra.presets import load_cluster
from wes_sim.scheduling.policy import Policy, default_policy
from wes_sim.workflow.generator import WesParams, generate_wes
from wes_sim.workflow.schemas import DagDocument, WorkflowDag
from .profiles import ProfileSet, load_default_profiles

logger = logging.getLogger(__name__)

WORK_FIELDS = ("serial_s", "parallel_s_per_gb")
SIZE_FIELDS = ("input_fastq_gb", "reference_genome_gb")
GRID_POINTS = 9
INITIAL_SPAN = 4.0


class Knob(BaseModel):
    """One constant the search may scale: a template work constant or a file size."""
    template: Optional[str] = None
    field: Literal["serial_s", "parallel_s_per_gb", "input_fastq_gb", "reference_genome_gb"]

    @model_validator(mode="after")
    def _check_owner(self) -> "Knob":
        if self.field in WORK_FIELDS and not self.template:
            raise ValueError(f"{self.field} needs a template")
        if self.field in SIZE_FIELDS and self.template:
            raise ValueError(f"{self.field} is a size constant, not a template field")
        return self

    @property
    def name(self) -> str:
        return f"{self.template or 'sizes'}.{self.field}"

    def get(self, profile: ProfileSet) -> float:
        if self.template:
            return getattr(profile.template(self.template).work_model, self.field)
        return getattr(profile.sizes, self.field)

    def set(self, profile: ProfileSet, value: float) -> ProfileSet:
        if self.template:
            return profile.with_work(self.template, **{self.field: value})
        return profile.with_sizes(**{self.field: value})


DEFAULT_KNOBS: Tuple[Knob, ...] = (
    Knob(template="align_pipeline", field="parallel_s_per_gb"),
    Knob(template="align_pipeline", field="serial_s"),
    Knob(template="mutect", field="serial_s"),
    Knob(template="mutect", field="parallel_s_per_gb"),
    Knob(template="split_regions", field="serial_s"),
    Knob(field="input_fastq_gb"),
)


class FitTarget(BaseModel):
    """An observed makespan and the run configuration that produced it."""
    name: str
    cluster: str = Field(default="YC", description="Preset name or cluster JSON path")
    workflow: Optional[WesParams] = None
    dag: Optional[DagDocument] = None
    policy: Optional[Policy] = None
    cache_enabled: bool = False
    options: Optional[SimOptions] = None
    observed_makespan_h: float = Field(gt=0)

    @model_validator(mode="after")
    def _one_workflow(self) -> "FitTarget":
        if (self.workflow is None) == (self.dag is None):
            raise ValueError("a fit target needs exactly one of workflow / dag")
        return self

    def sim_options(self, cluster_name: str) -> SimOptions:
        return self.options or default_sim_options(cluster_name, self.cache_enabled)


class TargetFile(BaseModel):
    """JSON layout of a targets file."""
    targets: List[FitTarget] = Field(min_length=1)
    knobs: Optional[List[Knob]] = None


class FitResult(BaseModel):
    """Best profile found and how far it is from each target."""
    profile: ProfileSet
    max_error: float
    errors: Dict[str, float]
    within_tolerance: bool
    rounds: int = 0
    evaluations: int = 0


def load_targets(path: Union[str, Path, None] = None) -> TargetFile:
    """Targets file at ``path``, or the bundled reference targets."""
    if path is None:
        bundled = resources.files("wes_sim.calibration").joinpath("data/default_targets.json")
        text = bundled.read_text(encoding="utf-8")
        return TargetFile.model_validate_json(text)
    path = Path(path)
    if not path.is_file():
        raise CalibrationError(f"targets file not found: {path}")
    return TargetFile.model_validate_json(path.read_text(encoding="utf-8"))


def _target_dag(target: FitTarget, profile: ProfileSet) -> WorkflowDag:
    if target.dag is not None:
        return WorkflowDag.from_document(target.dag)
    return generate_wes(target.workflow, profile)


def evaluate(profile: ProfileSet, targets: Sequence[FitTarget]) -> Dict[str, float]:
    """Relative makespan error per target name."""
    errors: Dict[str, float] = {}
    for target in targets:
        cluster = load_cluster(target.cluster)
        policy = target.policy or default_policy(cluster.name)
        options = target.sim_options(cluster.name)
        _, report = simulate(_target_dag(target, profile), cluster, policy, profile, options)
        errors[target.name] = abs(report.makespan_h - target.observed_makespan_h) / target.observed_makespan_h
    return errors


def _evaluate_job(job: Tuple[ProfileSet, Sequence[FitTarget]]) -> Dict[str, float]:
    return evaluate(*job)


def _multipliers(span: float) -> List[float]:
    half = math.log(span)
    grid = np.exp(np.linspace(-half, half, GRID_POINTS))
    return [float(value) for value in grid if abs(value - 1.0) > 1e-12]


def fit(
    targets: Sequence[FitTarget],
    start: Optional[ProfileSet] = None,
    knobs: Optional[Sequence[Knob]] = None,
    tolerance: Optional[float] = None,
    max_rounds: Optional[int] = None,
    workers: int = 1,
) -> FitResult:
    """
    Minimize the maximum relative makespan error over ``targets``.

    Each round scales every knob in turn by the multipliers of the current
    grid and keeps the best strictly improving candidate. A round without
    improvement narrows the grid; the search stops when the grid step falls
    below WES_SIM_FIT_MIN_STEP or after ``max_rounds`` rounds.

    Args:
        targets: Observed makespans with their run configurations
        start: Initial profile (bundled default if None)
        knobs: Constants to search (a default set if None)
        tolerance: Acceptable maximum error (WES_SIM_FIT_TOLERANCE if None)
        max_rounds: Round limit (WES_SIM_FIT_MAX_ROUNDS if None)
        workers: Processes evaluating candidates; results do not depend on it

    Returns:
        FitResult with the best profile; ``within_tolerance`` is False when
        the tolerance was not reached

    Raises:
        CalibrationError: If there are no targets or no usable knobs
    """
    if not targets:
        raise CalibrationError("fit needs at least one target")
    profile = start or load_default_profiles()
    knobs = [knob for knob in (knobs or DEFAULT_KNOBS) if knob.get(profile) > 0]
    if not knobs:
        raise CalibrationError("no knob with a positive starting value to search")
    tolerance = settings.FIT_TOLERANCE if tolerance is None else tolerance
    max_rounds = settings.FIT_MAX_ROUNDS if max_rounds is None else max_rounds

    errors = evaluate(profile, targets)
    best = max(errors.values())
    evaluations = 1
    span = INITIAL_SPAN
    rounds = 0
    executor = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        while rounds < max_rounds and best > 0:
            rounds += 1
            improved = False
            for knob in knobs:
                current = knob.get(profile)
                values = sorted(current * factor for factor in _multipliers(span))
                candidates = [knob.set(profile, value) for value in values]
                jobs = [(candidate, targets) for candidate in candidates]
                if executor is not None:
                    results = list(executor.map(_evaluate_job, jobs))
                else:
                    results = [_evaluate_job(job) for job in jobs]
                evaluations += len(jobs)
                # candidates are in ascending value order, so the first minimum is the smallest
                scores = [max(result.values()) for result in results]
                index = int(np.argmin(scores))
                if scores[index] < best - 1e-12:
                    profile, errors, best = candidates[index], results[index], scores[index]
                    improved = True
                    logger.debug(f"Round {rounds}: {knob.name} -> {values[index]:.6g} (max error {best:.4f})")
            logger.info(f"Fit round {rounds}: max error {best:.4f}, grid span x{span:.4g}")
            if not improved:
                span = math.sqrt(span)
                if math.log(span) / (GRID_POINTS // 2) < settings.FIT_MIN_STEP:
                    break
    finally:
        if executor is not None:
            executor.shutdown()

    within = best <= tolerance
    if not within:
        logger.warning(f"Fit missed tolerance {tolerance:.2f}: best max error {best:.4f}")
    return FitResult(
        profile=profile,
        max_error=best,
        errors=errors,
        within_tolerance=within,
        rounds=rounds,
        evaluations=evaluations,
    )
