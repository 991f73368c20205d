"""
Task profile bundles: template constants plus file-size constants.

The bundled ``default`` profile is committed data, so simulations can be
reproduced without re-running the fit.
"""

import logging
from importlib import resources
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple, Union

from pydantic import BaseModel, Field

from wes_sim.config import settings
from wes_sim.errors import CalibrationError, ProfileCoverageError
from wes_sim.workflow.schemas import TaskTemplate

logger = logging.getLogger(__name__)

DEFAULT_PROFILE_NAME = "default"
DICTIONARY_GB = 2.6

# Template -> allowed resident memory range in GB
MEMORY_RANGES: Dict[str, Tuple[float, float]] = {
    "mutect": (3.0, 10.0),
    "align_pipeline": (8.0, 14.0),
    "bwa_mem": (8.0, 14.0),
}


class SizeConstants(BaseModel):
    """File sizes the workflow never states and calibration has to supply."""
    input_fastq_gb: float = Field(default=8.0, gt=0, description="Size of one read set")
    reference_genome_gb: float = Field(default=5.0, ge=0, description="Indexed reference genome")
    reference_dict_gb: float = Field(default=DICTIONARY_GB, ge=0, description="Reference dictionary")


class ProfileSet(BaseModel):
    """Named bundle of task templates and file-size constants."""
    name: str = DEFAULT_PROFILE_NAME
    description: str = ""
    templates: Dict[str, TaskTemplate] = Field(default_factory=dict)
    sizes: SizeConstants = Field(default_factory=SizeConstants)

    def template(self, name: str) -> TaskTemplate:
        """Template by name; raises ProfileCoverageError if the bundle lacks it."""
        try:
            return self.templates[name]
        except KeyError:
            raise ProfileCoverageError(
                f"profile set {self.name!r} does not define template {name!r}"
            ) from None

    def missing(self, names: Iterable[str]) -> List[str]:
        return sorted(set(names) - set(self.templates))

    @property
    def alignment_gb(self) -> float:
        """Alignment size implied by the fused alignment template."""
        align = self.templates.get("align_pipeline")
        if align is None:
            return 0.0
        return align.output_gb(self.sizes.input_fastq_gb + self.sizes.reference_genome_gb)

    def range_violations(self) -> List[str]:
        """Memory and size constants outside their documented ranges."""
        problems = []
        for name, (low, high) in MEMORY_RANGES.items():
            template = self.templates.get(name)
            if template is None:
                continue
            memory = template.memory_for(0.0)
            if not low <= memory <= high:
                problems.append(f"{name} memory {memory} GB outside [{low}, {high}]")
        if abs(self.sizes.reference_dict_gb - DICTIONARY_GB) > 1e-9:
            problems.append(f"reference dictionary is {self.sizes.reference_dict_gb} GB, expected {DICTIONARY_GB}")
        return problems

    def with_work(self, name: str, serial_s: Optional[float] = None,
                  parallel_s_per_gb: Optional[float] = None) -> "ProfileSet":
        """Copy with one template's work constants replaced."""
        template = self.template(name)
        work = template.work_model.model_copy(update={
            key: value for key, value in
            (("serial_s", serial_s), ("parallel_s_per_gb", parallel_s_per_gb)) if value is not None
        })
        templates = dict(self.templates)
        templates[name] = template.model_copy(update={"work_model": work})
        return self.model_copy(update={"templates": templates})

    def with_sizes(self, **sizes: float) -> "ProfileSet":
        return self.model_copy(update={"sizes": self.sizes.model_copy(update=sizes)})

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_text(self.model_dump_json(indent=2), encoding="utf-8")


def _bundled_text() -> str:
    return resources.files("wes_sim.calibration").joinpath("data/default_profiles.json").read_text(encoding="utf-8")


def load_profile_set(source: Optional[Union[str, Path]] = None) -> ProfileSet:
    """
    Load a profile set.

    Args:
        source: ``"default"`` for the bundled profile, a JSON file path, or None
            to use WES_SIM_PROFILES_PATH (falling back to the bundled profile)

    Returns:
        The validated ProfileSet

    Raises:
        CalibrationError: If the file does not exist
    """
    if source is None:
        source = settings.PROFILES_PATH or DEFAULT_PROFILE_NAME
    if str(source) == DEFAULT_PROFILE_NAME:
        return ProfileSet.model_validate_json(_bundled_text())

    path = Path(source)
    if not path.is_file():
        raise CalibrationError(f"profile file not found: {path}")
    profiles = ProfileSet.model_validate_json(path.read_text(encoding="utf-8"))
    logger.debug(f"Loaded profile set {profiles.name!r} from {path}")
    return profiles


def load_default_profiles() -> ProfileSet:
    return load_profile_set(DEFAULT_PROFILE_NAME)
