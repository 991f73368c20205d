"""
Generator for the mouse whole-exome somatic variant-calling workflow.

Every control exome is paired with every tumor exome. Each pair aligns both of
its samples (so alignments are duplicated across pairs), optionally splits each
alignment into regions, calls variants per region, filters per region, merges
the per-region calls and compresses the merged result.
"""

import logging
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field

from wes_sim.calibration.profiles import ProfileSet, load_profile_set
from wes_sim.errors import InvalidParamsError
from .dag import signature
from .schemas import FileArtifact, ParamValue, TaskInstance, TaskTemplate, WorkflowDag

logger = logging.getLogger(__name__)

FUSED_ALIGNMENT = "align_pipeline"
UNFUSED_ALIGNMENT = ("trimadap", "bwa_mem", "samblaster", "samtools_sort")
ALIGNERS = (FUSED_ALIGNMENT, UNFUSED_ALIGNMENT[1])
SPLIT = "split_regions"
MUTECT = "mutect"
FILTER = "filter_somatic"
MERGE = "merge_vcf"
COMPRESS = "compress_vcf"

GENOME_ID = "input/reference.fa"
DICTIONARY_ID = "input/reference.dict"


class DistributionMode(str, Enum):
    """How alignments reach the variant callers."""
    BROADCAST = "broadcast"
    PHYSICAL_SPLIT = "physical_split"


class WesParams(BaseModel):
    """Parameters of one generated WES workflow."""
    model_config = ConfigDict(frozen=True)

    n_tumor: int = Field(default=27, ge=1)
    n_control: int = Field(default=2, ge=1)
    n_regions: int = Field(default=467, ge=1)
    distribution_mode: DistributionMode = DistributionMode.PHYSICAL_SPLIT
    fused_alignment: bool = True
    # None means "take the size from the profile set"
    input_fastq_gb: Optional[float] = Field(default=None, gt=0)
    profile_set: str = "default"


class _Builder:
    """Accumulates artifacts and tasks while keeping output sizes consistent."""

    def __init__(self, profiles: ProfileSet):
        self.profiles = profiles
        self.templates: Dict[str, TaskTemplate] = {}
        self.files: List[FileArtifact] = []
        self.tasks: List[TaskInstance] = []
        self.sizes: Dict[str, float] = {}

    def add_input(self, file_id: str, size_gb: float) -> str:
        self.files.append(FileArtifact(file_id, size_gb))
        self.sizes[file_id] = size_gb
        return file_id

    def add_task(
        self,
        task_id: str,
        template_name: str,
        inputs: Sequence[str],
        params: Tuple[Tuple[str, ParamValue], ...],
        outputs: Sequence[str],
    ) -> List[str]:
        template = self.templates.get(template_name)
        if template is None:
            template = self.profiles.template(template_name)
            self.templates[template_name] = template
        input_gb = sum(self.sizes[file_id] for file_id in inputs)
        # outputs of one task share its output volume evenly
        each_gb = template.output_gb(input_gb) / len(outputs) if outputs else 0.0
        for file_id in outputs:
            self.files.append(FileArtifact(file_id, each_gb, task_id))
            self.sizes[file_id] = each_gb
        self.tasks.append(TaskInstance(task_id, template_name, tuple(inputs), params, tuple(outputs)))
        return list(outputs)

    def build(self) -> WorkflowDag:
        return WorkflowDag(templates=self.templates, tasks=self.tasks, files=self.files)


def _labels(prefix: str, count: int) -> List[str]:
    width = max(2, len(str(count)))
    return [f"{prefix}{index:0{width}d}" for index in range(1, count + 1)]


def _align(builder: _Builder, fused: bool, pair: str, role: str, sample: str,
           source_id: str) -> str:
    """
    Emit the alignment of one sample within one pair; returns the BAM id.

    ``source_id`` is the raw FASTQ for the fused stage and the sample's
    trimmed reads otherwise; either way every pair aligns the same artifact,
    so the aligner invocations of one sample share a signature.
    """
    params = (("sample", sample),)
    bam_id = f"align/{pair}/{sample}.bam"
    if fused:
        builder.add_task(f"1-align/{pair}/{role}", FUSED_ALIGNMENT, (source_id, GENOME_ID), params, (bam_id,))
        return bam_id

    _, bwa, dedup, sort = UNFUSED_ALIGNMENT
    raw = builder.add_task(f"1b-bwa/{pair}/{role}", bwa, (source_id, GENOME_ID), params,
                           (f"bwa/{pair}/{sample}.sam",))
    marked = builder.add_task(f"1c-dedup/{pair}/{role}", dedup, raw, params,
                              (f"dedup/{pair}/{sample}.sam",))
    builder.add_task(f"1d-sort/{pair}/{role}", sort, marked, params, (bam_id,))
    return bam_id


def generate_wes(params: WesParams, profiles: Optional[ProfileSet] = None) -> WorkflowDag:
    """
    Emit the WES workflow as a DAG.

    Args:
        params: Sample counts, region count and structural switches
        profiles: Template bundle and file-size constants (bundled default if None)

    Returns:
        A valid WorkflowDag with all artifact sizes filled in

    Raises:
        InvalidParamsError: If params violate their invariants
    """
    if not isinstance(params, WesParams):
        raise InvalidParamsError(f"expected WesParams, got {type(params).__name__}")
    profiles = profiles or load_profile_set(params.profile_set)
    fastq_gb = params.input_fastq_gb or profiles.sizes.input_fastq_gb
    if fastq_gb <= 0:
        raise InvalidParamsError("input_fastq_gb must be positive")

    builder = _Builder(profiles)
    builder.add_input(GENOME_ID, profiles.sizes.reference_genome_gb)
    builder.add_input(DICTIONARY_ID, profiles.sizes.reference_dict_gb)

    tumors = _labels("T", params.n_tumor)
    controls = _labels("C", params.n_control)
    fastq = {sample: builder.add_input(f"input/{sample}.fastq", fastq_gb) for sample in controls + tumors}
    sources = dict(fastq)
    if not params.fused_alignment:
        # reads are trimmed once per sample; the aligner then repeats per pair
        for sample in controls + tumors:
            sources[sample] = builder.add_task(f"1a-trim/{sample}", UNFUSED_ALIGNMENT[0], (fastq[sample],),
                                               (("sample", sample),), (f"trim/{sample}.fastq",))[0]

    n_regions = params.n_regions
    region_width = len(str(n_regions))
    regions = [f"r{index:0{region_width}d}" for index in range(1, n_regions + 1)]
    split = params.distribution_mode == DistributionMode.PHYSICAL_SPLIT
    pairs = [(tumor, control) for tumor in tumors for control in controls]
    pair_labels = _labels("p", len(pairs))

    for pair, (tumor, control) in zip(pair_labels, pairs):
        region_inputs: Dict[str, List[str]] = {}
        for role, sample in (("control", control), ("tumor", tumor)):
            bam_id = _align(builder, params.fused_alignment, pair, role, sample, sources[sample])
            if split:
                region_inputs[role] = builder.add_task(
                    f"2-split/{pair}/{role}", SPLIT, (bam_id,),
                    (("sample", sample), ("regions", n_regions)),
                    [f"split/{pair}/{sample}/{region}.bam" for region in regions],
                )
            else:
                region_inputs[role] = [bam_id] * n_regions

        filtered = []
        for index, region in enumerate(regions):
            region_params = (("pair", pair), ("region", index + 1))
            calls = builder.add_task(
                f"3-mutect/{pair}/{region}", MUTECT,
                (region_inputs["tumor"][index], region_inputs["control"][index], DICTIONARY_ID),
                region_params, (f"mutect/{pair}/{region}.vcf",),
            )
            filtered += builder.add_task(f"4-filter/{pair}/{region}", FILTER, calls, region_params,
                                         (f"filter/{pair}/{region}.vcf",))
        merged = builder.add_task(f"5-merge/{pair}", MERGE, filtered, (("pair", pair),),
                                  (f"merge/{pair}.vcf",))
        builder.add_task(f"6-compress/{pair}", COMPRESS, merged, (("pair", pair),),
                         (f"final/{pair}.vcf.gz",))

    dag = builder.build()
    logger.info(
        f"Generated WES workflow: {len(pairs)} pairs, {n_regions} regions, "
        f"{params.distribution_mode.value}, {len(dag.tasks)} tasks, {len(dag.files)} artifacts"
    )
    return dag


def alignment_instances(dag: WorkflowDag) -> List[TaskInstance]:
    """Aligner invocations (the fused stage or BWA-MEM): one per sample of every pair."""
    return [task for task in dag.tasks if task.template in ALIGNERS]


def distinct_alignment_signatures(dag: WorkflowDag) -> int:
    """Number of distinct invocation signatures among aligner invocations."""
    return len({signature(task) for task in alignment_instances(dag)})
