"""
WES Scheduling Simulator - Command-Line Entry Point

Subcommands:
    generate   write the WES workflow DAG
    simulate   run one workflow on one infrastructure
    sweep      simulate a list of region counts
    cost       throughput / effectiveness table from report files
    fit        calibrate profile constants against observed makespans
    presets    print the embedded cluster presets

A JSON run configuration (``--config``) supplies defaults; flags win.
Exit codes: 0 success, 1 run-time failure, 2 usage or configuration error.
"""

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, Field, ValidationError, model_validator

from wes_sim.calibration.fit import fit, load_targets
from wes_sim.calibration.profiles import ProfileSet, load_profile_set
from wes_sim.config import settings
from wes_sim.costs.model import cost_report, format_cost_csv
from wes_sim.engine.model import (
    ForbidOversubscription,
    PenalizeOversubscription,
    SimOptions,
    default_sim_options,
)
from wes_sim.engine.simulator import simulate
from wes_sim.engine.trace import RunReport
from wes_sim.errors import InvalidParamsError, UnknownPresetError, WesSimError
from wes_sim.infra.presets import dump_presets, load_cluster
from wes_sim.infra.schemas import ClusterSpec
from wes_sim.scheduling.policy import Policy, default_policy
from wes_sim.storage.run_store import RunStore, SweepRow, format_sweep_csv
from wes_sim.workflow.generator import DistributionMode, WesParams, generate_wes
from wes_sim.workflow.schemas import WorkflowDag

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

MODE_CHOICES = {"broadcast": DistributionMode.BROADCAST, "split": DistributionMode.PHYSICAL_SPLIT}


class UsageError(Exception):
    """Flags or configuration files that cannot describe a run."""


class RunConfig(BaseModel):
    """Everything one simulate or sweep invocation needs."""
    workflow: Optional[WesParams] = Field(default=None, description="Generated workflow parameters")
    dag_path: Optional[str] = Field(default=None, description="Pre-generated DAG JSON")
    cluster: str = Field(default=settings.DEFAULT_CLUSTER, description="Preset name or cluster JSON path")
    policy: Optional[Policy] = None
    profiles_path: Optional[str] = None
    cache_enabled: bool = False
    oversubscription: Optional[str] = Field(default=None, pattern="^(forbid|penalize)$")
    output_dir: str = settings.OUTPUT_DIR

    @model_validator(mode="after")
    def _check_sources(self) -> "RunConfig":
        if self.workflow is not None and self.dag_path is not None:
            raise ValueError("give either workflow parameters or a DAG path, not both")
        if self.workflow is None and self.dag_path is None:
            self.workflow = WesParams()
        for label, path in (("DAG", self.dag_path), ("profile", self.profiles_path)):
            if path is not None and not Path(path).is_file():
                raise ValueError(f"{label} file not found: {path}")
        return self


# --- Configuration assembly ---

def _workflow_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    overrides: Dict[str, Any] = {}
    for flag, field in (("tumor", "n_tumor"), ("control", "n_control"), ("regions", "n_regions")):
        value = getattr(args, flag, None)
        if value is not None and not isinstance(value, list):
            overrides[field] = value
    if getattr(args, "mode", None) is not None:
        overrides["distribution_mode"] = MODE_CHOICES[args.mode]
    if getattr(args, "fused", None) is not None:
        overrides["fused_alignment"] = args.fused
    return overrides


def build_config(args: argparse.Namespace) -> RunConfig:
    """Merge the ``--config`` document with flag overrides."""
    data: Dict[str, Any] = {}
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.is_file():
            raise UsageError(f"config file not found: {path}")
        data = RunConfig.model_validate_json(path.read_text(encoding="utf-8")).model_dump(
            exclude_unset=True
        )

    workflow = _workflow_overrides(args)
    if getattr(args, "dag", None):
        if workflow:
            raise UsageError("--dag cannot be combined with workflow flags")
        data["dag_path"] = args.dag
        data.pop("workflow", None)
    elif workflow:
        data["workflow"] = {**(data.get("workflow") or {}), **workflow}
        data.pop("dag_path", None)

    for flag, field in (("cluster", "cluster"), ("profiles", "profiles_path"),
                        ("oversubscription", "oversubscription"), ("out", "output_dir")):
        value = getattr(args, flag, None)
        if value is not None:
            data[field] = value
    if getattr(args, "cache", None) is not None:
        data["cache_enabled"] = args.cache == "on"
    return RunConfig.model_validate(data)


def resolve_policy(config: RunConfig, cluster: ClusterSpec, args: argparse.Namespace) -> Policy:
    """Configured (or preset default) policy with ``--policy`` / ``--node-cap`` applied."""
    base = config.policy or default_policy(cluster.name)
    fields = base.model_dump()
    if getattr(args, "policy", None):
        try:
            parsed = Policy.parse(args.policy)
        except InvalidParamsError as exc:
            raise UsageError(str(exc)) from None
        fields.update(kind=parsed.kind, k=parsed.k)
    if getattr(args, "node_cap", None) is not None:
        fields["alignment_node_cap"] = args.node_cap
    return Policy.model_validate(fields)


def resolve_options(config: RunConfig, cluster: ClusterSpec) -> SimOptions:
    options = default_sim_options(cluster.name, config.cache_enabled)
    if config.oversubscription == "penalize":
        return options.model_copy(update={"oversubscription": PenalizeOversubscription()})
    if config.oversubscription == "forbid":
        return options.model_copy(update={"oversubscription": ForbidOversubscription()})
    return options


def load_profiles(config: RunConfig) -> ProfileSet:
    return load_profile_set(config.profiles_path)


def build_dag(config: RunConfig, profiles: ProfileSet) -> WorkflowDag:
    if config.dag_path is not None:
        return WorkflowDag.load(config.dag_path)
    return generate_wes(config.workflow, profiles)


# --- Subcommands ---

def cmd_generate(args: argparse.Namespace) -> int:
    config = build_config(args)
    if config.dag_path is not None:
        raise UsageError("generate needs workflow parameters, not --dag")
    dag = build_dag(config, load_profiles(config))
    path = RunStore(config.output_dir).save_dag(dag)
    counts = ", ".join(f"{name}={count}" for name, count in dag.summary().items())
    print(f"✅ Generated {len(dag.tasks)} tasks ({counts})")
    print(f"📁 {path}")
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    config = build_config(args)
    cluster = load_cluster(config.cluster)
    policy = resolve_policy(config, cluster, args)
    options = resolve_options(config, cluster)
    profiles = load_profiles(config)
    dag = build_dag(config, profiles)
    # a loaded DAG keeps its own templates unless a profile file was named
    override = profiles if config.dag_path is None or config.profiles_path else None
    trace, report = simulate(dag, cluster, policy, override, options)
    RunStore(config.output_dir).save_run(trace, report)
    print(f"{report.makespan_h:.4f}")
    return EXIT_OK


def _sweep_point(job: Tuple[RunConfig, ClusterSpec, Policy, SimOptions, ProfileSet, int]) -> SweepRow:
    config, cluster, policy, options, profiles, regions = job
    params = config.workflow.model_copy(update={"n_regions": regions})
    dag = generate_wes(params, profiles)
    _, report = simulate(dag, cluster, policy, profiles, options)
    logger.info(f"Sweep R={regions}: makespan {report.makespan_h:.2f}h")
    return SweepRow(regions, report.makespan_h, report.task_count, report.network_gb)


def run_sweep(config: RunConfig, regions: Sequence[int], policy: Policy, cluster: ClusterSpec,
              workers: int = 1) -> List[SweepRow]:
    """One simulation per region count; rows come back sorted by region count."""
    if not regions:
        raise UsageError("sweep needs at least one region count")
    if config.workflow is None:
        raise UsageError("sweep needs workflow parameters, not --dag")
    options = resolve_options(config, cluster)
    profiles = load_profiles(config)
    jobs = [(config, cluster, policy, options, profiles, count) for count in regions]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            rows = list(executor.map(_sweep_point, jobs))
    else:
        rows = [_sweep_point(job) for job in jobs]
    return sorted(rows, key=lambda row: row.regions)


def cmd_sweep(args: argparse.Namespace) -> int:
    config = build_config(args)
    cluster = load_cluster(config.cluster)
    policy = resolve_policy(config, cluster, args)
    workers = args.workers if args.workers is not None else settings.SWEEP_WORKERS
    rows = run_sweep(config, args.regions, policy, cluster, workers)
    RunStore(config.output_dir).save_sweep(rows)
    print(format_sweep_csv(rows), end="")
    return EXIT_OK


def cmd_cost(args: argparse.Namespace) -> int:
    reports = []
    for path in args.reports:
        if not Path(path).is_file():
            raise UsageError(f"report file not found: {path}")
        reports.append(RunReport.load(path))
    rows = [cost_report(report, args.runs_per_year) for report in reports]
    RunStore(args.out or settings.OUTPUT_DIR).save_costs(rows)
    print(format_cost_csv(rows), end="")
    return EXIT_OK


def cmd_fit(args: argparse.Namespace) -> int:
    target_file = load_targets(args.targets)
    start = load_profile_set(args.profiles) if args.profiles else None
    workers = args.workers if args.workers is not None else settings.SWEEP_WORKERS
    result = fit(target_file.targets, start=start, knobs=target_file.knobs, workers=workers)
    store = RunStore(args.out or settings.OUTPUT_DIR)
    path = store.path / "profiles.json"
    result.profile.save(path)
    for name, error in result.errors.items():
        print(f"   {name}: {error:.2%}")
    print(f"📁 {path}")
    if not result.within_tolerance:
        print(f"❌ Best max error {result.max_error:.2%} misses tolerance {settings.FIT_TOLERANCE:.0%}")
        return EXIT_FAILURE
    print(f"✅ Max error {result.max_error:.2%}")
    return EXIT_OK


def cmd_presets(args: argparse.Namespace) -> int:
    print(dump_presets(args.name))
    return EXIT_OK


# --- Argument parsing ---

def _run_arguments(parser: argparse.ArgumentParser, single_region: bool = True) -> None:
    parser.add_argument("--config", type=str, help="RunConfig JSON file (flags override it)")
    parser.add_argument("--tumor", type=int, help="Tumor samples")
    parser.add_argument("--control", type=int, help="Control samples")
    if single_region:
        parser.add_argument("--regions", type=int, help="Genome regions")
    parser.add_argument("--mode", choices=sorted(MODE_CHOICES), help="Alignment distribution to the callers")
    parser.add_argument("--fused", dest="fused", action="store_true", default=None,
                        help="One piped alignment task per read set")
    parser.add_argument("--unfused", dest="fused", action="store_false", default=None,
                        help="Separate trimming, alignment, duplicate marking and sorting tasks")
    parser.add_argument("--profiles", type=str, help="Profile set JSON (bundled default if omitted)")
    parser.add_argument("--out", type=str, help=f"Output directory (default: {settings.OUTPUT_DIR})")


def _sim_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--cluster", type=str, help="SA, YC, HPC, EC2 or a cluster JSON path")
    parser.add_argument("--policy", type=str, help="Policy kind, optionally kind:k")
    parser.add_argument("--node-cap", dest="node_cap", type=int, help="Alignment tasks use only the first N nodes")
    parser.add_argument("--cache", choices=("on", "off"), help="Invocation cache")
    parser.add_argument("--oversubscription", choices=("forbid", "penalize"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wes-sim",
        description="Discrete-event simulator for a whole-exome variant-calling workflow",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  wes-sim generate --tumor 27 --control 2 --regions 467 --out run/
  wes-sim simulate --cluster SA --cache on --out run/
  wes-sim sweep --cluster YC --cache on --regions 22 467 2863
  wes-sim cost run/sa/report.json run/yc/report.json --runs-per-year 50
        """,
    )
    commands = parser.add_subparsers(dest="command", required=True)

    generate = commands.add_parser("generate", help="Write the workflow DAG")
    _run_arguments(generate)
    generate.set_defaults(handler=cmd_generate)

    simulate_parser = commands.add_parser("simulate", help="Simulate one run")
    _run_arguments(simulate_parser)
    _sim_arguments(simulate_parser)
    simulate_parser.add_argument("--dag", type=str, help="Pre-generated DAG JSON")
    simulate_parser.set_defaults(handler=cmd_simulate)

    sweep = commands.add_parser("sweep", help="Simulate several region counts")
    _run_arguments(sweep, single_region=False)
    _sim_arguments(sweep)
    sweep.add_argument("--regions", type=int, nargs="+", required=True, help="Region counts")
    sweep.add_argument("--workers", type=int, help="Parallel simulations")
    sweep.set_defaults(handler=cmd_sweep)

    cost = commands.add_parser("cost", help="Cost table from report files")
    cost.add_argument("reports", nargs="+", help="report.json files")
    cost.add_argument("--runs-per-year", dest="runs_per_year", type=int,
                      help="Runs actually performed per year")
    cost.add_argument("--out", type=str, help="Output directory")
    cost.set_defaults(handler=cmd_cost)

    fit_parser = commands.add_parser("fit", help="Calibrate profile constants")
    fit_parser.add_argument("--targets", type=str, help="Targets JSON (bundled targets if omitted)")
    fit_parser.add_argument("--profiles", type=str, help="Starting profile set")
    fit_parser.add_argument("--workers", type=int, help="Parallel evaluations")
    fit_parser.add_argument("--out", type=str, help="Output directory")
    fit_parser.set_defaults(handler=cmd_fit)

    presets = commands.add_parser("presets", help="Print embedded cluster presets")
    presets.add_argument("--name", type=str, help="Only this preset")
    presets.set_defaults(handler=cmd_presets)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse arguments, run one subcommand and map failures to exit codes.

    Returns:
        0 on success, 1 on run-time failure, 2 on usage or configuration errors
    """
    logging.basicConfig(
        level=settings.LOG_LEVEL,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE

    try:
        return args.handler(args)
    except (UsageError, UnknownPresetError, ValidationError) as exc:
        print(f"❌ {exc}", file=sys.stderr)
        return EXIT_USAGE
    except WesSimError as exc:
        print(f"❌ {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
