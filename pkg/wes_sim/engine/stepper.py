"""
Fixed-timestep reference interpreter.

Advances time in uniform steps and rescans every task at each step. It shares
the policy, staging and duration functions with the event engine but none of
its queues, so the two can be checked against each other on small workflows.
Far too slow for real workflows.
"""

import logging
from typing import Dict, List, Optional, Set

from wes_sim.calibration.profiles import ProfileSet
from wes_sim.errors import SimulationError
from wes_sim.infra.schemas import ClusterSpec, FsRegime
from wes_sim.infra.staging import initial_placement, stage_plan, transfer_time_s
from wes_sim.scheduling.policy import NodeLoad, Policy, default_policy
from wes_sim.scheduling.select import Selector, select
from wes_sim.workflow.dag import ensure_valid, signature
from wes_sim.workflow.schemas import WorkflowDag
from .model import SimOptions, compute_duration_s
from .simulator import check_schedulable, resolve_templates
from .trace import SimTrace, TraceEntry

logger = logging.getLogger(__name__)

STEP_EPS = 1e-9
PHASES = ("fetch", "compute", "publish")


def step_simulate(
    dag: WorkflowDag,
    cluster: ClusterSpec,
    policy: Optional[Policy] = None,
    profiles: Optional[ProfileSet] = None,
    options: Optional[SimOptions] = None,
    dt: float = 1.0,
    max_steps: int = 10_000_000,
) -> SimTrace:
    """
    Execute ``dag`` by stepping time in increments of ``dt`` seconds.

    Phase ends are only observed on step boundaries, so every phase is rounded
    up to a whole number of steps.

    Raises:
        SimulationError: On deadlock or when ``max_steps`` is exceeded
    """
    policy = policy or default_policy(cluster.name)
    options = options or SimOptions()
    ensure_valid(dag)
    templates = resolve_templates(dag, profiles)
    selector = Selector(cluster, dag, policy, options.strict, templates)
    check_schedulable(dag, selector)

    nodes = {node.id: node for node in cluster.nodes}
    loads = {node.id: NodeLoad(node.id) for node in cluster.nodes}
    fs = initial_placement(dag, cluster)
    tasks = {task.id: task for task in dag.tasks}
    producers = {task.id: set(dag.predecessors(task)) for task in dag.tasks}

    status: Dict[str, str] = {task_id: "waiting" for task_id in tasks}
    running: Dict[str, dict] = {}
    completed_sigs: Dict[str, dict] = {}
    in_flight: Set[str] = set()
    done: Set[str] = set()
    entries: List[TraceEntry] = []

    def sig_of(task_id: str) -> Optional[str]:
        if not options.cache_enabled or not templates[tasks[task_id].template].deterministic:
            return None
        return signature(tasks[task_id])

    def enter(run: dict, phase_index: int) -> None:
        """Advance through phases without work; stop at the first timed phase or at done."""
        while phase_index < len(PHASES):
            phase = PHASES[phase_index]
            if phase == "compute":
                base = compute_duration_s(run["template"], run["threads"], run["input_gb"],
                                          nodes[run["node"]], cluster, options, 0.0, 0)
                has_work = base > 0
            else:
                has_work = (run["plan"].fetch_gb if phase == "fetch" else run["plan"].publish_gb) > 0
            if has_work:
                run["phase"] = phase
                run["remaining"] = None
                return
            phase_index += 1
        run["phase"] = "done"

    def finish(task_id: str, now: float) -> None:
        run = running.pop(task_id)
        task = tasks[task_id]
        loads[run["node"]].release(task_id, run["threads"], run["mem_gb"])
        for file_id in task.outputs:
            fs.add_replica(file_id, run["node"])
        entries.append(TraceEntry(task_id, task.template, run["node"], run["start"], now, run["threads"],
                                  run["plan"].fetch_gb, run["plan"].publish_gb, False))
        status[task_id] = "done"
        done.add(task_id)
        if run["sig"] is not None:
            completed_sigs[run["sig"]] = {"node": run["node"], "outputs": task.outputs}
            in_flight.discard(run["sig"])

    def settle(now: float) -> None:
        while True:
            progressed = False
            # tasks whose phase ends now (or that skipped straight to done)
            for task_id in sorted(running):
                run = running[task_id]
                if run["phase"] == "done":
                    finish(task_id, now)
                    progressed = True
            # readiness, cache hits and parking, in id order; tasks unblocked by a hit
            # wait for the next pass
            eligible = [
                task_id for task_id in sorted(tasks)
                if status[task_id] in ("waiting", "parked") and producers[task_id] <= done
            ]
            for task_id in eligible:
                sig = sig_of(task_id)
                if sig is not None and sig in completed_sigs:
                    hit = completed_sigs[sig]
                    for own, primary in zip(tasks[task_id].outputs, hit["outputs"]):
                        for node_id in fs.replicas(primary):
                            fs.add_replica(own, node_id)
                    entries.append(TraceEntry(task_id, tasks[task_id].template, hit["node"], now, now,
                                              0, 0.0, 0.0, True))
                    status[task_id] = "done"
                    done.add(task_id)
                    progressed = True
                elif sig is not None and sig in in_flight:
                    status[task_id] = "parked"
                elif status[task_id] == "waiting":
                    if sig is not None:
                        in_flight.add(sig)
                    status[task_id] = "ready"
                    progressed = True
            if progressed:
                continue
            ready = [tasks[task_id] for task_id in sorted(tasks) if status[task_id] == "ready"]
            assignments = select(ready, loads, fs, policy, cluster=cluster, dag=dag, strict=options.strict,
                                 templates=templates)
            for assignment in assignments:
                task = assignment.task
                node = nodes[assignment.node_id]
                loads[node.id].assign(task.id, assignment.threads, assignment.mem_gb)
                run = {
                    "node": node.id,
                    "threads": assignment.threads,
                    "mem_gb": assignment.mem_gb,
                    "template": templates[task.template],
                    "input_gb": dag.input_gb(task),
                    "plan": stage_plan(task, node, fs, cluster.fs_regime, dag),
                    "start": now,
                    "sig": sig_of(task.id),
                }
                status[task.id] = "running"
                running[task.id] = run
                enter(run, 0)
            if not any(run["phase"] == "done" for run in running.values()):
                return

    def assign_durations() -> None:
        transfers: Dict[str, int] = {node_id: 0 for node_id in nodes}
        compute_threads: Dict[str, int] = {node_id: 0 for node_id in nodes}
        for run in running.values():
            if run["phase"] in ("fetch", "publish"):
                transfers[run["node"]] += 1
            elif run["phase"] == "compute":
                compute_threads[run["node"]] += run["threads"]
        for task_id in sorted(running):
            run = running[task_id]
            if run["remaining"] is not None:
                continue
            node = nodes[run["node"]]
            if run["phase"] == "compute":
                run["remaining"] = compute_duration_s(
                    run["template"], run["threads"], run["input_gb"], node, cluster, options,
                    loads[node.id].mem_gb_in_use, compute_threads[node.id],
                )
            else:
                size_gb = run["plan"].fetch_gb if run["phase"] == "fetch" else run["plan"].publish_gb
                run["remaining"] = transfer_time_s(size_gb, cluster.network_gbit, transfers[node.id])

    now = 0.0
    settle(now)
    assign_durations()
    steps = 0
    while len(done) < len(tasks):
        if not running:
            raise SimulationError(f"deadlock at t={now}s: {len(tasks) - len(done)} task(s) never ran")
        steps += 1
        if steps > max_steps:
            raise SimulationError(f"no completion after {max_steps} steps")
        now = steps * dt
        for task_id in sorted(running):
            run = running[task_id]
            run["remaining"] -= dt
            if run["remaining"] <= STEP_EPS:
                index = PHASES.index(run["phase"])
                if run["phase"] == "fetch" and cluster.fs_regime == FsRegime.STAGED_DFS:
                    for transfer in run["plan"].fetch:
                        fs.add_replica(transfer.file_id, run["node"])
                enter(run, index + 1)
        settle(now)
        assign_durations()

    logger.debug(f"Stepper finished {len(tasks)} tasks after {steps} steps")
    return SimTrace(entries)
