"""
Discrete-event execution of a workflow DAG on a cluster under a scheduling policy.

Every task moves through WAITING -> READY -> FETCH -> COMPUTE -> PUBLISH -> DONE
and holds its threads and memory from assignment until its publish phase ends.
All state changes at one instant are settled before any new phase duration is
fixed, so transfer shares and oversubscription penalties see a consistent
snapshot of the node.
"""

import heapq
import logging
from enum import Enum
from typing import Dict, List, Mapping, Optional, Tuple

from wes_sim.calibration.profiles import ProfileSet
from wes_sim.errors import ProfileCoverageError, SimulationError, UnschedulableTaskError
from wes_sim.infra.schemas import ClusterSpec, FsRegime
from wes_sim.infra.staging import StagePlan, initial_placement, stage_plan, transfer_time_s
from wes_sim.scheduling.policy import NodeLoad, Policy, default_policy
from wes_sim.scheduling.select import Assignment, ReadyQueue, Selector
from wes_sim.workflow.dag import ensure_valid, signature
from wes_sim.workflow.schemas import TaskInstance, TaskTemplate, WorkflowDag
from .invocation_cache import CacheEntry, InvocationCache
from .model import MEM_EPS, SimOptions, compute_duration_s
from .trace import RunReport, SimTrace, TraceEntry, build_report

logger = logging.getLogger(__name__)


class Phase(str, Enum):
    FETCH = "fetch"
    COMPUTE = "compute"
    PUBLISH = "publish"
    DONE = "done"


class _Run:
    """A task that has been assigned to a node."""
    __slots__ = ("task", "template", "input_gb", "node_id", "threads", "mem_gb", "start_s",
                 "plan", "phase", "signature")

    def __init__(self, task: TaskInstance, template: TaskTemplate, input_gb: float,
                 assignment: Assignment, start_s: float, plan: StagePlan, signature: Optional[str]):
        self.task = task
        self.template = template
        self.input_gb = input_gb
        self.node_id = assignment.node_id
        self.threads = assignment.threads
        self.mem_gb = assignment.mem_gb
        self.start_s = start_s
        self.plan = plan
        self.phase: Optional[Phase] = None
        self.signature = signature


def resolve_templates(dag: WorkflowDag, profiles: Optional[ProfileSet]) -> Dict[str, TaskTemplate]:
    """Templates used by the DAG, taken from ``profiles`` when given."""
    used = sorted({task.template for task in dag.tasks})
    if profiles is None:
        missing = [name for name in used if name not in dag.templates]
        if missing:
            raise ProfileCoverageError(f"workflow uses undefined templates: {missing}")
        return dict(dag.templates)
    missing = profiles.missing(used)
    if missing:
        raise ProfileCoverageError(f"profile set {profiles.name!r} does not cover templates {missing}")
    return {name: profiles.templates[name] for name in used}


def build_successors(dag: WorkflowDag) -> Tuple[Dict[str, int], Dict[str, List[str]]]:
    """Pending-producer counts and consumer lists per task id."""
    waiting: Dict[str, int] = {}
    successors: Dict[str, List[str]] = {task.id: [] for task in dag.tasks}
    for task in dag.tasks:
        producers = dag.predecessors(task)
        waiting[task.id] = len(producers)
        for producer in producers:
            successors[producer].append(task.id)
    return waiting, successors


def check_schedulable(dag: WorkflowDag, selector: Selector) -> None:
    for task in dag.tasks:
        reason = selector.unschedulable_reason(task)
        if reason is not None:
            raise UnschedulableTaskError(task.id, reason)


class _EventEngine:
    """One simulation run; owns all mutable state (loads, placement, cache)."""

    def __init__(self, dag: WorkflowDag, cluster: ClusterSpec, policy: Policy,
                 templates: Mapping[str, TaskTemplate], options: SimOptions):
        self.dag = dag
        self.cluster = cluster
        self.templates = templates
        self.options = options
        self.selector = Selector(cluster, dag, policy, options.strict, templates)
        self.nodes = {node.id: node for node in cluster.nodes}
        self.loads = {node.id: NodeLoad(node.id) for node in cluster.nodes}
        self.transfers_on = {node.id: 0 for node in cluster.nodes}
        self.compute_threads_on = {node.id: 0 for node in cluster.nodes}
        self.fs = initial_placement(dag, cluster)
        self.queue = ReadyQueue()
        self.cache = InvocationCache() if options.cache_enabled else None
        self.waiting, self.successors = build_successors(dag)
        self.runs: Dict[str, _Run] = {}
        self.entries: List[TraceEntry] = []
        self.events: List[Tuple[float, int, str]] = []
        self._seq = 0
        self._signatures: Dict[str, Optional[str]] = {}
        self.oversubscribed_phases = 0

    # --- Main loop ---

    def run(self) -> SimTrace:
        check_schedulable(self.dag, self.selector)
        roots = [task_id for task_id, count in self.waiting.items() if count == 0]
        self._settle(0.0, [], roots)
        while self.events:
            now = self.events[0][0]
            ended = []
            while self.events and self.events[0][0] == now:
                _, _, task_id = heapq.heappop(self.events)
                ended.append(self.runs[task_id])
            self._settle(now, ended, [])
        if len(self.entries) != len(self.dag.tasks):
            stuck = sorted(set(self.waiting) - {entry.task_id for entry in self.entries})
            raise SimulationError(
                f"deadlock: {len(stuck)} task(s) never ran, first {stuck[:3]}; "
                f"{len(self.queue)} still queued"
            )
        return SimTrace(self.entries)

    def _settle(self, now: float, ended: List[_Run], ready: List[str]) -> None:
        pending: List[_Run] = []
        finished: List[_Run] = []
        # the first call of a run must select even without ready tasks
        dirty = not ended
        for run in sorted(ended, key=lambda item: item.task.id):
            self._end_phase(run, pending, finished)
        while True:
            # only completions and new ready tasks can change the selection
            dirty = dirty or bool(finished) or bool(ready)
            for run in finished:
                self._complete(run, now, ready)
            finished = []
            while ready:
                batch, ready = sorted(set(ready)), []
                for task_id in batch:
                    self._route(task_id, now, ready)
            if not dirty:
                break
            dirty = False
            started = self.selector.select(self.queue, self.loads, self.fs)
            for assignment in started:
                self._enter(self._start(assignment, now), Phase.FETCH, pending, finished)
            if not finished:
                break
        for run in pending:
            self._schedule_phase_end(run, now)

    # --- Phase transitions ---

    def _start(self, assignment: Assignment, now: float) -> _Run:
        task = assignment.task
        node = self.nodes[assignment.node_id]
        plan = stage_plan(task, node, self.fs, self.cluster.fs_regime, self.dag)
        sig = self._signature(task) if self.cache is not None else None
        run = _Run(task, self.templates[task.template], self.dag.input_gb(task), assignment, now, plan, sig)
        self.runs[task.id] = run
        logger.debug(f"t={now:.1f}s start {task.id} on {node.id} with {assignment.threads} thread(s)")
        return run

    def _base_compute_s(self, run: _Run) -> float:
        node = self.nodes[run.node_id]
        return compute_duration_s(run.template, run.threads, run.input_gb, node, self.cluster,
                                  self.options, 0.0, 0)

    def _enter(self, run: _Run, phase: Phase, pending: List[_Run], finished: List[_Run]) -> None:
        """Move ``run`` into ``phase``, skipping phases with no work."""
        if phase == Phase.FETCH:
            if run.plan.fetch_gb > 0:
                run.phase = Phase.FETCH
                self.transfers_on[run.node_id] += 1
                pending.append(run)
                return
            phase = Phase.COMPUTE
        if phase == Phase.COMPUTE:
            if self._base_compute_s(run) > 0:
                run.phase = Phase.COMPUTE
                self.compute_threads_on[run.node_id] += run.threads
                pending.append(run)
                return
            phase = Phase.PUBLISH
        if phase == Phase.PUBLISH:
            if run.plan.publish_gb > 0:
                run.phase = Phase.PUBLISH
                self.transfers_on[run.node_id] += 1
                pending.append(run)
                return
        run.phase = Phase.DONE
        finished.append(run)

    def _end_phase(self, run: _Run, pending: List[_Run], finished: List[_Run]) -> None:
        if run.phase == Phase.FETCH:
            self.transfers_on[run.node_id] -= 1
            if self.cluster.fs_regime == FsRegime.STAGED_DFS:
                for transfer in run.plan.fetch:
                    self.fs.add_replica(transfer.file_id, run.node_id)
            self._enter(run, Phase.COMPUTE, pending, finished)
        elif run.phase == Phase.COMPUTE:
            self.compute_threads_on[run.node_id] -= run.threads
            self._enter(run, Phase.PUBLISH, pending, finished)
        elif run.phase == Phase.PUBLISH:
            self.transfers_on[run.node_id] -= 1
            self._enter(run, Phase.DONE, pending, finished)
        else:
            raise SimulationError(f"task {run.task.id!r} ended phase {run.phase}")

    def _oversubscribed(self, node_id: str) -> bool:
        node = self.nodes[node_id]
        return (
            self.loads[node_id].mem_gb_in_use > node.mem_gb + MEM_EPS
            or self.compute_threads_on[node_id] > node.threads
        )

    def _schedule_phase_end(self, run: _Run, now: float) -> None:
        node = self.nodes[run.node_id]
        if run.phase == Phase.COMPUTE:
            seconds = compute_duration_s(
                run.template, run.threads, run.input_gb, node, self.cluster, self.options,
                self.loads[run.node_id].mem_gb_in_use, self.compute_threads_on[run.node_id],
            )
            if self._oversubscribed(run.node_id):
                self.oversubscribed_phases += 1
        else:
            size_gb = run.plan.fetch_gb if run.phase == Phase.FETCH else run.plan.publish_gb
            seconds = transfer_time_s(size_gb, self.cluster.network_gbit, self.transfers_on[run.node_id])
        self._seq += 1
        heapq.heappush(self.events, (now + seconds, self._seq, run.task.id))

    def _complete(self, run: _Run, now: float, ready: List[str]) -> None:
        task = run.task
        self.loads[run.node_id].release(task.id, run.threads, run.mem_gb)
        for file_id in task.outputs:
            self.fs.add_replica(file_id, run.node_id)
        self.entries.append(TraceEntry(
            task.id, task.template, run.node_id, run.start_s, now, run.threads,
            run.plan.fetch_gb, run.plan.publish_gb, False,
        ))
        if self.cache is not None and run.signature is not None:
            ready.extend(self.cache.set(run.signature, CacheEntry(task.id, run.node_id, task.outputs, now)))
        self._release_successors(task.id, ready)

    # --- Readiness and caching ---

    def _signature(self, task: TaskInstance) -> Optional[str]:
        if task.id not in self._signatures:
            deterministic = self.templates[task.template].deterministic
            self._signatures[task.id] = signature(task) if deterministic else None
        return self._signatures[task.id]

    def _route(self, task_id: str, now: float, ready: List[str]) -> None:
        task = self.dag.task(task_id)
        if self.cache is not None:
            sig = self._signature(task)
            if sig is not None:
                entry = self.cache.get(sig)
                if entry is not None:
                    self._hit(task, entry, now, ready)
                    return
                if self.cache.is_in_flight(sig):
                    self.cache.park(sig, task.id)
                    return
                self.cache.begin(sig, task.id)
        self.queue.push(task, self.selector.class_key(task))

    def _hit(self, task: TaskInstance, entry: CacheEntry, now: float, ready: List[str]) -> None:
        for own, primary in zip(task.outputs, entry.outputs):
            for node_id in self.fs.replicas(primary):
                self.fs.add_replica(own, node_id)
        self.cache.record_hit()
        self.entries.append(TraceEntry(task.id, task.template, entry.node_id, now, now, 0, 0.0, 0.0, True))
        self._release_successors(task.id, ready)

    def _release_successors(self, task_id: str, ready: List[str]) -> None:
        for successor in self.successors[task_id]:
            self.waiting[successor] -= 1
            if self.waiting[successor] == 0:
                ready.append(successor)


def report_context(cluster: ClusterSpec, policy: Policy, options: SimOptions) -> Dict:
    """Cost context copied onto every RunReport."""
    return {
        "system": cluster.name,
        "node_count": len(cluster.nodes),
        "acquisition_cost_eur": cluster.acquisition_cost_eur,
        "per_run_rental_eur": cluster.per_run_rental_eur,
        "alignment_node_cap": policy.alignment_node_cap,
        "policy": policy.kind.value,
        "cache_enabled": options.cache_enabled,
    }


def simulate(
    dag: WorkflowDag,
    cluster: ClusterSpec,
    policy: Optional[Policy] = None,
    profiles: Optional[ProfileSet] = None,
    options: Optional[SimOptions] = None,
) -> Tuple[SimTrace, RunReport]:
    """
    Run a workflow to completion.

    Args:
        dag: Valid workflow
        cluster: Infrastructure to run on
        policy: Scheduler (the cluster's default policy if None)
        profiles: Template constants overriding those stored in the DAG
        options: Cache and oversubscription switches

    Returns:
        (trace, report)

    Raises:
        WorkflowValidationError: If the DAG is invalid
        ProfileCoverageError: If a template used by the DAG is not defined
        UnschedulableTaskError: If a task fits on no node
        SimulationError: If the run deadlocks
    """
    policy = policy or default_policy(cluster.name)
    options = options or SimOptions()
    ensure_valid(dag)
    templates = resolve_templates(dag, profiles)
    logger.info(
        f"Simulating {len(dag.tasks)} tasks on {cluster.name} ({len(cluster.nodes)} nodes, "
        f"{policy.kind.value}, cache={'on' if options.cache_enabled else 'off'})"
    )
    engine = _EventEngine(dag, cluster, policy, templates, options)
    trace = engine.run()
    report = build_report(
        trace,
        {node.id: node.threads for node in cluster.nodes},
        **report_context(cluster, policy, options),
    )
    if engine.oversubscribed_phases:
        logger.warning(
            f"{engine.oversubscribed_phases} compute phase(s) on {cluster.name} started on an "
            f"oversubscribed node and were slowed down"
        )
    if engine.cache is not None:
        logger.debug(f"Invocation cache: {engine.cache.get_stats()}")
    logger.info(f"Finished {cluster.name}: makespan {report.makespan_h:.2f}h, {report.cache_hits} cache hits")
    return trace, report
