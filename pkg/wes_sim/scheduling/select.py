"""
Greedy online task selection.

Ready tasks are considered in task-id order; each goes to the best feasible
node of the policy's strategy. Tasks are bucketed by resource class
(memory, minimum threads, alignment cap) so that once one task of a class
cannot be placed the rest of the class is skipped for the round; loads only
grow within a round, so the result equals the plain id-ordered greedy pass.
Configurable tools split a node's free threads with the ready tasks of their
class still waiting for a place.
"""

import heapq
import logging
from typing import Dict, Iterable, List, Mapping, NamedTuple, Optional, Tuple, Union

from wes_sim.errors import SimulationError
from wes_sim.infra.schemas import ClusterSpec, FsState, NodeSpec
from wes_sim.workflow.schemas import TaskInstance, TaskStage, TaskTemplate, WorkflowDag
from .policy import NodeLoad, Policy
from .strategies import NodeRanker, strategy_for

logger = logging.getLogger(__name__)

MEM_EPS = 1e-9

ClassKey = Tuple[float, int, bool]


class Assignment(NamedTuple):
    task: TaskInstance
    node_id: str
    threads: int
    mem_gb: float


def per_node_share(node: NodeSpec, mem_gb: float) -> int:
    """Threads per instance when a node's memory is split among ``mem_gb`` instances."""
    if mem_gb <= 0:
        return 1
    instances = int(node.mem_gb // mem_gb)
    if instances < 1:
        return node.threads
    return max(1, node.threads // instances)


def allotment(template: TaskTemplate, node: NodeSpec, load: NodeLoad, policy: Policy,
              mem_gb: float, ignore_free: bool = False, competing: int = 1) -> int:
    """
    Threads given to one instance of ``template`` on ``node``.

    Fixed-thread tools always get their n. Configurable tools get
    min(template max, policy default or per-node memory share, their part of
    the free threads split over ``competing`` ready tasks headed for the node).
    The split rounds up, so earlier tasks take the remainder and the parts
    add up to the free threads.

    Args:
        template: Tool of the instance
        node: Candidate node
        load: Current load of the node
        policy: Policy supplying per-template defaults
        mem_gb: Memory requirement of the instance
        ignore_free: Oversubscription mode; the result is at least 1 even on a full node
        competing: Ready tasks of the same class expected on the node, this one included
    """
    if not template.configurable:
        return template.max_threads
    default = policy.thread_defaults.get(template.name)
    if default is None:
        default = per_node_share(node, mem_gb)
    free = max(node.threads - load.threads_in_use, 0)
    share = -(-free // max(competing, 1))
    return max(min(template.max_threads, default, share), template.min_threads if ignore_free else 0)


def fits(node: NodeSpec, load: NodeLoad, threads: int, mem_gb: float) -> bool:
    return (
        threads >= 1
        and node.threads - load.threads_in_use >= threads
        and node.mem_gb - load.mem_gb_in_use >= mem_gb - MEM_EPS
    )


def feasible(task: TaskInstance, node: NodeSpec, load: NodeLoad, dag: WorkflowDag,
             policy: Optional[Policy] = None) -> bool:
    """True iff the node's free threads and memory cover the task's allotment and requirement."""
    policy = policy or Policy()
    template = dag.template_of(task)
    mem_gb = policy.memory_of(template, dag.input_gb(task))
    threads = allotment(template, node, load, policy, mem_gb)
    return threads >= template.min_threads and fits(node, load, threads, mem_gb)


class ReadyQueue:
    """Ready tasks bucketed by resource class; each bucket is a heap keyed by task id."""

    def __init__(self):
        self._heaps: Dict[ClassKey, List[Tuple[str, TaskInstance]]] = {}
        self._size = 0

    def push(self, task: TaskInstance, key: ClassKey) -> None:
        heapq.heappush(self._heaps.setdefault(key, []), (task.id, task))
        self._size += 1

    def __len__(self) -> int:
        return self._size

    def task_ids(self) -> List[str]:
        return sorted(task_id for heap in self._heaps.values() for task_id, _ in heap)


class Selector:
    """Placement decisions of one policy on one cluster for one workflow."""

    def __init__(self, cluster: ClusterSpec, dag: WorkflowDag, policy: Policy,
                 strict: bool = True, templates: Optional[Mapping[str, TaskTemplate]] = None):
        self.cluster = cluster
        self.dag = dag
        self.policy = policy
        self.templates = templates if templates is not None else dag.templates
        self.strategy = strategy_for(policy)
        self.strict = strict
        self.ignore_resources = not strict and self.strategy.ignores_resources_when_penalized
        self.nodes = cluster.sorted_nodes()
        cap = policy.alignment_node_cap
        self.capped_nodes = self.nodes[:cap] if cap else self.nodes
        self._demand: Dict[str, Tuple[TaskTemplate, float, bool]] = {}

    def demand(self, task: TaskInstance) -> Tuple[TaskTemplate, float, bool]:
        """(template, memory requirement, restricted to capped nodes) of a task."""
        cached = self._demand.get(task.id)
        if cached is None:
            template = self.templates[task.template]
            mem_gb = self.policy.memory_of(template, self.dag.input_gb(task))
            capped = self.policy.alignment_node_cap is not None and template.stage == TaskStage.ALIGNMENT
            cached = (template, mem_gb, capped)
            self._demand[task.id] = cached
        return cached

    def class_key(self, task: TaskInstance) -> ClassKey:
        template, mem_gb, capped = self.demand(task)
        return (mem_gb, template.min_threads, capped)

    def unschedulable_reason(self, task: TaskInstance) -> Optional[str]:
        """Why no node could ever run the task, or None."""
        if self.ignore_resources:
            return None
        template, mem_gb, capped = self.demand(task)
        candidates = self.capped_nodes if capped else self.nodes
        for node in candidates:
            if node.mem_gb >= mem_gb - MEM_EPS and node.threads >= template.min_threads:
                return None
        return (f"needs {mem_gb:g} GB and {template.min_threads} thread(s); "
                f"largest candidate node has {max(node.mem_gb for node in candidates):g} GB")

    def competing(self, node: NodeSpec, load: NodeLoad, mem_gb: float, queued: int,
                  candidates: int) -> int:
        """Ready tasks of one class expected on ``node``: an even spread, bounded by memory slots."""
        count = -(-queued // max(candidates, 1))
        if not self.ignore_resources and mem_gb > MEM_EPS:
            slots = int((node.mem_gb - load.mem_gb_in_use + MEM_EPS) // mem_gb)
            count = min(count, slots)
        return max(count, 1)

    def place(self, task: TaskInstance, loads: Mapping[str, NodeLoad],
              fs: FsState, queued: int = 1) -> Optional[Assignment]:
        """
        Best node for ``task`` under current loads, or None if nothing fits.

        ``queued`` counts the ready tasks of the task's class still waiting,
        this one included; configurable tools split free threads with them.
        """
        template, mem_gb, capped = self.demand(task)
        candidates = self.capped_nodes if capped else self.nodes
        rank: Optional[NodeRanker] = None
        configurable = template.configurable
        min_threads = template.min_threads
        best: Optional[Assignment] = None
        best_key = None
        for node in candidates:
            load = loads[node.id]
            competing = self.competing(node, load, mem_gb, queued, len(candidates)) if configurable else 1
            threads = allotment(template, node, load, self.policy, mem_gb, self.ignore_resources, competing)
            if not self.ignore_resources and (
                threads < min_threads
                or node.threads - load.threads_in_use < threads
                or node.mem_gb - load.mem_gb_in_use < mem_gb - MEM_EPS
            ):
                continue
            if rank is None:
                rank = self.strategy.ranker(task, fs, self.dag)
            key = rank(node, load)
            if best_key is None or key < best_key:
                best_key = key
                best = Assignment(task, node.id, threads, mem_gb)
        return best

    def select(self, queue: ReadyQueue, loads: Mapping[str, NodeLoad], fs: FsState) -> List[Assignment]:
        """
        Pop and place as many queued tasks as fit, committing them to ``loads``.

        Args:
            queue: Ready tasks; placed tasks are removed
            loads: Live per-node loads, updated in place
            fs: Replica placement used for locality

        Returns:
            Assignments in the order they were made (ascending task id)
        """
        running_total = sum(len(load.running) for load in loads.values())
        active = {key: heap for key, heap in queue._heaps.items() if heap}
        chosen: List[Assignment] = []
        while active and self.strategy.admission_open(running_total, self.policy):
            key = min(active, key=lambda class_key: active[class_key][0][0])
            heap = active[key]
            queued = len(heap)
            headroom = self.strategy.headroom(running_total, self.policy)
            if headroom is not None:
                queued = min(queued, headroom)
            assignment = self.place(heap[0][1], loads, fs, queued)
            if assignment is None:
                del active[key]
                continue
            heapq.heappop(heap)
            queue._size -= 1
            if not heap:
                del active[key]
                del queue._heaps[key]
            loads[assignment.node_id].assign(assignment.task.id, assignment.threads, assignment.mem_gb)
            running_total += 1
            chosen.append(assignment)
        return chosen


def _load_map(loads: Union[Mapping[str, NodeLoad], Iterable[NodeLoad]], cluster: ClusterSpec,
              strict: bool) -> Dict[str, NodeLoad]:
    items = loads.values() if isinstance(loads, Mapping) else loads
    scratch = {load.node_id: load.copy() for load in items}
    for node_id in scratch:
        if node_id not in cluster.node_ids:
            raise SimulationError(f"load refers to unknown node {node_id!r}")
    for node in cluster.nodes:
        load = scratch.setdefault(node.id, NodeLoad(node.id))
        if load.threads_in_use < 0 or load.mem_gb_in_use < -MEM_EPS:
            raise SimulationError(f"negative load on node {node.id!r}")
        if strict and (load.threads_in_use > node.threads or load.mem_gb_in_use > node.mem_gb + MEM_EPS):
            raise SimulationError(f"load on node {node.id!r} exceeds its capacity")
    return scratch


def select(ready: Iterable[TaskInstance], loads: Union[Mapping[str, NodeLoad], Iterable[NodeLoad]],
           fs: FsState, policy: Policy, *, cluster: ClusterSpec, dag: WorkflowDag,
           strict: bool = True,
           templates: Optional[Mapping[str, TaskTemplate]] = None) -> List[Assignment]:
    """
    Greedy assignment of ready tasks to nodes; the given loads are not modified.

    ``templates`` overrides the workflow's own templates, e.g. with
    profile-resolved memory and thread models.

    Raises:
        SimulationError: If the loads are inconsistent with the cluster
    """
    selector = Selector(cluster, dag, policy, strict, templates)
    scratch = _load_map(loads, cluster, strict)
    queue = ReadyQueue()
    for task in ready:
        queue.push(task, selector.class_key(task))
    return selector.select(queue, scratch, fs)
