"""
Tests for engine/stepper.py - Event engine against the fixed-timestep interpreter
"""
import random

import pytest

from wes_sim.calibration.profiles import ProfileSet
from wes_sim.engine.model import SimOptions
from wes_sim.engine.simulator import simulate
from wes_sim.engine.stepper import step_simulate
from wes_sim.engine.trace import export_trace
from wes_sim.errors import SimulationError
from wes_sim.infra.schemas import ClusterSpec, FsRegime, NodeSpec
from wes_sim.scheduling.policy import Policy, PolicyKind
from wes_sim.workflow.schemas import (
    ConfigurableThreads,
    FileArtifact,
    FixedMemory,
    FixedThreads,
    TaskInstance,
    TaskTemplate,
    WorkflowDag,
    WorkModel,
)

CASES = 1000


def random_case(seed):
    """
    Small workflow, cluster and policy with whole-second phase durations.

    Sizes are integer GB moved over 8 Gbit links, work is serial only and
    nodes run at reference speed, so the stepper observes every phase end
    exactly.
    """
    rng = random.Random(seed)
    templates = []
    for index in range(rng.randint(1, 3)):
        threads = rng.randint(1, 2)
        thread_model = ConfigurableThreads(max_n=threads) if rng.random() < 0.5 else FixedThreads(n=threads)
        templates.append(TaskTemplate(
            name=f"t{index}",
            thread_model=thread_model,
            memory_gb=FixedMemory(m=float(rng.randint(0, 4))),
            work_model=WorkModel(serial_s=float(rng.randint(0, 6)), parallel_s_per_gb=0.0),
            deterministic=rng.random() < 0.8,
        ))

    files = [FileArtifact(f"in{index}", float(rng.randint(0, 3))) for index in range(rng.randint(1, 3))]
    tasks = []
    for index in range(rng.randint(0, 10)):
        task_id = f"task{index:02d}"
        if tasks and rng.random() < 0.25:
            # same invocation as an earlier task
            origin = rng.choice(tasks)
            template, inputs, params = origin.template, origin.inputs, origin.params
        else:
            pool = [artifact.id for artifact in files]
            template = rng.choice(templates).name
            inputs = tuple(rng.sample(pool, rng.randint(0, min(3, len(pool)))))
            params = (("variant", rng.randint(0, 1)),)
        output = f"{task_id}.out"
        files.append(FileArtifact(output, float(rng.randint(0, 2)), task_id))
        tasks.append(TaskInstance(task_id, template, inputs, params, (output,)))

    regime = rng.choice(list(FsRegime))
    node_count = 1 if regime == FsRegime.LOCAL_ONLY else 2
    nodes = [
        NodeSpec(id=f"n{index}", threads=rng.randint(2, 4), mem_gb=float(rng.randint(4, 8)))
        for index in range(node_count)
    ]
    cluster = ClusterSpec(name="random", nodes=nodes, network_gbit=8.0, fs_regime=regime)

    kind = rng.choice(list(PolicyKind))
    policy = Policy(kind=kind, k=rng.randint(1, 3) if kind == PolicyKind.LOCAL_MAX_CONCURRENCY else None)
    options = SimOptions(cache_enabled=rng.random() < 0.5)
    return WorkflowDag(templates=templates, tasks=tasks, files=files), cluster, policy, options


class TestStepperAgreement:
    """Test both executors produce the same trace"""

    @pytest.mark.parametrize("block", range(10))
    def test_random_workflows(self, block):
        """Test byte-identical traces over seeded random cases"""
        for seed in range(block * CASES // 10, (block + 1) * CASES // 10):
            dag, cluster, policy, options = random_case(seed)

            engine_trace, _ = simulate(dag, cluster, policy, options=options)
            stepped = step_simulate(dag, cluster, policy, options=options)

            assert export_trace(engine_trace) == export_trace(stepped), f"seed {seed}"

    @pytest.mark.parametrize("seed", range(50))
    def test_random_workflows_are_safe(self, seed):
        """Test dependency order and node capacity on random cases"""
        dag, cluster, policy, options = random_case(seed)
        trace, _ = simulate(dag, cluster, policy, options=options)
        entries = trace.by_task()
        nodes = {node.id: node for node in cluster.nodes}

        assert len(trace) == len(dag.tasks)
        for task in dag.tasks:
            for producer in dag.predecessors(task):
                assert entries[task.id].start_s >= entries[producer].end_s
        timed = [entry for entry in trace if not entry.cache_hit]
        for entry in timed:
            holding = [other for other in timed if other.node == entry.node
                       and other.start_s <= entry.start_s < other.end_s]
            assert sum(other.threads for other in holding) <= nodes[entry.node].threads
            memory = sum(dag.templates[other.template].memory_gb.m for other in holding)
            assert memory <= nodes[entry.node].mem_gb


class TestStepper:
    """Test the interpreter on its own"""

    def test_chain(self, make_template, make_cluster):
        """Test a two-task chain"""
        template = make_template(serial=3.0)
        dag = WorkflowDag(
            templates=[template],
            tasks=[TaskInstance("a", "work", (), (), ("x",)), TaskInstance("b", "work", ("x",), (), ())],
            files=[FileArtifact("x", 1.0, "a")],
        )

        trace = step_simulate(dag, make_cluster())

        assert [(entry.task_id, entry.start_s, entry.end_s) for entry in trace.sorted_entries()] == [
            ("a", 0.0, 3.0),
            ("b", 3.0, 6.0),
        ]

    def test_step_limit(self, make_template, make_cluster):
        """Test exceeding max_steps raises"""
        dag = WorkflowDag(templates=[make_template(serial=100.0)], tasks=[TaskInstance("a", "work")])

        with pytest.raises(SimulationError):
            step_simulate(dag, make_cluster(), max_steps=10)

    def test_profile_templates_drive_placement(self, make_template, make_cluster):
        """Test profile memory decides how many tasks share a node, as in the event engine"""
        dag = WorkflowDag(templates=[make_template(serial=5.0)],
                          tasks=[TaskInstance("a", "work"), TaskInstance("b", "work")])
        profiles = ProfileSet(name="heavy", templates={"work": make_template(serial=5.0, mem=10.0)})
        cluster = make_cluster(shapes=((2, 16.0),))

        stepped = step_simulate(dag, cluster, profiles=profiles)
        engine_trace, _ = simulate(dag, cluster, profiles=profiles)

        assert [(entry.task_id, entry.start_s) for entry in stepped.sorted_entries()] == [("a", 0.0), ("b", 5.0)]
        assert export_trace(stepped) == export_trace(engine_trace)
