"""
Tests for workflow/dag.py - Validation, critical path and signatures
"""
import pytest

from wes_sim.errors import WorkflowValidationError
from wes_sim.workflow.dag import (
    ViolationKind,
    critical_path_hours,
    ensure_valid,
    signature,
    topological_order,
    validate,
)
from wes_sim.workflow.generator import WesParams, generate_wes
from wes_sim.workflow.schemas import FileArtifact, TaskInstance, WorkflowDag


def graph_dag(template, predecessors):
    """DAG where each task reads the outputs of the listed predecessors (roots read 'in')."""
    files = [FileArtifact("in", 1.0)]
    tasks = []
    for task_id, preds in predecessors.items():
        inputs = tuple(f"{pred}.out" for pred in preds) or ("in",)
        files.append(FileArtifact(f"{task_id}.out", 1.0, task_id))
        tasks.append(TaskInstance(task_id, template.name, inputs, (), (f"{task_id}.out",)))
    return WorkflowDag(templates=[template], tasks=tasks, files=files)


class TestValidate:
    """Test DAG invariant checks"""

    def test_empty_dag_is_valid(self):
        """Test that an empty DAG has no violations"""
        assert validate(WorkflowDag()) == []

    def test_self_loop_is_a_cycle(self, make_template):
        """Test a task consuming its own output"""
        template = make_template()
        dag = WorkflowDag(
            templates=[template],
            tasks=[TaskInstance("A", "work", ("a.out",), (), ("a.out",))],
            files=[FileArtifact("a.out", 1.0, "A")],
        )

        kinds = [violation.kind for violation in validate(dag)]

        assert ViolationKind.CYCLE in kinds

    def test_two_task_cycle(self, make_template):
        """Test a cycle through two tasks"""
        template = make_template()
        dag = WorkflowDag(
            templates=[template],
            tasks=[
                TaskInstance("A", "work", ("b.out",), (), ("a.out",)),
                TaskInstance("B", "work", ("a.out",), (), ("b.out",)),
            ],
            files=[FileArtifact("a.out", 1.0, "A"), FileArtifact("b.out", 1.0, "B")],
        )

        violations = [violation for violation in validate(dag) if violation.kind == ViolationKind.CYCLE]

        assert len(violations) == 1
        assert violations[0].subject == "A"

    def test_dangling_input(self, make_template):
        """Test an input that references no artifact"""
        dag = WorkflowDag(
            templates=[make_template()],
            tasks=[TaskInstance("A", "work", ("missing",), (), ())],
        )

        violations = validate(dag)

        assert [violation.kind for violation in violations] == [ViolationKind.DANGLING_REFERENCE]
        assert violations[0].subject == "A"

    def test_duplicate_task_id(self, make_template):
        """Test that reused task ids are reported"""
        dag = WorkflowDag(
            templates=[make_template()],
            tasks=[TaskInstance("A", "work"), TaskInstance("A", "work")],
        )

        assert ViolationKind.DUPLICATE_ID in [violation.kind for violation in validate(dag)]

    def test_unknown_template(self, make_template):
        """Test a task naming an undefined template"""
        dag = WorkflowDag(templates=[make_template()], tasks=[TaskInstance("A", "other")])

        assert [violation.kind for violation in validate(dag)] == [ViolationKind.UNKNOWN_TEMPLATE]

    def test_producer_mismatch(self, make_template):
        """Test an output whose artifact names a different producer"""
        dag = WorkflowDag(
            templates=[make_template()],
            tasks=[TaskInstance("A", "work", (), (), ("x",)), TaskInstance("B", "work")],
            files=[FileArtifact("x", 1.0, "B")],
        )

        kinds = {violation.kind for violation in validate(dag)}

        assert ViolationKind.PRODUCER_MISMATCH in kinds

    def test_generated_workflow_is_valid(self):
        """Test the full-size generated workflow has no violations"""
        dag = generate_wes(WesParams(n_tumor=27, n_control=2, n_regions=467))

        assert validate(dag) == []

    def test_ensure_valid_raises_with_violations(self, make_template):
        """Test ensure_valid carries the violation list"""
        dag = WorkflowDag(templates=[make_template()], tasks=[TaskInstance("A", "other")])

        with pytest.raises(WorkflowValidationError) as info:
            ensure_valid(dag)

        assert len(info.value.violations) == 1


class TestCriticalPath:
    """Test critical path lengths"""

    def test_single_task(self, make_template):
        """Test a single 2h task"""
        dag = graph_dag(make_template(), {"A": []})

        assert critical_path_hours(dag, lambda task: 2.0) == pytest.approx(2.0)

    def test_chain(self, make_template):
        """Test chain A(1h) -> B(2h)"""
        dag = graph_dag(make_template(), {"A": [], "B": ["A"]})
        hours = {"A": 1.0, "B": 2.0}

        assert critical_path_hours(dag, lambda task: hours[task.id]) == pytest.approx(3.0)

    def test_diamond(self, make_template):
        """Test diamond A(1) -> {B(2), C(5)} -> D(1)"""
        dag = graph_dag(make_template(), {"A": [], "B": ["A"], "C": ["A"], "D": ["B", "C"]})
        hours = {"A": 1.0, "B": 2.0, "C": 5.0, "D": 1.0}

        assert critical_path_hours(dag, lambda task: hours[task.id]) == pytest.approx(7.0)

    def test_empty_dag(self):
        """Test that an empty DAG has no critical path"""
        assert critical_path_hours(WorkflowDag(), lambda task: 1.0) == 0.0


class TestTopologicalOrder:
    """Test topological ordering"""

    def test_dependencies_come_first(self, make_template):
        """Test producers precede consumers"""
        dag = graph_dag(make_template(), {"D": ["B", "C"], "B": ["A"], "C": ["A"], "A": []})

        order = topological_order(dag)

        assert order == ["A", "B", "C", "D"]


class TestSignature:
    """Test invocation signatures"""

    def test_identical_invocations_match(self):
        """Test equal template, inputs and params give equal keys"""
        first = TaskInstance("x", "mutect", ("a", "b"), (("region", 1),), ("out1",))
        second = TaskInstance("y", "mutect", ("a", "b"), (("region", 1),), ("out2",))

        assert signature(first) == signature(second)

    def test_region_param_distinguishes(self):
        """Test a different region parameter changes the key"""
        first = TaskInstance("x", "mutect", ("a",), (("region", 1),))
        second = TaskInstance("x", "mutect", ("a",), (("region", 2),))

        assert signature(first) != signature(second)

    def test_input_order_matters(self):
        """Test that input order is part of the key"""
        assert signature(TaskInstance("x", "t", ("a", "b"))) != signature(TaskInstance("x", "t", ("b", "a")))


class TestSerialization:
    """Test DAG JSON documents"""

    def test_json_round_trip(self, small_wes_dag):
        """Test a generated DAG survives JSON serialization"""
        restored = WorkflowDag.from_json(small_wes_dag.to_json())

        assert restored == small_wes_dag
        assert restored.summary() == small_wes_dag.summary()
