"""
Tests for infra/staging.py - Transfers, stage plans and locality
"""
import pytest

from wes_sim.errors import InfrastructureError
from wes_sim.infra.schemas import FsRegime, FsState, NodeSpec
from wes_sim.infra.staging import initial_placement, locality_score, resident_gb, stage_plan, transfer_time_s
from wes_sim.workflow.schemas import FileArtifact, TaskInstance, WorkflowDag


@pytest.fixture
def nodes():
    """Two nodes A and B"""
    return NodeSpec(id="A", threads=4, mem_gb=8.0), NodeSpec(id="B", threads=4, mem_gb=8.0)


@pytest.fixture
def two_input_dag(make_template):
    """One task reading a 3 GB and a 9 GB input and writing a 2 GB output"""
    return WorkflowDag(
        templates=[make_template()],
        tasks=[TaskInstance("t", "work", ("small", "large"), (), ("out",))],
        files=[FileArtifact("small", 3.0), FileArtifact("large", 9.0), FileArtifact("out", 2.0, "t")],
    )


class TestTransferTime:
    """Test fair-share transfer arithmetic"""

    def test_single_transfer(self):
        """Test 10 GB over 10 Gbit"""
        assert transfer_time_s(10.0, 10.0, 1) == pytest.approx(8.0)

    def test_shared_link(self):
        """Test two concurrent transfers halve the bandwidth"""
        assert transfer_time_s(10.0, 10.0, 2) == pytest.approx(16.0)

    def test_nothing_to_move(self):
        """Test zero bytes take zero time even without a network"""
        assert transfer_time_s(0.0, 0.0, 3) == 0.0

    def test_zero_bandwidth(self):
        """Test moving bytes over no network raises"""
        with pytest.raises(InfrastructureError):
            transfer_time_s(1.0, 0.0)

    def test_invalid_share(self):
        """Test the share count must be positive"""
        with pytest.raises(InfrastructureError):
            transfer_time_s(1.0, 10.0, 0)


class TestStagePlan:
    """Test fetch/publish plans per regime"""

    def test_local_only_moves_nothing(self, two_input_dag, nodes):
        """Test local_only needs no transfers"""
        plan = stage_plan(two_input_dag.task("t"), nodes[0], FsState(), FsRegime.LOCAL_ONLY, two_input_dag)

        assert plan.fetch == [] and plan.publish == []

    def test_staged_fully_resident(self, two_input_dag, nodes):
        """Test resident inputs are not fetched"""
        fs = FsState({"small": ["A"], "large": ["A"]})

        plan = stage_plan(two_input_dag.task("t"), nodes[0], fs, FsRegime.STAGED_DFS, two_input_dag)

        assert plan.fetch == []
        assert plan.publish_gb == pytest.approx(2.0)

    def test_staged_resident_elsewhere(self, two_input_dag, nodes):
        """Test inputs held only by another node are fetched"""
        fs = FsState({"small": ["B"], "large": ["B"]})

        plan = stage_plan(two_input_dag.task("t"), nodes[0], fs, FsRegime.STAGED_DFS, two_input_dag)

        assert plan.fetch_gb == pytest.approx(12.0)

    def test_shared_posix_reads_everything(self, two_input_dag, nodes):
        """Test shared POSIX reads every input over the network"""
        fs = FsState({"small": ["A"], "large": ["A"]})

        plan = stage_plan(two_input_dag.task("t"), nodes[0], fs, FsRegime.SHARED_POSIX, two_input_dag)

        assert plan.fetch_gb == pytest.approx(12.0)
        assert plan.publish_gb == pytest.approx(2.0)

    def test_missing_replica(self, two_input_dag, nodes):
        """Test an input with no replica raises"""
        with pytest.raises(InfrastructureError):
            stage_plan(two_input_dag.task("t"), nodes[0], FsState({"small": ["A"]}),
                       FsRegime.STAGED_DFS, two_input_dag)


class TestLocality:
    """Test locality scores"""

    def test_all_resident(self, two_input_dag, nodes):
        """Test full locality"""
        fs = FsState({"small": ["A"], "large": ["A"]})

        assert locality_score(two_input_dag.task("t"), nodes[0], fs, two_input_dag) == 1.0

    def test_none_resident(self, two_input_dag, nodes):
        """Test no locality"""
        fs = FsState({"small": ["B"], "large": ["B"]})

        assert locality_score(two_input_dag.task("t"), nodes[0], fs, two_input_dag) == 0.0

    def test_byte_ratio(self, two_input_dag, nodes):
        """Test 3 GB of 12 GB resident"""
        fs = FsState({"small": ["A"], "large": ["B"]})

        assert locality_score(two_input_dag.task("t"), nodes[0], fs, two_input_dag) == pytest.approx(0.25)

    def test_resident_bytes_per_node(self, two_input_dag):
        """Test resident bytes are summed per holding node"""
        fs = FsState({"small": ["A", "B"], "large": ["B"]})

        total, resident = resident_gb(two_input_dag.task("t"), fs, two_input_dag)

        assert total == pytest.approx(12.0)
        assert resident == {"A": pytest.approx(3.0), "B": pytest.approx(12.0)}


class TestInitialPlacement:
    """Test workflow input placement"""

    def test_round_robin(self, make_template, make_cluster):
        """Test sorted inputs are dealt over sorted nodes"""
        dag = WorkflowDag(
            templates=[make_template()],
            files=[FileArtifact(name, 1.0) for name in ("c", "a", "b")],
        )
        cluster = make_cluster(shapes=((1, 1.0), (1, 1.0)), regime=FsRegime.STAGED_DFS)

        fs = initial_placement(dag, cluster)

        assert fs.replicas("a") == {"n0"}
        assert fs.replicas("b") == {"n1"}
        assert fs.replicas("c") == {"n0"}
