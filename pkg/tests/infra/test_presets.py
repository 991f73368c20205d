"""
Tests for infra/presets.py - Embedded infrastructure presets
"""
import json

import pytest
from pydantic import ValidationError

from wes_sim.errors import UnknownPresetError
from wes_sim.infra.presets import PRESET_NAMES, dump_presets, load_cluster, preset
from wes_sim.infra.schemas import ClusterSpec, FsRegime, NodeSpec


class TestPresets:
    """Test the preset table"""

    def test_stand_alone_server(self):
        """Test SA is one 80-thread node"""
        cluster = preset("SA")

        assert len(cluster.nodes) == 1
        assert cluster.nodes[0].threads == 80
        assert cluster.nodes[0].mem_gb == 512.0
        assert cluster.fs_regime == FsRegime.LOCAL_ONLY

    def test_yarn_cluster_totals(self):
        """Test YC has 23 nodes and 552 threads"""
        cluster = preset("YC")

        assert len(cluster.nodes) == 23
        assert cluster.total_threads == 552
        assert cluster.fs_regime == FsRegime.STAGED_DFS

    def test_hpc_totals(self):
        """Test HPC has 111 nodes and 3784 threads"""
        cluster = preset("HPC")

        assert len(cluster.nodes) == 111
        assert cluster.total_threads == 3784
        assert cluster.fs_regime == FsRegime.SHARED_POSIX

    def test_ec2_is_rented(self):
        """Test EC2 carries a per-run price instead of an acquisition cost"""
        cluster = preset("EC2")

        assert cluster.total_threads == 256
        assert cluster.per_run_rental_eur == 500.0
        assert cluster.cost_basis_kind() == "rental"

    def test_case_insensitive(self):
        """Test preset names ignore case"""
        assert preset("yc") is preset("YC")

    def test_unknown_preset(self):
        """Test unknown names raise"""
        with pytest.raises(UnknownPresetError):
            preset("mainframe")

    def test_node_ids_are_zero_padded(self):
        """Test node ids sort in inventory order"""
        cluster = preset("HPC")

        assert cluster.node_ids[0] == "hpc-001"
        assert cluster.node_ids == [node.id for node in cluster.nodes]


class TestDumpAndLoad:
    """Test preset JSON documents"""

    def test_dump_all(self):
        """Test dumping every preset"""
        document = json.loads(dump_presets())

        assert sorted(document) == sorted(PRESET_NAMES)

    def test_dump_one_loads_back(self, tmp_path):
        """Test a dumped preset loads as a cluster file"""
        path = tmp_path / "yc.json"
        path.write_text(dump_presets("YC"), encoding="utf-8")

        assert load_cluster(str(path)) == preset("YC")

    def test_load_missing_file(self, tmp_path):
        """Test a path that does not exist"""
        with pytest.raises(UnknownPresetError):
            load_cluster(str(tmp_path / "missing.json"))


class TestClusterSpec:
    """Test cluster invariants"""

    def test_duplicate_node_ids_rejected(self):
        """Test node ids must be unique"""
        node = NodeSpec(id="a", threads=1, mem_gb=1.0)

        with pytest.raises(ValidationError):
            ClusterSpec(nodes=[node, node])

    def test_local_only_needs_one_node(self):
        """Test local_only clusters have exactly one node"""
        nodes = [NodeSpec(id="a", threads=1, mem_gb=1.0), NodeSpec(id="b", threads=1, mem_gb=1.0)]

        with pytest.raises(ValidationError):
            ClusterSpec(nodes=nodes, fs_regime=FsRegime.LOCAL_ONLY)
