"""
Pytest configuration and fixtures
"""
import pytest
import sys
from pathlib import Path

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))


@pytest.fixture
def make_template():
    """Factory for task templates with integer-friendly defaults"""
    from wes_sim.workflow.schemas import (
        ConfigurableThreads,
        FixedMemory,
        FixedThreads,
        OutputSizeModel,
        TaskStage,
        TaskTemplate,
        WorkModel,
    )

    def factory(name="work", threads=1, mem=0.0, serial=0.0, parallel=0.0, configurable=False,
                out_a=0.0, out_r=0.0, stage=TaskStage.POST, deterministic=True):
        thread_model = ConfigurableThreads(max_n=threads) if configurable else FixedThreads(n=threads)
        return TaskTemplate(
            name=name,
            stage=stage,
            thread_model=thread_model,
            memory_gb=FixedMemory(m=mem),
            work_model=WorkModel(serial_s=serial, parallel_s_per_gb=parallel),
            deterministic=deterministic,
            output_size_model=OutputSizeModel(a=out_a, r=out_r),
        )

    return factory


@pytest.fixture
def make_cluster():
    """Factory for small clusters: one (threads, mem_gb) pair per node"""
    from wes_sim.infra.schemas import ClusterSpec, FsRegime, NodeSpec

    def factory(shapes=((2, 16.0),), regime=FsRegime.LOCAL_ONLY, network_gbit=0.0, **extra):
        nodes = [
            NodeSpec(id=f"n{index}", threads=threads, mem_gb=mem_gb)
            for index, (threads, mem_gb) in enumerate(shapes)
        ]
        return ClusterSpec(name="test", nodes=nodes, network_gbit=network_gbit, fs_regime=regime,
                           acquisition_cost_eur=1000.0, **extra)

    return factory


@pytest.fixture
def bundled_profiles():
    """The committed default profile set"""
    from wes_sim.calibration.profiles import load_default_profiles
    return load_default_profiles()


@pytest.fixture
def small_wes_dag(bundled_profiles):
    """Two tumors, one control, three regions"""
    from wes_sim.workflow.generator import WesParams, generate_wes
    return generate_wes(WesParams(n_tumor=2, n_control=1, n_regions=3), bundled_profiles)
