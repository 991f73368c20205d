"""
Embedded infrastructure presets: stand-alone server (SA), Yarn cluster (YC),
HPC cluster (HPC) and rented EC2 nodes (EC2).

Per-node speeds and launch overheads are calibration constants: no clock
rates are published for these machines.
"""

import json
import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from wes_sim.errors import UnknownPresetError
from .schemas import ClusterSpec, FsRegime, NodeSpec

logger = logging.getLogger(__name__)

PRESET_NAMES = ("SA", "YC", "HPC", "EC2")

SA_SPEED = 0.24402
YC_SPEED = 0.2933
HPC_SPEED = 0.64
EC2_SPEED = 0.3
# Hi-WAY provisions an execution environment for every invocation
HIWAY_LAUNCH_OVERHEAD_S = 13.3

# (count, threads, mem_gb) in node-id order; 111 nodes, 3784 threads
HPC_NODE_GROUPS: Tuple[Tuple[int, int, float], ...] = (
    (60, 34, 128.0),
    (30, 34, 188.0),
    (11, 34, 500.0),
    (4, 35, 500.0),
    (6, 35, 1000.0),
)
# (count, mem_gb) with 24 threads per node
YC_NODE_GROUPS: Tuple[Tuple[int, float], ...] = ((12, 24.0), (11, 36.0))


def _nodes(prefix: str, groups: List[Tuple[int, int, float]], speed: float) -> List[NodeSpec]:
    total = sum(count for count, _, _ in groups)
    width = max(2, len(str(total)))
    nodes = []
    for count, threads, mem_gb in groups:
        for _ in range(count):
            nodes.append(NodeSpec(
                id=f"{prefix}-{len(nodes) + 1:0{width}d}",
                threads=threads,
                mem_gb=mem_gb,
                class_label=f"{threads}t/{mem_gb:g}GB",
                speed=speed,
            ))
    return nodes


def _build(name: str) -> ClusterSpec:
    if name == "SA":
        return ClusterSpec(
            name="SA",
            nodes=_nodes("sa", [(1, 80, 512.0)], SA_SPEED),
            network_gbit=0.0,
            fs_regime=FsRegime.LOCAL_ONLY,
            acquisition_cost_eur=11_000.0,
        )
    if name == "YC":
        return ClusterSpec(
            name="YC",
            nodes=_nodes("yc", [(count, 24, mem) for count, mem in YC_NODE_GROUPS], YC_SPEED),
            network_gbit=10.0,
            fs_regime=FsRegime.STAGED_DFS,
            acquisition_cost_eur=100_000.0,
            task_launch_overhead_s=HIWAY_LAUNCH_OVERHEAD_S,
        )
    if name == "HPC":
        return ClusterSpec(
            name="HPC",
            nodes=_nodes("hpc", list(HPC_NODE_GROUPS), HPC_SPEED),
            network_gbit=64.0,
            fs_regime=FsRegime.SHARED_POSIX,
            acquisition_cost_eur=800_000.0,
        )
    if name == "EC2":
        # r3.4xlarge has 16 vCPUs; the quoted "256 threads" is the fleet total
        return ClusterSpec(
            name="EC2",
            nodes=_nodes("ec2", [(16, 16, 122.0)], EC2_SPEED),
            network_gbit=10.0,
            fs_regime=FsRegime.STAGED_DFS,
            per_run_rental_eur=500.0,
            task_launch_overhead_s=HIWAY_LAUNCH_OVERHEAD_S,
        )
    raise UnknownPresetError(f"unknown cluster preset {name!r}; expected one of {', '.join(PRESET_NAMES)}")


_PRESETS: Dict[str, ClusterSpec] = {}


def preset(name: str) -> ClusterSpec:
    """
    Embedded cluster preset by name (case-insensitive).

    Raises:
        UnknownPresetError: If the name is not one of SA, YC, HPC, EC2
    """
    key = str(name).upper()
    if key not in _PRESETS:
        _PRESETS[key] = _build(key)
    return _PRESETS[key]


def dump_presets(name: Optional[str] = None) -> str:
    """JSON document of one preset, or of all presets keyed by name."""
    if name is not None:
        return preset(name).model_dump_json(indent=2)
    return json.dumps({key: preset(key).model_dump(mode="json") for key in PRESET_NAMES}, indent=2)


def load_cluster(source: Union[str, Path]) -> ClusterSpec:
    """Preset name or path to a cluster JSON document."""
    if str(source).upper() in PRESET_NAMES:
        return preset(str(source))
    path = Path(source)
    if not path.is_file():
        raise UnknownPresetError(f"{source!r} is neither a preset name nor a cluster file")
    cluster = ClusterSpec.load(path)
    logger.debug(f"Loaded cluster {cluster.name!r} with {len(cluster.nodes)} nodes from {path}")
    return cluster
