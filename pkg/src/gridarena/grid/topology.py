"""Modeled grid: clusters of worker nodes behind compute-element queues,
each with a local storage element, fed from one central storage element."""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass

from gridarena import xmlio


@dataclass(frozen=True)
class Cluster:
    cluster_id: str
    wn_count: int
    wn_speed_factor: float = 1.0  # multiplier on nominal compute duration
    local_se_bandwidth: float = 100e6  # bytes/sec
    ce_queue_capacity: int = 10_000

    def __post_init__(self) -> None:
        if not self.cluster_id:
            raise ValueError("cluster_id must be non-empty")
        if self.wn_count < 1:
            raise ValueError(f"wn_count must be >= 1, got {self.wn_count}")
        if self.wn_speed_factor <= 0:
            raise ValueError(f"wn_speed_factor must be > 0, got {self.wn_speed_factor}")
        if self.local_se_bandwidth <= 0:
            raise ValueError("local_se_bandwidth must be > 0")
        if self.ce_queue_capacity < 1:
            raise ValueError("ce_queue_capacity must be >= 1")


@dataclass(frozen=True)
class GridTopology:
    clusters: tuple[Cluster, ...]
    central_se_bandwidth: float = 100e6

    def __post_init__(self) -> None:
        if not self.clusters:
            raise ValueError("topology needs at least one cluster")
        ids = [c.cluster_id for c in self.clusters]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate cluster ids: {ids}")
        if self.central_se_bandwidth <= 0:
            raise ValueError("central_se_bandwidth must be > 0")

    @property
    def total_worker_nodes(self) -> int:
        return sum(c.wn_count for c in self.clusters)

    def cluster(self, cluster_id: str) -> Cluster:
        for c in self.clusters:
            if c.cluster_id == cluster_id:
                return c
        raise KeyError(f"no cluster {cluster_id!r}")


def single_cluster(wn_count: int, **kwargs) -> GridTopology:
    return GridTopology((Cluster("c0", wn_count, **kwargs),))


def topology_to_xml(topology: GridTopology) -> ET.Element:
    root = ET.Element("topology", {"central_bandwidth": xmlio.fmt_float(topology.central_se_bandwidth)})
    for c in topology.clusters:
        ET.SubElement(
            root,
            "cluster",
            {
                "id": c.cluster_id,
                "worker_nodes": str(c.wn_count),
                "speed_factor": xmlio.fmt_float(c.wn_speed_factor),
                "local_bandwidth": xmlio.fmt_float(c.local_se_bandwidth),
                "queue_capacity": str(c.ce_queue_capacity),
            },
        )
    return root


def topology_from_xml(root: ET.Element) -> GridTopology:
    if root.tag != "topology":
        raise ValueError(f"expected <topology>, got <{root.tag}>")
    clusters = tuple(
        Cluster(
            cluster_id=el.attrib["id"],
            wn_count=int(el.attrib["worker_nodes"]),
            wn_speed_factor=float(el.attrib["speed_factor"]),
            local_se_bandwidth=float(el.attrib["local_bandwidth"]),
            ce_queue_capacity=int(el.attrib["queue_capacity"]),
        )
        for el in root.findall("cluster")
    )
    return GridTopology(clusters, central_se_bandwidth=float(root.attrib["central_bandwidth"]))


def load_topology(path) -> GridTopology:
    return topology_from_xml(xmlio.parse_file(path))


def save_topology(path, topology: GridTopology) -> None:
    xmlio.write_atomic(path, topology_to_xml(topology))
