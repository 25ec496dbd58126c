from gridarena.grid.engine import GridEngine, LocalThreadPoolExecutor, SynchronousExecutor
from gridarena.grid.failures import FailurePolicy, Phase
from gridarena.grid.jobs import ArtifactRef, JobRecord, JobSpec, JobState, WorkloadCall
from gridarena.grid.storage import StorageElement, digest_of
from gridarena.grid.topology import Cluster, GridTopology

__all__ = [
    "ArtifactRef",
    "Cluster",
    "FailurePolicy",
    "GridEngine",
    "GridTopology",
    "JobRecord",
    "JobSpec",
    "JobState",
    "LocalThreadPoolExecutor",
    "Phase",
    "StorageElement",
    "SynchronousExecutor",
    "WorkloadCall",
    "digest_of",
]
