from gridarena.orchestrator.orchestrator import (
    Orchestrator,
    OrchestratorError,
    OrchestratorEvent,
    ResubmitPolicy,
)
from gridarena.orchestrator.report import (
    BASELINE,
    BaselineFigures,
    ExperimentReport,
    estimate_sequential_seconds,
    report_text,
    report_to_xml,
    speedup_ratio,
)

__all__ = [
    "BASELINE",
    "BaselineFigures",
    "ExperimentReport",
    "Orchestrator",
    "OrchestratorError",
    "OrchestratorEvent",
    "ResubmitPolicy",
    "estimate_sequential_seconds",
    "report_text",
    "report_to_xml",
    "speedup_ratio",
]
