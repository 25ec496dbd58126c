"""Seeded fault injection for the job lifecycle.

Real grids stop jobs for all sorts of reasons; here the reasons are an
explicit, testable taxonomy: stage_in, runtime, node_lost, stage_out.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


class Phase(str, enum.Enum):
    STAGE_IN = "stage_in"
    RUNNING = "running"
    STAGE_OUT = "stage_out"


DEFAULT_KIND = {
    Phase.STAGE_IN: "stage_in",
    Phase.RUNNING: "runtime",
    Phase.STAGE_OUT: "stage_out",
}

ALL_PHASES = (Phase.STAGE_IN, Phase.RUNNING, Phase.STAGE_OUT)


@dataclass(frozen=True)
class FailurePolicy:
    """Random failure injection.

    With a concrete ``phase``, every pass through that phase fails with
    probability ``p``. With ``phase=None`` each attempt fails with total
    probability ``p`` and the failing phase is drawn uniformly.
    """

    p: float
    phase: Phase | None = None
    seed: int = 0
    kind: str | None = None  # override the per-phase default reason

    def __post_init__(self) -> None:
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must be in [0, 1], got {self.p}")


class FailureInjector:
    """Draws failure plans in deterministic (virtual-event) order and holds
    one-shot targeted injections."""

    def __init__(self, policy: FailurePolicy | None = None):
        self.policy = policy
        self._rng = np.random.Generator(np.random.PCG64(policy.seed if policy else 0))
        # job_id -> list of (phase, kind), consumed on that job's next pass
        self._targeted: dict[str, list[tuple[Phase, str]]] = {}

    def target(self, job_id: str, phase: Phase, kind: str | None = None) -> None:
        self._targeted.setdefault(job_id, []).append((phase, kind or DEFAULT_KIND[phase]))

    def plan_attempt(self, job_id: str) -> dict[Phase, str]:
        """Failure plan for one attempt, drawn at attempt start so the
        outcome is independent of how long each phase takes."""
        plan: dict[Phase, str] = {}
        for phase, kind in self._targeted.pop(job_id, ()):
            plan.setdefault(phase, kind)
        if self.policy is None or self.policy.p == 0.0:
            return plan
        if self.policy.phase is not None:
            if self._rng.random() < self.policy.p:
                phase = self.policy.phase
                plan.setdefault(phase, self.policy.kind or DEFAULT_KIND[phase])
        else:
            if self._rng.random() < self.policy.p:
                phase = ALL_PHASES[int(self._rng.integers(len(ALL_PHASES)))]
                plan.setdefault(phase, self.policy.kind or DEFAULT_KIND[phase])
        return plan
