"""Agent character configuration shared by all game workloads.

A character is the per-agent knob set a tournament varies: learning rate,
discount, trace decay, exploration, plus the seed that fixes the agent's
initial artifact (e.g. network weights).
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class TdParams:
    """Temporal-difference learning parameters.

    ``trace_decay`` is the eligibility-trace decay factor (serialized as
    ``lambda`` in the manifest XML, which is a Python keyword).
    """

    alpha: float = 0.1
    gamma: float = 0.95
    trace_decay: float = 0.5
    epsilon: float = 0.1

    def validate(self) -> None:
        if not self.alpha > 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        for name in ("gamma", "trace_decay", "epsilon"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")


@dataclass(frozen=True)
class AgentCharacter:
    """One tournament participant: identity plus learning character."""

    agent_id: str
    td_params: TdParams = field(default_factory=TdParams)
    network_seed: int = 0
    display_name: str = ""

    def __post_init__(self) -> None:
        if not self.agent_id:
            raise ValueError("agent_id must be non-empty")
        self.td_params.validate()

    @property
    def name(self) -> str:
        return self.display_name or self.agent_id
