// Three-step experiment creation wizard: basics, repeatable add-agent,
// review. Validation mirrors the server's manifest rules so anything the
// wizard submits passes server-side validation.

import { escapeXml } from "./xml.js";
import { computeTotals, Totals } from "./totals.js";

export interface AgentDraft {
  id: string;
  name: string;
  seed: number;
  alpha: number;
  gamma: number;
  lambda: number;
  epsilon: number;
}

export interface WizardDraft {
  step: 1 | 2 | 3;
  experimentId: string;
  gameId: string;
  gamesPerMatch: number;
  maxAttempts: number;
  seed: number;
  agents: AgentDraft[];
}

export function newDraft(): WizardDraft {
  return {
    step: 1,
    experimentId: "",
    gameId: "rsp",
    gamesPerMatch: 100,
    maxAttempts: 3,
    seed: 0,
    agents: [],
  };
}

export function defaultAgent(index: number): AgentDraft {
  return {
    id: `agent-${String(index).padStart(2, "0")}`,
    name: "",
    seed: index,
    alpha: 0.1,
    gamma: 0.95,
    lambda: 0.5,
    epsilon: 0.1,
  };
}

export function addAgent(draft: WizardDraft, agent: AgentDraft): string | null {
  if (!agent.id) return "agent id must be non-empty";
  if (draft.agents.some((a) => a.id === agent.id)) {
    return `duplicate agent id: ${agent.id}`;
  }
  draft.agents.push({ ...agent });
  return null;
}

export function removeAgent(draft: WizardDraft, id: string): void {
  draft.agents = draft.agents.filter((a) => a.id !== id);
}

// Mirrors the server's manifest validation rules one for one.
export function validateDraft(draft: WizardDraft): string[] {
  const errors: string[] = [];
  if (!draft.experimentId) errors.push("experiment id must be non-empty");
  if (!draft.gameId) errors.push("game must be chosen");
  if (draft.agents.length < 2) {
    errors.push(`need at least 2 agents, got ${draft.agents.length}`);
  }
  const ids = draft.agents.map((a) => a.id);
  const dupes = [...new Set(ids.filter((id, i) => ids.indexOf(id) !== i))];
  if (dupes.length) errors.push(`duplicate agent ids: ${dupes.join(", ")}`);
  if (draft.gamesPerMatch < 1) {
    errors.push(`games per match must be >= 1, got ${draft.gamesPerMatch}`);
  }
  if (draft.maxAttempts < 1) {
    errors.push(`max attempts must be >= 1, got ${draft.maxAttempts}`);
  }
  return errors;
}

export function reviewTotals(draft: WizardDraft): Totals {
  return computeTotals(draft.agents.length, draft.gamesPerMatch);
}

function floatAttr(value: number): string {
  return Number.isInteger(value) ? `${value}.0` : String(value);
}

export function manifestXml(draft: WizardDraft): string {
  const agentLines = draft.agents
    .map(
      (a) =>
        `    <agent id="${escapeXml(a.id)}" name="${escapeXml(a.name)}" ` +
        `seed="${a.seed}" alpha="${floatAttr(a.alpha)}" gamma="${floatAttr(a.gamma)}" ` +
        `lambda="${floatAttr(a.lambda)}" epsilon="${floatAttr(a.epsilon)}"/>`,
    )
    .join("\n");
  const created = new Date().toISOString().replace(/\.\d{3}Z$/, "+00:00");
  return (
    `<?xml version='1.0' encoding='UTF-8'?>\n` +
    `<experiment id="${escapeXml(draft.experimentId)}" game="${escapeXml(draft.gameId)}" ` +
    `games_per_match="${draft.gamesPerMatch}" max_attempts="${draft.maxAttempts}" ` +
    `seed="${draft.seed}" created_at="${created}">\n` +
    `  <agents>\n${agentLines}\n  </agents>\n</experiment>\n`
  );
}
