import { describe, expect, it } from "vitest";

import {
  addAgent,
  defaultAgent,
  manifestXml,
  newDraft,
  reviewTotals,
  validateDraft,
} from "../src/wizard.js";
import { computeTotals } from "../src/totals.js";
import { parseXml } from "../src/xml.js";

describe("totals", () => {
  it("matches the tournament arithmetic at full scale", () => {
    const totals = computeTotals(126, 100);
    expect(totals.matches).toBe(7875);
    expect(totals.perAgentGames).toBe(12500);
    expect(totals.participationGames).toBe(1575000);
    expect(totals.uniqueGames).toBe(787500);
  });

  it("participation is always twice the unique count", () => {
    for (const [n, g] of [[2, 1], [5, 7], [13, 100]] as const) {
      const totals = computeTotals(n, g);
      expect(totals.participationGames).toBe(2 * totals.uniqueGames);
    }
  });
});

describe("wizard flow", () => {
  it("review shows the full-scale totals for 126 agents at 100 games", () => {
    const draft = newDraft();
    draft.experimentId = "big";
    draft.gamesPerMatch = 100;
    for (let i = 0; i < 126; i++) expect(addAgent(draft, defaultAgent(i))).toBeNull();
    const totals = reviewTotals(draft);
    expect(totals.matches).toBe(7875);
    expect(totals.perAgentGames).toBe(12500);
    expect(validateDraft(draft)).toEqual([]);
  });

  it("rejects duplicate agent ids before submit", () => {
    const draft = newDraft();
    draft.experimentId = "dup";
    expect(addAgent(draft, defaultAgent(0))).toBeNull();
    expect(addAgent(draft, defaultAgent(0))).toMatch(/duplicate/);
    expect(draft.agents).toHaveLength(1);
  });

  it("repeated add-agent lists every character in review", () => {
    const draft = newDraft();
    draft.experimentId = "three";
    for (let i = 0; i < 3; i++) addAgent(draft, defaultAgent(i));
    expect(draft.agents.map((a) => a.id)).toEqual(["agent-00", "agent-01", "agent-02"]);
  });

  it("mirrors server validation for under-filled drafts", () => {
    const draft = newDraft();
    draft.gamesPerMatch = 0;
    const errors = validateDraft(draft);
    expect(errors.some((e) => e.includes("experiment id"))).toBe(true);
    expect(errors.some((e) => e.includes("at least 2 agents"))).toBe(true);
    expect(errors.some((e) => e.includes("games per match"))).toBe(true);
  });

  it("builds a manifest document the server schema expects", () => {
    const draft = newDraft();
    draft.experimentId = "wiz";
    draft.gamesPerMatch = 10;
    addAgent(draft, defaultAgent(0));
    addAgent(draft, { ...defaultAgent(1), name: 'A "quoted" <name>' });
    const root = parseXml(manifestXml(draft));
    expect(root.tag).toBe("experiment");
    expect(root.attrs["id"]).toBe("wiz");
    expect(root.attrs["games_per_match"]).toBe("10");
    expect(root.attrs["max_attempts"]).toBe("3");
    expect(root.attrs["created_at"]).toBeTruthy();
    const agents = root.children.find((c) => c.tag === "agents")!;
    expect(agents.children).toHaveLength(2);
    const agent = agents.children[0];
    for (const attr of ["id", "name", "seed", "alpha", "gamma", "lambda", "epsilon"]) {
      expect(attr in agent.attrs).toBe(true);
    }
    expect(agents.children[1].attrs["name"]).toBe('A "quoted" <name>');
  });
});
