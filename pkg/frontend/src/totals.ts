// Tournament arithmetic shown in the wizard review step; mirrors the
// server's totals so what the user sees matches the eventual report.

export interface Totals {
  agents: number;
  matches: number;
  uniqueGames: number;
  perAgentGames: number;
  participationGames: number;
}

export function computeTotals(agents: number, gamesPerMatch: number): Totals {
  const matches = (agents * (agents - 1)) / 2;
  return {
    agents,
    matches,
    uniqueGames: matches * gamesPerMatch,
    perAgentGames: (agents - 1) * gamesPerMatch,
    participationGames: agents * (agents - 1) * gamesPerMatch,
  };
}
