// Shapes shared across the dashboard. Everything here mirrors what the
// API serves; the client never invents fields of its own.

export interface JobRow {
  matchId: string;
  state: string; // PENDING or a job lifecycle state
  jobId: string;
  attempt: number;
  cluster: string;
  submittedAt: string; // raw decimal string as served (empty if unset)
  finishedAt: string;
}

export interface ExperimentTree {
  experimentId: string;
  state: string;
  rounds: Map<number, JobRow[]>;
}

export interface PlatformEvent {
  seq: number;
  experimentId: string;
  jobId: string; // "-" for experiment-level transitions
  oldState: string;
  newState: string;
  time: string;
}

export interface JobDetail {
  jobId: string;
  experimentId: string;
  matchId: string;
  round: number;
  state: string;
  attempt: number;
  cluster: string;
  submittedAt: string;
  finishedAt: string;
  failureReason: string;
  logTail: string;
}

export const TERMINAL_JOB_STATES = new Set(["DONE", "FAILED", "CANCELLED"]);
export const TERMINAL_EXPERIMENT_STATES = new Set(["COMPLETED", "FAILED"]);

export function parseEventLine(line: string): PlatformEvent {
  const [seq, experimentId, jobId, oldState, newState, time] = line.trim().split(/\s+/);
  return { seq: Number(seq), experimentId, jobId, oldState, newState, time };
}
