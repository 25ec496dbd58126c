// Gating rules for operator actions. The UI never updates state
// optimistically: a click fires the request and the view changes only
// when the resulting event arrives on the stream.

export interface JobLike {
  state: string;
  attempt: number;
}

export function canResubmit(job: JobLike, maxAttempts: number): boolean {
  return job.state === "FAILED" && job.attempt < maxAttempts;
}

export function canStart(experimentState: string): boolean {
  return experimentState === "CREATED" || experimentState === "PAUSED";
}

export function canPause(experimentState: string): boolean {
  return experimentState === "RUNNING";
}

export function isFrozen(experimentState: string): boolean {
  return experimentState === "PAUSED";
}
