// Pure projection of API data into the experiment tree.
//
// The tree is the latest status snapshot folded with the events seen
// since. Events name only (job, old state, new state, time); when a job
// is first seen (or gains a placement at MATCHED) its static facts come
// from one job-detail fetch. States and times always come from the
// stream, so the view never shows a transition the API did not report.

import { parseXml, XmlNode } from "./xml.js";
import { ExperimentTree, JobDetail, JobRow, PlatformEvent, TERMINAL_JOB_STATES } from "./types.js";

export function parseStatusXml(text: string): ExperimentTree {
  const root = parseXml(text);
  if (root.tag !== "experiment") throw new Error(`expected <experiment>, got <${root.tag}>`);
  const rounds = new Map<number, JobRow[]>();
  const roundsEl = root.children.find((c) => c.tag === "rounds");
  for (const roundEl of roundsEl ? roundsEl.children : []) {
    const index = Number(roundEl.attrs["index"]);
    rounds.set(
      index,
      roundEl.children.map((el) => ({
        matchId: el.attrs["match_id"],
        state: el.attrs["state"],
        jobId: el.attrs["job_id"],
        attempt: Number(el.attrs["attempt"]),
        cluster: el.attrs["cluster"],
        submittedAt: el.attrs["submitted_at"],
        finishedAt: el.attrs["finished_at"],
      })),
    );
  }
  return { experimentId: root.attrs["id"], state: root.attrs["state"], rounds };
}

export function parseJobXml(text: string): JobDetail {
  return jobDetailFromNode(parseXml(text));
}

export function jobDetailFromNode(el: XmlNode): JobDetail {
  const log = el.children.find((c) => c.tag === "log");
  // round index is recoverable from the match id (…-rNNN-…)
  const match = el.attrs["match_id"];
  const roundPart = match.split("-").find((p) => /^r\d+$/.test(p));
  return {
    jobId: el.attrs["job_id"],
    experimentId: el.attrs["experiment"],
    matchId: match,
    round: roundPart ? Number(roundPart.slice(1)) : 0,
    state: el.attrs["state"],
    attempt: Number(el.attrs["attempt"]),
    cluster: el.attrs["cluster"],
    submittedAt: el.attrs["submitted_at"],
    finishedAt: el.attrs["finished_at"],
    failureReason: el.attrs["failure_reason"] ?? "",
    logTail: log ? log.text : "",
  };
}

export function parseJobsXml(text: string): JobDetail[] {
  const root = parseXml(text);
  return root.children.filter((c) => c.tag === "job").map(jobDetailFromNode);
}

export function findRow(tree: ExperimentTree, jobId: string): JobRow | undefined {
  for (const rows of tree.rounds.values()) {
    const hit = rows.find((r) => r.jobId === jobId);
    if (hit) return hit;
  }
  return undefined;
}

// Same upsert semantics as the server's status map: a new attempt replaces
// the PENDING placeholder for its match (or its own earlier row), other
// attempts of the same match stay as history.
export function upsertRow(tree: ExperimentTree, round: number, row: JobRow): void {
  const rows = tree.rounds.get(round) ?? [];
  if (!tree.rounds.has(round)) tree.rounds.set(round, rows);
  for (let i = 0; i < rows.length; i++) {
    if (rows[i].matchId !== row.matchId) continue;
    if (rows[i].state === "PENDING" || rows[i].jobId === row.jobId) {
      rows[i] = row;
      return;
    }
  }
  rows.push(row);
}

export type JobFetcher = (jobId: string) => Promise<JobDetail>;

export async function applyEvent(
  tree: ExperimentTree,
  event: PlatformEvent,
  fetchJob: JobFetcher,
): Promise<void> {
  if (event.experimentId !== tree.experimentId) return;
  if (event.jobId === "-") {
    tree.state = event.newState;
    return;
  }
  const known = findRow(tree, event.jobId);
  if (known === undefined || (event.newState === "MATCHED" && known.cluster === "")) {
    const detail = await fetchJob(event.jobId);
    const row: JobRow = {
      matchId: detail.matchId,
      state: event.newState,
      jobId: detail.jobId,
      attempt: detail.attempt,
      cluster: event.newState === "MATCHED" || known !== undefined ? detail.cluster : "",
      submittedAt: known ? known.submittedAt : event.time,
      finishedAt: TERMINAL_JOB_STATES.has(event.newState) ? event.time : "",
    };
    if (known !== undefined && known.cluster !== "") row.cluster = known.cluster;
    upsertRow(tree, detail.round, row);
    return;
  }
  known.state = event.newState;
  if (TERMINAL_JOB_STATES.has(event.newState)) known.finishedAt = event.time;
}

export async function foldEvents(
  tree: ExperimentTree,
  events: PlatformEvent[],
  fetchJob: JobFetcher,
): Promise<number> {
  let last = 0;
  for (const event of events) {
    await applyEvent(tree, event, fetchJob);
    last = event.seq;
  }
  return last;
}

// Canonical one-line-per-row rendering of the tree used to compare a
// folded projection against a fresh snapshot (and in tests).
export function summarize(tree: ExperimentTree): string[] {
  const lines: string[] = [`experiment|${tree.experimentId}|${tree.state}`];
  for (const round of [...tree.rounds.keys()].sort((a, b) => a - b)) {
    for (const row of tree.rounds.get(round)!) {
      lines.push(
        `${round}|${row.matchId}|${row.jobId}|${row.state}|a${row.attempt}` +
          `|${row.cluster}|${row.submittedAt}|${row.finishedAt}`,
      );
    }
  }
  return lines;
}
