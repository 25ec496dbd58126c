// DOM rendering. Dumb by design: everything it draws comes from the
// projected tree and the raw event lines.

import { ExperimentTree, JobRow, PlatformEvent } from "./types.js";
import { canResubmit } from "./actions.js";

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = "",
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

export function renderLogLine(event: PlatformEvent): HTMLElement {
  const line = el("div", "log-line");
  line.dataset.experiment = event.experimentId;
  line.dataset.job = event.jobId;
  line.textContent =
    `${event.seq.toString().padStart(5, " ")}  ${event.experimentId}  ` +
    `${event.jobId}  ${event.oldState} -> ${event.newState}  @${event.time}`;
  return line;
}

export function renderJobRow(
  row: JobRow,
  maxAttempts: number,
  onResubmit: (jobId: string) => void,
): HTMLElement {
  const div = el("div", "job-row");
  const badge = el("span", `badge state-${row.state.toLowerCase()}`, row.state);
  badge.dataset.jobId = row.jobId;
  div.append(
    badge,
    el("span", "match", row.matchId),
    el("span", "attempt", row.attempt ? `attempt ${row.attempt}` : ""),
    el("span", "cluster", row.cluster),
  );
  const button = el("button", "resubmit", "resubmit");
  button.disabled = !canResubmit(row, maxAttempts);
  button.onclick = () => onResubmit(row.jobId);
  div.append(button);
  return div;
}

export function renderTree(
  tree: ExperimentTree,
  maxAttempts: number,
  onResubmit: (jobId: string) => void,
): HTMLElement {
  const root = el("div", "tree");
  const head = el("div", "tree-head");
  head.append(
    el("span", "exp-id", tree.experimentId),
    el("span", `badge state-${tree.state.toLowerCase()}`, tree.state),
  );
  root.append(head);
  for (const round of [...tree.rounds.keys()].sort((a, b) => a - b)) {
    const section = el("div", "round");
    section.append(el("div", "round-head", `round ${round}`));
    for (const row of tree.rounds.get(round)!) {
      section.append(renderJobRow(row, maxAttempts, onResubmit));
    }
    root.append(section);
  }
  return root;
}

export function banner(message: string, kind: "error" | "info"): HTMLElement {
  return el("div", `banner banner-${kind}`, message);
}
