// Dashboard wiring: dual panels (event log left, experiment tree right),
// wizard for new experiments, stream-first updates with polling fallback.

import { HttpApi, ApiConflict } from "./api.js";
import { parseStatusXml, parseJobXml, applyEvent } from "./projection.js";
import { parseXml } from "./xml.js";
import { ExperimentTree, PlatformEvent } from "./types.js";
import { renderLogLine, renderTree, banner, el } from "./render.js";
import {
  addAgent,
  defaultAgent,
  manifestXml,
  newDraft,
  reviewTotals,
  validateDraft,
  WizardDraft,
} from "./wizard.js";
import { canPause, canStart } from "./actions.js";

const POLL_FALLBACK_MS = 5000;

const api = new HttpApi("");

interface AppState {
  experiments: Map<string, string>; // id -> state
  selected: string | null;
  tree: ExperimentTree | null;
  lastSeq: number;
  connected: boolean;
  filter: string;
  wizard: WizardDraft | null;
}

const state: AppState = {
  experiments: new Map(),
  selected: null,
  tree: null,
  lastSeq: 0,
  connected: false,
  filter: "",
  wizard: null,
};

const logPane = document.getElementById("log-pane")!;
const treePane = document.getElementById("tree-pane")!;
const listPane = document.getElementById("experiment-list")!;
const bannerPane = document.getElementById("banner")!;
const filterInput = document.getElementById("log-filter") as HTMLInputElement;

function toast(message: string): void {
  const node = el("div", "toast", message);
  document.body.append(node);
  setTimeout(() => node.remove(), 4000);
}

async function refreshExperiments(): Promise<void> {
  const root = parseXml(await api.experimentsXml());
  state.experiments = new Map(
    root.children.map((c) => [c.attrs["id"], c.attrs["state"]]),
  );
  drawExperimentList();
}

async function selectExperiment(experimentId: string): Promise<void> {
  state.selected = experimentId;
  state.tree = parseStatusXml(await api.statusXml(experimentId));
  drawTree();
}

function drawExperimentList(): void {
  listPane.replaceChildren();
  if (state.experiments.size === 0) {
    const empty = el("div", "empty-state");
    empty.append(el("p", "", "no experiments yet"));
    const cta = el("button", "cta", "create one");
    cta.onclick = openWizard;
    empty.append(cta);
    listPane.append(empty);
    return;
  }
  for (const [id, expState] of state.experiments) {
    const item = el("div", "exp-item");
    const link = el("a", "", `${id} (${expState})`);
    link.onclick = () => void selectExperiment(id);
    item.append(link);
    const start = el("button", "", "start");
    start.disabled = !canStart(expState);
    start.onclick = () => void api.start(id).catch((e) => toast(String(e.message)));
    const pause = el("button", "", "pause");
    pause.disabled = !canPause(expState);
    pause.onclick = () => void api.pause(id).catch((e) => toast(String(e.message)));
    item.append(start, pause);
    listPane.append(item);
  }
}

function drawTree(): void {
  treePane.replaceChildren();
  if (!state.tree) {
    treePane.append(el("div", "empty-state", "select an experiment"));
    return;
  }
  treePane.append(
    renderTree(state.tree, 3, (jobId) =>
      api.resubmit(jobId).catch((error: ApiConflict) => toast(`${error.code}: ${error.message}`)),
    ),
  );
}

function appendLog(event: PlatformEvent): void {
  const line = renderLogLine(event);
  if (state.filter && !line.textContent!.includes(state.filter)) line.classList.add("hidden");
  logPane.append(line);
  logPane.scrollTop = logPane.scrollHeight;
}

async function onEvent(event: PlatformEvent): Promise<void> {
  state.lastSeq = Math.max(state.lastSeq, event.seq);
  appendLog(event);
  if (event.jobId === "-") {
    state.experiments.set(event.experimentId, event.newState);
    drawExperimentList();
  }
  if (state.tree && event.experimentId === state.tree.experimentId) {
    await applyEvent(state.tree, event, async (jobId) => parseJobXml(await api.jobXml(jobId)));
    drawTree();
  }
}

function setConnected(connected: boolean): void {
  state.connected = connected;
  bannerPane.replaceChildren();
  if (!connected) {
    bannerPane.append(
      banner("disconnected - showing cached state, reconnecting...", "error"),
    );
  }
}

function subscribeLoop(): void {
  setConnected(true);
  api.subscribe(
    state.lastSeq,
    (event) => void onEvent(event),
    () => {
      setConnected(false);
      // polling fallback, then try the stream again from the last seq
      const timer = setInterval(async () => {
        try {
          await refreshExperiments();
          if (state.selected) await selectExperiment(state.selected);
          clearInterval(timer);
          subscribeLoop();
        } catch {
          setConnected(false);
        }
      }, POLL_FALLBACK_MS);
    },
  );
}

// ---- wizard -----------------------------------------------------------------

function openWizard(): void {
  state.wizard = newDraft();
  drawWizard();
}

function drawWizard(): void {
  const host = document.getElementById("wizard")!;
  host.replaceChildren();
  const draft = state.wizard;
  if (!draft) return;
  const box = el("div", "wizard-box");
  box.append(el("h3", "", `new experiment - step ${draft.step} of 3`));

  if (draft.step === 1) {
    box.append(
      labelled("experiment id", "wiz-id", draft.experimentId),
      labelled("game", "wiz-game", draft.gameId),
      labelled("games per match", "wiz-games", String(draft.gamesPerMatch)),
      labelled("max attempts", "wiz-attempts", String(draft.maxAttempts)),
      labelled("seed", "wiz-seed", String(draft.seed)),
    );
    const next = el("button", "cta", "next: agents");
    next.onclick = () => {
      draft.experimentId = inputValue("wiz-id");
      draft.gameId = inputValue("wiz-game");
      draft.gamesPerMatch = Number(inputValue("wiz-games"));
      draft.maxAttempts = Number(inputValue("wiz-attempts"));
      draft.seed = Number(inputValue("wiz-seed"));
      draft.step = 2;
      drawWizard();
    };
    box.append(next);
  } else if (draft.step === 2) {
    const list = el("div", "agent-list");
    for (const agent of draft.agents) {
      list.append(el("div", "agent-row", `${agent.id} alpha=${agent.alpha} epsilon=${agent.epsilon}`));
    }
    box.append(list);
    const prefill = defaultAgent(draft.agents.length);
    box.append(
      labelled("agent id", "wiz-agent-id", prefill.id),
      labelled("alpha", "wiz-alpha", String(prefill.alpha)),
      labelled("gamma", "wiz-gamma", String(prefill.gamma)),
      labelled("lambda", "wiz-lambda", String(prefill.lambda)),
      labelled("epsilon", "wiz-epsilon", String(prefill.epsilon)),
    );
    const errorBox = el("div", "wizard-error");
    const add = el("button", "", "add agent");
    add.onclick = () => {
      const error = addAgent(draft, {
        id: inputValue("wiz-agent-id"),
        name: "",
        seed: draft.agents.length,
        alpha: Number(inputValue("wiz-alpha")),
        gamma: Number(inputValue("wiz-gamma")),
        lambda: Number(inputValue("wiz-lambda")),
        epsilon: Number(inputValue("wiz-epsilon")),
      });
      if (error) {
        errorBox.textContent = error;
      } else {
        drawWizard();
      }
    };
    const review = el("button", "cta", "review");
    review.onclick = () => {
      draft.step = 3;
      drawWizard();
    };
    box.append(add, review, errorBox);
  } else {
    const errors = validateDraft(draft);
    const totals = reviewTotals(draft);
    box.append(el("div", "", `agents: ${draft.agents.length}`));
    for (const agent of draft.agents) box.append(el("div", "agent-row", agent.id));
    box.append(
      el("div", "totals", `matches: ${totals.matches}`),
      el("div", "totals", `games per agent: ${totals.perAgentGames}`),
      el("div", "totals", `participation games: ${totals.participationGames}`),
    );
    for (const error of errors) box.append(el("div", "wizard-error", error));
    const submit = el("button", "cta", "create experiment");
    submit.disabled = errors.length > 0;
    submit.onclick = async () => {
      try {
        const id = await api.createExperiment(manifestXml(draft));
        state.wizard = null;
        drawWizard();
        await refreshExperiments();
        await selectExperiment(id);
      } catch (error) {
        box.append(el("div", "wizard-error", String((error as Error).message)));
      }
    };
    box.append(submit);
  }
  const cancel = el("button", "", "cancel");
  cancel.onclick = () => {
    state.wizard = null;
    drawWizard();
  };
  box.append(cancel);
  host.append(box);
}

function labelled(label: string, id: string, value: string): HTMLElement {
  const wrap = el("label", "field", label + " ");
  const input = el("input");
  input.id = id;
  input.value = value;
  wrap.append(input);
  return wrap;
}

function inputValue(id: string): string {
  return (document.getElementById(id) as HTMLInputElement).value;
}

// ---- boot ---------------------------------------------------------------------

export function boot(): void {
  document.getElementById("new-experiment")!.addEventListener("click", openWizard);
  filterInput.addEventListener("input", () => {
    state.filter = filterInput.value;
    for (const line of logPane.children) {
      line.classList.toggle(
        "hidden",
        Boolean(state.filter) && !line.textContent!.includes(state.filter),
      );
    }
  });
  void refreshExperiments()
    .then(() => subscribeLoop())
    .catch(() => setConnected(false));
}

boot();
