/** Wires the controls, the API client and the renderers together. */

import { ApiClient, ApiError } from "./api.js";
import { createLambdaControl, type LambdaControl } from "./lambda-control.js";
import {
  renderFront,
  renderHistoryList,
  renderIntervalCard,
  renderNotices,
} from "./render.js";
import {
  beginNavigation,
  completeNavigation,
  dismissNotice,
  failNavigation,
  initialState,
  selectRun,
  withLambda,
  withSession,
  type ViewState,
} from "./state.js";
import type { PollOptions } from "./api.js";

export interface App {
  state(): ViewState;
  createSession(instanceText: string): Promise<void>;
  submitNavigation(): Promise<void>;
  elements: {
    root: HTMLElement;
    submit: HTMLButtonElement;
    instance: HTMLTextAreaElement;
    create: HTMLButtonElement;
  };
}

export function mountApp(
  doc: Document,
  root: HTMLElement,
  client: ApiClient,
  poll: PollOptions = {},
): App {
  let state = initialState();
  let control: LambdaControl | null = null;

  const headline = doc.createElement("h1");
  headline.textContent = "Pareto front navigation";

  const sessionForm = doc.createElement("div");
  sessionForm.className = "session-form";
  const instance = doc.createElement("textarea");
  instance.placeholder = "paste a momkp-v1 instance document";
  instance.rows = 4;
  const create = doc.createElement("button");
  create.type = "button";
  create.textContent = "create session";
  const sessionLabel = doc.createElement("span");
  sessionLabel.className = "session-label";
  sessionForm.append(instance, create, sessionLabel);

  const controlHost = doc.createElement("div");
  const submit = doc.createElement("button");
  submit.type = "button";
  submit.textContent = "navigate";
  submit.disabled = true;
  const progress = doc.createElement("span");
  progress.className = "progress";

  const noticesHost = doc.createElement("div");
  const cardHost = doc.createElement("div");
  const frontHost = doc.createElement("div");
  const historyHost = doc.createElement("div");

  root.append(headline, sessionForm, noticesHost, controlHost,
    submit, progress, cardHost, frontHost, historyHost);

  function setState(next: ViewState): void {
    state = next;
    render();
  }

  function render(): void {
    sessionLabel.textContent = state.session
      ? `session ${state.session.session_id} · k=${state.session.k} · y*=(${state.session.y_star
          .map((v) => v.toFixed(2)).join(", ")})`
      : "no session";
    submit.disabled = state.inFlight || state.session === null;
    progress.textContent = state.inFlight ? "running…" : "";

    noticesHost.replaceChildren(
      renderNotices(doc, state.notices, (id) => setState(dismissNotice(state, id))));

    cardHost.replaceChildren();
    const selected = state.selected === null ? null : state.history[state.selected];
    if (selected) cardHost.append(renderIntervalCard(doc, selected));

    const box = selected ? selected.intervals : null;
    frontHost.replaceChildren(renderFront(doc, state.front, box));

    historyHost.replaceChildren(
      renderHistoryList(doc, state.history, state.selected,
        (i) => setState(selectRun(state, i))));
  }

  async function createSession(instanceText: string): Promise<void> {
    let parsed: unknown;
    try {
      parsed = JSON.parse(instanceText);
    } catch (e) {
      setState(failNavigation(state, `instance is not valid JSON: ${(e as Error).message}`));
      return;
    }
    try {
      const session = await client.createSession({ instance: parsed });
      setState(withSession(state, session));
      control = createLambdaControl(doc, session.k);
      control.onChange((lambda) => {
        state = withLambda(state, lambda);
      });
      state = withLambda(state, control.value());
      controlHost.replaceChildren(control.root);
      render();
    } catch (e) {
      const msg = e instanceof ApiError ? `${e.status} ${e.code}: ${e.message}` : String(e);
      setState(failNavigation(state, msg));
    }
  }

  async function submitNavigation(): Promise<void> {
    if (state.session === null || state.inFlight) return;
    setState(beginNavigation(state));
    try {
      const result = await client.navigate(state.session.session_id, state.lambda, {}, poll);
      const front = await client.getFront(state.session.session_id);
      setState(completeNavigation(state, result, front));
    } catch (e) {
      const msg = e instanceof ApiError ? `${e.status} ${e.code}: ${e.message}` : String(e);
      setState(failNavigation(state, msg));
    }
  }

  create.addEventListener("click", () => void createSession(instance.value));
  submit.addEventListener("click", () => void submitNavigation());
  render();

  return {
    state: () => state,
    createSession,
    submitNavigation,
    elements: { root, submit, instance, create },
  };
}
