/** View state and its pure transitions; the DOM renders from this only. */

import type { FrontPayload, NavigateResult, SessionInfo } from "./types.js";

export interface Notice {
  id: number;
  text: string;
}

export interface ViewState {
  session: SessionInfo | null;
  lambda: number[];
  history: NavigateResult[];
  selected: number | null;
  front: FrontPayload | null;
  inFlight: boolean;
  notices: Notice[];
  nextNoticeId: number;
}

export function initialState(): ViewState {
  return {
    session: null,
    lambda: [],
    history: [],
    selected: null,
    front: null,
    inFlight: false,
    notices: [],
    nextNoticeId: 1,
  };
}

export function withSession(state: ViewState, session: SessionInfo): ViewState {
  return {
    ...initialState(),
    session,
    lambda: Array(session.k).fill(1 / session.k),
    nextNoticeId: state.nextNoticeId,
  };
}

export function withLambda(state: ViewState, lambda: number[]): ViewState {
  return { ...state, lambda: lambda.slice() };
}

export function beginNavigation(state: ViewState): ViewState {
  return { ...state, inFlight: true };
}

export function completeNavigation(
  state: ViewState,
  result: NavigateResult,
  front: FrontPayload,
): ViewState {
  const history = [...state.history, result];
  return {
    ...state,
    inFlight: false,
    history,
    selected: history.length - 1,
    front,
  };
}

export function failNavigation(state: ViewState, text: string): ViewState {
  // no history entry on failure, just a dismissible notice
  return {
    ...state,
    inFlight: false,
    notices: [...state.notices, { id: state.nextNoticeId, text }],
    nextNoticeId: state.nextNoticeId + 1,
  };
}

export function dismissNotice(state: ViewState, id: number): ViewState {
  return { ...state, notices: state.notices.filter((n) => n.id !== id) };
}

export function selectRun(state: ViewState, index: number): ViewState {
  if (index < 0 || index >= state.history.length) return state;
  return { ...state, selected: index };
}
