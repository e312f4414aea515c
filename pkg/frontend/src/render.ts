/** Pure DOM builders: interval cards, history list, notices, front plots. */

import { formatLambda } from "./lambda-control.js";
import type { Notice } from "./state.js";
import type { FrontPayload, NavigateResult } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const PLOT_SIZE = 320;
const PLOT_PAD = 34;

export function renderIntervalCard(doc: Document, result: NavigateResult): HTMLElement {
  const card = doc.createElement("section");
  card.className = "interval-card";
  const head = doc.createElement("h3");
  head.textContent =
    `lambda = (${formatLambda(result.lambda)})  ·  ${result.variant}, gamma ${result.gamma}`;
  card.append(head);
  const table = doc.createElement("table");
  table.className = "intervals";
  const headerRow = doc.createElement("tr");
  for (const label of ["objective", "interval [L, U]", "gap"]) {
    const th = doc.createElement("th");
    th.textContent = label;
    headerRow.append(th);
  }
  table.append(headerRow);
  result.intervals.forEach(([lo, hi], l) => {
    const row = doc.createElement("tr");
    const name = doc.createElement("td");
    name.textContent = `f${l + 1}`;
    const interval = doc.createElement("td");
    interval.className = "interval-cell";
    interval.textContent = `[${lo.toFixed(2)}, ${hi.toFixed(2)}]`;
    const gap = doc.createElement("td");
    const badge = doc.createElement("span");
    badge.className = "gap-badge";
    badge.textContent = `${result.gap[l].toFixed(2)}%`;
    gap.append(badge);
    row.append(name, interval, gap);
    table.append(row);
  });
  card.append(table);
  const meta = doc.createElement("p");
  meta.className = "card-meta";
  const total = result.timings.shells_s.reduce((s, v) => s + v, 0) +
    result.timings.incumbent_s + (result.timings.dual_s ?? 0);
  meta.textContent =
    `reused ${result.reused_members} stored member(s) · ` +
    `shells +${result.shell_delta.lower} lower / +${result.shell_delta.upper} upper · ` +
    `${total.toFixed(2)}s`;
  card.append(meta);
  return card;
}

export function renderNotices(
  doc: Document,
  notices: Notice[],
  dismiss: (id: number) => void,
): HTMLElement {
  const box = doc.createElement("div");
  box.className = "notices";
  for (const notice of notices) {
    const item = doc.createElement("div");
    item.className = "notice";
    const text = doc.createElement("span");
    text.textContent = notice.text;
    const button = doc.createElement("button");
    button.type = "button";
    button.textContent = "dismiss";
    button.addEventListener("click", () => dismiss(notice.id));
    item.append(text, button);
    box.append(item);
  }
  return box;
}

export function renderHistoryList(
  doc: Document,
  history: NavigateResult[],
  selected: number | null,
  onSelect: (index: number) => void,
): HTMLElement {
  const list = doc.createElement("ol");
  list.className = "history";
  history.forEach((entry, i) => {
    const item = doc.createElement("li");
    if (i === selected) item.className = "selected";
    const button = doc.createElement("button");
    button.type = "button";
    button.textContent =
      `(${formatLambda(entry.lambda)}) · max gap ${Math.max(...entry.gap).toFixed(2)}%`;
    button.addEventListener("click", () => onSelect(i));
    item.append(button);
    list.append(item);
  });
  return list;
}

interface Extent {
  min: number[];
  max: number[];
}

function extentOf(points: number[][], k: number): Extent {
  const min = Array(k).fill(Infinity);
  const max = Array(k).fill(-Infinity);
  for (const p of points) {
    for (let l = 0; l < k; l++) {
      min[l] = Math.min(min[l], p[l]);
      max[l] = Math.max(max[l], p[l]);
    }
  }
  for (let l = 0; l < k; l++) {
    if (!Number.isFinite(min[l])) {
      min[l] = 0;
      max[l] = 1;
    }
    if (max[l] - min[l] < 1e-9) {
      min[l] -= 1;
      max[l] += 1;
    }
  }
  return { min, max };
}

function scale(v: number, lo: number, hi: number): number {
  return PLOT_PAD + ((v - lo) / (hi - lo)) * (PLOT_SIZE - 2 * PLOT_PAD);
}

function flip(y: number): number {
  return PLOT_SIZE - y;
}

function glyph(
  doc: Document,
  kind: "lower" | "upper" | "ystar",
  x: number,
  y: number,
  tooltip: string,
): SVGElement {
  let el: SVGElement;
  if (kind === "lower") {
    el = doc.createElementNS(SVG_NS, "rect");
    el.setAttribute("x", String(x - 4));
    el.setAttribute("y", String(y - 4));
    el.setAttribute("width", "8");
    el.setAttribute("height", "8");
  } else {
    el = doc.createElementNS(SVG_NS, "circle");
    el.setAttribute("cx", String(x));
    el.setAttribute("cy", String(y));
    el.setAttribute("r", kind === "ystar" ? "5" : "4");
  }
  el.setAttribute("class", `glyph glyph-${kind}`);
  const title = doc.createElementNS(SVG_NS, "title");
  title.textContent = tooltip;
  el.append(title);
  return el;
}

function panel(
  doc: Document,
  payload: FrontPayload,
  i: number,
  j: number,
  currentBox: [number, number][] | null,
): SVGSVGElement {
  const svg = doc.createElementNS(SVG_NS, "svg") as SVGSVGElement;
  svg.setAttribute("viewBox", `0 0 ${PLOT_SIZE} ${PLOT_SIZE}`);
  svg.setAttribute("width", String(PLOT_SIZE));
  svg.setAttribute("height", String(PLOT_SIZE));
  svg.setAttribute("class", "front-panel");
  const all = [...payload.lower, ...payload.upper, payload.y_star];
  if (currentBox) {
    all.push(currentBox.map(([lo]) => lo));
    all.push(currentBox.map(([, hi]) => hi));
  }
  const ext = extentOf(all, payload.k);
  const sx = (v: number) => scale(v, ext.min[i], ext.max[i]);
  const sy = (v: number) => flip(scale(v, ext.min[j], ext.max[j]));

  const axis = doc.createElementNS(SVG_NS, "text");
  axis.setAttribute("x", String(PLOT_SIZE / 2));
  axis.setAttribute("y", String(PLOT_SIZE - 6));
  axis.setAttribute("class", "axis-label");
  axis.textContent = `f${i + 1} vs f${j + 1}`;
  svg.append(axis);

  if (currentBox) {
    const [loX, hiX] = currentBox[i];
    const [loY, hiY] = currentBox[j];
    const box = doc.createElementNS(SVG_NS, "rect");
    box.setAttribute("class", "interval-box");
    box.setAttribute("x", String(sx(loX)));
    box.setAttribute("y", String(sy(hiY)));
    box.setAttribute("width", String(Math.max(1, sx(hiX) - sx(loX))));
    box.setAttribute("height", String(Math.max(1, sy(loY) - sy(hiY))));
    const title = doc.createElementNS(SVG_NS, "title");
    title.textContent = `current interval box f${i + 1}, f${j + 1}`;
    box.append(title);
    svg.append(box);
  }
  for (const p of payload.lower) {
    svg.append(glyph(doc, "lower", sx(p[i]), sy(p[j]),
      `lower shell · outcome (${p.map((v) => v.toFixed(2)).join(", ")})`));
  }
  for (const p of payload.upper) {
    svg.append(glyph(doc, "upper", sx(p[i]), sy(p[j]),
      `upper shell · outcome (${p.map((v) => v.toFixed(2)).join(", ")})`));
  }
  const ys = payload.y_star;
  svg.append(glyph(doc, "ystar", sx(ys[i]), sy(ys[j]),
    `y* (${ys.map((v) => v.toFixed(2)).join(", ")})`));
  return svg;
}

/** Corridor plot: one panel for k=2, pairwise projections plus a table for k=3. */
export function renderFront(
  doc: Document,
  payload: FrontPayload | null,
  currentBox: [number, number][] | null,
): HTMLElement {
  const wrap = doc.createElement("div");
  wrap.className = "front";
  if (payload === null || (payload.lower.length === 0 && payload.upper.length === 0)) {
    const empty = doc.createElement("p");
    empty.className = "front-empty";
    empty.textContent = payload === null
      ? "create a session to see the front"
      : "no navigations yet; the two-sided approximation will grow here";
    wrap.append(empty);
    if (payload === null) return wrap;
  }
  const pairs: [number, number][] =
    payload.k === 2 ? [[0, 1]] : [[0, 1], [0, 2], [1, 2]];
  const row = doc.createElement("div");
  row.className = "front-panels";
  for (const [i, j] of pairs) {
    row.append(panel(doc, payload, i, j, currentBox));
  }
  wrap.append(row);
  if (payload.k === 3) {
    wrap.append(renderPointTable(doc, payload));
  }
  return wrap;
}

function renderPointTable(doc: Document, payload: FrontPayload): HTMLElement {
  const table = doc.createElement("table");
  table.className = "front-table";
  const header = doc.createElement("tr");
  for (const label of ["set", ...Array.from({ length: payload.k }, (_, l) => `f${l + 1}`)]) {
    const th = doc.createElement("th");
    th.textContent = label;
    header.append(th);
  }
  table.append(header);
  const rows: [string, number[]][] = [
    ...payload.lower.map((p): [string, number[]] => ["lower", p]),
    ...payload.upper.map((p): [string, number[]] => ["upper", p]),
    ["y*", payload.y_star],
  ];
  for (const [tag, p] of rows) {
    const tr = doc.createElement("tr");
    const td = doc.createElement("td");
    td.textContent = tag;
    tr.append(td);
    for (const v of p) {
      const cell = doc.createElement("td");
      cell.textContent = v.toFixed(2);
      tr.append(cell);
    }
    table.append(tr);
  }
  return table;
}
