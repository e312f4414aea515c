/** Weight-vector entry: coupled sliders plus a numeric fallback.
 *
 * Every emitted vector has strictly positive components summing to 1.
 * For k=2 one slider drives both components; for k=3 two sliders drive
 * the first two components and the third is derived.
 */

export const MIN_COMPONENT = 1e-6;

function clamp(x: number, lo: number, hi: number): number {
  return Math.min(hi, Math.max(lo, x));
}

/** Move component `index` toward `value`, keeping the vector on the simplex. */
export function coupleLambda(current: number[], index: number, value: number): number[] {
  const k = current.length;
  if (k === 2) {
    const a = clamp(value, MIN_COMPONENT, 1 - MIN_COMPONENT);
    return index === 0 ? [a, 1 - a] : [1 - a, a];
  }
  // sliders drive components 0..k-2; the last component absorbs the change
  const next = current.slice();
  const othersFixed = current.reduce((s, v, i) => (i === index || i === k - 1 ? s : s + v), 0);
  const max = 1 - othersFixed - MIN_COMPONENT;
  next[index] = clamp(value, MIN_COMPONENT, max);
  next[k - 1] = 1 - othersFixed - next[index];
  return next;
}

/** Parse "a,b[,c]" into a valid weight vector, normalizing the sum. */
export function parseLambdaText(text: string, k: number): number[] {
  const parts = text.split(",").map((s) => Number(s.trim()));
  if (parts.length !== k || parts.some((v) => !Number.isFinite(v))) {
    throw new Error(`need ${k} comma-separated numbers`);
  }
  if (parts.some((v) => v <= 0)) {
    throw new Error("all components must be positive");
  }
  const total = parts.reduce((s, v) => s + v, 0);
  return parts.map((v) => v / total);
}

export function isValidLambda(lambda: number[]): boolean {
  return (
    lambda.length >= 2 &&
    lambda.every((v) => v > 0) &&
    Math.abs(lambda.reduce((s, v) => s + v, 0) - 1) <= 1e-9
  );
}

export function formatLambda(lambda: number[], digits = 3): string {
  return lambda.map((v) => v.toFixed(digits)).join(", ");
}

export interface LambdaControl {
  root: HTMLElement;
  value(): number[];
  set(lambda: number[]): void;
  onChange(listener: (lambda: number[]) => void): void;
}

/** Build the slider block for a k-objective session. */
export function createLambdaControl(doc: Document, k: number): LambdaControl {
  let lambda = Array(k).fill(1 / k) as number[];
  const listeners: ((lambda: number[]) => void)[] = [];
  const root = doc.createElement("div");
  root.className = "lambda-control";

  const sliders: HTMLInputElement[] = [];
  const labels: HTMLElement[] = [];
  const sliderCount = k === 2 ? 1 : k - 1;
  for (let i = 0; i < sliderCount; i++) {
    const row = doc.createElement("label");
    row.className = "lambda-row";
    const name = doc.createElement("span");
    name.textContent = `lambda_${i + 1}`;
    const slider = doc.createElement("input");
    slider.type = "range";
    slider.min = "0.001";
    slider.max = "0.999";
    slider.step = "0.001";
    slider.value = String(lambda[i]);
    slider.dataset.index = String(i);
    const label = doc.createElement("span");
    label.className = "lambda-value";
    row.append(name, slider, label);
    root.append(row);
    sliders.push(slider);
    labels.push(label);
    slider.addEventListener("input", () => {
      update(coupleLambda(lambda, i, Number(slider.value)));
    });
  }
  const derived = doc.createElement("div");
  derived.className = "lambda-derived";
  root.append(derived);

  const fallback = doc.createElement("form");
  fallback.className = "lambda-fallback";
  const text = doc.createElement("input");
  text.type = "text";
  text.placeholder = Array(k).fill("0.###").join(",");
  const apply = doc.createElement("button");
  apply.type = "submit";
  apply.textContent = "set";
  const error = doc.createElement("span");
  error.className = "lambda-error";
  fallback.append(text, apply, error);
  root.append(fallback);
  fallback.addEventListener("submit", (ev) => {
    ev.preventDefault();
    try {
      update(parseLambdaText(text.value, k));
      error.textContent = "";
    } catch (e) {
      error.textContent = (e as Error).message;
    }
  });

  function update(next: number[]): void {
    lambda = next;
    sliders.forEach((slider, i) => {
      slider.value = String(lambda[i]);
      labels[i].textContent = lambda[i].toFixed(3);
    });
    derived.textContent = `lambda = (${formatLambda(lambda)})`;
    listeners.forEach((fn) => fn(lambda.slice()));
  }
  update(lambda);

  return {
    root,
    value: () => lambda.slice(),
    set: (next) => {
      if (!isValidLambda(next) || next.length !== k) {
        throw new Error(`invalid lambda for k=${k}`);
      }
      update(next.slice());
    },
    onChange: (fn) => listeners.push(fn),
  };
}
