"""Experiment sweeps, delimited tables and figure rendering.

The experiment runner sweeps (instance, lambda, gamma, variant) cells and
emits per-instance-and-variant tables mirroring the usual reporting
layout: upper-bound components, gap components, upper-shell sizes, and
shell-derivation times with the dual-search share in parentheses for
chute2, plus a sweep-wide averages table.  Wall-clock columns live in
separate ``*_times.csv`` files so the value tables replay byte-identically
under fixed seeds; JSON output carries full precision.  The report path
also renders matplotlib figures next to the delimited files.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .engine import CHUTE2, ChuteConfig, ChuteResult, chute
from .errors import ChuteError, ConsistencyError, ParameterError
from .instances import MomipInstance, WeightVector, parse_instance, sample_weight_vectors
from .scalarize import DEFAULT_EPSILON, DEFAULT_RHO, ReferencePoint, estimate_reference_point
from .shells import merge_lower, merge_upper, shell_from_dict

ENV_THREADS = "CHUTE_THREADS"


def worker_count() -> int:
    raw = os.environ.get(ENV_THREADS, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def atomic_write_text(path: Path, text: str) -> None:
    """No partial files: write to a sibling temp file, then rename."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


@dataclass(frozen=True)
class ExperimentConfig:
    instance_paths: tuple[str, ...]
    lambdas: tuple[tuple[float, ...], ...] | None = None
    lambda_count: int | None = None
    seed: int = 0
    gammas: tuple[float, ...] = (10.0,)
    variants: tuple[str, ...] = ("chute1",)
    tl: float = 5.0
    ts: float = 2.0
    n_stall: int = 20
    rho: float = DEFAULT_RHO
    epsilon: float = DEFAULT_EPSILON
    out_dir: str = "."
    fmt: str = "csv"

    def __post_init__(self):
        if not self.instance_paths:
            raise ParameterError("experiment needs at least one instance path")
        if self.lambdas is None and self.lambda_count is None:
            raise ParameterError("experiment needs --lambda or --lambda-count")
        if self.fmt not in ("csv", "json"):
            raise ParameterError(f"format must be csv or json, got {self.fmt!r}")
        if not self.gammas or not self.variants:
            raise ParameterError("experiment needs at least one gamma and one variant")


@dataclass(frozen=True)
class ExperimentCell:
    instance_name: str
    lambda_no: int  # 1-based, mirrors table row numbering
    lam: WeightVector
    gamma: float
    variant: str
    result: ChuteResult | None
    error: str | None


@dataclass
class ExperimentResults:
    config: ExperimentConfig
    y_stars: dict[str, ReferencePoint] = field(default_factory=dict)
    cells: list[ExperimentCell] = field(default_factory=list)


def run_experiment(config: ExperimentConfig) -> ExperimentResults:
    """Sweep all cells; per-cell failures are recorded and the run continues."""
    results = ExperimentResults(config)
    loaded: list[tuple[str, MomipInstance, list[WeightVector]]] = []
    for path in config.instance_paths:
        inst = parse_instance(Path(path).read_text())
        if config.lambdas is not None:
            lams = [WeightVector(tuple(v)) for v in config.lambdas]
            for lam in lams:
                if lam.k != inst.k:
                    raise ParameterError(
                        f"lambda {lam.weights} has k={lam.k}, instance {inst.name} has k={inst.k}")
        else:
            lams = sample_weight_vectors(inst.k, config.lambda_count, config.seed)
        results.y_stars[inst.name] = estimate_reference_point(
            inst, per_objective_deadline=config.ts, epsilon=config.epsilon)
        loaded.append((inst.name, inst, lams))

    tasks = []
    for name, inst, lams in loaded:
        for no, lam in enumerate(lams, start=1):
            for gamma in config.gammas:
                for variant in config.variants:
                    tasks.append((name, inst, no, lam, gamma, variant))

    def run_cell(task):
        name, inst, no, lam, gamma, variant = task
        cfg = ChuteConfig(variant=variant, tl=config.tl, gamma=gamma, rho=config.rho,
                          n_stall=config.n_stall, ts=config.ts)
        try:
            res = chute(inst, lam, results.y_stars[name], cfg)
            return ExperimentCell(name, no, lam, gamma, variant, res, None)
        except ChuteError as e:
            return ExperimentCell(name, no, lam, gamma, variant, None, str(e))

    workers = worker_count()
    if workers == 1:
        cells = [run_cell(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(run_cell, tasks))
    results.cells = cells
    return results


def _fmt2(x: float) -> str:
    return f"{x:.2f}"


def _time_cell(result: ChuteResult) -> str:
    total = sum(result.timings.shells_s)
    if result.variant == CHUTE2 and result.timings.dual_s is not None:
        total += result.timings.dual_s
        return f"{total:.2f} ({result.timings.dual_s:.2f})"
    return f"{total:.2f}"


def results_table(results: ExperimentResults, instance: str, variant: str) -> str:
    """Deterministic value table: lambda, L, U, gap components and |S_U| per cell.

    mark_l renders the usual bold/underline convention as +/- markers: "+"
    when gap_l improved against the next-smaller gamma for the same lambda,
    "-" when it deteriorated (compared at the displayed 2 decimals).
    """
    cells = [c for c in results.cells
             if c.instance_name == instance and c.variant == variant]
    if not cells:
        return ""
    k = cells[0].lam.k
    header = (["no", "gamma"]
              + [f"lambda_{l + 1}" for l in range(k)]
              + [f"L_{l + 1}" for l in range(k)]
              + [f"U_{l + 1}" for l in range(k)]
              + [f"gap_{l + 1}" for l in range(k)]
              + [f"mark_{l + 1}" for l in range(k)]
              + ["s_u"])
    lines = [",".join(header)]
    prev_gap: dict[int, tuple[float, ...]] = {}
    for c in sorted(cells, key=lambda c: (c.lambda_no, c.gamma)):
        if c.result is None:
            row = [str(c.lambda_no), repr(float(c.gamma))] + [repr(w) for w in c.lam.weights]
            row += ["error"] * (4 * k) + [f"error: {c.error}"]
            prev_gap.pop(c.lambda_no, None)
        else:
            r = c.result
            gap = tuple(round(g, 2) for g in r.representation.gap)
            marks = []
            before = prev_gap.get(c.lambda_no)
            for l in range(k):
                if before is None or gap[l] == before[l]:
                    marks.append("")
                else:
                    marks.append("+" if gap[l] < before[l] else "-")
            prev_gap[c.lambda_no] = gap
            row = ([str(c.lambda_no), repr(float(c.gamma))]
                   + [repr(w) for w in c.lam.weights]
                   + [_fmt2(v) for v in r.lower.values]
                   + [_fmt2(v) for v in r.upper.values]
                   + [_fmt2(v) for v in r.representation.gap]
                   + marks
                   + [str(len(r.s_u))])
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def times_table(results: ExperimentResults, instance: str, variant: str) -> str:
    """Wall-clock table: Time S_U per cell, dual time parenthesized for chute2."""
    cells = [c for c in results.cells
             if c.instance_name == instance and c.variant == variant]
    if not cells:
        return ""
    lines = ["no,gamma,time_su_s"]
    for c in sorted(cells, key=lambda c: (c.lambda_no, c.gamma)):
        cell = "error" if c.result is None else _time_cell(c.result)
        lines.append(f"{c.lambda_no},{float(c.gamma)!r},{cell}")
    return "\n".join(lines) + "\n"


def averages_table(results: ExperimentResults) -> str:
    """Average shell-derivation times per (instance, variant, gamma)."""
    lines = ["instance,variant,gamma,avg_time_su_s"]
    keys = sorted({(c.instance_name, c.variant, c.gamma) for c in results.cells},
                  key=lambda t: (t[0], t[1], t[2]))
    for name, variant, gamma in keys:
        group = [c.result for c in results.cells
                 if (c.instance_name, c.variant, c.gamma) == (name, variant, gamma)
                 and c.result is not None]
        if not group:
            lines.append(f"{name},{variant},{float(gamma)!r},error")
            continue
        shell_avg = sum(sum(r.timings.shells_s) for r in group) / len(group)
        if variant == CHUTE2:
            dual_avg = sum(r.timings.dual_s or 0.0 for r in group) / len(group)
            lines.append(f"{name},{variant},{float(gamma)!r},"
                         f"{shell_avg + dual_avg:.2f} ({dual_avg:.2f})")
        else:
            lines.append(f"{name},{variant},{float(gamma)!r},{shell_avg:.2f}")
    return "\n".join(lines) + "\n"


def results_json(results: ExperimentResults) -> str:
    doc = {
        "config": {
            "instances": list(results.config.instance_paths),
            "gammas": list(results.config.gammas),
            "variants": list(results.config.variants),
            "tl": results.config.tl,
            "ts": results.config.ts,
            "n_stall": results.config.n_stall,
            "rho": results.config.rho,
            "epsilon": results.config.epsilon,
            "seed": results.config.seed,
        },
        "y_stars": {name: {"values": list(ref.values), "provenance": list(ref.provenance)}
                    for name, ref in sorted(results.y_stars.items())},
        "cells": [
            {
                "instance": c.instance_name,
                "no": c.lambda_no,
                "lambda": list(c.lam.weights),
                "gamma": c.gamma,
                "variant": c.variant,
                "result": c.result.to_dict() if c.result is not None else None,
                "error": c.error,
            }
            for c in sorted(results.cells,
                            key=lambda c: (c.instance_name, c.lambda_no, c.gamma, c.variant))
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def strip_wallclock(doc: dict) -> dict:
    """Project out wall-clock fields; what remains replays byte-identically."""
    def scrub(node):
        if isinstance(node, dict):
            return {k: scrub(v) for k, v in node.items()
                    if k not in ("timings", "elapsed")}
        if isinstance(node, list):
            return [scrub(v) for v in node]
        return node
    return scrub(doc)


def write_experiment(results: ExperimentResults, out_dir: str) -> list[Path]:
    """Write tables, JSON and figures; returns the paths written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    atomic_write_text(out / "results.json", results_json(results))
    written.append(out / "results.json")
    if results.config.fmt == "csv":
        pairs = sorted({(c.instance_name, c.variant) for c in results.cells})
        for name, variant in pairs:
            base = f"{name}_{variant}"
            atomic_write_text(out / f"{base}_results.csv",
                              results_table(results, name, variant))
            atomic_write_text(out / f"{base}_times.csv",
                              times_table(results, name, variant))
            written += [out / f"{base}_results.csv", out / f"{base}_times.csv"]
            fig_path = out / f"{base}_gaps.png"
            render_gap_figure(results, name, variant, fig_path)
            written.append(fig_path)
        atomic_write_text(out / "averages.csv", averages_table(results))
        written.append(out / "averages.csv")
    return written


def render_gap_figure(results: ExperimentResults, instance: str, variant: str,
                      path: Path) -> None:
    """Gap components against gamma, one panel per objective."""
    cells = [c for c in results.cells
             if c.instance_name == instance and c.variant == variant and c.result]
    if not cells:
        return
    k = cells[0].lam.k
    fig, axes = plt.subplots(1, k, figsize=(4 * k, 3.2), squeeze=False)
    nos = sorted({c.lambda_no for c in cells})
    for l in range(k):
        ax = axes[0][l]
        for no in nos:
            pts = sorted((c.gamma, c.result.representation.gap[l])
                         for c in cells if c.lambda_no == no)
            ax.plot([g for g, _ in pts], [v for _, v in pts],
                    marker="o", label=f"lambda {no}")
        ax.set_xlabel("gamma")
        ax.set_ylabel(f"gap_{l + 1} (%)")
        ax.grid(True, alpha=0.3)
    axes[0][0].legend(fontsize=8)
    fig.suptitle(f"{instance} / {variant}")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


@dataclass(frozen=True)
class FrontPoints:
    """Merged two-sided approximation of the Pareto front."""

    instance: str
    k: int
    lower: tuple[tuple[float, ...], ...]
    upper: tuple[tuple[float, ...], ...]
    y_star: tuple[float, ...]


def merge_result_docs(docs: list[dict]) -> FrontPoints:
    """Merge per-lambda result documents into one two-sided approximation."""
    if not docs:
        raise ParameterError("need at least one result document")
    names = {d.get("instance") for d in docs}
    if len(names) != 1:
        raise ConsistencyError(f"results come from different instances: {sorted(names)}")
    y0 = docs[0]["y_star"]["values"]
    for d in docs[1:]:
        if any(abs(a - b) > 1e-9 for a, b in zip(d["y_star"]["values"], y0)):
            raise ConsistencyError("results disagree on the reference point")
    lows = [shell_from_dict(d["s_l_shell"]) for d in docs]
    ups = [shell_from_dict(d["s_u_shell"]) for d in docs]
    merged_low = merge_lower(lows)
    merged_up = merge_upper(ups)
    k = len(y0)
    return FrontPoints(
        instance=names.pop(),
        k=k,
        lower=tuple(m.outcome.values for m in merged_low.members),
        upper=tuple(m.outcome.values for m in merged_up.members),
        y_star=tuple(float(v) for v in y0),
    )


def front_csv(points: FrontPoints) -> str:
    header = "set," + ",".join(f"f{l + 1}" for l in range(points.k))
    lines = [header]
    for tag, rows in (("lower", points.lower), ("upper", points.upper),
                      ("ystar", (points.y_star,))):
        for row in rows:
            lines.append(tag + "," + ",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def parse_front_csv(text: str) -> FrontPoints:
    lines = [ln for ln in text.strip().splitlines() if ln]
    k = len(lines[0].split(",")) - 1
    lower, upper, ystar = [], [], None
    for ln in lines[1:]:
        cells = ln.split(",")
        vec = tuple(float(v) for v in cells[1:])
        if cells[0] == "lower":
            lower.append(vec)
        elif cells[0] == "upper":
            upper.append(vec)
        else:
            ystar = vec
    return FrontPoints("", k, tuple(lower), tuple(upper), ystar)


def render_front_figure(points: FrontPoints, path: Path) -> None:
    """Corridor plot: k=2 scatter, k=3 pairwise projections."""
    pairs = [(0, 1)] if points.k == 2 else [(0, 1), (0, 2), (1, 2)]
    fig, axes = plt.subplots(1, len(pairs), figsize=(4.5 * len(pairs), 4), squeeze=False)
    for ax, (i, j) in zip(axes[0], pairs):
        if points.lower:
            ax.scatter([p[i] for p in points.lower], [p[j] for p in points.lower],
                       marker="s", facecolors="none", edgecolors="tab:blue",
                       label="lower shell")
        if points.upper:
            ax.scatter([p[i] for p in points.upper], [p[j] for p in points.upper],
                       marker="o", facecolors="none", edgecolors="tab:red",
                       label="upper shell")
        ax.scatter([points.y_star[i]], [points.y_star[j]], marker="*", s=120,
                   color="black", label="y*")
        ax.set_xlabel(f"f{i + 1}")
        ax.set_ylabel(f"f{j + 1}")
        ax.grid(True, alpha=0.3)
    axes[0][0].legend(fontsize=8)
    title = points.instance or "two-sided front approximation"
    fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
