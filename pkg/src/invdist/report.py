"""Markdown and PNG renderings of suite reports."""

from __future__ import annotations

import json
import os

from .suites import Report

STATUS_COLORS = {"pass": "#3a7d44", "fail": "#c0392b", "skipped": "#999999"}


def render_markdown(report: Report) -> str:
    s = report.summary
    lines = [
        f"# Suite `{report.suite}`",
        "",
        f"{s['pass']} passed, {s['fail']} failed, {s['skipped']} skipped; {s['cases']} cases examined.",
        "",
        "| check | status | cases | ms |",
        "|---|---|---:|---:|",
    ]
    for r in report.results:
        lines.append(f"| `{r.check_id}` | {r.status} | {r.cases} | {r.runtime_ms:.1f} |")
    failures = [r for r in report.results if r.status == "fail"]
    if failures:
        lines += ["", "## Witnesses", ""]
        for r in failures:
            lines += [f"### `{r.check_id}`", "", "```json", json.dumps(r.witness, indent=2, sort_keys=True),
                      "```", ""]
    cfg = {k: v for k, v in report.config.items() if v is not None}
    lines += ["", "## Configuration", "", "```json", json.dumps(cfg, indent=2, sort_keys=True), "```", ""]
    return "\n".join(lines)


def render_figures(report: Report, out_dir: str) -> list[str]:
    """Status and runtime charts, one bar per check."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    os.makedirs(out_dir, exist_ok=True)
    results = report.results
    paths = []
    if not results:
        return paths
    ids = [r.check_id for r in results]
    height = max(2.5, 0.28 * len(ids) + 1)
    colors = [STATUS_COLORS[r.status] for r in results]

    fig, ax = plt.subplots(figsize=(9, height))
    ax.barh(range(len(ids)), [max(r.cases, 1) for r in results], color=colors)
    ax.set_yticks(range(len(ids)), ids, fontsize=7)
    ax.invert_yaxis()
    ax.set_xscale("log")
    ax.set_xlabel("cases examined")
    ax.set_title(f"{report.suite}: status by check")
    handles = [plt.Rectangle((0, 0), 1, 1, color=c) for c in STATUS_COLORS.values()]
    ax.legend(handles, list(STATUS_COLORS), loc="lower right", fontsize=7)
    fig.tight_layout()
    path = os.path.join(out_dir, "status.png")
    fig.savefig(path, dpi=110)
    plt.close(fig)
    paths.append(path)

    fig, ax = plt.subplots(figsize=(9, height))
    ax.barh(range(len(ids)), [max(r.runtime_ms, 1e-3) for r in results], color=colors)
    ax.set_yticks(range(len(ids)), ids, fontsize=7)
    ax.invert_yaxis()
    ax.set_xscale("log")
    ax.set_xlabel("runtime (ms)")
    ax.set_title(f"{report.suite}: runtime by check")
    fig.tight_layout()
    path = os.path.join(out_dir, "runtime.png")
    fig.savefig(path, dpi=110)
    plt.close(fig)
    paths.append(path)
    return paths


def write_report(report: Report, out_dir: str) -> dict[str, str]:
    """report.json, report.md and the figures in out_dir."""
    os.makedirs(out_dir, exist_ok=True)
    jpath = os.path.join(out_dir, "report.json")
    with open(jpath, "w") as fh:
        json.dump(report.to_json(), fh, sort_keys=True, indent=2)
        fh.write("\n")
    figs = render_figures(report, out_dir)
    md = render_markdown(report)
    if figs:
        md += "\n" + "\n".join(f"![{os.path.splitext(os.path.basename(p))[0]}]({os.path.basename(p)})"
                               for p in figs) + "\n"
    mpath = os.path.join(out_dir, "report.md")
    with open(mpath, "w") as fh:
        fh.write(md)
    out = {"json": jpath, "markdown": mpath}
    out.update({os.path.splitext(os.path.basename(p))[0]: p for p in figs})
    return out
