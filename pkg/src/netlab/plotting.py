"""Figure rendering for experiment CSV output.

Every experiment writes its delimited results first; these helpers render a
matching PNG next to the CSV.  Rendering is best-effort: a CSV with only
error rows produces no figure.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _load_rows(csv_path: Path) -> list[dict]:
    with Path(csv_path).open() as fh:
        return [row for row in csv.DictReader(fh) if not row.get("error")]


def _mean_by_param(rows: list[dict], field: str) -> tuple[list[float], list[float]]:
    acc: dict[float, list[float]] = {}
    for row in rows:
        if row.get(field) in (None, ""):
            continue
        acc.setdefault(float(row["param"]), []).append(float(row[field]))
    xs = sorted(acc)
    return xs, [sum(acc[x]) / len(acc[x]) for x in xs]


def render_ratio_curves(csv_path: Path, out_png: Path, xlabel: str, title: str) -> Path | None:
    rows = _load_rows(csv_path)
    if not rows:
        return None
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for field, label, marker in (("tau", "e-ratio", "o"), ("sigma", "m-ratio", "s"),
                                 ("theta", "c-ratio", "^")):
        xs, ys = _mean_by_param(rows, field)
        if xs:
            ax.plot(xs, ys, marker=marker, label=label)
    ax.axhline(0.3, color="gray", lw=0.8, ls="--")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("community structure ratio")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_png, dpi=150)
    plt.close(fig)
    return out_png


def render_powerlaw(csv_path: Path, out_png: Path) -> Path | None:
    # fig3 rows carry the fitted exponent; the histogram itself is drawn from
    # the degree file when present, so here we show exponent vs d
    rows = _load_rows(csv_path)
    if not rows:
        return None
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    xs, ys = _mean_by_param(rows, "powerlaw_exponent")
    if xs:
        ax.plot(xs, ys, marker="o")
    ax.set_xlabel("edges per node d")
    ax.set_ylabel("fitted degree exponent")
    ax.set_title("degree power-law exponent")
    fig.tight_layout()
    fig.savefig(out_png, dpi=150)
    plt.close(fig)
    return out_png


def render_prediction_curve(csv_path: Path, out_png: Path) -> Path | None:
    rows = _load_rows(csv_path)
    if not rows:
        return None
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    xs, ys = _mean_by_param(rows, "total")
    if xs:
        ax.plot(xs, ys, marker="o")
    ax.set_xlabel("popular keywords used (k)")
    ax.set_ylabel("nodes with a confirmed keyword")
    ax.set_title("keyword prediction coverage")
    fig.tight_layout()
    fig.savefig(out_png, dpi=150)
    plt.close(fig)
    return out_png


def render_dataset_bars(csv_path: Path, out_png: Path) -> Path | None:
    rows = _load_rows(csv_path)
    if not rows:
        return None
    names = [row["param"] for row in rows]
    fig, ax = plt.subplots(figsize=(max(6.0, 0.6 * len(names)), 4.0))
    width = 0.27
    for i, (field, label) in enumerate((("tau", "e-ratio"), ("sigma", "m-ratio"), ("theta", "c-ratio"))):
        vals = [float(row[field]) if row.get(field) else 0.0 for row in rows]
        ax.bar([x + (i - 1) * width for x in range(len(names))], vals, width=width, label=label)
    ax.set_xticks(range(len(names)))
    ax.set_xticklabels(names, rotation=45, ha="right")
    ax.set_ylabel("ratio")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_png, dpi=150)
    plt.close(fig)
    return out_png


def render_experiment(experiment: str, csv_path: Path, out_dir: Path) -> Path | None:
    out_png = Path(out_dir) / f"{experiment}.png"
    if experiment == "fig1":
        return render_ratio_curves(csv_path, out_png, "mean degree", "ER model")
    if experiment == "fig2":
        return render_ratio_curves(csv_path, out_png, "edges per node d", "preferential attachment")
    if experiment == "fig4":
        return render_ratio_curves(csv_path, out_png, "edges per node d", "homophyly model (ground truth)")
    if experiment == "fig3":
        return render_powerlaw(csv_path, out_png)
    if experiment == "fig5":
        return render_prediction_curve(csv_path, out_png)
    if experiment in ("table1", "table3"):
        return render_dataset_bars(csv_path, out_png)
    return None
