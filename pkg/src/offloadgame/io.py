"""Serialization: scenarios and results as JSON, results as CSV and SVG."""
from __future__ import annotations

import csv
import io as _io
import json
from dataclasses import asdict, fields
from pathlib import Path
from typing import Any

from .experiments import ExperimentResult
from .model import Scenario, UserProfile


def scenario_to_dict(s: Scenario) -> dict[str, Any]:
    return {"bandwidth": s.bandwidth, "users": [asdict(u) for u in s.users],
            "meta": s.meta}


def scenario_from_dict(d: dict[str, Any]) -> Scenario:
    known = {f.name for f in fields(UserProfile)}
    users = []
    for i, u in enumerate(d["users"]):
        extra = set(u) - known
        if extra:
            raise ValueError(f"user {i}: unknown keys {sorted(extra)}")
        users.append(UserProfile(**u))
    return Scenario(bandwidth=float(d["bandwidth"]), users=tuple(users),
                    meta=d.get("meta", {}))


def save_scenario(s: Scenario, path: str | Path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(s), indent=2) + "\n", encoding="utf-8")


def load_scenario(path: str | Path) -> Scenario:
    return scenario_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def save_result(r: ExperimentResult, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(r.to_dict(), indent=1) + "\n", encoding="utf-8")


def load_result(path: str | Path) -> ExperimentResult:
    return ExperimentResult.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)  # shortest round-trip representation
    return str(v)


def csv_text(columns: list[str], rows: list[dict[str, Any]]) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in columns])
    return buf.getvalue()


def read_csv(path: str | Path) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def _stem(r: ExperimentResult, suffix: str = "") -> str:
    return f"{r.experiment}{suffix}_{r.seed}"


def schema(r: ExperimentResult) -> dict[str, Any]:
    def describe(cols):
        return [{"name": c, "unit": r.units.get(c, "")} for c in cols]
    return {
        "experiment": r.experiment,
        "seed": r.seed,
        "encoding": "UTF-8, RFC 4180, header row, '.' decimal separator",
        "rows": {"file": _stem(r) + ".csv", "columns": describe(r.columns)},
        "aggregates": ({"file": _stem(r, "_aggregate") + ".csv",
                        "columns": describe(r.aggregate_columns)}
                       if r.aggregate_columns else None),
        "meta": r.meta,
    }


def emit_csv(r: ExperimentResult, out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    p = out / (_stem(r) + ".csv")
    p.write_bytes(csv_text(r.columns, r.rows).encode("utf-8"))
    paths.append(p)
    if r.aggregate_columns:
        p = out / (_stem(r, "_aggregate") + ".csv")
        p.write_bytes(csv_text(r.aggregate_columns, r.aggregates).encode("utf-8"))
        paths.append(p)
    p = out / (_stem(r) + ".schema.json")
    p.write_text(json.dumps(schema(r), indent=2) + "\n", encoding="utf-8")
    paths.append(p)
    return paths


# What to plot per experiment: x column, y columns, source table.
PLOTS = {
    "convergence": ("step", ["potential"], "rows"),
    "sweep-d": ("cycles", ["mechanism_cost_mean", "all_local_cost_mean"], "aggregates"),
    "sweep-b": ("input_bits", ["mechanism_cost_mean", "all_cloud_cost_mean"], "aggregates"),
    "scaling": ("n_users", ["mechanism_cost_mean", "optimum_cost_mean",
                            "all_local_cost_mean", "all_cloud_cost_mean"], "aggregates"),
}


def emit_svg(r: ExperimentResult, out_dir: str | Path) -> Path:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    x_col, y_cols, table = PLOTS[r.experiment]
    data = getattr(r, table)
    cols = r.columns if table == "rows" else r.aggregate_columns
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for y in y_cols:
        if y in cols and data:
            xs = [float(d[x_col]) for d in data]
            ys = [float(d[y]) for d in data]
            ax.plot(xs, ys, marker="o", ms=3, label=y.removesuffix("_mean"))
    ax.set_xlabel(x_col)
    ax.set_ylabel(r.units.get(y_cols[0].removesuffix("_mean"), ""))
    ax.set_title(r.experiment)
    if data:
        ax.legend(fontsize=7)
    fig.tight_layout()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    p = out / (_stem(r) + ".svg")
    with matplotlib.rc_context({"svg.hashsalt": "offloadgame"}):
        fig.savefig(p, format="svg", metadata={"Date": None})
    plt.close(fig)
    return p


def emit(r: ExperimentResult, out_dir: str | Path, formats=("csv",)) -> list[Path]:
    paths: list[Path] = []
    for fmt in formats:
        if fmt == "csv":
            paths += emit_csv(r, out_dir)
        elif fmt == "svg":
            paths.append(emit_svg(r, out_dir))
        else:
            raise ValueError(f"unknown format {fmt!r}")
    return paths
