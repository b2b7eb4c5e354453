"""Experiment reports: canonical JSON, CSV of metric rows, log-log SVG."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

from .experiments import _jsonable, canonical


@dataclass
class Report:
    exp_id: str
    config: dict
    config_hash: str
    rows: list
    verdicts: dict
    profiles: dict = field(default_factory=dict)
    runtime: float = 0.0

    @property
    def passed(self) -> bool:
        return bool(self.verdicts) and all(self.verdicts.values())

    def to_dict(self) -> dict:
        # runtime is left out so identical runs give identical bytes
        return _jsonable({
            "experiment": self.exp_id,
            "config": self.config,
            "config_hash": self.config_hash,
            "metrics": self.rows,
            "verdicts": self.verdicts,
            "profiles": self.profiles,
            "passed": self.passed,
        })

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        return cls(d["experiment"], d["config"], d["config_hash"], d["metrics"], d["verdicts"],
                   d.get("profiles", {}))

    def to_csv(self) -> str:
        cols = sorted({k for row in self.rows for k in row})
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        for row in self.rows:
            w.writerow({k: canonical(v) if isinstance(v, (list, dict)) else v for k, v in row.items()})
        return buf.getvalue()

    def summary(self) -> str:
        lines = [f"{self.exp_id}: {'PASS' if self.passed else 'FAIL'} (config {self.config_hash[:12]})"]
        for name, ok in self.verdicts.items():
            lines.append(f"  [{'pass' if ok else 'FAIL'}] {name}")
        return "\n".join(lines)


def plot_profiles(report: Report, path) -> Path | None:
    """Write the profile curves as a log-log SVG; ``None`` when there are none."""
    if not report.profiles:
        return None
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    for name, pts in sorted(report.profiles.items()):
        xs = [p[0] for p in pts if p[0] > 0 and p[1] > 0]
        ys = [p[1] for p in pts if p[0] > 0 and p[1] > 0]
        if xs:
            ax.loglog(xs, ys, marker=".", label=name)
    ax.set_title(report.exp_id)
    ax.legend(fontsize=6)
    ax.grid(True, which="both", alpha=0.3)
    path = Path(path)
    # fixed metadata keeps the file reproducible
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def render_report(report: Report, out_dir) -> dict[str, Path]:
    """Write ``<id>.json``, ``<id>.csv`` and (if there are profiles) ``<id>.svg``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = report.exp_id.lower()
    paths = {"json": out / f"{stem}.json", "csv": out / f"{stem}.csv"}
    paths["json"].write_text(report.to_json())
    paths["csv"].write_text(report.to_csv())
    svg = plot_profiles(report, out / f"{stem}.svg")
    if svg is not None:
        paths["svg"] = svg
    return paths
