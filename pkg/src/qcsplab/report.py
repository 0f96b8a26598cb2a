"""Run reports: one record per command, printed as tab-separated lines or JSON."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path


def digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()[:16]


@dataclass
class RunReport:
    command: str
    verdict: str = ""
    exit_code: int = 0
    inputs: dict = field(default_factory=dict)      # name -> sha256 prefix
    data: dict = field(default_factory=dict)
    budget: dict = field(default_factory=dict)
    seed: int | None = None
    timings: dict | None = None                     # only filled with --timings
    notes: list = field(default_factory=list)
    body: str = ""                                  # emitted file text (sentences, structures)

    def add_input(self, name: str, text: str) -> None:
        self.inputs[name] = digest(text)

    def to_json(self) -> str:
        out = {"command": self.command, "verdict": self.verdict, "exit": self.exit_code,
               "inputs": self.inputs, "data": self.data, "budget": self.budget}
        if self.seed is not None:
            out["seed"] = self.seed
        if self.timings is not None:
            out["timings"] = self.timings
        if self.notes:
            out["notes"] = self.notes
        if self.body:
            out["body"] = self.body
        return json.dumps(out, indent=1, sort_keys=True, default=_default)

    def to_text(self) -> str:
        lines = [f"command\t{self.command}", f"verdict\t{self.verdict}"]
        for k, v in sorted(self.inputs.items()):
            lines.append(f"input\t{k}\t{v}")
        for k, v in self.data.items():
            lines.append(f"{k}\t{_flat(v)}")
        for n in self.notes:
            lines.append(f"note\t{n}")
        if self.seed is not None:
            lines.append(f"seed\t{self.seed}")
        lines.append("budget\t" + ",".join(f"{k}={v}" for k, v in sorted(self.budget.items())))
        if self.timings is not None:
            for k, v in self.timings.items():
                lines.append(f"time\t{k}\t{v:.3f}")
        text = "\n".join(lines) + "\n"
        if self.body:
            text += "---\n" + self.body.rstrip("\n") + "\n"
        return text


def _default(o):
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    if isinstance(o, tuple):
        return list(o)
    if hasattr(o, "to_dict"):
        return o.to_dict()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _flat(v) -> str:
    if isinstance(v, str):
        return v
    return json.dumps(v, sort_keys=True, default=_default, separators=(",", ":"))


def plot_series(path: str | Path, xs, series: dict, xlabel: str, ylabel: str, title: str = "") -> Path:
    """Line plot of one or more series against xs, written to ``path``."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 3.5))
    for label, ys in series.items():
        ax.plot(xs, ys, marker="o", label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    if len(series) > 1:
        ax.legend(frameon=False)
    ax.spines["top"].set_visible(False)
    ax.spines["right"].set_visible(False)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)
    return path
