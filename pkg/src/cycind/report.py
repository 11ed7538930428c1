"""Line-delimited JSON reports with a companion PNG figure."""
from __future__ import annotations

import json
from pathlib import Path


class Report:
    def __init__(self, command):
        self.command = command
        self.records = []
        self.bars = []  # (title, labels, values)

    def add(self, kind, **fields):
        self.records.append({"command": self.command, "kind": kind, **fields})

    def bar(self, title, labels, values):
        self.bars.append((title, [str(x) for x in labels], list(values)))

    def write(self, path):
        path = Path(path)
        with open(path, "w") as fh:
            for r in self.records:
                fh.write(json.dumps(r, sort_keys=True) + "\n")
        if self.bars:
            self._figure(path.with_suffix(".png"))

    def _figure(self, path):
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        n = len(self.bars)
        fig, axes = plt.subplots(n, 1, figsize=(7, 2.6 * n), squeeze=False)
        for ax, (title, labels, values) in zip(axes[:, 0], self.bars):
            ax.bar(range(len(values)), values, color="#4c72b0")
            ax.set_xticks(range(len(values)))
            ax.set_xticklabels(labels, rotation=45 if len(labels) > 6 else 0, ha="right" if len(labels) > 6 else "center",
                               fontsize=8)
            ax.set_title(title, fontsize=10)
        fig.tight_layout()
        # no timestamps or version strings, so reruns are byte-identical
        fig.savefig(path, format="png", metadata={"Software": None})
        plt.close(fig)
