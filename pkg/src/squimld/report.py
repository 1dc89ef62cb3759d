"""Output emission: fixed-schema CSV files, run manifests, and plot scripts.

Every float is serialized with 17 significant digits so a value survives a
round trip through text exactly; byte-identical CSVs are the determinism
contract for repeated runs.  The manifest is a flat JSON object with string
keys and string values recording what produced the outputs; it carries
timestamps, so only the CSVs are expected to be byte-stable.

Plot scripts are standalone gnuplot text files that read the CSV next to
them, so figures stay reproducible without adding a rendering dependency.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

FLOAT_FMT = "%.17g"

CODE_VERSION = "0.1.0"


def fmt_value(value) -> str:
    """One CSV cell.  Booleans become 1/0, floats get 17 digits."""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return FLOAT_FMT % value
    return str(value)


def write_csv(path: str | Path, header: list[str], rows: list[tuple]) -> None:
    lines = [",".join(header)]
    for row in rows:
        if len(row) != len(header):
            raise ValueError(
                f"row width {len(row)} != header width {len(header)} in {path}"
            )
        lines.append(",".join(fmt_value(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", newline="\n")


def utc_now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True)
class RunManifest:
    """What ran, with what knobs, and what it wrote."""

    command: str
    parameters: dict
    seed: int
    workers: int
    started: str
    finished: str
    output_files: list = field(default_factory=list)
    code_version: str = CODE_VERSION

    def to_flat(self) -> dict:
        """Flat string-keyed, string-valued JSON object."""
        flat = {
            "command": self.command,
            "seed": str(self.seed),
            "workers": str(self.workers),
            "started": self.started,
            "finished": self.finished,
            "code_version": self.code_version,
        }
        for key, value in sorted(self.parameters.items()):
            flat[f"param.{key}"] = str(value)
        for i, name in enumerate(self.output_files):
            flat[f"output.{i}"] = str(name)
        return flat

    def write(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_flat(), indent=2, sort_keys=False) + "\n",
            newline="\n",
        )


def domain_plot_script(csv_name: str) -> str:
    """Scatter of accepted domain points with constraint points overlaid."""
    return f"""\
# gnuplot script: domain scan scatter
set datafile separator ','
set xlabel 'theta1'
set ylabel 'theta2'
set key outside
plot '{csv_name}' skip 1 using ($3 == 1 && $4 == 0 ? $1 : 1/0):2 \\
         title 'D (domain)' with points pt 7 ps 0.2, \\
     '{csv_name}' skip 1 using ($4 == 1 ? $1 : 1/0):2 \\
         title 'G (constraint set)' with points pt 5 ps 0.6
"""


def rate_plot_script(csv_name: str) -> str:
    """Both rate curves against x; missing I2 cells plot as gaps."""
    return f"""\
# gnuplot script: rate curves
set datafile separator ','
set xlabel 'x'
set ylabel 'rate'
set key top right
plot '{csv_name}' skip 1 using 1:2 title 'I1' with linespoints pt 7, \\
     '{csv_name}' skip 1 using 1:3 title 'I2' with linespoints pt 5
"""


def write_text(path: str | Path, content: str) -> None:
    Path(path).write_text(content, newline="\n")
