"""Per-sample report CSVs: one row per evaluation sample, one column per approach.

Layout:

    # evikit v0.1.0 | command=evaluate | config=ab12cd34ef56 | std=population
    # sample 1 = doc0001:c1
    sample,best_igr,best_egt,max_value,ens_igr,ens_egt
    1,0,0.18,0.18,0.18,0.18
    ...
    mean,0.61,...
    std,0.31,...

Lines starting with '#' are metadata; rows whose first cell is not an integer
carry aggregates (mean/std). Floats are written with repr so parsed values
survive a write/read cycle exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence

from ._version import __version__
from .errors import ParseError
from .util import config_hash


@dataclass(frozen=True)
class ReportRow:
    sample: int
    values: tuple[float, ...]


@dataclass(frozen=True)
class PerSampleReport:
    """Parsed per-sample report: metric columns, sample rows, aggregate rows."""

    columns: tuple[str, ...]
    rows: tuple[ReportRow, ...]
    aggregates: dict[str, tuple[float, ...]] = field(default_factory=dict)
    comments: tuple[str, ...] = ()

    def column(self, name: str) -> list[float]:
        idx = self.columns.index(name)
        return [r.values[idx] for r in self.rows]


def metadata_line(command: str, config: Mapping[str, object]) -> str:
    return f"# evikit v{__version__} | command={command} | config={config_hash(config)} | std=population"


def _format_value(v: float) -> str:
    return repr(float(v))


def write_per_sample_report(
    path: str | Path,
    columns: Sequence[str],
    rows: Sequence[ReportRow],
    aggregates: Optional[Mapping[str, Sequence[float]]] = None,
    comments: Sequence[str] = (),
) -> None:
    lines = [f"# {c}" if not c.startswith("#") else c for c in comments]
    lines.append("sample," + ",".join(columns))
    for row in rows:
        if len(row.values) != len(columns):
            raise ValueError(f"row {row.sample}: {len(row.values)} values for {len(columns)} columns")
        lines.append(str(row.sample) + "," + ",".join(_format_value(v) for v in row.values))
    for label, values in (aggregates or {}).items():
        lines.append(label + "," + ",".join(_format_value(v) for v in values))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_per_sample_report(path: str | Path) -> PerSampleReport:
    path = Path(path)
    comments: list[str] = []
    header: Optional[list[str]] = None
    rows: list[ReportRow] = []
    aggregates: dict[str, tuple[float, ...]] = {}
    with path.open("r", encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if line.startswith("#"):
                comments.append(line.lstrip("# "))
                continue
            cells = line.split(",")
            if header is None:
                if cells[0] != "sample":
                    raise ParseError(str(path), line_no, f"expected header starting with 'sample', got {cells[0]!r}")
                header = cells[1:]
                continue
            if len(cells) != len(header) + 1:
                raise ParseError(str(path), line_no, f"expected {len(header) + 1} cells, got {len(cells)}")
            try:
                values = tuple(float(c) for c in cells[1:])
            except ValueError:
                raise ParseError(str(path), line_no, "non-numeric metric value") from None
            first = cells[0]
            if first.isdigit():
                rows.append(ReportRow(sample=int(first), values=values))
            else:
                aggregates[first] = values
    if header is None:
        raise ParseError(str(path), 1, "missing header line")
    return PerSampleReport(
        columns=tuple(header),
        rows=tuple(rows),
        aggregates=aggregates,
        comments=tuple(comments),
    )
