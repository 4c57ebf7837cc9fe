"""CSV ingestion and emission, run configuration and report formatting."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .ecdf import INTERP, MODES, DegenerateCDF, StepCDF
from .model import GroupData, ObservationTable, TimeBounds

OBS_COLUMNS = ("group_id", "response", "time", "baseline_time")


class ObservationError(ValueError):
    """Malformed input rows, collected with their line numbers."""

    def __init__(self, path, problems: Sequence[tuple[int, str]]):
        self.path = str(path)
        self.problems = list(problems)
        shown = "; ".join(f"line {ln}: {msg}" for ln, msg in self.problems[:20])
        more = "" if len(self.problems) <= 20 else f" (+{len(self.problems) - 20} more)"
        super().__init__(f"{self.path}: {shown}{more}")


def fmt(v) -> str:
    """Shortest round-trip text for numbers; other values as ``str``."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "" if v is None else str(v)


def _comment_lines(f) -> tuple[list[str], str | None]:
    """Leading ``#`` lines (metadata) and the first other line."""
    meta = []
    for line in f:
        if line.startswith("#"):
            meta.append(line[1:].strip())
            continue
        return meta, line
    return meta, None


def _parse_meta(lines: Iterable[str]) -> dict:
    out = {}
    for line in lines:
        for tok in line.split():
            if "=" in tok:
                k, v = tok.split("=", 1)
                out[k] = v
    return out


# --------------------------------------------------------------------------
# observations


@dataclass(frozen=True)
class Schema:
    """Column names of an observation file."""

    group: str = "group_id"
    response: str = "response"
    time: str = "time"
    baseline: str | None = "baseline_time"


def _number(text: str, what: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ValueError(f"{what} {text!r} is not a number") from None
    if not math.isfinite(v) or v <= 0:
        raise ValueError(f"{what} must be positive and finite, got {text!r}")
    return v


def read_observations(path, schema: Schema = Schema(), default_group: str | None = None) -> ObservationTable:
    """Parse an observation CSV with a header row.

    Leading ``#`` lines are skipped. Every bad row is reported with its line
    number. A missing group column is allowed only with ``default_group``;
    an empty baseline cell means no baseline.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as f:
        meta, first = _comment_lines(f)
        if first is None:
            raise ObservationError(path, [(len(meta) + 1, "missing header row")])
        reader = csv.reader([first])
        header = [h.strip() for h in next(reader)]
        col = {h: k for k, h in enumerate(header)}
        need = [schema.response, schema.time] + ([schema.group] if default_group is None else [])
        missing = [c for c in need if c not in col]
        if missing:
            raise ObservationError(path, [(len(meta) + 1, f"missing columns {missing}; header is {header}")])
        gi = col.get(schema.group)
        bi = col.get(schema.baseline) if schema.baseline else None
        groups, resp, times, base, problems = [], [], [], [], []
        for k, row in enumerate(csv.reader(f)):
            line = len(meta) + 2 + k
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                problems.append((line, f"expected {len(header)} fields, got {len(row)}"))
                continue
            try:
                r = row[col[schema.response]].strip()
                if r not in ("0", "1"):
                    raise ValueError(f"unknown response code {r!r} (expected 0 or 1)")
                t = _number(row[col[schema.time]].strip(), "time")
                b = float("nan")
                if bi is not None and row[bi].strip():
                    b = _number(row[bi].strip(), "baseline_time")
            except ValueError as exc:
                problems.append((line, str(exc)))
                continue
            groups.append(row[gi].strip() if gi is not None else default_group)
            resp.append(int(r))
            times.append(t)
            base.append(b)
    if problems:
        raise ObservationError(path, problems)
    return ObservationTable(np.array(groups, dtype=object), np.array(resp, dtype=np.int8),
                            np.array(times, dtype=float), np.array(base, dtype=float))


def write_observations(path, table: ObservationTable, meta: Mapping | None = None) -> None:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as f:
        _write_meta(f, meta)
        w = csv.writer(f, lineterminator="\n")
        w.writerow(OBS_COLUMNS)
        for g, r, t, b in zip(table.group, table.response, table.time, table.baseline):
            w.writerow([g, int(r), fmt(t), "" if np.isnan(b) else fmt(b)])


def _write_meta(f, meta):
    if meta:
        f.write("# " + " ".join(f"{k}={fmt(v)}" for k, v in meta.items()) + "\n")


# --------------------------------------------------------------------------
# curves


def write_curves(path, columns: Mapping[str, Sequence[float]], meta: Mapping | None = None) -> None:
    """One curve set per file: header row, then numeric columns of equal length."""
    names = list(columns)
    arrays = [np.asarray(columns[k], dtype=float).ravel() for k in names]
    if len({a.size for a in arrays}) > 1:
        raise ValueError("curve columns must have equal length")
    with Path(path).open("w", newline="", encoding="utf-8") as f:
        _write_meta(f, meta)
        w = csv.writer(f, lineterminator="\n")
        w.writerow(names)
        for row in zip(*arrays):
            w.writerow([fmt(v) for v in row])


def read_curves(path) -> tuple[dict[str, np.ndarray], dict]:
    """Columns and ``key=value`` metadata of a curve CSV."""
    with Path(path).open(newline="", encoding="utf-8") as f:
        meta, first = _comment_lines(f)
        if first is None:
            raise ValueError(f"{path}: missing header row")
        names = next(csv.reader([first]))
        rows = [r for r in csv.reader(f) if r]
    data = np.array(rows, dtype=float).reshape(len(rows), len(names))
    return {n: data[:, k] for k, n in enumerate(names)}, _parse_meta(meta)


def write_group(path, group: GroupData, t=None) -> None:
    """Subdistribution functions ``p_i F_i`` of a group on its grid (or ``t``)."""
    t = group.grid if t is None else np.asarray(t, dtype=float)
    mode = getattr(group.F0, "mode", None) or getattr(group.F1, "mode", None) or INTERP
    meta = {"kind": "group", "p0": group.p0, "t_lo": group.bounds.t_lo, "t_hi": group.bounds.t_hi, "mode": mode}
    if group.label is not None:
        meta["label"] = group.label
    if group.n is not None:
        meta["n"] = group.n
    write_curves(path, {"t": t, "sub0": group.sub(0, t), "sub1": group.sub(1, t)}, meta)


def read_group(path) -> GroupData:
    cols, meta = read_curves(path)
    t, s0, s1 = cols["t"], cols["sub0"], cols["sub1"]
    p0 = float(meta["p0"])
    bounds = TimeBounds(float(meta["t_lo"]), float(meta["t_hi"]))
    mode = meta.get("mode", INTERP)
    if mode not in MODES:
        raise ValueError(f"{path}: unknown mode {mode!r}")

    def branch(sub, p):
        if p <= 0:
            return DegenerateCDF(bounds.t_lo, bounds.t_hi)
        cum = np.clip(sub / p, 0.0, 1.0)
        return StepCDF(t, np.maximum.accumulate(cum), mode, bounds.t_lo, bounds.t_hi)

    n = int(meta["n"]) if "n" in meta else None
    return GroupData(p0, 1.0 - p0, branch(s0, p0), branch(s1, 1.0 - p0), bounds, meta.get("label"), n)


# --------------------------------------------------------------------------
# reports


def format_records(records: Iterable[tuple[str, object]], prefix: str = "") -> list[str]:
    return [f"{prefix}{k}={fmt(v)}" for k, v in records]


# --------------------------------------------------------------------------
# run configuration


@dataclass(frozen=True)
class RunConfig:
    """Settings shared by the command-line tools; JSON files use the same keys."""

    input: tuple = ()
    group_col: str = "group_id"
    response_col: str = "response"
    time_col: str = "time"
    baseline_col: str | None = "baseline_time"
    cstar: str = "hyperbolic"
    t_lo: float | None = None
    t_hi: float | None = None
    m: str | None = None
    psi: tuple = ()
    mode: str = INTERP
    b: int = 1000
    seed: int | None = None
    workers: int = 1
    out: str | None = None
    alpha: float | None = None
    incomes: tuple | None = None
    strict_tol: float = 0.0
    cross_tol: float = 1e-12
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.cstar not in ("hyperbolic", "linear", "boundary"):
            raise ValueError("cstar must be hyperbolic, linear or boundary")
        if self.b < 1:
            raise ValueError("b must be positive")

    @property
    def schema(self) -> Schema:
        return Schema(self.group_col, self.response_col, self.time_col, self.baseline_col)

    def require_seed(self, command: str) -> int:
        if self.seed is None:
            raise ValueError(f"{command} is stochastic: pass --seed")
        return int(self.seed)

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValueError(f"{path}: unknown configuration keys {unknown}")
        for k in ("input", "psi", "incomes"):
            if k in data and data[k] is not None:
                v = data[k]
                data[k] = tuple(v) if isinstance(v, list) else (v,)
        return cls(**data)

    def merged(self, **overrides) -> "RunConfig":
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def check_columns(self, path) -> None:
        """Raise when a referenced column is absent from the file header."""
        with Path(path).open(newline="", encoding="utf-8") as f:
            _, first = _comment_lines(f)
        header = next(csv.reader([first])) if first else []
        need = [self.response_col, self.time_col, self.group_col]
        missing = [c for c in need if c not in header]
        if missing:
            raise ValueError(f"{path}: columns {missing} not found; header is {header}")
