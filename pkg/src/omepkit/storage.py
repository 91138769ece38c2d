from __future__ import annotations

import csv
import json
import os
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from .errors import PlanError, PlanFormatError
from .field import OrthogonalArray
from .plan import Factor, Plan, _label_key

PLAN_FORMAT = "omepkit-plan"
PLAN_VERSION = 1


def _ensure_parent(path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)


def save_json(path: Path, data: Any) -> None:
    """
    Atomic save:
    - write to temp file in same directory
    - flush + fsync
    - os.replace to target
    """
    path = Path(path)
    _ensure_parent(path)

    tmp = path.with_name(path.name + ".tmp")

    payload = (
        json.dumps(
            data,
            indent=2,
            sort_keys=True,
            ensure_ascii=False,
        )
        + "\n"
    )

    with open(tmp, "w", encoding="utf-8") as f:
        f.write(payload)
        f.flush()
        os.fsync(f.fileno())

    os.replace(tmp, path)


def load_json(path: Path) -> Any:
    """Unlike a settings file a plan has no sensible default, so bad input is an error."""
    path = Path(path)
    if not path.exists():
        raise PlanFormatError(f"{path}: no such file")
    txt = path.read_text(encoding="utf-8").strip()
    if not txt:
        raise PlanFormatError(f"{path}: file is empty")
    try:
        return json.loads(txt)
    except json.JSONDecodeError as exc:
        raise PlanFormatError(f"{path}: not valid JSON ({exc.msg}, line {exc.lineno})") from None


def _write_csv(out_path: Path, fieldnames: list[str], rows: list[dict[str, Any]]) -> None:
    _ensure_parent(out_path)
    with out_path.open("w", newline="", encoding="utf-8") as f:
        w = csv.DictWriter(f, fieldnames=fieldnames, quoting=csv.QUOTE_MINIMAL)
        w.writeheader()
        if rows:
            w.writerows(rows)


# -------------------------
# Plan JSON
# -------------------------


def plan_to_dict(plan: Plan) -> dict[str, Any]:
    return {
        "format": PLAN_FORMAT,
        "version": PLAN_VERSION,
        "factors": [
            {"name": f.name, "levels": list(f.levels), "block": f.name == plan.block_factor} for f in plan.factors
        ],
        "notes": list(plan.notes),
        # run-major
        "runs": [list(run) for run in zip(*plan.table)],
    }


def plan_from_dict(data: Any, source: str = "plan") -> Plan:
    if not isinstance(data, dict):
        raise PlanFormatError(f"{source}: expected a JSON object")
    if data.get("format") != PLAN_FORMAT:
        raise PlanFormatError(f"{source}: not an {PLAN_FORMAT} file")
    if data.get("version") != PLAN_VERSION:
        raise PlanFormatError(f"{source}: unsupported version {data.get('version')!r}")

    raw_factors = data.get("factors")
    runs = data.get("runs")
    if not isinstance(raw_factors, list) or not raw_factors:
        raise PlanFormatError(f"{source}: 'factors' must be a non-empty list")
    if not isinstance(runs, list) or not runs:
        raise PlanFormatError(f"{source}: 'runs' must be a non-empty list")

    factors = []
    blocks = []
    for i, f in enumerate(raw_factors):
        if not isinstance(f, dict) or not isinstance(f.get("name"), str) or not isinstance(f.get("levels"), list):
            raise PlanFormatError(f"{source}: factor #{i + 1} needs a name and a list of levels")
        factors.append(Factor(f["name"], tuple(str(x) for x in f["levels"])))
        if f.get("block"):
            blocks.append(f["name"])
    if len(blocks) > 1:
        raise PlanFormatError(f"{source}: more than one block factor ({', '.join(blocks)})")

    for j, run in enumerate(runs):
        if not isinstance(run, list) or len(run) != len(factors):
            raise PlanFormatError(f"{source}: run {j + 1} must list one level index per factor")
        if not all(isinstance(x, int) and not isinstance(x, bool) for x in run):
            raise PlanFormatError(f"{source}: run {j + 1} has a non-integer level index")

    notes = data.get("notes") or []
    try:
        return Plan(
            tuple(factors),
            tuple(tuple(col) for col in zip(*runs)),
            blocks[0] if blocks else None,
            tuple(str(x) for x in notes),
        )
    except PlanError as exc:
        raise PlanFormatError(f"{source}: {exc}") from None


def save_plan(path: Path, plan: Plan) -> None:
    save_json(path, plan_to_dict(plan))


def load_plan(path: Path) -> Plan:
    return plan_from_dict(load_json(path), str(path))


# -------------------------
# Plan CSV
# -------------------------


def _count_cell(plan: Plan, fac: Factor) -> str:
    cell = f"#{fac.level_count}"
    if fac.name == plan.block_factor:
        cell += ":block"
    if list(fac.levels) != sorted(fac.levels, key=_label_key):
        cell += "=" + "|".join(fac.levels)
    return cell


def save_plan_csv(path: Path, plan: Plan) -> None:
    path = Path(path)
    _ensure_parent(path)
    with path.open("w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        for note in plan.notes:
            w.writerow([f"# {note}"])
        w.writerow(plan.names)
        w.writerow([_count_cell(plan, fac) for fac in plan.factors])
        for run in zip(*(plan.labels(name) for name in plan.names)):
            w.writerow(run)


def _parse_count_cell(cell: str, source: str) -> tuple[int, bool, tuple[str, ...] | None]:
    body, has_order, order = cell.strip()[1:].partition("=")
    count, _, flag = body.partition(":")
    if flag not in ("", "block") or not count.isdigit():
        raise PlanFormatError(f"{source}: bad level-count cell {cell!r} (expected '#s' or '#s:block')")
    levels = tuple(x.strip() for x in order.split("|")) if has_order else None
    if levels is not None and len(levels) != int(count):
        raise PlanFormatError(f"{source}: level-count cell {cell!r} lists {len(levels)} levels")
    return int(count), flag == "block", levels


def load_plan_csv(path: Path, block: str | None = None) -> Plan:
    path = Path(path)
    source = str(path)
    if not path.exists():
        raise PlanFormatError(f"{source}: no such file")
    with path.open(newline="", encoding="utf-8") as f:
        rows = [r for r in csv.reader(f) if any(c.strip() for c in r)]
    notes: list[str] = []
    while rows and rows[0][0].lstrip().startswith("#"):
        notes.append(",".join(rows.pop(0)).lstrip()[1:].strip())
    if not rows:
        raise PlanFormatError(f"{source}: file is empty")

    names = [c.strip() for c in rows[0]]
    body = rows[1:]
    counts: dict[str, int] = {}
    levels: dict[str, tuple[str, ...]] = {}
    flagged: list[str] = []
    if body and all(c.strip().startswith("#") for c in body[0]):
        for name, cell in zip(names, body[0]):
            count, is_block, order = _parse_count_cell(cell, source)
            counts[name] = count
            if order is not None:
                levels[name] = order
            if is_block:
                flagged.append(name)
        body = body[1:]
    if len(flagged) > 1:
        raise PlanFormatError(f"{source}: more than one block factor ({', '.join(flagged)})")
    block_factor = block if block is not None else (flagged[0] if flagged else None)
    if not body:
        raise PlanFormatError(f"{source}: no runs")
    for j, r in enumerate(body):
        if len(r) != len(names):
            raise PlanFormatError(f"{source}: run {j + 1} has {len(r)} cells, expected {len(names)}")

    columns = [[r[i].strip() for r in body] for i in range(len(names))]
    for name, col in zip(names, columns):
        if name in counts and counts[name] != len(set(col)):
            raise PlanFormatError(f"{source}: factor {name} declares {counts[name]} levels but uses {len(set(col))}")
    try:
        return Plan.from_rows(names, columns, levels=levels, block_factor=block_factor, notes=notes)
    except PlanError as exc:
        raise PlanFormatError(f"{source}: {exc}") from None


def read_plan(path: Path, block: str | None = None) -> Plan:
    """Dispatch on suffix: .csv is the table format, anything else is JSON."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        return load_plan_csv(path, block)
    plan = load_plan(path)
    if block is not None and block != plan.block_factor:
        plan.index(block)
        plan = Plan(plan.factors, plan.table, block, plan.notes)
    return plan


# -------------------------
# Orthogonal arrays
# -------------------------


def format_oa(oa: OrthogonalArray) -> str:
    k = oa.symbols
    if k is None:
        raise PlanFormatError("the OA text format needs a common symbol count")
    lines = [f"OA {oa.runs} {oa.rows} {k} {oa.strength} {oa.index}"]
    lines += [" ".join(str(x) for x in row) for row in oa.cells]
    return "\n".join(lines) + "\n"


def save_oa(path: Path, oa: OrthogonalArray) -> None:
    path = Path(path)
    _ensure_parent(path)
    path.write_text(format_oa(oa), encoding="utf-8")


def parse_oa(text: str, source: str = "OA") -> OrthogonalArray:
    lines = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise PlanFormatError(f"{source}: file is empty")
    head = lines[0]
    if len(head) != 6 or head[0] != "OA" or not all(x.isdigit() for x in head[1:]):
        raise PlanFormatError(f"{source}: header must be 'OA n m k t lambda'")
    n, m, k, t, lam = (int(x) for x in head[1:])
    rows = lines[1:]
    if len(rows) != m:
        raise PlanFormatError(f"{source}: header says {m} rows, found {len(rows)}")
    cells = []
    for i, row in enumerate(rows):
        if len(row) != n or not all(x.isdigit() for x in row):
            raise PlanFormatError(f"{source}: row {i + 1} must hold {n} symbols")
        values = tuple(int(x) for x in row)
        if any(x >= k for x in values):
            raise PlanFormatError(f"{source}: row {i + 1} uses a symbol outside 0..{k - 1}")
        cells.append(values)
    return OrthogonalArray(symbol_counts=(k,) * m, strength=t, index=lam, cells=tuple(cells))


def load_oa(path: Path) -> OrthogonalArray:
    path = Path(path)
    if not path.exists():
        raise PlanFormatError(f"{path}: no such file")
    return parse_oa(path.read_text(encoding="utf-8"), str(path))


# -------------------------
# Claim reports
# -------------------------


def save_reports_json(path: Path, records: Sequence[dict[str, Any]]) -> None:
    save_json(path, list(records))


def save_reports_csv(path: Path, fieldnames: list[str], records: Sequence[dict[str, Any]]) -> None:
    _write_csv(Path(path), fieldnames, list(records))
