"""
Result files: CSV (with a .meta.json sidecar), JSON and XLSX, plus the
resumable CSV writer used by sweeps.
"""

import csv
import hashlib
import io
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Set, Tuple

from openpyxl import Workbook, load_workbook
from openpyxl.utils import get_column_letter
from pydantic import BaseModel, ConfigDict

from casimir import __version__
from casimir.lib.constants import CONSTANTS_SOURCE, constants_hash, constants_table
from casimir.lib.errors import ConfigError
from casimir.models.config import RunConfig

# Set up logging
logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

COLUMNS = [
    "a_m", "T_K", "model", "F_J_per_m2", "E0_J_per_m2", "dF_J_per_m2", "S_J_per_K_m2",
    "F_TM", "F_TE", "err_est", "l_max_used", "config_hash", "status",
]

STATUS_OK = "ok"
STATUS_FAILED = "convergence-failure"


class ResultRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    a_m: float
    T_K: float
    model: str
    F_J_per_m2: Optional[float] = None
    E0_J_per_m2: Optional[float] = None
    dF_J_per_m2: Optional[float] = None
    S_J_per_K_m2: Optional[float] = None
    F_TM: Optional[float] = None
    F_TE: Optional[float] = None
    err_est: Optional[float] = None
    l_max_used: Optional[int] = None
    config_hash: str = ""
    status: str = STATUS_OK


def provenance(config: RunConfig) -> Dict[str, Any]:
    return {
        "package_version": __version__,
        "config": config.echo(),
        "constants": constants_table(),
        "constants_source": CONSTANTS_SOURCE,
        "constants_hash": constants_hash(),
    }


def _canonical(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def config_hash(config: RunConfig) -> str:
    """First 16 hex digits of the SHA-256 of the config echo and constants"""
    payload = {"config": config.echo(), "constants": constants_table()}
    return hashlib.sha256(_canonical(payload).encode("utf-8")).hexdigest()[:16]


def format_number(value, precision: int) -> str:
    """Fixed scientific format with the given number of significant digits"""
    if value is None:
        return ""
    if isinstance(value, int) and not isinstance(value, bool):
        return str(value)
    return f"{float(value):.{precision - 1}e}"


def row_fields(row: ResultRow, precision: int) -> List[str]:
    fields = []
    for column in COLUMNS:
        value = getattr(row, column)
        if column in ("model", "config_hash", "status"):
            fields.append(value)
        else:
            fields.append(format_number(value, precision))
    return fields


def _csv_line(fields: Iterable[str]) -> str:
    buffer = io.StringIO()
    csv.writer(buffer, lineterminator="\n").writerow(list(fields))
    return buffer.getvalue()


def row_key(a: float, T: float, model: str, precision: int) -> Tuple[str, str, str]:
    """Identity of a grid point as written to disk"""
    return format_number(a, precision), format_number(T, precision), model


def _atomic_write(path: Path, content: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=str(path.parent), prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as f:
            f.write(content)
            f.flush()
            os.fsync(f.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".meta.json")


def write_sidecar(path, prov: Dict[str, Any], hash_value: str) -> None:
    meta = {"schema_version": SCHEMA_VERSION, "config_hash": hash_value, "provenance": prov}
    _atomic_write(sidecar_path(path), json.dumps(meta, indent=2, sort_keys=True) + "\n")


def write_csv(rows: List[ResultRow], path, precision: int,
              prov: Dict[str, Any], hash_value: str) -> None:
    content = _csv_line(COLUMNS) + "".join(_csv_line(row_fields(r, precision)) for r in rows)
    _atomic_write(Path(path), content)
    write_sidecar(path, prov, hash_value)


def _json_value(value, precision: int):
    if value is None or isinstance(value, (str, int)):
        return value
    return float(format_number(value, precision))


def write_json(rows: List[ResultRow], path, precision: int, prov: Dict[str, Any]) -> None:
    payload = {
        "schema_version": SCHEMA_VERSION,
        "provenance": prov,
        "rows": [{c: _json_value(getattr(r, c), precision) for c in COLUMNS} for r in rows],
    }
    _atomic_write(Path(path), json.dumps(payload, indent=2) + "\n")


def write_xlsx(rows: List[ResultRow], path, precision: int, prov: Dict[str, Any]) -> None:
    """Workbook with a 'results' sheet and a 'provenance' sheet"""
    wb = Workbook()
    ws = wb.active
    ws.title = "results"
    for col_idx, header in enumerate(COLUMNS, 1):
        ws.cell(row=1, column=col_idx, value=header)
    for row_idx, row in enumerate(rows, 2):
        for col_idx, column in enumerate(COLUMNS, 1):
            ws.cell(row=row_idx, column=col_idx, value=_json_value(getattr(row, column), precision))
    for col_idx, header in enumerate(COLUMNS, 1):
        ws.column_dimensions[get_column_letter(col_idx)].width = max(len(header) + 2, precision + 8)

    meta = wb.create_sheet("provenance")
    meta.cell(row=1, column=1, value="key")
    meta.cell(row=1, column=2, value="value")
    entries = [
        ("schema_version", SCHEMA_VERSION),
        ("package_version", prov["package_version"]),
        ("constants_source", prov["constants_source"]),
        ("constants_hash", prov["constants_hash"]),
        ("config", _canonical(prov["config"])),
    ]
    entries += [(f"constant.{k}", v) for k, v in prov["constants"].items()]
    for row_idx, (key, value) in enumerate(entries, 2):
        meta.cell(row=row_idx, column=1, value=key)
        meta.cell(row=row_idx, column=2, value=value)

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(f".{path.name}.tmp")
    wb.save(str(tmp))
    os.replace(tmp, path)


def write_results(rows: List[ResultRow], fmt: str, path, precision: int,
                  prov: Dict[str, Any], hash_value: str) -> None:
    if fmt == "csv":
        write_csv(rows, path, precision, prov, hash_value)
    elif fmt == "json":
        write_json(rows, path, precision, prov)
    elif fmt == "xlsx":
        write_xlsx(rows, path, precision, prov)
    else:
        raise ConfigError(f"unknown output format '{fmt}'")
    logger.info(f"Wrote {len(rows)} row(s) to {path}")


def _parse_cell(column: str, raw):
    if raw is None or raw == "":
        return None
    if column in ("model", "config_hash", "status"):
        return str(raw)
    if column == "l_max_used":
        return int(raw)
    return float(raw)


def read_rows(path) -> List[Dict[str, Any]]:
    """Rows of an existing CSV, JSON or XLSX result file as dicts"""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".json":
        with open(path, "r") as f:
            return json.load(f)["rows"]
    if suffix == ".xlsx":
        wb = load_workbook(str(path), read_only=True)
        ws = wb["results"]
        values = list(ws.iter_rows(values_only=True))
        header = [str(h) for h in values[0]]
        return [{h: _parse_cell(h, v) for h, v in zip(header, row)} for row in values[1:]]
    with open(path, "r", newline="") as f:
        return [{k: _parse_cell(k, v) for k, v in row.items()} for row in csv.DictReader(f)]


class ResumableCsv:
    """
    Append-only CSV for sweeps. Each row is written as one complete line and
    synced; on reopen a torn trailing line is dropped and completed grid points
    are reported so they can be skipped.
    """

    def __init__(self, path, precision: int, prov: Dict[str, Any], hash_value: str):
        self.path = Path(path)
        self.precision = precision
        self.hash_value = hash_value
        self.prov = prov
        self._completed: Set[Tuple[str, str, str]] = set()
        self._open()

    def _open(self) -> None:
        header = _csv_line(COLUMNS)
        if not self.path.exists() or self.path.stat().st_size == 0:
            _atomic_write(self.path, header)
            write_sidecar(self.path, self.prov, self.hash_value)
            return

        with open(self.path, "rb") as f:
            data = f.read()
        if not data.endswith(b"\n"):
            keep = data.rfind(b"\n") + 1
            logger.warning(f"Dropping torn trailing line of {self.path}")
            with open(self.path, "r+b") as f:
                f.truncate(keep)
            data = data[:keep]

        lines = data.decode("utf-8").splitlines(keepends=True)
        if not lines or lines[0] != header:
            raise ConfigError(f"{self.path} exists with a different header", str(self.path))
        for fields in csv.reader(io.StringIO("".join(lines[1:]))):
            if not fields:
                continue
            record = dict(zip(COLUMNS, fields))
            if record.get("config_hash") != self.hash_value:
                raise ConfigError(
                    f"{self.path} was written with config hash {record.get('config_hash')}, "
                    f"current run is {self.hash_value}",
                    str(self.path),
                )
            self._completed.add((record["a_m"], record["T_K"], record["model"]))
        write_sidecar(self.path, self.prov, self.hash_value)
        if self._completed:
            logger.warning(f"Resuming {self.path}: {len(self._completed)} row(s) already done")

    def is_done(self, a: float, T: float, model: str) -> bool:
        return row_key(a, T, model, self.precision) in self._completed

    def append(self, row: ResultRow) -> None:
        line = _csv_line(row_fields(row, self.precision)).encode("utf-8")
        fd = os.open(str(self.path), os.O_WRONLY | os.O_APPEND | os.O_CREAT, 0o644)
        try:
            os.write(fd, line)
            os.fsync(fd)
        finally:
            os.close(fd)
        self._completed.add(row_key(row.a_m, row.T_K, row.model, self.precision))
