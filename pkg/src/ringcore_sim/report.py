"""Link reports and their results.csv / report.json / taps.json files."""

import csv
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from .constants import FEC_THRESHOLD
from .envelope import ModeId

logger = logging.getLogger(__name__)

CSV_COLUMNS = (
    "point",
    "core",
    "mode_group",
    "charge",
    "polarization",
    "wavelength",
    "direction",
    "ber",
    "ci_low",
    "ci_high",
    "snr_db",
    "evm_percent",
    "status",
)

FAILURE_STATUSES = ("no_lock", "diverged")


def _format(value: Any) -> str:
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return repr(value)
    return str(value)


def json_safe(value: Any) -> Any:
    """Replace non-finite floats with strings so the output stays strict JSON."""
    if isinstance(value, float) and not math.isfinite(value):
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    if isinstance(value, dict):
        return {str(k): json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_safe(v) for v in value]
    return value


@dataclass(slots=True)
class ChannelRow:
    """Measured result of one spatial/polarization channel."""

    mode: ModeId
    ber: float = math.nan
    ci_low: float = math.nan
    ci_high: float = math.nan
    snr_db: float = math.nan
    evm_percent: float = math.nan
    status: str = "fail"
    wavelength: int = 0
    point: str = ""

    @classmethod
    def measured(
        cls,
        mode: ModeId,
        ber: float,
        ci: tuple[float, float],
        snr_db: float,
        evm_percent: float,
        wavelength: int = 0,
        point: str = "",
    ) -> "ChannelRow":
        # pass only when the whole interval is below threshold
        status = "pass" if ber < FEC_THRESHOLD and ci[1] < FEC_THRESHOLD else "fail"
        return cls(
            mode, ber, ci[0], ci[1], snr_db, evm_percent, status, wavelength, point
        )

    @classmethod
    def failed(
        cls, mode: ModeId, status: str, wavelength: int = 0, point: str = ""
    ) -> "ChannelRow":
        if status not in FAILURE_STATUSES:
            raise ValueError(f"unknown failure status {status!r}")
        return cls(mode, status=status, wavelength=wavelength, point=point)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def sort_key(self) -> tuple:
        return (self.point, self.wavelength, self.mode.sort_key())

    def as_record(self) -> dict[str, Any]:
        return {
            "point": self.point,
            "core": self.mode.core,
            "mode_group": self.mode.mode_group,
            "charge": self.mode.charge,
            "polarization": self.mode.polarization.value,
            "wavelength": self.wavelength,
            "direction": self.mode.direction.value,
            "ber": self.ber,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "snr_db": self.snr_db,
            "evm_percent": self.evm_percent,
            "status": self.status,
        }


@dataclass(slots=True)
class AcceptanceCheck:
    name: str
    passed: bool
    detail: str = ""


@dataclass(slots=True)
class LinkReport:
    experiment: str
    seed: int
    config_hash: str
    rows: list[ChannelRow] = field(default_factory=list)
    tables: dict[str, list[dict[str, Any]]] = field(default_factory=dict)
    summary: dict[str, Any] = field(default_factory=dict)
    checks: list[AcceptanceCheck] = field(default_factory=list)
    taps: dict[str, Any] = field(default_factory=dict)
    telemetry: dict[str, Any] = field(default_factory=dict)

    def sorted_rows(self) -> list[ChannelRow]:
        return sorted(self.rows, key=ChannelRow.sort_key)

    def check(self, name: str, passed: bool, detail: str = "") -> bool:
        self.checks.append(AcceptanceCheck(name, bool(passed), detail))
        if not passed:
            logger.warning("Acceptance check %s failed: %s", name, detail)
        return bool(passed)

    @property
    def accepted(self) -> bool:
        return all(c.passed for c in self.checks)

    def counts(self) -> dict[str, int]:
        passed = sum(1 for r in self.rows if r.passed)
        return {"total": len(self.rows), "passed": passed, "failed": len(self.rows) - passed}

    def to_dict(self) -> dict[str, Any]:
        return json_safe(
            {
                "experiment": self.experiment,
                "seed": self.seed,
                "config_hash": self.config_hash,
                "counts": self.counts(),
                "summary": self.summary,
                "tables": self.tables,
                "acceptance": [
                    {"name": c.name, "passed": c.passed, "detail": c.detail}
                    for c in self.checks
                ],
                "accepted": self.accepted,
                "telemetry": self.telemetry,
            }
        )

    def write(self, out_dir: "str | Path") -> list[Path]:
        """Write results.csv, report.json and (when present) taps.json."""
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        written = [write_results_csv(self.sorted_rows(), out / "results.csv")]
        report_path = out / "report.json"
        report_path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")
        written.append(report_path)
        if self.taps:
            taps_path = out / "taps.json"
            taps_path.write_text(json.dumps(json_safe(self.taps), sort_keys=True) + "\n")
            written.append(taps_path)
        logger.info("Wrote %s", ", ".join(p.name for p in written))
        return written


def write_results_csv(rows: list[ChannelRow], path: Path) -> Path:
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            record = row.as_record()
            writer.writerow([_format(record[c]) for c in CSV_COLUMNS])
    return path


def read_results_csv(path: "str | Path") -> list[dict[str, str]]:
    with Path(path).open(newline="") as handle:
        return list(csv.DictReader(handle))


def read_report(out_dir: "str | Path") -> Optional[dict[str, Any]]:
    path = Path(out_dir) / "report.json"
    if not path.exists():
        return None
    return json.loads(path.read_text())
