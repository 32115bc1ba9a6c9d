"""Parsing of results.csv records for the results browser."""

import math
from typing import Optional

from .utils import format_ber, format_db


def _float(value: Optional[str]) -> Optional[float]:
    """CSV cell to float; empty cells are missing values."""
    if value is None or value.strip() == "":
        return None
    result = float(value)
    return None if math.isnan(result) else result


def _int(value: Optional[str], default: int = 0) -> int:
    if value is None or value.strip() == "":
        return default
    return int(value)


class ResultRow:
    """One channel of a results.csv file with display helpers."""

    def __init__(self, record: dict[str, str]):
        self.record = record
        self.point = record.get("point", "")
        self.core = _int(record.get("core"))
        self.mode_group = _int(record.get("mode_group"))
        self.charge = _int(record.get("charge"))
        self.polarization = record.get("polarization", "")
        self.wavelength = _int(record.get("wavelength"))
        self.direction = record.get("direction", "")
        self.ber = _float(record.get("ber"))
        self.ci_low = _float(record.get("ci_low"))
        self.ci_high = _float(record.get("ci_high"))
        self.snr_db = _float(record.get("snr_db"))
        self.evm_percent = _float(record.get("evm_percent"))
        self.status = record.get("status", "fail")
        self.content = self._render()

    @property
    def label(self) -> str:
        return f"<{self.charge:+d},{self.polarization}>"

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def _render(self) -> str:
        """Single display line: ids, BER with interval, SNR, EVM and status."""
        interval = ""
        if self.ci_low is not None and self.ci_high is not None:
            interval = f" [{format_ber(self.ci_low)}, {format_ber(self.ci_high)}]"
        evm = "-" if self.evm_percent is None else f"{self.evm_percent:.1f}%"
        parts = [
            f"core{self.core}",
            f"MG{self.mode_group}",
            f"{self.label:<7}",
            f"{self.direction:<8}",
            f"w{self.wavelength}",
            f"BER {format_ber(self.ber)}{interval}",
            f"SNR {format_db(self.snr_db)} dB",
            f"EVM {evm}",
            self.status.upper(),
        ]
        if self.point:
            parts.insert(0, self.point)
        return "  ".join(parts)
