"""Report repository: CSV tables with a provenance header and JSON reports."""

import json
import math
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import pandas as pd

ARTIFACT_VERSION = "wiener-recovery/1"
FLOAT_FORMAT = "%.17g"
HEADER_PREFIX = "# "


def _json_safe(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None if math.isnan(value) else ("inf" if value > 0 else "-inf")
    if isinstance(value, Mapping):
        return {str(k): _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


class CSVReportRepository:
    """Repository for experiment tables and their JSON companions."""

    def __init__(self, config_hash: str, seeds: Iterable[int]):
        """
        Initialize the repository.

        Args:
            config_hash: SHA-256 of the canonical configuration
            seeds: Every seed the experiment used, in config order
        """
        self.config_hash = config_hash
        self.seeds = list(seeds)

    def header_lines(self) -> list[str]:
        return [
            f"{HEADER_PREFIX}artifact_version: {ARTIFACT_VERSION}",
            f"{HEADER_PREFIX}config_hash: {self.config_hash}",
            f"{HEADER_PREFIX}seeds: {' '.join(str(s) for s in self.seeds)}",
        ]

    def save_table(
        self,
        rows: Sequence[Mapping[str, Any]],
        columns: Sequence[str],
        output_path: Path,
    ) -> None:
        """
        Write rows as CSV behind the provenance header.

        Columns keep the given order; missing values are written as empty
        fields and floats with 17 significant digits.
        """
        output_path.parent.mkdir(parents=True, exist_ok=True)
        df = pd.DataFrame(list(rows), columns=list(columns))
        with output_path.open("w", encoding="utf-8", newline="") as handle:
            handle.write("\n".join(self.header_lines()) + "\n")
            df.to_csv(
                handle, index=False, float_format=FLOAT_FORMAT, lineterminator="\n"
            )

    def save_report(self, payload: Mapping[str, Any], output_path: Path) -> None:
        """Write a JSON report carrying the same provenance as the CSV."""
        output_path.parent.mkdir(parents=True, exist_ok=True)
        document = {
            "artifact_version": ARTIFACT_VERSION,
            "config_hash": self.config_hash,
            "seeds": self.seeds,
            **_json_safe(dict(payload)),
        }
        output_path.write_text(
            json.dumps(document, indent=2, sort_keys=True, allow_nan=False) + "\n",
            encoding="utf-8",
        )

    @staticmethod
    def load_table(csv_path: Path) -> pd.DataFrame:
        """
        Load a table written by ``save_table``.

        Raises:
            FileNotFoundError: If the CSV file doesn't exist
        """
        if not csv_path.exists():
            raise FileNotFoundError(f"CSV file {csv_path} does not exist")
        return pd.read_csv(csv_path, comment="#", float_precision="round_trip")

    @staticmethod
    def load_header(csv_path: Path) -> dict[str, str]:
        """Parse the provenance header of a table into a mapping."""
        header: dict[str, str] = {}
        with csv_path.open(encoding="utf-8") as handle:
            for line in handle:
                if not line.startswith(HEADER_PREFIX):
                    break
                key, _, value = line[len(HEADER_PREFIX) :].rstrip("\n").partition(": ")
                header[key] = value
        return header
