import hashlib
import json
import logging
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import pandas as pd
from pydantic import ValidationError

from entrograph.core.config import settings
from entrograph.core.errors import InvalidInputError
from entrograph.schemas.coding import CodingCounts
from entrograph.schemas.growth import GrowthSeries
from entrograph.schemas.profile import CheckResult, CountProfile
from entrograph.schemas.report import CodingSummary, LevelSummary, RunConfig, RunReport, Timing

logger = logging.getLogger(__name__)

CSV_OPTIONS = {"index": False, "float_format": "%.9g", "lineterminator": "\n"}


def parse_value(raw: str) -> Any:
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw.strip().strip('"').strip("'")


class ReportService:
    # configuration

    @staticmethod
    def read_config_file(path: Union[str, Path]) -> Dict[str, Any]:
        """JSON for *.json, flat `key = value` lines otherwise (# starts a comment)."""
        path = Path(path)
        if not path.exists():
            raise InvalidInputError(f"config file not found: {path}")
        text = path.read_text()
        if path.suffix.lower() == ".json":
            try:
                data = json.loads(text)
            except json.JSONDecodeError as e:
                raise InvalidInputError(f"{path}: {e}")
            if not isinstance(data, dict):
                raise InvalidInputError(f"{path}: expected a JSON object")
            return data

        data: Dict[str, Any] = {}
        for number, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidInputError(f"{path}:{number}: expected key = value")
            key, value = line.split("=", 1)
            data[key.strip()] = parse_value(value.strip())
        return data

    @classmethod
    def load_config(cls, path: Optional[Union[str, Path]] = None, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
        data: Dict[str, Any] = {"seed": settings.seed, "threads": settings.threads}
        data.update(cls.read_config_file(path) if path else {})
        data.update({k: v for k, v in (overrides or {}).items() if v is not None})
        try:
            return RunConfig.model_validate(data)
        except ValidationError as e:
            raise InvalidInputError(f"invalid config: {e.errors()[0]['loc']}: {e.errors()[0]['msg']}")

    @staticmethod
    def config_hash(config: RunConfig) -> str:
        payload = json.dumps(config.hashed_fields(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    # tables

    @staticmethod
    def profile_frame(profile: CountProfile) -> pd.DataFrame:
        rows = []
        for record in profile.levels:
            g_values = record.g_series.values if record.g_series is not None else [None] * record.s_series.horizon
            for n, (s, g) in enumerate(zip(record.s_series.values, g_values), start=1):
                rows.append({"level": record.k, "n": n, "s": s, "g": g, "sandwich_ok": record.sandwich_ok})
        return pd.DataFrame(rows, columns=["level", "n", "s", "g", "sandwich_ok"])

    @staticmethod
    def coding_frame(counts: CodingCounts, d_lower: Optional[GrowthSeries] = None) -> pd.DataFrame:
        frame = pd.DataFrame({"n": range(1, counts.horizon + 1), "c": counts.series.values})
        frame["d_lower"] = d_lower.values if d_lower is not None else None
        return frame

    @staticmethod
    def read_series_csv(path: Union[str, Path], column: str) -> GrowthSeries:
        path = Path(path)
        if not path.exists():
            raise InvalidInputError(f"CSV file not found: {path}")
        df = pd.read_csv(path)
        if column not in df.columns:
            raise InvalidInputError(f"{path.name} has no column '{column}' (columns: {', '.join(df.columns)})")
        values = df[column].dropna().astype(float).tolist()
        try:
            return GrowthSeries.from_values(values, label=f"{path.name}:{column}")
        except ValidationError as e:
            raise InvalidInputError(f"{path.name}:{column}: {e.errors()[0]['msg']}")

    # reports

    @staticmethod
    def _timing(wall_time: float) -> Timing:
        return Timing(created_at=datetime.utcnow(), wall_time=round(wall_time, 3))

    @classmethod
    def entropy_report(cls, config: RunConfig, profile: CountProfile, checks: Optional[List[CheckResult]] = None) -> RunReport:
        metadata = {k: v for k, v in profile.metadata.items() if k != "wall_time"}
        wall_time = float(profile.metadata.get("wall_time", 0.0))
        return RunReport(
            command="entropy",
            system=profile.system,
            config=config.model_dump(mode="json"),
            config_hash=cls.config_hash(config),
            levels=[LevelSummary(k=r.k, growth_class=r.growth_class, sandwich_ok=r.sandwich_ok) for r in profile.levels],
            aggregate=profile.aggregate,
            status=profile.status.value,
            metadata=metadata,
            profile=profile.model_copy(update={"metadata": metadata}),
            checks=checks or [],
            timing=cls._timing(wall_time),
        )

    @classmethod
    def coding_report(
        cls,
        config: RunConfig,
        system: str,
        summary: CodingSummary,
        wall_time: float,
        checks: Optional[List[CheckResult]] = None,
    ) -> RunReport:
        return RunReport(
            command="coding",
            system=system,
            config=config.model_dump(mode="json"),
            config_hash=cls.config_hash(config),
            coding=summary,
            checks=checks or [],
            timing=cls._timing(wall_time),
        )

    @staticmethod
    def render(report: RunReport) -> str:
        """JSON text of a report, validated against the report model first."""
        payload = report.model_dump(mode="json", by_alias=True)
        RunReport.model_validate(payload)
        return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    @staticmethod
    def schema_document() -> Dict[str, Any]:
        return RunReport.model_json_schema(by_alias=True)

    # files

    @classmethod
    def write(cls, out_dir: Union[str, Path], stem: str, report: RunReport, frame: Optional[pd.DataFrame] = None) -> List[Path]:
        """Write `<stem>.json` and, when given, `<stem>.csv` into out_dir."""
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        written = []
        if frame is not None:
            csv_path = out / f"{stem}.csv"
            frame.to_csv(csv_path, **CSV_OPTIONS)
            written.append(csv_path)
        json_path = out / f"{stem}.json"
        json_path.write_text(cls.render(report), encoding="utf-8", newline="\n")
        written.append(json_path)
        logger.info(f"📝 wrote {', '.join(str(p) for p in written)}")
        return written
