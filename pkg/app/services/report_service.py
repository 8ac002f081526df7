from builtins import bool, bytes, classmethod, float, int, isinstance, str
import hashlib
import logging
from pathlib import Path
import time
from typing import Any, Dict, Iterable, List, Optional, Union

import numpy as np

from app.dependencies import get_settings
from app.schemas.bicomplex_schemas import complex_to_wire
from app.schemas.report_schemas import CheckResult, Report, RunConfig

settings = get_settings()
logger = logging.getLogger(__name__)


def to_wire(value: Any) -> Any:
    """Recursively converts complex numbers and arrays into JSON-ready values."""
    if isinstance(value, (complex, np.complexfloating)):
        return complex_to_wire(value)
    if isinstance(value, np.ndarray):
        return to_wire(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, dict):
        return {str(k): to_wire(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_wire(v) for v in value]
    return value


class ReportService:
    """Assembles, digests and writes run reports."""

    @classmethod
    def digest(cls, config: RunConfig, payloads: Iterable[Union[bytes, str]] = ()) -> str:
        """sha256 over the canonical configuration followed by every input payload."""
        hasher = hashlib.sha256()
        hasher.update(config.model_dump_json(exclude={"output"}).encode("utf-8"))
        for payload in payloads:
            hasher.update(payload.encode("utf-8") if isinstance(payload, str) else payload)
        return hasher.hexdigest()

    @classmethod
    def check(cls, name: str, value: float, limit: float) -> CheckResult:
        return CheckResult(name=name, passed=bool(value <= limit), value=float(value), limit=float(limit))

    @classmethod
    def build(
        cls,
        config: RunConfig,
        digest: str,
        results: Dict[str, Any],
        started: float,
        residuals: Optional[Dict[str, float]] = None,
        checks: Optional[List[CheckResult]] = None,
    ) -> Report:
        return Report(
            command=config.command,
            config=config,
            inputs_digest=digest,
            results=to_wire(results),
            residuals=residuals or {},
            checks=checks or [],
            wall_clock_seconds=time.perf_counter() - started,
        )

    @classmethod
    def write(cls, report: Report, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(report.to_json(settings.report_indent) + "\n", encoding="utf-8")
        logger.info(f"Report written to {path}")
        return path

    @classmethod
    def summary(cls, report: Report) -> str:
        lines = [f"{report.command.value}: {'PASS' if report.passed else 'FAIL'}"]
        for check in report.checks:
            status = "ok" if check.passed else "FAILED"
            lines.append(f"  {check.name}: {check.value:.3e} (limit {check.limit:.1e}) {status}")
        for key in sorted(report.results):
            value = report.results[key]
            if isinstance(value, (int, float, str)) or (isinstance(value, list) and len(value) <= 4
                                                        and all(isinstance(v, (int, float)) for v in value)):
                lines.append(f"  {key} = {value}")
        return "\n".join(lines)
