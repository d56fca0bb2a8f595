"""ExperimentRunner: evaluates a manifest grid and writes the result files.

Usage::

    from freeotoc.experiments import load_manifest, run_manifest

    summary = run_manifest(load_manifest("sweep.json"), out_dir="results/sweep")
    if not summary.passed:
        ...

Two files are written per run, both free of timestamps so reruns are
byte-identical:

    results.csv   ``# manifest_sha256=..,seed=..,version=..`` then a header
                  and the rows, sorted canonically
    summary.json  provenance, row count and every check result
"""
from __future__ import annotations

import csv
import io
import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional

from pydantic import BaseModel, ConfigDict

from .. import __version__
from ..config.defaults import DEFAULT_RESULTS_FILENAME, DEFAULT_SUMMARY_FILENAME
from ..config.settings import Settings, get_settings
from ..core.interfaces import ProgressCallback
from .manifest import ExperimentManifest, manifest_hash
from .steps import CheckResult, Row, RunContext, Step, build_step, evaluate_point, point_label

logger = logging.getLogger(__name__)


class RunSummary(BaseModel):
    """Everything ``summary.json`` records about one run."""

    model_config = ConfigDict(frozen=True)

    manifest_sha256: str
    seed: int
    version: str
    quantity: str
    rows: int
    checks: list[CheckResult]
    passed: bool
    results_path: str
    summary_path: str

    @property
    def failed_checks(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]


def _sort_key(value: Any) -> tuple[int, Any]:
    if value is None:
        return (2, "")
    if isinstance(value, (int, float, Fraction)) and not isinstance(value, bool):
        return (0, float(value))
    return (1, str(value))


def _format(value: Any, float_format: str) -> str:
    if value is None:
        return ""
    if isinstance(value, bool) or isinstance(value, int):
        return str(value)
    if isinstance(value, (float, Fraction)):
        return format(float(value), float_format)
    return str(value)


def render_csv(rows: list[Row], columns: tuple[str, ...], provenance: str, float_format: str) -> str:
    """Provenance comment, header and canonically sorted rows."""
    ordered = sorted(rows, key=lambda row: tuple(_sort_key(row.get(c)) for c in columns))
    buffer = io.StringIO()
    buffer.write(f"# {provenance}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in ordered:
        writer.writerow([_format(row.get(c), float_format) for c in columns])
    return buffer.getvalue()


class ExperimentRunner:
    """Runs one :class:`Step` over every point of a manifest grid.

    Points are dispatched to a thread pool when ``workers > 1``; results are
    collected in point order, so the output does not depend on ``workers``.
    """

    def __init__(self, settings: Settings | None = None, workers: int = 1) -> None:
        self._settings = settings or get_settings()
        self._workers = max(1, workers)

    def run(
        self,
        manifest: ExperimentManifest,
        out_dir: str | Path | None = None,
        progress: Optional[ProgressCallback] = None,
    ) -> RunSummary:
        settings = self._settings
        step: Step = build_step(manifest.quantity)
        ctx = RunContext(
            manifest=manifest,
            caps=settings.caps,
            sigmas=settings.monte_carlo.stderr_sigmas,
            mc_workers=1 if self._workers > 1 else settings.monte_carlo.workers,
        )
        points = step.points(manifest)
        if progress is not None:
            progress.on_start(len(points))

        started = time.perf_counter()
        rows: list[Row] = []
        checks: list[CheckResult] = []

        def one(point):
            t0 = time.perf_counter()
            outcome = evaluate_point(step, point, ctx)
            logger.info("%s point %s in %.3fs", manifest.quantity.value, point_label(point), time.perf_counter() - t0)
            return outcome

        if self._workers > 1:
            with ThreadPoolExecutor(max_workers=self._workers) as pool:
                outcomes = pool.map(one, points)
                for i, (point_rows, point_checks) in enumerate(outcomes, start=1):
                    rows.extend(point_rows)
                    checks.extend(point_checks)
                    if progress is not None:
                        progress.on_progress(i, len(points), point_label(points[i - 1]))
        else:
            for i, point in enumerate(points, start=1):
                point_rows, point_checks = one(point)
                rows.extend(point_rows)
                checks.extend(point_checks)
                if progress is not None:
                    progress.on_progress(i, len(points), point_label(point))

        checks.extend(step.finish(rows, ctx))
        checks.sort(key=lambda c: (c.name, c.point))
        passed = all(c.passed for c in checks)
        logger.info(
            "%s: %d rows, %d checks (%d failed) in %.3fs",
            manifest.quantity.value, len(rows), len(checks),
            sum(not c.passed for c in checks), time.perf_counter() - started,
        )
        if progress is not None:
            progress.on_complete(sum(c.passed for c in checks), sum(not c.passed for c in checks))

        target = Path(out_dir or manifest.output or settings.output.directory)
        return self._write(manifest, step, rows, checks, passed, target)

    def _write(
        self,
        manifest: ExperimentManifest,
        step: Step,
        rows: list[Row],
        checks: list[CheckResult],
        passed: bool,
        target: Path,
    ) -> RunSummary:
        digest = manifest_hash(manifest)
        target.mkdir(parents=True, exist_ok=True)
        results_path = target / DEFAULT_RESULTS_FILENAME
        summary_path = target / DEFAULT_SUMMARY_FILENAME
        provenance = f"manifest_sha256={digest},seed={manifest.seed},version={__version__}"
        results_path.write_text(
            render_csv(rows, step.columns, provenance, self._settings.output.float_format), encoding="utf-8"
        )
        summary = RunSummary(
            manifest_sha256=digest,
            seed=manifest.seed,
            version=__version__,
            quantity=manifest.quantity.value,
            rows=len(rows),
            checks=checks,
            passed=passed,
            results_path=str(results_path),
            summary_path=str(summary_path),
        )
        payload = summary.model_dump(mode="json", exclude={"results_path", "summary_path"})
        summary_path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        logger.info("wrote %s and %s", results_path, summary_path)
        return summary


def run_manifest(
    manifest: ExperimentManifest,
    out_dir: str | Path | None = None,
    workers: int = 1,
    progress: Optional[ProgressCallback] = None,
) -> RunSummary:
    """Evaluate ``manifest`` and write ``results.csv`` and ``summary.json``."""
    return ExperimentRunner(workers=workers).run(manifest, out_dir=out_dir, progress=progress)
