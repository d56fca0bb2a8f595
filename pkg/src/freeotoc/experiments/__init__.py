"""Experiment manifests, the grid runner and reference-table reports."""
from .manifest import KNOWN_CHECKS, ExperimentManifest, GridSpec, load_manifest, manifest_hash, parse_manifest  # noqa: F401
from .report import ReportRow, TableReport, table_report  # noqa: F401
from .runner import ExperimentRunner, RunSummary, render_csv, run_manifest  # noqa: F401
from .steps import CheckResult, build_step  # noqa: F401
