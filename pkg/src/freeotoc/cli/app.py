"""Click-based CLI for free-otoc.

Every subcommand runs headless: results go to stdout (or ``--out``) as
CSV, progress and log messages go to stderr, and a failed check makes the
exit code nonzero.

Entry point registered in ``pyproject.toml``::

    [project.scripts]
    free-otoc = "freeotoc.cli.app:main"
"""
from __future__ import annotations

import json
import logging
import sys
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Optional

import click

from .. import __version__
from ..combinatorics.ncposet import count_report
from ..config.defaults import DEFAULT_REPORT_MAX_K
from ..config.settings import get_settings
from ..core.exceptions import FreeOtocError, ManifestError
from ..core.models import EnsembleConfig, Orientation, OrderTag, OtocPrediction, RmpuGeometry, Variant
from ..experiments.manifest import load_manifest
from ..experiments.report import table_report
from ..experiments.runner import render_csv, run_manifest
from ..freeprob.freeness import free_otoc_prediction
from ..freeprob.moments import CumulantSequence, MomentSequence, cumulants_from_moments, moments_from_cumulants
from ..mcsim.estimators import mc_frame_potential, mc_otoc
from ..mcsim.observables import ObservableSpec
from ..predict.frame import frame_potential_haar, frame_potential_rmpu_asymptotic, frame_potential_rmpu_exact
from ..predict.haar import haar_otoc_exact
from ..predict.identity import verify_frame_otoc_identity
from ..predict.rmpu import rmpu_otoc_exact
from ..predict.subleading import subleading_coeff_haar, subleading_coeff_rmpu
from ..weingarten.series import genus_class_values, mobius_class_values
from ..weingarten.tables import weingarten

logger = logging.getLogger(__name__)

LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
PREDICTION_COLUMNS = ("quantity", "k", "d", "r", "n", "chi", "D", "value", "order_tag", "residual_estimate")
ESTIMATE_COLUMNS = ("quantity", "ensemble", "k", "mean", "stderr", "samples", "seed")


# ── Helpers ──────────────────────────────────────────────────────────


@contextmanager
def _library_errors() -> Iterator[None]:
    """Turn library errors into a one-line ClickException (exit 1)."""
    try:
        yield
    except FreeOtocError as exc:
        raise click.ClickException(str(exc)) from exc


def _int_list(ctx: click.Context, param: click.Parameter, value: Optional[str]) -> list[int]:
    if not value:
        return []
    try:
        return [int(part) for part in value.split(",") if part.strip()]
    except ValueError as exc:
        raise click.BadParameter(f"expected comma-separated integers, got {value!r}") from exc


def _emit(rows: list[dict[str, Any]], columns: tuple[str, ...], out: Optional[str], provenance: str) -> None:
    text = render_csv(rows, columns, provenance, get_settings().output.float_format)
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text, encoding="utf-8")
        click.echo(f"wrote {out}", err=True)
    else:
        click.echo(text, nl=False)


def _moments(raw: Optional[str], observable: Optional[str], k: int, name: str) -> MomentSequence:
    """Moments from ``--moments-x`` (comma-separated) or ``--observable-x`` (JSON)."""
    if raw and observable:
        raise click.UsageError(f"give either --moments-{name} or --observable-{name}, not both")
    if raw:
        return MomentSequence(moments=tuple(part for part in raw.split(",") if part.strip()))
    if observable:
        return ObservableSpec.from_json(observable).moments(k)
    raise click.UsageError(f"--moments-{name} or --observable-{name} is required")


def _chis(d: int, r: Optional[int], chi_list: list[int]) -> list[int]:
    if chi_list:
        return chi_list
    return [d ** (r or 1)]


class _EchoProgress:
    """ProgressCallback writing one stderr line per grid point."""

    def on_start(self, total: int) -> None:
        click.echo(f"evaluating {total} grid points", err=True)

    def on_progress(self, current: int, total: int, message: str = "") -> None:
        click.echo(f"  [{current}/{total}] {message}", err=True)

    def on_complete(self, passed: int, failed: int) -> None:
        click.echo(f"checks: {passed} passed, {failed} failed", err=True)


# ══════════════════════════════════════════════════════════════════════
# ROOT GROUP
# ══════════════════════════════════════════════════════════════════════


@click.group(
    context_settings={"help_option_names": ["-h", "--help"]},
    invoke_without_command=True,
)
@click.version_option(package_name="free-otoc", prog_name="free-otoc")
@click.option("--log-level", type=click.Choice(LOG_LEVELS, case_sensitive=False), default=None,
              help="Logging level (default: settings.log_level).")
@click.pass_context
def cli(ctx: click.Context, log_level: Optional[str]):
    """Weingarten calculus and free-probability predictions for OTOCs.

    Exact and asymptotic OTOCs and frame potentials for Haar and random
    matrix product unitaries, with Monte Carlo ground truth and
    reproducible experiment manifests.
    """
    level = (log_level or get_settings().log_level).upper()
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    logging.getLogger("freeotoc").setLevel(level)
    if ctx.invoked_subcommand is None:
        click.echo(ctx.get_help())


# ══════════════════════════════════════════════════════════════════════
# COMBINATORICS
# ══════════════════════════════════════════════════════════════════════


@cli.command(name="wg-table")
@click.option("--dim", "dim", type=int, required=True, help="Total dimension D (> k).")
@click.option("--k", "k", type=int, required=True, help="Replica count.")
@click.option("--out", type=click.Path(), default=None, help="CSV file (default: stdout).")
def wg_table(dim: int, k: int, out: Optional[str]):
    """Exact Weingarten values per conjugacy class, with Möbius and genus-one coefficients."""
    with _library_errors():
        table = weingarten(dim, k, "exact", cap=get_settings().caps.table)
        mobius = mobius_class_values(k)
        genus_one = genus_class_values(k, 1)
    rows = [
        {
            "cycle_type": "-".join(str(part) for part in lam),
            "value": str(value),
            "float_value": float(value),
            "mobius": int(mobius[c]),
            "genus_one": int(genus_one[c]),
        }
        for c, (lam, value) in enumerate(zip(table.classes, table.class_values))
    ]
    _emit(rows, ("cycle_type", "value", "float_value", "mobius", "genus_one"), out, f"version={__version__},D={dim},k={k}")


@cli.command(name="nc-count")
@click.option("--k", "k_values", callback=_int_list, required=True, help="Comma-separated k values.")
@click.option("--m", "m", type=int, default=2, show_default=True, help="Chain length.")
@click.option("--out", type=click.Path(), default=None, help="CSV file (default: stdout).")
def nc_count(k_values: list[int], m: int, out: Optional[str]):
    """Count m-multichains in NC(k) (Fuss–Catalan numbers)."""
    with _library_errors():
        rows = count_report(k_values, m)
    _emit(rows, ("k", "m", "count", "wall_time"), out, f"version={__version__}")


@cli.command(name="cumulants")
@click.option("--moments", "values", required=True, help="Comma-separated values, e.g. '0,1,0,2'.")
@click.option("--inverse", is_flag=True, help="Treat the values as free cumulants and return moments.")
@click.option("--out", type=click.Path(), default=None, help="CSV file (default: stdout).")
def cumulants_cmd(values: str, inverse: bool, out: Optional[str]):
    """Convert moments to free cumulants (or back with --inverse)."""
    parts = tuple(part for part in values.split(",") if part.strip())
    with _library_errors():
        if inverse:
            c = CumulantSequence(kappas=parts)
            m = moments_from_cumulants(c)
        else:
            m = MomentSequence(moments=parts)
            c = cumulants_from_moments(m)
    rows = [
        {"j": j, "moment": str(mj), "cumulant": str(kj)}
        for j, (mj, kj) in enumerate(zip(m.moments, c.kappas), start=1)
    ]
    _emit(rows, ("j", "moment", "cumulant"), out, f"version={__version__}")


# ══════════════════════════════════════════════════════════════════════
# PREDICTIONS
# ══════════════════════════════════════════════════════════════════════


@cli.command(name="otoc-exact")
@click.option("--k", "k", type=int, required=True, help="OTOC order.")
@click.option("--moments-a", default=None, help="Moments of A, comma-separated.")
@click.option("--moments-b", default=None, help="Moments of B, comma-separated.")
@click.option("--observable-a", type=click.Path(exists=True), default=None, help="Observable A as JSON.")
@click.option("--observable-b", type=click.Path(exists=True), default=None, help="Observable B as JSON.")
@click.option("--dim", "dim", type=int, default=None, help="Global Haar on dimension D.")
@click.option("--d", "d", type=int, default=2, show_default=True, help="Local dimension (RMPU).")
@click.option("--r", "r", type=int, default=None, help="Overlap exponent, chi = d^r (RMPU).")
@click.option("--n", "n", type=int, default=1, show_default=True, help="Gates per staircase (RMPU).")
@click.option("--chi-list", callback=_int_list, default=None, help="Comma-separated bond dimensions.")
@click.option("--b-site", type=int, default=None, help="Single site carrying B (RMPU).")
@click.option("--out", type=click.Path(), default=None, help="CSV file (default: stdout).")
def otoc_exact(k, moments_a, moments_b, observable_a, observable_b, dim, d, r, n, chi_list, b_site, out):
    """Exact OTOC with its free-probability value and chi^-2 (or D^-2) coefficient."""
    caps = get_settings().caps
    rows = []
    with _library_errors():
        mA = _moments(moments_a, observable_a, k, "a")
        mB = _moments(moments_b, observable_b, k, "b")
        free = free_otoc_prediction(mA, mB, k)
        if dim is not None:
            exact = haar_otoc_exact(mA, mB, dim, k, cap=caps.enumeration)
            coeff = subleading_coeff_haar(mA, mB, k, cap=caps.enumeration)
            for quantity, value, tag, scale in (
                ("otoc_haar", exact, OrderTag.EXACT, "0"),
                ("otoc_free", free, OrderTag.LEADING, "D^-2"),
                ("subleading_haar", coeff, OrderTag.SUBLEADING, "D^-2"),
            ):
                rows.append(OtocPrediction.from_value(quantity, value, order_tag=tag, error_scale=scale, k=k, D=dim).to_row())
        else:
            coeff = subleading_coeff_rmpu(mA, mB, n, d, k, cap=caps.transfer)
            for chi in _chis(d, r, chi_list):
                geom = RmpuGeometry.from_chi(d, chi, n)
                exact = rmpu_otoc_exact(mA, mB, geom, k, b_site=b_site, cap=caps.transfer, exact_cap=caps.exact_transfer)
                where = {"k": k, "d": d, "r": geom.r, "n": n, "chi": chi, "D": geom.D}
                rows.append(OtocPrediction.from_value("otoc_rmpu", exact, **where).to_row())
                rows.append(
                    OtocPrediction.from_value("otoc_free", free, order_tag=OrderTag.LEADING, error_scale="chi^-2", **where).to_row()
                )
                rows.append(
                    OtocPrediction.from_value(
                        "subleading_rmpu", coeff, order_tag=OrderTag.SUBLEADING, error_scale="chi^-2", **where
                    ).to_row()
                )
    _emit(rows, PREDICTION_COLUMNS, out, f"version={__version__}")


@cli.command(name="frame-potential")
@click.option("--k", "k", type=int, required=True, help="Frame-potential order.")
@click.option("--d", "d", type=int, default=2, show_default=True, help="Local dimension.")
@click.option("--r", "r", type=int, default=None, help="Overlap exponent, chi = d^r.")
@click.option("--n", "n", type=int, default=1, show_default=True, help="Gates per staircase.")
@click.option("--chi-list", callback=_int_list, default=None, help="Comma-separated bond dimensions.")
@click.option("--samples", type=int, default=0, show_default=True, help="Monte Carlo pairs (0 = none).")
@click.option("--seed", type=int, default=None, help="Monte Carlo seed (default: settings).")
@click.option("--out", type=click.Path(), default=None, help="CSV file (default: stdout).")
def frame_potential(k, d, r, n, chi_list, samples, seed, out):
    """RMPU frame potential: ladder transfer, asymptotic form and optional Monte Carlo."""
    settings = get_settings()
    seed = settings.monte_carlo.seed if seed is None else seed
    rows = []
    with _library_errors():
        for chi in _chis(d, r, chi_list):
            geom = RmpuGeometry.from_chi(d, chi, n)
            row = {
                "k": k,
                "d": d,
                "n": n,
                "chi": chi,
                "D": geom.D,
                "value": frame_potential_rmpu_exact(geom, k, cap=settings.caps.transfer, exact_cap=settings.caps.exact_transfer),
                "asymptotic": frame_potential_rmpu_asymptotic(geom, k),
                "haar_value": frame_potential_haar(k),
                "mc_mean": None,
                "mc_stderr": None,
            }
            if samples:
                config = EnsembleConfig(geometry=geom, seed=seed, samples=samples)
                record = mc_frame_potential(config, k, workers=settings.monte_carlo.workers, cap=settings.caps.dense_dim)
                row.update(mc_mean=record.mean, mc_stderr=record.stderr)
            rows.append(row)
    columns = ("k", "d", "n", "chi", "D", "value", "asymptotic", "haar_value", "mc_mean", "mc_stderr")
    _emit(rows, columns, out, f"version={__version__},seed={seed}")


@cli.command(name="verify-identity")
@click.option("--dim", "dim", type=int, default=4, show_default=True, help="Dimension D (power of two).")
@click.option("--k", "k", type=int, default=2, show_default=True, help="OTOC order.")
@click.option("--frame-potential", "frame_value", type=float, default=None,
              help="Right-hand-side frame potential (default k!).")
def verify_identity(dim: int, k: int, frame_value: Optional[float]):
    """Check the Pauli-sum frame-potential identity exhaustively (exit 1 on failure)."""
    with _library_errors():
        report = verify_frame_otoc_identity(dim, k, frame_potential=frame_value)
    click.echo(report.model_dump_json(indent=2))
    if not report.passed:
        sys.exit(1)


# ══════════════════════════════════════════════════════════════════════
# MONTE CARLO
# ══════════════════════════════════════════════════════════════════════


@cli.command(name="otoc-mc")
@click.option("--k", "k", type=int, required=True, help="OTOC order.")
@click.option("--observable-a", type=click.Path(exists=True), required=True, help="Observable A as JSON.")
@click.option("--observable-b", type=click.Path(exists=True), required=True, help="Observable B as JSON.")
@click.option("--dim", "dim", type=int, default=None, help="Global Haar on dimension D.")
@click.option("--d", "d", type=int, default=2, show_default=True, help="Local dimension (RMPU).")
@click.option("--r", "r", type=int, default=1, show_default=True, help="Overlap exponent (RMPU).")
@click.option("--n", "n", type=int, default=1, show_default=True, help="Gates per staircase (RMPU).")
@click.option("--variant", type=click.Choice([v.value for v in Variant]), default=Variant.STAIRCASE.value,
              show_default=True)
@click.option("--orientation", type=click.Choice([o.value for o in Orientation]),
              default=Orientation.ASCENDING.value, show_default=True)
@click.option("--samples", type=int, default=None, help="Samples (default: settings).")
@click.option("--seed", type=int, default=None, help="Seed (default: settings).")
@click.option("--workers", type=int, default=None, help="Worker threads (default: settings).")
@click.option("--out", type=click.Path(), default=None, help="CSV file (default: stdout).")
def otoc_mc(k, observable_a, observable_b, dim, d, r, n, variant, orientation, samples, seed, workers, out):
    """Monte Carlo OTOC over the global Haar or an RMPU ensemble."""
    mc = get_settings().monte_carlo
    samples = samples or mc.samples
    seed = mc.seed if seed is None else seed
    with _library_errors():
        A = ObservableSpec.from_json(observable_a)
        B = ObservableSpec.from_json(observable_b)
        if dim is not None:
            config = EnsembleConfig.global_haar(dim, seed, samples)
        else:
            geometry = RmpuGeometry(d=d, r=r, n=n, variant=Variant(variant), orientation=Orientation(orientation))
            config = EnsembleConfig(geometry=geometry, seed=seed, samples=samples)
        record = mc_otoc(config, A, B, k, workers=workers or mc.workers, cap=get_settings().caps.dense_dim)
    _emit([record.to_row()], ESTIMATE_COLUMNS, out, f"version={__version__},seed={seed}")


# ══════════════════════════════════════════════════════════════════════
# EXPERIMENTS
# ══════════════════════════════════════════════════════════════════════


@cli.command(name="table-report")
@click.argument("table", type=click.Choice(["table1_row1", "table1_row2", "table2"]))
@click.option("--max-k", type=int, default=DEFAULT_REPORT_MAX_K, show_default=True, help="Largest k for table2.")
def table_report_cmd(table: str, max_k: int):
    """Recompute a reference table next to its stored values (exit 1 on mismatch)."""
    with _library_errors():
        report = table_report(table, max_k=max_k)
    click.echo(report.format())
    if not report.passed:
        sys.exit(1)


@cli.command(name="run")
@click.option("--manifest", "manifest_path", type=click.Path(), required=True, help="Experiment manifest (JSON).")
@click.option("--out", type=click.Path(), default=None, help="Output directory (default: manifest or settings).")
@click.option("--workers", type=int, default=1, show_default=True, help="Grid points evaluated in parallel.")
def run_cmd(manifest_path: str, out: Optional[str], workers: int):
    """Evaluate a manifest; exit 0 iff every requested check passes.

    An invalid manifest prints an error JSON and exits with status 2.
    """
    try:
        manifest = load_manifest(manifest_path)
    except ManifestError as exc:
        click.echo(json.dumps({"error": str(exc.args[0]), "details": exc.details}, indent=2, sort_keys=True))
        sys.exit(2)
    with _library_errors():
        summary = run_manifest(manifest, out_dir=out, workers=workers, progress=_EchoProgress())
    click.echo(summary.model_dump_json(indent=2))
    if not summary.passed:
        sys.exit(1)


@cli.command(name="config")
def config_cmd():
    """Show the current configuration."""
    click.echo(get_settings().model_dump_json(indent=2))


# ── Entry point ──────────────────────────────────────────────────────


def main() -> None:
    """Entry point for the ``free-otoc`` console script."""
    cli()


if __name__ == "__main__":
    main()
