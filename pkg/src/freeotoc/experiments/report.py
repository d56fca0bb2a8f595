"""Side-by-side reproduction of the bundled reference tables.

``table2`` compares the NC(k) 2-chain and genus-one counts with the stored
integers.  ``table1_row2`` compares the ladder frame potential with the
large-n deviation formula, and ``table1_row1`` fits the chi exponent of
the finite-trace OTOC residual for a single-site Pauli Z.
"""
from __future__ import annotations

import logging
import time
from fractions import Fraction
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict

from ..combinatorics.ncposet import count_genus_one_pairs, count_multichains
from ..config.defaults import DEFAULT_PAIR_COUNTING_CAP, DEFAULT_REPORT_MAX_K, DEFAULT_SUBLEADING_RTOL
from ..config.loader import load_reference_section, load_table2
from ..core.exceptions import DomainError
from ..core.models import RmpuGeometry
from ..freeprob.freeness import free_otoc_prediction
from ..mcsim.observables import make_observable
from ..predict.fits import fit_power_law
from ..predict.frame import frame_potential_deviation, frame_potential_haar, frame_potential_rmpu_asymptotic
from ..predict.rmpu import rmpu_otoc_exact
from ..predict.subleading import subleading_coeff_rmpu

logger = logging.getLogger(__name__)

TableName = Literal["table2", "table1_row1", "table1_row2"]


class ReportRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    label: str
    reference: float
    computed: float
    deviation: float
    passed: bool


class TableReport(BaseModel):
    """Reference value, computed value and relative deviation per row."""

    model_config = ConfigDict(frozen=True)

    table: str
    rows: list[ReportRow]

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)

    def format(self) -> str:
        width = max([len(r.label) for r in self.rows] + [5])
        lines = [f"{'row':<{width}}  {'reference':>16}  {'computed':>16}  {'deviation':>10}  ok"]
        for r in self.rows:
            lines.append(
                f"{r.label:<{width}}  {r.reference:>16.10g}  {r.computed:>16.10g}  {r.deviation:>10.3g}  {'✓' if r.passed else '✗'}"
            )
        return "\n".join(lines)


def _relative(computed: Any, reference: Any) -> float:
    if reference == 0:
        return abs(float(computed))
    return abs(float(computed) - float(reference)) / abs(float(reference))


def _table2(max_k: int) -> list[ReportRow]:
    rows = []
    for ref in load_table2():
        if ref.k > max_k:
            break
        columns = [(0, ref.nc2_g0, count_multichains(ref.k, 2))]
        if ref.k <= DEFAULT_PAIR_COUNTING_CAP:
            columns.append((1, ref.nc2_g1, count_genus_one_pairs(ref.k)))
        for genus, expected, count in columns:
            rows.append(
                ReportRow(
                    label=f"k={ref.k} genus {genus}",
                    reference=expected,
                    computed=count,
                    deviation=_relative(count, expected),
                    passed=count == expected,
                )
            )
    return rows


def _table1_row2() -> list[ReportRow]:
    section = load_reference_section("table1_row2")
    k, d, n, chi = section["k"], section["d"], section["n"], section["chi"]
    tolerance = float(section["tolerance"])
    geom = RmpuGeometry.from_chi(d, chi, n)
    computed = frame_potential_deviation(geom, k)
    large_n = Fraction(k * (k - 1), 2) * (n * (1 - Fraction(1, d * d)) - 1) / (chi * chi)
    with_tail = frame_potential_rmpu_asymptotic(geom, k) / frame_potential_haar(k) - 1
    label = f"k={k} d={d} n={n} chi={chi}"
    return [
        ReportRow(
            label=f"{label} large-n formula",
            reference=float(large_n),
            computed=float(computed),
            deviation=_relative(computed, large_n),
            passed=_relative(computed, large_n) <= tolerance,
        ),
        ReportRow(
            label=f"{label} asymptotic",
            reference=float(with_tail),
            computed=float(computed),
            deviation=_relative(computed, with_tail),
            passed=_relative(computed, with_tail) <= tolerance,
        ),
    ]


def _table1_row1() -> list[ReportRow]:
    section = load_reference_section("table1_row1")
    k, d, n = section["k"], section["d"], section["n"]
    chis = list(section["chi"])
    z = make_observable("pauli_string", {"letters": "Z"}, (1, 1), d=d).moments(k)
    free = free_otoc_prediction(z, z, k)
    coeff = subleading_coeff_rmpu(z, z, n, d, k)
    if coeff == 0:
        raise DomainError("the chi^-2 coefficient vanishes for this observable")

    rows, residuals = [], []
    for chi in chis:
        residual = rmpu_otoc_exact(z, z, RmpuGeometry.from_chi(d, chi, n), k) - free
        predicted = coeff / (chi * chi)
        residuals.append(abs(float(residual)))
        rows.append(
            ReportRow(
                label=f"chi={chi} residual",
                reference=float(predicted),
                computed=float(residual),
                deviation=_relative(residual, predicted),
                passed=_relative(residual, predicted) <= DEFAULT_SUBLEADING_RTOL,
            )
        )
    fit = fit_power_law(chis, residuals)
    expected = float(section["exponent"])
    rows.append(
        ReportRow(
            label="fitted chi exponent",
            reference=expected,
            computed=fit.exponent,
            deviation=abs(fit.exponent - expected),
            passed=fit.consistent_with(expected, float(section["exponent_tolerance"])),
        )
    )
    return rows


def table_report(table: TableName, max_k: int = DEFAULT_REPORT_MAX_K) -> TableReport:
    """Recompute one reference table.

    Args:
        table: ``table2``, ``table1_row1`` or ``table1_row2``.
        max_k: Largest k reproduced for ``table2``.
    """
    started = time.perf_counter()
    if table == "table2":
        rows = _table2(max_k)
    elif table == "table1_row2":
        rows = _table1_row2()
    elif table == "table1_row1":
        rows = _table1_row1()
    else:
        raise DomainError(f"unknown table {table!r}")
    report = TableReport(table=table, rows=rows)
    logger.info("table report %s: %d rows in %.3fs", table, len(rows), time.perf_counter() - started)
    if not report.passed:
        logger.warning("table report %s has %d failing rows", table, sum(not r.passed for r in rows))
    return report
