"""
Diff live enumeration against the published tables.

Mismatches are data: every (key, order, metric) check is recorded with both
values and the run continues.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

from loguru import logger
from tqdm import tqdm

from bm_census.catalog import (
    THEOREM_EQUALITIES,
    CatalogEntry,
    CatalogScope,
    ExpectedCounts,
    list_entries,
    parastrophe_partner,
)
from bm_census.enumeration import (
    CountReport,
    Engine,
    SearchConfig,
    count_classes,
    count_satisfying,
    naive_search,
)
from bm_census.magma import ClassMode

CROSS_CHECK_MAX_ORDER = 3
TABLE2_ORDERS = (2, 3, 4)


class VerifyScope(str, Enum):
    TABLE1 = "table1"
    TABLE2 = "table2"
    THEOREM = "theorem"
    ALL = "all"


class Metric(str, Enum):
    RAW = "raw"
    ISO = "iso"
    ISO_ANTI = "iso_anti"
    PARASTROPHE = "parastrophe"


@dataclass(frozen=True)
class VerificationDiff:
    key: str
    order: int | None  # None for symbolic checks
    metric: Metric
    expected: int | str | None
    computed: int | str | None
    erratum: bool = False

    @property
    def match(self) -> bool:
        return self.expected == self.computed


@dataclass(frozen=True)
class EngineDisagreement:
    key: str
    order: int
    pruned: int
    naive: int


@dataclass
class VerificationRun:
    diffs: list[VerificationDiff] = field(default_factory=list)
    disagreements: list[EngineDisagreement] = field(default_factory=list)

    @property
    def mismatches(self) -> list[VerificationDiff]:
        return [d for d in self.diffs if not d.match]

    def passed(self, strict: bool = False) -> bool:
        """All checks match (confirmed errata count as matches unless strict)."""
        if self.disagreements:
            return False
        return all(d.erratum and not strict for d in self.mismatches)


def _metric_value(counts: ExpectedCounts | None, metric: Metric) -> int | None:
    if counts is None:
        return None
    return getattr(counts, metric.value)


def _diff(
    entry: CatalogEntry, order: int, metric: Metric, computed: int
) -> VerificationDiff:
    expected = _metric_value(entry.expected_counts.get(order), metric)
    corrected = _metric_value(entry.errata.get(order), metric)
    erratum = expected != computed and corrected is not None and corrected == computed
    return VerificationDiff(entry.key, order, metric, expected, computed, erratum)


def _cross_check(
    entry: CatalogEntry, report: CountReport, cfg: SearchConfig, run: VerificationRun
):
    if report.order > CROSS_CHECK_MAX_ORDER:
        return
    naive = naive_search(entry.identity, report.order, cfg).raw_count
    if naive != report.raw_count:
        logger.error(
            f"❌ Engines disagree on {entry.key} @ order {report.order}: "
            f"pruned {report.raw_count}, naive {naive}"
        )
        run.disagreements.append(
            EngineDisagreement(entry.key, report.order, report.raw_count, naive)
        )


def verify_table1(
    cfg: SearchConfig, run: VerificationRun, cross_check: bool = False
) -> VerificationRun:
    """Raw, iso and iso/anti counts of F1..F60 at order 2."""
    entries = list_entries(CatalogScope.CLASSICAL)
    logger.info(f"🚀 Verifying the classical table: {len(entries)} identities × 3 metrics")
    for entry in tqdm(entries, desc="table1", disable=not cfg.progress):
        report = count_classes(entry.identity, 2, (ClassMode.ISO, ClassMode.ISO_ANTI), cfg)
        run.diffs.append(_diff(entry, 2, Metric.RAW, report.raw_count))
        run.diffs.append(_diff(entry, 2, Metric.ISO, report.iso_classes))
        run.diffs.append(_diff(entry, 2, Metric.ISO_ANTI, report.iso_anti_classes))
        if cross_check:
            _cross_check(entry, report, cfg, run)
    return run


def verify_table2(
    cfg: SearchConfig, run: VerificationRun, max_order: int = 3, cross_check: bool = False
) -> VerificationRun:
    """Raw counts of the generalized identities at orders 2..max_order."""
    orders = [n for n in TABLE2_ORDERS if n <= max_order]
    if not orders:
        raise ValueError(
            f"❌ The generalized table covers orders {TABLE2_ORDERS}, got max order {max_order}"
        )
    entries = list_entries(CatalogScope.GENERALIZED)
    for order in orders:
        logger.info(f"🚀 Verifying the generalized table at order {order}: {len(entries)} rows")
        if order >= 4 and cfg.engine is Engine.NAIVE:
            logger.warning("⚠️ Switching to the pruned engine for order 4")
            order_cfg = replace(cfg, engine=Engine.PRUNED)
        else:
            order_cfg = cfg
        for entry in tqdm(entries, desc=f"table2 n={order}", disable=not cfg.progress):
            report = count_satisfying(entry.identity, order, order_cfg)
            run.diffs.append(_diff(entry, order, Metric.RAW, report.raw_count))
            if cross_check:
                _cross_check(entry, report, cfg, run)
    return run


def verify_theorem(run: VerificationRun) -> VerificationRun:
    """The published (F_i)* = F_j equalities, checked symbolically."""
    logger.info(f"🚀 Verifying {len(THEOREM_EQUALITIES)} parastrophe equalities")
    for i, j in THEOREM_EQUALITIES:
        key = f"F{i}"
        run.diffs.append(
            VerificationDiff(key, None, Metric.PARASTROPHE, f"F{j}", parastrophe_partner(key))
        )
    return run


def run_verification(
    scope: VerifyScope = VerifyScope.ALL,
    max_order: int = 3,
    cfg: SearchConfig = SearchConfig(),
    cross_check: bool = False,
) -> VerificationRun:
    run = VerificationRun()
    if scope in (VerifyScope.TABLE1, VerifyScope.ALL):
        verify_table1(cfg, run, cross_check)
    if scope in (VerifyScope.TABLE2, VerifyScope.ALL):
        verify_table2(cfg, run, max_order, cross_check)
    if scope in (VerifyScope.THEOREM, VerifyScope.ALL):
        verify_theorem(run)

    errata = [d for d in run.mismatches if d.erratum]
    unexplained = len(run.mismatches) - len(errata)
    if unexplained or run.disagreements:
        logger.warning(
            f"⚠️ {len(run.diffs)} checks: {unexplained} mismatches, "
            f"{len(errata)} known errata, {len(run.disagreements)} engine disagreements"
        )
    else:
        logger.success(f"✅ {len(run.diffs)} checks match ({len(errata)} known errata)")
    return run
