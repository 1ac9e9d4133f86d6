"""Reproduce the published per-weight sample counts.

Four rows compare M_i / n_max^2 with the published values at a relative
tolerance (published numbers are rounded). The prior-work row only has to
stay below its published upper bound.
"""

import logging

from pydantic import BaseModel, ConfigDict

from ticket.bounds.propagation import BoundInputs, SpectralMode
from ticket.bounds.sampling_bounds import BoundReport, compute_bound_report
from ticket.config.experiments import ReproConfig
from ticket.network.core import Architecture

logger = logging.getLogger(__name__)


class ReproRow(BaseModel):
    """One computed-versus-published comparison."""

    model_config = ConfigDict(frozen=True)

    name: str
    computed: float
    reported: float
    comparison: str
    passed: bool


class ReproReport(BaseModel):
    """All comparison rows of the headline setting."""

    model_config = ConfigDict(frozen=True)

    n_max: int
    depth: int
    eps: float
    delta: float
    tolerance: float
    rows: list[ReproRow]

    @property
    def all_passed(self) -> bool:
        return all(row.passed for row in self.rows)

    def to_table(self) -> str:
        """Plain-text table for the terminal."""
        lines = [f"{'row':<14} {'computed':>14} {'reported':>14}  result"]
        for row in self.rows:
            lines.append(
                f"{row.name:<14} {row.computed:>14.6g} {row.reported:>14.6g}  "
                f"{'pass' if row.passed else 'FAIL'} ({row.comparison})"
            )
        return "\n".join(lines)


def _within(name: str, computed: float, reported: float, tolerance: float) -> ReproRow:
    passed = abs(computed - reported) <= tolerance * reported
    return ReproRow(
        name=name,
        computed=computed,
        reported=reported,
        comparison=f"within {tolerance:.0%}",
        passed=passed,
    )


def repro_reports(cfg: ReproConfig) -> dict[SpectralMode, BoundReport]:
    """Bound reports of the headline setting in unit and worst-case spectral mode."""
    arch = Architecture.uniform([cfg.n_max] * (cfg.depth + 1))
    return {
        mode: compute_bound_report(
            BoundInputs(
                arch=arch,
                eps=cfg.eps,
                delta=cfg.delta,
                w_max=cfg.w_max,
                f_max=cfg.f_max,
                spectral_mode=mode,
            )
        )
        for mode in (SpectralMode.UNIT, SpectralMode.WORST)
    }


def repro_examples(cfg: ReproConfig | None = None) -> ReproReport:
    """Evaluate the headline rows: thm1/recycle in unit/worst mode and the prior-work bound."""
    cfg = cfg or ReproConfig()
    reports = repro_reports(cfg)
    unit, worst = reports[SpectralMode.UNIT], reports[SpectralMode.WORST]
    reported = cfg.reported
    malach = float(unit.malach_per_weight)
    rows = [
        _within("thm1-unit", unit.per_weight_thm1, reported.thm1_unit, cfg.tolerance),
        _within("thm1-worst", worst.per_weight_thm1, reported.thm1_worst, cfg.tolerance),
        _within("recycle-unit", unit.per_weight_recycle, reported.recycle_unit, cfg.tolerance),
        _within("recycle-worst", worst.per_weight_recycle, reported.recycle_worst, cfg.tolerance),
        ReproRow(
            name="malach",
            computed=malach,
            reported=reported.malach,
            comparison="at most",
            passed=malach <= reported.malach,
        ),
    ]
    report = ReproReport(
        n_max=cfg.n_max,
        depth=cfg.depth,
        eps=cfg.eps,
        delta=cfg.delta,
        tolerance=cfg.tolerance,
        rows=rows,
    )
    for row in rows:
        logger.debug("%s: computed %.6g, reported %.6g", row.name, row.computed, row.reported)
    return report
