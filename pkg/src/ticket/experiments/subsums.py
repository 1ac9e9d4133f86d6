"""Gap analysis of sorted samples and of their sub-sums.

Fifteen log-uniform samples already have 2^15 sub-sums that usually cover
[0, 1] more evenly than a thousand sorted uniform samples do. The table lists
every value with the distance to the next one; the last row's gap is 0, so
the gaps add up to max - min.
"""

import io
import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import TextIO

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field

from ticket.decomposition.grd import GrdParams
from ticket.errors import ParameterError, ResourceError
from ticket.sampling.hyperbolic import HyperbolicDist, draw_pos
from ticket.sampling.streams import generator

logger = logging.getLogger(__name__)

MAX_SUBSUM_COUNT = 24
CSV_HEADER = "value,gap"


class SubsumMode(str, Enum):
    """Which point set is analysed."""

    UNIFORM_SORTED = "uniform_sorted_1000"
    HYPERBOLIC_SUBSUMS = "hyperbolic_subsums_15"
    UNIFORM_SUBSUMS = "uniform_subsums_15"

    @property
    def enumerates(self) -> bool:
        """True for the modes that enumerate all sub-sums."""
        return self is not SubsumMode.UNIFORM_SORTED

    @property
    def default_count(self) -> int:
        return 1000 if self is SubsumMode.UNIFORM_SORTED else 15


class SubsumConfig(BaseModel):
    """What to sample and how many.

    eps defaults to 1.5 w_max / 1.5^count for the hyperbolic mode, the
    accuracy whose interval count equals the sample count.
    """

    model_config = ConfigDict(frozen=True)

    mode: SubsumMode
    count: int = Field(ge=1)
    seed: int = Field(default=0, ge=0)
    eps: float | None = Field(default=None, gt=0)
    w_max: float = Field(default=1.0, gt=0)

    @classmethod
    def for_mode(cls, mode: SubsumMode, seed: int = 0, count: int | None = None) -> "SubsumConfig":
        """Config with the mode's default count."""
        return cls(mode=mode, count=count or mode.default_count, seed=seed)

    def hyperbolic_eps(self) -> float:
        """Accuracy used by the hyperbolic mode."""
        if self.eps is not None:
            return self.eps
        return 1.5 * self.w_max / 1.5**self.count


@dataclass
class SubsumTable:
    """Sorted values, gaps to the next value and the covered range."""

    mode: SubsumMode
    samples: NDArray[np.float64]
    values: NDArray[np.float64]
    gaps: NDArray[np.float64]
    covered_lo: float
    covered_hi: float

    @property
    def max_gap_covered(self) -> float:
        """Largest gap between consecutive values inside [covered_lo, covered_hi]."""
        inside = self.values[(self.values >= self.covered_lo) & (self.values <= self.covered_hi)]
        if inside.size < 2:
            return 0.0
        return float(np.max(np.diff(inside)))

    def to_csv(self) -> str:
        """CSV text with header value,gap, 17 significant digits and LF endings."""
        buffer = io.StringIO()
        self.save(buffer)
        return buffer.getvalue()

    def save(self, stream: TextIO) -> None:
        """Write the CSV rows to an open text stream."""
        np.savetxt(
            stream,
            np.column_stack((self.values, self.gaps)),
            fmt="%.17g",
            delimiter=",",
            newline="\n",
            header=CSV_HEADER,
            comments="",
        )


def draw_subsum_samples(cfg: SubsumConfig) -> NDArray[np.float64]:
    """The cfg.count base samples of the configured mode."""
    if cfg.mode is SubsumMode.HYPERBOLIC_SUBSUMS:
        params = GrdParams.create(cfg.hyperbolic_eps(), cfg.w_max)
        dist = HyperbolicDist(params.sample_lo, params.sample_hi)
        return draw_pos(dist, generator(cfg.seed, "subsums.hyperbolic"), cfg.count)
    return generator(cfg.seed, f"subsums.{cfg.mode.value}").random(cfg.count)


def enumerate_subsums(samples: NDArray[np.float64]) -> NDArray[np.float64]:
    """All 2^len(samples) subset sums, unsorted; the empty sum is included."""
    sums = np.zeros(1)
    for v in np.asarray(samples, dtype=np.float64):
        sums = np.concatenate((sums, sums + v))
    return sums


def subsum_analysis(
    cfg: SubsumConfig, samples: NDArray[np.float64] | None = None
) -> SubsumTable:
    """Sorted values and consecutive gaps for the configured mode.

    Args:
        cfg: Mode, count and seed.
        samples: Base samples to use instead of drawing them.

    Raises:
        ResourceError: If a sub-sum mode asks for more than 2^24 sums.
        ParameterError: If explicit samples disagree with cfg.count.
    """
    if cfg.mode.enumerates and cfg.count > MAX_SUBSUM_COUNT:
        raise ResourceError(
            f"count={cfg.count} would enumerate 2^{cfg.count} sub-sums; "
            f"the limit is {MAX_SUBSUM_COUNT}"
        )
    if samples is None:
        samples = draw_subsum_samples(cfg)
    samples = np.asarray(samples, dtype=np.float64)
    if samples.shape != (cfg.count,):
        raise ParameterError(f"Expected {cfg.count} samples, got shape {samples.shape}", "count")

    if cfg.mode.enumerates:
        values = np.sort(enumerate_subsums(samples))
        half = cfg.count // 2
        covered_lo = float(np.sum(np.sort(samples)[:half]))
        covered_hi = cfg.w_max
    else:
        values = np.sort(samples)
        covered_lo, covered_hi = float(values[0]), float(values[-1])

    gaps = np.zeros_like(values)
    gaps[:-1] = np.diff(values)
    table = SubsumTable(
        mode=cfg.mode,
        samples=samples,
        values=values,
        gaps=gaps,
        covered_lo=covered_lo,
        covered_hi=covered_hi,
    )
    logger.info(
        "%s: %d values, max gap %.3g over [%.3g, %.3g]",
        cfg.mode.value,
        values.size,
        table.max_gap_covered,
        covered_lo,
        covered_hi,
    )
    return table


def write_subsum_csv(table: SubsumTable, path: str | Path) -> Path:
    """Write the table as CSV and return its path."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as f:
        table.save(f)
    return path
