"""Density and zero-pattern statistics of the full-rank census.

Splits the 20,160 full-rank words by ones-count and expressibility class,
scores the one-line classifier "expressible iff ones <= cutoff", and
compares the zero counts of the two classes with two-sample t statistics.
Counts and sums are integers throughout; floating point appears only in
the final divisions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import gf2
from .search import ExpressibilityMap, RankTable

FULL_RANK = 4
N_CELLS = 16

LABEL_EXPRESSIBLE = "expressible"
LABEL_COUNTEREXAMPLE = "counterexample"


class DegenerateSample(ValueError):
    """Both sample variances are zero; the t statistic is undefined."""


def _ones_per_word() -> np.ndarray:
    words = np.arange(gf2.WORD_COUNT, dtype=np.uint32)
    counts = np.zeros(gf2.WORD_COUNT, dtype=np.int64)
    for b in range(N_CELLS):
        counts += (words >> b) & 1
    return counts


@dataclass(frozen=True)
class DensityTable:
    """Per ones-count (0..16) matrix counts for each class."""

    expressible: np.ndarray  # (17,) int64
    counterexample: np.ndarray  # (17,) int64

    def totals(self) -> tuple[int, int]:
        return int(self.expressible.sum()), int(self.counterexample.sum())

    def bin_total(self, ones: int) -> int:
        return int(self.expressible[ones] + self.counterexample[ones])

    def expressible_fraction(self, ones: int) -> float:
        n = self.bin_total(ones)
        if n == 0:
            raise ValueError(f"no full-rank matrices with {ones} ones")
        return int(self.expressible[ones]) / n


@dataclass(frozen=True)
class ClassStats:
    label: str
    n: int
    mean_zeros: float
    variance_zeros: float  # sample variance, n - 1 in the denominator


def density_table(emap: ExpressibilityMap, table: RankTable) -> DensityTable:
    ones = _ones_per_word()
    full = table.ranks == FULL_RANK
    expr = np.bincount(ones[full & emap.bits], minlength=N_CELLS + 1)
    cex = np.bincount(ones[full & ~emap.bits], minlength=N_CELLS + 1)
    return DensityTable(expr.astype(np.int64), cex.astype(np.int64))


def threshold_accuracy(dt: DensityTable, cutoff: int) -> float:
    """Accuracy of "expressible iff ones <= cutoff" over all full-rank words."""
    if not 0 <= cutoff <= N_CELLS:
        raise ValueError(f"cutoff out of range: {cutoff}")
    bins = np.arange(N_CELLS + 1)
    correct = int(dt.expressible[bins <= cutoff].sum()) + int(
        dt.counterexample[bins > cutoff].sum()
    )
    total = sum(dt.totals())
    return correct / total


def accuracy_by_cutoff(dt: DensityTable) -> list[float]:
    return [threshold_accuracy(dt, cut) for cut in range(N_CELLS + 1)]


def best_cutoff(dt: DensityTable) -> int:
    accs = accuracy_by_cutoff(dt)
    return int(np.argmax(accs))


def _class_stats(label: str, zeros: np.ndarray) -> ClassStats:
    n = int(len(zeros))
    s = int(zeros.sum())
    ss = int((zeros.astype(np.int64) ** 2).sum())
    mean = Fraction(s, n)
    var = (Fraction(ss) - Fraction(s * s, n)) / (n - 1)
    return ClassStats(label=label, n=n, mean_zeros=float(mean), variance_zeros=float(var))


def zero_stats(emap: ExpressibilityMap, table: RankTable) -> tuple[ClassStats, ClassStats]:
    """Zero-count mean and variance for each class, exact until the last division."""
    zeros = N_CELLS - _ones_per_word()
    full = table.ranks == FULL_RANK
    return (
        _class_stats(LABEL_EXPRESSIBLE, zeros[full & emap.bits]),
        _class_stats(LABEL_COUNTEREXAMPLE, zeros[full & ~emap.bits]),
    )


def welch_t(a: ClassStats, b: ClassStats) -> float:
    """Two-sample t with unpooled variances."""
    if a.n < 2 or b.n < 2:
        raise ValueError("need n >= 2 in both samples")
    if a.variance_zeros == 0 and b.variance_zeros == 0:
        raise DegenerateSample("both variances are zero")
    se = np.sqrt(a.variance_zeros / a.n + b.variance_zeros / b.n)
    return (a.mean_zeros - b.mean_zeros) / se


def pooled_t(a: ClassStats, b: ClassStats) -> float:
    """Classic two-sample t with the pooled variance estimate."""
    if a.n < 2 or b.n < 2:
        raise ValueError("need n >= 2 in both samples")
    if a.variance_zeros == 0 and b.variance_zeros == 0:
        raise DegenerateSample("both variances are zero")
    pooled = ((a.n - 1) * a.variance_zeros + (b.n - 1) * b.variance_zeros) / (
        a.n + b.n - 2
    )
    se = np.sqrt(pooled * (1 / a.n + 1 / b.n))
    return (a.mean_zeros - b.mean_zeros) / se


def dataset_rows(emap: ExpressibilityMap, table: RankTable):
    """Yield (cells, label) for every full-rank word in ascending order.

    cells are the 16 entries in row-major (r, c) order, matching the
    m00..m33 header of dataset.csv.
    """
    full_words = np.where(table.ranks == FULL_RANK)[0]
    for w in full_words:
        cells = gf2.to_rows(int(w)).reshape(16)
        label = LABEL_EXPRESSIBLE if emap.bits[w] else LABEL_COUNTEREXAMPLE
        yield cells, label


DATASET_HEADER = [f"m{r}{c}" for r in range(4) for c in range(4)] + ["label"]


def write_dataset(path, emap: ExpressibilityMap, table: RankTable) -> int:
    """Write dataset.csv; returns the number of data rows."""
    n = 0
    with open(path, "w", newline="") as fh:
        fh.write(",".join(DATASET_HEADER) + "\n")
        for cells, label in dataset_rows(emap, table):
            fh.write(",".join(str(int(x)) for x in cells) + f",{label}\n")
            n += 1
    return n
