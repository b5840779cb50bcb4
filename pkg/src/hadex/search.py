"""Exhaustive Hadamard-product search over all 4x4 GF(2) matrices.

Three phases: classify all 65,536 words by rank, AND every ordered pair
of rank-2 words and mark the full-rank products as expressible, then read
off the full-rank words never produced as counterexamples.

Restricting the pair enumeration to rank-2 factors loses nothing: a
factor of rank <= 1 caps the product rank at 1 * 2 = 2 < 4, so it can
never contribute a full-rank product.  The unrestricted enumeration over
all rank <= 2 factors is available as a test oracle.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import gf2

_CHUNK = 1024


class NotFullRank(ValueError):
    """Raised when expressibility is queried for a matrix of rank < 4."""


@dataclass(frozen=True)
class RankTable:
    """GF(2) rank of every 16-bit word, indexed by word."""

    ranks: np.ndarray  # (65536,) uint8

    def histogram(self) -> tuple[int, ...]:
        return tuple(int(n) for n in np.bincount(self.ranks, minlength=5))

    def words_of_rank(self, r: int) -> np.ndarray:
        return np.where(self.ranks == r)[0].astype(np.uint16)


@dataclass(frozen=True)
class ExpressibilityMap:
    """Marks which words were produced as rank-2 x rank-2 Hadamard products."""

    bits: np.ndarray  # (65536,) bool

    def contains(self, m: gf2.BitMatrix4) -> bool:
        return bool(self.bits[m])

    def count(self) -> int:
        return int(self.bits.sum())

    def words(self) -> np.ndarray:
        return np.where(self.bits)[0]


@dataclass(frozen=True)
class Witnesses:
    """One factor pair per expressible word; -1 where none was recorded."""

    factor_a: np.ndarray  # (65536,) int32
    factor_b: np.ndarray  # (65536,) int32


@dataclass(frozen=True)
class SearchReport:
    rank_histogram: tuple[int, ...]
    expressible_count: int
    counterexample_count: int
    elapsed_s: float


def build_rank_table() -> RankTable:
    """Phase 1: rank of every one of the 2^16 words."""
    ranks = np.fromiter(
        (gf2.rank_gf2(m) for m in range(gf2.WORD_COUNT)),
        dtype=np.uint8,
        count=gf2.WORD_COUNT,
    )
    return RankTable(ranks)


def _scan_chunk(factors_a: np.ndarray, factors_b: np.ndarray, ranks: np.ndarray) -> np.ndarray:
    """AND one outer chunk against all inner factors; return a private map."""
    bits = np.zeros(gf2.WORD_COUNT, dtype=bool)
    for i0 in range(0, len(factors_a), _CHUNK):
        products = factors_a[i0 : i0 + _CHUNK, None] & factors_b[None, :]
        bits[products[ranks[products] == 4]] = True
    return bits


def _factor_words(table: RankTable, include_low_rank: bool) -> np.ndarray:
    if include_low_rank:
        return np.where(table.ranks <= 2)[0].astype(np.uint16)
    return table.words_of_rank(2)


def _finish(table: RankTable, bits: np.ndarray, t0: float) -> tuple[ExpressibilityMap, SearchReport]:
    emap = ExpressibilityMap(bits)
    hist = table.histogram()
    n_expr = emap.count()
    report = SearchReport(
        rank_histogram=hist,
        expressible_count=n_expr,
        counterexample_count=hist[4] - n_expr,
        elapsed_s=time.perf_counter() - t0,
    )
    return emap, report


def run_search(
    table: RankTable,
    jobs: int = 1,
    include_low_rank_factors: bool = False,
) -> tuple[ExpressibilityMap, SearchReport]:
    """Phase 2: mark every full-rank Hadamard product of two rank-2 words.

    ``jobs`` partitions the outer factor range; each worker fills a private
    65,536-entry map and the results are merged by OR, so the output is
    identical for any thread count.  ``include_low_rank_factors`` widens
    the enumeration to all rank <= 2 factors; it exists as a test oracle
    for the rank-cutoff argument.
    """
    t0 = time.perf_counter()
    factors = _factor_words(table, include_low_rank_factors)
    ranks = table.ranks

    if jobs <= 1:
        bits = _scan_chunk(factors, factors, ranks)
    else:
        splits = np.array_split(factors, jobs * 4)
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            partials = pool.map(lambda part: _scan_chunk(part, factors, ranks), splits)
            bits = np.zeros(gf2.WORD_COUNT, dtype=bool)
            for part in partials:
                bits |= part

    return _finish(table, bits, t0)


def run_search_recording(
    table: RankTable,
) -> tuple[ExpressibilityMap, SearchReport, Witnesses]:
    """Like run_search, additionally recording one witness pair per product.

    Scans single-threaded in ascending (a, b) order so the stored witness
    is the first pair encountered, which keeps reruns byte-identical.
    """
    t0 = time.perf_counter()
    factors = _factor_words(table, include_low_rank=False)
    ranks = table.ranks
    bits = np.zeros(gf2.WORD_COUNT, dtype=bool)
    factor_a = np.full(gf2.WORD_COUNT, -1, dtype=np.int32)
    factor_b = np.full(gf2.WORD_COUNT, -1, dtype=np.int32)
    for i0 in range(0, len(factors), _CHUNK):
        outer = factors[i0 : i0 + _CHUNK]
        products = outer[:, None] & factors[None, :]
        hit = ranks[products] == 4
        flat = products[hit]
        if not len(flat):
            continue
        a_words = np.broadcast_to(outer[:, None], products.shape)[hit]
        b_words = np.broadcast_to(factors[None, :], products.shape)[hit]
        uniq, first = np.unique(flat, return_index=True)
        new = factor_a[uniq] < 0
        factor_a[uniq[new]] = a_words[first[new]]
        factor_b[uniq[new]] = b_words[first[new]]
        bits[flat] = True

    emap, report = _finish(table, bits, t0)
    return emap, report, Witnesses(factor_a, factor_b)


def counterexamples(emap: ExpressibilityMap, table: RankTable) -> list[gf2.BitMatrix4]:
    """Phase 3: full-rank words never marked expressible, ascending."""
    words = np.where((table.ranks == 4) & ~emap.bits)[0]
    return [int(w) for w in words]


def is_expressible(m: gf2.BitMatrix4, emap: ExpressibilityMap) -> bool:
    """Whether a full-rank matrix was produced as a rank-2 x rank-2 product.

    Raises NotFullRank for matrices of rank < 4, where the question is
    out of scope.
    """
    r = gf2.rank_gf2(m)
    if r < 4:
        raise NotFullRank(f"matrix {gf2.to_hex(m)} has rank {r}, expected 4")
    return emap.contains(m)


def replay_witnesses(
    emap: ExpressibilityMap, witnesses: Witnesses, table: RankTable
) -> int:
    """Re-check every stored witness pair; returns the number verified.

    A witness is valid when both factors have rank exactly 2 and their AND
    equals the marked word.  Raises AssertionError on any invalid or
    missing witness, so a clean return means 100% soundness.
    """
    marked = emap.words()
    wa = witnesses.factor_a[marked]
    wb = witnesses.factor_b[marked]
    if (wa < 0).any() or (wb < 0).any():
        raise AssertionError("expressible word without a recorded witness")
    ok = (
        (table.ranks[wa] == 2)
        & (table.ranks[wb] == 2)
        & ((wa.astype(np.uint16) & wb.astype(np.uint16)) == marked)
    )
    if not ok.all():
        bad = marked[~ok][:5]
        raise AssertionError(f"invalid witness for words {[gf2.to_hex(int(w)) for w in bad]}")
    return int(len(marked))
