"""Bit-packed 4x4 matrices over GF(2).

A matrix is a single 16-bit word: bit ``4*r + c`` (least significant bit
first) holds entry ``(r, c)``.  Row ``r`` is therefore the nibble
``(word >> 4*r) & 0xF``, which makes Gaussian elimination a handful of
shifts and XORs.  The canonical text form of a matrix is the 4-digit
lowercase hex of its word, e.g. ``127f`` for rows 1111/1110/0100/1000.

All functions here are pure and all values immutable; everything is safe
to share across threads.
"""

from __future__ import annotations

import numpy as np

# A matrix is just its 16-bit word.
BitMatrix4 = int

WORD_BITS = 16
WORD_COUNT = 1 << WORD_BITS
ALL_ONES: BitMatrix4 = 0xFFFF
IDENTITY: BitMatrix4 = 0x8421


def _check_word(m: int) -> int:
    if not isinstance(m, (int, np.integer)):
        raise TypeError(f"matrix word must be an int, got {type(m).__name__}")
    if not 0 <= m < WORD_COUNT:
        raise ValueError(f"matrix word out of range: {m!r}")
    return int(m)


def entry(m: BitMatrix4, r: int, c: int) -> int:
    """Entry (r, c) of the matrix, r and c in 0..3."""
    _check_word(m)
    if not (0 <= r < 4 and 0 <= c < 4):
        raise ValueError(f"index out of range: ({r}, {c})")
    return (m >> (4 * r + c)) & 1


def row_nibble(m: BitMatrix4, r: int) -> int:
    """Row r as a 4-bit integer, bit c = entry (r, c)."""
    return (_check_word(m) >> (4 * r)) & 0xF


def rank_gf2(m: BitMatrix4) -> int:
    """GF(2) rank via Gaussian elimination on the four 4-bit row nibbles."""
    _check_word(m)
    rows = [(m >> 0) & 0xF, (m >> 4) & 0xF, (m >> 8) & 0xF, (m >> 12) & 0xF]
    rank = 0
    for col in range(4):
        bit = 1 << col
        pivot = next((i for i in range(rank, 4) if rows[i] & bit), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for i in range(4):
            if i != rank and rows[i] & bit:
                rows[i] ^= rows[rank]
        rank += 1
    return rank


def hadamard(a: BitMatrix4, b: BitMatrix4) -> BitMatrix4:
    """Entrywise product over GF(2): bitwise AND of the two words."""
    return _check_word(a) & _check_word(b)


def count_ones(m: BitMatrix4) -> int:
    """Number of one entries (population count of the word)."""
    return _check_word(m).bit_count()


def to_rows(m: BitMatrix4) -> np.ndarray:
    """The matrix as a (4, 4) uint8 array, rows[r, c] = entry (r, c)."""
    _check_word(m)
    bits = (m >> np.arange(16, dtype=np.uint32)) & 1
    return bits.astype(np.uint8).reshape(4, 4)


def from_rows(rows) -> BitMatrix4:
    """Pack a 4x4 array of {0, 1} entries into a word.

    Rejects anything that is not exactly 4x4 with entries in {0, 1};
    there is no implicit truncation of non-binary input.
    """
    arr = np.asarray(rows)
    if arr.shape != (4, 4):
        raise ValueError(f"expected a 4x4 array, got shape {arr.shape}")
    if not np.isin(arr, (0, 1)).all():
        raise ValueError("entries must be 0 or 1")
    flat = arr.astype(np.uint32).reshape(16)
    return int((flat << np.arange(16, dtype=np.uint32)).sum())


def to_hex(m: BitMatrix4) -> str:
    """Canonical text encoding: 4-digit lowercase hex of the word."""
    return format(_check_word(m), "04x")


def from_hex(s: str) -> BitMatrix4:
    """Parse the canonical 4-digit hex encoding."""
    word = int(s.strip(), 16)
    return _check_word(word)
