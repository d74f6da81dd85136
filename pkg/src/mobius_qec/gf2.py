"""Dense linear algebra over GF(2).

Rows are stored as Python integers used as bitsets: bit ``c`` of a row is
the entry in column ``c``.  Python integers are arbitrary width, so this is
effectively word-packed storage without a column limit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


def bits_to_int(bits: Iterable[int]) -> int:
    """Pack a 0/1 sequence (index 0 = least significant bit) into an int."""
    value = 0
    for i, b in enumerate(bits):
        if b & 1:
            value |= 1 << i
    return value


def int_to_bits(value: int, length: int) -> list[int]:
    return [(value >> i) & 1 for i in range(length)]


def support(value: int) -> list[int]:
    """Sorted positions of the set bits of ``value``."""
    out = []
    while value:
        low = value & -value
        out.append(low.bit_length() - 1)
        value ^= low
    return out


@dataclass(frozen=True)
class BinaryMatrix:
    """Immutable dense matrix over GF(2)."""

    rows: tuple[int, ...]
    n_cols: int

    def __post_init__(self) -> None:
        limit = 1 << self.n_cols
        for r in self.rows:
            if r < 0 or r >= limit:
                raise ValueError(f"row {r:#x} does not fit in {self.n_cols} columns")

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_array(cls, array: Sequence[Sequence[int]] | np.ndarray) -> BinaryMatrix:
        arr = np.asarray(array, dtype=np.int64)
        if arr.ndim != 2:
            raise ValueError("expected a 2-D array")
        if np.any((arr != 0) & (arr != 1)):
            raise ValueError("entries must be 0 or 1")
        return cls(tuple(bits_to_int(row) for row in arr), arr.shape[1])

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int) -> BinaryMatrix:
        return cls((0,) * n_rows, n_cols)

    @classmethod
    def identity(cls, n: int) -> BinaryMatrix:
        return cls(tuple(1 << i for i in range(n)), n)

    @classmethod
    def from_text(cls, text: str) -> BinaryMatrix:
        """Parse one row per line of '0'/'1' characters.

        An empty matrix with a known width is written as a single line ``# cols=N``.
        """
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        n_cols = None
        rows = []
        for ln in lines:
            if ln.startswith("#"):
                if ln.startswith("# cols="):
                    n_cols = int(ln.split("=", 1)[1])
                continue
            if set(ln) - {"0", "1"}:
                raise ValueError(f"invalid matrix row {ln!r}")
            if n_cols is None:
                n_cols = len(ln)
            elif len(ln) != n_cols:
                raise ValueError("ragged matrix text")
            rows.append(bits_to_int(int(ch) for ch in ln))
        return cls(tuple(rows), n_cols or 0)

    # -- views ------------------------------------------------------------

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), self.n_cols)

    def to_array(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=np.uint8)
        for i, r in enumerate(self.rows):
            for c in support(r):
                out[i, c] = 1
        return out

    def to_text(self) -> str:
        if not self.rows:
            return f"# cols={self.n_cols}\n"
        return "".join(
            "".join(str((r >> c) & 1) for c in range(self.n_cols)) + "\n" for r in self.rows
        )

    def __getitem__(self, index: tuple[int, int]) -> int:
        i, j = index
        return (self.rows[i] >> j) & 1

    def column_weights(self) -> list[int]:
        return [sum((r >> c) & 1 for r in self.rows) for c in range(self.n_cols)]

    def columns(self) -> list[int]:
        """Columns packed as ints (bit ``i`` = row ``i``)."""
        cols = [0] * self.n_cols
        for i, r in enumerate(self.rows):
            for c in support(r):
                cols[c] |= 1 << i
        return cols

    # -- algebra ----------------------------------------------------------

    @property
    def T(self) -> BinaryMatrix:
        return BinaryMatrix(tuple(self.columns()), self.n_rows)

    def __add__(self, other: BinaryMatrix) -> BinaryMatrix:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        return BinaryMatrix(tuple(a ^ b for a, b in zip(self.rows, other.rows)), self.n_cols)

    # subtraction and addition coincide over GF(2)
    __sub__ = __add__

    def __matmul__(self, other: BinaryMatrix) -> BinaryMatrix:
        if self.n_cols != other.n_rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        out = []
        for r in self.rows:
            acc = 0
            for k in support(r):
                acc ^= other.rows[k]
            out.append(acc)
        return BinaryMatrix(tuple(out), other.n_cols)

    def apply(self, v: int) -> int:
        """Matrix-vector product M v with ``v`` packed as an int; result packed by row."""
        out = 0
        for i, r in enumerate(self.rows):
            if (r & v).bit_count() & 1:
                out |= 1 << i
        return out

    def is_zero(self) -> bool:
        return not any(self.rows)

    def hstack(self, other: BinaryMatrix) -> BinaryMatrix:
        if self.n_rows != other.n_rows:
            raise ValueError("row count mismatch in hstack")
        shift = self.n_cols
        return BinaryMatrix(
            tuple(a | (b << shift) for a, b in zip(self.rows, other.rows)),
            self.n_cols + other.n_cols,
        )

    def vstack(self, other: BinaryMatrix) -> BinaryMatrix:
        if self.n_cols != other.n_cols:
            raise ValueError("column count mismatch in vstack")
        return BinaryMatrix(self.rows + other.rows, self.n_cols)


def row_reduce(m: BinaryMatrix) -> tuple[BinaryMatrix, list[int]]:
    """Reduced row-echelon form and the (strictly increasing) pivot columns.

    Zero rows are dropped, so the result has ``rank(m)`` rows.
    """
    rows = list(m.rows)
    pivots: list[int] = []
    top = 0
    for col in range(m.n_cols):
        bit = 1 << col
        pivot = next((r for r in range(top, len(rows)) if rows[r] & bit), None)
        if pivot is None:
            continue
        rows[top], rows[pivot] = rows[pivot], rows[top]
        for r in range(len(rows)):
            if r != top and rows[r] & bit:
                rows[r] ^= rows[top]
        pivots.append(col)
        top += 1
        if top == len(rows):
            break
    return BinaryMatrix(tuple(rows[:top]), m.n_cols), pivots


def rank(m: BinaryMatrix) -> int:
    return len(row_reduce(m)[1])


def kernel_basis(m: BinaryMatrix) -> BinaryMatrix:
    """Rows spanning {v : m v = 0}; one row per free column."""
    reduced, pivots = row_reduce(m)
    pivot_set = set(pivots)
    basis = []
    for free in range(m.n_cols):
        if free in pivot_set:
            continue
        v = 1 << free
        for row, p in zip(reduced.rows, pivots):
            if (row >> free) & 1:
                v |= 1 << p
        basis.append(v)
    return BinaryMatrix(tuple(basis), m.n_cols)


class RowSpace:
    """Precomputed echelon basis for repeated membership tests."""

    def __init__(self, m: BinaryMatrix) -> None:
        reduced, pivots = row_reduce(m)
        self.n_cols = m.n_cols
        self.dim = len(pivots)
        self._basis = list(zip((1 << p for p in pivots), reduced.rows))

    def reduce(self, v: int) -> int:
        for bit, row in self._basis:
            if v & bit:
                v ^= row
        return v

    def __contains__(self, v: int) -> bool:
        return self.reduce(v) == 0


def in_rowspace(m: BinaryMatrix, v: int | Sequence[int]) -> bool:
    """True iff ``v`` is a GF(2) combination of the rows of ``m``."""
    if not isinstance(v, int):
        v = list(v)
        if len(v) != m.n_cols:
            raise ValueError(f"vector of length {len(v)} against {m.n_cols} columns")
        v = bits_to_int(v)
    elif v >> m.n_cols:
        raise ValueError("vector has bits beyond the matrix width")
    return v in RowSpace(m)


def kron(a: BinaryMatrix, b: BinaryMatrix) -> BinaryMatrix:
    """Kronecker product; entry (i*rows_b + j, k*cols_b + l) = a[i,k] b[j,l]."""
    out = []
    for ra in a.rows:
        blocks = support(ra)
        for rb in b.rows:
            acc = 0
            for k in blocks:
                acc |= rb << (k * b.n_cols)
            out.append(acc)
    return BinaryMatrix(tuple(out), a.n_cols * b.n_cols)


def inverse(m: BinaryMatrix) -> BinaryMatrix:
    n = m.n_rows
    if m.n_cols != n:
        raise ValueError("inverse of a non-square matrix")
    aug = m.hstack(BinaryMatrix.identity(n))
    reduced, pivots = row_reduce(aug)
    if pivots[:n] != list(range(n)) or len(reduced.rows) < n:
        raise ValueError("matrix is singular")
    return BinaryMatrix(tuple(r >> n for r in reduced.rows[:n]), n)


def span(rows: Sequence[int]) -> np.ndarray:
    """All 2**len(rows) combinations of ``rows`` as a uint64 array.

    Only valid when every row fits in 64 bits.
    """
    out = np.zeros(1, dtype=np.uint64)
    for r in rows:
        out = np.concatenate([out, out ^ np.uint64(r)])
    return out
