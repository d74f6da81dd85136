"""Weight enumerators of stabilizer, normalizer and undetectable-error sets."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Sequence

import numpy as np

from .gf2 import BinaryMatrix, kernel_basis, row_reduce, span
from .stabilizer import CssCode

MAX_STABILIZER_DIM = 26
MAX_NORMALIZER_DIM = 22
_BLOCK = 1 << 22


class EnumerationTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class WeightEnumerator:
    """Coefficients indexed by weight 0..n."""

    coefficients: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(c < 0 for c in self.coefficients):
            raise ValueError(f"negative coefficient in {self.coefficients}")

    @property
    def n(self) -> int:
        return len(self.coefficients) - 1

    def __getitem__(self, w: int) -> int:
        return self.coefficients[w]

    def __len__(self) -> int:
        return len(self.coefficients)

    def __iter__(self):
        return iter(self.coefficients)

    def __sub__(self, other: WeightEnumerator) -> WeightEnumerator:
        return WeightEnumerator(tuple(a - b for a, b in zip(self, other)))

    def total(self) -> int:
        return sum(self.coefficients)

    def first_nonzero(self, start: int = 0) -> int | None:
        return next((w for w in range(start, len(self)) if self[w]), None)

    def as_polynomial(self) -> str:
        terms = [f"{c}z^{w}" if w else str(c) for w, c in enumerate(self) if c]
        return " + ".join(terms) or "0"


def _or_weight_histogram(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    """Histogram of popcount(a_i | b_j) over all pairs."""
    if len(a) > len(b):
        a, b = b, a
    hist = np.zeros(n + 1, dtype=np.int64)
    rows_per_block = max(1, _BLOCK // len(b))
    for start in range(0, len(a), rows_per_block):
        block = a[start:start + rows_per_block, None] | b[None, :]
        hist += np.bincount(np.bitwise_count(block).ravel(), minlength=n + 1)
    return hist


def _basis(m: BinaryMatrix) -> list[int]:
    return list(row_reduce(m)[0].rows)


def _check_width(code: CssCode) -> None:
    if code.n > 64:
        raise EnumerationTooLarge(f"direct enumeration packs qubits into 64 bits; n={code.n}")


def stabilizer_we(code: CssCode, max_dim: int = MAX_STABILIZER_DIM) -> WeightEnumerator:
    """Weight distribution of the stabilizer group (identity included)."""
    _check_width(code)
    xs, zs = _basis(code.h_x), _basis(code.h_z)
    if len(xs) + len(zs) > max_dim:
        raise EnumerationTooLarge(f"stabilizer group has 2^{len(xs) + len(zs)} elements")
    hist = _or_weight_histogram(span(xs), span(zs), code.n)
    return WeightEnumerator(tuple(int(v) for v in hist))


def normalizer_we_direct(code: CssCode, max_dim: int = MAX_NORMALIZER_DIM) -> WeightEnumerator:
    """Weight distribution of the normalizer, phases ignored."""
    _check_width(code)
    xs = list(kernel_basis(code.h_z).rows)
    zs = list(kernel_basis(code.h_x).rows)
    if len(xs) + len(zs) > max_dim:
        raise EnumerationTooLarge(f"normalizer has 2^{len(xs) + len(zs)} elements")
    hist = _or_weight_histogram(span(xs), span(zs), code.n)
    return WeightEnumerator(tuple(int(v) for v in hist))


def krawtchouk_transform(a: Sequence[int], n: int) -> list[int]:
    """Unnormalized quaternary MacWilliams sum, exact integers."""
    if len(a) != n + 1:
        raise ValueError(f"enumerator of length {len(a)} for n={n}")
    out = []
    for w in range(n + 1):
        total = 0
        for ell, a_ell in enumerate(a):
            if not a_ell:
                continue
            k = 0
            for s in range(0, min(ell, w) + 1):
                term = comb(ell, s) * comb(n - ell, w - s) * 3 ** (w - s)
                k += -term if s & 1 else term
            total += k * a_ell
        out.append(total)
    return out


def macwilliams_transform(a: Sequence[int] | WeightEnumerator, n: int) -> WeightEnumerator:
    """B_w = 2^-n sum_l sum_s C(l,s) C(n-l,w-s) (-1)^s 3^(w-s) A_l.

    Fed with A = 4^k S(z) this returns B = 2^k N(z).
    """
    raw = krawtchouk_transform(list(a), n)
    out = []
    for w, v in enumerate(raw):
        q, r = divmod(v, 1 << n)
        if r:
            raise ValueError(f"MacWilliams coefficient {w} is not an integer; check the scaling")
        out.append(q)
    return WeightEnumerator(tuple(out))


def normalizer_we_macwilliams(code: CssCode, s: WeightEnumerator | None = None) -> WeightEnumerator:
    s = stabilizer_we(code) if s is None else s
    b = macwilliams_transform([c * 4 ** code.k for c in s], code.n)
    coeffs = []
    for c in b:
        q, r = divmod(c, 2 ** code.k)
        if r:
            raise ValueError("normalizer coefficient not divisible by 2^k")
        coeffs.append(q)
    return WeightEnumerator(tuple(coeffs))


def undetectable_we(code: CssCode, method: str = "macwilliams") -> WeightEnumerator:
    """L(z) = B(z)/2^k - A(z)/4^k, i.e. normalizer minus stabilizer counts."""
    s = stabilizer_we(code)
    if method == "macwilliams":
        normalizer = normalizer_we_macwilliams(code, s)
    elif method == "direct":
        normalizer = normalizer_we_direct(code)
    else:
        raise ValueError(f"unknown method {method!r}")
    diff = [a - b for a, b in zip(normalizer, s)]
    if any(c < 0 for c in diff):
        raise ArithmeticError(f"negative undetectable-error count: {diff}")
    return WeightEnumerator(tuple(diff))


def pure_logical_counts(code: CssCode, sector: str, max_dim: int = 28) -> WeightEnumerator:
    """Counts of logicals made only of X (``"x"``) or only of Z (``"z"``) by weight."""
    _check_width(code)
    if sector == "x":
        kernel, stabs = kernel_basis(code.h_z), code.h_x
    elif sector == "z":
        kernel, stabs = kernel_basis(code.h_x), code.h_z
    else:
        raise ValueError(f"sector must be 'x' or 'z', got {sector!r}")
    if kernel.n_rows > max_dim:
        raise EnumerationTooLarge(f"kernel has 2^{kernel.n_rows} elements")
    total = _span_weight_histogram(list(kernel.rows), code.n)
    inside = _span_weight_histogram(_basis(stabs), code.n)
    return WeightEnumerator(tuple(int(a - b) for a, b in zip(total, inside)))


def _span_weight_histogram(rows: list[int], n: int) -> np.ndarray:
    # split the basis so no intermediate array exceeds a few million entries
    half = len(rows) // 2
    lo = span(rows[:half])
    hi = span(rows[half:])
    hist = np.zeros(n + 1, dtype=np.int64)
    rows_per_block = max(1, _BLOCK // len(lo))
    for start in range(0, len(hi), rows_per_block):
        block = hi[start:start + rows_per_block, None] ^ lo[None, :]
        hist += np.bincount(np.bitwise_count(block).ravel(), minlength=n + 1)
    return hist


@dataclass(frozen=True)
class LowWeightCounts:
    """Closed-form logical counts at weights d and d+1 (d = 2t+1)."""

    L_low: int
    L_low1: int
    LX_low: int
    LZ_low: int
    LX_low1: int
    LZ_low1: int


def closed_form_counts(family: str, d: int) -> LowWeightCounts:
    if d < 3 or d % 2 == 0:
        raise ValueError(f"closed forms need odd d >= 3, got {d}")
    if family == "cylindrical":
        return LowWeightCounts(2 * d, 2 * d * d, d, d, 2 * d * (d - 1), 0)
    if family == "moebius":
        return LowWeightCounts(d + 1, 3 * d * (d - 1), d, 1, 3 * d * (d - 1), 0)
    raise ValueError(f"no closed form for family {family!r}")
