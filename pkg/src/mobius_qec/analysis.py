"""Exhaustive error-class fractions, beta_j, and the closed-form bounds.

Fractions are kept as exact (failed, total) integer pairs; floats appear only
when a value is presented or fed into a float-valued channel.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Iterable, Union

from .decoder import MwpmDecoder
from .enumerators import closed_form_counts
from .stabilizer import CssCode

Number = Union[float, Fraction]
INF = math.inf
DEFAULT_BUDGET = 10**7


class BudgetExceeded(RuntimeError):
    pass


def class_label(i: int, ell: int, j: int) -> str:
    """Column label for a class: X's, then Z's, then Y's (``"XZY"`` etc.)."""
    return "X" * ell + "Z" * i + "Y" * (j - i - ell)


def class_order(j: int) -> list[tuple[int, int]]:
    """(i, ell) classes in the column order XX, XZ, XY, ZZ, ZY, YY, ..."""
    out = []
    for combo in itertools.combinations_with_replacement("XZY", j):
        out.append((combo.count("Z"), combo.count("X")))
    return out


@dataclass(frozen=True)
class ChannelModel:
    """Independent single-qubit Pauli channel."""

    p_x: Number
    p_y: Number
    p_z: Number

    def __post_init__(self) -> None:
        if min(self.p_x, self.p_y, self.p_z) < 0 or self.p > 1:
            raise ValueError(f"invalid channel probabilities {self}")

    @property
    def p(self) -> Number:
        return self.p_x + self.p_y + self.p_z

    @property
    def bias(self) -> Number:
        denom = self.p - self.p_z
        return INF if denom == 0 else 2 * self.p_z / denom

    @classmethod
    def from_bias(cls, p: Number, bias: Number) -> ChannelModel:
        """p_z = pA/(A+2), p_x = p_y = p/(A+2); ``bias=inf`` is pure phase flip."""
        if bias == INF:
            return cls.phase_flip(p)
        if bias < 0:
            raise ValueError(f"bias must be non-negative, got {bias}")
        return cls(p / (bias + 2), p / (bias + 2), p * bias / (bias + 2))

    @classmethod
    def depolarizing(cls, p: Number) -> ChannelModel:
        return cls(p / 3, p / 3, p / 3)

    @classmethod
    def phase_flip(cls, p: Number) -> ChannelModel:
        return cls(0 * p, 0 * p, p)

    def to_json(self) -> dict:
        a = self.bias
        return {"p": float(self.p), "A": "inf" if a == INF else float(a)}


def parse_bias(value: str | float) -> float:
    if isinstance(value, str) and value.strip().lower() in ("inf", "infinity", "oo"):
        return INF
    return float(value)


@dataclass
class FractionTable:
    """Failed/total counts of weight-j errors per (Z count i, X count ell) class."""

    j: int
    n: int
    failed: dict[tuple[int, int], int] = field(default_factory=dict)
    total: dict[tuple[int, int], int] = field(default_factory=dict)

    def fraction(self, i: int, ell: int) -> Fraction:
        t = self.total.get((i, ell), 0)
        return Fraction(self.failed.get((i, ell), 0), t) if t else Fraction(0)

    def by_label(self) -> dict[str, Fraction]:
        return {class_label(i, l, self.j): self.fraction(i, l) for i, l in class_order(self.j)}

    def merge(self, other: FractionTable) -> FractionTable:
        out = FractionTable(self.j, self.n, dict(self.failed), dict(self.total))
        for key, v in other.failed.items():
            out.failed[key] = out.failed.get(key, 0) + v
        for key, v in other.total.items():
            out.total[key] = out.total.get(key, 0) + v
        return out

    def rows(self) -> list[dict]:
        return [
            {
                "class": class_label(i, l, self.j),
                "i": i,
                "l": l,
                "failed": self.failed.get((i, l), 0),
                "total": self.total.get((i, l), 0),
                "fraction": float(self.fraction(i, l)),
            }
            for i, l in class_order(self.j)
        ]


def _sweep(code: CssCode, j: int, tie_break: str, start: int, stop: int | None) -> FractionTable:
    decoder = MwpmDecoder(code, tie_break)
    table = FractionTable(j, code.n)
    failed = {key: 0 for key in class_order(j)}
    total = {key: 0 for key in class_order(j)}
    # each position carries X (0), Z (1) or Y (2)
    assignments = [
        (ops, ops.count(1), ops.count(0)) for ops in itertools.product((0, 1, 2), repeat=j)
    ]
    fails = decoder.fails
    for qubits in itertools.islice(itertools.combinations(range(code.n), j), start, stop):
        bits = [1 << q for q in qubits]
        for ops, i, ell in assignments:
            x = z = 0
            for b, op in zip(bits, ops):
                if op != 1:
                    x |= b
                if op != 0:
                    z |= b
            total[(i, ell)] += 1
            if fails(x, z):
                failed[(i, ell)] += 1
    table.failed, table.total = failed, total
    return table


def exhaustive_fractions(code: CssCode, j: int, *, tie_break: str = "lex",
                         budget: int = DEFAULT_BUDGET, workers: int = 1) -> FractionTable:
    """Decode every weight-j Pauli error once and tabulate failures per class."""
    n_patterns = comb(code.n, j) * 3**j
    if n_patterns > budget:
        raise BudgetExceeded(f"{n_patterns} decodes exceed the budget of {budget}")
    n_supports = comb(code.n, j)
    if workers <= 1:
        return _sweep(code, j, tie_break, 0, None)
    step = -(-n_supports // workers)
    bounds = [(s, min(s + step, n_supports)) for s in range(0, n_supports, step)]
    table = FractionTable(j, code.n, {k: 0 for k in class_order(j)}, {k: 0 for k in class_order(j)})
    with ProcessPoolExecutor(workers) as pool:
        parts = pool.map(_sweep, *zip(*[(code, j, tie_break, a, b) for a, b in bounds]))
        for part in parts:
            table = table.merge(part)
    return table


def tie_sensitivity(code: CssCode, j: int, *, budget: int = DEFAULT_BUDGET,
                    workers: int = 1) -> dict[str, tuple[Fraction, Fraction]]:
    """Classes whose fraction changes between the two tie rules, with both values."""
    lex = exhaustive_fractions(code, j, tie_break="lex", budget=budget, workers=workers).by_label()
    rev = exhaustive_fractions(code, j, tie_break="reverse", budget=budget, workers=workers).by_label()
    return {label: (lex[label], rev[label]) for label in lex if lex[label] != rev[label]}


def one_minus_beta(table: FractionTable, channel: ChannelModel) -> Number:
    """1 - beta_j: probability-weighted failing fraction of weight-j errors."""
    p = channel.p
    if p == 0:
        raise ValueError("beta is undefined at p = 0")
    j = table.j
    acc = 0
    for i, ell in class_order(j):
        f = table.fraction(i, ell)
        if not f:
            continue
        weight = comb(j, i) * comb(j - i, ell)
        term = weight * channel.p_z**i * channel.p_x**ell * channel.p_y ** (j - i - ell)
        acc += term * (f if isinstance(term, Fraction) else float(f))
    return acc / p**j


def beta(table: FractionTable, channel: ChannelModel) -> Number:
    return 1 - one_minus_beta(table, channel)


def exact_beta(table: FractionTable, bias: Fraction | int | float) -> Fraction:
    """beta_j as an exact rational at bias A (``math.inf`` for phase flip)."""
    if bias == INF:
        channel = ChannelModel.phase_flip(Fraction(1))
    else:
        channel = ChannelModel.from_bias(Fraction(1), Fraction(bias))
    return 1 - one_minus_beta(table, channel)


def bias_polynomial(table: FractionTable) -> list[Fraction]:
    """Numerator coefficients c_0..c_j with 1 - beta_j(A) = sum c_m A^m / (A + 2)^j.

    Recovered by exact interpolation of samples of beta_j(A) at A = 0..j.
    """
    j = table.j
    xs = [Fraction(a) for a in range(j + 1)]
    ys = [(1 - exact_beta(table, a)) * (a + 2) ** j for a in xs]
    coeffs = [Fraction(0)] * (j + 1)
    for k, (xk, yk) in enumerate(zip(xs, ys)):
        # Lagrange basis polynomial for node k, expanded into coefficients
        basis = [Fraction(1)]
        denom = Fraction(1)
        for m, xm in enumerate(xs):
            if m == k:
                continue
            basis = [Fraction(0)] + basis
            for idx in range(len(basis) - 1):
                basis[idx] -= xm * basis[idx + 1]
            denom *= xk - xm
        for idx, c in enumerate(basis):
            coeffs[idx] += yk * c / denom
    return coeffs


def asymptotic_pl(n: int, t: int, beta_t1: float, p: float) -> float:
    """Leading-order logical error rate (1 - beta_{t+1}) C(n, t+1) p^(t+1)."""
    if not 0 <= beta_t1 <= 1:
        raise ValueError(f"beta must lie in [0, 1], got {beta_t1}")
    return (1 - beta_t1) * comb(n, t + 1) * p ** (t + 1)


def truncated_pl(tables: Iterable[FractionTable], channel: ChannelModel) -> float:
    """sum_j (1 - beta_j) C(n, j) p^j over the supplied weights (no (1-p)^(n-j) factor)."""
    total = 0.0
    for table in tables:
        total += float(one_minus_beta(table, channel)) * comb(table.n, table.j) * float(channel.p) ** table.j
    return total


def code_length(family: str, d: int) -> int:
    if family in ("cylindrical", "moebius"):
        return d * d + d * (d - 1)
    if family == "surface":
        return d * d + (d - 1) ** 2
    raise ValueError(f"unknown family {family!r}")


def _bound_terms(family: str, d: int) -> tuple[int, int, Fraction]:
    """(n, Z-side failing patterns, X-side failing patterns) of weight t+1."""
    if d < 3 or d % 2 == 0:
        raise ValueError(f"bounds need odd d >= 3, got {d}")
    t = (d - 1) // 2
    counts = closed_form_counts(family, d)
    z_side = comb(2 * t + 1, t + 1) * counts.LZ_low
    x_side = comb(2 * t + 1, t + 1) * counts.LX_low + Fraction(comb(2 * t + 2, t + 1) * counts.LX_low1, 2)
    return code_length(family, d), z_side, x_side


def theorem1_beta_bound(family: str, d: int, channel: ChannelModel) -> float:
    """Lower bound on beta_{t+1} for a d = 2t+1 cylindrical or Möbius code."""
    n, z_side, x_side = _bound_terms(family, d)
    t = (d - 1) // 2
    p = channel.p
    if p == 0:
        raise ValueError("bound is undefined at p = 0")
    zf = float((channel.p_z + channel.p_y) / p) ** (t + 1)
    xf = float((channel.p_x + channel.p_y) / p) ** (t + 1)
    return 1 - (z_side * zf + float(x_side) * xf) / comb(n, t + 1)


def corollary_pl_bound(family: str, d: int, bias: float, p: float) -> float:
    """Upper bound on the logical error rate for p_x = p_y channels with bias A."""
    _, z_side, x_side = _bound_terms(family, d)
    t = (d - 1) // 2
    if bias == INF:
        return z_side * p ** (t + 1)
    scale = (bias + 2) ** (t + 1)
    return ((bias + 1) ** (t + 1) * z_side + 2 ** (t + 1) * float(x_side)) / scale * p ** (t + 1)
