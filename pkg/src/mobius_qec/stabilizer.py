"""Symplectic Pauli operators, CSS code parameters and residual classification."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .construction import CssPair
from .gf2 import BinaryMatrix, RowSpace, inverse, kernel_basis, rank, support

ResidualClass = Literal["stabilizer", "logical_x", "logical_z", "logical_y", "detectable"]
Sector = Literal["x", "z"]

_TOKEN = re.compile(r"([IXYZ])_?\{?(\d+)\}?")


@dataclass(frozen=True)
class PauliOperator:
    """Phase-free Pauli operator; ``x`` and ``z`` are bitsets over the qubits."""

    n: int
    x: int = 0
    z: int = 0

    @classmethod
    def from_label(cls, label: str, n: int) -> PauliOperator:
        """Parse 1-based notation such as ``"X1 X7 X10"`` or ``"Y7Y10"``."""
        x = z = 0
        text = label.replace(" ", "")
        pos = 0
        for m in _TOKEN.finditer(text):
            if m.start() != pos:
                raise ValueError(f"cannot parse Pauli label {label!r}")
            pos = m.end()
            q = int(m.group(2)) - 1
            if not 0 <= q < n:
                raise ValueError(f"qubit {q + 1} out of range for n={n}")
            bit = 1 << q
            if (x | z) & bit:
                raise ValueError(f"qubit {q + 1} repeated in {label!r}")
            op = m.group(1)
            if op in "XY":
                x |= bit
            if op in "ZY":
                z |= bit
        if pos != len(text):
            raise ValueError(f"cannot parse Pauli label {label!r}")
        return cls(n, x, z)

    @classmethod
    def x_type(cls, n: int, qubits: Sequence[int]) -> PauliOperator:
        return cls(n, x=sum(1 << q for q in set(qubits)))

    @classmethod
    def z_type(cls, n: int, qubits: Sequence[int]) -> PauliOperator:
        return cls(n, z=sum(1 << q for q in set(qubits)))

    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    def __mul__(self, other: PauliOperator) -> PauliOperator:
        if self.n != other.n:
            raise ValueError("Pauli operators on different qubit counts")
        return PauliOperator(self.n, self.x ^ other.x, self.z ^ other.z)

    def label(self) -> str:
        """1-based label; the identity is written ``I``."""
        parts = []
        for q in support(self.x | self.z):
            bit = 1 << q
            op = "Y" if self.x & self.z & bit else ("X" if self.x & bit else "Z")
            parts.append(f"{op}{q + 1}")
        return " ".join(parts) if parts else "I"

    def __str__(self) -> str:
        return self.label()


def symplectic_commutes(p: PauliOperator, q: PauliOperator) -> bool:
    if p.n != q.n:
        raise ValueError(f"dimension mismatch: {p.n} vs {q.n}")
    return (((p.x & q.z).bit_count() + (p.z & q.x).bit_count()) & 1) == 0


def _columns_as_masks(h: BinaryMatrix) -> list[int]:
    return h.columns()


def _complement_basis(kernel: BinaryMatrix, stabilizers: BinaryMatrix) -> list[int]:
    """Kernel vectors independent modulo the stabilizer rowspace."""
    chosen = []
    rows = list(stabilizers.rows)
    current = rank(stabilizers)
    for v in kernel.rows:
        trial = rank(BinaryMatrix(tuple(rows + [v]), kernel.n_cols))
        if trial > current:
            rows.append(v)
            chosen.append(v)
            current = trial
    return chosen


@dataclass(eq=False)
class CssCode:
    """A CSS code with derived parameters.

    Attributes
    ----------
    pair : CssPair
        The check matrices; X checks come first in every syndrome.
    d_x, d_z : int or None
        Minimum weight of an X-type (resp. Z-type) logical operator.
    distance_verified : bool
        False when a distance is taken from the construction formula because
        exhaustive search up to the weight cap found nothing.
    """

    pair: CssPair
    n: int
    k: int
    d_x: int | None = None
    d_z: int | None = None
    distance_verified: bool = True
    logical_x_basis: list[PauliOperator] = field(default_factory=list)
    logical_z_basis: list[PauliOperator] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.h_x = self.pair.h_x
        self.h_z = self.pair.h_z
        self.r_x = self.h_x.n_rows
        self.r_z = self.h_z.n_rows
        self.x_stabilizers = RowSpace(self.h_x)
        self.z_stabilizers = RowSpace(self.h_z)
        # column masks: bit i set iff check i touches the qubit
        self._hx_cols = _columns_as_masks(self.h_x)
        self._hz_cols = _columns_as_masks(self.h_z)

    @classmethod
    def from_pair(cls, pair: CssPair, distance_w_max: int = 5) -> CssCode:
        n = pair.n
        k = n - rank(pair.h_x) - rank(pair.h_z)
        code = cls(pair, n, k)
        if k > 0:
            xs, zs = logical_basis(code)
            code.logical_x_basis, code.logical_z_basis = xs, zs
            code.d_x = min_distance(code, "x", distance_w_max)
            code.d_z = min_distance(code, "z", distance_w_max)
            if code.d_x is None or code.d_z is None:
                fx, fz = formula_distances(pair.family, pair.lc, pair.lf)
                code.d_x = code.d_x if code.d_x is not None else fx
                code.d_z = code.d_z if code.d_z is not None else fz
                code.distance_verified = False
        return code

    @property
    def name(self) -> str:
        d = self.d_x if self.d_x == self.d_z else f"{self.d_x}/{self.d_z}"
        return f"[[{self.n},{self.k},{d}]]"

    @property
    def distance(self) -> int | None:
        if self.d_x is None or self.d_z is None:
            return None
        return min(self.d_x, self.d_z)

    def params(self) -> dict:
        return {
            "family": self.pair.family,
            "Lc": self.pair.lc,
            "Lf": self.pair.lf,
            "n": self.n,
            "k": self.k,
            "dX": self.d_x,
            "dZ": self.d_z,
            "verified": self.distance_verified,
        }

    # -- fast syndrome halves (ints) --------------------------------------

    def x_check_syndrome(self, z: int) -> int:
        """Bits of the X checks flipped by a Z-part ``z``."""
        s = 0
        cols = self._hx_cols
        while z:
            low = z & -z
            s ^= cols[low.bit_length() - 1]
            z ^= low
        return s

    def z_check_syndrome(self, x: int) -> int:
        s = 0
        cols = self._hz_cols
        while x:
            low = x & -x
            s ^= cols[low.bit_length() - 1]
            x ^= low
        return s

    def generators(self) -> list[PauliOperator]:
        """X generators then Z generators, matching the syndrome bit order."""
        return [PauliOperator(self.n, x=r) for r in self.h_x.rows] + [
            PauliOperator(self.n, z=r) for r in self.h_z.rows
        ]


def formula_distances(family: str, lc: int | None, lf: int | None) -> tuple[int | None, int | None]:
    """(d_X, d_Z) implied by the construction: X logicals span the F direction."""
    if lc is None or lf is None:
        return None, None
    if family == "surface":
        return lc, lf
    return lf, lc


def syndrome(code: CssCode, error: PauliOperator) -> np.ndarray:
    """Anticommutation bits: X generators (seeing the Z part) first, then Z generators."""
    if error.n != code.n:
        raise ValueError(f"error acts on {error.n} qubits, code has {code.n}")
    sx = code.x_check_syndrome(error.z)
    sz = code.z_check_syndrome(error.x)
    out = np.zeros(code.r_x + code.r_z, dtype=np.uint8)
    for i in support(sx):
        out[i] = 1
    for i in support(sz):
        out[code.r_x + i] = 1
    return out


def logical_basis(code: CssCode) -> tuple[list[PauliOperator], list[PauliOperator]]:
    """Symplectically paired X and Z logical representatives."""
    if code.k == 0:
        raise ValueError("code encodes no logical qubits")
    xs = _complement_basis(kernel_basis(code.h_z), code.h_x)
    zs = _complement_basis(kernel_basis(code.h_x), code.h_z)
    pairing = BinaryMatrix(
        tuple(sum(((x & z).bit_count() & 1) << j for j, z in enumerate(zs)) for x in xs),
        len(zs),
    )
    # re-pair the Z representatives so that <x_i, z_j> = delta_ij
    inv = inverse(pairing)
    paired = []
    for j in range(len(zs)):
        v = 0
        for i in range(len(zs)):
            if inv[i, j]:
                v ^= zs[i]
        paired.append(v)
    return (
        [PauliOperator(code.n, x=v) for v in xs],
        [PauliOperator(code.n, z=v) for v in paired],
    )


def classify_residual(code: CssCode, residual: PauliOperator) -> ResidualClass:
    if residual.n != code.n:
        raise ValueError(f"residual acts on {residual.n} qubits, code has {code.n}")
    if code.x_check_syndrome(residual.z) or code.z_check_syndrome(residual.x):
        return "detectable"
    x_ok = residual.x in code.x_stabilizers
    z_ok = residual.z in code.z_stabilizers
    if x_ok and z_ok:
        return "stabilizer"
    # a logical X component anticommutes with some Z logical, and vice versa
    hits_z = any((residual.x & zl.z).bit_count() & 1 for zl in code.logical_z_basis)
    hits_x = any((residual.z & xl.x).bit_count() & 1 for xl in code.logical_x_basis)
    if hits_z and hits_x:
        return "logical_y"
    return "logical_x" if hits_z else "logical_z"


def min_weight_logical(code: CssCode, sector: Sector, w_max: int) -> int | None:
    """A least-weight X-type (``"x"``) or Z-type logical as a bitset, or None.

    Weight-w candidates are found by taking every (w-1)-subset and looking up
    a final column that cancels its syndrome.
    """
    if sector == "x":
        cols, stabilizers = code._hz_cols, code.x_stabilizers
    elif sector == "z":
        cols, stabilizers = code._hx_cols, code.z_stabilizers
    else:
        raise ValueError(f"sector must be 'x' or 'z', got {sector!r}")
    by_syndrome: dict[int, list[int]] = {}
    for q, c in enumerate(cols):
        by_syndrome.setdefault(c, []).append(q)
    n = code.n
    for w in range(1, w_max + 1):
        for head in itertools.combinations(range(n), w - 1):
            s = 0
            mask = 0
            for q in head:
                s ^= cols[q]
                mask |= 1 << q
            last = head[-1] if head else -1
            for q in by_syndrome.get(s, ()):
                if q <= last:
                    continue
                v = mask | (1 << q)
                if v not in stabilizers:
                    return v
    return None


def min_distance(code: CssCode, sector: Sector, w_max: int = 5) -> int | None:
    v = min_weight_logical(code, sector, w_max)
    return None if v is None else v.bit_count()
