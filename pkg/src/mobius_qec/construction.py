"""Surface, cylindrical and Möbius CSS codes from repetition-code complexes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Literal

from .gf2 import BinaryMatrix, kron, rank

if TYPE_CHECKING:
    from .stabilizer import CssCode

Family = Literal["surface", "cylindrical", "moebius"]
FAMILIES: tuple[Family, ...] = ("surface", "cylindrical", "moebius")


class ConstructionError(ValueError):
    """Invalid family or construction parameters."""


@dataclass(frozen=True)
class TwoTermComplex:
    """C_1 --boundary--> C_0, with the boundary map a parity-check matrix."""

    boundary: BinaryMatrix

    @property
    def n1(self) -> int:
        return self.boundary.n_cols

    @property
    def n0(self) -> int:
        return self.boundary.n_rows

    def homology_dims(self) -> tuple[int, int]:
        """(dim H_0, dim H_1)."""
        r = rank(self.boundary)
        return self.n0 - r, self.n1 - r

    def dual(self) -> TwoTermComplex:
        return TwoTermComplex(self.boundary.T)


@dataclass(frozen=True)
class CssPair:
    h_x: BinaryMatrix
    h_z: BinaryMatrix
    family: str = "custom"
    lc: int | None = None
    lf: int | None = None

    def __post_init__(self) -> None:
        if self.h_x.n_cols != self.h_z.n_cols:
            raise ConstructionError("H_X and H_Z act on different qubit counts")
        if not (self.h_x @ self.h_z.T).is_zero():
            raise ConstructionError("H_X H_Z^T != 0: generators do not commute")
        for name, h in (("H_X", self.h_x), ("H_Z", self.h_z)):
            bad = [c for c, w in enumerate(h.column_weights()) if w not in (1, 2)]
            if bad:
                raise ConstructionError(f"{name} columns {bad} have weight outside {{1, 2}}")

    @property
    def n(self) -> int:
        return self.h_x.n_cols


def repetition_check_matrix(length: int, full_rank: bool) -> BinaryMatrix:
    """Cyclic repetition-code checks: row 0 is 110...0, each next row shifted right.

    With ``full_rank`` the last (dependent) row is dropped.
    """
    if length < 2:
        raise ConstructionError(f"repetition length must be >= 2, got {length}")
    rows = []
    for i in range(length):
        rows.append((1 << i) | (1 << ((i + 1) % length)))
    if full_rank:
        rows = rows[:-1]
    return BinaryMatrix(tuple(rows), length)


def _assemble(h_c: BinaryMatrix, h_f: BinaryMatrix, vert1: BinaryMatrix, vert0: BinaryMatrix,
              **tags) -> CssPair:
    # vert1: C1⊗D1 -> C0⊗D1 block, vert0: C1⊗D0 -> C0⊗D0 block
    h_ft = h_f.T
    h_z_t = vert1.vstack(kron(BinaryMatrix.identity(h_c.n_cols), h_ft))
    h_x = kron(BinaryMatrix.identity(h_c.n_rows), h_ft).hstack(vert0)
    return CssPair(h_x, h_z_t.T, **tags)


def hypergraph_product(c: TwoTermComplex, f: TwoTermComplex, family: str = "custom",
                       lc: int | None = None, lf: int | None = None) -> CssPair:
    """Tensor-product complex of ``c`` with the dual of ``f``.

    Qubits are ordered C_0⊗D_1 first (r_c*r_f of them), then C_1⊗D_0.
    X checks are indexed by C_0⊗D_0, Z checks by C_1⊗D_1.
    """
    h_c, h_f = c.boundary, f.boundary
    vert1 = kron(h_c, BinaryMatrix.identity(h_f.n_rows))
    vert0 = kron(h_c, BinaryMatrix.identity(h_f.n_cols))
    return _assemble(h_c, h_f, vert1, vert0, family=family, lc=lc, lf=lf)


def anti_diagonal(n: int) -> BinaryMatrix:
    return BinaryMatrix(tuple(1 << (n - 1 - i) for i in range(n)), n)


def selector(n: int, x: int) -> BinaryMatrix:
    """n x n matrix with a single one at (x, x), 1-based."""
    rows = [0] * n
    rows[x - 1] = 1 << (x - 1)
    return BinaryMatrix(tuple(rows), n)


def mobius_pair(lc: int, lf: int) -> CssPair:
    """Cylindrical code cut at the central C row and reglued through the fibre reversal."""
    if lc < 3 or lf < 2:
        raise ConstructionError(f"Möbius code needs Lc >= 3 and Lf >= 2, got ({lc}, {lf})")
    if lc % 2 == 0:
        raise ConstructionError(f"Möbius code needs odd Lc, got {lc}")
    h_c = repetition_check_matrix(lc, full_rank=False)
    h_f = repetition_check_matrix(lf, full_rank=True)
    s = selector(lc, (lc + 1) // 2)
    untwisted = h_c - s
    p_site = anti_diagonal(lf)
    p_plaq = anti_diagonal(lf - 1)
    vert0 = kron(untwisted, BinaryMatrix.identity(lf)) + kron(s, p_site)
    vert1 = kron(untwisted, BinaryMatrix.identity(lf - 1)) + kron(s, p_plaq)
    return _assemble(h_c, h_f, vert1, vert0, family="moebius", lc=lc, lf=lf)


def family_complexes(family: str, lc: int, lf: int) -> tuple[TwoTermComplex, TwoTermComplex]:
    """Factor complexes (C, F) whose product is the family's code.

    The surface patch is oriented with X logicals of weight ``lc``, so
    (surface, 3, 5) and (cylindrical, 5, 3) are both [[n,1,3/5]] codes.
    """
    if family not in FAMILIES:
        raise ConstructionError(f"unknown family {family!r}")
    if family == "surface":
        return (TwoTermComplex(repetition_check_matrix(lf, full_rank=True)),
                TwoTermComplex(repetition_check_matrix(lc, full_rank=True)))
    c = TwoTermComplex(repetition_check_matrix(lc, full_rank=False))
    f = TwoTermComplex(repetition_check_matrix(lf, full_rank=True))
    return c, f


def css_pair(family: str, lc: int, lf: int) -> CssPair:
    if family == "moebius":
        return mobius_pair(lc, lf)
    c, f = family_complexes(family, lc, lf)
    return hypergraph_product(c, f, family=family, lc=lc, lf=lf)


def kunneth_k(c: TwoTermComplex, f: TwoTermComplex) -> int:
    """dim H_1 of C ⊗ F* (the complex behind ``hypergraph_product(c, f)``) from factor homologies."""
    c0, c1 = c.homology_dims()
    d0, d1 = f.dual().homology_dims()
    return c0 * d1 + c1 * d0


def build(family: str, lc: int, lf: int | None = None, *, distance_w_max: int = 5) -> CssCode:
    """Construct a code and derive n, k and (when the search is tractable) d_X, d_Z."""
    from .stabilizer import CssCode

    lf = lc if lf is None else lf
    return CssCode.from_pair(css_pair(family, lc, lf), distance_w_max=distance_w_max)
