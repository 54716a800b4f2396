"""
GF(2) Linear Algebra
=====================

Immutable binary matrices and vectors over the two-element field, plus the
exact Gaussian-elimination routines every other module builds on.

Row reduction pivots on the leftmost available column and, within that
column, on the lowest-index remaining row. Every basis derived here is
therefore reproducible bit-for-bit.

Usage:
    H = BinMatrix([[1, 1, 0], [0, 1, 1]])
    rank(H)                         # 2
    kernel_basis(H)                 # [BinVector(3, support=(0, 1, 2))]
    image_membership(H, BinVector([1, 0]))
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import InconsistentComplexError, SpecError

logger = logging.getLogger(__name__)

# float32 matmul is exact while every partial sum stays below 2**24.
_FLOAT_MATMUL_LIMIT = 1 << 24


def _frozen_bits(data: Any, ndim: int) -> np.ndarray:
    arr = np.array(data, dtype=np.int64, copy=True)
    if ndim == 2 and arr.size == 0 and arr.ndim != 2:
        arr = arr.reshape(0, 0)
    if arr.ndim != ndim:
        raise ValueError(f"Expected a {ndim}-d binary array, got shape {arr.shape}")
    if arr.size and (arr.min() < 0 or arr.max() > 1):
        raise ValueError("Binary arrays may only hold 0 and 1")
    bits = arr.astype(np.uint8)
    bits.setflags(write=False)
    return bits


def mod2_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product of two 0/1 arrays reduced mod 2, returned as uint8."""
    inner = a.shape[-1]
    if inner == 0:
        shape = a.shape[:-1] + b.shape[1:]
        return np.zeros(shape, dtype=np.uint8)
    if inner < _FLOAT_MATMUL_LIMIT:
        prod = a.astype(np.float32) @ b.astype(np.float32)
        return (prod.astype(np.int64) & 1).astype(np.uint8)
    return ((a.astype(np.int64) @ b.astype(np.int64)) & 1).astype(np.uint8)


class BinVector:
    """Immutable vector over GF(2)."""

    __slots__ = ("_bits",)

    def __init__(self, bits: Any):
        self._bits = _frozen_bits(bits, 1)

    # ─── constructors ───

    @classmethod
    def zeros(cls, n: int) -> "BinVector":
        return cls(np.zeros(n, dtype=np.uint8))

    @classmethod
    def ones(cls, n: int) -> "BinVector":
        return cls(np.ones(n, dtype=np.uint8))

    @classmethod
    def unit(cls, n: int, i: int) -> "BinVector":
        bits = np.zeros(n, dtype=np.uint8)
        bits[i] = 1
        return cls(bits)

    @classmethod
    def from_support(cls, n: int, support: Iterable[int]) -> "BinVector":
        bits = np.zeros(n, dtype=np.uint8)
        for i in support:
            if not 0 <= i < n:
                raise ValueError(f"Support position {i} outside length {n}")
            bits[i] ^= 1
        return cls(bits)

    # ─── accessors ───

    @property
    def bits(self) -> np.ndarray:
        """Read-only uint8 view of the entries."""
        return self._bits

    @property
    def length(self) -> int:
        return int(self._bits.shape[0])

    def __len__(self) -> int:
        return self.length

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(int(i) for i in np.flatnonzero(self._bits))

    @property
    def weight(self) -> int:
        return int(self._bits.sum())

    def is_zero(self) -> bool:
        return not self._bits.any()

    def dot(self, other: "BinVector") -> int:
        """Parity of the overlap with another vector."""
        if other.length != self.length:
            raise ValueError(f"Length mismatch: {self.length} vs {other.length}")
        return int(np.count_nonzero(self._bits & other._bits) & 1)

    # ─── arithmetic ───

    def __add__(self, other: "BinVector") -> "BinVector":
        if other.length != self.length:
            raise ValueError(f"Length mismatch: {self.length} vs {other.length}")
        return BinVector(self._bits ^ other._bits)

    __xor__ = __add__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinVector):
            return NotImplemented
        return self.length == other.length and bool(np.array_equal(self._bits, other._bits))

    def __hash__(self) -> int:
        return hash((self.length, self._bits.tobytes()))

    def __repr__(self) -> str:
        return f"BinVector({self.length}, support={self.support})"

    def to_list(self) -> List[int]:
        return [int(b) for b in self._bits]


class BinMatrix:
    """Immutable matrix over GF(2)."""

    __slots__ = ("_bits",)

    def __init__(self, bits: Any):
        self._bits = _frozen_bits(bits, 2)

    # ─── constructors ───

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BinMatrix":
        return cls(np.zeros((rows, cols), dtype=np.uint8))

    @classmethod
    def identity(cls, n: int) -> "BinMatrix":
        return cls(np.eye(n, dtype=np.uint8))

    @classmethod
    def from_entries(cls, rows: int, cols: int,
                     entries: Iterable[Sequence[int]]) -> "BinMatrix":
        bits = np.zeros((rows, cols), dtype=np.uint8)
        seen = set()
        for entry in entries:
            i, j = int(entry[0]), int(entry[1])
            if not (0 <= i < rows and 0 <= j < cols):
                raise ValueError(f"Entry ({i}, {j}) outside a {rows}x{cols} matrix")
            if (i, j) in seen:
                raise ValueError(f"Duplicate entry ({i}, {j})")
            seen.add((i, j))
            bits[i, j] = 1
        return cls(bits)

    @classmethod
    def from_rows(cls, vectors: Sequence[BinVector], cols: int) -> "BinMatrix":
        """Stack vectors as rows; ``cols`` fixes the width when the list is empty."""
        if not vectors:
            return cls.zeros(0, cols)
        return cls(np.vstack([v.bits for v in vectors]))

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "BinMatrix":
        """Deserialize from ``{"rows", "cols", "entries"}``."""
        try:
            rows = int(data["rows"])
            cols = int(data["cols"])
            entries = data.get("entries", [])
        except (KeyError, TypeError, ValueError) as e:
            raise SpecError(f"Malformed matrix object: {e}") from e
        try:
            return cls.from_entries(rows, cols, entries)
        except ValueError as e:
            raise SpecError(f"Malformed matrix object: {e}") from e

    def to_dict(self) -> Dict[str, Any]:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [[i, j] for i, j in self.entries],
        }

    # ─── accessors ───

    @property
    def bits(self) -> np.ndarray:
        """Read-only uint8 view of the entries."""
        return self._bits

    @property
    def rows(self) -> int:
        return int(self._bits.shape[0])

    @property
    def cols(self) -> int:
        return int(self._bits.shape[1])

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    @property
    def entries(self) -> List[Tuple[int, int]]:
        """Positions holding 1, sorted lexicographically."""
        return [(int(i), int(j)) for i, j in np.argwhere(self._bits)]

    @property
    def nnz(self) -> int:
        return int(self._bits.sum())

    def is_zero(self) -> bool:
        return not self._bits.any()

    def row(self, i: int) -> BinVector:
        return BinVector(self._bits[i])

    def column(self, j: int) -> BinVector:
        return BinVector(self._bits[:, j])

    def row_vectors(self) -> List[BinVector]:
        return [BinVector(r) for r in self._bits]

    def column_vectors(self) -> List[BinVector]:
        return [BinVector(c) for c in self._bits.T]

    @property
    def T(self) -> "BinMatrix":
        return BinMatrix(self._bits.T)

    def submatrix(self, rows: Optional[Sequence[int]] = None,
                  cols: Optional[Sequence[int]] = None) -> "BinMatrix":
        bits = self._bits
        if rows is not None:
            bits = bits[np.asarray(rows, dtype=np.int64)]
        if cols is not None:
            bits = bits[:, np.asarray(cols, dtype=np.int64)]
        return BinMatrix(bits)

    # ─── arithmetic ───

    def __matmul__(self, other: Union["BinMatrix", BinVector]):
        if isinstance(other, BinVector):
            if other.length != self.cols:
                raise ValueError(f"Cannot apply {self.shape} matrix to length-{other.length} vector")
            return BinVector(mod2_matmul(self._bits, other.bits[:, None])[:, 0])
        if isinstance(other, BinMatrix):
            if other.rows != self.cols:
                raise ValueError(f"Shape mismatch: {self.shape} @ {other.shape}")
            return BinMatrix(mod2_matmul(self._bits, other._bits))
        return NotImplemented

    def __add__(self, other: "BinMatrix") -> "BinMatrix":
        if other.shape != self.shape:
            raise ValueError(f"Shape mismatch: {self.shape} + {other.shape}")
        return BinMatrix(self._bits ^ other._bits)

    __xor__ = __add__

    def kron(self, other: "BinMatrix") -> "BinMatrix":
        """Kronecker product; ``self`` supplies the slow (outer) index."""
        return BinMatrix(np.kron(self._bits, other._bits))

    @staticmethod
    def hstack(blocks: Sequence["BinMatrix"]) -> "BinMatrix":
        return BinMatrix(np.hstack([b.bits for b in blocks]))

    @staticmethod
    def vstack(blocks: Sequence["BinMatrix"]) -> "BinMatrix":
        return BinMatrix(np.vstack([b.bits for b in blocks]))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self._bits, other._bits))

    def __hash__(self) -> int:
        return hash((self.shape, self._bits.tobytes()))

    def __repr__(self) -> str:
        return f"BinMatrix({self.rows}x{self.cols}, nnz={self.nnz})"


# ─── Elimination ───

def row_reduce(a: np.ndarray, pivot_limit: Optional[int] = None) -> Tuple[np.ndarray, List[int]]:
    """Reduced row-echelon form over GF(2).

    Args:
        a: 0/1 array (m x n). Not modified.
        pivot_limit: Only the first ``pivot_limit`` columns are eligible as
            pivots; row operations still act on the full width. Used for
            augmented systems.

    Returns:
        (R, pivots): R in reduced row-echelon form (uint8, writable copy)
        and the pivot column of each of the first ``len(pivots)`` rows.
    """
    R = np.array(a, dtype=np.uint8, copy=True)
    m, n = R.shape
    limit = n if pivot_limit is None else min(pivot_limit, n)
    pivots: List[int] = []
    row = 0
    for col in range(limit):
        if row == m:
            break
        below = np.flatnonzero(R[row:, col])
        if below.size == 0:
            continue
        found = row + int(below[0])
        if found != row:
            R[[row, found]] = R[[found, row]]
        mask = R[:, col].astype(bool)
        mask[row] = False
        if mask.any():
            R[mask] ^= R[row]
        pivots.append(col)
        row += 1
    return R, pivots


def rank(M: BinMatrix) -> int:
    """Rank of M over GF(2)."""
    if M.rows == 0 or M.cols == 0:
        return 0
    _, pivots = row_reduce(M.bits)
    return len(pivots)


def kernel_matrix(M: BinMatrix) -> BinMatrix:
    """Basis of ker M as the rows of a matrix (cols - rank rows)."""
    n = M.cols
    if M.rows == 0:
        return BinMatrix.identity(n)
    R, pivots = row_reduce(M.bits)
    pivot_set = set(pivots)
    free = [j for j in range(n) if j not in pivot_set]
    basis = np.zeros((len(free), n), dtype=np.uint8)
    if free:
        basis[np.arange(len(free)), free] = 1
        if pivots:
            basis[:, pivots] = R[:len(pivots)][:, free].T
    return BinMatrix(basis)


def kernel_basis(M: BinMatrix) -> List[BinVector]:
    """Basis of ker M; size = M.cols - rank(M) and M·v = 0 for each v."""
    return kernel_matrix(M).row_vectors()


def cokernel_test_matrix(M: BinMatrix) -> BinMatrix:
    """Rows span ker Mᵀ, so v ∈ im M iff this matrix annihilates v."""
    return kernel_matrix(M.T)


@dataclass(frozen=True)
class Membership:
    """Outcome of ``image_membership``; truthy iff b ∈ im M."""

    member: bool
    witness: Optional[BinVector] = None

    def __bool__(self) -> bool:
        return self.member


def image_membership(M: BinMatrix, b: BinVector) -> Membership:
    """Decide whether b ∈ im M and return x with M·x = b when it is."""
    if b.length != M.rows:
        raise ValueError(f"Vector length {b.length} does not match {M.rows} rows")
    if M.cols == 0:
        if b.is_zero():
            return Membership(True, BinVector.zeros(0))
        return Membership(False)
    augmented = np.hstack([M.bits, b.bits[:, None]])
    R, pivots = row_reduce(augmented, pivot_limit=M.cols)
    r = len(pivots)
    if R[r:, -1].any():
        return Membership(False)
    x = np.zeros(M.cols, dtype=np.uint8)
    if pivots:
        x[pivots] = R[:r, -1]
    return Membership(True, BinVector(x))


def quotient_basis(kernel: Sequence[BinVector], image_gen: BinMatrix) -> List[BinVector]:
    """Coset representatives extending a basis of im(image_gen) to span(kernel).

    Representatives are chosen from ``kernel`` in order: the k-th kernel
    vector is kept iff it is independent of the image plus the earlier
    kernel vectors.

    Raises:
        InconsistentComplexError: a column of ``image_gen`` lies outside
            span(kernel).
    """
    n = image_gen.rows
    for v in kernel:
        if v.length != n:
            raise ValueError(f"Kernel vector length {v.length} does not match {n}")
    if not kernel:
        if not image_gen.is_zero():
            raise InconsistentComplexError("Image is nonzero but the kernel is trivial")
        return []

    K = np.vstack([v.bits for v in kernel]).T
    m = image_gen.cols
    combined = np.hstack([image_gen.bits, K])
    _, pivots = row_reduce(combined)
    k_rank = rank(BinMatrix(K))
    if len(pivots) != k_rank:
        raise InconsistentComplexError(
            f"Image generators leave span(kernel): rank {len(pivots)} vs {k_rank}"
        )
    return [kernel[p - m] for p in pivots if p >= m]


def inverse(M: BinMatrix) -> BinMatrix:
    """Inverse of a square matrix over GF(2)."""
    n = M.rows
    if M.cols != n:
        raise ValueError(f"Only square matrices are invertible, got {M.shape}")
    if n == 0:
        return BinMatrix.zeros(0, 0)
    augmented = np.hstack([M.bits, np.eye(n, dtype=np.uint8)])
    R, pivots = row_reduce(augmented, pivot_limit=n)
    if len(pivots) != n:
        raise ValueError("Matrix is singular over GF(2)")
    return BinMatrix(R[:, n:])
