"""
Chain Complexes over GF(2)
===========================

A chain complex is stored highest grade first:

    dims       = [n_n, ..., n_1, n_0]
    boundaries = [∂_n, ..., ∂_1]        (∂_j has n_{j-1} rows, n_j cols)

Boundary maps missing at either end are zero maps of the right shape.

Covers validation, homology/cohomology bases and minimum-weight
(co)homology representatives, the quantities behind code and fault
distances.
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import InvalidComplexError, SpecError
from .gf2 import (
    BinMatrix,
    BinVector,
    cokernel_test_matrix,
    kernel_basis,
    kernel_matrix,
    mod2_matmul,
    quotient_basis,
    rank,
    row_reduce,
)

logger = logging.getLogger(__name__)

DEFAULT_EXACT_CUTOFF = 24
DEFAULT_SEARCH_ATTEMPTS = 1000
_ENUMERATION_CHUNK_BITS = 15

Weight = Union[int, float]


@dataclass(frozen=True)
class ViolationReport:
    """First violated condition found by ``validate``."""

    kind: str  # "dimension" or "chain"
    grade: int
    row: int
    col: int
    message: str

    @property
    def location(self) -> Tuple[int, int, int]:
        return self.grade, self.row, self.col


@dataclass(frozen=True)
class HomologyBasis:
    grade: int
    representatives: Tuple[BinVector, ...]

    @property
    def dimension(self) -> int:
        return len(self.representatives)


@dataclass(frozen=True)
class DistanceResult:
    """Minimum weight of a nontrivial (co)homology class.

    ``weight`` is ``math.inf`` when the group is trivial. ``exact`` is False
    when the value is only an upper bound from the randomized search.
    """

    weight: Weight
    witness: Optional[BinVector]
    exact: bool

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.weight)


class ChainComplex:
    """Finite chain complex of GF(2) vector spaces."""

    def __init__(self, dims: Sequence[int], boundaries: Sequence[BinMatrix]):
        if len(dims) != len(boundaries) + 1:
            raise SpecError(
                f"A complex with {len(boundaries)} boundary maps needs "
                f"{len(boundaries) + 1} dims, got {len(dims)}"
            )
        if any(int(d) < 0 for d in dims):
            raise SpecError(f"Negative dimension in {list(dims)}")
        self._dims = tuple(int(d) for d in dims)
        self._boundaries = tuple(boundaries)

    # ─── shape ───

    @property
    def dims(self) -> Tuple[int, ...]:
        return self._dims

    @property
    def boundaries(self) -> Tuple[BinMatrix, ...]:
        return self._boundaries

    @property
    def length(self) -> int:
        return len(self._boundaries)

    def dim(self, j: int) -> int:
        """Dimension of grade j (0 outside the complex)."""
        if 0 <= j <= self.length:
            return self._dims[self.length - j]
        return 0

    def boundary(self, j: int) -> BinMatrix:
        """∂_j : C_j → C_{j-1}; zero map outside 1..length."""
        if 1 <= j <= self.length:
            return self._boundaries[self.length - j]
        return BinMatrix.zeros(self.dim(j - 1), self.dim(j))

    # ─── derived complexes ───

    def dual(self) -> "ChainComplex":
        """Transpose every boundary and reverse the grading."""
        return ChainComplex(
            list(reversed(self._dims)),
            [b.T for b in reversed(self._boundaries)],
        )

    def subcomplex(self, lo: int, hi: int) -> "ChainComplex":
        """Grades lo..hi, regraded so that grade lo becomes grade 0."""
        if not 0 <= lo <= hi <= self.length:
            raise SpecError(f"Grade window [{lo}, {hi}] outside 0..{self.length}")
        dims = [self.dim(j) for j in range(hi, lo - 1, -1)]
        boundaries = [self.boundary(j) for j in range(hi, lo, -1)]
        return ChainComplex(dims, boundaries)

    # ─── validation ───

    @cached_property
    def violation(self) -> Optional[ViolationReport]:
        return validate(self)

    def is_valid(self) -> bool:
        return self.violation is None

    def check(self) -> None:
        """Raise InvalidComplexError on the first violation."""
        report = self.violation
        if report is not None:
            logger.error(report.message)
            raise InvalidComplexError(report.message, location=report.location)

    # ─── serialization ───

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dims": list(self._dims),
            "boundaries": [b.to_dict() for b in self._boundaries],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ChainComplex":
        try:
            dims = [int(d) for d in data["dims"]]
            boundaries = [BinMatrix.from_dict(b) for b in data["boundaries"]]
        except (KeyError, TypeError, ValueError) as e:
            raise SpecError(f"Malformed chain complex object: {e}") from e
        return cls(dims, boundaries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ChainComplex):
            return NotImplemented
        return self._dims == other._dims and self._boundaries == other._boundaries

    def __hash__(self) -> int:
        return hash((self._dims, self._boundaries))

    def __repr__(self) -> str:
        return f"ChainComplex(dims={list(self._dims)})"


# ─── Validation ───

def validate(C: ChainComplex) -> Optional[ViolationReport]:
    """Check dimension compatibility and ∂_j·∂_{j+1} = 0.

    Returns None when the complex is valid, otherwise the first violation
    by increasing grade (dimension checks before chain checks).
    """
    for j in range(1, C.length + 1):
        d = C.boundary(j)
        if d.rows != C.dim(j - 1) or d.cols != C.dim(j):
            return ViolationReport(
                kind="dimension", grade=j, row=d.rows, col=d.cols,
                message=(f"∂_{j} has shape {d.shape}, expected "
                         f"({C.dim(j - 1)}, {C.dim(j)})"),
            )
    for j in range(1, C.length):
        product = C.boundary(j) @ C.boundary(j + 1)
        if not product.is_zero():
            row, col = product.entries[0]
            return ViolationReport(
                kind="chain", grade=j, row=row, col=col,
                message=f"∂_{j}·∂_{j + 1} is nonzero at ({row}, {col})",
            )
    return None


def _check_grade(C: ChainComplex, i: int) -> None:
    if not 0 <= i <= C.length:
        raise SpecError(f"Grade {i} outside 0..{C.length}")


# ─── Homology ───

def homology(C: ChainComplex, i: int) -> HomologyBasis:
    """Basis of H_i = ker ∂_i / im ∂_{i+1}."""
    C.check()
    _check_grade(C, i)
    kernel = kernel_basis(C.boundary(i))
    reps = quotient_basis(kernel, C.boundary(i + 1))
    return HomologyBasis(grade=i, representatives=tuple(reps))


def cohomology(C: ChainComplex, i: int) -> HomologyBasis:
    """Basis of H^i, computed as homology of the dual complex."""
    C.check()
    _check_grade(C, i)
    basis = homology(C.dual(), C.length - i)
    return HomologyBasis(grade=i, representatives=basis.representatives)


def homology_dimension(C: ChainComplex, i: int) -> int:
    """n_i - rank ∂_i - rank ∂_{i+1}, without building representatives."""
    C.check()
    _check_grade(C, i)
    return C.dim(i) - rank(C.boundary(i)) - rank(C.boundary(i + 1))


def betti_numbers(C: ChainComplex) -> List[int]:
    """Homology dimensions for grades 0..length."""
    C.check()
    ranks = [rank(C.boundary(j)) for j in range(C.length + 2)]
    return [C.dim(j) - ranks[j] - ranks[j + 1] for j in range(C.length + 1)]


# ─── Minimum-weight representatives ───

def _enumerate_min_weight(K: np.ndarray, P: np.ndarray) -> Tuple[int, np.ndarray]:
    """Exhaustive search over all nonzero combinations of the kernel rows."""
    k = K.shape[0]
    shifts = np.arange(k, dtype=np.int64)
    Kf = K.astype(np.float32)
    Pf = P.astype(np.float32)
    total = 1 << k
    chunk = 1 << min(k, _ENUMERATION_CHUNK_BITS)
    best_weight = math.inf
    best: Optional[np.ndarray] = None
    for start in range(1, total, chunk):
        ids = np.arange(start, min(start + chunk, total), dtype=np.int64)
        coeff = ((ids[:, None] >> shifts) & 1).astype(np.float32)
        nontrivial = ((coeff @ Pf).astype(np.int64) & 1).any(axis=1)
        if not nontrivial.any():
            continue
        vecs = ((coeff[nontrivial] @ Kf).astype(np.int64) & 1).astype(np.uint8)
        weights = vecs.sum(axis=1)
        j = int(np.argmin(weights))
        if weights[j] < best_weight:
            best_weight = int(weights[j])
            best = vecs[j]
    return int(best_weight), best


def _greedy_reduce(v: np.ndarray, basis: np.ndarray, Wt: np.ndarray) -> np.ndarray:
    """Add basis rows while the weight drops and the class stays nontrivial."""
    while True:
        trial = basis ^ v
        weights = trial.sum(axis=1, dtype=np.int64)
        nontrivial = mod2_matmul(trial, Wt).any(axis=1)
        better = nontrivial & (weights < int(v.sum()))
        if not better.any():
            return v
        candidates = np.where(better, weights, np.iinfo(np.int64).max)
        v = trial[int(np.argmin(candidates))]


def _information_set_search(K: np.ndarray, W: np.ndarray, seed: int,
                            attempts: int) -> Tuple[int, np.ndarray]:
    """Upper bound from reduced bases under random column permutations."""
    rng = np.random.default_rng(seed)
    n = K.shape[1]
    Wt = W.T.copy()
    best_weight = math.inf
    best: Optional[np.ndarray] = None
    for _ in range(attempts):
        perm = rng.permutation(n)
        R, pivots = row_reduce(K[:, perm])
        reduced = np.empty((len(pivots), n), dtype=np.uint8)
        reduced[:, perm] = R[:len(pivots)]
        nontrivial = mod2_matmul(reduced, Wt).any(axis=1)
        if not nontrivial.any():
            continue
        weights = np.where(nontrivial, reduced.sum(axis=1, dtype=np.int64), np.iinfo(np.int64).max)
        v = _greedy_reduce(reduced[int(np.argmin(weights))], reduced, Wt)
        if v.sum() < best_weight:
            best_weight = int(v.sum())
            best = v
    return int(best_weight), best


def min_weight_homology(C: ChainComplex, i: int,
                        cutoff: int = DEFAULT_EXACT_CUTOFF,
                        seed: int = 0,
                        attempts: int = DEFAULT_SEARCH_ATTEMPTS) -> DistanceResult:
    """Minimum weight of a cycle at grade i that is not a boundary.

    Exact enumeration when dim ker ∂_i <= cutoff; otherwise a seeded
    randomized information-set search whose result is an upper bound
    (``exact=False``). Trivial homology gives weight ``math.inf``.
    """
    C.check()
    _check_grade(C, i)
    K = kernel_matrix(C.boundary(i)).bits
    W = cokernel_test_matrix(C.boundary(i + 1)).bits
    P = mod2_matmul(K, W.T)
    if not P.any():
        return DistanceResult(weight=math.inf, witness=None, exact=True)

    k = K.shape[0]
    if k <= cutoff:
        weight, witness = _enumerate_min_weight(K, P)
        exact = True
    else:
        logger.debug(f"dim ker ∂_{i} = {k} > {cutoff}: randomized search ({attempts} attempts)")
        weight, witness = _information_set_search(K, W, seed, attempts)
        exact = False
    return DistanceResult(weight=weight, witness=BinVector(witness), exact=exact)


def min_weight_cohomology(C: ChainComplex, i: int,
                          cutoff: int = DEFAULT_EXACT_CUTOFF,
                          seed: int = 0,
                          attempts: int = DEFAULT_SEARCH_ATTEMPTS) -> DistanceResult:
    """Minimum weight of a nontrivial class in H^i."""
    C.check()
    _check_grade(C, i)
    return min_weight_homology(C.dual(), C.length - i, cutoff=cutoff,
                               seed=seed, attempts=attempts)
