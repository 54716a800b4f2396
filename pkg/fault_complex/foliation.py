"""
Fault Complexes
================

Builds the fault complex F = R × C of a length-1 repetition complex R and
a base complex C, and everything derived from it: detector matrices, the
round structure used by windowed decoding, Künneth counts, fault
distances and explicit logical representatives. Also hosts the
subsystem-code assembly.

Block convention (frozen, also in the serialization format):

    F_j = (R_0 ⊗ C_j) ⊕ (R_1 ⊗ C_{j-1})

    ∂_j = [ I_r ⊗ ∂^C_j     R ⊗ I_{n_{j-1}}  ]
          [ 0               I_c ⊗ ∂^C_{j-1}  ]

The R_0 block (a = 0) comes first; the left factor is the slow index.
R_0 cells are check layers α, R_1 cells are bit layers β.

Usage:
    from fault_complex.codes import parse_code, parse_repetition, repetition
    from fault_complex.foliation import product

    F = product(repetition(parse_repetition("rep:full:4")),
                parse_code("toric:3:3").complex, primal_grade=2)
    F.D_X, F.d_primal, F.primal_corr
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .chain import (
    DEFAULT_EXACT_CUTOFF,
    ChainComplex,
    DistanceResult,
    betti_numbers,
    cohomology,
    homology,
    min_weight_cohomology,
    min_weight_homology,
)
from .errors import InvalidComplexError, SpecError, SubsystemPreconditionError
from .gf2 import BinMatrix, BinVector, image_membership, inverse, mod2_matmul

logger = logging.getLogger(__name__)

Weight = Union[int, float]


class Side(str, Enum):
    PRIMAL = "primal"
    DUAL = "dual"


class LayerType(str, Enum):
    CHECK = "check"
    BIT = "bit"


class Block(str, Enum):
    """Which summand of F_j a representative lives in."""

    SPACE = "space"   # R_0 ⊗ C_j
    TIME = "time"     # R_1 ⊗ C_{j-1}


# ─── Product ───

def _kron_eye(n: int, m: np.ndarray) -> np.ndarray:
    return np.kron(np.eye(n, dtype=np.uint8), m).astype(np.uint8)


def _product_boundary(Rm: BinMatrix, C: ChainComplex, j: int) -> BinMatrix:
    r, c = Rm.shape
    rows0, rows1 = r * C.dim(j - 1), c * C.dim(j - 2)
    cols0, cols1 = r * C.dim(j), c * C.dim(j - 1)
    out = np.zeros((rows0 + rows1, cols0 + cols1), dtype=np.uint8)
    blocks = (
        (slice(0, rows0), slice(0, cols0), _kron_eye(r, C.boundary(j).bits)),
        (slice(0, rows0), slice(cols0, None),
         np.kron(Rm.bits, np.eye(C.dim(j - 1), dtype=np.uint8)).astype(np.uint8)),
        (slice(rows0, None), slice(cols0, None), _kron_eye(c, C.boundary(j - 1).bits)),
    )
    for rs, cs, block in blocks:
        if block.size:
            out[rs, cs] = block
    return BinMatrix(out)


def product_complex(R: ChainComplex, C: ChainComplex) -> ChainComplex:
    """Tensor product of a length-1 complex with any complex."""
    if R.length != 1:
        raise SpecError(f"Left factor must have length 1, got {R.length}")
    Rm = R.boundary(1)
    r, c = Rm.shape
    top = C.length + 1
    dims = [r * C.dim(j) + c * C.dim(j - 1) for j in range(top, -1, -1)]
    boundaries = [_product_boundary(Rm, C, j) for j in range(top, 0, -1)]
    return ChainComplex(dims, boundaries)


# ─── Rounds ───

def _bit_rounds(Rm: BinMatrix, side: Side) -> np.ndarray:
    """Round of each bit layer: earliest touching check (primal) or latest (dual)."""
    bits = Rm.bits.astype(bool)
    r, c = bits.shape
    rounds = np.zeros(c, dtype=np.int64)
    touched = bits.any(axis=0)
    if not touched.any():
        return rounds
    if side is Side.PRIMAL:
        rounds[touched] = np.argmax(bits[:, touched], axis=0)
    else:
        rounds[touched] = r - 1 - np.argmax(bits[::-1, touched], axis=0)
    return rounds


# ─── Representatives ───

@dataclass(frozen=True)
class Representative:
    vector: BinVector
    block: Block

    def to_dict(self) -> Dict[str, Any]:
        return {"weight": self.vector.weight, "block": self.block.value,
                "support": list(self.vector.support)}


@dataclass(frozen=True)
class LogicalRepresentatives:
    """Paired generating sets; corr[k]·err[l] = δ_kl on each side."""

    primal_err: Tuple[Representative, ...]
    primal_corr: Tuple[Representative, ...]
    dual_err: Tuple[Representative, ...]
    dual_corr: Tuple[Representative, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {name: [rep.to_dict() for rep in getattr(self, name)]
                for name in ("primal_err", "primal_corr", "dual_err", "dual_corr")}


def _paired_bases(C: ChainComplex, grade: int) -> Tuple[np.ndarray, np.ndarray]:
    """Homology reps H and cohomology reps G with G·Hᵀ = I."""
    if not 0 <= grade <= C.length:
        return np.zeros((0, C.dim(grade)), np.uint8), np.zeros((0, C.dim(grade)), np.uint8)
    hom = homology(C, grade).representatives
    cohom = cohomology(C, grade).representatives
    n = C.dim(grade)
    if not hom:
        return np.zeros((0, n), np.uint8), np.zeros((0, n), np.uint8)
    H = np.vstack([v.bits for v in hom])
    G = np.vstack([v.bits for v in cohom])
    pairing = BinMatrix(mod2_matmul(G, H.T))
    G = mod2_matmul(inverse(pairing).bits, G)
    return H, G


def _lift(a_bits: np.ndarray, c_bits: np.ndarray, block: Block,
          sizes: Tuple[int, int]) -> Representative:
    out = np.zeros(sizes[0] + sizes[1], dtype=np.uint8)
    tensor = np.kron(a_bits, c_bits).astype(np.uint8)
    if block is Block.SPACE:
        out[:sizes[0]] = tensor
    else:
        out[sizes[0]:] = tensor
    return Representative(BinVector(out), block)


def logical_representatives(R: ChainComplex, C: ChainComplex, i: int) -> LogicalRepresentatives:
    """Explicit logical errors and correlations of F = R × C on both sides.

    Errors are block tensors of factor homology reps, correlations block
    tensors of factor cohomology reps. Each factor pairing is first put
    in dual-basis form, so the lifted sets pair to the identity.
    """
    if R.length != 1:
        raise SpecError(f"Left factor must have length 1, got {R.length}")
    r_bases = [_paired_bases(R, a) for a in (0, 1)]
    r, c = R.dim(0), R.dim(1)

    def lift_grade(g: int) -> Tuple[List[Representative], List[Representative]]:
        sizes = (r * C.dim(g), c * C.dim(g - 1))
        errs: List[Representative] = []
        corrs: List[Representative] = []
        for a, block in ((0, Block.SPACE), (1, Block.TIME)):
            H_R, G_R = r_bases[a]
            H_C, G_C = _paired_bases(C, g - a)
            for x in range(H_R.shape[0]):
                for y in range(H_C.shape[0]):
                    errs.append(_lift(H_R[x], H_C[y], block, sizes))
                    corrs.append(_lift(G_R[x], G_C[y], block, sizes))
        return errs, corrs

    primal_err, primal_corr = lift_grade(i)
    dual_corr, dual_err = lift_grade(i + 1)
    return LogicalRepresentatives(
        primal_err=tuple(primal_err), primal_corr=tuple(primal_corr),
        dual_err=tuple(dual_err), dual_corr=tuple(dual_corr),
    )


# ─── Künneth ───

@dataclass(frozen=True)
class KunnethReport:
    """Contributions dim H_a(R)·dim H_{j-a}(C) to each H_j(F)."""

    contributions: Dict[int, List[Tuple[int, int, int]]]
    k_primal: int
    k_dual: int

    def dimension(self, grade: int) -> int:
        return sum(dim for _, _, dim in self.contributions.get(grade, []))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "k_primal": self.k_primal,
            "k_dual": self.k_dual,
            "contributions": {
                str(g): [{"r_grade": a, "c_grade": b, "dim": d} for a, b, d in terms]
                for g, terms in sorted(self.contributions.items())
            },
        }


def kunneth(R: ChainComplex, C: ChainComplex, i: int) -> KunnethReport:
    if R.length != 1:
        raise SpecError(f"Left factor must have length 1, got {R.length}")
    r_betti = betti_numbers(R)
    c_betti = betti_numbers(C)

    def h_c(j: int) -> int:
        return c_betti[j] if 0 <= j <= C.length else 0

    contributions = {
        g: [(a, g - a, r_betti[a] * h_c(g - a)) for a in (0, 1)]
        for g in range(C.length + 2)
    }
    k_primal = r_betti[0] * h_c(i) + r_betti[1] * h_c(i - 1)
    k_dual = r_betti[0] * h_c(i + 1) + r_betti[1] * h_c(i)
    return KunnethReport(contributions, k_primal, k_dual)


# ─── Distances ───

def _homology_distance(C: ChainComplex, grade: int, cohomological: bool,
                       cutoff: int, seed: int) -> DistanceResult:
    if not 0 <= grade <= C.length:
        return DistanceResult(weight=math.inf, witness=None, exact=True)
    search = min_weight_cohomology if cohomological else min_weight_homology
    return search(C, grade, cutoff=cutoff, seed=seed)


def _combine(terms: Sequence[Tuple[DistanceResult, DistanceResult, Block]],
             sizes: Tuple[int, int]) -> DistanceResult:
    exact = all(dr.exact and dc.exact for dr, dc, _ in terms)
    best: Weight = math.inf
    witness: Optional[BinVector] = None
    for dr, dc, block in terms:
        if dr.is_infinite or dc.is_infinite:
            continue
        weight = dr.weight * dc.weight
        if weight < best:
            best = weight
            witness = _lift(dr.witness.bits, dc.witness.bits, block, sizes).vector
    return DistanceResult(weight=best, witness=witness, exact=exact)


def fault_distances(R: ChainComplex, C: ChainComplex, i: int,
                    cutoff: int = DEFAULT_EXACT_CUTOFF,
                    seed: int = 0) -> Tuple[DistanceResult, DistanceResult]:
    """(d_primal, d_dual) from factor distances.

    d_primal = min[d_0(R)·d_i(C), d_1(R)·d_{i-1}(C)]
    d_dual   = min[d^0(R)·d^{i+1}(C), d^1(R)·d^i(C)]
    """
    if R.length != 1:
        raise SpecError(f"Left factor must have length 1, got {R.length}")
    r, c = R.dim(0), R.dim(1)

    def dist(X: ChainComplex, g: int, co: bool) -> DistanceResult:
        return _homology_distance(X, g, co, cutoff, seed)

    primal = _combine(
        [(dist(R, 0, False), dist(C, i, False), Block.SPACE),
         (dist(R, 1, False), dist(C, i - 1, False), Block.TIME)],
        (r * C.dim(i), c * C.dim(i - 1)),
    )
    dual = _combine(
        [(dist(R, 0, True), dist(C, i + 1, True), Block.SPACE),
         (dist(R, 1, True), dist(C, i, True), Block.TIME)],
        (r * C.dim(i + 1), c * C.dim(i)),
    )
    return primal, dual


def _weight_to_json(weight: Weight) -> Union[int, str]:
    return "inf" if math.isinf(weight) else int(weight)


# ─── Fault complex ───

class FaultComplex:
    """F = R × C with primal faults at grade i and dual faults at grade i+1."""

    def __init__(self, repetition: ChainComplex, base: ChainComplex, primal_grade: int,
                 distance_cutoff: int = DEFAULT_EXACT_CUTOFF, distance_seed: int = 0):
        if repetition.length != 1:
            raise SpecError(f"Repetition factor must have length 1, got {repetition.length}")
        if not 0 <= primal_grade <= base.length:
            raise SpecError(f"Primal grade {primal_grade} outside 0..{base.length}")
        repetition.check()
        base.check()
        self.repetition = repetition
        self.base = base
        self.primal_grade = primal_grade
        self.distance_cutoff = distance_cutoff
        self.distance_seed = distance_seed
        self.complex = product_complex(repetition, base)
        logger.debug(f"Fault complex dims {list(self.complex.dims)} (primal grade {primal_grade})")

    # ─── detector matrices ───

    @property
    def R(self) -> BinMatrix:
        return self.repetition.boundary(1)

    @property
    def D_X(self) -> BinMatrix:
        return self.complex.boundary(self.primal_grade)

    @property
    def D_Z(self) -> BinMatrix:
        return self.complex.boundary(self.primal_grade + 2).T

    @property
    def n_primal(self) -> int:
        return self.complex.dim(self.primal_grade)

    @property
    def n_dual(self) -> int:
        return self.complex.dim(self.primal_grade + 1)

    def detector_matrix(self, side: Side) -> BinMatrix:
        return self.D_X if Side(side) is Side.PRIMAL else self.D_Z

    def fault_grade(self, side: Side) -> int:
        return self.primal_grade if Side(side) is Side.PRIMAL else self.primal_grade + 1

    def detector_grade(self, side: Side) -> int:
        return self.primal_grade - 1 if Side(side) is Side.PRIMAL else self.primal_grade + 2

    def effective(self) -> ChainComplex:
        """Grades i-1..i+2, the part of F that decoding ever sees."""
        lo = max(self.primal_grade - 1, 0)
        hi = min(self.primal_grade + 2, self.complex.length)
        return self.complex.subcomplex(lo, hi)

    # ─── round structure ───

    @property
    def n_rounds(self) -> int:
        return max(self.R.rows, 1)

    def _block_split(self, grade: int) -> Tuple[int, int]:
        return self.R.rows * self.base.dim(grade), self.base.dim(grade - 1)

    def layer_indices(self, grade: int) -> np.ndarray:
        """Time-ordered layer of each cell of F_grade: 2α+1 for checks, 2β for bits."""
        size0, n_low = self._block_split(grade)
        n_here = self.base.dim(grade)
        alpha = np.arange(size0) // max(n_here, 1)
        beta = np.arange(self.R.cols * n_low) // max(n_low, 1)
        return np.concatenate([2 * alpha + 1, 2 * beta]).astype(np.int64)

    def layers(self, grade: int) -> List[Tuple[int, LayerType]]:
        size0, _ = self._block_split(grade)
        return [(int(layer), LayerType.CHECK if k < size0 else LayerType.BIT)
                for k, layer in enumerate(self.layer_indices(grade))]

    @property
    def round_structure(self) -> List[Tuple[int, LayerType]]:
        """(layer index, layer type) for every primal fault."""
        return self.layers(self.primal_grade)

    def cell_rounds(self, grade: int, side: Side) -> np.ndarray:
        """Decoding round of every cell of F_grade for the given side."""
        size0, n_low = self._block_split(grade)
        n_here = self.base.dim(grade)
        alpha = np.arange(size0) // max(n_here, 1)
        beta = np.arange(self.R.cols * n_low) // max(n_low, 1)
        bit_rounds = _bit_rounds(self.R, Side(side))
        return np.concatenate([alpha, bit_rounds[beta]]).astype(np.int64)

    def column_rounds(self, side: Side) -> np.ndarray:
        return self.cell_rounds(self.fault_grade(side), side)

    def row_rounds(self, side: Side) -> np.ndarray:
        return self.cell_rounds(self.detector_grade(side), side)

    def fault_layers(self, side: Side) -> np.ndarray:
        return self.layer_indices(self.fault_grade(side))

    # ─── homology ───

    @cached_property
    def kunneth(self) -> KunnethReport:
        return kunneth(self.repetition, self.base, self.primal_grade)

    @cached_property
    def representatives(self) -> LogicalRepresentatives:
        return logical_representatives(self.repetition, self.base, self.primal_grade)

    @property
    def primal_err(self) -> List[BinVector]:
        return [rep.vector for rep in self.representatives.primal_err]

    @property
    def primal_corr(self) -> List[BinVector]:
        return [rep.vector for rep in self.representatives.primal_corr]

    @property
    def dual_err(self) -> List[BinVector]:
        return [rep.vector for rep in self.representatives.dual_err]

    @property
    def dual_corr(self) -> List[BinVector]:
        return [rep.vector for rep in self.representatives.dual_corr]

    def correlations(self, side: Side, block: Optional[Block] = None) -> List[Representative]:
        reps = (self.representatives.primal_corr if Side(side) is Side.PRIMAL
                else self.representatives.dual_corr)
        return [rep for rep in reps if block is None or rep.block is Block(block)]

    def memory_correlations(self, side: Side) -> List[Representative]:
        """Base-code logicals summed over every data layer of a side.

        Primal: 1_{R_0} ⊗ g for g in H^i(C), in the R_0 ⊗ C_i block.
        Dual:   1_{R_1} ⊗ h for h in H_i(C), in the R_1 ⊗ C_i block.
        Pairing a residual with these gives the net logical error left on
        the data, one row per logical qubit of the base code.
        """
        side = Side(side)
        i = self.primal_grade
        H, G = _paired_bases(self.base, i)
        r, c = self.R.shape
        if side is Side.PRIMAL:
            sizes = (r * self.base.dim(i), c * self.base.dim(i - 1))
            return [_lift(np.ones(r, np.uint8), g, Block.SPACE, sizes) for g in G]
        sizes = (r * self.base.dim(i + 1), c * self.base.dim(i))
        return [_lift(np.ones(c, np.uint8), h, Block.TIME, sizes) for h in H]

    def memory_boundary(self, side: Side) -> np.ndarray:
        """Fault locations that must stay fault-free for memory_correlations.

        These are the measurement cells of R layers with odd degree: the
        first and last bit layers on the primal side of a full-rank R.
        Empty for cyclic R.
        """
        side = Side(side)
        i = self.primal_grade
        bits = self.R.bits
        r, c = bits.shape
        if side is Side.PRIMAL:
            odd = bits.sum(axis=0) % 2 == 1
            head = np.zeros(r * self.base.dim(i), dtype=bool)
            tail = np.repeat(odd, self.base.dim(i - 1))
        else:
            odd = bits.sum(axis=1) % 2 == 1
            head = np.repeat(odd, self.base.dim(i + 1))
            tail = np.zeros(c * self.base.dim(i), dtype=bool)
        return np.concatenate([head, tail])

    @cached_property
    def _distances(self) -> Tuple[DistanceResult, DistanceResult]:
        return fault_distances(self.repetition, self.base, self.primal_grade,
                               cutoff=self.distance_cutoff, seed=self.distance_seed)

    @property
    def primal_distance(self) -> DistanceResult:
        return self._distances[0]

    @property
    def dual_distance(self) -> DistanceResult:
        return self._distances[1]

    @property
    def d_primal(self) -> Weight:
        return self.primal_distance.weight

    @property
    def d_dual(self) -> Weight:
        return self.dual_distance.weight

    # ─── reports / serialization ───

    def analysis(self) -> Dict[str, Any]:
        """Künneth counts, distances and representative weights as JSON data."""
        return {
            "dims": list(self.complex.dims),
            "primal_grade": self.primal_grade,
            "n_primal": self.n_primal,
            "n_dual": self.n_dual,
            "rounds": self.n_rounds,
            "kunneth": self.kunneth.to_dict(),
            "distances": {
                "primal": {"weight": _weight_to_json(self.d_primal),
                           "exact": self.primal_distance.exact},
                "dual": {"weight": _weight_to_json(self.d_dual),
                         "exact": self.dual_distance.exact},
            },
            "logicals": {
                name: [{"weight": rep.vector.weight, "block": rep.block.value}
                       for rep in getattr(self.representatives, name)]
                for name in ("primal_err", "primal_corr", "dual_err", "dual_corr")
            },
            "single_shot_blocks": single_shot_blocks(self),
        }

    def to_dict(self) -> Dict[str, Any]:
        data = self.complex.to_dict()
        data["primal_grade"] = self.primal_grade
        data["rounds"] = [[layer, kind.value] for layer, kind in self.round_structure]
        data["factors"] = {
            "repetition": self.repetition.to_dict(),
            "base": self.base.to_dict(),
        }
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any], **kwargs: Any) -> "FaultComplex":
        try:
            factors = data["factors"]
            repetition = ChainComplex.from_dict(factors["repetition"])
            base = ChainComplex.from_dict(factors["base"])
            grade = int(data["primal_grade"])
        except (KeyError, TypeError, ValueError) as e:
            raise SpecError(f"Malformed fault complex object: {e}") from e
        F = cls(repetition, base, grade, **kwargs)
        if "dims" in data and list(data["dims"]) != list(F.complex.dims):
            raise SpecError(
                f"Stored dims {list(data['dims'])} do not match the factors "
                f"({list(F.complex.dims)})"
            )
        if "boundaries" in data:
            stored = ChainComplex.from_dict(data)
            stored.check()
            if stored != F.complex:
                mismatched = [F.complex.length - k for k, (a, b) in
                              enumerate(zip(stored.boundaries, F.complex.boundaries)) if a != b]
                message = (f"Stored boundaries differ from the product of the stored "
                           f"factors at grades {mismatched}")
                logger.error(message)
                raise InvalidComplexError(message)
        return F

    def __repr__(self) -> str:
        return (f"FaultComplex(dims={list(self.complex.dims)}, "
                f"primal_grade={self.primal_grade}, rounds={self.n_rounds})")


def product(R: ChainComplex, C: ChainComplex, primal_grade: int, **kwargs: Any) -> FaultComplex:
    """Fault complex of a repetition factor R and base complex C."""
    F = FaultComplex(R, C, primal_grade, **kwargs)
    logger.info(
        f"Built fault complex: {F.n_primal} primal / {F.n_dual} dual faults, "
        f"{F.D_X.rows} X / {F.D_Z.rows} Z detectors, {F.n_rounds} rounds"
    )
    return F


# ─── Single-shot structure ───

def single_shot_blocks(F: FaultComplex) -> bool:
    """True iff D_X has the layered single-shot pattern with a metacheck M_X.

    Check-layer rows carry H_X on their own data layer and identities on
    the bit layers selected by R; bit-layer rows carry M_X on their own
    layer; all other blocks vanish.
    """
    i = F.primal_grade
    if i < 2 or F.base.dim(i - 2) == 0:
        return False
    Rm = F.R
    r, c = Rm.shape
    H_X = F.base.boundary(i).bits
    M_X = F.base.boundary(i - 1).bits
    n_q, n_s, n_m = F.base.dim(i), F.base.dim(i - 1), F.base.dim(i - 2)
    D = F.D_X.bits
    rows0, cols0 = r * n_s, r * n_q
    if D.shape != (rows0 + c * n_m, cols0 + c * n_s):
        return False
    expected = (
        (D[:rows0, :cols0], _kron_eye(r, H_X)),
        (D[:rows0, cols0:], np.kron(Rm.bits, np.eye(n_s, dtype=np.uint8))),
        (D[rows0:, :cols0], np.zeros((c * n_m, cols0), dtype=np.uint8)),
        (D[rows0:, cols0:], _kron_eye(c, M_X)),
    )
    return all(np.array_equal(actual, want) for actual, want in expected)


# ─── Windows ───

def window_slice(F: FaultComplex, side: Side, t: int, w: int,
                 committed: Optional[np.ndarray] = None) -> Tuple[np.ndarray, np.ndarray]:
    """(rows, cols) of the detector slice for the window [t, t+w)."""
    row_rounds = F.row_rounds(side)
    col_rounds = F.column_rounds(side)
    rows = np.flatnonzero((row_rounds >= t) & (row_rounds < t + w))
    in_window = (col_rounds >= t) & (col_rounds < t + w)
    if committed is not None:
        in_window &= ~committed
    return rows, np.flatnonzero(in_window)


# ─── Subsystem codes ───

@dataclass
class SubsystemAssembly:
    """Fault-complex candidate for a CSS subsystem code, with validity flags."""

    complex: ChainComplex
    A_X: BinMatrix
    A_Z: BinMatrix
    chain_condition_x: bool
    chain_condition_z: bool
    gauge_commute: bool
    notes: List[str] = field(default_factory=list)

    @property
    def D_X(self) -> BinMatrix:
        return self.complex.boundary(1)

    @property
    def boundary(self) -> BinMatrix:
        return self.complex.boundary(2)

    @property
    def D_Z(self) -> BinMatrix:
        return self.complex.boundary(3).T

    @property
    def is_chain_complex(self) -> bool:
        return self.chain_condition_x and self.chain_condition_z

    def to_dict(self) -> Dict[str, Any]:
        return {
            "complex": self.complex.to_dict(),
            "chain_condition_x": self.chain_condition_x,
            "chain_condition_z": self.chain_condition_z,
            "gauge_commute": self.gauge_commute,
            "notes": list(self.notes),
        }


def _coefficients(G: BinMatrix, H: BinMatrix, label: str,
                  violations: List[str]) -> Optional[BinMatrix]:
    """A with H = A·G, or None (recording each row outside rowspace(G))."""
    rows: List[np.ndarray] = []
    for k, h in enumerate(H.row_vectors()):
        found = image_membership(G.T, h)
        if not found:
            violations.append(f"H_{label} row {k} is not in the rowspace of G_{label}")
            continue
        rows.append(found.witness.bits)
    if len(rows) != H.rows:
        return None
    return BinMatrix(np.array(rows, dtype=np.uint8).reshape(H.rows, G.rows))


def subsystem_assembly(G_X: BinMatrix, G_Z: BinMatrix, H_X: BinMatrix, H_Z: BinMatrix,
                       R: BinMatrix) -> SubsystemAssembly:
    """Assemble D_X, ∂_2 and D_Z for a CSS subsystem code foliated along R.

        D_X   = ( I_r⊗H_X | R⊗A_X )
        ∂_2   = [ I_r⊗G_Zᵀ  R⊗I_n ; 0  I_c⊗G_X ]
        D_Zᵀ  = [ R⊗A_Zᵀ ; I_c⊗H_Zᵀ ]

    with H_X = A_X·G_X and H_Z = A_Z·G_Z. Every failed precondition is
    collected before raising.
    """
    violations: List[str] = []
    n = G_X.cols
    for name, M in (("G_Z", G_Z), ("H_X", H_X), ("H_Z", H_Z)):
        if M.cols != n:
            violations.append(f"{name} has {M.cols} columns, expected {n}")
    if violations:
        raise SubsystemPreconditionError(violations)

    A_X = _coefficients(G_X, H_X, "X", violations)
    A_Z = _coefficients(G_Z, H_Z, "Z", violations)
    if not (G_X @ H_Z.T).is_zero():
        violations.append("G_X and H_Z do not commute (G_X·H_Zᵀ ≠ 0)")
    if not (G_Z @ H_X.T).is_zero():
        violations.append("G_Z and H_X do not commute (G_Z·H_Xᵀ ≠ 0)")
    if violations:
        for v in violations:
            logger.error(v)
        raise SubsystemPreconditionError(violations)

    r, c = R.shape
    eye_r, eye_c = BinMatrix.identity(r), BinMatrix.identity(c)
    D_X = BinMatrix.hstack([eye_r.kron(H_X), R.kron(A_X)])
    d2 = BinMatrix.vstack([
        BinMatrix.hstack([eye_r.kron(G_Z.T), R.kron(BinMatrix.identity(n))]),
        BinMatrix.hstack([BinMatrix.zeros(c * G_X.rows, r * G_Z.rows), eye_c.kron(G_X)]),
    ])
    D_Z_T = BinMatrix.vstack([R.kron(A_Z.T), eye_c.kron(H_Z.T)])

    complex_ = ChainComplex(
        [D_Z_T.cols, d2.cols, d2.rows, D_X.rows],
        [D_Z_T, d2, D_X],
    )
    chain_x = (D_X @ d2).is_zero()
    chain_z = (d2 @ D_Z_T).is_zero()
    gauge_commute = (G_X @ G_Z.T).is_zero()
    notes = []
    if not gauge_commute:
        notes.append("gauge operators anticommute: genuine subsystem code")
    if not (chain_x and chain_z):
        notes.append("strict chain condition fails")
    logger.info(f"Subsystem assembly: chain_x={chain_x} chain_z={chain_z} "
                f"gauge_commute={gauge_commute}")
    return SubsystemAssembly(complex_, A_X, A_Z, chain_x, chain_z, gauge_commute, notes)
