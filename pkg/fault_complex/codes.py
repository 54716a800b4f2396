"""
Base Complexes
===============

Constructors for the complexes that get foliated:

    rep:cyclic:δ        cyclic repetition code (δ×δ PCM, one redundant row)
    rep:full:δ          full-rank repetition code ((δ-1)×δ PCM)
    toric:D:L           D-dimensional toric code, D ∈ {2, 3, 4}
    surface:<axes>:L    product of intervals, one letter per axis:
                        p periodic, r rough, s smooth

Toric and surface codes are iterated products of length-1 interval
complexes, built with the same routine that builds fault complexes. The
first axis is always the slow (outer) Kronecker index.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Sequence

from .chain import ChainComplex
from .errors import SpecError
from .foliation import product_complex
from .gf2 import BinMatrix

logger = logging.getLogger(__name__)

TORIC_QUBIT_GRADE: Dict[int, int] = {2: 1, 3: 2, 4: 2}


class Variant(str, Enum):
    """Repetition-code parity-check variants."""

    FULL_RANK = "full_rank"
    CYCLIC = "cyclic"


class Boundary(str, Enum):
    """Per-axis interval type for surface-style products."""

    PERIODIC = "p"
    ROUGH = "r"
    SMOOTH = "s"


@dataclass(frozen=True)
class RepetitionSpec:
    delta: int
    variant: Variant = Variant.FULL_RANK

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if self.delta < 1:
            raise SpecError(f"Repetition length must be >= 1, got {self.delta}")
        if self.variant is Variant.CYCLIC and self.delta < 2:
            raise SpecError("The cyclic repetition code needs delta >= 2")

    @property
    def name(self) -> str:
        tag = "cyclic" if self.variant is Variant.CYCLIC else "full"
        return f"rep:{tag}:{self.delta}"


@dataclass(frozen=True)
class ToricSpec:
    dimension: int
    size: int

    def __post_init__(self):
        if self.dimension not in TORIC_QUBIT_GRADE:
            raise SpecError(f"Toric dimension must be 2, 3 or 4, got {self.dimension}")
        if self.size < 2:
            raise SpecError(f"Toric linear size must be >= 2, got {self.size}")

    @property
    def name(self) -> str:
        return f"toric:{self.dimension}:{self.size}"


@dataclass(frozen=True)
class CodeHandle:
    """A parsed base code together with the grade its qubits live on."""

    name: str
    family: str
    complex: ChainComplex
    qubit_grade: int
    size: int
    dimension: int


# ─── Repetition codes ───

def repetition_matrix(spec: RepetitionSpec) -> BinMatrix:
    delta = spec.delta
    entries = [(i, i) for i in range(delta - 1)] + [(i, i + 1) for i in range(delta - 1)]
    if spec.variant is Variant.CYCLIC:
        entries += [(delta - 1, 0), (delta - 1, delta - 1)]
        return BinMatrix.from_entries(delta, delta, entries)
    return BinMatrix.from_entries(delta - 1, delta, entries)


def repetition(spec: RepetitionSpec) -> ChainComplex:
    """Length-1 complex with ∂_1 = R (bits at grade 1, checks at grade 0)."""
    R = repetition_matrix(spec)
    return ChainComplex([R.cols, R.rows], [R])


def interval(boundary: Boundary, size: int) -> ChainComplex:
    """Length-1 interval complex for one axis of a product code."""
    boundary = Boundary(boundary)
    if boundary is Boundary.PERIODIC:
        return repetition(RepetitionSpec(size, Variant.CYCLIC))
    rough = repetition(RepetitionSpec(size, Variant.FULL_RANK))
    return rough if boundary is Boundary.ROUGH else rough.dual()


# ─── Product codes ───

def toric(spec: ToricSpec) -> ChainComplex:
    """D-fold product of cyclic circle complexes; grade j has C(D,j)·L^D cells."""
    circle = interval(Boundary.PERIODIC, spec.size)
    C = circle
    for _ in range(spec.dimension - 1):
        C = product_complex(circle, C)
    return C


def interval_product_code(pattern: Sequence[Boundary], size: int) -> ChainComplex:
    """Product of per-axis intervals; the first axis is the outer factor."""
    axes = [Boundary(b) for b in pattern]
    if not 2 <= len(axes) <= 4:
        raise SpecError(f"Interval products need 2 to 4 axes, got {len(axes)}")
    if size < 2:
        raise SpecError(f"Interval size must be >= 2, got {size}")
    C = interval(axes[-1], size)
    for b in reversed(axes[:-1]):
        C = product_complex(interval(b, size), C)
    return C


# ─── Name parsing ───

def _parse_int(token: str, what: str, name: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise SpecError(f"Invalid {what} '{token}' in '{name}'") from None


def parse_repetition(name: str) -> RepetitionSpec:
    """Parse ``rep:cyclic:δ`` or ``rep:full:δ``."""
    parts = name.strip().split(":")
    if len(parts) != 3 or parts[0] != "rep":
        raise SpecError(f"Expected 'rep:<cyclic|full>:<delta>', got '{name}'")
    variants = {"cyclic": Variant.CYCLIC, "full": Variant.FULL_RANK,
                "full_rank": Variant.FULL_RANK}
    if parts[1] not in variants:
        raise SpecError(f"Unknown repetition variant '{parts[1]}' in '{name}'")
    return RepetitionSpec(_parse_int(parts[2], "length", name), variants[parts[1]])


def parse_code(name: str) -> CodeHandle:
    """Parse a CLI-facing code name into a complex plus qubit grade."""
    parts = name.strip().split(":")
    family = parts[0] if parts else ""
    if family == "rep":
        spec = parse_repetition(name)
        return CodeHandle(spec.name, "rep", repetition(spec), qubit_grade=1,
                          size=spec.delta, dimension=1)
    if family == "toric":
        if len(parts) != 3:
            raise SpecError(f"Expected 'toric:<D>:<L>', got '{name}'")
        spec = ToricSpec(_parse_int(parts[1], "dimension", name),
                         _parse_int(parts[2], "size", name))
        return CodeHandle(spec.name, "toric", toric(spec),
                          qubit_grade=TORIC_QUBIT_GRADE[spec.dimension],
                          size=spec.size, dimension=spec.dimension)
    if family == "surface":
        if len(parts) != 3:
            raise SpecError(f"Expected 'surface:<axes>:<L>', got '{name}'")
        try:
            pattern: List[Boundary] = [Boundary(ch) for ch in parts[1]]
        except ValueError:
            raise SpecError(f"Unknown boundary letter in '{parts[1]}' (use p, r, s)") from None
        size = _parse_int(parts[2], "size", name)
        return CodeHandle(f"surface:{parts[1]}:{size}", "surface",
                          interval_product_code(pattern, size),
                          qubit_grade=1, size=size, dimension=len(pattern))
    raise SpecError(f"Unknown code family in '{name}' (use rep, toric or surface)")
