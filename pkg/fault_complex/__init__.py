"""
Fault Complex Toolkit
======================

Builds fault complexes R × C for foliated quantum error-correcting
codes, decodes their syndromes with windowed BP+OSD and fits
threshold curves to Monte Carlo results.

Quick Start:
    $ pip install fault-complex-toolkit
    $ fxc build --code toric:3:3 --rep rep:full:4 --out F.json
    $ fxc simulate --config runs/memory.yaml --out results.csv
    $ fxc fit results.csv --out fit.json

Or programmatically:
    from fault_complex import parse_code, parse_repetition, repetition, product

    code = parse_code("toric:3:3")
    F = product(repetition(parse_repetition("rep:full:4")), code.complex, code.qubit_grade)
    F.d_primal, F.d_dual
"""

__version__ = "0.3.0"
__author__ = "Fault Complex Toolkit Developers"
__license__ = "MIT"

from .errors import (
    DecoderInconsistencyError,
    FaultComplexError,
    FitDataError,
    InvalidComplexError,
    SpecError,
)
from .gf2 import BinMatrix, BinVector
from .chain import ChainComplex, betti_numbers, cohomology, homology
from .codes import parse_code, parse_repetition, repetition, toric
from .foliation import FaultComplex, Side, product, subsystem_assembly
from .decoder import DecodeConfig, WindowConfig, decode, window_decode
from .noise import GkpSpec, PhenomenologicalSpec, trial_seed
from .experiment import ExperimentSpec, TrialBatch, run_memory, run_stability, run_sustainable
from .fit import FitInput, FitPoint, FitResult, fit_threshold

__all__ = [
    "__version__",
    "FaultComplexError",
    "SpecError",
    "InvalidComplexError",
    "DecoderInconsistencyError",
    "FitDataError",
    "BinMatrix",
    "BinVector",
    "ChainComplex",
    "homology",
    "cohomology",
    "betti_numbers",
    "parse_code",
    "parse_repetition",
    "repetition",
    "toric",
    "FaultComplex",
    "Side",
    "product",
    "subsystem_assembly",
    "DecodeConfig",
    "WindowConfig",
    "decode",
    "window_decode",
    "PhenomenologicalSpec",
    "GkpSpec",
    "trial_seed",
    "ExperimentSpec",
    "TrialBatch",
    "run_memory",
    "run_stability",
    "run_sustainable",
    "FitInput",
    "FitPoint",
    "FitResult",
    "fit_threshold",
]
