"""
Monte Carlo Experiments
========================

Memory, stability and sustainable-threshold batches over a fault complex.

Per trial and per decoded side: sample a fault e, compute its syndrome,
window-decode to a correction c, and declare failure when the residual
e + c pairs to 1 with a logical correlation of that side. Memory runs
pair with the base-code logicals summed over all data layers and keep
the readout layers of a full-rank R fault-free. Stability runs pair with
the time-like correlations of F. Side "both" fails when either side fails.

Trials run in fixed-size chunks with joblib. Each trial draws from its
own ``trial_seed``, and chunk results are merged in index order, so a
batch is reproducible for any worker count (early stopping included).

Usage:
    spec = ExperimentSpec(kind="memory", code="toric:3:3", delta=4,
                          side="primal", noise=PhenomenologicalSpec(0.02, True),
                          decode=DecodeConfig(), window=WindowConfig(1, 1),
                          trials=1000, master_seed=7)
    batch = run_memory(spec)
    batch.to_row()
"""

import logging
import math
import time
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from joblib import Parallel, delayed

from .codes import CodeHandle, RepetitionSpec, Variant, parse_code, repetition
from .decoder import DecodeConfig, WindowConfig, window_decode
from .errors import DecoderInconsistencyError, SpecError
from .foliation import Block, FaultComplex, Side, product
from .gf2 import BinVector, mod2_matmul
from .noise import (
    GkpSpec,
    PhenomenologicalSpec,
    iid_priors,
    pin_priors,
    sample_gkp,
    sample_iid,
    trial_seed,
)

logger = logging.getLogger(__name__)

NoiseSpec = Union[PhenomenologicalSpec, GkpSpec]

CSV_COLUMNS = [
    "experiment", "kind", "code", "L", "D", "side", "w", "c", "rounds",
    "noise_param", "trials", "failures", "rate", "stderr", "seed",
]


class ExperimentKind(str, Enum):
    MEMORY = "memory"
    STABILITY = "stability"
    SUSTAINABLE = "sustainable"


class StopRule(str, Enum):
    FIXED = "fixed"
    TARGET_FAILURES = "target_failures"


@dataclass(frozen=True)
class ExperimentSpec:
    kind: ExperimentKind
    code: str
    delta: int
    side: str
    noise: NoiseSpec
    decode: DecodeConfig
    window: Optional[WindowConfig] = None
    trials: int = 1000
    master_seed: int = 0
    name: str = ""
    variant: Optional[Variant] = None
    primal_grade: Optional[int] = None
    target_failures: Optional[int] = None
    max_trials: Optional[int] = None
    chunk_size: int = 100
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "kind", ExperimentKind(self.kind))
        if self.variant is not None:
            object.__setattr__(self, "variant", Variant(self.variant))
        if self.side not in ("primal", "dual", "both"):
            raise SpecError(f"side must be primal, dual or both, got '{self.side}'")
        if self.trials < 1:
            raise SpecError(f"trials must be >= 1, got {self.trials}")
        if self.chunk_size < 1:
            raise SpecError(f"chunk_size must be >= 1, got {self.chunk_size}")
        if self.target_failures is not None and self.target_failures < 1:
            raise SpecError(f"target_failures must be >= 1, got {self.target_failures}")
        if self.max_trials is not None and self.max_trials < 1:
            raise SpecError(f"max_trials must be >= 1, got {self.max_trials}")
        if self.kind is ExperimentKind.STABILITY and self.variant is Variant.FULL_RANK:
            raise SpecError("Stability experiments need the cyclic repetition factor")

    @property
    def repetition_spec(self) -> RepetitionSpec:
        default = (Variant.CYCLIC if self.kind is ExperimentKind.STABILITY
                   else Variant.FULL_RANK)
        return RepetitionSpec(self.delta, self.variant or default)

    @property
    def sides(self) -> List[Side]:
        if self.side == "both":
            return [Side.PRIMAL, Side.DUAL]
        return [Side(self.side)]

    @property
    def stop_rule(self) -> StopRule:
        return StopRule.FIXED if self.target_failures is None else StopRule.TARGET_FAILURES

    @property
    def trial_budget(self) -> int:
        if self.stop_rule is StopRule.FIXED:
            return self.trials
        return self.max_trials or self.trials


@dataclass
class TrialBatch:
    """Aggregated outcome of one batch of trials."""

    experiment: str
    kind: str
    code: str
    L: int
    D: int
    side: str
    w: int
    c: int
    rounds: int
    noise_param: float
    trials: int
    failures: int
    seed: int
    wall_time: float = 0.0
    stop_rule: str = StopRule.FIXED.value
    unresolved: int = 0

    @property
    def rate(self) -> float:
        return self.failures / self.trials

    @property
    def stderr(self) -> float:
        r = self.rate
        return math.sqrt(r * (1.0 - r) / self.trials)

    def to_row(self) -> Dict[str, Any]:
        return {
            "experiment": self.experiment, "kind": self.kind, "code": self.code,
            "L": self.L, "D": self.D, "side": self.side, "w": self.w, "c": self.c,
            "rounds": self.rounds, "noise_param": self.noise_param,
            "trials": self.trials, "failures": self.failures,
            "rate": self.rate, "stderr": self.stderr, "seed": self.seed,
        }

    def to_dict(self) -> Dict[str, Any]:
        data = self.to_row()
        data.update(wall_time=self.wall_time, stop_rule=self.stop_rule,
                    unresolved=self.unresolved)
        return data


# ─── Trial machinery ───

@dataclass
class _SideContext:
    side: Side
    correlations: np.ndarray   # one correlation per row
    pinned: np.ndarray         # locations held fault-free, as a bool mask

    @property
    def n(self) -> int:
        return self.correlations.shape[1]

    def fails(self, residual: np.ndarray) -> bool:
        """Residual touches a pinned location or pairs to 1 with a correlation."""
        if residual[self.pinned].any():
            return True
        if not self.correlations.shape[0]:
            return False
        return bool(mod2_matmul(self.correlations, residual[:, None]).any())


def build_fault_complex(spec: ExperimentSpec) -> Tuple[CodeHandle, FaultComplex]:
    handle = parse_code(spec.code)
    grade = handle.qubit_grade if spec.primal_grade is None else spec.primal_grade
    F = product(repetition(spec.repetition_spec), handle.complex, grade)
    return handle, F


def _side_contexts(F: FaultComplex, spec: ExperimentSpec) -> List[_SideContext]:
    """Correlations and pinned locations per decoded side.

    Stability runs count time-tagged correlations of F. Memory and
    sustainable runs count the net base-code logical on the data layers,
    with the perfect readout layers pinned.
    """
    contexts = []
    for side in spec.sides:
        n = F.n_primal if side is Side.PRIMAL else F.n_dual
        if spec.kind is ExperimentKind.STABILITY:
            reps = F.correlations(side, Block.TIME)
            pinned = np.zeros(n, dtype=bool)
        else:
            reps = F.memory_correlations(side)
            pinned = F.memory_boundary(side)
        corr = (np.vstack([rep.vector.bits for rep in reps]) if reps
                else np.zeros((0, n), dtype=np.uint8))
        contexts.append(_SideContext(side, corr, pinned))
    return contexts


def _window(F: FaultComplex, spec: ExperimentSpec) -> WindowConfig:
    if spec.window is None:
        return WindowConfig(F.n_rounds, F.n_rounds)
    return spec.window


def _sample(F: FaultComplex, spec: ExperimentSpec, side: Side, n: int,
            seed: int) -> Tuple[BinVector, np.ndarray]:
    if isinstance(spec.noise, GkpSpec):
        return sample_gkp(n, spec.noise, seed=seed, F=F, side=side)
    return (sample_iid(n, spec.noise, F=F, seed=seed, side=side),
            iid_priors(n, spec.noise, F=F, side=side))


def run_trial(F: FaultComplex, spec: ExperimentSpec, contexts: Sequence[_SideContext],
              index: int) -> Tuple[bool, bool]:
    """(failed, unresolved) for one trial index."""
    win = _window(F, spec)
    failed = unresolved = False
    for ctx in contexts:
        seed = trial_seed(spec.master_seed, spec.code, spec.delta,
                          spec.noise.noise_param, index, ctx.side.value)
        fault, priors = _sample(F, spec, ctx.side, ctx.n, seed)
        if ctx.pinned.any():
            fault = BinVector(np.where(ctx.pinned, 0, fault.bits).astype(np.uint8))
            priors = pin_priors(priors, ctx.pinned)
        if fault.is_zero():
            continue
        H = F.detector_matrix(ctx.side)
        syndrome = H @ fault
        try:
            correction = window_decode(F, ctx.side, syndrome,
                                       spec.decode.with_priors(priors), win)
        except DecoderInconsistencyError as e:
            e.with_context(trial=index, seed=seed)
            if win.w >= F.n_rounds:
                raise
            # A committed correction left a class the final windows cannot absorb.
            logger.debug(f"trial {index}: unresolved window ({e})")
            failed = unresolved = True
            continue
        if ctx.fails(fault.bits ^ correction.bits):
            failed = True
    return failed, unresolved


def _run_chunk(F: FaultComplex, spec: ExperimentSpec, contexts: Sequence[_SideContext],
               start: int, stop: int) -> Tuple[int, int, int]:
    failures = unresolved = 0
    for index in range(start, stop):
        failed, open_ = run_trial(F, spec, contexts, index)
        failures += failed
        unresolved += open_
    return failures, unresolved, stop - start


def _chunks(budget: int, size: int) -> List[Tuple[int, int]]:
    return [(start, min(start + size, budget)) for start in range(0, budget, size)]


def run_batch(spec: ExperimentSpec) -> TrialBatch:
    """Run one batch (any kind) and aggregate deterministically."""
    started = time.perf_counter()
    handle, F = build_fault_complex(spec)
    contexts = _side_contexts(F, spec)
    win = _window(F, spec)
    logger.info(
        f"Batch {spec.name or spec.kind.value}: {spec.code} δ={spec.delta} "
        f"side={spec.side} noise={spec.noise.noise_param} window=({win.w},{win.c}) "
        f"budget={spec.trial_budget}"
    )

    failures = unresolved = trials = 0
    chunks = _chunks(spec.trial_budget, spec.chunk_size)
    group = max(spec.workers, 1)
    with Parallel(n_jobs=spec.workers) as parallel:
        for g in range(0, len(chunks), group):
            results = parallel(
                delayed(_run_chunk)(F, spec, contexts, start, stop)
                for start, stop in chunks[g:g + group]
            )
            done = False
            for f, u, n in results:
                failures += f
                unresolved += u
                trials += n
                if (spec.stop_rule is StopRule.TARGET_FAILURES
                        and failures >= spec.target_failures):
                    done = True
                    break
            if done:
                break

    if unresolved:
        logger.warning(f"{unresolved} trials ended in an unresolvable window and count as failures")
    batch = TrialBatch(
        experiment=spec.name or spec.kind.value,
        kind=spec.kind.value,
        code=spec.code,
        L=handle.size,
        D=handle.dimension,
        side=spec.side,
        w=win.w,
        c=win.c,
        rounds=F.n_rounds,
        noise_param=spec.noise.noise_param,
        trials=trials,
        failures=failures,
        seed=spec.master_seed,
        wall_time=time.perf_counter() - started,
        stop_rule=spec.stop_rule.value,
        unresolved=unresolved,
    )
    logger.info(f"Batch done: {failures}/{trials} failures "
                f"(rate {batch.rate:.4g} ± {batch.stderr:.2g}) in {batch.wall_time:.1f}s")
    return batch


# ─── Entry points ───

def run_memory(spec: ExperimentSpec) -> TrialBatch:
    if spec.kind is not ExperimentKind.MEMORY:
        raise SpecError(f"run_memory needs kind=memory, got {spec.kind.value}")
    return run_batch(spec)


def run_stability(spec: ExperimentSpec) -> TrialBatch:
    if spec.kind is not ExperimentKind.STABILITY:
        raise SpecError(f"run_stability needs kind=stability, got {spec.kind.value}")
    if spec.repetition_spec.variant is not Variant.CYCLIC:
        raise SpecError("Stability experiments need the cyclic repetition factor")
    return run_batch(spec)


def run_sustainable(spec: ExperimentSpec, rounds_list: Sequence[int]) -> List[TrialBatch]:
    """One memory-style batch per round count."""
    rounds = list(rounds_list)
    if not rounds:
        raise SpecError("rounds_list must not be empty")
    if any(b <= a for a, b in zip(rounds, rounds[1:])):
        raise SpecError(f"rounds_list must be strictly increasing, got {rounds}")
    batches = []
    for delta in rounds:
        batches.append(run_batch(replace(spec, delta=delta)))
    return batches


def run_spec(spec: ExperimentSpec, rounds_list: Optional[Sequence[int]] = None) -> List[TrialBatch]:
    """Dispatch on kind; sustainable specs sweep ``rounds_list`` (default: delta)."""
    if spec.kind is ExperimentKind.MEMORY:
        return [run_memory(spec)]
    if spec.kind is ExperimentKind.STABILITY:
        return [run_stability(spec)]
    return run_sustainable(spec, rounds_list or [spec.delta])
