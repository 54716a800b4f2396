"""
Decoders
=========

Min-sum belief propagation (flooding schedule) with ordered-statistics
post-processing, and the (w, c) overlapping-window decoder that walks a
fault complex round by round.

Usage:
    cfg = DecodeConfig(priors=np.full(H.cols, 0.01))
    correction = decode(H, syndrome, cfg)

    win = WindowConfig(w=3, c=1)
    correction = window_decode(F, Side.PRIMAL, syndrome, cfg, win)
"""

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Union

import numpy as np
from scipy.special import expit

from .errors import DecoderInconsistencyError, SpecError
from .foliation import FaultComplex, Side, window_slice
from .gf2 import BinMatrix, BinVector, mod2_matmul, row_reduce

logger = logging.getLogger(__name__)

LLR_CLIP = 30.0
_PROB_FLOOR = 1e-12


class OsdStrategy(str, Enum):
    OSD0 = "osd0"
    COMBINATION_SWEEP = "combination_sweep"


@dataclass(frozen=True)
class DecodeConfig:
    """BP+OSD settings; ``priors`` are per-column flip probabilities."""

    bp_iters: int = 30
    min_sum_scale: float = 1.0
    osd_order: int = 60
    osd_strategy: OsdStrategy = OsdStrategy.COMBINATION_SWEEP
    priors: Optional[np.ndarray] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "osd_strategy", OsdStrategy(self.osd_strategy))
        if self.bp_iters < 0:
            raise SpecError(f"bp_iters must be >= 0, got {self.bp_iters}")
        if not 0.0 < self.min_sum_scale <= 1.0:
            raise SpecError(f"min_sum_scale must lie in (0, 1], got {self.min_sum_scale}")
        if self.osd_order < 0:
            raise SpecError(f"osd_order must be >= 0, got {self.osd_order}")
        if self.priors is not None:
            priors = np.asarray(self.priors, dtype=np.float64)
            if priors.ndim != 1:
                raise SpecError("priors must be a 1-d array")
            if priors.size and (priors.min() <= 0.0 or priors.max() > 0.5):
                raise SpecError("priors must lie in (0, 0.5]")
            object.__setattr__(self, "priors", priors)

    def with_priors(self, priors: np.ndarray) -> "DecodeConfig":
        return replace(self, priors=priors)

    def prior_array(self, n: int) -> np.ndarray:
        if self.priors is None:
            raise SpecError("DecodeConfig has no priors")
        if self.priors.size != n:
            raise SpecError(f"Expected {n} priors, got {self.priors.size}")
        return self.priors


@dataclass(frozen=True)
class WindowConfig:
    w: int
    c: int

    def __post_init__(self):
        if self.w < 1:
            raise SpecError(f"Window size w must be >= 1, got {self.w}")
        if not 1 <= self.c <= self.w:
            raise SpecError(f"Commit size c must satisfy 1 <= c <= w, got c={self.c}, w={self.w}")


@dataclass
class BpResult:
    llrs: np.ndarray
    posterior: np.ndarray
    hard: BinVector
    converged: bool
    iterations: int


# ─── Belief propagation ───

def _llr(p: np.ndarray) -> np.ndarray:
    p = np.clip(p, _PROB_FLOOR, 1.0 - _PROB_FLOOR)
    return np.clip(np.log1p(-p) - np.log(p), -LLR_CLIP, LLR_CLIP)


def _satisfies(H: np.ndarray, x: np.ndarray, s: np.ndarray) -> bool:
    return bool(np.array_equal(mod2_matmul(H, x[:, None].astype(np.uint8))[:, 0], s))


def bp_min_sum(H: BinMatrix, s: BinVector, cfg: DecodeConfig) -> BpResult:
    """Flooding min-sum BP; ``converged`` means the hard decision reproduces s."""
    if s.length != H.rows:
        raise SpecError(f"Syndrome length {s.length} does not match {H.rows} detectors")
    m, n = H.shape
    Hb, sb = H.bits, s.bits
    prior_llr = _llr(cfg.prior_array(n))
    total = prior_llr.copy()
    hard = total < 0

    def result(iterations: int, converged: bool) -> BpResult:
        return BpResult(llrs=total, posterior=expit(-total),
                        hard=BinVector(hard.astype(np.uint8)),
                        converged=converged, iterations=iterations)

    if _satisfies(Hb, hard, sb):
        return result(0, True)

    rows, cols = np.nonzero(Hb)
    if rows.size == 0:
        return result(0, False)
    seg_rows, starts = np.unique(rows, return_index=True)
    seg = np.repeat(np.arange(seg_rows.size), np.diff(np.append(starts, rows.size)))
    target = sb[seg_rows].astype(np.int64)
    q = prior_llr[cols]

    for it in range(1, cfg.bp_iters + 1):
        signs = (q < 0).astype(np.int64)
        mags = np.abs(q)
        parity = (np.add.reduceat(signs, starts) + target) % 2
        out_sign = parity[seg] ^ signs

        min1 = np.minimum.reduceat(mags, starts)
        hits = np.flatnonzero(mags == min1[seg])
        first = hits[np.unique(seg[hits], return_index=True)[1]]
        masked = mags.copy()
        masked[first] = np.inf
        min2 = np.minimum.reduceat(masked, starts)
        mag = min1[seg].copy()
        mag[first] = min2[seg[first]]
        mag = np.minimum(mag * cfg.min_sum_scale, LLR_CLIP)

        r = np.where(out_sign == 1, -mag, mag)
        total = np.clip(prior_llr + np.bincount(cols, weights=r, minlength=n),
                        -LLR_CLIP, LLR_CLIP)
        hard = total < 0
        if _satisfies(Hb, hard, sb):
            return result(it, True)
        q = np.clip(total[cols] - r, -LLR_CLIP, LLR_CLIP)

    return result(cfg.bp_iters, False)


# ─── Ordered statistics ───

def osd(H: BinMatrix, s: BinVector, soft: Union[BpResult, np.ndarray],
        cfg: DecodeConfig) -> BinVector:
    """Ordered-statistics decoding; the result always satisfies H·c = s.

    Columns are ordered by decreasing posterior flip probability (stable
    in column index). The combination sweep also tries every weight-1
    pattern on the non-pivot columns and every weight-2 pattern within
    the first ``osd_order`` of them, keeping the cheapest candidate.
    """
    if s.length != H.rows:
        raise SpecError(f"Syndrome length {s.length} does not match {H.rows} detectors")
    m, n = H.shape
    posterior = soft.posterior if isinstance(soft, BpResult) else np.asarray(soft, dtype=np.float64)
    if s.is_zero():
        return BinVector.zeros(n)

    order = np.argsort(-posterior, kind="stable")
    augmented = np.hstack([H.bits[:, order], s.bits[:, None]])
    R, pivots = row_reduce(augmented, pivot_limit=n)
    rank = len(pivots)
    if R[rank:, -1].any():
        logger.error(f"Syndrome outside the detector image (rank {rank}, {m} rows)")
        raise DecoderInconsistencyError(
            "Syndrome is not in the image of the detector matrix",
            {"rows": m, "cols": n, "rank": rank},
        )

    pivots = np.asarray(pivots, dtype=np.int64)
    base = R[:rank, -1].astype(np.uint8)
    x_perm = np.zeros(n, dtype=np.uint8)
    x_perm[pivots] = base

    if cfg.osd_strategy is OsdStrategy.COMBINATION_SWEEP and rank < n:
        q = np.clip(posterior[order], _PROB_FLOOR, 1.0 - _PROB_FLOOR)
        weights = np.log1p(-q) - np.log(q)
        w_piv = weights[pivots]
        is_pivot = np.zeros(n, dtype=bool)
        is_pivot[pivots] = True
        free = np.flatnonzero(~is_pivot)
        columns = R[:rank][:, free].astype(np.uint8)

        best_cost = float(base @ w_piv)
        best: Optional[np.ndarray] = None
        best_sol = base

        singles = base[None, :] ^ columns.T
        cost1 = weights[free] + singles @ w_piv
        k = int(np.argmin(cost1))
        if cost1[k] < best_cost:
            best_cost = float(cost1[k])
            best = np.array([free[k]])
            best_sol = singles[k]

        t = min(cfg.osd_order, free.size)
        if t >= 2:
            a, b = np.triu_indices(t, 1)
            pairs = base[None, :] ^ columns.T[a] ^ columns.T[b]
            cost2 = weights[free[a]] + weights[free[b]] + pairs @ w_piv
            k = int(np.argmin(cost2))
            if cost2[k] < best_cost:
                best_cost = float(cost2[k])
                best = np.array([free[a[k]], free[b[k]]])
                best_sol = pairs[k]

        if best is not None:
            x_perm[:] = 0
            x_perm[pivots] = best_sol
            x_perm[best] = 1

    x = np.zeros(n, dtype=np.uint8)
    x[order] = x_perm
    return BinVector(x)


def decode(H: BinMatrix, s: BinVector, cfg: DecodeConfig) -> BinVector:
    """BP, falling back to OSD when BP does not converge."""
    bp = bp_min_sum(H, s, cfg)
    if bp.converged:
        return bp.hard
    logger.debug(f"BP did not converge after {bp.iterations} iterations, running OSD")
    return osd(H, s, bp, cfg)


# ─── Windowed decoding ───

def window_decode(F: FaultComplex, side: Side, syndrome: BinVector,
                  cfg: DecodeConfig, win: WindowConfig) -> BinVector:
    """Overlapping-window decode of one side of F.

    Each window covers rounds [t, t+w) of detectors and uncommitted
    faults. Faults of rounds < t+c are committed (all of them in the
    final window) and their syndrome is removed from the residual.
    """
    side = Side(side)
    H = F.detector_matrix(side)
    if syndrome.length != H.rows:
        raise SpecError(f"Syndrome length {syndrome.length} does not match {H.rows} detectors")
    n = H.cols
    priors = cfg.prior_array(n)
    col_rounds = F.column_rounds(side)
    committed = np.zeros(n, dtype=bool)
    correction = np.zeros(n, dtype=np.uint8)
    residual = syndrome.bits.copy()

    t = 0
    while True:
        final = t + win.w >= F.n_rounds
        rows, cols = window_slice(F, side, t, win.w, committed)
        sub_s = BinVector(residual[rows])
        if cols.size == 0:
            if not sub_s.is_zero():
                raise DecoderInconsistencyError(
                    "Window has unexplained detectors but no open faults",
                    {"window_start": t, "side": side.value},
                )
            x = np.zeros(0, dtype=np.uint8)
        else:
            sub_H = H.submatrix(rows, cols)
            try:
                x = decode(sub_H, sub_s, cfg.with_priors(priors[cols])).bits
            except DecoderInconsistencyError as e:
                raise e.with_context(window_start=t, side=side.value)

        keep = np.ones(cols.size, dtype=bool) if final else col_rounds[cols] < t + win.c
        commit_cols, commit_bits = cols[keep], x[keep]
        correction[commit_cols] = commit_bits
        committed[commit_cols] = True
        if commit_cols.size:
            residual ^= mod2_matmul(H.bits[:, commit_cols], commit_bits[:, None])[:, 0]
        logger.debug(f"window t={t}: {rows.size} detectors, {cols.size} faults, "
                     f"committed {int(commit_bits.sum())} flips")
        if final:
            break
        t += win.c

    return BinVector(correction)
