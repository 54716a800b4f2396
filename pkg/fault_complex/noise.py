"""
Noise Models
=============

Fault samplers for the Monte Carlo harness:

- phenomenological: every fault location flips independently with
  probability p;
- GKP: every location receives a Gaussian displacement δ ~ N(0, σ²),
  σ² = 2·10^(-dB/10), binned on a lattice of spacing √(2π) (ħ = 2,
  σ_vac² = 2). The location flips iff δ lands in an odd bin. The
  decoder prior is the posterior flip probability given the remainder.

Every sampler is a pure function of its seed. Seeds come from
``trial_seed``, a SHA-256 digest of the master seed and the trial
coordinates, so trials can run in any order on any number of workers.
"""

import hashlib
import logging
import math
from dataclasses import dataclass
from typing import Any, Optional, Tuple

import numpy as np
from scipy.special import logsumexp, ndtr

from .errors import SpecError
from .foliation import FaultComplex, Side
from .gf2 import BinVector

logger = logging.getLogger(__name__)

VACUUM_VARIANCE = 2.0
BIN_SPACING = math.sqrt(2.0 * math.pi)
PRIOR_FLOOR = 1e-15
PRIOR_CEIL = 0.5


def trial_seed(master_seed: int, *parts: Any) -> int:
    """Deterministic 64-bit seed for one trial of one batch."""
    canonical = "|".join(str(p) for p in (master_seed, *parts))
    digest = hashlib.sha256(canonical.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big", signed=False)


# ─── Specs ───

@dataclass(frozen=True)
class PhenomenologicalSpec:
    p: float
    clear_boundaries: bool = False

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise SpecError(f"Flip probability must lie in [0, 1], got {self.p}")

    @property
    def noise_param(self) -> float:
        return self.p

    def priors(self, n: int) -> np.ndarray:
        return np.full(n, min(max(self.p, PRIOR_FLOOR), PRIOR_CEIL))


@dataclass(frozen=True)
class GkpSpec:
    squeezing_db: float
    analog_priors: bool = True
    clear_boundaries: bool = False

    def __post_init__(self):
        if not self.squeezing_db >= 0.0:
            raise SpecError(f"Squeezing must be >= 0 dB, got {self.squeezing_db}")

    @property
    def sigma2(self) -> float:
        return squeezing_to_sigma2(self.squeezing_db)

    @property
    def noise_param(self) -> float:
        return self.squeezing_db


def squeezing_to_sigma2(db: float) -> float:
    """σ² = σ_vac²·10^(-dB/10)."""
    if math.isinf(db):
        return 0.0
    return VACUUM_VARIANCE * 10.0 ** (-db / 10.0)


def sigma2_to_squeezing(sigma2: float) -> float:
    if sigma2 <= 0.0:
        return math.inf
    return -10.0 * math.log10(sigma2 / VACUUM_VARIANCE)


# ─── GKP binning ───

def _bin_range(sigma: float) -> np.ndarray:
    reach = int(math.ceil(8.0 * sigma / BIN_SPACING)) + 2
    return np.arange(-reach, reach + 1)


def gkp_flip_probability(sigma2: float) -> float:
    """Probability that δ ~ N(0, σ²) lands in an odd bin."""
    if sigma2 <= 0.0:
        return 0.0
    sigma = math.sqrt(sigma2)
    odd = _bin_range(sigma)
    odd = odd[(odd % 2 == 1) & (odd > 0)]
    upper = ndtr((odd + 0.5) * BIN_SPACING / sigma)
    lower = ndtr((odd - 0.5) * BIN_SPACING / sigma)
    return float(2.0 * np.sum(upper - lower))


def gkp_bin(displacement: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(bin index, remainder) with remainder in [-√(2π)/2, √(2π)/2]."""
    m = np.rint(np.asarray(displacement) / BIN_SPACING).astype(np.int64)
    return m, displacement - m * BIN_SPACING


def gkp_posterior(remainder: np.ndarray, sigma2: float) -> np.ndarray:
    """P(odd bin | remainder) = Σ_odd φ(r+ms) / Σ_m φ(r+ms), clipped."""
    r = np.atleast_1d(np.asarray(remainder, dtype=np.float64))
    if sigma2 <= 0.0:
        return np.full(r.shape, PRIOR_FLOOR)
    m = _bin_range(math.sqrt(sigma2))
    shifted = r[:, None] + m[None, :] * BIN_SPACING
    log_phi = -shifted ** 2 / (2.0 * sigma2)
    odd = (m % 2 == 1)
    log_odd = logsumexp(log_phi[:, odd], axis=1)
    log_all = logsumexp(log_phi, axis=1)
    return np.clip(np.exp(log_odd - log_all), PRIOR_FLOOR, PRIOR_CEIL)


# ─── Boundary clearing ───

def boundary_mask(F: FaultComplex, side: Side) -> np.ndarray:
    """Fault locations in the first and last time layer of a side.

    Empty when the side has fewer than three distinct layers, since
    clearing would leave nothing to sample.
    """
    layers = F.fault_layers(side)
    mask = np.zeros(layers.size, dtype=bool)
    distinct = np.unique(layers)
    if distinct.size < 3:
        return mask
    return (layers == distinct[0]) | (layers == distinct[-1])


def pin_priors(priors: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Copy of the priors with masked locations set to PRIOR_FLOOR."""
    pinned = np.array(priors, dtype=np.float64, copy=True)
    pinned[mask] = PRIOR_FLOOR
    return pinned


def _checked_mask(F: FaultComplex, side: Side, n: int) -> np.ndarray:
    mask = boundary_mask(F, side)
    if mask.size != n:
        raise SpecError(f"Side has {mask.size} fault locations, sampler asked for {n}")
    return mask


# ─── Samplers ───

def sample_iid(n: int, spec: PhenomenologicalSpec, F: Optional[FaultComplex] = None,
               seed: int = 0, side: Side = Side.PRIMAL) -> BinVector:
    """Independent flips with probability p, boundary layers optionally cleared."""
    rng = np.random.default_rng(seed)
    flips = rng.random(n) < spec.p
    if spec.clear_boundaries and F is not None:
        flips &= ~_checked_mask(F, side, n)
    return BinVector(flips.astype(np.uint8))


def iid_priors(n: int, spec: PhenomenologicalSpec, F: Optional[FaultComplex] = None,
               side: Side = Side.PRIMAL) -> np.ndarray:
    """Uniform decoder priors, floored on cleared boundary layers."""
    priors = spec.priors(n)
    if spec.clear_boundaries and F is not None:
        priors = pin_priors(priors, _checked_mask(F, side, n))
    return priors


def sample_gkp(n: int, spec: GkpSpec, seed: int = 0, F: Optional[FaultComplex] = None,
               side: Side = Side.PRIMAL) -> Tuple[BinVector, np.ndarray]:
    """GKP flips plus per-location decoder priors."""
    if n < 1:
        raise SpecError(f"GKP sampler needs n >= 1, got {n}")
    sigma2 = spec.sigma2
    rng = np.random.default_rng(seed)
    displacement = rng.normal(0.0, math.sqrt(sigma2), size=n)
    m, remainder = gkp_bin(displacement)
    flips = (m % 2 != 0)
    if spec.analog_priors:
        priors = gkp_posterior(remainder, sigma2)
    else:
        marginal = gkp_flip_probability(sigma2)
        priors = np.full(n, min(max(marginal, PRIOR_FLOOR), PRIOR_CEIL))
    if spec.clear_boundaries and F is not None:
        mask = _checked_mask(F, side, n)
        flips &= ~mask
        priors = pin_priors(priors, mask)
    return BinVector(flips.astype(np.uint8)), priors
