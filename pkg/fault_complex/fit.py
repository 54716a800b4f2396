"""
Threshold Fits
===============

Finite-size scaling fits of logical error rates in the rescaled variable

    x = (p - p_th) · d^(1/mu)

with either a quadratic model a·x² + b·x + c or the saturating model

    a · [1 - (1 - (1 + tanh(b·x)) / 2)^c]

Fits are least squares weighted by each point's standard error (a
binomial floor stands in for zero errors), minimized by multi-start bounded
Nelder-Mead. Confidence intervals come from a binomial bootstrap: every
point's failure count is redrawn, the fit is repeated, and the 0.5 /
99.5 percentiles of p_th form the 99% interval.

Usage:
    data = FitInput(points=[FitPoint(p=0.08, d=3, rate=0.12, stderr=0.01, trials=1000), ...])
    result = fit_threshold(data, model="tanh", bootstrap_n=1000, seed=3)
    result.p_th, result.ci_low, result.ci_high
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from scipy.optimize import Bounds, minimize

from .errors import FitConvergenceError, FitDataError, SpecError
from .noise import trial_seed

logger = logging.getLogger(__name__)

MU_BOUNDS = (0.3, 5.0)
N_STARTS = 5
CI_PERCENTILES = (0.5, 99.5)
DEFAULT_MAX_CHI2_DOF = 5.0
PARAM_NAMES = ("p_th", "mu", "a", "b", "c")


class Model(str, Enum):
    QUADRATIC = "quadratic"
    TANH = "tanh"


@dataclass(frozen=True)
class FitPoint:
    p: float
    d: int
    rate: float
    stderr: float
    trials: int


@dataclass
class FitInput:
    points: List[FitPoint]
    k: int = 1

    def __post_init__(self):
        for pt in self.points:
            if not 0.0 <= pt.rate <= 1.0:
                raise FitDataError(f"Rate {pt.rate} outside [0, 1]")
            if pt.trials < 1:
                raise FitDataError(f"Point at p={pt.p}, d={pt.d} has no trials")
            if not pt.stderr >= 0.0:
                raise FitDataError(f"Point at p={pt.p}, d={pt.d} has negative stderr {pt.stderr}")
        self.points = sorted(self.points, key=lambda pt: (pt.d, pt.p, pt.rate, pt.trials))

    def arrays(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        p = np.array([pt.p for pt in self.points], dtype=np.float64)
        d = np.array([pt.d for pt in self.points], dtype=np.float64)
        rate = np.array([pt.rate for pt in self.points], dtype=np.float64)
        trials = np.array([pt.trials for pt in self.points], dtype=np.float64)
        return p, d, rate, trials

    def stderrs(self) -> np.ndarray:
        return np.array([pt.stderr for pt in self.points], dtype=np.float64)

    def check(self) -> None:
        sizes: Dict[int, set] = {}
        for pt in self.points:
            sizes.setdefault(pt.d, set()).add(pt.p)
        if len(sizes) < 3:
            raise FitDataError(f"Need at least 3 code sizes, got {sorted(sizes)}")
        thin = [d for d, ps in sizes.items() if len(ps) < 4]
        if thin:
            raise FitDataError(f"Need at least 4 noise points per size; too few for d={sorted(thin)}")


@dataclass
class FitResult:
    model: str
    p_th: float
    params: Dict[str, float]
    ci_low: float
    ci_high: float
    bootstrap_mean: float
    resamples: int
    seed: int
    chi2_dof: float
    converged_starts: int
    failed_resamples: int = 0
    pulls: np.ndarray = field(default_factory=lambda: np.zeros(0), repr=False)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "p_th": self.p_th,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "params": dict(self.params),
            "model": self.model,
            "resamples": self.resamples,
            "seed": self.seed,
            "bootstrap_mean": self.bootstrap_mean,
            "chi2_dof": self.chi2_dof,
            "converged_starts": self.converged_starts,
            "failed_resamples": self.failed_resamples,
        }


# ─── Models ───

def rescale(p, p_th: float, d, mu: float):
    """(p - p_th)·d^(1/mu)."""
    if mu == 0:
        raise SpecError("Scaling exponent mu must be nonzero")
    return (np.asarray(p, dtype=np.float64) - p_th) * np.power(np.asarray(d, dtype=np.float64), 1.0 / mu)


def model_quadratic(x, a: float, b: float, c: float):
    x = np.asarray(x, dtype=np.float64)
    return a * x ** 2 + b * x + c


def model_tanh(x, a: float, b: float, c: float):
    """a·[1 - (1 - (1 + tanh(bx))/2)^c]; saturates at a for bx → ∞."""
    x = np.asarray(x, dtype=np.float64)
    inner = 1.0 - (1.0 + np.tanh(b * x)) / 2.0
    return a * (1.0 - np.power(np.clip(inner, 0.0, 1.0), c))


_MODELS = {Model.QUADRATIC: model_quadratic, Model.TANH: model_tanh}


def _sigma(stderr: np.ndarray, rate: np.ndarray, trials: np.ndarray) -> np.ndarray:
    """Reported standard errors; zero entries fall back to sqrt(max(r(1-r), 1/N)/N)."""
    floor = np.sqrt(np.maximum(rate * (1.0 - rate), 1.0 / trials) / trials)
    return np.where(stderr > 0.0, stderr, floor)


# ─── Fitting ───

def _bounds(model: Model, p: np.ndarray) -> Bounds:
    lo = [p.min(), MU_BOUNDS[0], -np.inf, -np.inf, -np.inf]
    hi = [p.max(), MU_BOUNDS[1], np.inf, np.inf, np.inf]
    if model is Model.TANH:
        lo[2], hi[2] = 0.0, 1.0
        lo[4] = 1e-6
    return Bounds(lo, hi)


def _starts(model: Model, p: np.ndarray, d: np.ndarray, rate: np.ndarray, k: int) -> List[np.ndarray]:
    grid = np.quantile(np.unique(p), np.linspace(0.2, 0.8, N_STARTS))
    starts = []
    for p0 in grid:
        x = rescale(p, p0, d, 1.0)
        if model is Model.QUADRATIC:
            a, b, c = np.polyfit(x, rate, 2)
            starts.append(np.array([p0, 1.0, a, b, c]))
        else:
            spread = float(np.std(x)) or 1.0
            slope = 1.0 if np.ptp(rate) == 0 or np.corrcoef(x, rate)[0, 1] >= 0 else -1.0
            starts.append(np.array([p0, 1.0, 1.0 - 0.5 ** k, slope / spread, 1.0]))
    return starts


def _objective(model: Model, p: np.ndarray, d: np.ndarray, rate: np.ndarray,
               sigma: np.ndarray):
    func = _MODELS[model]

    def chi2(theta: np.ndarray) -> float:
        p_th, mu, a, b, c = theta
        pred = func(rescale(p, p_th, d, mu), a, b, c)
        value = float(np.sum(((rate - pred) / sigma) ** 2))
        return value if math.isfinite(value) else 1e300

    return chi2


def _fit_once(model: Model, p: np.ndarray, d: np.ndarray, rate: np.ndarray,
              sigma: np.ndarray, k: int,
              extra_start: Optional[np.ndarray] = None) -> Tuple[np.ndarray, float, int]:
    chi2 = _objective(model, p, d, rate, sigma)
    bounds = _bounds(model, p)
    starts = _starts(model, p, d, rate, k)
    if extra_start is not None:
        starts.insert(0, extra_start)
    best: Optional[Tuple[np.ndarray, float]] = None
    converged = 0
    for n, start in enumerate(starts):
        start = np.clip(start, bounds.lb, bounds.ub)
        res = minimize(chi2, start, method="Nelder-Mead", bounds=bounds,
                       options={"maxiter": 50000, "maxfev": 100000,
                                "xatol": 1e-9, "fatol": 1e-9, "adaptive": True})
        logger.debug(f"start {n}: success={res.success} chi2={res.fun:.6g} p_th={res.x[0]:.6g}")
        if not res.success:
            continue
        converged += 1
        if best is None or res.fun < best[1]:
            best = (res.x, float(res.fun))
    if best is None:
        raise FitConvergenceError(f"No optimizer start converged ({len(starts)} starts, model {model.value})")
    return best[0], best[1], converged


def _bootstrap_one(model: Model, p: np.ndarray, d: np.ndarray, rate: np.ndarray,
                   trials: np.ndarray, sigma: np.ndarray, k: int,
                   theta: np.ndarray, seed: int) -> Optional[float]:
    rng = np.random.default_rng(seed)
    counts = rng.binomial(trials.astype(np.int64), rate)
    try:
        fitted, _, _ = _fit_once(model, p, d, counts / trials, sigma, k, extra_start=theta)
    except FitDataError:
        return None
    return float(fitted[0])


def fit_threshold(data: FitInput, model: str = "tanh", bootstrap_n: int = 1000,
                  seed: int = 0, workers: int = 1) -> FitResult:
    """Weighted least-squares threshold fit with a bootstrap 99% interval."""
    model = Model(model)
    data.check()
    p, d, rate, trials = data.arrays()
    sigma = _sigma(data.stderrs(), rate, trials)
    theta, chi2, converged = _fit_once(model, p, d, rate, sigma, data.k)
    dof = max(len(data.points) - len(PARAM_NAMES), 1)
    pred = _MODELS[model](rescale(p, theta[0], d, theta[1]), *theta[2:])
    pulls = (rate - pred) / sigma

    estimates: List[float] = []
    failed = 0
    if bootstrap_n > 0:
        seeds = [trial_seed(seed, "bootstrap", b) for b in range(bootstrap_n)]
        outcomes = Parallel(n_jobs=workers)(
            delayed(_bootstrap_one)(model, p, d, rate, trials, sigma, data.k, theta, s) for s in seeds
        )
        estimates = [v for v in outcomes if v is not None]
        failed = bootstrap_n - len(estimates)
        if failed:
            logger.warning(f"{failed}/{bootstrap_n} bootstrap resamples did not converge")

    p_th = float(theta[0])
    if estimates:
        lo, hi = np.percentile(estimates, CI_PERCENTILES)
        ci_low, ci_high = min(float(lo), p_th), max(float(hi), p_th)
        mean = float(np.mean(estimates))
    else:
        ci_low = ci_high = mean = p_th

    result = FitResult(
        model=model.value,
        p_th=p_th,
        params=dict(zip(PARAM_NAMES, (float(v) for v in theta))),
        ci_low=ci_low,
        ci_high=ci_high,
        bootstrap_mean=mean,
        resamples=bootstrap_n,
        seed=seed,
        chi2_dof=chi2 / dof,
        converged_starts=converged,
        failed_resamples=failed,
        pulls=pulls,
    )
    logger.info(f"{model.value} fit: p_th={p_th:.6g} [{ci_low:.6g}, {ci_high:.6g}] "
                f"chi2/dof={result.chi2_dof:.3g}")
    return result


# ─── Diagnostics ───

@dataclass(frozen=True)
class ResidualDiagnostics:
    chi2_dof: float
    max_abs_pull: float
    acceptable: bool


def residual_diagnostics(result: FitResult,
                         max_chi2_dof: float = DEFAULT_MAX_CHI2_DOF) -> ResidualDiagnostics:
    """Reject fits whose reduced chi² exceeds ``max_chi2_dof``."""
    max_pull = float(np.max(np.abs(result.pulls))) if result.pulls.size else 0.0
    return ResidualDiagnostics(result.chi2_dof, max_pull, result.chi2_dof <= max_chi2_dof)


@dataclass(frozen=True)
class PlateauEntry:
    rounds: int
    p_th: float
    change: Optional[float]
    converged: bool

    def to_dict(self) -> Dict[str, Any]:
        return {"rounds": self.rounds, "p_th": self.p_th,
                "change": self.change, "converged": self.converged}


def plateau_report(fits_by_rounds: Mapping[int, FitResult], tol: float = 1e-3) -> List[PlateauEntry]:
    """Threshold per rounds value, flagged converged when it stops moving.

    An entry is converged when |Δp_th| to the previous rounds value is at
    most ``tol`` or the two 99% intervals overlap.
    """
    entries: List[PlateauEntry] = []
    previous: Optional[FitResult] = None
    for rounds in sorted(fits_by_rounds):
        fit = fits_by_rounds[rounds]
        if previous is None:
            entries.append(PlateauEntry(rounds, fit.p_th, None, False))
        else:
            change = fit.p_th - previous.p_th
            overlap = fit.ci_low <= previous.ci_high and previous.ci_low <= fit.ci_high
            entries.append(PlateauEntry(rounds, fit.p_th, change, abs(change) <= tol or overlap))
        previous = fit
    return entries


# ─── Data plumbing ───

def collapse_rows(result: FitResult, data: FitInput) -> List[Dict[str, float]]:
    """(x, rate, model_value) per point, sorted by x."""
    p, d, rate, _ = data.arrays()
    params = result.params
    x = rescale(p, params["p_th"], d, params["mu"])
    values = _MODELS[Model(result.model)](x, params["a"], params["b"], params["c"])
    rows = [{"x": float(xi), "rate": float(ri), "model_value": float(vi)}
            for xi, ri, vi in zip(x, rate, values)]
    return sorted(rows, key=lambda row: (row["x"], row["rate"]))


def points_from_rows(rows: Iterable[Mapping[str, Any]], rounds: Optional[int] = None) -> List[FitPoint]:
    """FitPoints from experiment CSV rows (noise_param as p, L as d)."""
    selected = [row for row in rows if rounds is None or int(row["rounds"]) == rounds]
    if not selected:
        raise FitDataError("No CSV rows match the requested rounds")
    distinct = {int(row["rounds"]) for row in selected}
    if len(distinct) > 1:
        raise FitDataError(f"CSV mixes rounds {sorted(distinct)}; choose one with --rounds")
    try:
        return [
            FitPoint(p=float(row["noise_param"]), d=int(row["L"]), rate=float(row["rate"]),
                     stderr=float(row["stderr"]), trials=int(row["trials"]))
            for row in selected
        ]
    except (KeyError, ValueError) as e:
        raise FitDataError(f"Malformed result row: {e}") from e


def fits_by_rounds(rows: Sequence[Mapping[str, Any]], model: str, k: int = 1,
                   bootstrap_n: int = 0, seed: int = 0,
                   workers: int = 1) -> Dict[int, FitResult]:
    """One threshold fit per distinct rounds value in the CSV rows."""
    out: Dict[int, FitResult] = {}
    for rounds in sorted({int(row["rounds"]) for row in rows}):
        data = FitInput(points_from_rows(rows, rounds), k=k)
        out[rounds] = fit_threshold(data, model=model, bootstrap_n=bootstrap_n,
                                    seed=seed, workers=workers)
    return out
