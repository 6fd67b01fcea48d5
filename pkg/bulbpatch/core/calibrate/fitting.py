"""
Gaussian fit of a bulb's thermal cross-section.

For fixed (center, sigma) the model is linear in (baseline, A), so both come
from a two-column least squares. A coarse grid over (center, sigma) picks the
start, then Nelder-Mead refines (center, log sigma) on that profiled error.
"""

import logging
from typing import List, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from bulbpatch.core.calibrate.entities import DEFAULT_CAMERA_SPAN, BulbFit, ProfileSample
from bulbpatch.utils.error_handling import auto_log_errors
from bulbpatch.utils.exceptions import DegenerateFitError, ValidationError
from bulbpatch.utils.observability import log_event

logger = logging.getLogger(__name__)

MIN_SAMPLES = 5
FLAT_TOLERANCE = 1e-12
GRID_CENTERS = 41
GRID_SIGMAS = 40
MAX_ITERATIONS = 4000


def _arrays(samples: Sequence[ProfileSample]) -> Tuple[np.ndarray, np.ndarray]:
    if len(samples) < MIN_SAMPLES:
        raise DegenerateFitError(f"need at least {MIN_SAMPLES} samples, got {len(samples)}")
    x = np.array([s.position for s in samples], dtype=np.float64)
    t = np.array([s.temperature for s in samples], dtype=np.float64)
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(t))):
        raise ValidationError("profile contains non-finite values")
    if np.any(np.diff(x) <= 0):
        raise ValidationError("profile positions must be strictly increasing")
    if np.var(t) <= FLAT_TOLERANCE * max(1.0, float(np.mean(t)) ** 2):
        raise DegenerateFitError("profile is flat, no peak to fit")
    return x, t


def _linear_part(bumps: np.ndarray, t: np.ndarray) -> Tuple[float, float, np.ndarray]:
    """Least-squares (baseline, A) for fixed Gaussian bumps; returns residuals too."""
    design = np.column_stack([np.ones_like(bumps), bumps])
    coef, *_ = np.linalg.lstsq(design, t, rcond=None)
    return float(coef[0]), float(coef[1]), t - design @ coef


def _bumps(x: np.ndarray, center, sigma: float) -> np.ndarray:
    return np.exp(-((x - center) ** 2) / (2.0 * sigma ** 2))


def _sse(x: np.ndarray, t: np.ndarray, center, sigma: float) -> float:
    if not np.isfinite(sigma) or sigma <= 0:
        return np.inf
    _, _, resid = _linear_part(_bumps(x, center, sigma), t)
    return float(resid @ resid)


def _grid_start(x: np.ndarray, t: np.ndarray) -> Tuple[float, float]:
    span = float(x[-1] - x[0])
    step = float(np.min(np.diff(x)))
    centers = np.linspace(x[0], x[-1], GRID_CENTERS)
    sigmas = np.geomspace(max(step / 2.0, span / 200.0), span, GRID_SIGMAS)
    best = (np.inf, centers[0], sigmas[0])
    for c in centers:
        for s in sigmas:
            err = _sse(x, t, c, s)
            if err < best[0]:
                best = (err, c, s)
    return best[1], best[2]


def _refine(objective, start: np.ndarray, scale: float):
    # tolerance relative to the starting error
    fatol = 1e-14 * max(float(objective(start)), 1e-300)
    return minimize(
        objective,
        start,
        method="Nelder-Mead",
        options={
            "xatol": 1e-10 * max(scale, 1.0),
            "fatol": fatol,
            "maxiter": MAX_ITERATIONS,
            "maxfev": 2 * MAX_ITERATIONS,
        },
    )


def _warn_unconverged(fit: BulbFit) -> BulbFit:
    if not fit.converged:
        log_event("calibrate.not_converged", level=logging.WARNING, rmse=fit.rmse, sigma=fit.sigma)
    return fit


@auto_log_errors("fit_bulb_profile", severity="warning")
def fit_bulb_profile(samples: Sequence[ProfileSample]) -> BulbFit:
    """Least-squares Gaussian-plus-baseline fit of one section through the spot."""
    x, t = _arrays(samples)
    c0, s0 = _grid_start(x, t)

    def objective(v: np.ndarray) -> float:
        return _sse(x, t, v[0], float(np.exp(v[1])))

    result = _refine(objective, np.array([c0, np.log(s0)]), float(x[-1] - x[0]))
    center, sigma = float(result.x[0]), float(np.exp(result.x[1]))
    baseline, amplitude, resid = _linear_part(_bumps(x, center, sigma), t)
    return _warn_unconverged(
        BulbFit(
            amplitude=amplitude,
            center=center,
            sigma=sigma,
            baseline=baseline,
            rmse=float(np.sqrt(np.mean(resid ** 2))),
            converged=bool(result.success),
            n_samples=int(x.size),
        )
    )


@auto_log_errors("fit_bulb_profiles", severity="warning")
def fit_bulb_profiles(profiles: Sequence[Sequence[ProfileSample]]) -> BulbFit:
    """
    Pooled fit over several section lines through the same spot.

    Lines share amplitude, sigma and baseline; each keeps its own center.
    ``center`` of the result is the mean of the per-line centers.
    """
    if not profiles:
        raise DegenerateFitError("no profiles to fit")
    arrays = [_arrays(p) for p in profiles]
    singles = [fit_bulb_profile(p) for p in profiles]
    xs = [x for x, _ in arrays]
    t_all = np.concatenate([t for _, t in arrays])
    lines = len(arrays)

    def bumps(v: np.ndarray) -> np.ndarray:
        sigma = float(np.exp(v[-1]))
        return np.concatenate([_bumps(x, v[i], sigma) for i, x in enumerate(xs)])

    def objective(v: np.ndarray) -> float:
        _, _, resid = _linear_part(bumps(v), t_all)
        return float(resid @ resid)

    start = np.array([f.center for f in singles] + [np.log(np.median([f.sigma for f in singles]))])
    scale = max(float(x[-1] - x[0]) for x in xs)
    result = _refine(objective, start, scale)
    baseline, amplitude, resid = _linear_part(bumps(result.x), t_all)
    centers: List[float] = [float(c) for c in result.x[:lines]]
    return _warn_unconverged(
        BulbFit(
            amplitude=amplitude,
            center=float(np.mean(centers)),
            sigma=float(np.exp(result.x[-1])),
            baseline=baseline,
            rmse=float(np.sqrt(np.mean(resid ** 2))),
            converged=bool(result.success),
            centers=centers,
            n_samples=int(t_all.size),
        )
    )


def profile_rmse(fit: BulbFit, samples: Sequence[ProfileSample]) -> float:
    """Residual RMS of a single-line fit recomputed from its parameters."""
    x = np.array([s.position for s in samples], dtype=np.float64)
    t = np.array([s.temperature for s in samples], dtype=np.float64)
    model = fit.baseline + fit.amplitude * _bumps(x, fit.center, fit.sigma)
    return float(np.sqrt(np.mean((t - model) ** 2)))


def temperature_to_intensity(amplitude: float, span: Tuple[float, float] = DEFAULT_CAMERA_SPAN) -> float:
    """Normalized patch amplitude s = A / (T_max - T_min), clipped into [0, 1]."""
    t_min, t_max = span
    if not t_max > t_min:
        raise ValidationError(f"camera span must satisfy T_max > T_min, got ({t_min}, {t_max})")
    return float(np.clip(amplitude / (t_max - t_min), 0.0, 1.0))
