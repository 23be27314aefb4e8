"""Least-squares fitting of the single-exponential decay F(j) = A0 p^(j-1) + B0."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares


class DecayFitError(ValueError):
    """Raised when the decay data cannot support a fit (flat or degenerate)."""


@dataclass(frozen=True)
class DecayFit:
    p: float
    a0: float
    b0: float
    covariance: np.ndarray
    residual_rms: float
    iterations: int
    converged: bool

    @property
    def stderr(self) -> np.ndarray:
        return np.sqrt(np.maximum(np.diagonal(self.covariance), 0.0))

    def curve(self, lengths) -> np.ndarray:
        lengths = np.asarray(lengths, dtype=float)
        return self.a0 * self.p ** (lengths - 1) + self.b0


def error_rate_from_p(p: float, d: int, n: int = 1) -> float:
    """Average gate error r = (1 - p)(1 - 1/d^n)."""
    return (1.0 - p) * (1.0 - 1.0 / d**n)


def p_from_error_rate(r: float, d: int, n: int = 1) -> float:
    return 1.0 - r / (1.0 - 1.0 / d**n)


def _initial_guess(lengths: np.ndarray, means: np.ndarray) -> tuple[float, float, float]:
    tail = max(2, len(means) // 5)
    b0 = float(np.mean(means[-tail:]))
    shifted = means - b0
    mask = shifted > 0
    if mask.sum() >= 2:
        slope = np.polyfit(lengths[mask], np.log(shifted[mask]), 1)[0]
        p = float(np.exp(slope))
    else:
        p = 0.9
    p = min(max(p, 1e-6), 1.0 - 1e-6)
    a0 = float(shifted[0] / p ** (lengths[0] - 1)) if shifted[0] > 0 else 0.5
    return p, a0, b0


def fit_decay(lengths, means, weights=None) -> DecayFit:
    """Fit A0 p^(j-1) + B0 to per-length mean survivals.

    weights, when given, multiply the residuals as sqrt(w); a natural choice is
    the number of sequences over the per-length variance. Data whose total
    range is indistinguishable from noise raises DecayFitError rather than
    returning an arbitrary fit.
    """
    lengths = np.asarray(lengths, dtype=float)
    means = np.asarray(means, dtype=float)
    if lengths.shape != means.shape or lengths.ndim != 1:
        raise ValueError("lengths and means must be 1-d arrays of equal size")
    if len(lengths) < 4:
        raise DecayFitError(f"need at least 4 lengths to fit 3 parameters, got {len(lengths)}")
    if len(np.unique(lengths)) != len(lengths):
        raise ValueError("sequence lengths must be distinct")

    spread = float(means.max() - means.min())
    if spread < 1e-12:
        raise DecayFitError("survival data is flat; no decay to fit")
    sqrt_w = None
    if weights is not None:
        weights = np.asarray(weights, dtype=float)
        if weights.shape != means.shape or np.any(weights <= 0):
            raise ValueError("weights must be positive and match the data shape")
        sqrt_w = np.sqrt(weights)
        noise_scale = float(np.median(1.0 / sqrt_w))
        if spread < 10.0 * noise_scale:
            raise DecayFitError(
                f"survival range {spread:.3e} is below 10x the noise scale {noise_scale:.3e}"
            )

    def residuals(theta):
        p, a0, b0 = theta
        res = a0 * p ** (lengths - 1) + b0 - means
        return res * sqrt_w if sqrt_w is not None else res

    def jacobian(theta):
        p, a0, b0 = theta
        powm1 = p ** (lengths - 2)
        jac = np.empty((len(lengths), 3))
        jac[:, 0] = a0 * (lengths - 1) * powm1
        jac[:, 1] = powm1 * p
        jac[:, 2] = 1.0
        if sqrt_w is not None:
            jac *= sqrt_w[:, None]
        return jac

    x0 = np.array(_initial_guess(lengths, means))
    lower = np.array([0.0, -np.inf, -np.inf])
    upper = np.array([1.0, np.inf, np.inf])
    x0 = np.clip(x0, lower + 1e-9, upper - 1e-9)
    result = least_squares(
        residuals,
        x0,
        jac=jacobian,
        bounds=(lower, upper),
        method="trf",
        xtol=1e-13,
        ftol=None,
        gtol=None,
        max_nfev=500,
    )
    p, a0, b0 = (float(v) for v in result.x)

    dof = len(lengths) - 3
    jac = result.jac
    jtj = jac.T @ jac
    try:
        jtj_inv = np.linalg.inv(jtj)
    except np.linalg.LinAlgError:
        jtj_inv = np.linalg.pinv(jtj)
    s_sq = 2.0 * result.cost / dof if dof > 0 else 0.0
    covariance = s_sq * jtj_inv

    raw_res = a0 * p ** (lengths - 1) + b0 - means
    return DecayFit(
        p=p,
        a0=a0,
        b0=b0,
        covariance=covariance,
        residual_rms=float(np.sqrt(np.mean(raw_res**2))),
        iterations=int(result.nfev),
        converged=bool(result.status > 0),
    )
