"""Inverse problems: detector dark-noise correction of measured dB levels
and least-squares recovery of phase jitter (and optionally pump parameter)
from a measured squeezing / anti-squeezing pair.

Residuals are always formed in dB so the squeezed (~0.15 linear) and
anti-squeezed (~20 linear) readings carry comparable weight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .model import PUMP_X_MAX, QuadratureVariances, forward_variances, from_db, gain_from_x, to_db
from .phase_noise import PhaseNoiseModel, degrade_approx, degrade_exact

# Seeding grid for the joint fit; its spacing is the coarse resolution the
# simplex descent refines from.
JOINT_X_GRID = np.linspace(0.0, 0.999, 100)
JOINT_THETA_GRID = np.linspace(0.0, math.pi / 4, 33)

THETA_MAX = math.pi / 4


class InfeasibleCorrectionError(ValueError):
    """Measured power at or below the dark-noise floor: no optical level
    can be inferred from it."""


class FitConvergenceError(RuntimeError):
    """Simplex descent hit its iteration cap; carries the best point seen."""

    def __init__(self, message: str, best: FitResult):
        super().__init__(message)
        self.best = best


@dataclass(frozen=True)
class MeasuredLevels:
    """A measured squeezing / anti-squeezing pair in dB relative to shot
    noise, optionally tagged with the pump power (watts) and the quoted
    measurement uncertainty."""

    squeezing_db: float
    anti_squeezing_db: float
    pump_power: float | None = None
    uncertainty_db: float | None = None

    def __post_init__(self) -> None:
        if self.squeezing_db >= 0.0:
            raise ValueError(
                f"squeezing level must lie below shot noise, got {self.squeezing_db} dB"
            )
        if self.anti_squeezing_db <= 0.0:
            raise ValueError(
                f"anti-squeezing level must lie above shot noise, got "
                f"{self.anti_squeezing_db} dB"
            )


@dataclass(frozen=True)
class FitResult:
    """Fitted phase jitter (radians), optional pump parameter, the final
    sum of squared dB residuals, and the optimizer effort."""

    theta_rms: float
    residual: float
    iterations: int
    status: str = "ok"
    x: float | None = None

    def __post_init__(self) -> None:
        if self.residual < 0.0:
            raise ValueError(f"residual must be >= 0, got {self.residual}")
        if not 0.0 <= self.theta_rms <= THETA_MAX:
            raise ValueError(f"theta_rms {self.theta_rms} outside [0, pi/4]")
        if self.x is not None and not 0.0 <= self.x < 1.0:
            raise ValueError(f"x {self.x} outside [0, 1)")

    @property
    def theta_rms_deg(self) -> float:
        return math.degrees(self.theta_rms)

    @property
    def gain(self) -> float | None:
        return None if self.x is None else gain_from_x(self.x)


def dark_noise_correct(level_db: float, clearance: float) -> float:
    """Remove the detector circuit noise from a measured level.

    Both the measured trace and the shot-noise reference contain the same
    dark-noise power, so the inferred optical level is
    (measured - clearance) / (1 - clearance) in linear units.
    """
    if not 0.0 <= clearance < 1.0:
        raise ValueError(f"clearance must be in [0, 1), got {clearance}")
    if clearance == 0.0:
        return level_db
    lin = from_db(level_db)
    if lin <= clearance:
        raise InfeasibleCorrectionError(
            f"measured power {lin:.4g} is at or below the dark-noise "
            f"clearance {clearance:.4g}; reading is unphysical"
        )
    return to_db((lin - clearance) / (1.0 - clearance))


def dark_noise_uncorrect(level_db: float, clearance: float) -> float:
    """Exact inverse of :func:`dark_noise_correct`: re-add the dark noise
    to a corrected level to forward-simulate a raw reading."""
    if not 0.0 <= clearance < 1.0:
        raise ValueError(f"clearance must be in [0, 1), got {clearance}")
    if clearance == 0.0:
        return level_db
    return to_db(from_db(level_db) * (1.0 - clearance) + clearance)


def _degrade_fn(use_approx: bool):
    return degrade_approx if use_approx else degrade_exact


def fit_theta(
    measured: MeasuredLevels,
    predicted: QuadratureVariances,
    *,
    use_approx: bool = False,
) -> FitResult:
    """Recover the rms phase jitter explaining a measured squeezing level.

    Minimizes the squared dB residual of the squeezed quadrature only (the
    anti-squeezed one is nearly insensitive to jitter) over
    theta_rms in [0, pi/4] by bounded scalar minimization against the
    jitter-degraded prediction.

    A measured level below the jitter-free floor ``predicted.r_minus``
    cannot be explained by any jitter; the result is then flagged
    ``status="infeasible"`` with the boundary value theta_rms = 0.
    """
    degrade = _degrade_fn(use_approx)
    target_db = measured.squeezing_db

    def resid(theta: float) -> float:
        degraded = degrade(predicted, PhaseNoiseModel(theta))
        return (degraded.r_minus_db - target_db) ** 2

    # Tolerate one dB<->linear roundtrip of rounding before declaring a
    # measurement unexplainable by any jitter.
    if from_db(target_db) < predicted.r_minus * (1.0 - 1e-12):
        return FitResult(
            theta_rms=0.0,
            residual=resid(0.0),
            iterations=0,
            status="infeasible",
        )

    res = optimize.minimize_scalar(
        resid,
        bounds=(0.0, THETA_MAX),
        method="bounded",
        options={"xatol": 1e-12},
    )
    theta = min(max(float(res.x), 0.0), THETA_MAX)
    return FitResult(
        theta_rms=theta,
        residual=float(res.fun),
        iterations=int(res.nfev),
    )


def fit_joint(
    measured: MeasuredLevels,
    alpha: float,
    rho: float,
    detuning: float,
    *,
    use_approx: bool = False,
    max_iterations: int = 2000,
) -> FitResult:
    """Jointly recover (x, theta_rms) from a squeezing / anti-squeezing pair.

    Minimizes the sum of squared dB residuals of both quadratures over
    (x, theta_rms) in [0, 1) x [0, pi/4]: a coarse grid scan picks the seed
    (ties broken toward lowest x, then lowest theta), which a Nelder-Mead
    simplex refines.  Deterministic for fixed inputs.

    Raises :class:`FitConvergenceError` (carrying the best point seen) if
    the simplex has not converged after ``max_iterations``.
    """
    degrade = _degrade_fn(use_approx)
    sq_db = measured.squeezing_db
    asq_db = measured.anti_squeezing_db

    def resid(params) -> float:
        x, theta = params
        x = min(max(float(x), 0.0), PUMP_X_MAX)
        theta = min(max(float(theta), 0.0), THETA_MAX)
        degraded = degrade(forward_variances(alpha, rho, x, detuning), PhaseNoiseModel(theta))
        return (degraded.r_minus_db - sq_db) ** 2 + (degraded.r_plus_db - asq_db) ** 2

    # Grid scan in fixed order; np.argmin keeps the first (lowest-x, then
    # lowest-theta) occurrence on ties.
    grid = np.array(
        [[resid((x, t)) for t in JOINT_THETA_GRID] for x in JOINT_X_GRID]
    )
    i, j = np.unravel_index(int(np.argmin(grid)), grid.shape)
    seed = (float(JOINT_X_GRID[i]), float(JOINT_THETA_GRID[j]))
    seed_val = float(grid[i, j])

    res = optimize.minimize(
        resid,
        x0=np.array(seed),
        method="Nelder-Mead",
        bounds=[(0.0, PUMP_X_MAX), (0.0, THETA_MAX)],
        options={
            "maxiter": max_iterations,
            "xatol": 1e-10,
            "fatol": 1e-14,
        },
    )

    if float(res.fun) <= seed_val:
        x_best, theta_best, val_best = float(res.x[0]), float(res.x[1]), float(res.fun)
    else:
        x_best, theta_best, val_best = seed[0], seed[1], seed_val
    x_best = min(max(x_best, 0.0), PUMP_X_MAX)
    theta_best = min(max(theta_best, 0.0), THETA_MAX)

    result = FitResult(
        theta_rms=theta_best,
        residual=val_best,
        iterations=int(res.nit),
        x=x_best,
    )
    if not res.success:
        raise FitConvergenceError(
            f"joint fit did not converge within {max_iterations} iterations",
            best=result,
        )
    return result
