"""Forward model of squeezed-vacuum generation in a sub-threshold OPO.

The anti-squeezed (+) and squeezed (-) quadrature variances of the output
mode, normalized to the shot-noise level, are

    R_plus  = 1 + alpha * rho * 4 x / ((1 - x)^2 + 4 Omega^2)
    R_minus = 1 - alpha * rho * 4 x / ((1 + x)^2 + 4 Omega^2)

with detection efficiency alpha = zeta * eta * xi^2, escape efficiency
rho = T / (T + L), pump parameter x (0 = unpumped, 1 = oscillation
threshold), and detuning Omega = omega / gamma for cavity decay rate
gamma = c (T + L) / l.

All variances are kept linear (shot noise = 1.0); convert to dB only at
presentation boundaries via :func:`to_db` / :func:`from_db`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

SPEED_OF_LIGHT = 299_792_458.0  # m/s, exact SI value

# Pump amplitudes this close to threshold make R_plus diverge at resonance;
# reject instead of returning inf.
PUMP_X_MAX = 1.0 - 1e-9


def to_db(linear: float) -> float:
    """Convert a linear power ratio to dB relative to shot noise."""
    if linear <= 0.0:
        raise ValueError(f"linear power ratio must be > 0, got {linear}")
    return 10.0 * math.log10(linear)


def from_db(level_db: float) -> float:
    """Convert a dB level back to a linear power ratio."""
    return 10.0 ** (level_db / 10.0)


@dataclass(frozen=True)
class OpoCavity:
    """OPO cavity: output-coupler transmission T, intracavity loss L, and
    round-trip length in meters."""

    T: float
    L: float
    round_trip_length: float

    def __post_init__(self) -> None:
        if not 0.0 < self.T < 1.0:
            raise ValueError(f"T must be in (0, 1), got {self.T}")
        if not 0.0 <= self.L < 1.0:
            raise ValueError(f"L must be in [0, 1), got {self.L}")
        if self.T + self.L >= 1.0:
            raise ValueError(f"T + L must be < 1, got {self.T + self.L}")
        if self.round_trip_length <= 0.0:
            raise ValueError(
                f"round_trip_length must be > 0 m, got {self.round_trip_length}"
            )


@dataclass(frozen=True)
class DetectionChain:
    """Homodyne detection chain: propagation efficiency zeta, photodiode
    quantum efficiency eta, fringe visibility xi (enters as xi^2), and an
    optional dark-noise clearance (linear detector circuit noise power
    relative to shot noise; None means an ideal, noiseless detector)."""

    zeta: float
    eta: float
    xi: float
    dark_clearance: float | None = None

    def __post_init__(self) -> None:
        for name in ("zeta", "eta", "xi"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise ValueError(f"{name} must be in (0, 1], got {v}")
        if self.dark_clearance is not None and not 0.0 <= self.dark_clearance < 1.0:
            raise ValueError(
                f"dark_clearance must be in [0, 1), got {self.dark_clearance}"
            )


def _normalize_pump(mode: str, value: float, threshold: float | None) -> float:
    if mode == "x":
        x = value
        if not 0.0 <= x < 1.0:
            raise ValueError(f"pump parameter x must be in [0, 1), got {x}")
        return x
    if mode == "gain":
        if value < 1.0:
            raise ValueError(
                f"classical gain must be >= 1, got {value}; supply the "
                "amplification gain (deamplification readings are not accepted)"
            )
        return 1.0 - 1.0 / math.sqrt(value)
    if mode == "power":
        if threshold is None or threshold <= 0.0:
            raise ValueError(f"threshold power must be > 0 W, got {threshold}")
        if value < 0.0:
            raise ValueError(f"pump power must be >= 0 W, got {value}")
        if value >= threshold:
            raise ValueError(
                f"pump power {value} W is at or above threshold {threshold} W"
            )
        return math.sqrt(value / threshold)
    raise ValueError(f"unknown pump mode {mode!r}")


@dataclass(frozen=True)
class PumpOperatingPoint:
    """How hard the OPO is pumped, in one of three equivalent forms:
    the pump parameter x directly, the classical parametric amplification
    gain G = 1/(1-x)^2, or a pump power with its oscillation threshold
    (x = sqrt(P/P_th)).

    Only the physical inversion branch x = 1 - 1/sqrt(G) is accepted for
    gains, and operation must stay below threshold for powers.
    """

    mode: str
    value: float
    threshold: float | None = None

    def __post_init__(self) -> None:
        _normalize_pump(self.mode, self.value, self.threshold)

    @classmethod
    def from_x(cls, x: float) -> PumpOperatingPoint:
        return cls("x", x)

    @classmethod
    def from_gain(cls, gain: float) -> PumpOperatingPoint:
        return cls("gain", gain)

    @classmethod
    def from_power(cls, power: float, threshold: float) -> PumpOperatingPoint:
        """Power and threshold in watts."""
        return cls("power", power, threshold)


@dataclass(frozen=True)
class QuadratureVariances:
    """Linear shot-noise-normalized variance pair (anti-squeezed, squeezed).

    The forward model produces r_plus >= 1 >= r_minus > 0; phase-noise
    mixing of a pair can legitimately swap the ordering, so only positivity
    is enforced here.
    """

    r_plus: float
    r_minus: float

    def __post_init__(self) -> None:
        if self.r_plus <= 0.0 or self.r_minus <= 0.0:
            raise ValueError(
                f"variances must be > 0, got ({self.r_plus}, {self.r_minus})"
            )

    @property
    def r_plus_db(self) -> float:
        return to_db(self.r_plus)

    @property
    def r_minus_db(self) -> float:
        return to_db(self.r_minus)


def escape_efficiency(cavity: OpoCavity) -> float:
    """Fraction of intracavity photons leaving through the output coupler,
    T / (T + L)."""
    return cavity.T / (cavity.T + cavity.L)


def detection_efficiency(chain: DetectionChain) -> float:
    """Overall homodyne detection efficiency zeta * eta * xi^2."""
    return chain.zeta * chain.eta * chain.xi**2


def cavity_decay_rate(cavity: OpoCavity) -> float:
    """Cavity decay rate gamma = c (T + L) / l in rad/s."""
    return SPEED_OF_LIGHT * (cavity.T + cavity.L) / cavity.round_trip_length


def detuning(omega: float, cavity: OpoCavity) -> float:
    """Sideband frequency omega (rad/s) normalized to the cavity decay rate."""
    if omega < 0.0:
        raise ValueError(f"sideband frequency must be >= 0, got {omega}")
    return omega / cavity_decay_rate(cavity)


def pump_parameter(op: PumpOperatingPoint) -> float:
    """Normalized pump parameter x in [0, 1) for any representation."""
    return _normalize_pump(op.mode, op.value, op.threshold)


def gain_from_x(x: float) -> float:
    """Classical parametric amplification gain G = 1/(1-x)^2."""
    if not 0.0 <= x < 1.0:
        raise ValueError(f"pump parameter x must be in [0, 1), got {x}")
    return 1.0 / (1.0 - x) ** 2


def forward_variances(
    alpha: float, rho: float, x: float, detuning: float
) -> QuadratureVariances:
    """Output-mode quadrature variances at detection efficiency alpha,
    escape efficiency rho, pump parameter x, and detuning Omega.

    The anti-squeezed (+) variance carries (1 - x)^2 in its denominator,
    so it diverges at threshold on resonance.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"rho must be in [0, 1], got {rho}")
    if not 0.0 <= x <= PUMP_X_MAX:
        raise ValueError(f"pump parameter x must be in [0, {PUMP_X_MAX}], got {x}")
    if detuning < 0.0:
        raise ValueError(f"detuning must be >= 0, got {detuning}")
    four_om2 = 4.0 * detuning * detuning
    plus_den = (1.0 - x) ** 2 + four_om2
    minus_den = (1.0 + x) ** 2 + four_om2
    # Cancellation-free numerators: 1 -+ alpha rho 4x / denominator written
    # as a ratio of sums of non-negative terms, so the minimum-uncertainty
    # product R+ R- stays exact to machine precision arbitrarily close to
    # threshold.
    r_plus = (plus_den + 4.0 * alpha * rho * x) / plus_den
    r_minus = (plus_den + 4.0 * x * (1.0 - alpha * rho)) / minus_den
    return QuadratureVariances(r_plus=r_plus, r_minus=r_minus)
