"""JSON experiment description: parsing, validation and serialization.

Boundary units follow lab convention -- angles in degrees, powers in mW,
dark-noise clearance in dB -- and are converted to radians / watts / linear
ratios when domain objects are built.  Serialization reproduces the parsed
tree field-for-field.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .model import (
    DetectionChain,
    OpoCavity,
    PumpOperatingPoint,
    cavity_decay_rate,
    detection_efficiency,
    detuning,
    escape_efficiency,
    forward_variances,
    from_db,
    gain_from_x,
    pump_parameter,
)
from .phase_noise import PhaseNoiseModel


class ConfigError(ValueError):
    """Invalid experiment configuration; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


PUMP_MODES = ("gain", "x", "power")

_SECTIONS = {
    "cavity": ("T", "L", "round_trip_m"),
    "detection": ("zeta", "eta", "xi", "dark_clearance_db"),
    "pump": ("mode", "value", "threshold_mW"),
    "noise": ("theta_rms_deg",),
    "measurement": ("frequency_hz",),
}
_OPTIONAL_KEYS = {"detection.dark_clearance_db", "pump.threshold_mW"}


def _require(section: dict, section_name: str, key: str) -> Any:
    if key not in section:
        raise ConfigError(f"{section_name}.{key}", "missing required field")
    return section[key]


def _number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {value!r}")
    return float(value)


@dataclass(frozen=True)
class ExperimentConfig:
    """One OPO + homodyne operating point, stored in boundary units."""

    cavity_T: float
    cavity_L: float
    round_trip_m: float
    zeta: float
    eta: float
    xi: float
    pump_mode: str
    pump_value: float
    theta_rms_deg: float
    frequency_hz: float
    dark_clearance_db: float | None = None
    threshold_mW: float | None = None

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentConfig:
        if not isinstance(data, dict):
            raise ConfigError("<root>", "configuration must be a JSON object")
        for name in data:
            if name not in _SECTIONS:
                raise ConfigError(name, "unknown section")
        for name, keys in _SECTIONS.items():
            if name not in data:
                raise ConfigError(name, "missing required section")
            section = data[name]
            if not isinstance(section, dict):
                raise ConfigError(name, "section must be a JSON object")
            for key in section:
                if key not in keys:
                    raise ConfigError(f"{name}.{key}", "unknown field")

        cavity = data["cavity"]
        det = data["detection"]
        pump = data["pump"]
        noise = data["noise"]
        meas = data["measurement"]

        mode = _require(pump, "pump", "mode")
        if mode not in PUMP_MODES:
            raise ConfigError("pump.mode", f"must be one of {PUMP_MODES}, got {mode!r}")

        cfg = cls(
            cavity_T=_number(_require(cavity, "cavity", "T"), "cavity.T"),
            cavity_L=_number(_require(cavity, "cavity", "L"), "cavity.L"),
            round_trip_m=_number(
                _require(cavity, "cavity", "round_trip_m"), "cavity.round_trip_m"
            ),
            zeta=_number(_require(det, "detection", "zeta"), "detection.zeta"),
            eta=_number(_require(det, "detection", "eta"), "detection.eta"),
            xi=_number(_require(det, "detection", "xi"), "detection.xi"),
            dark_clearance_db=(
                None
                if det.get("dark_clearance_db") is None
                else _number(det["dark_clearance_db"], "detection.dark_clearance_db")
            ),
            pump_mode=mode,
            pump_value=_number(_require(pump, "pump", "value"), "pump.value"),
            threshold_mW=(
                None
                if pump.get("threshold_mW") is None
                else _number(pump["threshold_mW"], "pump.threshold_mW")
            ),
            theta_rms_deg=_number(
                _require(noise, "noise", "theta_rms_deg"), "noise.theta_rms_deg"
            ),
            frequency_hz=_number(
                _require(meas, "measurement", "frequency_hz"), "measurement.frequency_hz"
            ),
        )
        cfg.validate()
        return cfg

    @classmethod
    def from_file(cls, path: str | Path) -> ExperimentConfig:
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as err:
            raise ConfigError("<file>", f"not valid JSON: {err}") from err
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        """Inverse of :meth:`from_dict`; optional fields are emitted only
        when present."""
        detection: dict[str, Any] = {"zeta": self.zeta, "eta": self.eta, "xi": self.xi}
        if self.dark_clearance_db is not None:
            detection["dark_clearance_db"] = self.dark_clearance_db
        pump: dict[str, Any] = {"mode": self.pump_mode, "value": self.pump_value}
        if self.threshold_mW is not None:
            pump["threshold_mW"] = self.threshold_mW
        return {
            "cavity": {
                "T": self.cavity_T,
                "L": self.cavity_L,
                "round_trip_m": self.round_trip_m,
            },
            "detection": detection,
            "pump": pump,
            "noise": {"theta_rms_deg": self.theta_rms_deg},
            "measurement": {"frequency_hz": self.frequency_hz},
        }

    def validate(self) -> None:
        """Build every domain object once, mapping any violation to the
        offending configuration field."""
        try:
            self.opo_cavity()
        except ValueError as err:
            raise ConfigError("cavity", str(err)) from err
        try:
            self.detection_chain()
        except ValueError as err:
            raise ConfigError("detection", str(err)) from err
        if self.pump_mode == "power" and self.threshold_mW is None:
            raise ConfigError("pump.threshold_mW", "required when pump.mode is 'power'")
        try:
            pump_parameter(self.pump_operating_point())
        except ValueError as err:
            raise ConfigError("pump.value", str(err)) from err
        try:
            self.phase_noise()
        except ValueError as err:
            raise ConfigError("noise.theta_rms_deg", str(err)) from err
        if self.frequency_hz < 0:
            raise ConfigError("measurement.frequency_hz", "must be >= 0")

    # -- domain objects -------------------------------------------------

    def opo_cavity(self) -> OpoCavity:
        return OpoCavity(
            T=self.cavity_T, L=self.cavity_L, round_trip_length=self.round_trip_m
        )

    def detection_chain(self) -> DetectionChain:
        clearance = (
            None if self.dark_clearance_db is None else from_db(self.dark_clearance_db)
        )
        return DetectionChain(
            zeta=self.zeta, eta=self.eta, xi=self.xi, dark_clearance=clearance
        )

    def pump_operating_point(self) -> PumpOperatingPoint:
        if self.pump_mode == "power":
            if self.threshold_mW is None:
                raise ConfigError("pump.threshold_mW", "required when pump.mode is 'power'")
            return PumpOperatingPoint.from_power(
                self.pump_value * 1e-3, self.threshold_mW * 1e-3
            )
        return PumpOperatingPoint(self.pump_mode, self.pump_value)

    def phase_noise(self) -> PhaseNoiseModel:
        return PhaseNoiseModel.from_degrees(self.theta_rms_deg)

    def omega(self) -> float:
        """Measurement sideband frequency in rad/s."""
        return 2.0 * math.pi * self.frequency_hz

    def derived(self) -> dict[str, float]:
        """All scalar quantities the forward model needs, plus the predicted
        variances, as one flat mapping."""
        cavity = self.opo_cavity()
        alpha = detection_efficiency(self.detection_chain())
        rho = escape_efficiency(cavity)
        gamma = cavity_decay_rate(cavity)
        x = pump_parameter(self.pump_operating_point())
        omega_ratio = detuning(self.omega(), cavity)
        variances = forward_variances(alpha, rho, x, omega_ratio)
        return {
            "alpha": alpha,
            "rho": rho,
            "gamma_rad_s": gamma,
            "x": x,
            "gain": gain_from_x(x),
            "detuning": omega_ratio,
            "r_plus": variances.r_plus,
            "r_minus": variances.r_minus,
            "r_plus_db": variances.r_plus_db,
            "r_minus_db": variances.r_minus_db,
        }
