import math
from pathlib import Path
from typing import Any, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from errors import InvalidParameter

TWO_PI = 2.0 * math.pi
FREQUENCY_KEYS = ("delta2", "delta3", "delta4", "omega", "omega_l")


class AtomParams(BaseModel):
    """The reduced four-level system. All frequencies are angular (rad/s), gamma in s^-1."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    gamma: float = Field(..., description="Einstein coefficient of Lyman-alpha (s^-1)")
    delta2: float = Field(default=0.0, description="Laser detuning from |2> (2p1/2), rad/s")
    delta3: float = Field(..., description="Laser detuning from |3> (2s1/2), rad/s")
    delta4: float = Field(..., description="Laser detuning from |4> (2p3/2), rad/s")
    omega: float = Field(..., description="Static-field Rabi frequency between |2> and |3>, rad/s")
    omega_l: float = Field(..., description="Laser Rabi frequency between |1> and |2>, rad/s")

    @field_validator("gamma")
    @classmethod
    def gamma_positive(cls, value: float) -> float:
        if not value > 0:
            raise ValueError("gamma must be positive")
        return value

    @model_validator(mode="after")
    def all_finite(self) -> "AtomParams":
        for name in ("gamma",) + FREQUENCY_KEYS:
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        return self

    @property
    def in_regime(self) -> bool:
        """(|omega| <= 0.2|omega_l|) and (|omega_l| < |delta3|): where the closed forms hold."""
        return abs(self.omega) <= 0.2 * abs(self.omega_l) and abs(self.omega_l) < abs(self.delta3)

    def regime_warnings(self) -> List[str]:
        warnings = []
        if self.delta3 == 0:
            warnings.append("delta3_zero: detuning from |3> vanishes")
        if self.delta4 == 0:
            warnings.append("delta4_zero: detuning from |4> vanishes")
        if abs(self.delta3) >= abs(self.delta4):
            warnings.append("detuning_order: |delta3| >= |delta4|")
        if abs(self.omega) > 0.2 * abs(self.omega_l):
            warnings.append("static_field_strong: |omega| > 0.2*|omega_l|")
        if abs(self.omega_l) >= abs(self.delta3):
            warnings.append("laser_strong: |omega_l| >= |delta3|")
        return warnings


class KnownParams(BaseModel):
    """AtomParams without delta3: the inputs of the Lamb-shift inversion."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    gamma: float = Field(..., gt=0, description="Einstein coefficient (s^-1)")
    delta2: float = Field(default=0.0, description="Detuning from |2>, rad/s")
    delta4: float = Field(..., description="Detuning from |4>, rad/s")
    omega: float = Field(..., description="Static-field Rabi frequency, rad/s")
    omega_l: float = Field(..., description="Laser Rabi frequency, rad/s")

    @classmethod
    def from_params(cls, params: AtomParams) -> "KnownParams":
        return cls(**params.model_dump(exclude={"delta3"}))

    def with_delta3(self, delta3: float) -> AtomParams:
        return AtomParams(delta3=delta3, **self.model_dump())


class He4Preset(BaseModel):
    """Level data of 4He+ and the field-to-Rabi calibration fixed by the published example."""
    model_config = ConfigDict(frozen=True)

    gamma: float = Field(default=1e10, gt=0, description="Einstein coefficient (s^-1)")
    lamb_shift_hz: float = Field(default=1.4e10, gt=0, description="2s1/2 - 2p1/2 splitting (Hz)")
    fine_structure_hz: float = Field(default=1.75e11, gt=0, description="2p3/2 - 2p1/2 splitting (Hz)")
    rabi_per_field_laser: float = Field(..., gt=0, description="Omega_L / F_L, rad/s per V/m; default 5*gamma / 2.9e6")
    rabi_per_field_static: float = Field(..., gt=0, description="Omega / F, rad/s per V/m; default 0.025*gamma / 3.6e3")

    @model_validator(mode="before")
    @classmethod
    def calibrate_from_gamma(cls, data: Any) -> Any:
        # F = 3.6 kV/m gives Omega = 0.025 gamma; F_L = 2.9 MV/m gives Omega_L = 5 gamma
        if not isinstance(data, dict):
            return data
        data = dict(data)
        try:
            gamma = float(data.get("gamma", cls.model_fields["gamma"].default))
        except (TypeError, ValueError):
            return data
        data.setdefault("rabi_per_field_laser", 5.0 * gamma / 2.9e6)
        data.setdefault("rabi_per_field_static", 0.025 * gamma / 3.6e3)
        return data


class ClosedFormPredictions(BaseModel):
    """Perturbative period statistics."""
    alpha_real: float = Field(..., description="Re(alpha), dimensionless")
    alpha_imag: float = Field(..., description="Im(alpha), dimensionless")
    re_lambda2: float = Field(..., description="Re(lambda_2), s^-1")
    lambda3_zeroth_real: float = Field(..., description="Re(lambda_3^(0)), s^-1")
    lambda3_zeroth_imag: float = Field(..., description="Im(lambda_3^(0)), s^-1")
    tau_l: float = Field(..., description="Mean photon spacing inside a light period (s)")
    t_dark: float = Field(..., description="Mean dark-period duration T_D (s)")
    t_light: float = Field(..., description="Mean light-period duration T_L = tau_L / p (s)")
    t_light_asymptotic: float = Field(..., description="T_L with exp(-2 Re(lambda_2) T0) set to 1 (s)")
    p_dark: float = Field(..., description="Probability p that an interval exceeds T0")
    t0: float = Field(..., description="Dark-period threshold T0 (s)")
    warnings: List[str] = Field(default_factory=list, description="Regime warnings")

    @property
    def alpha(self) -> complex:
        return complex(self.alpha_real, self.alpha_imag)

    @property
    def lambda3_zeroth(self) -> complex:
        return complex(self.lambda3_zeroth_real, self.lambda3_zeroth_imag)


class PeriodStats(BaseModel):
    """Empirical light/dark-period statistics of one trajectory."""
    n_intervals: int = Field(..., description="Number of photon intervals")
    n_dark: int = Field(..., description="Intervals longer than t0")
    n_light: int = Field(..., description="Number of light periods (maximal runs of short intervals)")
    t0: float = Field(..., description="Threshold used for classification (s)")
    mean_dark: Optional[float] = Field(None, description="Mean length of dark intervals (s)")
    mean_dark_stderr: Optional[float] = Field(None, description="Standard error of mean_dark (s)")
    mean_light: Optional[float] = Field(None, description="Mean light-period duration (s)")
    mean_light_stderr: Optional[float] = Field(None, description="Standard error of mean_light (s)")
    p_hat: float = Field(..., description="n_dark / n_intervals")
    p_hat_stderr: float = Field(..., description="Binomial standard error of p_hat")
    tail_rate: Optional[float] = Field(None, description="Exceedance MLE of the exponential tail rate (s^-1)")
    tail_rate_stderr: Optional[float] = Field(None, description="Asymptotic standard error of tail_rate")


class ComparisonEntry(BaseModel):
    quantity: str = Field(..., description="Name of the compared quantity")
    observed: Optional[float] = Field(None, description="Monte Carlo estimate")
    predicted: float = Field(..., description="Closed-form prediction")
    relative_deviation: Optional[float] = Field(None, description="(observed - predicted) / predicted")
    z_score: Optional[float] = Field(None, description="(observed - predicted) / stderr")
    flagged: bool = Field(default=False, description="True when |z| exceeds the threshold")
    note: Optional[str] = Field(None, description="Free-text remark, e.g. upper bound only")


class ComparisonReport(BaseModel):
    z_threshold: float = Field(default=3.0, description="Flag threshold on |z|")
    entries: List[ComparisonEntry] = Field(default_factory=list)

    @property
    def flagged(self) -> bool:
        return any(e.flagged for e in self.entries)


class RateParams(BaseModel):
    """Rate constants of the emission-free-subensemble model."""
    model_config = ConfigDict(frozen=True)

    gamma: float = Field(..., gt=0, description="Einstein coefficient (s^-1)")
    r_b: float = Field(..., ge=0, description="Blue stimulated rate 2p<->1s (s^-1)")
    r_r: float = Field(..., ge=0, description="Red stimulated rate 2s<->2p (s^-1)")

    def regime_warnings(self) -> List[str]:
        if self.r_r > 0.1 * min(self.r_b, self.gamma):
            return ["rate_perturbative: r_r is not << r_b, gamma; closed forms degrade"]
        return []


class RateState(BaseModel):
    t: float = Field(..., description="Time (s)")
    p1: float = Field(..., description="No photon yet and in |1> (1s)")
    p2: float = Field(..., description="No photon yet and in |2> (2p)")
    p3: float = Field(..., description="No photon yet and in |3> (2s)")

    @property
    def total(self) -> float:
        return self.p1 + self.p2 + self.p3


class RootCandidate(BaseModel):
    delta3: float = Field(..., description="Real root of the T_D polynomial, rad/s")
    residual: float = Field(..., description="|T_D(delta3) - td| / td")
    admissible: bool = Field(..., description="|omega_l| < |delta3| < |delta4|")


class InversionResult(BaseModel):
    td: float = Field(..., description="Measured mean dark-period duration (s)")
    known: KnownParams = Field(..., description="Parameters held fixed during inversion")
    candidates: List[RootCandidate] = Field(default_factory=list)

    @property
    def admissible(self) -> List[RootCandidate]:
        return [c for c in self.candidates if c.admissible]


# --- run configuration -------------------------------------------------------

class ParamsInput(BaseModel):
    """Direct AtomParams input. Each frequency comes either as `<name>_rad_s` or `<name>_hz`."""
    model_config = ConfigDict(extra="forbid")

    gamma: float = Field(..., gt=0, description="Einstein coefficient (s^-1)")
    delta2_rad_s: Optional[float] = None
    delta2_hz: Optional[float] = None
    delta3_rad_s: Optional[float] = None
    delta3_hz: Optional[float] = None
    delta4_rad_s: Optional[float] = None
    delta4_hz: Optional[float] = None
    omega_rad_s: Optional[float] = None
    omega_hz: Optional[float] = None
    omega_l_rad_s: Optional[float] = None
    omega_l_hz: Optional[float] = None

    @model_validator(mode="after")
    def unambiguous_units(self) -> "ParamsInput":
        for name in FREQUENCY_KEYS:
            if getattr(self, f"{name}_rad_s") is not None and getattr(self, f"{name}_hz") is not None:
                raise ValueError(f"{name} given both as {name}_rad_s and {name}_hz")
        return self

    def angular(self, name: str) -> Optional[float]:
        rad_s = getattr(self, f"{name}_rad_s")
        if rad_s is not None:
            return rad_s
        hz = getattr(self, f"{name}_hz")
        return None if hz is None else TWO_PI * hz

    def resolve(self) -> AtomParams:
        values = {name: self.angular(name) for name in FREQUENCY_KEYS}
        if values["delta2"] is None:
            values["delta2"] = 0.0
        missing = [k for k, v in values.items() if v is None]
        if missing:
            raise InvalidParameter(f"missing parameters: {', '.join(missing)}")
        return AtomParams(gamma=self.gamma, **values)

    def resolve_known(self) -> KnownParams:
        values = {name: self.angular(name) for name in FREQUENCY_KEYS if name != "delta3"}
        if values["delta2"] is None:
            values["delta2"] = 0.0
        missing = [k for k, v in values.items() if v is None]
        if missing:
            raise InvalidParameter(f"missing parameters: {', '.join(missing)}")
        return KnownParams(gamma=self.gamma, **values)


class PhysicalInput(BaseModel):
    """Field strengths in V/m, converted through the He+ calibration."""
    model_config = ConfigDict(extra="forbid")

    preset: Literal["he4"] = Field(default="he4", description="Level-data preset")
    field_v_per_m: float = Field(..., description="Static field F (V/m)")
    laser_field_v_per_m: float = Field(..., description="Laser field amplitude F_L (V/m)")
    delta2_rad_s: Optional[float] = None
    delta2_hz: Optional[float] = None

    @model_validator(mode="after")
    def unambiguous_units(self) -> "PhysicalInput":
        if self.delta2_rad_s is not None and self.delta2_hz is not None:
            raise ValueError("delta2 given both as delta2_rad_s and delta2_hz")
        return self

    @property
    def delta2(self) -> float:
        if self.delta2_rad_s is not None:
            return self.delta2_rad_s
        if self.delta2_hz is not None:
            return TWO_PI * self.delta2_hz
        return 0.0


class RateInput(BaseModel):
    model_config = ConfigDict(extra="forbid")

    gamma: float = Field(default=1.0, gt=0, description="Einstein coefficient (s^-1)")
    r_b: float = Field(default=5.0, ge=0, description="Blue rate (s^-1)")
    r_r: float = Field(default=0.05, ge=0, description="Red rate (s^-1)")
    t_end: Optional[float] = Field(default=None, gt=0, description="End time; default 20/gamma")
    dt: Optional[float] = Field(default=None, gt=0, description="RK4 step; default 0.05/mu_1")
    feedback: bool = Field(default=True, description="Include the R_R*P3 back-transfer into P2")


class GridInput(BaseModel):
    model_config = ConfigDict(extra="forbid")

    t_min: Optional[float] = Field(default=None, gt=0, description="First grid time; default 1e-2/gamma")
    t_max: Optional[float] = Field(default=None, gt=0, description="Last grid time; default 10*T_D")
    n_points: int = Field(default=200, ge=2, description="Number of log-spaced points")


RunMode = Literal["predict", "exact", "simulate", "ratemodel", "invert-lamb", "p0"]


class RunConfig(BaseModel):
    """One batch run. Built from the JSON config file, then overridden by CLI flags."""
    model_config = ConfigDict(extra="forbid")

    mode: RunMode = Field(..., description="Subcommand to run")
    params: Optional[ParamsInput] = Field(default=None, description="Direct AtomParams input")
    physical: Optional[PhysicalInput] = Field(default=None, description="Field-strength input (He+ preset)")
    seed: int = Field(default=0, ge=0, lt=2**64, description="64-bit simulation seed")
    n_intervals: int = Field(default=100_000, ge=1, description="Intervals to simulate")
    t0: Optional[float] = Field(default=None, gt=0, description="Dark-period threshold override (s)")
    out: Path = Field(default=Path("out"), description="Output directory")
    workers: int = Field(default=1, ge=1, description="Concurrent simulation streams")
    td: Optional[float] = Field(default=None, description="Measured T_D for invert-lamb (s)")
    rate: RateInput = Field(default_factory=RateInput)
    grid: GridInput = Field(default_factory=GridInput)

    @model_validator(mode="after")
    def one_parameter_source(self) -> "RunConfig":
        if self.params is not None and self.physical is not None:
            raise ValueError("'params' and 'physical' are mutually exclusive")
        if self.mode != "ratemodel" and self.params is None and self.physical is None:
            raise ValueError(f"mode '{self.mode}' needs 'params' or 'physical'")
        return self
