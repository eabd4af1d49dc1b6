"""Configuration models for the detector, the analog front end and the sampler.

Models are frozen pydantic models. Domain invariants raise ``InvalidConfig``
from ``model_validator(mode="after")``; shape problems (wrong types, negative
times) surface as pydantic ``ValidationError``.
"""

from typing import Literal

try:
    from typing import Self
except ImportError:  # Python < 3.11
    from typing_extensions import Self

from pydantic import BaseModel, ConfigDict, Field, model_validator

from rff_qrng.errors import InvalidConfig
from rff_qrng.rng import PHASE_STREAM, derive_seed, make_generator

SEED_LIMIT = 2**64


def check_detector_rates(f_det: float, dead_time: float) -> None:
    """Raise ``InvalidConfig`` unless ``f_det > 0`` and ``f_det * dead_time < 1``."""
    if not f_det > 0:
        raise InvalidConfig(f"f_det must be positive, got {f_det!r}")
    if f_det * dead_time >= 1.0:
        raise InvalidConfig(
            f"detection rate {f_det:g}/s is unreachable with dead time {dead_time:g} s "
            f"(f_det * dead_time = {f_det * dead_time:g} >= 1)"
        )


class DetectorConfig(BaseModel):
    """
    One SPAD channel.

    Attributes:
        f_det: Mean detection rate after dead time (events/s)
        dead_time: Non-paralyzable dead time (s)
        seed: 64-bit reproducibility seed
    """

    model_config = ConfigDict(frozen=True)

    f_det: float
    dead_time: float = Field(default=0.0, ge=0.0)
    seed: int = Field(default=0, ge=0, lt=SEED_LIMIT)

    @model_validator(mode="after")
    def _check_rates(self) -> Self:
        check_detector_rates(self.f_det, self.dead_time)
        return self


class AnalogTimingModel(BaseModel):
    """
    Threshold and transition times of the TFF output as seen by the DFF.

    The TFF output ramps linearly between levels; the DFF input switches
    interpretation when the ramp crosses ``eta`` of the voltage window.
    """

    model_config = ConfigDict(frozen=True)

    eta: float = Field(default=0.5, ge=0.0, le=1.0)
    t_rise: float = Field(default=0.0, ge=0.0)
    t_fall: float = Field(default=0.0, ge=0.0)

    @property
    def rising_offset(self) -> float:
        """Delay from a 0->1 toggle to the DFF seeing HIGH."""
        return self.eta * self.t_rise

    @property
    def falling_offset(self) -> float:
        """Delay from a 1->0 toggle to the DFF seeing LOW."""
        return (1.0 - self.eta) * self.t_fall

    @classmethod
    def ideal(cls) -> "AnalogTimingModel":
        """Instantaneous transitions at mid-level threshold."""
        return cls(eta=0.5, t_rise=0.0, t_fall=0.0)

    @classmethod
    def reference(cls) -> "AnalogTimingModel":
        """Reconstructed FPGA model with a bias slope of 6.8 ps."""
        return cls(eta=0.5, t_rise=500e-12, t_fall=527.2e-12)


class SamplerConfig(BaseModel):
    """Periodic DFF clock: edge k fires at ``phase + k / f_bit``."""

    model_config = ConfigDict(frozen=True)

    f_bit: float
    phase: float = Field(default=0.0, ge=0.0)

    @model_validator(mode="after")
    def _check_rate(self) -> Self:
        if not self.f_bit > 0:
            raise InvalidConfig(f"f_bit must be positive, got {self.f_bit!r}")
        return self

    @property
    def period(self) -> float:
        return 1.0 / self.f_bit


class QrngConfig(BaseModel):
    """
    Full pipeline parameters: ``n_stages`` independent TRFF stages sharing one
    analog model and one clock, XOR-combined into ``n_bits`` output bits.
    """

    model_config = ConfigDict(frozen=True)

    n_stages: int = Field(ge=1)
    detectors: tuple[DetectorConfig, ...]
    analog: AnalogTimingModel
    sampler: SamplerConfig
    n_bits: int = Field(ge=1)
    seed: int = Field(default=0, ge=0, lt=SEED_LIMIT)
    initial_state: Literal[0, 1] = 0

    @model_validator(mode="after")
    def _check_stages(self) -> Self:
        if len(self.detectors) != self.n_stages:
            raise InvalidConfig(
                f"{self.n_stages} stages configured but "
                f"{len(self.detectors)} detectors given"
            )
        seeds = [d.seed for d in self.detectors]
        if len(set(seeds)) != len(seeds):
            raise InvalidConfig("stage seeds must be pairwise distinct")
        return self

    @property
    def normalized_rate(self) -> float:
        """lambda = f_det / f_bit of the first stage."""
        return self.detectors[0].f_det / self.sampler.f_bit

    @classmethod
    def build(
        cls,
        *,
        n_stages: int,
        f_det: float,
        f_bit: float,
        n_bits: int,
        dead_time: float = 0.0,
        analog: AnalogTimingModel | None = None,
        seed: int = 0,
        phase: float | None = None,
        initial_state: Literal[0, 1] = 0,
    ) -> "QrngConfig":
        """
        Build a config of identical stages from one base seed.

        Stage ``i`` gets the seed derived from ``(seed, i)``. When ``phase`` is
        None the clock phase is drawn uniformly from ``[0, 1/f_bit)`` on the
        base seed's phase substream.
        """
        sampler = SamplerConfig(f_bit=f_bit)
        if phase is None:
            phase = float(make_generator(seed, PHASE_STREAM).random()) * sampler.period
        sampler = SamplerConfig(f_bit=f_bit, phase=phase)
        detectors = tuple(
            DetectorConfig(f_det=f_det, dead_time=dead_time, seed=derive_seed(seed, i))
            for i in range(n_stages)
        )
        return cls(
            n_stages=n_stages,
            detectors=detectors,
            analog=analog or AnalogTimingModel.ideal(),
            sampler=sampler,
            n_bits=n_bits,
            seed=seed,
            initial_state=initial_state,
        )
