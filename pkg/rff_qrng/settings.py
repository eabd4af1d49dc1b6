"""Command settings, config-file loading and precedence.

Each CLI command resolves one frozen settings model from three layers:
model defaults, then the flat ``key = value`` file given with ``--config``,
then explicit flags. Keys are normalized so ``f-det``, ``F_DET`` and
``f_det`` name the same field.
"""

from pathlib import Path
from typing import Annotated, Any, TypeVar, cast

from dotenv import dotenv_values
from loguru import logger
from pydantic import BaseModel, BeforeValidator, ConfigDict, Field

from rff_qrng import analytic_model
from rff_qrng.errors import InvalidConfig
from rff_qrng.models.config import SEED_LIMIT, AnalogTimingModel, QrngConfig
from rff_qrng.sts_tests.battery import TEST_NAMES
from rff_qrng.sts_tests.constants import DEFAULT_ALPHA, DEFAULT_BLOCK_SIZE


def parse_count(value: Any) -> Any:
    """Accept integers written in scientific notation (``"1e8"``, ``1e8``)."""
    if isinstance(value, bool) or isinstance(value, int):
        return value
    if isinstance(value, str):
        text = value.strip().replace("_", "")
        try:
            return int(text)
        except ValueError:
            value = float(text)
    if isinstance(value, float):
        if not value.is_integer():
            raise ValueError(f"expected a whole number, got {value!r}")
        return int(value)
    return value


def parse_list(value: Any) -> Any:
    """Split comma-separated strings; other values pass through."""
    if isinstance(value, str):
        return tuple(item.strip() for item in value.split(",") if item.strip())
    return value


def _parse_count_list(value: Any) -> Any:
    value = parse_list(value)
    if isinstance(value, list | tuple):
        return tuple(parse_count(v) for v in value)
    return value


Count = Annotated[int, BeforeValidator(parse_count)]
FloatList = Annotated[tuple[float, ...], BeforeValidator(parse_list)]
CountList = Annotated[tuple[int, ...], BeforeValidator(_parse_count_list)]
NameList = Annotated[tuple[str, ...], BeforeValidator(parse_list)]
PathList = Annotated[tuple[Path, ...], BeforeValidator(parse_list)]

DEFAULT_F_BITS = (10e6, 15e6, 20e6, 25e6)
DEFAULT_F_DETS = tuple(float(f) * 1e6 for f in range(10, 90, 10))


class _Settings(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class SimulationSettings(_Settings):
    """Pipeline parameters shared by ``generate``, ``predict`` and the sweeps."""

    stages: int = Field(default=1, ge=1)
    f_det: float = 45e6
    f_bit: float = 20e6
    dead_time: float = Field(default=0.0, ge=0.0)
    eta: float = Field(default=0.5, ge=0.0, le=1.0)
    t_rise: float = Field(default=0.0, ge=0.0)
    t_fall: float = Field(default=0.0, ge=0.0)
    zero_bias_eta: bool = False
    n_bits: Count = Field(default=10_000_000, ge=1)
    seed: int = Field(default=0, ge=0, lt=SEED_LIMIT)
    phase: float | None = Field(default=None, ge=0.0)
    initial_state: int = Field(default=0, ge=0, le=1)

    def analog(self) -> AnalogTimingModel:
        """The analog model, with eta replaced by the zero-bias value if requested."""
        eta = self.eta
        if self.zero_bias_eta:
            eta = analytic_model.zero_bias_eta(self.t_rise, self.t_fall)
        return AnalogTimingModel(eta=eta, t_rise=self.t_rise, t_fall=self.t_fall)

    def qrng_config(
        self,
        f_det: float | None = None,
        f_bit: float | None = None,
        seed: int | None = None,
    ) -> QrngConfig:
        return QrngConfig.build(
            n_stages=self.stages,
            f_det=self.f_det if f_det is None else f_det,
            f_bit=self.f_bit if f_bit is None else f_bit,
            n_bits=self.n_bits,
            dead_time=self.dead_time,
            analog=self.analog(),
            seed=self.seed if seed is None else seed,
            phase=self.phase,
            initial_state=cast(Any, self.initial_state),
        )


class SweepSettings(SimulationSettings):
    """Grid over (f_bit, f_det) or (f_bit, lambda) for the sweeps."""

    f_bits: FloatList = DEFAULT_F_BITS
    f_dets: FloatList = DEFAULT_F_DETS
    lambdas: FloatList | None = None
    k_max: int = 4
    jobs: int = Field(default=1, ge=1)

    def grid(self) -> list[tuple[float, float]]:
        """(f_bit, f_det) points in row order: f_bit outer, f_det (or lambda) inner."""
        if self.lambdas is not None:
            return [(fb, lam * fb) for fb in self.f_bits for lam in self.lambdas]
        return [(fb, fd) for fb in self.f_bits for fd in self.f_dets]


class BatterySettings(_Settings):
    inputs: PathList
    block_size: Count = Field(default=DEFAULT_BLOCK_SIZE, ge=1)
    tests: NameList = TEST_NAMES
    apen_m: CountList = (10,)
    alpha: float = Field(default=DEFAULT_ALPHA, gt=0.0, lt=1.0)
    jobs: int = Field(default=1, ge=1)


class AnalyzeSettings(_Settings):
    input: Path
    k_max: int = Field(default=4, ge=1)
    entropy_lengths: CountList = (3, 10)


class DetectSettings(_Settings):
    f_det: float = 45e6
    dead_time: float = Field(default=0.0, ge=0.0)
    seed: int = Field(default=0, ge=0, lt=SEED_LIMIT)
    n_events: Count = Field(default=1_000_000, ge=1)
    bin_width: float = Field(default=1e-9, gt=0.0)


def normalize_key(key: str) -> str:
    return key.strip().lower().replace("-", "_")


def load_config_file(path: Path) -> dict[str, str]:
    """
    Read a flat ``key = value`` file (dotenv syntax, ``#`` comments).

    Raises:
        InvalidConfig: the file does not exist
    """
    if not path.is_file():
        raise InvalidConfig(f"config file not found: {path}")
    values = dotenv_values(path)
    return {normalize_key(k): v for k, v in values.items() if v is not None}


SettingsT = TypeVar("SettingsT", bound=_Settings)


def resolve_settings(
    model: type[SettingsT],
    config_file: Path | None = None,
    **flags: Any,
) -> SettingsT:
    """
    Merge defaults < config file < flags into ``model``.

    Flags left at ``None`` do not override. Config-file keys the model does
    not know are ignored with a warning, so one file can serve several
    commands.
    """
    merged: dict[str, Any] = {}
    if config_file is not None:
        for key, value in load_config_file(config_file).items():
            if key in model.model_fields:
                merged[key] = value
            else:
                logger.warning("ignoring config key {!r} (unused here)", key)
    merged.update({normalize_key(k): v for k, v in flags.items() if v is not None})
    logger.debug("resolved {} from {}", model.__name__, merged)
    return model.model_validate(merged)
