"""Result models shared by the analysis modules and the CLI writers.

Everything here is JSON-serializable through pydantic; ``SCHEMA_VERSION``
stamps every JSON document and CSV table the CLI writes.
"""

from typing import ClassVar

from pydantic import BaseModel, ConfigDict, Field

SCHEMA_VERSION = 1


class WaitingTimeHistogram(BaseModel):
    """Histogram of inter-detection gaps with an exponential tail fit."""

    model_config = ConfigDict(frozen=True)

    bin_width: float
    bin_edges: list[float]
    counts: list[int]
    fit_start: float
    fitted_rate: float


class OperatingPoint(BaseModel):
    """Detection rate, bit rate and their ratio lambda = f_det / f_bit."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    f_det: float = Field(gt=0)
    f_bit: float = Field(gt=0)
    lam: float = Field(gt=0, alias="lambda")

    @classmethod
    def from_rates(cls, f_det: float, f_bit: float) -> "OperatingPoint":
        return cls(f_det=f_det, f_bit=f_bit, lam=f_det / f_bit)


class DwellTimes(BaseModel):
    """Mean HIGH/LOW dwell times seen by the DFF over two detection periods."""

    model_config = ConfigDict(frozen=True)

    t_high: float
    t_low: float
    t_h: float
    t_l: float
    t_det: float


class BiasEstimate(BaseModel):
    """b = p1 - 1/2 with variance 1/(4n)."""

    model_config = ConfigDict(frozen=True)

    value: float = Field(ge=-0.5, le=0.5)
    n: int
    variance: float

    @property
    def stderr(self) -> float:
        return float(self.variance**0.5)


class AutocorrEstimate(BaseModel):
    """Serial autocorrelation coefficient a_k with variance 1/(n - k - 1)."""

    model_config = ConfigDict(frozen=True)

    lag: int
    value: float = Field(ge=-1.0, le=1.0)
    n: int
    variance: float

    @property
    def stderr(self) -> float:
        return float(self.variance**0.5)


class Proportion(BaseModel):
    """Blocks with p >= alpha, out of ``total``, against the minimum ``threshold``."""

    model_config = ConfigDict(frozen=True)

    passed: int
    total: int
    threshold: int

    @property
    def ok(self) -> bool:
        return self.passed >= self.threshold


class TestReport(BaseModel):
    """Per-block p-values and their aggregate verdict for one statistical test."""

    __test__: ClassVar[bool] = False
    UNIFORMITY_CUTOFF: ClassVar[float] = 1e-4

    model_config = ConfigDict(frozen=True)

    test_name: str
    parameters: dict[str, int] = Field(default_factory=dict)
    block_size: int
    alpha: float = 0.01
    p_values: list[float]
    uniformity_p: float | None
    proportion: Proportion

    @property
    def label(self) -> str:
        """Display name including parameters, e.g. ``ApproximateEntropy(m=3)``."""
        if not self.parameters:
            return self.test_name
        args = ",".join(f"{k}={v}" for k, v in sorted(self.parameters.items()))
        return f"{self.test_name}({args})"

    @property
    def slug(self) -> str:
        """File-name friendly label, e.g. ``approximateentropy_m3``."""
        suffix = "".join(f"_{k}{v}" for k, v in sorted(self.parameters.items()))
        return f"{self.test_name.lower()}{suffix}"

    @property
    def passed(self) -> bool:
        uniform = (
            self.uniformity_p is None or self.uniformity_p >= self.UNIFORMITY_CUTOFF
        )
        return self.proportion.ok and uniform


class PValueCdf(BaseModel):
    """Ascending p-values paired with their rank fraction ``rank / total``."""

    model_config = ConfigDict(frozen=True)

    points: list[tuple[float, float]]

    @property
    def p_values(self) -> list[float]:
        return [p for _, p in self.points]

    @property
    def ranks(self) -> list[float]:
        return [r for r, _ in self.points]
