"""Closed-form predictions for the TRFF: bias, Poisson statistics, ideal
autocorrelation and XOR stage combination.

These are the oracles the simulator is checked against. The autocorrelation
formulas ignore dead time; with tau > 0 only simulation is authoritative.
"""

import math
from typing import Any

import numpy as np
from scipy.stats import poisson

from rff_qrng.errors import InvalidInput
from rff_qrng.models.config import AnalogTimingModel
from rff_qrng.models.reports import SCHEMA_VERSION, DwellTimes, OperatingPoint

# f_det >= 2.5 f_bit and dead time near 1/(8 f_bit) keep |a_k| within ~1e-3.
RULE_OF_THUMB_MIN_RATIO = 2.5
RULE_OF_THUMB_DEAD_TIME_TOLERANCE = 0.25


def dwell_times(a: AnalogTimingModel, t_det: float) -> DwellTimes:
    """
    Mean HIGH (T1) and LOW (T0) times seen by the DFF over two detection periods.

    ``t_h = t_det - t_rise`` and ``t_l = t_det - t_fall`` are the flat parts
    of each level; ``T1 + T0 = 2 t_det`` holds identically.

    Raises:
        InvalidInput: t_det not longer than both transition times
    """
    if not (t_det > a.t_rise and t_det > a.t_fall):
        raise InvalidInput(
            f"detection period {t_det:g} s must exceed t_rise={a.t_rise:g} s "
            f"and t_fall={a.t_fall:g} s"
        )
    ramp = a.t_rise + a.t_fall
    t_h = t_det - a.t_rise
    t_l = t_det - a.t_fall
    return DwellTimes(
        t_high=(1.0 - a.eta) * ramp + t_h,
        t_low=a.eta * ramp + t_l,
        t_h=t_h,
        t_l=t_l,
        t_det=t_det,
    )


def bias_slope(a: AnalogTimingModel) -> float:
    """alpha = (t_fall - eta * (t_rise + t_fall)) / 2, in seconds."""
    return (a.t_fall - a.eta * (a.t_rise + a.t_fall)) / 2.0


def predicted_bias(a: AnalogTimingModel, f_det: float) -> float:
    """Bias ``alpha * f_det``; linear in the detection rate."""
    if f_det < 0:
        raise InvalidInput(f"f_det must be non-negative, got {f_det!r}")
    return bias_slope(a) * f_det


def zero_bias_eta(t_rise: float, t_fall: float) -> float:
    """
    Threshold fraction at which the bias vanishes for every detection rate.

    Equal to ``1 / (1 + t_rise / t_fall)``, evaluated as
    ``t_fall / (t_rise + t_fall)`` so ``t_fall = 0`` gives 0.

    Raises:
        InvalidInput: negative times, or both zero
    """
    if t_rise < 0 or t_fall < 0:
        raise InvalidInput(
            f"transition times must be non-negative: {t_rise!r}, {t_fall!r}"
        )
    if t_rise == 0 and t_fall == 0:
        raise InvalidInput("zero-bias threshold is undefined when t_rise = t_fall = 0")
    return t_fall / (t_rise + t_fall)


def _check_rate(lam: float) -> None:
    if not lam >= 0:
        raise InvalidInput(f"lambda must be non-negative, got {lam!r}")


def poisson_pmf(k: int, lam: float) -> float:
    """P(k, lambda) = exp(-lambda) lambda**k / k!, evaluated in log space by scipy."""
    _check_rate(lam)
    if k < 0:
        raise InvalidInput(f"k must be non-negative, got {k}")
    if lam == 0:
        return 1.0 if k == 0 else 0.0
    return float(poisson.pmf(k, lam))


def even_poisson_mass(lam: float) -> float:
    """Sum of P(2k, lambda) over k, taken far enough into the tail to vanish."""
    _check_rate(lam)
    if lam == 0:
        return 1.0
    k_max = int(lam + 40.0 * math.sqrt(lam) + 60.0)
    terms = poisson.pmf(np.arange(0, k_max + 1, 2), lam)
    return math.fsum(terms.tolist())


def same_bit_prob_s1(lam: float) -> float:
    """Probability that consecutive ideal bits are equal: 1/2 + exp(-2 lambda)/2."""
    _check_rate(lam)
    return 0.5 + 0.5 * math.exp(-2.0 * lam)


def a1_ideal(lam: float) -> float:
    """Lag-1 autocorrelation of the ideal RFF, exp(-2 lambda) = 2 s1 - 1."""
    _check_rate(lam)
    return math.exp(-2.0 * lam)


def _check_pair(b: float, a1: float) -> None:
    if abs(b) > 0.5:
        raise InvalidInput(f"|bias| must be <= 1/2, got {b!r}")
    if abs(a1) > 1.0:
        raise InvalidInput(f"|a1| must be <= 1, got {a1!r}")


def xor_combine(b1: float, a1: float, b2: float, a2: float) -> tuple[float, float]:
    """
    Leading-order bias and lag-1 autocorrelation of ``x XOR y`` for independent
    stages with parameters ``(b1, a1)`` and ``(b2, a2)``.
    """
    _check_pair(b1, a1)
    _check_pair(b2, a2)
    return -2.0 * b1 * b2, a1 * a2 + 4.0 * a1 * b2**2 + 4.0 * a2 * b1**2


def xor_propagation(b: float, a1: float) -> tuple[float, float]:
    """Two identical independent stages: ``(-2 b**2, a1**2 + 8 a1 b**2)``."""
    return xor_combine(b, a1, b, a1)


def xor_chain(b: float, a1: float, n_stages: int) -> list[tuple[float, float]]:
    """
    Estimates after 1, 2, ..., ``n_stages`` stages of identical single RFFs,
    folding one more stage in from the right at each step.
    """
    if n_stages < 1:
        raise InvalidInput(f"n_stages must be >= 1, got {n_stages}")
    _check_pair(b, a1)
    chain = [(b, a1)]
    for _ in range(n_stages - 1):
        prev_b, prev_a = chain[-1]
        chain.append(xor_combine(prev_b, prev_a, b, a1))
    return chain


def rule_of_thumb(f_det: float, f_bit: float, dead_time: float) -> bool:
    """True when f_det >= 2.5 f_bit and dead_time is within 25% of 1 / (8 f_bit)."""
    target = 1.0 / (8.0 * f_bit)
    return (
        f_det >= RULE_OF_THUMB_MIN_RATIO * f_bit
        and abs(dead_time - target) <= RULE_OF_THUMB_DEAD_TIME_TOLERANCE * target
    )


def predict(
    analog: AnalogTimingModel,
    f_det: float,
    f_bit: float,
    dead_time: float = 0.0,
    n_stages: int = 1,
) -> dict[str, Any]:
    """Every closed-form figure for one operating point, as a JSON-ready dict."""
    point = OperatingPoint.from_rates(f_det, f_bit)
    b = predicted_bias(analog, f_det)
    a1 = a1_ideal(point.lam)
    try:
        eta0: float | None = zero_bias_eta(analog.t_rise, analog.t_fall)
    except InvalidInput:
        eta0 = None
    return {
        "schema_version": SCHEMA_VERSION,
        "operating_point": point.model_dump(by_alias=True),
        "dead_time": dead_time,
        "analog": analog.model_dump(),
        "bias": b,
        "bias_slope": bias_slope(analog),
        "a1": a1,
        "s1": same_bit_prob_s1(point.lam),
        "zero_bias_eta": eta0,
        "dwell_times": dwell_times(analog, 1.0 / f_det).model_dump(),
        "rule_of_thumb": rule_of_thumb(f_det, f_bit, dead_time),
        "xor_chain": [
            {"stages": i + 1, "bias": sb, "a1": sa}
            for i, (sb, sa) in enumerate(xor_chain(b, a1, n_stages))
        ],
    }
