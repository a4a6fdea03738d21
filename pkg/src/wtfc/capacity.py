"""Capacity of the symmetric discrete memoryless channel seen by the receiver.

Every wrong symbol is equally likely given an error, so the channel is an
S-ary symmetric DMC and its capacity follows from the error probability
alone. A symbol occupies one slot out of ``1/theta``, hence the extra
``theta / T_s`` factor converting bits per symbol into bits per second.
"""

from __future__ import annotations

import dataclasses
import logging
import math

from .scheme import SchemeParams

__all__ = ["CapacityResult", "dmc_capacity", "awgn_capacity", "ifsk_variant"]

logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class CapacityResult:
    capacity_bps: float
    p_e: float
    alphabet_size: int
    ceiling_bps: float
    scheme_tag: str = "WTFC"


def dmc_capacity(
    p_e: float,
    alphabet_size: int,
    duty_cycle: float,
    symbol_time_s: float,
    scheme_tag: str = "WTFC",
) -> CapacityResult:
    """Capacity in bits/s of the S-ary symmetric DMC at error rate ``p_e``.

    C = (log2 S + (1-p) log2(1-p) + p log2(p/(S-1))) * theta / T_s, with
    0 log 0 = 0. Error rates above 1 - 1/S can only come from estimator
    noise; they are clamped to the zero-capacity point with a warning.
    """
    if alphabet_size < 2:
        raise ValueError("alphabet_size must be at least 2")
    if symbol_time_s <= 0:
        raise ValueError("symbol_time_s must be positive")
    if not 0 < duty_cycle <= 1:
        raise ValueError("duty_cycle must lie in (0, 1]")
    if not 0.0 <= p_e <= 1.0:
        raise ValueError("p_e must lie in [0, 1]")

    s = alphabet_size
    worst = 1.0 - 1.0 / s
    if p_e > worst:
        logger.warning(
            "p_e=%.6g exceeds 1 - 1/S = %.6g; clamping to the zero-capacity point",
            p_e,
            worst,
        )
        p_e = worst

    # p_e = 0 contributes nothing by the 0 log 0 = 0 convention; the clamp
    # above keeps p_e strictly below 1.
    bits = math.log2(s)
    if p_e > 0.0:
        bits += (1.0 - p_e) * math.log2(1.0 - p_e)
        bits += p_e * math.log2(p_e / (s - 1))

    per_second = duty_cycle / symbol_time_s
    ceiling = per_second * math.log2(s)
    capacity = max(bits * per_second, 0.0)
    return CapacityResult(
        capacity_bps=capacity,
        p_e=p_e,
        alphabet_size=s,
        ceiling_bps=ceiling,
        scheme_tag=scheme_tag,
    )


def awgn_capacity(receive_power: float, noise_density: float, bandwidth_hz: float) -> float:
    """Shannon capacity B log2(1 + P_r / (N_0 B)), the upper-bound baseline."""
    if receive_power <= 0 or noise_density <= 0 or bandwidth_hz <= 0:
        raise ValueError("receive_power, noise_density and bandwidth_hz must be positive")
    return bandwidth_hz * math.log2(1.0 + receive_power / (noise_density * bandwidth_hz))


def ifsk_variant(params: SchemeParams) -> SchemeParams:
    """Impulsive-FSK instantiation of the same physical parameters.

    The receiver knows the time slot, so only the tone carries information:
    the alphabet shrinks to the tone count and the detector competes against
    M - 1 noise slots. Amplitude and duty-cycle bookkeeping are unchanged;
    with duty cycle 1 the two variants coincide.
    """
    if params.variant == "IFSK":
        return params
    return dataclasses.replace(
        params, variant="IFSK", alphabet_size=params.tone_count
    )
