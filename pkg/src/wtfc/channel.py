"""Large-scale fading model and per-symbol channel draws.

Large-scale fading combines a deterministic path loss (free space by
default, or a user-supplied reference-loss relationship) with log-normal
shadowing. Small-scale fading is the squared magnitude of a unit-variance
circularly symmetric complex Gaussian, i.e. a unit-mean exponential.
Multipath never appears tap by tap: its aggregate effect is exactly this
small-scale gain, so no waveform is synthesized anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

__all__ = [
    "LargeScaleModel",
    "FadingDraw",
    "path_loss_db",
    "large_scale_m",
    "deterministic_power_gain",
    "transmit_power",
    "draw_fading",
    "draw_fading_batch",
    "draw_m_batch",
    "shadowing_mean_power_gain",
]

ReferenceLoss = Union[float, Callable[[float], float], None]


@dataclass(frozen=True)
class LargeScaleModel:
    """Path-loss geometry plus shadowing spread and an on/off switch.

    With ``enabled=False`` the channel applies no large-scale attenuation at
    all (amplitude 1). ``reference_loss_db`` replaces the free-space first
    term of the loss with a constant or a function of distance, for
    experimentally derived loss relationships. ``block_len`` holds one
    shadowing realization across that many consecutive symbols.
    """

    distance_m: float = 1.0
    reference_distance_m: float = 1.0
    wavelength_m: float = 4.0 * math.pi
    path_loss_exponent: float = 2.0
    shadowing_std_db: float = 0.0
    enabled: bool = False
    reference_loss_db: ReferenceLoss = None
    block_len: int = 1

    def __post_init__(self) -> None:
        if self.reference_distance_m <= 0:
            raise ValueError("reference_distance_m must be positive")
        if self.distance_m < self.reference_distance_m:
            raise ValueError("distance_m must be at least reference_distance_m")
        if self.wavelength_m <= 0:
            raise ValueError("wavelength_m must be positive")
        if self.path_loss_exponent <= 0:
            raise ValueError("path_loss_exponent must be positive")
        if self.shadowing_std_db < 0:
            raise ValueError("shadowing_std_db must be nonnegative")
        if self.block_len < 1:
            raise ValueError("block_len must be a positive integer")

    def _reference_term_db(self) -> float:
        if self.reference_loss_db is None:
            return 20.0 * math.log10(
                4.0 * math.pi * self.reference_distance_m / self.wavelength_m
            )
        if callable(self.reference_loss_db):
            return float(self.reference_loss_db(self.distance_m))
        return float(self.reference_loss_db)

    def deterministic_loss_db(self) -> float:
        """Path loss at the model geometry with the shadowing term zeroed."""
        return path_loss_db(self, 0.0)


@dataclass(frozen=True)
class FadingDraw:
    """One per-symbol channel realization."""

    large_scale_amplitude: float
    small_scale_power: float


def path_loss_db(model: LargeScaleModel, x_sigma_db: float) -> float:
    """Path loss in dB for one shadowing realization ``x_sigma_db``.

    Reference term (free space unless overridden) plus the distance power
    law plus the shadowing realization.
    """
    distance_term = 10.0 * model.path_loss_exponent * math.log10(
        model.distance_m / model.reference_distance_m
    )
    return model._reference_term_db() + distance_term + x_sigma_db


def large_scale_m(loss_db: float) -> float:
    """Amplitude attenuation corresponding to a dB loss: 10^(-L/20)."""
    return math.sqrt(10.0 ** (-loss_db / 10.0))


def deterministic_power_gain(model: LargeScaleModel) -> float:
    """Received/transmitted power ratio with shadowing zeroed; 1 if disabled."""
    if not model.enabled:
        return 1.0
    return 10.0 ** (-model.deterministic_loss_db() / 10.0)


def transmit_power(receive_power: float, model: LargeScaleModel) -> float:
    """Transmit power needed for a given average receive power.

    Inverts the deterministic (shadowing-free) power gain. A disabled model
    attenuates nothing, so transmit and receive power coincide.
    """
    if receive_power <= 0:
        raise ValueError("receive_power must be positive")
    return receive_power / deterministic_power_gain(model)


def shadowing_mean_power_gain(model: LargeScaleModel) -> float:
    """Mean of the log-normal shadowing power factor 10^(-X/10).

    Equals exp((sigma * ln10 / 10)^2 / 2); 1 when shadowing is off.
    """
    if not model.enabled or model.shadowing_std_db == 0:
        return 1.0
    a = model.shadowing_std_db * math.log(10.0) / 10.0
    return math.exp(a * a / 2.0)


def draw_m_batch(
    model: LargeScaleModel, rng: np.random.Generator, n: int
) -> np.ndarray:
    """Large-scale amplitudes for ``n`` consecutive symbols.

    One fresh shadowing realization per symbol by default; ``model.block_len``
    symbols share a realization when it is larger. Returns a constant array
    (no rng consumption) when the model is disabled or sigma is zero, which
    keeps paired enabled/disabled runs on identical rng streams.
    """
    if not model.enabled:
        return np.ones(n)
    det_loss = model.deterministic_loss_db()
    if model.shadowing_std_db == 0:
        return np.full(n, large_scale_m(det_loss))
    n_blocks = -(-n // model.block_len)
    x_sigma = rng.normal(0.0, model.shadowing_std_db, n_blocks)
    m_blocks = np.sqrt(10.0 ** (-(det_loss + x_sigma) / 10.0))
    if model.block_len == 1:
        return m_blocks
    return np.repeat(m_blocks, model.block_len)[:n]


def draw_fading_batch(
    model: LargeScaleModel, rng: np.random.Generator, n: int
) -> tuple[np.ndarray, np.ndarray]:
    """Vector of ``n`` fading draws: (large-scale amplitudes, |gain|^2)."""
    m = draw_m_batch(model, rng, n)
    alpha_sq = rng.exponential(1.0, n)
    return m, alpha_sq


def draw_fading(model: LargeScaleModel, rng: np.random.Generator) -> FadingDraw:
    """One fading draw: shadowed large-scale amplitude and small-scale power."""
    m, alpha_sq = draw_fading_batch(model, rng, 1)
    return FadingDraw(float(m[0]), float(alpha_sq[0]))
