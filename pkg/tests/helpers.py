"""Shared test utilities: synthetic schemes and independent reference paths.

The naive estimators here deliberately avoid the library's inverse-transform
machinery: they draw every receiver output individually straight from
numpy's exponential sampler, so they can serve as an independent oracle for
the fast path.
"""

import math

import numpy as np

from wtfc import PhysicalInputs, derive_scheme


def scheme_with_alphabet(alphabet_size: int):
    """Scheme whose alphabet has exactly ``alphabet_size`` symbols.

    Duty cycle 1 and a 1 s window make the tone count equal the bandwidth
    in Hz, so mu = P_t + 1 for unit noise density.
    """
    return derive_scheme(
        PhysicalInputs(
            bandwidth_hz=float(alphabet_size),
            symbol_time_s=1.0,
            delay_spread_s=0.0,
            doppler_spread_hz=0.0,
            duty_cycle=1.0,
        )
    )


def power_for_mu(mu: float) -> float:
    """Transmit power hitting a given signal-slot mean with the unit scheme."""
    return mu - 1.0


def naive_pe(alphabet_size: int, mu: float, iterations: int, seed: int):
    """All-slots reference estimator: draw every noise output individually."""
    rng = np.random.default_rng(seed)
    errors = 0
    remaining = iterations
    while remaining > 0:
        n = min(remaining, 200_000)
        signal = rng.exponential(mu, n)
        noise = rng.exponential(1.0, (n, alphabet_size - 1)).max(axis=1)
        errors += int(np.count_nonzero(signal <= noise))
        remaining -= n
    p = errors / iterations
    half_width = 1.96 * math.sqrt(p * (1.0 - p) / iterations)
    return p, half_width


def naive_max_noise(n_noise: int, draws: int, seed: int) -> np.ndarray:
    """Max of ``n_noise`` exponentials, drawn one by one."""
    rng = np.random.default_rng(seed)
    return rng.exponential(1.0, (draws, n_noise)).max(axis=1)


def combined_3hw(hw_a: float, hw_b: float) -> float:
    return 3.0 * math.hypot(hw_a, hw_b)
