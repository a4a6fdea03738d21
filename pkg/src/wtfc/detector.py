"""Square-law receiver error model.

The receiver picks the (tone, slot) pair whose matched-filter output has the
largest squared magnitude. Conditional on the large-scale amplitude ``m``,
the squared output of the transmitted slot is exponential with mean
``mu = m^2 P_t T_s / (theta N_0) + 1`` (small-scale fading folded in), and
every other slot is exponential with mean 1. A symbol error occurs when the
maximum of the ``S - 1`` noise outputs beats the signal output.

Monte Carlo estimation draws the signal statistic and the max-of-noise
statistic by inverse transform sampling, two uniforms per iteration instead
of ``S`` exponentials. Iterations are processed in fixed-size chunks, each
chunk seeded by (seed, chunk index) with separate substreams for shadowing,
signal and noise, so estimates are bit-identical for any worker count and
unchanged when shadowing is toggled on a zero-sigma model.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.integrate import quad

from .channel import LargeScaleModel, draw_m_batch, shadowing_mean_power_gain
from .scheme import SchemeParams

__all__ = [
    "SignalSlotStat",
    "PeEstimate",
    "signal_slot_mean",
    "signal_power_from_uniform",
    "max_noise_from_uniform",
    "sample_signal_power",
    "sample_max_noise",
    "estimate_pe",
    "analytic_pe_no_shadowing",
    "CHUNK_SIZE",
]

# Iterations per chunk. Part of the determinism contract: changing it
# changes which uniforms map to which iteration.
CHUNK_SIZE = 100_000

# Largest noise count for which the alternating binomial sum is used; above
# this the closed form is evaluated by adaptive quadrature instead.
_ALTERNATING_MAX_N = 50


@dataclass(frozen=True)
class SignalSlotStat:
    """Mean of the exponential law of the transmitted slot's squared output."""

    mu: float

    def __post_init__(self) -> None:
        if self.mu < 1.0:
            raise ValueError("mu must be at least 1 (1 means zero signal energy)")


@dataclass(frozen=True)
class PeEstimate:
    """Monte Carlo symbol error probability with its binomial 95% half-width."""

    p_e: float
    iterations: int
    half_width_95: float
    seed: int


def signal_slot_mean(
    transmit_power: float,
    params: SchemeParams,
    noise_density: float,
    m: float = 1.0,
) -> SignalSlotStat:
    """Exponential mean of the transmitted slot: m^2 P_t T_s/(theta N_0) + 1.

    ``transmit_power`` may be zero (pure-noise limit, mu = 1).
    """
    if transmit_power < 0:
        raise ValueError("transmit_power must be nonnegative")
    if noise_density <= 0:
        raise ValueError("noise_density must be positive")
    if m < 0:
        raise ValueError("m must be nonnegative")
    inputs = params.inputs
    energy = (
        m * m * transmit_power * inputs.symbol_time_s
        / (inputs.duty_cycle * noise_density)
    )
    return SignalSlotStat(mu=energy + 1.0)


def signal_power_from_uniform(mu, u):
    """Invert the signal-slot CDF: -mu * ln(1 - u). Accepts arrays."""
    return mu * -np.log1p(-np.asarray(u, dtype=float))


def max_noise_from_uniform(n_noise: int, u):
    """Invert the CDF of the max of ``n_noise`` unit-mean exponentials.

    Computes -ln(1 - u^(1/N)) as -ln(-expm1(ln(u)/N)); the expm1 keeps the
    inner difference from collapsing to a constant even at N ~ 1e9, and
    u = 0 maps to exactly 0. Accepts arrays.
    """
    if n_noise < 1:
        raise ValueError(
            "n_noise must be at least 1: with no competing slots there is "
            "no maximum to sample"
        )
    u = np.asarray(u, dtype=float)
    with np.errstate(divide="ignore"):
        out = -np.log(-np.expm1(np.log(u) / n_noise))
    return out


def sample_signal_power(stat: SignalSlotStat, rng: np.random.Generator) -> float:
    """One draw of the transmitted slot's squared output, Exp(mean mu)."""
    return float(signal_power_from_uniform(stat.mu, rng.random()))


def sample_max_noise(n_noise: int, rng: np.random.Generator) -> float:
    """One draw of the maximum over ``n_noise`` noise-slot squared outputs."""
    return float(max_noise_from_uniform(n_noise, rng.random()))


def _chunk_error_count(
    chunk_index: int,
    n: int,
    seed: int,
    model: LargeScaleModel,
    energy_factor: float,
    n_noise: int,
) -> int:
    """Errors in one chunk of ``n`` iterations, seeded by (seed, chunk)."""
    streams = np.random.SeedSequence([seed, chunk_index]).spawn(3)
    shadow_rng = np.random.default_rng(streams[0])
    signal_rng = np.random.default_rng(streams[1])
    noise_rng = np.random.default_rng(streams[2])

    m = draw_m_batch(model, shadow_rng, n)
    mu = m * m * energy_factor + 1.0
    x = signal_power_from_uniform(mu, signal_rng.random(n))
    y = max_noise_from_uniform(n_noise, noise_rng.random(n))
    # Ties count as errors (measure zero, pinned for reproducibility).
    return int(np.count_nonzero(x <= y))


def estimate_pe(
    params: SchemeParams,
    model: LargeScaleModel,
    transmit_power: float,
    noise_density: float,
    iterations: int,
    seed: int,
    threads: int = 1,
    hold_mean_rx_power: bool = False,
) -> PeEstimate:
    """Monte Carlo symbol error probability of the square-law receiver.

    Per iteration: draw the large-scale amplitude, compute the signal-slot
    mean, draw the signal statistic and the max of the ``S - 1`` noise
    statistics, count an error when the signal does not win. Deterministic
    for fixed (seed, iterations); ``threads`` only changes wall time.

    ``hold_mean_rx_power`` rescales transmit power so the mean received
    power under shadowing matches the shadowing-free value; the default
    keeps transmit power fixed and lets shadowing move the mean.
    """
    if params.alphabet_size < 2:
        raise ValueError("alphabet_size must be at least 2")
    if iterations < 1:
        raise ValueError("iterations must be at least 1")
    if transmit_power < 0:
        raise ValueError("transmit_power must be nonnegative")
    if noise_density <= 0:
        raise ValueError("noise_density must be positive")
    if seed < 0:
        raise ValueError("seed must be a nonnegative integer")

    p_t = transmit_power
    if hold_mean_rx_power:
        p_t /= shadowing_mean_power_gain(model)
    inputs = params.inputs
    energy_factor = p_t * inputs.symbol_time_s / (inputs.duty_cycle * noise_density)
    n_noise = params.noise_slot_count

    n_chunks = -(-iterations // CHUNK_SIZE)
    sizes = [
        CHUNK_SIZE if (i + 1) * CHUNK_SIZE <= iterations
        else iterations - i * CHUNK_SIZE
        for i in range(n_chunks)
    ]

    def run(i: int) -> int:
        return _chunk_error_count(i, sizes[i], seed, model, energy_factor, n_noise)

    if threads > 1 and n_chunks > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            errors = sum(pool.map(run, range(n_chunks)))
    else:
        errors = sum(run(i) for i in range(n_chunks))

    p_e = errors / iterations
    half_width = 1.96 * math.sqrt(p_e * (1.0 - p_e) / iterations)
    return PeEstimate(p_e=p_e, iterations=iterations, half_width_95=half_width, seed=seed)


def _pe_alternating_sum(mu: float, n_noise: int) -> float:
    """Closed-form error probability by the alternating binomial sum.

    1 - sum_k C(N,k) (-1)^k / (1 + k mu), evaluated in exact rational
    arithmetic so the heavy cancellation between terms costs no precision.
    """
    mu_exact = Fraction(mu)
    total = Fraction(0)
    for k in range(n_noise + 1):
        term = Fraction(math.comb(n_noise, k), 1) / (1 + k * mu_exact)
        total += -term if k % 2 else term
    return float(1 - total)


def _pe_by_quadrature(mu: float, n_noise: int) -> float:
    """Closed-form error probability by adaptive quadrature.

    Integrates (1/mu) e^(-x/mu) (1 - (1 - e^(-x))^N) over x >= 0; the
    bracket is computed through expm1/log1p so it stays accurate when the
    max-of-noise CDF is within rounding of 1.
    """

    def integrand(x: float) -> float:
        emx = math.exp(-x)
        if emx >= 1.0:
            return 1.0 / mu
        tail = -math.expm1(n_noise * math.log1p(-emx))
        return math.exp(-x / mu) / mu * tail

    upper = 45.0 * mu + 2.0 * math.log(n_noise + 1.0) + 50.0
    knots = [math.log1p(n_noise), min(5.0 * mu, 0.5 * upper)]
    value, _ = quad(
        integrand,
        0.0,
        upper,
        points=sorted(set(knots)),
        limit=400,
        epsabs=1e-13,
        epsrel=1e-12,
    )
    return min(max(value, 0.0), 1.0)


def analytic_pe_no_shadowing(mu: float, n_noise: int) -> float:
    """Exact symbol error probability without shadowing.

    Probability that an Exp(mean mu) signal statistic loses to the maximum
    of ``n_noise`` independent Exp(1) noise statistics. The alternating
    binomial sum is used up to N = 50; beyond that it is numerically
    hopeless and the defining integral is evaluated by quadrature.
    """
    if mu < 1.0:
        raise ValueError("mu must be at least 1")
    if n_noise < 1:
        raise ValueError("n_noise must be at least 1")
    if n_noise <= _ALTERNATING_MAX_N:
        return _pe_alternating_sum(mu, n_noise)
    return _pe_by_quadrature(mu, n_noise)
