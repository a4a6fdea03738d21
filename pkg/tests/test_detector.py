import math

import numpy as np
import pytest
from scipy.stats import ks_2samp

import helpers
from wtfc import (
    LargeScaleModel,
    PhysicalInputs,
    SignalSlotStat,
    analytic_pe_no_shadowing,
    derive_scheme,
    estimate_pe,
    max_noise_from_uniform,
    sample_max_noise,
    sample_signal_power,
    signal_power_from_uniform,
    signal_slot_mean,
)
from wtfc.detector import _pe_alternating_sum, _pe_by_quadrature

NO_FADING = LargeScaleModel()


class TestSignalSlotMean:
    def test_zero_power_is_pure_noise(self):
        params = helpers.scheme_with_alphabet(4)
        assert signal_slot_mean(0.0, params, 1.0).mu == 1.0

    def test_direct_substitution(self):
        params = helpers.scheme_with_alphabet(4)
        assert signal_slot_mean(9.0, params, 1.0).mu == pytest.approx(10.0)

    def test_large_scale_squares_into_energy(self):
        params = helpers.scheme_with_alphabet(4)
        assert signal_slot_mean(100.0, params, 1.0, m=0.1).mu == pytest.approx(2.0)

    def test_duty_cycle_boost(self):
        params = derive_scheme(PhysicalInputs(100.0, 1.0, 0.0, 0.0, 1 / 10))
        assert signal_slot_mean(1.0, params, 1.0).mu == pytest.approx(11.0)

    def test_rejects_bad_arguments(self):
        params = helpers.scheme_with_alphabet(4)
        with pytest.raises(ValueError):
            signal_slot_mean(-1.0, params, 1.0)
        with pytest.raises(ValueError):
            signal_slot_mean(1.0, params, 0.0)
        with pytest.raises(ValueError):
            signal_slot_mean(1.0, params, 1.0, m=-0.5)
        with pytest.raises(ValueError):
            SignalSlotStat(0.99)


class TestInverseTransforms:
    def test_zero_uniform_maps_to_zero(self):
        assert signal_power_from_uniform(3.0, 0.0) == 0.0
        for n in (1, 5, 10**9):
            assert max_noise_from_uniform(n, 0.0) == 0.0

    def test_signal_inversion_by_hand(self):
        u = 1.0 - math.exp(-1.0)
        assert signal_power_from_uniform(1.0, u) == pytest.approx(1.0, rel=1e-12)

    def test_max_noise_reduces_to_exponential_at_n1(self):
        u = 1.0 - math.exp(-1.0)
        assert max_noise_from_uniform(1, u) == pytest.approx(1.0, rel=1e-12)

    def test_rejects_zero_slots(self):
        with pytest.raises(ValueError, match="n_noise"):
            max_noise_from_uniform(0, 0.5)
        with pytest.raises(ValueError, match="n_noise"):
            sample_max_noise(0, np.random.default_rng(0))

    def test_signal_sampler_mean(self):
        rng = np.random.default_rng(42)
        draws = signal_power_from_uniform(10.0, rng.random(1_000_000))
        assert float(np.mean(draws)) == pytest.approx(10.0, abs=0.05)

    def test_sampler_wrappers_return_scalars(self):
        stat = SignalSlotStat(5.0)
        x = sample_signal_power(stat, np.random.default_rng(0))
        y = sample_max_noise(7, np.random.default_rng(0))
        assert isinstance(x, float) and x >= 0.0
        assert isinstance(y, float) and y >= 0.0

    def test_max_noise_matches_naive_sampling(self):
        # Inverse-transform max of 3 versus drawing all 3 exponentials.
        rng = np.random.default_rng(7)
        fast = max_noise_from_uniform(3, rng.random(1_000_000))
        slow = helpers.naive_max_noise(3, 1_000_000, seed=8)
        assert ks_2samp(fast, slow).statistic < 0.002

    def test_exponential_equals_max_of_one(self):
        rng = np.random.default_rng(21)
        a = signal_power_from_uniform(1.0, rng.random(1_000_000))
        b = max_noise_from_uniform(1, np.random.default_rng(22).random(1_000_000))
        assert ks_2samp(a, b).statistic < 0.002

    def test_huge_slot_counts_stay_resolved(self):
        # At N = 1e9 the naive 1 - u^(1/N) would collapse to a constant.
        rng = np.random.default_rng(3)
        draws = max_noise_from_uniform(10**9, rng.random(1_000_000))
        assert np.all(np.isfinite(draws))
        assert np.unique(draws).size > 900_000
        # Mean of the max of N exponentials is the N-th harmonic number.
        expected = math.log(1e9) + 0.5772156649
        assert float(np.mean(draws)) == pytest.approx(expected, abs=0.01)


class TestAnalyticOracle:
    def test_spot_values(self):
        assert analytic_pe_no_shadowing(1.0, 1) == 0.5
        assert analytic_pe_no_shadowing(10.0, 1) == pytest.approx(1 / 11, abs=1e-12)

    def test_sum_equals_quadrature(self):
        for mu in (1.0, 2.0, 10.0, 1000.0):
            for n in (1, 7, 23, 50):
                delta = abs(_pe_alternating_sum(mu, n) - _pe_by_quadrature(mu, n))
                assert delta < 1e-10

    def test_zero_energy_limit(self):
        for n in (1, 3, 255):
            assert analytic_pe_no_shadowing(1.0, n) == pytest.approx(
                1.0 - 1.0 / (n + 1), abs=1e-12
            )

    def test_monotone_in_mu_and_n(self):
        grid = [1.0, 2.0, 10.0, 100.0, 1000.0]
        for n in (1, 3, 15, 255):
            values = [analytic_pe_no_shadowing(mu, n) for mu in grid]
            assert all(a > b for a, b in zip(values, values[1:]))
        for mu in (2.0, 10.0, 100.0):
            values = [analytic_pe_no_shadowing(mu, n) for n in (1, 3, 15, 255, 4095)]
            assert all(a < b for a, b in zip(values, values[1:]))

    def test_matches_beta_closed_form(self):
        # Independent closed form: P(correct) = B(1/mu, N+1) / mu.
        from scipy.special import betaln

        for mu, n in [(2.0, 3), (10.0, 50), (26.4, 255), (1000.0, 100_000)]:
            expected = 1.0 - math.exp(betaln(1.0 / mu, n + 1)) / mu
            assert analytic_pe_no_shadowing(mu, n) == pytest.approx(expected, abs=5e-9)

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            analytic_pe_no_shadowing(0.5, 3)
        with pytest.raises(ValueError):
            analytic_pe_no_shadowing(2.0, 0)


class TestEstimatePe:
    def test_zero_power_limit(self):
        params = helpers.scheme_with_alphabet(8)
        est = estimate_pe(params, NO_FADING, 0.0, 1.0, 200_000, seed=5)
        expected = 1.0 - 1.0 / 8.0
        assert est.p_e == pytest.approx(expected, abs=4 * est.half_width_95)

    def test_binary_alphabet_against_closed_form(self):
        params = helpers.scheme_with_alphabet(2)
        est = estimate_pe(params, NO_FADING, 9.0, 1.0, 1_000_000, seed=11)
        assert abs(est.p_e - 1 / 11) <= 3 * est.half_width_95

    def test_half_width_formula(self):
        params = helpers.scheme_with_alphabet(4)
        est = estimate_pe(params, NO_FADING, 3.0, 1.0, 50_000, seed=2)
        expected = 1.96 * math.sqrt(est.p_e * (1 - est.p_e) / est.iterations)
        assert est.half_width_95 == pytest.approx(expected, rel=1e-12)
        assert est.seed == 2

    def test_deterministic_and_thread_invariant(self):
        params = helpers.scheme_with_alphabet(16)
        a = estimate_pe(params, NO_FADING, 5.0, 1.0, 350_000, seed=9)
        b = estimate_pe(params, NO_FADING, 5.0, 1.0, 350_000, seed=9)
        c = estimate_pe(params, NO_FADING, 5.0, 1.0, 350_000, seed=9, threads=4)
        assert a.p_e == b.p_e == c.p_e

    def test_error_rate_never_exceeds_uniform_guessing(self):
        for s, p_t in [(2, 0.0), (8, 0.5), (64, 0.0), (16, 2.0)]:
            params = helpers.scheme_with_alphabet(s)
            est = estimate_pe(params, NO_FADING, p_t, 1.0, 100_000, seed=s)
            assert est.p_e <= 1.0 - 1.0 / s + 4 * est.half_width_95

    def test_fast_path_matches_all_slots_reference(self):
        params = helpers.scheme_with_alphabet(8)
        est = estimate_pe(params, NO_FADING, 9.0, 1.0, 100_000, seed=31)
        ref_p, ref_hw = helpers.naive_pe(8, 10.0, 100_000, seed=32)
        assert abs(est.p_e - ref_p) <= helpers.combined_3hw(est.half_width_95, ref_hw)

    def test_shadowing_increases_error_rate_in_low_pe_regime(self):
        params = derive_scheme(PhysicalInputs(100e6, 100e-6, 0.3e-6, 360.0, 1e-4))
        shadowed = LargeScaleModel(enabled=True, shadowing_std_db=8.0)
        base = estimate_pe(params, NO_FADING, 1e5, 1.0, 300_000, seed=3)
        shade = estimate_pe(params, shadowed, 1e5, 1.0, 300_000, seed=3)
        assert shade.p_e > 2.0 * base.p_e

    def test_hold_mean_rx_power_rescales(self):
        params = derive_scheme(PhysicalInputs(100e6, 100e-6, 0.3e-6, 360.0, 1e-4))
        shadowed = LargeScaleModel(enabled=True, shadowing_std_db=8.0)
        fixed_pt = estimate_pe(params, shadowed, 1e5, 1.0, 300_000, seed=3)
        fixed_pr = estimate_pe(
            params, shadowed, 1e5, 1.0, 300_000, seed=3, hold_mean_rx_power=True
        )
        # Holding mean received power removes the free mean-power boost, so
        # deep fades dominate and the error rate rises.
        assert fixed_pr.p_e > fixed_pt.p_e
        unshadowed = estimate_pe(
            params, NO_FADING, 1e5, 1.0, 100_000, seed=4, hold_mean_rx_power=True
        )
        plain = estimate_pe(params, NO_FADING, 1e5, 1.0, 100_000, seed=4)
        assert unshadowed.p_e == plain.p_e

    def test_validation(self):
        params = helpers.scheme_with_alphabet(4)
        with pytest.raises(ValueError):
            estimate_pe(params, NO_FADING, 1.0, 1.0, 0, seed=0)
        with pytest.raises(ValueError):
            estimate_pe(params, NO_FADING, 1.0, 0.0, 10, seed=0)
        with pytest.raises(ValueError):
            estimate_pe(params, NO_FADING, -1.0, 1.0, 10, seed=0)
        with pytest.raises(ValueError):
            estimate_pe(params, NO_FADING, 1.0, 1.0, 10, seed=-1)


def test_oracle_agreement_smoke():
    # Two cells of the acceptance grid, checked at lighter weight.
    for mu, n in [(10.0, 3), (100.0, 15)]:
        params = helpers.scheme_with_alphabet(n + 1)
        est = estimate_pe(
            params, NO_FADING, helpers.power_for_mu(mu), 1.0, 100_000, seed=17
        )
        assert abs(est.p_e - analytic_pe_no_shadowing(mu, n)) <= 3 * est.half_width_95
