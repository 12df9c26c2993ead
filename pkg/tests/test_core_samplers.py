"""Tests for the exact primitive samplers.

Every asserted probability is computed from an independent oracle first
(closed-form evaluation or truncated normalization with float math) and
compared against seeded empirical frequencies.
"""

import math
from fractions import Fraction

import pytest

import frugaldp.core_samplers as cs
from frugaldp.audit_harness import two_sample_chi_square
from frugaldp.bit_tape import BitTape
from frugaldp.core_samplers import (
    GaussParam,
    LaplaceScale,
    bernoulli_exp,
    bernoulli_from_prob,
    constant_prob,
    discrete_gaussian,
    discrete_laplace,
    geometric,
    geometric_fast,
    laplace_tail_sample,
    truncated_sample,
)
from frugaldp.errors import ParameterDomainError, SampleBudgetError

from conftest import collect_histogram


class TestBernoulliExp:
    def test_mean_at_gamma_one(self):
        tape = BitTape(seed=101)
        n = 100_000
        mean = sum(bernoulli_exp(tape, 1) for _ in range(n)) / n
        assert abs(mean - (1 - math.exp(-1))) <= 0.01

    def test_tiny_success_probability(self):
        # gamma = 2**20: success probability 1 - exp(-2**-20) ~ 9.54e-7.
        tape = BitTape(seed=102)
        n = 1_000_000
        gamma = Fraction(1 << 20)
        successes = sum(bernoulli_exp(tape, gamma) for _ in range(n))
        q = 1 - math.exp(-float(1 / gamma))
        assert abs(successes / n - q) <= 3 * math.sqrt(q / n)

    def test_seeded_runs_identical(self):
        a = BitTape(seed=103)
        b = BitTape(seed=103)
        seq_a = [bernoulli_exp(a, Fraction(3, 2)) for _ in range(200)]
        seq_b = [bernoulli_exp(b, Fraction(3, 2)) for _ in range(200)]
        assert seq_a == seq_b

    def test_invalid_gamma(self):
        tape = BitTape(seed=1)
        with pytest.raises(ParameterDomainError):
            bernoulli_exp(tape, 0)


class TestBernoulliFromProb:
    def test_rational_probability(self):
        prob = constant_prob(Fraction(1, 3))
        tape = BitTape(seed=105)
        n = 50_000
        mean = sum(bernoulli_from_prob(tape, prob) for _ in range(n)) / n
        assert abs(mean - 1 / 3) <= 0.01

    def test_certain_outcomes_cost_no_bits(self):
        tape = BitTape(seed=106)
        assert bernoulli_from_prob(tape, constant_prob(Fraction(1))) == 1
        assert bernoulli_from_prob(tape, constant_prob(Fraction(0))) == 0
        assert tape.bits_consumed == 0

    def test_probability_domain(self):
        with pytest.raises(ParameterDomainError):
            constant_prob(Fraction(3, 2))


class TestGeometric:
    def test_mass_at_zero(self):
        scale = LaplaceScale(2)
        hist, _ = collect_histogram(lambda t: geometric(t, scale), 100_000, 201)
        n = sum(hist.values())
        assert abs(hist[0] / n - (1 - math.exp(-0.5))) <= 0.01

    def test_successive_ratio(self):
        scale = LaplaceScale(2)
        hist, _ = collect_histogram(lambda t: geometric(t, scale), 100_000, 202)
        for k in range(3):
            ratio = hist[k + 1] / hist[k]
            assert abs(ratio - math.exp(-0.5)) <= 0.03

    def test_tiny_scale_collapses_to_zero(self):
        scale = LaplaceScale(Fraction(1, 64))
        hist, _ = collect_histogram(lambda t: geometric(t, scale), 10_000, 203)
        assert set(hist) == {0}  # P[nonzero] <= exp(-64)

    def test_fast_matches_slow_distribution(self):
        # Non-integer scale 7/2 exercises the residue and divisor paths.
        scale = LaplaceScale(Fraction(7, 2))
        slow, _ = collect_histogram(lambda t: geometric(t, scale), 30_000, 204)
        fast, _ = collect_histogram(lambda t: geometric_fast(t, scale), 30_000, 205)
        assert two_sample_chi_square(slow, fast) >= 0.001

    def test_fast_uses_fewer_bits_at_large_scale(self):
        scale = LaplaceScale(128)
        _, slow_bits = collect_histogram(lambda t: geometric(t, scale), 2_000, 206)
        _, fast_bits = collect_histogram(lambda t: geometric_fast(t, scale), 2_000, 207)
        assert fast_bits < slow_bits / 5


class TestDiscreteLaplace:
    def test_mass_at_zero(self):
        scale = LaplaceScale(1)
        hist, _ = collect_histogram(lambda t: discrete_laplace(t, scale), 100_000, 301)
        n = sum(hist.values())
        expected = (math.e - 1) / (math.e + 1)
        assert abs(hist[0] / n - expected) <= 0.01

    def test_symmetry(self):
        scale = LaplaceScale(1)
        hist, _ = collect_histogram(lambda t: discrete_laplace(t, scale), 100_000, 302)
        n = sum(hist.values())
        for k in (1, 2, 3):
            assert abs(hist[k] / n - hist[-k] / n) <= 0.01

    def test_tail_mass(self):
        # P[X >= m] = exp(-eps(m-1)) / (e^eps + 1) at scale 1/eps; eps=1, m=3.
        scale = LaplaceScale(1)
        hist, _ = collect_histogram(lambda t: discrete_laplace(t, scale), 100_000, 303)
        n = sum(hist.values())
        tail = sum(c for k, c in hist.items() if k >= 3) / n
        expected = math.exp(-2) / (math.e + 1)
        assert abs(tail - expected) <= 0.005

    def test_bit_cost_grows_polylog(self):
        means = []
        for seed, t in enumerate((2, 8, 32, 128)):
            scale = LaplaceScale(t)
            _, bits = collect_histogram(lambda tp: discrete_laplace(tp, scale), 3_000, 400 + seed)
            means.append(bits / 3_000)
        assert means[0] <= means[1] * 1.02
        assert means[1] <= means[2] * 1.02
        assert means[2] <= means[3] * 1.02
        # 64x scale increase must cost far less than 64x bits; polylog growth.
        assert means[3] <= 8 * means[0]


class TestDiscreteGaussian:
    def test_mass_at_zero_vs_truncated_normalization(self):
        param = GaussParam(1)
        hist, _ = collect_histogram(lambda t: discrete_gaussian(t, param), 100_000, 501)
        n = sum(hist.values())
        z = sum(math.exp(-x * x / 2) for x in range(-40, 41))
        assert abs(hist[0] / n - 1 / z) <= 0.01

    def test_symmetry(self):
        param = GaussParam(1)
        hist, _ = collect_histogram(lambda t: discrete_gaussian(t, param), 100_000, 502)
        n = sum(hist.values())
        for k in (1, 2):
            assert abs(hist[k] / n - hist[-k] / n) <= 0.01

    def test_tail_bound(self):
        # P[X >= 6] <= exp(-36/8) = 0.01111 at sigma^2 = 4.
        param = GaussParam(4)
        hist, _ = collect_histogram(lambda t: discrete_gaussian(t, param), 100_000, 503)
        n = sum(hist.values())
        tail = sum(c for k, c in hist.items() if k >= 6) / n
        bound = math.exp(-36 / 8)
        assert tail <= bound + 3 * math.sqrt(bound / n)

    def test_fractional_variance(self):
        param = GaussParam(Fraction(1, 100))
        hist, _ = collect_histogram(lambda t: discrete_gaussian(t, param), 2_000, 504)
        assert set(hist) == {0}  # P[X != 0] ~ 2 exp(-50)


class TestTruncatedSample:
    def test_huge_bound_is_identity(self):
        scale = LaplaceScale(2)
        base, _ = collect_histogram(lambda t: discrete_laplace(t, scale), 20_000, 601)
        trunc, _ = collect_histogram(
            lambda t: truncated_sample(t, lambda tp: discrete_laplace(tp, scale), 10**9),
            20_000,
            602,
        )
        assert two_sample_chi_square(base, trunc) >= 0.001

    def test_bound_one_pins_to_zero(self):
        scale = LaplaceScale(1)
        hist, _ = collect_histogram(
            lambda t: truncated_sample(t, lambda tp: discrete_laplace(tp, scale), 1), 2_000, 603
        )
        assert set(hist) == {0}

    def test_conditional_pmf(self):
        # Renormalized oracle over {-2..2} for Lap_Z(2) conditioned |X| < 3.
        scale = LaplaceScale(2)
        weights = {k: math.exp(-abs(k) / 2) for k in range(-2, 3)}
        z = sum(weights.values())
        oracle = {k: w / z for k, w in weights.items()}
        hist, _ = collect_histogram(
            lambda t: truncated_sample(t, lambda tp: discrete_laplace(tp, scale), 3),
            100_000,
            604,
        )
        n = sum(hist.values())
        empirical = {k: c / n for k, c in hist.items()}
        tv = sum(abs(empirical.get(k, 0) - oracle.get(k, 0)) for k in set(empirical) | set(oracle)) / 2
        assert tv <= 0.02

    def test_attempt_cap_raises(self, monkeypatch):
        monkeypatch.setattr(cs, "ATTEMPT_CAP", 50)
        tape = BitTape(seed=605)
        with pytest.raises(SampleBudgetError):
            truncated_sample(tape, lambda t: 7, 1)

    def test_bad_bound(self):
        tape = BitTape(seed=606)
        with pytest.raises(ParameterDomainError):
            truncated_sample(tape, lambda t: 0, 0)


class TestLaplaceTailSample:
    def test_sign_balance(self):
        scale = LaplaceScale(2)
        hist, _ = collect_histogram(lambda t: laplace_tail_sample(t, scale, 3), 100_000, 701)
        n = sum(hist.values())
        positive = sum(c for k, c in hist.items() if k > 0) / n
        assert abs(positive - 0.5) <= 0.01

    def test_support_excludes_body(self):
        scale = LaplaceScale(2)
        hist, _ = collect_histogram(lambda t: laplace_tail_sample(t, scale, 3), 200_000, 702)
        assert min(abs(k) for k in hist) == 3

    def test_geometric_ratio_from_threshold(self):
        scale = LaplaceScale(2)
        hist, _ = collect_histogram(lambda t: laplace_tail_sample(t, scale, 3), 100_000, 703)
        ratio = hist[3] / hist[4]
        assert abs(ratio - math.exp(0.5)) <= 0.06

    def test_memorylessness_matches_geometric(self):
        scale = LaplaceScale(2)
        excess, _ = collect_histogram(
            lambda t: abs(laplace_tail_sample(t, scale, 5)) - 5, 50_000, 704
        )
        geo, _ = collect_histogram(lambda t: geometric(t, scale), 50_000, 705)
        assert two_sample_chi_square(excess, geo) >= 0.001

    def test_threshold_validation(self):
        tape = BitTape(seed=706)
        with pytest.raises(ParameterDomainError):
            laplace_tail_sample(tape, LaplaceScale(2), 0)


def test_scale_validation():
    with pytest.raises(ParameterDomainError):
        LaplaceScale(0)
    with pytest.raises(ParameterDomainError):
        GaussParam(Fraction(-1, 2))
