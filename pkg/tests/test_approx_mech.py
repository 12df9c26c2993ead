"""Tests for the approximate-DP release mechanisms."""

import math
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from frugaldp.approx_mech import (
    ApproxParams,
    CountVector,
    approx_params_from_sigma,
    certify_window_radius,
    derive_approx_params,
    floor_multiple,
    is_silent,
    mech_approx_efficient,
    mech_approx_reference,
)
from frugaldp.audit_harness import crossing_shifts, two_sample_chi_square
from frugaldp.bit_tape import BitTape
from frugaldp.errors import ParameterDomainError


class TestFloorMultiple:
    def test_examples(self):
        assert floor_multiple(7, 3) == 6
        assert floor_multiple(12, 4) == 12
        assert floor_multiple(-1, 3) == -3

    @given(st.integers(min_value=-(10**9), max_value=10**9), st.integers(min_value=1, max_value=10**6))
    def test_properties(self, v, k):
        m = floor_multiple(v, k)
        assert m % k == 0
        assert m <= v < m + k

    def test_bad_grid(self):
        with pytest.raises(ParameterDomainError):
            floor_multiple(5, 0)


class TestDeriveParams:
    def test_sigma_formula(self):
        # delta ~ exp(-1): sigma^2 = 4 ln(2/delta) = 4 (ln 2 + 1) ~ 6.7726.
        delta = Fraction(367879441171442, 10**15)
        params = derive_approx_params(Fraction(1), delta, 1, 3)
        ref = 4 * math.log(2 / float(delta))
        assert abs(float(params.sigma_sq_interval.lo) - ref) < 1e-9
        assert abs(float(params.sigma_sq_interval.hi) - ref) < 1e-9
        assert params.sigma_sq == params.sigma_sq_interval.hi.as_fraction()

    def test_delta_domain_enforced(self):
        # exp(-1/2) ~ 0.6065: delta = 0.7 must be rejected.
        with pytest.raises(ParameterDomainError):
            derive_approx_params(Fraction(1), Fraction(7, 10), 2, 2)
        derive_approx_params(Fraction(1), Fraction(6, 10), 2, 2)

    def test_window_radius_certified_minimal(self):
        params = derive_approx_params(Fraction(1), Fraction(1, 4), 4, 4)
        sigma_sq = float(params.sigma_sq)
        budget = float(params.gamma_floor) / params.d
        assert 2 * math.exp(-params.r**2 / (2 * sigma_sq)) <= budget
        assert 2 * math.exp(-((params.r - 1) ** 2) / (2 * sigma_sq)) > budget

    def test_certify_window_radius_direct(self):
        r = certify_window_radius(Fraction(2), Fraction(1, 2048))
        assert 2 * math.exp(-(r**2) / 4) <= 1 / 2048
        assert 2 * math.exp(-((r - 1) ** 2) / 4) > 1 / 2048

    def test_basic_validation(self):
        with pytest.raises(ParameterDomainError):
            derive_approx_params(Fraction(0), Fraction(1, 4), 2, 2)
        with pytest.raises(ParameterDomainError):
            derive_approx_params(Fraction(1), Fraction(0), 2, 2)
        with pytest.raises(ParameterDomainError):
            derive_approx_params(Fraction(1), Fraction(1, 4), 0, 2)


class TestHandEvaluations:
    # d=1, sums=10, r=2, s=3: grid 6. With shift 4 both probe points round
    # to 12, so the release is silent; with shift 2 they disagree.
    def _params(self):
        return ApproxParams(1, 3, Fraction(2), 2)

    def test_silent_branch(self):
        counts = CountVector(d=1, n=20, sums=(10,))
        tape = BitTape(seed=901)
        res = mech_approx_efficient(counts, self._params(), tape, omega=4)
        assert res.values == (12,)
        assert res.report.bits_total == 0
        assert res.report.boundary_coordinates == ()

    def test_noisy_branch(self):
        counts = CountVector(d=1, n=20, sums=(10,))
        tape = BitTape(seed=902)
        res = mech_approx_efficient(counts, self._params(), tape, omega=2)
        assert res.report.boundary_coordinates == (0,)
        assert res.report.bits_by_category.get("gaussian", 0) > 0
        assert res.values[0] % 6 == 0

    def test_silent_test_math(self):
        assert is_silent(10, 4, 2, 6)
        assert not is_silent(10, 2, 2, 6)

    def test_variant3_forced_shift_tiny_noise(self):
        counts = CountVector(d=1, n=20, sums=(10,))
        params = ApproxParams(1, 3, Fraction(1, 10000), 2)
        tape = BitTape(seed=903)
        for _ in range(200):
            res = mech_approx_reference(counts, params, 3, tape, omega=4)
            assert res.values == (12,)


class TestReferenceChain:
    def test_truncation_with_huge_radius_is_identity(self):
        counts = CountVector(d=1, n=20, sums=(10,))
        loose = ApproxParams(1, 3, Fraction(2), 200)
        hist1 = Counter()
        hist2 = Counter()
        t1, t2 = BitTape(seed=904), BitTape(seed=905)
        for _ in range(30_000):
            hist1[mech_approx_reference(counts, loose, 1, t1).values] += 1
            hist2[mech_approx_reference(counts, loose, 2, t2).values] += 1
        assert two_sample_chi_square(hist1, hist2) >= 0.001

    def test_variant1_tiny_variance_pins_output(self):
        counts = CountVector(d=2, n=20, sums=(5, 11))
        params = ApproxParams(2, 2, Fraction(1, 100), 1)
        tape = BitTape(seed=906)
        for _ in range(2_000):
            res = mech_approx_reference(counts, params, 1, tape)
            assert res.values == (5, 11)  # P[noise != 0] ~ 2 exp(-50)

    def test_variant_validation(self):
        counts = CountVector(d=1, n=5, sums=(3,))
        params = ApproxParams(1, 2, Fraction(2), 2)
        with pytest.raises(ParameterDomainError):
            mech_approx_reference(counts, params, 4, BitTape(seed=907))


class TestEfficientMechanism:
    def test_deterministic_envelope_always_holds(self):
        counts = CountVector(d=4, n=50, sums=(0, 17, 33, 50))
        params = approx_params_from_sigma(4, 5, Fraction(3), Fraction(1, 4096))
        tape = BitTape(seed=908)
        bound = params.accuracy_bound
        assert bound == params.r * (2 * params.s + 1)
        for _ in range(2_000):
            res = mech_approx_efficient(counts, params, tape)
            err = max(abs(y - s) for y, s in zip(res.values, counts.sums))
            assert err <= bound

    def test_outputs_on_grid(self):
        counts = CountVector(d=3, n=30, sums=(1, 15, 30))
        params = approx_params_from_sigma(3, 4, Fraction(2), Fraction(1, 1024))
        tape = BitTape(seed=909)
        for _ in range(500):
            res = mech_approx_efficient(counts, params, tape)
            assert all(v % params.grid == 0 for v in res.values)

    def test_boundary_fraction_bounded(self):
        # Fraction of coordinates needing noise <= 2/s plus sampling slack.
        d, s = 64, 8
        counts = CountVector(d=d, n=1000, sums=tuple((37 * i) % 1000 for i in range(d)))
        params = approx_params_from_sigma(d, s, Fraction(4), Fraction(1, 1 << 20))
        tape = BitTape(seed=910)
        runs = 200
        total_boundary = 0
        for _ in range(runs):
            res = mech_approx_efficient(counts, params, tape)
            total_boundary += len(res.report.boundary_coordinates)
        mean = total_boundary / runs
        limit = 2 * d / s
        sigma = math.sqrt(limit * (1 - 2 / s) / runs)
        assert mean <= limit + 3 * sigma + 0.5

    def test_exhaustive_crossing_count(self):
        for s in (3, 8, 17):
            for y in (0, 1, 5, 13, 97, 1234):
                assert len(crossing_shifts(y, 2, s)) <= 2

    def test_equivalence_at_pinned_small_params(self):
        # Fixed desk-scale configuration: d=2, r=2, s=3, sigma^2=2.
        from collections import Counter

        from frugaldp.audit_harness import chi_square, oracle_joint_dist_approx, tv_distance
        from frugaldp.bit_tape import BitTape

        params = ApproxParams(2, 3, Fraction(2), 2)
        counts = CountVector(d=2, n=20, sums=(5, 11))
        oracle = oracle_joint_dist_approx(counts, params)
        tape = BitTape(seed=912)
        hist = Counter()
        for _ in range(100_000):
            hist[mech_approx_efficient(counts, params, tape).values] += 1
        assert chi_square(hist, oracle) >= 0.001
        assert float(tv_distance(hist, oracle)) <= 0.02

    def test_report_accounting(self):
        counts = CountVector(d=4, n=20, sums=(3, 7, 11, 19))
        params = approx_params_from_sigma(4, 3, Fraction(2), Fraction(1, 1024))
        tape = BitTape(seed=911)
        res = mech_approx_efficient(counts, params, tape)
        assert sum(res.report.bits_by_category.values()) == res.report.bits_total
        assert set(res.report.boundary_coordinates) <= set(range(4))
        assert set(res.report.draws_attempted) == set(res.report.boundary_coordinates)

    def test_dimension_mismatch(self):
        params = approx_params_from_sigma(2, 3, Fraction(2), Fraction(1, 1024))
        with pytest.raises(ParameterDomainError):
            mech_approx_efficient(CountVector(d=3, n=5, sums=(1, 2, 3)), params, BitTape(seed=1))

    def test_forced_shift_validation(self):
        params = ApproxParams(1, 3, Fraction(2), 2)
        counts = CountVector(d=1, n=5, sums=(3,))
        with pytest.raises(ParameterDomainError):
            mech_approx_efficient(counts, params, BitTape(seed=1), omega=3)  # not a multiple of r
        with pytest.raises(ParameterDomainError):
            mech_approx_efficient(counts, params, BitTape(seed=1), omega=8)  # above r*s
