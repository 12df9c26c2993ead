"""Approximate-DP counting-query release via truncated integer Gaussian noise.

Implements the reference chain (plain Gaussian noise; noise conditioned to
stay inside a window; shared shift plus coarse rounding) and the efficient
release that draws per-coordinate noise only when the shifted count lands
within noise range of a grid-cell edge. The efficient release has exactly
the same output distribution as the reference chain's final stage, which
the audit harness checks against a brute-force oracle.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .bit_tape import BitTape
from .core_samplers import GaussParam, _truncated_attempts, discrete_gaussian
from .errors import EnclosureContractError, FrugalDPError, ParameterDomainError
from .precise_math import IntervalValue, exp_neg, exp_pos, interval_div, ln_enclose

_CERTIFY_MAX_BITS = 1 << 13


@dataclass(frozen=True)
class CountVector:
    """True column sums of a binary dataset: d counts over n rows."""

    d: int
    n: int
    sums: tuple[int, ...]

    def __post_init__(self):
        if self.d < 1 or len(self.sums) != self.d:
            raise ParameterDomainError("sums must have length d >= 1")
        if self.n < 0:
            raise ParameterDomainError("dataset size must be non-negative")
        for i, v in enumerate(self.sums):
            if not 0 <= v <= self.n:
                raise ParameterDomainError(f"count {i} outside [0, n]")


@dataclass(frozen=True)
class RandomnessReport:
    """Exact bit accounting for one mechanism invocation."""

    bits_total: int
    bits_by_category: dict[str, int]
    boundary_coordinates: tuple[int, ...]
    draws_attempted: dict[int, int]

    def __post_init__(self):
        if sum(self.bits_by_category.values()) != self.bits_total:
            raise FrugalDPError("category bit counts do not sum to the total")


@dataclass(frozen=True)
class MechanismResult:
    values: tuple[int, ...]
    report: RandomnessReport


def floor_multiple(v: int, k: int) -> int:
    """Largest multiple of k that is <= v (floor toward minus infinity)."""
    if k < 1:
        raise ParameterDomainError("grid unit must be a positive integer")
    return (v // k) * k


def is_silent(sum_i: int, omega: int, halfwidth: int, grid: int) -> bool:
    """True when rounding is unaffected by any noise in (-halfwidth, halfwidth)."""
    return floor_multiple(sum_i + omega - halfwidth, grid) == floor_multiple(
        sum_i + omega + halfwidth, grid
    )


class ApproxParams:
    """Validated parameters of the approximate-DP release.

    ``sigma_sq_interval`` is the derived enclosure of 4 d ln(2/delta) / eps^2;
    the variance actually sampled, ``sigma_sq``, is pinned to the enclosure's
    upper endpoint (an exact rational). Enlarging the variance only increases
    the noise, so the privacy guarantee survives the pinning, and the window
    radius r is certified directly against the pinned value.
    """

    __slots__ = (
        "d",
        "s",
        "epsilon",
        "delta",
        "gamma",
        "gamma_floor",
        "sigma_sq_interval",
        "sigma_sq",
        "r",
        "grid",
        "gauss",
    )

    def __init__(
        self,
        d: int,
        s: int,
        sigma_sq: Fraction,
        r: int,
        *,
        sigma_sq_interval: IntervalValue | None = None,
        gamma: IntervalValue | None = None,
        gamma_floor: Fraction | None = None,
        epsilon: Fraction | None = None,
        delta: Fraction | None = None,
    ):
        if d < 1 or s < 1 or r < 1:
            raise ParameterDomainError("d, s and r must be positive integers")
        if sigma_sq <= 0:
            raise ParameterDomainError("sigma_sq must be positive")
        self.d = d
        self.s = s
        self.sigma_sq = Fraction(sigma_sq)
        self.sigma_sq_interval = sigma_sq_interval or IntervalValue.from_fraction(self.sigma_sq, 96)
        self.r = r
        self.grid = r * s
        self.gamma = gamma
        self.gamma_floor = gamma_floor
        self.epsilon = epsilon
        self.delta = delta
        self.gauss = GaussParam(self.sigma_sq)

    @property
    def accuracy_bound(self) -> int:
        """Deterministic worst-case error r(2s+1) of the grid release."""
        return self.r * (2 * self.s + 1)


def _certified_le(value: Fraction, target_fn) -> bool:
    """Decide value <= target where target_fn(prec) encloses an irrational target."""
    prec = 64
    while prec <= _CERTIFY_MAX_BITS:
        iv = target_fn(prec)
        if value <= iv.lo.as_fraction():
            return True
        if value > iv.hi.as_fraction():
            return False
        prec *= 2
    raise EnclosureContractError("comparison against enclosure failed to resolve")


def certify_window_radius(sigma_sq: Fraction, tail_budget: Fraction) -> int:
    """Smallest integer r >= 1 with 2 exp(-r^2 / (2 sigma^2)) <= tail_budget.

    The two-sided Gaussian tail bound then gives P[|noise| >= r] <= budget,
    which is the property the privacy argument consumes. Certified by
    interval evaluation; monotone in r, so binary search is sound.
    """
    if tail_budget <= 0:
        raise ParameterDomainError("tail budget must be positive")

    def ok(r: int) -> bool:
        if r == 0:
            return False
        x = Fraction(r * r, 1) / (2 * sigma_sq)
        prec = 64
        while prec <= _CERTIFY_MAX_BITS:
            iv = exp_neg(x, prec)
            if 2 * iv.hi.as_fraction() <= tail_budget:
                return True
            if 2 * iv.lo.as_fraction() > tail_budget:
                return False
            prec *= 2
        raise EnclosureContractError("window radius certification failed to resolve")

    hi = 1
    while not ok(hi):
        hi *= 2
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def derive_approx_params(
    epsilon: Fraction, delta: Fraction, d: int, s: int, precision: int = 96
) -> ApproxParams:
    """Derive all constants of the approximate-DP release from (eps, delta, d, s).

    Requires delta <= exp(-eps/2), certified by interval refinement. All
    derived irrationals are carried as enclosures; see ApproxParams for how
    the sampled variance is pinned.
    """
    epsilon = Fraction(epsilon)
    delta = Fraction(delta)
    if epsilon <= 0:
        raise ParameterDomainError("epsilon must be positive")
    if not 0 < delta < 1:
        raise ParameterDomainError("delta must lie in (0, 1)")
    if d < 1 or s < 1:
        raise ParameterDomainError("d and s must be positive integers")
    if not _certified_le(delta, lambda p: exp_neg(epsilon / 2, p)):
        raise ParameterDomainError("delta must satisfy delta <= exp(-epsilon/2)")
    # gamma = delta / (2 (e^eps + 1))
    exp_eps = exp_pos(epsilon, precision + 4)
    denom = (exp_eps + IntervalValue.exact(1)).scale(2, precision + 4)
    gamma = interval_div(IntervalValue.from_fraction(delta, precision + 4), denom, precision)
    gamma_floor = gamma.lo.as_fraction()
    if gamma_floor <= 0:
        raise EnclosureContractError("gamma enclosure collapsed to zero")
    # sigma^2 = 4 d ln(2/delta) / eps^2
    sigma_sq_interval = ln_enclose(2 / delta, precision).scale(4 * d / epsilon**2, precision)
    sigma_sq = sigma_sq_interval.hi.as_fraction()
    r = certify_window_radius(sigma_sq, gamma_floor / d)
    return ApproxParams(
        d,
        s,
        sigma_sq,
        r,
        sigma_sq_interval=sigma_sq_interval,
        gamma=gamma,
        gamma_floor=gamma_floor,
        epsilon=epsilon,
        delta=delta,
    )


def approx_params_from_sigma(
    d: int, s: int, sigma_sq: Fraction, gamma: Fraction
) -> ApproxParams:
    """Parameters with a forced rational variance; r still certified from gamma.

    Intended for audits and equivalence tests, which hold for any (sigma, r, s).
    """
    sigma_sq = Fraction(sigma_sq)
    gamma = Fraction(gamma)
    r = certify_window_radius(sigma_sq, gamma / d)
    return ApproxParams(
        d,
        s,
        sigma_sq,
        r,
        gamma=IntervalValue.from_fraction(gamma, 96),
        gamma_floor=gamma,
    )


def _check_inputs(counts: CountVector, params) -> None:
    if counts.d != params.d:
        raise ParameterDomainError("dimension mismatch between counts and parameters")


def _check_shift(omega: int | None, unit: int, s: int) -> None:
    if omega is None:
        return
    if omega % unit != 0 or not unit <= omega <= unit * s:
        raise ParameterDomainError("forced shift must be a unit multiple in {unit..unit*s}")


def _report(
    tape: BitTape,
    start: tuple[int, Counter],
    boundary: tuple[int, ...] = (),
    attempts: dict[int, int] | None = None,
) -> RandomnessReport:
    start_bits, start_log = start
    by_cat = {}
    for name, count in tape.draw_log.items():
        delta = count - start_log.get(name, 0)
        if delta:
            by_cat[name] = delta
    return RandomnessReport(
        bits_total=tape.bits_consumed - start_bits,
        bits_by_category=by_cat,
        boundary_coordinates=boundary,
        draws_attempted=attempts or {},
    )


def _truncated_gaussian(tape: BitTape, params: ApproxParams) -> tuple[int, int]:
    return _truncated_attempts(tape, lambda t: discrete_gaussian(t, params.gauss), params.r)


def _assert_envelope(values, counts, params) -> None:
    bound = params.accuracy_bound
    for y, s_i in zip(values, counts.sums):
        if abs(y - s_i) > bound:
            raise FrugalDPError("deterministic accuracy envelope violated")


def mech_approx_reference(
    counts: CountVector,
    params: ApproxParams,
    variant: int,
    tape: BitTape,
    omega: int | None = None,
) -> MechanismResult:
    """Reference mechanisms, in increasing order of structure.

    variant 1: counts + Gaussian noise per coordinate.
    variant 2: noise conditioned on staying inside (-r, r).
    variant 3: one shared shift from {r, 2r, ..., rs}, truncated noise,
        rounding down to the grid r*s.

    Variant 3 defines the exact output law the efficient release must match.
    """
    _check_inputs(counts, params)
    if variant not in (1, 2, 3):
        raise ParameterDomainError("variant must be 1, 2 or 3")
    _check_shift(omega, params.r, params.s)
    start = tape.snapshot()
    attempts: dict[int, int] = {}
    if variant == 3:
        if omega is None:
            with tape.category("shift"):
                omega = params.r * tape.uniform_range(params.s)
    values = []
    for i, s_i in enumerate(counts.sums):
        with tape.category("gaussian"):
            if variant == 1:
                eta = discrete_gaussian(tape, params.gauss)
                attempts[i] = 1
            else:
                eta, attempts[i] = _truncated_gaussian(tape, params)
        if variant == 3:
            values.append(floor_multiple(s_i + omega + eta, params.grid))
        else:
            values.append(s_i + eta)
    values = tuple(values)
    if variant == 3:
        _assert_envelope(values, counts, params)
    return MechanismResult(values, _report(tape, start, tuple(range(counts.d)), attempts))


def mech_approx_efficient(
    counts: CountVector,
    params: ApproxParams,
    tape: BitTape,
    omega: int | None = None,
) -> MechanismResult:
    """Efficient release: same output law as reference variant 3.

    After the shared shift, a coordinate whose rounded value is already
    determined for every noise magnitude below r is released silently with
    zero noise bits; only boundary coordinates draw truncated Gaussian noise.
    """
    _check_inputs(counts, params)
    _check_shift(omega, params.r, params.s)
    start = tape.snapshot()
    if omega is None:
        with tape.category("shift"):
            omega = params.r * tape.uniform_range(params.s)
    r, grid = params.r, params.grid
    values = []
    boundary = []
    attempts: dict[int, int] = {}
    for i, s_i in enumerate(counts.sums):
        if is_silent(s_i, omega, r, grid):
            values.append(floor_multiple(s_i + omega, grid))
            continue
        with tape.category("gaussian"):
            eta, attempts[i] = _truncated_gaussian(tape, params)
        boundary.append(i)
        values.append(floor_multiple(s_i + omega + eta, grid))
    values = tuple(values)
    _assert_envelope(values, counts, params)
    return MechanismResult(values, _report(tape, start, tuple(boundary), attempts))
