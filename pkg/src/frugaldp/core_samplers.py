"""Exact samplers for the primitive distributions the mechanisms draw from.

Every sampler here consumes fair bits from a :class:`~frugaldp.bit_tape.BitTape`
and nothing else. Events with irrational probabilities (anything involving
exp) are decided by lazily comparing a bit-by-bit uniform dyadic against a
refinable interval enclosure of the probability: refine until the uniform
point falls strictly outside the interval. This terminates with probability
one and makes every sampler exact; no floating point is involved anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable

from .bit_tape import BitTape
from .errors import EnclosureContractError, ParameterDomainError, SampleBudgetError
from .precise_math import (
    DYADIC_ONE,
    IntervalValue,
    exp_neg,
    floor_sqrt,
    scaled_bounds,
)

#: Rejection loops raise SampleBudgetError after this many attempts. At valid
#: mechanism parameters even 40 attempts fail with probability < 2**-40.
ATTEMPT_CAP = 1 << 20

_MAX_COMPARE_DEPTH = 6000
_LEVEL_START = 64
_LEVEL_MAX = 1 << 15


class RefinableProb:
    """A probability in [0, 1] with certified scaled-integer bounds.

    Wraps an enclosure function ``fn(precision_bits) -> IntervalValue`` and
    caches levels of (precision, lo, hi, limit) integer bounds, doubling the
    precision whenever a comparison needs a tighter enclosure. ``limit`` is
    the largest comparison depth the level can certify: a level at precision
    P with width w serves any depth up to about P - log2(w * 2**P).
    """

    __slots__ = ("_fn", "_levels")

    def __init__(self, fn: Callable[[int], IntervalValue]):
        self._fn = fn
        self._levels: list[tuple[int, int, int, int]] = []

    def level(self, min_bits: int) -> tuple[int, int, int, int]:
        """Bounds (P, lo, hi, limit) usable while min_bits + 2 <= limit."""
        need = min_bits + 2
        for rec in self._levels:
            if need <= rec[3]:
                return rec
        p = max(_LEVEL_START, min_bits + 8)
        if self._levels:
            p = max(p, self._levels[-1][0] * 2)
        while True:
            iv = self._fn(p)
            lo, hi = scaled_bounds(iv, p)
            lo, hi = max(lo, 0), min(hi, 1 << p)
            if self._levels:
                prev = self._levels[-1]
                # Levels must overlap; disjoint enclosures mean a broken oracle.
                if lo << prev[0] > prev[2] << p or hi << prev[0] < prev[1] << p:
                    raise EnclosureContractError("refined enclosure disjoint from previous level")
            rec = (p, lo, hi, p - (hi - lo).bit_length())
            self._levels.append(rec)
            if need <= rec[3]:
                return rec
            if p > _LEVEL_MAX:
                raise EnclosureContractError("enclosure failed to refine")
            p *= 2


def constant_prob(value: Fraction) -> RefinableProb:
    """RefinableProb for an exactly known rational probability."""
    if not 0 <= value <= 1:
        raise ParameterDomainError("probability must lie in [0, 1]")
    return RefinableProb(lambda p: IntervalValue.from_fraction(value, p))


def bernoulli_from_prob(tape: BitTape, prob: RefinableProb) -> int:
    """Exact Ber(q) for the probability enclosed by ``prob``.

    Streams uniform bits u_1 u_2 ... and returns as soon as the dyadic box
    [u, u + 2**-n) is certified to lie entirely below or above q. Expected
    tape cost is about two bits regardless of q; the enclosure refinement
    consumes no randomness.
    """
    p, lo, hi, limit = prob.level(0)
    next_bit = tape.next_bit
    u = 0
    nb = 0
    while True:
        shift = p - nb
        if (u + 1) << shift <= lo:
            return 1
        if (u << shift) >= hi:
            return 0
        u = (u << 1) | next_bit()
        nb += 1
        if nb + 2 > limit:
            p, lo, hi, limit = prob.level(nb)
        if nb > _MAX_COMPARE_DEPTH:
            raise EnclosureContractError("Bernoulli comparison failed to resolve")


def _one_minus(iv: IntervalValue) -> IntervalValue:
    return IntervalValue.exact(DYADIC_ONE) - iv


_EXP_NEG_ONE = RefinableProb(lambda p: exp_neg(1, p))


class LaplaceScale:
    """Scale t > 0 of the integer Laplace distribution Lap_Z(t).

    Holds the derived success probability q = 1 - exp(-1/t) of the
    geometric coin plus per-residue acceptance oracles, all cached since
    enclosure refinement is deterministic.
    """

    __slots__ = ("t", "_success", "_residues", "_q_snapshot")

    def __init__(self, t: "Fraction | int"):
        t = Fraction(t)
        if t <= 0:
            raise ParameterDomainError("Laplace scale must be positive")
        self.t = t
        inv = 1 / t
        self._success = RefinableProb(lambda p, x=inv: _one_minus(exp_neg(x, p)))
        self._residues: dict[int, RefinableProb] = {}
        self._q_snapshot: IntervalValue | None = None

    @property
    def success_prob_q(self) -> IntervalValue:
        """64-bit enclosure of 1 - exp(-1/t)."""
        if self._q_snapshot is None:
            self._q_snapshot = _one_minus(exp_neg(1 / self.t, 64))
        return self._q_snapshot

    @property
    def success_oracle(self) -> RefinableProb:
        return self._success

    def residue_oracle(self, u: int) -> RefinableProb:
        """Oracle for exp(-u/a) where a is the numerator of t."""
        oracle = self._residues.get(u)
        if oracle is None:
            x = Fraction(u, self.t.numerator)
            oracle = RefinableProb(lambda p, x=x: exp_neg(x, p))
            self._residues[u] = oracle
        return oracle


class GaussParam:
    """Variance parameter sigma^2 > 0 for the integer Gaussian sampler."""

    __slots__ = ("sigma_sq", "proposal_scale", "_accept")

    def __init__(self, sigma_sq: "Fraction | int"):
        sigma_sq = Fraction(sigma_sq)
        if sigma_sq <= 0:
            raise ParameterDomainError("sigma_sq must be positive")
        self.sigma_sq = sigma_sq
        self.proposal_scale = LaplaceScale(max(1, floor_sqrt(sigma_sq)))
        self._accept: dict[int, RefinableProb] = {}

    def accept_oracle(self, magnitude: int) -> RefinableProb:
        """Oracle for exp(-(|y| - sigma^2/t)^2 / (2 sigma^2))."""
        oracle = self._accept.get(magnitude)
        if oracle is None:
            gap = (magnitude - self.sigma_sq / self.proposal_scale.t) ** 2 / (2 * self.sigma_sq)
            oracle = RefinableProb(lambda p, x=gap: exp_neg(x, p))
            self._accept[magnitude] = oracle
        return oracle


_SCALE_CACHE: dict[Fraction, LaplaceScale] = {}


def _cached_scale(gamma: "Fraction | int") -> LaplaceScale:
    key = Fraction(gamma)
    scale = _SCALE_CACHE.get(key)
    if scale is None:
        if len(_SCALE_CACHE) > 4096:
            _SCALE_CACHE.clear()
        scale = LaplaceScale(key)
        _SCALE_CACHE[key] = scale
    return scale


def bernoulli_exp(tape: BitTape, gamma: "Fraction | int | LaplaceScale") -> int:
    """Exact draw from Ber(1 - exp(-1/gamma)) for rational gamma > 0."""
    scale = gamma if isinstance(gamma, LaplaceScale) else _cached_scale(gamma)
    return bernoulli_from_prob(tape, scale.success_oracle)


def geometric(tape: BitTape, scale: LaplaceScale) -> int:
    """Geo(1 - exp(-1/t)) on {0, 1, 2, ...}: failures before the first success.

    This is the plain flip-until-one construction; expected trials are
    1/(1 - exp(-1/t)) = O(t). The tail sampler uses it directly.
    """
    count = 0
    while bernoulli_from_prob(tape, scale.success_oracle) == 0:
        count += 1
    return count


def geometric_fast(tape: BitTape, scale: LaplaceScale) -> int:
    """Same distribution as :func:`geometric` in O(polylog t) expected bits.

    Draws the residue u uniformly mod a (a = numerator of t), accepts it
    with probability exp(-u/a), adds an independent unit-rate geometric
    block a*v, and divides by the denominator. Each piece is exact, so the
    result is exactly Geo(1 - exp(-1/t)).
    """
    a = scale.t.numerator
    b = scale.t.denominator
    while True:
        u = tape.uniform_range(a) - 1
        if u == 0 or bernoulli_from_prob(tape, scale.residue_oracle(u)) == 1:
            break
    v = 0
    while bernoulli_from_prob(tape, _EXP_NEG_ONE) == 1:
        v += 1
    return (u + a * v) // b


def discrete_laplace(tape: BitTape, scale: LaplaceScale) -> int:
    """Lap_Z(t): difference U - V of two i.i.d. Geo(1 - exp(-1/t)) draws."""
    return geometric_fast(tape, scale) - geometric_fast(tape, scale)


def discrete_gaussian(tape: BitTape, param: GaussParam) -> int:
    """Integer Gaussian with pmf proportional to exp(-y^2 / (2 sigma^2)).

    Rejection from Lap_Z(max(1, floor(sigma))) with an exact Bernoulli
    acceptance test on the exponent gap; expected attempts are O(1).
    """
    scale = param.proposal_scale
    for _ in range(ATTEMPT_CAP):
        y = discrete_laplace(tape, scale)
        if bernoulli_from_prob(tape, param.accept_oracle(abs(y))) == 1:
            return y
    raise SampleBudgetError("discrete Gaussian rejection exceeded the attempt cap")


def _truncated_attempts(
    tape: BitTape, base: Callable[[BitTape], int], bound: int
) -> tuple[int, int]:
    for attempt in range(1, ATTEMPT_CAP + 1):
        v = base(tape)
        if abs(v) < bound:
            return v, attempt
    raise SampleBudgetError("truncated sampler exceeded the attempt cap")


def truncated_sample(tape: BitTape, base: Callable[[BitTape], int], bound: int) -> int:
    """Draw from ``base`` conditioned on |value| < bound, by rejection."""
    if bound < 1:
        raise ParameterDomainError("truncation bound must be a positive integer")
    value, _ = _truncated_attempts(tape, base, bound)
    return value


def laplace_tail_sample(tape: BitTape, scale: LaplaceScale, threshold: int) -> int:
    """Lap_Z(t) conditioned on |X| >= threshold, for threshold >= 1.

    One fair bit picks the tail (the two tails carry equal mass), then the
    magnitude is threshold plus a geometric, by memorylessness.
    """
    if threshold < 1:
        raise ParameterDomainError("tail threshold must be a positive integer")
    positive = tape.next_bit()
    magnitude = threshold + geometric(tape, scale)
    return magnitude if positive else -magnitude
