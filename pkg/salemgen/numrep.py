"""P-representations of reals in [0, 1].

A number is written as ``beta_{i_1,1} + sum_k beta_{i_k,k} prod_{j<k} p_{i_j,j}``
over a schedule of probability vectors. This module holds the vectors,
schedules, digit strings and cylinders, plus decoding, encoding and the
rational/irrational classification.
"""

import bisect
import functools
import logging
import math
import re

from dataclasses import dataclass, field
from itertools import product
from typing import Iterator, Optional, Sequence, Tuple

import numpy as np

from salemgen._constants import (
    MaxSupported,
    Rationality,
    ScheduleKind,
    SeriesDefaultValues,
    TailKind,
    Tolerance,
)
from salemgen._utils._series import Settle, combine_settle, sum_series
from salemgen.exceptions import DomainError, PointParseError

logger = logging.getLogger(__name__)

_MASK64 = (1 << 64) - 1
_SNAP = Tolerance.snap_ulps * math.ulp(1.0)
_LITERAL = re.compile(
    r"^digits:(?P<digits>[0-9,\s]*);tail:"
    r"(?P<tail>zeros|max|periodic:(?P<pattern>[0-9,\s]+)|seeded:(?P<seed>-?[0-9]+))$"
)


def _cumulative_sums(weights: Sequence[float]) -> Tuple[float, ...]:
    return tuple(math.fsum(weights[:j]) for j in range(len(weights)))


def _check_radix(q: int) -> None:
    if q < 2:
        raise DomainError(f"Radix must be at least 2, got {q}")
    if q > MaxSupported.radix:
        logger.warning(f"radix: {q} is greater than max supported: {MaxSupported.radix}")


@dataclass(frozen=True)
class EvalResult:
    """A value together with a rigorous bound on its truncation error."""

    value: float
    bound: float = 0.0

    def __post_init__(self):
        if not self.bound >= 0.0:
            raise DomainError(f"Bound must be non-negative, got {self.bound}")

    def contains(self, other: float, slack: float = 0.0) -> bool:
        return abs(self.value - other) <= self.bound + slack


@dataclass(frozen=True)
class ProbabilityVector:
    """Weights ``p_0..p_{q-1}`` of one expansion position."""

    p: Tuple[float, ...]
    q: int = field(init=False)
    beta: Tuple[float, ...] = field(init=False)

    def __post_init__(self):
        p = tuple(float(weight) for weight in self.p)
        _check_radix(len(p))
        for j, weight in enumerate(p):
            if not weight > 0.0:
                raise DomainError(f"p_{j} = {weight} is not positive")
        total = math.fsum(p)
        if abs(total - 1.0) > Tolerance.weight_sum:
            raise DomainError(f"Weights sum to {total!r}, expected 1")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", len(p))
        object.__setattr__(self, "beta", _cumulative_sums(p))

    @classmethod
    def uniform(cls, q: int) -> "ProbabilityVector":
        return cls(tuple(1.0 / q for _ in range(q)))

    @property
    def p_max(self) -> float:
        return max(self.p)


@dataclass(frozen=True)
class CoefficientVector:
    """Coefficients ``r_0..r_{q-1}`` of the generalized function, ``|r_j| < 1``."""

    r: Tuple[float, ...]
    q: int = field(init=False)
    gamma: Tuple[float, ...] = field(init=False)
    distributional: bool = field(init=False)

    def __post_init__(self):
        r = tuple(float(weight) for weight in self.r)
        _check_radix(len(r))
        for j, weight in enumerate(r):
            if not abs(weight) < 1.0:
                raise DomainError(f"|r_{j}| = {abs(weight)} is not below 1")
        distributional = all(weight > 0.0 for weight in r) and (
            abs(math.fsum(r) - 1.0) <= Tolerance.weight_sum
        )
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "q", len(r))
        object.__setattr__(self, "gamma", _cumulative_sums(r))
        object.__setattr__(self, "distributional", distributional)

    @property
    def rho(self) -> float:
        return max(abs(weight) for weight in self.r)

    def constant_tail(self, digit: int) -> float:
        """Series value of the constant digit stream ``digit, digit, ...``."""
        return self.gamma[digit] / (1.0 - self.r[digit])

    @property
    def span(self) -> float:
        """``G`` of the all-``(q-1)`` stream minus ``G`` of the all-zero stream."""
        return self.constant_tail(self.q - 1)

    @property
    def sup_abs(self) -> float:
        """Bound on the absolute value of any tail of the coefficient series."""
        if self.distributional:
            return 1.0
        return max(abs(g) for g in self.gamma) / (1.0 - self.rho)


@dataclass(frozen=True)
class ProbabilitySchedule:
    """Sequence ``(P_k)``: a constant vector or a periodic list of vectors.

    ``removed`` lists original positions taken out by generalized shifts, so
    ``delete(m)`` yields the schedule ``(P_k)`` without ``P_m``.
    """

    vectors: Tuple[ProbabilityVector, ...]
    removed: Tuple[int, ...] = ()

    def __post_init__(self):
        vectors = tuple(self.vectors)
        if not vectors:
            raise DomainError("A schedule needs at least one probability vector")
        radices = {vector.q for vector in vectors}
        if len(radices) != 1:
            raise DomainError(f"Schedule vectors mix radices {sorted(radices)}")
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "removed", tuple(sorted(self.removed)))

    @classmethod
    def constant(cls, vector: ProbabilityVector) -> "ProbabilitySchedule":
        return cls((vector,))

    @classmethod
    def periodic(cls, vectors: Sequence[ProbabilityVector]) -> "ProbabilitySchedule":
        return cls(tuple(vectors))

    @property
    def kind(self) -> str:
        return ScheduleKind.constant if len(self.vectors) == 1 else ScheduleKind.periodic_list

    @property
    def q(self) -> int:
        return self.vectors[0].q

    @property
    def period(self) -> int:
        return len(self.vectors)

    def original_position(self, k: int) -> int:
        position = k
        for gone in self.removed:
            if gone <= position:
                position += 1
        return position

    def at(self, k: int) -> ProbabilityVector:
        if k < 1:
            raise DomainError(f"Positions start at 1, got {k}")
        if self.period == 1:
            return self.vectors[0]
        return self.vectors[(self.original_position(k) - 1) % self.period]

    def weights_at(self, k: int) -> Tuple[Tuple[float, ...], Tuple[float, ...]]:
        vector = self.at(k)
        return vector.beta, vector.p

    def delete(self, m: int) -> "ProbabilitySchedule":
        """The schedule with the vector at (current) position ``m`` removed."""
        if m < 1:
            raise DomainError(f"Positions start at 1, got {m}")
        if self.period == 1:
            return self
        return ProbabilitySchedule(self.vectors, self.removed + (self.original_position(m),))

    def settles_at(self) -> Settle:
        if self.period == 1 or not self.removed:
            return 1, self.period
        return max(self.removed) - len(self.removed) + 1, self.period

    @property
    def p_max(self) -> float:
        return max(vector.p_max for vector in self.vectors)


@functools.lru_cache(maxsize=4096)
def _seeded_block(seed: int, q: int, block: int) -> Tuple[int, ...]:
    """Digits of one block of a seeded tail; Philox is keyed by (seed, block)."""
    bit_generator = np.random.Philox(key=(seed & _MASK64) | (block << 64))
    digits = np.random.Generator(bit_generator).integers(
        0, q, size=SeriesDefaultValues.seeded_block
    )
    return tuple(int(digit) for digit in digits)


@dataclass(frozen=True)
class Tail:
    """Infinite continuation of a digit string.

    ``offset`` counts tail digits already consumed, so that deleting digits
    beyond the prefix keeps the remaining stream unchanged.
    """

    kind: str
    pattern: Tuple[int, ...] = ()
    seed: Optional[int] = None
    offset: int = 0

    @classmethod
    def zeros(cls) -> "Tail":
        return cls(TailKind.zeros)

    @classmethod
    def max_digits(cls) -> "Tail":
        return cls(TailKind.max_digits)

    @classmethod
    def periodic(cls, pattern: Sequence[int]) -> "Tail":
        return cls(TailKind.periodic, pattern=tuple(int(d) for d in pattern))

    @classmethod
    def seeded(cls, seed: int) -> "Tail":
        return cls(TailKind.seeded, seed=int(seed))

    def advanced(self, count: int) -> "Tail":
        if self.kind in (TailKind.zeros, TailKind.max_digits):
            return self
        return Tail(self.kind, self.pattern, self.seed, self.offset + count)


@dataclass(frozen=True)
class DigitString:
    """Digits ``i_1 i_2 ...`` in radix ``q``: a finite prefix and a tail policy."""

    q: int
    prefix: Tuple[int, ...] = ()
    tail: Tail = Tail.zeros()

    def __post_init__(self):
        _check_radix(self.q)
        prefix = tuple(int(digit) for digit in self.prefix)
        object.__setattr__(self, "prefix", prefix)
        for position, digit in enumerate(prefix, start=1):
            if not 0 <= digit < self.q:
                raise DomainError(f"Digit {digit} at position {position} outside 0..{self.q - 1}")
        if self.tail.kind == TailKind.periodic:
            if not self.tail.pattern:
                raise DomainError("Periodic tail needs a non-empty pattern")
            if any(not 0 <= digit < self.q for digit in self.tail.pattern):
                raise DomainError(f"Periodic pattern {self.tail.pattern} outside 0..{self.q - 1}")
        elif self.tail.kind == TailKind.seeded:
            if self.tail.seed is None:
                raise DomainError("Seeded tail needs a seed")
        elif self.tail.kind not in (TailKind.zeros, TailKind.max_digits):
            raise DomainError(f"Unknown tail kind {self.tail.kind!r}")

    @classmethod
    def random(cls, q: int, seed: int, prefix: Sequence[int] = ()) -> "DigitString":
        return cls(q, tuple(prefix), Tail.seeded(seed))

    def digit_at(self, k: int) -> int:
        if k < 1:
            raise DomainError(f"Positions start at 1, got {k}")
        n = len(self.prefix)
        if k <= n:
            return self.prefix[k - 1]
        index = self.tail.offset + (k - n)
        kind = self.tail.kind
        if kind == TailKind.zeros:
            return 0
        if kind == TailKind.max_digits:
            return self.q - 1
        if kind == TailKind.periodic:
            return self.tail.pattern[(index - 1) % len(self.tail.pattern)]
        block, slot = divmod(index - 1, SeriesDefaultValues.seeded_block)
        return _seeded_block(self.tail.seed, self.q, block)[slot]

    def digits(self, depth: int) -> Tuple[int, ...]:
        return tuple(self.digit_at(k) for k in range(1, depth + 1))

    def materialize(self, length: int) -> "DigitString":
        """Same digits, with the prefix extended to at least ``length``."""
        n = len(self.prefix)
        if length <= n:
            return self
        extra = tuple(self.digit_at(k) for k in range(n + 1, length + 1))
        return DigitString(self.q, self.prefix + extra, self.tail.advanced(length - n))

    def settles_at(self) -> Settle:
        """``(start, period)`` after which digits repeat, or None for seeded tails."""
        start = len(self.prefix) + 1
        if self.tail.kind in (TailKind.zeros, TailKind.max_digits):
            return start, 1
        if self.tail.kind == TailKind.periodic:
            return start, len(self.tail.pattern)
        return None

    def tail_digit(self) -> Optional[int]:
        """The digit the tail repeats forever, if it is constant."""
        if self.tail.kind == TailKind.zeros:
            return 0
        if self.tail.kind == TailKind.max_digits:
            return self.q - 1
        if self.tail.kind == TailKind.periodic and len(set(self.tail.pattern)) == 1:
            return self.tail.pattern[0]
        return None

    def constant_digit(self) -> Optional[int]:
        digit = self.tail_digit()
        if digit is None or any(d != digit for d in self.prefix):
            return None
        return digit

    def equals_to_depth(self, other: "DigitString", depth: int) -> bool:
        return self.digits(depth) == other.digits(depth)


@dataclass(frozen=True)
class RationalityVerdict:
    """Outcome of ``classify_rationality``; rational points carry their twin forms."""

    kind: str
    zeros_form: Optional[DigitString] = None
    max_form: Optional[DigitString] = None

    @property
    def is_rational(self) -> bool:
        return self.kind == Rationality.rational

    @property
    def is_endpoint(self) -> bool:
        return self.is_rational and (self.zeros_form is None or self.max_form is None)

    @property
    def rank(self) -> Optional[int]:
        """Length ``m`` of the finite form, for rational interior points."""
        if not self.is_rational or self.is_endpoint:
            return None
        return len(self.zeros_form.prefix)

    @property
    def forms(self) -> Tuple[DigitString, ...]:
        return tuple(form for form in (self.zeros_form, self.max_form) if form is not None)


@dataclass(frozen=True)
class Cylinder:
    """All numbers whose representation starts with ``base``."""

    q: int
    base: Tuple[int, ...]

    def __post_init__(self):
        base = tuple(int(digit) for digit in self.base)
        if not base:
            raise DomainError("A cylinder has rank at least 1")
        if any(not 0 <= digit < self.q for digit in base):
            raise DomainError(f"Cylinder base {base} outside 0..{self.q - 1}")
        object.__setattr__(self, "base", base)

    @property
    def rank(self) -> int:
        return len(self.base)

    def lower_form(self) -> DigitString:
        return DigitString(self.q, self.base, Tail.zeros())

    def upper_form(self) -> DigitString:
        return DigitString(self.q, self.base, Tail.max_digits())

    def length(self, sched: ProbabilitySchedule) -> float:
        return math.prod(sched.at(k).p[digit] for k, digit in enumerate(self.base, start=1))


def _require_same_radix(d: DigitString, sched: ProbabilitySchedule) -> None:
    if d.q != sched.q:
        raise DomainError(f"Digit string radix {d.q} does not match schedule radix {sched.q}")


def decode(
    d: DigitString, sched: ProbabilitySchedule, tol: float = Tolerance.default
) -> EvalResult:
    """Value of a digit string under a schedule.

    :param DigitString d: the digits
    :param ProbabilitySchedule sched: the probability vectors per position
    :param float tol: truncation tolerance, used only for non-periodic tails
    :return: value in [0, 1] with its truncation bound
    :rtype: EvalResult
    """
    if not tol > 0.0:
        raise DomainError(f"tol must be positive, got {tol}")
    _require_same_radix(d, sched)
    settle = combine_settle(d.settles_at(), sched.settles_at())
    value, bound = sum_series(d.digit_at, sched.weights_at, tol, settle, tail_bound=1.0)
    return EvalResult(min(max(value, 0.0), 1.0), bound)


def encode(
    x: float, sched: ProbabilitySchedule, depth: int = SeriesDefaultValues.encode_depth
) -> DigitString:
    """Canonical (zeros-tail) digit string of ``x``; ``x = 1`` gives all ``q-1``.

    :param float x: number in [0, 1]
    :param ProbabilitySchedule sched: the probability vectors per position
    :param int depth: number of digits to extract
    :raises DomainError: if ``x`` is outside [0, 1]
    :rtype: DigitString
    """
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x = {x} is outside [0, 1]")
    if depth < 1:
        raise DomainError(f"depth must be positive, got {depth}")
    q = sched.q
    if x == 1.0:
        return DigitString(q, (q - 1,) * depth, Tail.max_digits())

    digits = []
    residual = float(x)
    for k in range(1, depth + 1):
        vector = sched.at(k)
        digit = bisect.bisect_right(vector.beta, residual) - 1
        # a residual within rounding of the next boundary belongs to the next digit
        if digit + 1 < q and vector.beta[digit + 1] - residual <= _SNAP:
            digit += 1
        residual = (residual - vector.beta[digit]) / vector.p[digit]
        residual = min(max(residual, 0.0), 1.0)
        if residual <= _SNAP:
            residual = 0.0
        digits.append(digit)
    return DigitString(q, tuple(digits), Tail.zeros())


def classify_rationality(d: DigitString) -> RationalityVerdict:
    """Rational points end in all zeros or all ``q-1``; both twin forms are returned.

    The endpoints 0 and 1 have a single form.
    """
    digit = d.tail_digit()
    if digit not in (0, d.q - 1):
        return RationalityVerdict(Rationality.irrational)

    prefix = list(d.prefix)
    while prefix and prefix[-1] == digit:
        prefix.pop()

    if digit == 0:
        zeros_form = DigitString(d.q, tuple(prefix), Tail.zeros())
        if not prefix:
            return RationalityVerdict(Rationality.rational, zeros_form=zeros_form)
        lowered = tuple(prefix[:-1]) + (prefix[-1] - 1,)
        max_form = DigitString(d.q, lowered, Tail.max_digits())
    else:
        max_form = DigitString(d.q, tuple(prefix), Tail.max_digits())
        if not prefix:
            return RationalityVerdict(Rationality.rational, max_form=max_form)
        raised = tuple(prefix[:-1]) + (prefix[-1] + 1,)
        zeros_form = DigitString(d.q, raised, Tail.zeros())
    return RationalityVerdict(Rationality.rational, zeros_form, max_form)


def cylinder_bounds(c: Cylinder, sched: ProbabilitySchedule) -> Tuple[float, float]:
    """Closed interval ``[inf, sup]`` covered by a cylinder."""
    lower = decode(c.lower_form(), sched).value
    upper = decode(c.upper_form(), sched).value
    return lower, upper


def cylinders(q: int, rank: int) -> Iterator[Cylinder]:
    """All cylinders of a rank, in lexicographic order of their bases."""
    for base in product(range(q), repeat=rank):
        yield Cylinder(q, base)


def parse_digit_literal(text: str, q: int) -> DigitString:
    """Parse ``digits:<list>;tail:(zeros|max|periodic:<list>|seeded:<int>)``.

    :raises PointParseError: on malformed text or out-of-range digits
    """
    match = _LITERAL.match(text.strip())
    if not match:
        raise PointParseError(f"Malformed digit literal: {text!r}", text)

    def _digits(chunk: str) -> Tuple[int, ...]:
        return tuple(int(part) for part in chunk.split(",") if part.strip())

    tail_text = match.group("tail")
    if tail_text == TailKind.zeros:
        tail = Tail.zeros()
    elif tail_text == TailKind.max_digits:
        tail = Tail.max_digits()
    elif match.group("pattern") is not None:
        tail = Tail.periodic(_digits(match.group("pattern")))
    else:
        tail = Tail.seeded(int(match.group("seed")))
    try:
        return DigitString(q, _digits(match.group("digits")), tail)
    except DomainError as e:
        raise PointParseError(f"Invalid digit literal: {text!r} ({e})", text) from None
