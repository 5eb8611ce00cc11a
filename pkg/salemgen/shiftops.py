"""Shift operators on P-representations.

``shift`` drops leading digits, ``shift_digits`` drops the digit at one
position and splices the rest. Deletion plans turn a list of original
positions into the adjusted indices that delete exactly those digits when
the generalized shifts are applied one after another.
"""

import logging
import math

from dataclasses import dataclass
from typing import Sequence, Tuple

from salemgen._constants import TailKind, Tolerance
from salemgen._utils._fenwick import FenwickTree
from salemgen.exceptions import DomainError, DuplicateTargetError, InconsistencyError
from salemgen.numrep import (
    DigitString,
    EvalResult,
    ProbabilitySchedule,
    classify_rationality,
    decode,
)

logger = logging.getLogger(__name__)


def _check_position(m: int) -> None:
    if m < 1:
        raise DomainError(f"Positions start at 1, got {m}")


@dataclass(frozen=True)
class DeletionPlan:
    """Targets ``n_1..n_k`` in application order with their adjusted indices."""

    targets: Tuple[int, ...]
    adjusted: Tuple[int, ...]
    rho: Tuple[int, ...]

    @property
    def deleted_positions(self) -> Tuple[int, ...]:
        return tuple(sorted(self.targets))

    def apply(self, d: DigitString) -> DigitString:
        return apply_plan(d, self)

    def __len__(self) -> int:
        return len(self.targets)


def shift_digits(d: DigitString, m: int) -> DigitString:
    """The digit string with position ``m`` removed (``sigma_m`` on digits)."""
    _check_position(m)
    n = len(d.prefix)
    if m <= n:
        return DigitString(d.q, d.prefix[: m - 1] + d.prefix[m:], d.tail)
    if d.tail.kind in (TailKind.zeros, TailKind.max_digits):
        return d
    expanded = d.materialize(m)
    return DigitString(d.q, expanded.prefix[: m - 1], expanded.tail)


def shift(d: DigitString, n: int = 1) -> DigitString:
    """``sigma^n``: drop the first ``n`` digits."""
    if n < 0:
        raise DomainError(f"Shift count must be non-negative, got {n}")
    if n <= len(d.prefix):
        return DigitString(d.q, d.prefix[n:], d.tail)
    return DigitString(d.q, (), d.tail.advanced(n - len(d.prefix)))


def shift_schedule(sched: ProbabilitySchedule, n: int = 1) -> ProbabilitySchedule:
    """The schedule seen by ``shift(d, n)``: ``P_{n+1}, P_{n+2}, ...``."""
    for _ in range(n):
        sched = sched.delete(1)
    return sched


def erase_positions(d: DigitString, positions: Sequence[int]) -> DigitString:
    """Delete the given original positions all at once."""
    gone = set(positions)
    if not gone:
        return d
    for m in gone:
        _check_position(m)
    expanded = d.materialize(max(gone))
    kept = tuple(
        digit for k, digit in enumerate(expanded.prefix, start=1) if k not in gone
    )
    return DigitString(d.q, kept, expanded.tail)


def _prefix_value(digits: Sequence[int], sched: ProbabilitySchedule) -> Tuple[float, float]:
    """Value of a finite digit block followed by zeros, and the product of its weights."""
    terms = []
    product = 1.0
    for k, digit in enumerate(digits, start=1):
        vector = sched.at(k)
        terms.append(vector.beta[digit] * product)
        product *= vector.p[digit]
    return math.fsum(terms), product


def sigma_m_value(
    s: float,
    d: DigitString,
    m: int,
    sched: ProbabilitySchedule,
    tol: float = Tolerance.default,
) -> EvalResult:
    """Value of the generalized shift ``sigma_m`` at ``s``.

    Computed arithmetically as
    ``(s - (1 - p_{i_m}) v_{m-1} - beta_{i_m} prod_{k<m} p_{i_k}) / p_{i_m}``
    with ``v_{m-1}`` the value of the first ``m-1`` digits. The result
    equals ``decode(shift_digits(d, m), sched.delete(m))``.

    :param float s: the argument
    :param DigitString d: representation of ``s``
    :param int m: position of the deleted digit
    :param ProbabilitySchedule sched: the probability vectors per position
    :param float tol: tolerance for the consistency check of ``s`` against ``d``
    :raises InconsistencyError: if ``d`` does not represent ``s``
    :rtype: EvalResult
    """
    _check_position(m)
    represented = decode(d, sched, tol)
    gap = abs(represented.value - s)
    if gap > 10.0 * tol + represented.bound:
        raise InconsistencyError(
            f"Digit string decodes to {represented.value!r}, not {s!r}",
            value=s,
            expected=represented.value,
        )
    head, product = _prefix_value(d.digits(m - 1), sched)
    vector = sched.at(m)
    digit = d.digit_at(m)
    p = vector.p[digit]
    value = (s - (1.0 - p) * head - vector.beta[digit] * product) / p
    return EvalResult(value, (gap + represented.bound) / p)


def reconstruct(
    prefix_digits: Sequence[int], shifted_value: float, sched: ProbabilitySchedule
) -> float:
    """Recover ``s`` from its first ``m`` digits and ``sigma^m(s)``."""
    head, product = _prefix_value(tuple(prefix_digits), sched)
    return math.fsum((head, shifted_value * product))


def rho_by_scan(targets: Sequence[int]) -> Tuple[int, ...]:
    """Quadratic count of earlier targets below each target."""
    return tuple(
        sum(1 for earlier in targets[:i] if earlier < target)
        for i, target in enumerate(targets)
    )


def plan_deletions(targets: Sequence[int]) -> DeletionPlan:
    """Adjusted indices ``n_i - rho_i`` for deleting ``targets`` one at a time.

    :raises DuplicateTargetError: if a position is named twice
    :raises DomainError: if a position is below 1
    """
    targets = tuple(int(n) for n in targets)
    for n in targets:
        _check_position(n)
    seen = set()
    for n in targets:
        if n in seen:
            raise DuplicateTargetError(f"Position {n} is deleted twice", target=n)
        seen.add(n)

    tree = FenwickTree(max(targets, default=0))
    rho = []
    for n in targets:
        rho.append(tree.prefix_sum(n - 1))
        tree.add(n)
    adjusted = tuple(n - count for n, count in zip(targets, rho))
    logger.debug(f"Deletion plan {targets} -> {adjusted}")
    return DeletionPlan(targets, adjusted, tuple(rho))


def apply_plan(d: DigitString, plan: DeletionPlan) -> DigitString:
    for m in plan.adjusted:
        d = shift_digits(d, m)
    return d


def compose_two(d: DigitString, n1: int, n2: int) -> DigitString:
    """``sigma_{n2}(sigma_{n1}(d))``."""
    return shift_digits(shift_digits(d, n1), n2)


def composition_deletes(n1: int, n2: int) -> Tuple[int, int]:
    """Original positions removed by ``sigma_{n2} o sigma_{n1}``."""
    _check_position(n1)
    _check_position(n2)
    if n2 < n1:
        return n1, n2
    return n1, n2 + 1


def one_sided_limits(
    d: DigitString, m: int, sched: ProbabilitySchedule, tol: float = Tolerance.default
) -> Tuple[EvalResult, EvalResult]:
    """Left and right limits of ``sigma_m`` at a rational interior point.

    The left limit is read off the ``(q-1)``-tail twin, the right limit off
    the zero-tail twin.

    :raises DomainError: if ``d`` is irrational or an endpoint of [0, 1]
    """
    verdict = classify_rationality(d)
    if not verdict.is_rational or verdict.is_endpoint:
        raise DomainError("One-sided limits need a rational interior point")
    deleted = sched.delete(m)
    left = decode(shift_digits(verdict.max_form, m), deleted, tol)
    right = decode(shift_digits(verdict.zeros_form, m), deleted, tol)
    return left, right

