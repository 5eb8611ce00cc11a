"""Salem functions and their generalization ``G``.

``G`` is driven by the triple ``(P, R, (n_k))``::

    G(s) = gamma_{i_{n_1}} + sum_{k>=2} gamma_{i_{n_k}} prod_{t<k} r_{i_{n_t}}

where ``i_1 i_2 ...`` is the P-representation of ``s``. It has two
evaluators (the series above and the unrolled system of functional
equations), closed-form increments and integral, and symbolic
classifiers for continuity and monotonicity.
"""

import functools
import logging
import math
import sys

from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from tqdm import tqdm

from salemgen._constants import (
    Continuity,
    Deviation,
    DiscontinuitySet,
    EvalMethod,
    Monotonicity,
    QuadratureDefaultValues,
    SeriesDefaultValues,
    Tolerance,
)
from salemgen._utils._parallel import ordered_map
from salemgen._utils._series import sum_series
from salemgen.exceptions import (
    DomainError,
    UnclassifiedError,
    UnsupportedPermutationError,
)
from salemgen.numrep import (
    CoefficientVector,
    DigitString,
    EvalResult,
    ProbabilitySchedule,
    ProbabilityVector,
    Tail,
    classify_rationality,
    decode,
    encode,
)
from salemgen.permspec import Identity, IndexSequence, permuted_settle
from salemgen.shiftops import apply_plan, plan_deletions, shift_digits

logger = logging.getLogger(__name__)

Point = Union[float, DigitString]


@dataclass(frozen=True)
class GenSalemSpec:
    """The triple ``(P, R, (n_k))`` defining one function ``G``."""

    P: ProbabilityVector
    R: CoefficientVector
    perm: IndexSequence = field(default_factory=Identity)

    def __post_init__(self):
        if self.P.q != self.R.q:
            raise DomainError(f"P has radix {self.P.q} but R has radix {self.R.q}")

    @property
    def q(self) -> int:
        return self.P.q

    @property
    def schedule(self) -> ProbabilitySchedule:
        return ProbabilitySchedule.constant(self.P)

    def with_perm(self, perm: IndexSequence) -> "GenSalemSpec":
        return GenSalemSpec(self.P, self.R, perm)

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "P": list(self.P.p),
            "R": list(self.R.r),
            "perm": self.perm.to_json(),
        }


@dataclass(frozen=True)
class ContinuityVerdict:
    kind: str
    left: Optional[float] = None
    right: Optional[float] = None

    @property
    def jump(self) -> float:
        if self.left is None or self.right is None:
            return 0.0
        return self.right - self.left


@dataclass(frozen=True)
class MonotonicityVerdict:
    """Monotonicity class; ``non_decreasing`` is set when ``G`` never decreases."""

    kind: str
    non_decreasing: bool = False


def _check_tol(tol: float) -> None:
    if not tol > 0.0:
        raise DomainError(f"tol must be positive, got {tol}")


def salem_S(d: DigitString, P: ProbabilityVector, tol: float = Tolerance.default) -> EvalResult:
    """The classical Salem function: ``d`` read under the constant schedule ``P``."""
    return decode(d, ProbabilitySchedule.constant(P), tol)


def salem_S_eta(
    d: DigitString, sched: ProbabilitySchedule, tol: float = Tolerance.default
) -> EvalResult:
    """The Salem-type map with a probability vector per position."""
    return decode(d, sched, tol)


def eval_G_series(
    d: DigitString, spec: GenSalemSpec, tol: float = Tolerance.default
) -> EvalResult:
    """Evaluate ``G`` by its defining series.

    Eventually periodic streams are closed exactly; otherwise the series is
    truncated once ``|prod r| * sup|tail| <= tol``.

    :param DigitString d: P-representation of the argument
    :param GenSalemSpec spec: the function
    :param float tol: truncation tolerance
    :rtype: EvalResult
    """
    _check_tol(tol)
    if d.q != spec.q:
        raise DomainError(f"Digit string radix {d.q} does not match spec radix {spec.q}")
    perm = spec.perm
    gamma, r = spec.R.gamma, spec.R.r
    value, bound = sum_series(
        lambda k: d.digit_at(perm.n_at(k)),
        lambda k: (gamma, r),
        tol,
        settle=permuted_settle(d.settles_at(), perm),
        tail_bound=spec.R.sup_abs,
    )
    return EvalResult(value, bound)


def _unroll(d: DigitString, spec: GenSalemSpec, depth: int) -> Tuple[float, float, bool]:
    """Sum of the first ``depth`` unrolled equations, the carried product, and exactness."""
    R = spec.R
    plan = plan_deletions(spec.perm.prefix(depth))
    terms = []
    product = 1.0
    current = d
    for m in plan.adjusted:
        constant = current.constant_digit()
        if constant is not None:
            terms.append(product * R.constant_tail(constant))
            return math.fsum(terms), product, True
        digit = current.digit_at(m)
        terms.append(product * R.gamma[digit])
        product *= R.r[digit]
        if product == 0.0:
            return math.fsum(terms), product, True
        current = shift_digits(current, m)

    constant = current.constant_digit()
    if constant is not None:
        terms.append(product * R.constant_tail(constant))
        return math.fsum(terms), product, True
    return math.fsum(terms), product, False


def eval_G_feq(
    d: DigitString,
    spec: GenSalemSpec,
    tol: float = Tolerance.default,
    depth: Optional[int] = None,
) -> EvalResult:
    """Evaluate ``G`` by unrolling its system of functional equations.

    Step ``k`` reads ``gamma`` and ``r`` at the digit sitting at the adjusted
    index ``n̄_k`` and then deletes it with ``sigma_{n̄_k}``. Once the remaining
    digits are constant the rest is summed exactly.

    :param float tol: stop once ``|prod r| * sup|tail| <= tol``
    :param int depth: (optional) unroll exactly this many equations instead
    :rtype: EvalResult
    """
    _check_tol(tol)
    if depth is not None and depth < 1:
        raise DomainError(f"depth must be positive, got {depth}")
    steps = depth or SeriesDefaultValues.feq_depth
    while True:
        value, product, exact = _unroll(d, spec, steps)
        if exact:
            return EvalResult(value, 0.0)
        bound = abs(product) * spec.R.sup_abs
        if depth is not None or bound <= tol:
            break
        if steps >= SeriesDefaultValues.max_terms:
            logger.warning(f"Stopped after {steps} equations with tail bound {bound:.3e} > {tol:.3e}")
            break
        steps = min(2 * steps, SeriesDefaultValues.max_terms)
    logger.debug(f"Unrolled {steps} equations, tail bound {bound:.3e}")
    return EvalResult(value, bound)


def feq_residual(
    d: DigitString, spec: GenSalemSpec, k: int, tol: float = Tolerance.default
) -> float:
    """``|LHS - RHS|`` of the ``k``-th functional equation at ``d``.

    Both sides are series evaluations on the digit strings left after
    ``k-1`` and ``k`` generalized shifts, each read in the order its
    remaining digits are consumed.
    """
    if k < 1:
        raise DomainError(f"Equation index starts at 1, got {k}")
    perm = spec.perm
    before = apply_plan(d, plan_deletions(perm.prefix(k - 1)))
    after = apply_plan(d, plan_deletions(perm.prefix(k)))
    digit = d.digit_at(perm.n_at(k))
    lhs = eval_G_series(before, spec.with_perm(perm.after(k - 1)), tol).value
    rhs_tail = eval_G_series(after, spec.with_perm(perm.after(k)), tol).value
    rhs = math.fsum((spec.R.gamma[digit], spec.R.r[digit] * rhs_tail))
    return abs(lhs - rhs)


def evaluate(
    point: Point,
    spec: GenSalemSpec,
    method: str = EvalMethod.series,
    tol: float = Tolerance.default,
) -> EvalResult:
    """Evaluate ``G`` at a digit string or a real (encoded at depth 64)."""
    d = point if isinstance(point, DigitString) else encode(point, spec.schedule)
    if method == EvalMethod.series:
        return eval_G_series(d, spec, tol)
    if method == EvalMethod.feq:
        return eval_G_feq(d, spec, tol)
    raise DomainError(
        f"Invalid method: {method}. Valid methods are: {[EvalMethod.series, EvalMethod.feq]}"
    )


def eval_G_many(
    points: Sequence[DigitString],
    spec: GenSalemSpec,
    tol: float = Tolerance.default,
    threads: Optional[int] = None,
) -> List[EvalResult]:
    """Series evaluation of many points; results keep the input order."""
    return ordered_map(lambda d: eval_G_series(d, spec, tol), points, threads)


def increment(spec: GenSalemSpec, targets: Sequence[int]) -> float:
    """Increment of ``G`` over the set with digits ``targets`` at positions ``n_1..n_t``.

    Equals ``prod r_{c_j}`` times ``G(1) - G(0)``, which is 1 for a
    distributional ``R``.
    """
    if not targets:
        raise DomainError("An increment needs at least one fixed digit")
    r = spec.R.r
    for digit in targets:
        if not 0 <= digit < spec.q:
            raise DomainError(f"Digit {digit} outside 0..{spec.q - 1}")
    product = math.prod(r[digit] for digit in targets)
    span = 1.0 if spec.R.distributional else spec.R.span
    return product * span


def _constrained_extremes(
    spec: GenSalemSpec, targets: Sequence[int]
) -> Tuple[DigitString, DigitString]:
    q = spec.q
    fixed = {spec.perm.n_at(j): digit for j, digit in enumerate(targets, start=1)}
    width = max(fixed)
    upper = tuple(fixed.get(k, q - 1) for k in range(1, width + 1))
    lower = tuple(fixed.get(k, 0) for k in range(1, width + 1))
    return DigitString(q, upper, Tail.max_digits()), DigitString(q, lower, Tail.zeros())


def increment_oracle(
    spec: GenSalemSpec, targets: Sequence[int], tol: float = Tolerance.default
) -> EvalResult:
    """``G(sup) - G(inf)`` of the constrained set, by two series evaluations."""
    if not targets:
        raise DomainError("An increment needs at least one fixed digit")
    upper, lower = _constrained_extremes(spec, targets)
    high = eval_G_series(upper, spec, tol)
    low = eval_G_series(lower, spec, tol)
    return EvalResult(high.value - low.value, high.bound + low.bound)


def integral(spec: GenSalemSpec) -> float:
    """Closed-form Lebesgue integral of ``G`` over [0, 1]; the order ``(n_k)`` drops out."""
    p, gamma, r = spec.P.p, spec.R.gamma, spec.R.r
    numerator = math.fsum(gamma[j] * p[j] for j in range(1, spec.q))
    denominator = 1.0 - math.fsum(p[j] * r[j] for j in range(spec.q))
    return numerator / denominator


def _stopping_time_partition(
    P: ProbabilityVector, max_length: float, max_cells: int
) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
    """Cylinders whose length first drops to ``max_length`` or below, one rank at a time.

    Yields ``(digits, lengths)`` per rank; row ``i`` of ``digits`` is the base
    ``i_1..i_rank`` of one cell. Only cells still being refined are kept.
    """
    q = P.q
    p = np.asarray(P.p, dtype=np.float64)
    alphabet = np.arange(q, dtype=np.min_scalar_type(q - 1))
    digits = alphabet[:, None]
    length = p.copy()
    count = 0
    while digits.shape[0]:
        done = length <= max_length
        count += int(done.sum())
        yield digits[done], length[done]
        digits, length = digits[~done], length[~done]
        if not digits.shape[0]:
            break
        if count + digits.shape[0] * q > max_cells:
            raise DomainError(
                f"Quadrature partition exceeds {max_cells} cells; raise max_cylinder_length"
            )
        digits = np.column_stack(
            [np.repeat(digits, q, axis=0), np.tile(alphabet, digits.shape[0])]
        )
        length = (length[:, None] * p).ravel()
    logger.debug(f"Partition of {count} cells")


def _cell_values(
    cells: np.ndarray, columns: Sequence[int], gamma: np.ndarray, r: np.ndarray
) -> np.ndarray:
    """``G`` at the zero-tail representative of each cell."""
    rank = cells.shape[1]
    value = np.zeros(cells.shape[0])
    product = np.ones(cells.shape[0])
    for n in columns:
        if n <= rank:
            digits = cells[:, n - 1]
            value += product * gamma[digits]
            product *= r[digits]
        else:
            # zero digit: gamma_0 = 0
            product *= r[0]
    return value


def _chunk_sum(
    window: Tuple[int, int],
    cells: np.ndarray,
    lengths: np.ndarray,
    columns: Sequence[int],
    gamma: np.ndarray,
    r: np.ndarray,
) -> float:
    start, stop = window
    return float(np.sum(lengths[start:stop] * _cell_values(cells[start:stop], columns, gamma, r)))


def integral_quadrature(
    spec: GenSalemSpec,
    max_cylinder_length: float = QuadratureDefaultValues.max_cylinder_length,
    threads: Optional[int] = None,
    progress: bool = False,
) -> float:
    """Cylinder-exact Riemann sum of ``G``.

    Each cell is weighted by its length and evaluated at its zero-tail
    representative. Chunks are summed in a fixed order, so the result does
    not depend on the thread count.
    """
    if not 0.0 < max_cylinder_length < 1.0:
        raise DomainError(f"max_cylinder_length must lie in (0, 1), got {max_cylinder_length}")
    gamma = np.asarray(spec.R.gamma, dtype=np.float64)
    r = np.asarray(spec.R.r, dtype=np.float64)
    chunk_size = QuadratureDefaultValues.chunk_size
    sums = []
    bar = tqdm(desc="quadrature", unit="rank", file=sys.stderr, disable=not progress)
    try:
        for cells, lengths in _stopping_time_partition(
            spec.P, max_cylinder_length, QuadratureDefaultValues.max_cells
        ):
            rank = cells.shape[1]
            columns = [spec.perm.n_at(k) for k in range(1, spec.perm.k0_for_m(rank) + 1)]
            windows = [
                (start, min(start + chunk_size, cells.shape[0]))
                for start in range(0, cells.shape[0], chunk_size)
            ]
            chunk_sum = functools.partial(
                _chunk_sum, cells=cells, lengths=lengths, columns=columns, gamma=gamma, r=r
            )
            sums.extend(ordered_map(chunk_sum, windows, threads))
            bar.update(1)
    finally:
        bar.close()
    return math.fsum(sums)


def continuity_condition(perm: IndexSequence, m: int) -> bool:
    """``n_{k_0} = m`` and ``n_1..n_{k_0-1}`` all in ``1..m-1``, with ``k_0 = k0_for_m(m)``."""
    k0 = perm.k0_for_m(m)
    if perm.n_at(k0) != m:
        return False
    return all(perm.n_at(k) <= m - 1 for k in range(1, k0))


def classify_continuity(
    point: Point, spec: GenSalemSpec, tol: float = Tolerance.default
) -> ContinuityVerdict:
    """Continuity of ``G`` at a point.

    Irrational points are points of continuity. At a rational point the
    one-sided limits are ``G`` of the two twin representations; they settle
    the verdict when the index condition disagrees with them.
    """
    d = point if isinstance(point, DigitString) else encode(point, spec.schedule)
    verdict = classify_rationality(d)
    if not verdict.is_rational or verdict.is_endpoint:
        return ContinuityVerdict(Continuity.continuous)

    left = eval_G_series(verdict.max_form, spec, tol)
    right = eval_G_series(verdict.zeros_form, spec, tol)
    limits_agree = abs(left.value - right.value) <= Tolerance.twin + left.bound + right.bound
    predicted = continuity_condition(spec.perm, verdict.rank)
    if predicted != limits_agree:
        logger.warning(
            f"Index condition says {'continuous' if predicted else 'jump'} at rank "
            f"{verdict.rank} but twin limits are {left.value!r} and {right.value!r}"
        )
    kind = Continuity.continuous if limits_agree else Continuity.jump
    return ContinuityVerdict(kind, left.value, right.value)


def classify_discontinuity_set(spec: GenSalemSpec) -> str:
    """Discontinuity set of ``G`` implied by the order ``(n_k)``.

    The classes hold for a distributional ``R``. Otherwise ``G`` may also
    jump at rational points where the order is the identity, and a warning
    is logged.
    """
    if not spec.R.distributional:
        logger.warning(
            f"R={spec.R.r} is not a probability vector; the discontinuity class "
            f"reflects the order only and G may also jump at rational points"
        )
    deviation = spec.perm.deviation_class()
    if deviation == Deviation.identity_everywhere:
        return DiscontinuitySet.empty
    if deviation == Deviation.finite:
        return DiscontinuitySet.finite
    return DiscontinuitySet.countable


def classify_monotonicity(spec: GenSalemSpec) -> MonotonicityVerdict:
    """Symbolic monotonicity class from the signs of ``r`` and the order's deviation.

    :raises UnclassifiedError: for sign patterns outside the case analysis
    """
    r = spec.R.r
    negative = sum(1 for weight in r if weight < 0.0)
    zero = sum(1 for weight in r if weight == 0.0)
    deviation = spec.perm.deviation_class()

    if negative == 0:
        if zero:
            return MonotonicityVerdict(
                Monotonicity.constant_ae,
                non_decreasing=deviation == Deviation.identity_everywhere,
            )
        if deviation == Deviation.identity_everywhere:
            return MonotonicityVerdict(Monotonicity.strictly_increasing, non_decreasing=True)
        if deviation == Deviation.finite:
            return MonotonicityVerdict(Monotonicity.some_interval)
        return MonotonicityVerdict(Monotonicity.no_intervals)

    if negative == 1 and zero == 0 and deviation != Deviation.infinite:
        return MonotonicityVerdict(Monotonicity.no_intervals)
    raise UnclassifiedError(
        f"No monotonicity class for R={r} with {deviation} order "
        f"({negative} negative, {zero} zero coefficients)"
    )


def derivative_diagnostic(
    d: DigitString, spec: GenSalemSpec, max_rank: int
) -> Tuple[float, ...]:
    """Increment-to-length ratios ``prod_{j<=m} r_{i_j}/p_{i_j}`` for ``m = 1..max_rank``.

    :raises UnsupportedPermutationError: unless the order is the identity
    """
    if max_rank < 1:
        raise DomainError(f"max_rank must be positive, got {max_rank}")
    if spec.perm.deviation_class() != Deviation.identity_everywhere:
        raise UnsupportedPermutationError(
            "Cylinder ratios are only defined for the identity order"
        )
    ratios = []
    ratio = 1.0
    for digit in d.digits(max_rank):
        ratio *= spec.R.r[digit] / spec.P.p[digit]
        ratios.append(ratio)
    return tuple(ratios)
