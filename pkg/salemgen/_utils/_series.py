"""Digit-series evaluation shared by every expansion in the package.

All expansions here have the shape

    value = o_{d_1,1} + sum_{k>=2} o_{d_k,k} * prod_{j<k} w_{d_j,j}

with offsets ``o`` and ratios ``w`` that may depend on the position.
"""

import logging
import math

from typing import Callable, Optional, Sequence, Tuple

from salemgen._constants import SeriesDefaultValues

logger = logging.getLogger(__name__)

DigitAt = Callable[[int], int]
WeightsAt = Callable[[int], Tuple[Sequence[float], Sequence[float]]]
Settle = Optional[Tuple[int, int]]


def lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def combine_settle(first: Settle, second: Settle) -> Settle:
    """Merge two ``(start, period)`` pairs into one valid for both streams."""
    if first is None or second is None:
        return None
    start = max(first[0], second[0])
    period = lcm(first[1], second[1])
    if period > SeriesDefaultValues.max_closed_period:
        logger.debug(f"Combined period {period} too long to close exactly")
        return None
    return start, period


def sum_series(
    digit_at: DigitAt,
    weights_at: WeightsAt,
    tol: float,
    settle: Settle = None,
    tail_bound: float = 1.0,
    max_terms: int = SeriesDefaultValues.max_terms,
) -> Tuple[float, float]:
    """Sum a digit series, returning ``(value, bound)``.

    :param digit_at: digit at a 1-based position
    :param weights_at: ``(offsets, ratios)`` for a 1-based position
    :param float tol: truncation tolerance
    :param settle: ``(start, period)`` after which digits and weights repeat;
        the periodic part is then summed in closed form and the bound is 0
    :param float tail_bound: bound on the absolute value of any tail of the series
    :param int max_terms: hard cap on the number of terms
    :return: value and rigorous truncation bound
    """
    terms = []
    product = 1.0
    head = settle[0] - 1 if settle is not None else max_terms
    k = 1
    while k <= head:
        if product == 0.0:
            return math.fsum(terms), 0.0
        if settle is None and abs(product) * tail_bound <= tol:
            logger.debug(f"Series truncated after {k - 1} terms")
            return math.fsum(terms), abs(product) * tail_bound
        offsets, ratios = weights_at(k)
        digit = digit_at(k)
        terms.append(offsets[digit] * product)
        product *= ratios[digit]
        k += 1

    if settle is None:
        bound = abs(product) * tail_bound
        logger.warning(
            f"Series hit the {max_terms}-term cap with bound {bound:.3e} > tol {tol:.3e}"
        )
        return math.fsum(terms), bound

    start, period = settle
    block = []
    block_product = 1.0
    for k in range(start, start + period):
        offsets, ratios = weights_at(k)
        digit = digit_at(k)
        block.append(offsets[digit] * block_product)
        block_product *= ratios[digit]
    tail = math.fsum(block) / (1.0 - block_product)
    terms.append(product * tail)
    return math.fsum(terms), 0.0
