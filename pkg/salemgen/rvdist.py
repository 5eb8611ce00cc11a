"""Random variables whose distribution function is ``G``.

When ``R`` is a probability vector, ``G`` is the distribution function of
``eta`` whose P-digits are independent, each digit taking value ``j`` with
probability ``r_j``. This module samples ``eta`` and compares an empirical
sample against ``G`` with a Kolmogorov-Smirnov statistic.
"""

import logging

from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np

from scipy.stats import kstwo

from salemgen._constants import SampleDefaultValues, Tolerance
from salemgen._utils._parallel import ordered_map
from salemgen.exceptions import DistributionError, DomainError
from salemgen.gensalem import GenSalemSpec, eval_G_series
from salemgen.numrep import encode

logger = logging.getLogger(__name__)

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SampleReport:
    n: int
    seed: Optional[int]
    ks_statistic: float
    passed: bool
    threshold: float
    p_value: float

    def to_json(self) -> dict:
        return asdict(self)


def _require_distributional(spec: GenSalemSpec) -> None:
    if not spec.R.distributional:
        raise DistributionError(
            f"R={spec.R.r} is not a probability vector; G is not a distribution function"
        )


def _sample_chunk(
    spec: GenSalemSpec, seed: int, chunk_index: int, size: int, depth: int
) -> np.ndarray:
    """Digit matrix of one chunk; row ``i`` holds ``i_1..i_depth`` of one draw."""
    rng = np.random.default_rng([seed & _MASK64, chunk_index])
    perm = spec.perm
    draws_per_row = perm.k0_for_m(depth)
    draws = rng.choice(spec.q, size=(size, draws_per_row), p=spec.R.r)
    digits = np.zeros((size, depth), dtype=np.int64)
    for k in range(1, draws_per_row + 1):
        n = perm.n_at(k)
        if n <= depth:
            digits[:, n - 1] = draws[:, k - 1]
    return digits


def _decode_rows(spec: GenSalemSpec, digits: np.ndarray) -> np.ndarray:
    beta = np.asarray(spec.P.beta, dtype=np.float64)
    p = np.asarray(spec.P.p, dtype=np.float64)
    value = np.zeros(digits.shape[0])
    product = np.ones(digits.shape[0])
    for column in digits.T:
        value += product * beta[column]
        product *= p[column]
    return value


def sample_digits(
    spec: GenSalemSpec,
    n: int,
    seed: int = 0,
    depth: int = SampleDefaultValues.depth,
    threads: Optional[int] = None,
) -> np.ndarray:
    """``n`` rows of ``depth`` random digits; position ``n_k`` receives the ``k``-th draw.

    Each chunk of rows has its own generator keyed by ``(seed, chunk)``, so the
    result does not depend on the thread count.

    :raises DistributionError: if ``R`` is not a probability vector
    """
    _require_distributional(spec)
    if n < 1:
        raise DomainError(f"Sample count must be positive, got {n}")
    chunk_size = SampleDefaultValues.chunk_size
    chunks = [
        (index, min(chunk_size, n - start))
        for index, start in enumerate(range(0, n, chunk_size))
    ]
    parts = ordered_map(
        lambda chunk: _sample_chunk(spec, seed, chunk[0], chunk[1], depth), chunks, threads
    )
    return np.concatenate(parts)


def sample_eta(
    spec: GenSalemSpec,
    n: int,
    seed: int = 0,
    threads: Optional[int] = None,
) -> np.ndarray:
    """Draw ``n`` realizations of ``eta``, truncated at 64 digits.

    :param GenSalemSpec spec: the function; ``R`` must be a probability vector
    :param int n: sample count
    :param int seed: seed of the chunk generators
    :param int threads: (optional) thread cap
    :raises DistributionError: if ``R`` is not a probability vector
    :return: the samples in draw order
    :rtype: numpy.ndarray
    """
    digits = sample_digits(spec, n, seed, SampleDefaultValues.depth, threads)
    return _decode_rows(spec, digits)


def model_cdf(spec: GenSalemSpec, s: float, tol: float = Tolerance.default) -> float:
    if s < 0.0:
        return 0.0
    if s >= 1.0:
        return 1.0
    return eval_G_series(encode(s, spec.schedule), spec, tol).value


def ks_compare(
    samples: Sequence[float],
    spec: GenSalemSpec,
    grid_size: int = SampleDefaultValues.grid_size,
    threshold: float = SampleDefaultValues.threshold,
    seed: Optional[int] = None,
    threads: Optional[int] = None,
) -> SampleReport:
    """Largest gap between the empirical CDF of ``samples`` and ``G`` on a grid.

    :param samples: observed values
    :param GenSalemSpec spec: the model
    :param int grid_size: number of equispaced grid points on [0, 1]
    :param float threshold: the report passes iff the statistic is at most this
    :param int seed: (optional) seed recorded in the report
    :rtype: SampleReport
    """
    observed = np.sort(np.asarray(samples, dtype=np.float64))
    if observed.size == 0:
        raise DomainError("ks_compare needs at least one sample")
    if grid_size < 2:
        raise DomainError(f"grid_size must be at least 2, got {grid_size}")

    grid = np.linspace(0.0, 1.0, grid_size)
    model = np.asarray(ordered_map(lambda s: model_cdf(spec, float(s)), grid, threads))
    empirical = np.searchsorted(observed, grid, side="right") / observed.size
    statistic = float(np.max(np.abs(empirical - model)))
    p_value = float(kstwo.sf(statistic, observed.size))
    logger.debug(f"KS statistic {statistic:.6g} over {grid_size} grid points")
    return SampleReport(
        n=int(observed.size),
        seed=seed,
        ks_statistic=statistic,
        passed=statistic <= threshold,
        threshold=threshold,
        p_value=p_value,
    )
