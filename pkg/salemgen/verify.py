"""Invariant suite run by ``salemgen verify``.

Each check draws its points from a generator seeded by the config seed and
returns a :class:`CheckResult`. Checks that do not apply to the configured
function pass with a ``skipped`` detail.
"""

import logging
import sys

from dataclasses import dataclass
from itertools import permutations, product
from typing import Callable, List, Tuple

import numpy as np

from tqdm import tqdm

from salemgen._constants import Continuity, Deviation, Tolerance, VerifyDefaultValues
from salemgen.config import RunConfig
from salemgen.exceptions import SalemgenError
from salemgen.gensalem import (
    classify_continuity,
    continuity_condition,
    eval_G_feq,
    eval_G_series,
    feq_residual,
    increment,
    increment_oracle,
    integral,
    integral_quadrature,
)
from salemgen.numrep import (
    DigitString,
    Tail,
    classify_rationality,
    cylinder_bounds,
    cylinders,
    decode,
    encode,
)
from salemgen.rvdist import ks_compare, sample_eta
from salemgen.shiftops import (
    apply_plan,
    compose_two,
    composition_deletes,
    erase_positions,
    plan_deletions,
    rho_by_scan,
    shift_digits,
    sigma_m_value,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def __repr__(self) -> str:
        return f"CheckResult(name={self.name}, passed={self.passed}, detail={self.detail})"


def _skipped(reason: str) -> Tuple[bool, str]:
    return True, f"skipped: {reason}"


def _random_string(rng: np.random.Generator, q: int) -> DigitString:
    return DigitString.random(q, int(rng.integers(0, 2**63)))


def _random_rational(rng: np.random.Generator, q: int, max_rank: int) -> DigitString:
    rank = int(rng.integers(1, max_rank + 1))
    digits = [int(digit) for digit in rng.integers(0, q, size=rank - 1)]
    digits.append(int(rng.integers(1, q)))
    return DigitString(q, tuple(digits), Tail.zeros())


def check_roundtrip(config: RunConfig, rng: np.random.Generator) -> Tuple[bool, str]:
    sched = config.probability_schedule
    worst = 0.0
    for x in rng.random(VerifyDefaultValues.points):
        d = encode(float(x), sched)
        worst = max(worst, abs(decode(d, sched, 1e-15).value - x))
    limit = sched.p_max**64 + 1e-15
    return worst <= limit, f"max |decode(encode(x)) - x| = {worst:.3e}"


def check_twins(config: RunConfig, rng: np.random.Generator) -> Tuple[bool, str]:
    sched = config.probability_schedule
    worst = 0.0
    for _ in range(VerifyDefaultValues.points):
        verdict = classify_rationality(_random_rational(rng, config.q, VerifyDefaultValues.rank))
        low = decode(verdict.zeros_form, sched).value
        high = decode(verdict.max_form, sched).value
        worst = max(worst, abs(low - high))
    return worst <= 1e-12, f"max twin gap {worst:.3e}"


def check_partition(config: RunConfig, rng: np.random.Generator) -> Tuple[bool, str]:
    sched = config.probability_schedule
    previous_upper = 0.0
    total = []
    gaps = 0.0
    for cylinder in cylinders(config.q, VerifyDefaultValues.rank):
        lower, upper = cylinder_bounds(cylinder, sched)
        gaps = max(gaps, abs(lower - previous_upper))
        previous_upper = upper
        total.append(cylinder.length(sched))
    gaps = max(gaps, abs(1.0 - previous_upper))
    covered = abs(sum(total) - 1.0)
    return covered <= 1e-9 and gaps <= 1e-9, f"length defect {covered:.3e}, gap {gaps:.3e}"


def check_deletion_plans(config: RunConfig, rng: np.random.Generator) -> Tuple[bool, str]:
    depth = VerifyDefaultValues.plan_prefix
    mismatches = 0
    plans = 0
    positions = range(1, VerifyDefaultValues.plan_positions + 1)
    for size in range(1, VerifyDefaultValues.plan_size + 1):
        for targets in permutations(positions, size):
            plan = plan_deletions(targets)
            plans += 1
            if plan.rho != rho_by_scan(targets):
                mismatches += 1
                continue
            for digits in product(range(2), repeat=depth):
                d = DigitString(2, digits)
                if apply_plan(d, plan).digits(depth) != erase_positions(d, targets).digits(depth):
                    mismatches += 1
    return mismatches == 0, f"{plans} plans, {mismatches} mismatches"


def check_composition_table(config: RunConfig, rng: np.random.Generator) -> Tuple[bool, str]:
    generic = DigitString(10, tuple(range(10)))
    mismatches = 0
    for n1, n2 in product(range(1, 7), repeat=2):
        direct = erase_positions(generic, composition_deletes(n1, n2))
        if compose_two(generic, n1, n2).digits(8) != direct.digits(8):
            mismatches += 1
    return mismatches == 0, f"{mismatches} mismatches"


def check_sigma_m(config: RunConfig, rng: np.random.Generator) -> Tuple[bool, str]:
    sched = config.probability_schedule
    worst = 0.0
    for _ in range(VerifyDefaultValues.points):
        d = _random_string(rng, config.q)
        m = int(rng.integers(1, 7))
        s = decode(d, sched, config.tol).value
        arithmetic = sigma_m_value(s, d, m, sched, config.tol).value
        digit_side = decode(shift_digits(d, m), sched.delete(m), config.tol).value
        worst = max(worst, abs(arithmetic - digit_side))
    return worst <= 1e-9, f"max |sigma_m(s) - decode(deleted)| = {worst:.3e}"


def check_slope(config: RunConfig, rng: np.random.Generator) -> Tuple[bool, str]:
    sched = config.probability_schedule
    worst = 0.0
    for m in range(1, 4):
        for _ in range(VerifyDefaultValues.points // 10):
            head = tuple(int(digit) for digit in rng.integers(0, config.q, size=m + 2))
            first = DigitString(config.q, head + (0,), Tail.zeros())
            second = DigitString(config.q, head + (config.q - 1,), Tail.zeros())
            s1 = decode(first, sched).value
            s2 = decode(second, sched).value
            slope = (
                sigma_m_value(s2, second, m, sched).value - sigma_m_value(s1, first, m, sched).value
            ) / (s2 - s1)
            expected = 1.0 / sched.at(m).p[head[m - 1]]
            worst = max(worst, abs(slope / expected - 1.0))
    return worst <= 1e-6, f"max relative slope error {worst:.3e}"


def check_evaluators(config: RunConfig, rng: np.random.Generator) -> Tuple[bool, str]:
    spec = config.spec
    failures = 0
    for _ in range(VerifyDefaultValues.points):
        d = _random_string(rng, config.q)
        series = eval_G_series(d, spec, config.tol)
        unrolled = eval_G_feq(d, spec, config.tol)
        if abs(series.value - unrolled.value) > series.bound + unrolled.bound + 1e-12:
            failures += 1
    return failures == 0, f"{failures} disagreements"


def check_feq_residual(config: RunConfig, rng: np.random.Generator) -> Tuple[bool, str]:
    spec = config.spec
    worst = 0.0
    for _ in range(VerifyDefaultValues.points // 10):
        d = _random_string(rng, config.q)
        for k in range(1, VerifyDefaultValues.feq_steps + 1):
            worst = max(worst, feq_residual(d, spec, k, config.tol))
    return worst <= 1e-9, f"max residual {worst:.3e}"


def check_increment(config: RunConfig, rng: np.random.Generator) -> Tuple[bool, str]:
    spec = config.spec
    worst = 0.0
    for _ in range(VerifyDefaultValues.points // 2):
        size = int(rng.integers(1, 7))
        targets = tuple(int(digit) for digit in rng.integers(0, config.q, size=size))
        worst = max(worst, abs(increment(spec, targets) - increment_oracle(spec, targets).value))
    return worst <= 1e-9, f"max increment error {worst:.3e}"


def check_continuity(config: RunConfig, rng: np.random.Generator) -> Tuple[bool, str]:
    spec = config.spec
    if not spec.R.distributional:
        return _skipped("R is not a probability vector")
    disagreements = 0
    for _ in range(VerifyDefaultValues.points // 4):
        d = _random_rational(rng, config.q, VerifyDefaultValues.rank)
        verdict = classify_continuity(d, spec, config.tol)
        predicted = continuity_condition(spec.perm, classify_rationality(d).rank)
        if predicted != (verdict.kind == Continuity.continuous):
            disagreements += 1
    return disagreements == 0, f"{disagreements} points where the index condition and twins differ"


def check_identity_reduction(config: RunConfig, rng: np.random.Generator) -> Tuple[bool, str]:
    spec = config.spec
    same = all(abs(p - r) <= Tolerance.weight_sum for p, r in zip(spec.P.p, spec.R.r))
    if not same or spec.perm.deviation_class() != Deviation.identity_everywhere:
        return _skipped("G is not the identity map")
    worst = 0.0
    for _ in range(VerifyDefaultValues.points):
        d = _random_string(rng, config.q)
        s = decode(d, spec.schedule, config.tol).value
        worst = max(worst, abs(eval_G_series(d, spec, config.tol).value - s))
    return worst <= 1e-9, f"max |G(s) - s| = {worst:.3e}"


def check_integral(config: RunConfig, rng: np.random.Generator) -> Tuple[bool, str]:
    closed = integral(config.spec)
    numeric = integral_quadrature(config.spec, threads=config.threads)
    delta = abs(closed - numeric)
    return (
        delta <= VerifyDefaultValues.quadrature_tol,
        f"closed {closed:.12g}, quadrature {numeric:.12g}",
    )


def check_sampling(config: RunConfig, rng: np.random.Generator) -> Tuple[bool, str]:
    spec = config.spec
    if not spec.R.distributional:
        return _skipped("R is not a probability vector")
    if spec.perm.deviation_class() != Deviation.identity_everywhere:
        return _skipped("distribution identity is checked for the identity order only")
    samples = sample_eta(spec, VerifyDefaultValues.samples, config.seed, config.threads)
    report = ks_compare(
        samples, spec, threshold=VerifyDefaultValues.ks_threshold, seed=config.seed
    )
    return report.passed, f"ks {report.ks_statistic:.6g}, p-value {report.p_value:.3g}"


CHECKS: List[Tuple[str, Callable[[RunConfig, np.random.Generator], Tuple[bool, str]]]] = [
    ("roundtrip", check_roundtrip),
    ("twins", check_twins),
    ("partition", check_partition),
    ("deletion_plans", check_deletion_plans),
    ("composition_table", check_composition_table),
    ("sigma_m", check_sigma_m),
    ("slope", check_slope),
    ("evaluators", check_evaluators),
    ("feq_residual", check_feq_residual),
    ("increment", check_increment),
    ("continuity", check_continuity),
    ("identity_reduction", check_identity_reduction),
    ("integral", check_integral),
    ("sampling", check_sampling),
]


def run_checks(config: RunConfig, progress: bool = False) -> List[CheckResult]:
    """Run every check against ``config``.

    :param RunConfig config: the configured function
    :param bool progress: (optional) show a progress bar on stderr
    :return: one result per check, in suite order
    """
    results = []
    for name, check in tqdm(CHECKS, desc="verify", file=sys.stderr, disable=not progress):
        rng = np.random.default_rng([config.seed & ((1 << 64) - 1), len(results)])
        try:
            passed, detail = check(config, rng)
        except SalemgenError as e:
            passed, detail = False, f"error: {e}"
        if not passed:
            logger.warning(f"Check {name} failed: {detail}")
        results.append(CheckResult(name, passed, detail))
    return results


def all_passed(results: List[CheckResult]) -> bool:
    return bool(results) and all(result.passed for result in results)
