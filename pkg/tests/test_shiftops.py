from itertools import permutations, product

import pytest

from hypothesis import given, settings
from hypothesis import strategies as st

from salemgen.exceptions import DomainError, DuplicateTargetError, InconsistencyError
from salemgen.numrep import (
    DigitString,
    ProbabilitySchedule,
    ProbabilityVector,
    Tail,
    decode,
)
from salemgen.shiftops import (
    apply_plan,
    compose_two,
    composition_deletes,
    erase_positions,
    one_sided_limits,
    plan_deletions,
    reconstruct,
    rho_by_scan,
    shift,
    shift_digits,
    shift_schedule,
    sigma_m_value,
)

SKEWED = ProbabilitySchedule.constant(ProbabilityVector((0.3, 0.7)))
PERIODIC = ProbabilitySchedule.periodic(
    [ProbabilityVector((0.3, 0.7)), ProbabilityVector((0.6, 0.4)), ProbabilityVector((0.5, 0.5))]
)
LETTERS = DigitString(10, (0, 1, 2, 3, 4, 5, 6, 7, 8, 9))


def test_shift_digits_examples():
    assert shift_digits(DigitString(2, (1, 1)), 1).digits(4) == (1, 0, 0, 0)
    assert shift_digits(LETTERS, 2).digits(4) == (0, 2, 3, 4)
    d = DigitString(2, (1, 0, 1))
    assert shift_digits(d, 7) == d


def test_shift_digits_beyond_prefix_of_periodic_tail():
    d = DigitString(3, (2,), Tail.periodic((0, 1, 2)))
    shifted = shift_digits(d, 3)
    assert shifted.digits(8) == (2, 0, 2, 0, 1, 2, 0, 1)


def test_shift_digits_beyond_prefix_of_seeded_tail():
    d = DigitString.random(2, seed=5)
    expected = d.digits(9)[:3] + d.digits(10)[4:]
    assert shift_digits(d, 4).digits(9) == expected


def test_shift_drops_leading_digits():
    d = DigitString.random(2, seed=8, prefix=(1, 0))
    assert shift(d, 5).digits(20) == d.digits(25)[5:]
    once = d
    for _ in range(5):
        once = shift_digits(once, 1)
    assert once.digits(20) == shift(d, 5).digits(20)
    with pytest.raises(DomainError):
        shift(d, -1)


def test_shift_value_identity():
    d = DigitString(2, (1, 0, 1, 1, 0, 1))
    s = decode(d, PERIODIC).value
    for m in range(1, 5):
        tail_value = decode(shift(d, m), shift_schedule(PERIODIC, m)).value
        assert reconstruct(d.digits(m), tail_value, PERIODIC) == pytest.approx(s, abs=1e-14)


def test_sigma_m_value_examples():
    s = 0.51
    d = DigitString(2, (1, 1))
    assert sigma_m_value(s, d, 1, SKEWED).value == pytest.approx(0.3)
    assert sigma_m_value(s, d, 2, SKEWED).value == pytest.approx(0.3)
    assert sigma_m_value(0.0, DigitString(2), 3, SKEWED).value == 0.0


def test_sigma_m_value_rejects_mismatched_point():
    with pytest.raises(InconsistencyError):
        sigma_m_value(0.5, DigitString(2, (1, 1)), 1, SKEWED)


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**63), m=st.integers(min_value=1, max_value=8))
def test_sigma_m_value_matches_digit_deletion(seed, m):
    for sched in (SKEWED, PERIODIC):
        d = DigitString.random(2, seed)
        s = decode(d, sched).value
        arithmetic = sigma_m_value(s, d, m, sched).value
        digit_side = decode(shift_digits(d, m), sched.delete(m)).value
        assert arithmetic == pytest.approx(digit_side, abs=1e-9)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_sigma_m_slope_inside_cylinder(m):
    head = (1, 0, 1, 1, 0)
    first = DigitString(2, head + (0, 1))
    second = DigitString(2, head + (1, 0, 1))
    s1 = decode(first, SKEWED).value
    s2 = decode(second, SKEWED).value
    slope = (
        sigma_m_value(s2, second, m, SKEWED).value - sigma_m_value(s1, first, m, SKEWED).value
    ) / (s2 - s1)
    assert slope == pytest.approx(1.0 / SKEWED.at(m).p[head[m - 1]], rel=1e-6)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_sigma_m_jumps_at_cylinder_endpoint(m):
    point = DigitString(2, (1,) * m)
    left, right = one_sided_limits(point, m, SKEWED)
    assert abs(left.value - right.value) > 1e-6


def test_one_sided_limits_need_rational_interior_point():
    with pytest.raises(DomainError):
        one_sided_limits(DigitString.random(2, 4), 1, SKEWED)
    with pytest.raises(DomainError):
        one_sided_limits(DigitString(2), 1, SKEWED)


def test_reconstruct_examples():
    assert reconstruct((1,), 0.3, SKEWED) == pytest.approx(0.51)
    assert reconstruct((0, 0, 0), 0.5, SKEWED) == pytest.approx(0.5 * 0.3**3)
    assert reconstruct((1, 1), 0.0, SKEWED) == pytest.approx(0.51)


def test_plan_deletions_examples():
    assert plan_deletions((3, 1)).adjusted == (3, 1)
    plan = plan_deletions((2, 5, 3))
    assert plan.adjusted == (2, 4, 2)
    assert plan.rho == (0, 1, 1)
    assert plan_deletions((1,)).adjusted == (1,)
    assert len(plan) == 3
    assert plan.deleted_positions == (2, 3, 5)


def test_plan_deletions_remaining_digits():
    d = DigitString(10, (1, 2, 3, 4, 5, 6, 7, 8, 9))
    assert apply_plan(d, plan_deletions((2, 5, 3))).digits(5) == (1, 4, 6, 7, 8)
    assert plan_deletions((3, 1)).apply(d).digits(3) == (2, 4, 5)


def test_plan_deletions_rejects_duplicates():
    with pytest.raises(DuplicateTargetError) as e:
        plan_deletions((2, 4, 2))
    assert e.value.target == 2
    with pytest.raises(DomainError):
        plan_deletions((0, 1))


def test_plan_deletions_matches_erasure_exhaustively():
    for size in range(1, 5):
        for targets in permutations(range(1, 7), size):
            plan = plan_deletions(targets)
            assert plan.rho == rho_by_scan(targets)
            for digits in product(range(2), repeat=8):
                d = DigitString(2, digits)
                assert apply_plan(d, plan).digits(8) == erase_positions(d, targets).digits(8)


def test_compose_two_examples():
    assert compose_two(LETTERS, 2, 2).digits(3) == (0, 3, 4)
    assert compose_two(LETTERS, 3, 1).digits(2) == (1, 3)
    assert compose_two(LETTERS, 1, 3).digits(3) == (1, 2, 4)


def test_composition_table():
    for n1, n2 in product(range(1, 7), repeat=2):
        deleted = composition_deletes(n1, n2)
        assert compose_two(LETTERS, n1, n2).digits(8) == erase_positions(LETTERS, deleted).digits(8)
