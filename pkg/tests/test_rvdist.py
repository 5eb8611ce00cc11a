import numpy as np
import pytest

from salemgen.exceptions import DistributionError, DomainError
from salemgen.gensalem import GenSalemSpec
from salemgen.numrep import CoefficientVector, ProbabilityVector
from salemgen.permspec import FinitePermutation
from salemgen.rvdist import ks_compare, model_cdf, sample_digits, sample_eta

HALF = ProbabilityVector((0.5, 0.5))
BINARY = GenSalemSpec(HALF, CoefficientVector((0.3, 0.7)))
UNIFORM = GenSalemSpec(HALF, CoefficientVector((0.5, 0.5)))


def test_sampling_is_deterministic():
    first = sample_eta(BINARY, 1000, seed=99)
    assert np.array_equal(sample_eta(BINARY, 1000, seed=99), first)
    assert not np.array_equal(sample_eta(BINARY, 1000, seed=100), first)


def test_sampling_does_not_depend_on_threads():
    n = 40000
    assert np.array_equal(sample_eta(BINARY, n, seed=5, threads=1), sample_eta(BINARY, n, seed=5, threads=3))


def test_uniform_sample_mean():
    samples = sample_eta(UNIFORM, 50000, seed=1)
    assert samples.shape == (50000,)
    assert np.all((samples >= 0.0) & (samples <= 1.0))
    assert abs(float(np.mean(samples)) - 0.5) < 0.01


def test_digit_frequencies_follow_R():
    digits = sample_digits(BINARY, 20000, seed=3, depth=8)
    assert digits.shape == (20000, 8)
    assert abs(float(np.mean(digits)) - 0.7) < 0.01


def test_permuted_order_routes_draws():
    swapped = BINARY.with_perm(FinitePermutation((2, 1)))
    plain = sample_digits(BINARY, 100, seed=4, depth=4)
    routed = sample_digits(swapped, 100, seed=4, depth=4)
    assert np.array_equal(routed[:, 1], plain[:, 0])
    assert np.array_equal(routed[:, 0], plain[:, 1])
    assert np.array_equal(routed[:, 2:], plain[:, 2:])


def test_sampling_requires_a_distribution():
    with pytest.raises(DistributionError):
        sample_eta(GenSalemSpec(HALF, CoefficientVector((-0.3, 0.7))), 10)
    with pytest.raises(DomainError):
        sample_eta(BINARY, 0)


def test_model_cdf_clamps():
    assert model_cdf(BINARY, -0.5) == 0.0
    assert model_cdf(BINARY, 1.0) == 1.0
    assert model_cdf(BINARY, 0.5) == pytest.approx(0.3)


def test_ks_passes_on_matching_model():
    samples = sample_eta(BINARY, 100000, seed=20240601)
    report = ks_compare(samples, BINARY, seed=20240601)
    assert report.passed
    assert report.ks_statistic <= 0.01
    assert report.n == 100000
    assert report.to_json()["seed"] == 20240601


def test_ks_fails_on_wrong_model():
    samples = sample_eta(UNIFORM, 10000, seed=2)
    report = ks_compare(samples, BINARY, threshold=0.05)
    assert not report.passed
    assert report.p_value < 1e-6


def test_ks_of_degenerate_sample():
    report = ks_compare(np.zeros(100), UNIFORM)
    assert report.ks_statistic == pytest.approx(1.0, abs=1e-9)
    assert not report.passed


def test_ks_rejects_bad_arguments():
    with pytest.raises(DomainError):
        ks_compare([], BINARY)
    with pytest.raises(DomainError):
        ks_compare([0.5], BINARY, grid_size=1)


@pytest.mark.parametrize(
    "spec",
    [
        BINARY,
        GenSalemSpec(ProbabilityVector((1 / 3, 1 / 3, 1 / 3)), CoefficientVector((0.2, 0.3, 0.5))),
    ],
)
def test_model_cdf_is_a_distribution_function(spec):
    values = np.array([model_cdf(spec, float(s)) for s in np.linspace(-0.1, 1.1, 241)])
    assert np.all((values >= 0.0) & (values <= 1.0))
    assert np.all(np.diff(values) >= -1e-12)


@pytest.mark.parametrize(
    "spec, first",
    [
        (BINARY.with_perm(FinitePermutation((2, 1))), 1),
        (
            GenSalemSpec(
                ProbabilityVector((1 / 3, 1 / 3, 1 / 3)), CoefficientVector((0.2, 0.3, 0.5))
            ).with_perm(FinitePermutation((3, 1, 2))),
            2,
        ),
    ],
)
def test_first_drawn_position_follows_R(spec, first):
    n = 20000
    column = sample_digits(spec, n, seed=11, depth=4)[:, first]
    for j, r in enumerate(spec.R.r):
        sigma = np.sqrt(r * (1.0 - r) / n)
        assert abs(float(np.mean(column == j)) - r) <= 3.0 * sigma
