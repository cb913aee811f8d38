import math

import numpy as np
import pytest

from mcmckit import (
    PosteriorGrid,
    beta_binomial_model,
    centered_grid,
    finite_jump_kernel,
    finite_mh_kernel,
    finite_target,
    log_posterior_unnorm,
    map_estimate,
    mle_estimate,
    normal_model,
    posterior_grid,
    posterior_mean,
    random_walk_kernel,
    risk,
    run_chain,
    stationary_distribution,
    target_from_model,
    unit_interval_grid,
    validate_chain,
)
from mcmckit.bayes import load_binomial, load_observations
from mcmckit.errors import (
    AllDegenerateError,
    EmptyGridError,
    EmptyTraceError,
    NonNormalizedPosteriorError,
    OutOfDomainError,
    ParseError,
    UnknownLossError,
)

SEVEN_OF_TEN = (7, 10)
MILLI_GRID = unit_interval_grid(0.001)


def first_coord(theta):
    return float(np.atleast_1d(theta)[0])


def beta_moments(a, b):
    mean = a / (a + b)
    var = a * b / ((a + b) ** 2 * (a + b + 1))
    mode = (a - 1) / (a + b - 2)
    return mean, math.sqrt(var), mode


class TestLogPosterior:
    def test_flat_prior_equals_likelihood(self):
        model = beta_binomial_model()  # Beta(1, 1) prior has zero log-density
        value = log_posterior_unnorm(model, 0.37, SEVEN_OF_TEN)
        assert value == pytest.approx(model.log_likelihood(0.37, SEVEN_OF_TEN))

    def test_empty_dataset_reduces_to_prior(self):
        model = beta_binomial_model(alpha=2.0, beta=3.0)
        value = log_posterior_unnorm(model, 0.4, (0, 0))
        assert value == pytest.approx(model.log_prior(0.4))

    def test_binomial_value_at_half(self):
        # log C(10, 7) + 7 log(1/2) + 3 log(1/2) = log 120 - 10 log 2
        model = beta_binomial_model()
        value = log_posterior_unnorm(model, 0.5, SEVEN_OF_TEN)
        assert value == pytest.approx(math.log(120) - 10 * math.log(2))

    def test_out_of_domain(self):
        model = beta_binomial_model()
        with pytest.raises(OutOfDomainError):
            log_posterior_unnorm(model, 1.5, SEVEN_OF_TEN)


class TestMle:
    def test_binomial_mle_is_seven_tenths(self):
        # analytic MLE k/n = 0.7
        assert mle_estimate(beta_binomial_model(), SEVEN_OF_TEN, MILLI_GRID) \
            == pytest.approx(0.7, abs=0.001)

    def test_single_point_grid(self):
        assert mle_estimate(beta_binomial_model(), SEVEN_OF_TEN, [0.31]) == 0.31

    def test_normal_mle_is_sample_mean(self):
        data = np.array([1.4, 0.6, 1.1, 0.7, 1.2])
        grid = centered_grid(1.0, 1.0, 0.001)
        estimate = mle_estimate(normal_model(sigma=1.0), data, grid)
        assert estimate == pytest.approx(float(data.mean()), abs=0.001)

    def test_empty_grid(self):
        with pytest.raises(EmptyGridError):
            mle_estimate(beta_binomial_model(), SEVEN_OF_TEN, [])

    def test_all_degenerate(self):
        with pytest.raises(AllDegenerateError):
            mle_estimate(beta_binomial_model(), SEVEN_OF_TEN, [0.0, 1.0])

    def test_tie_breaks_to_smallest_index(self):
        model = normal_model(sigma=1.0)
        data = np.array([0.0])
        # symmetric likelihood around 0: -0.3 and 0.3 tie exactly
        assert mle_estimate(model, data, [-0.3, 0.3]) == -0.3


class TestMap:
    def test_beta_posterior_mode(self):
        # Beta(8, 4) mode is (8 - 1) / (8 + 4 - 2) = 0.7
        assert map_estimate(beta_binomial_model(), SEVEN_OF_TEN, MILLI_GRID) \
            == pytest.approx(0.7, abs=0.001)

    def test_flat_prior_map_equals_mle(self):
        model = beta_binomial_model()
        grid = unit_interval_grid(0.01)
        assert map_estimate(model, SEVEN_OF_TEN, grid) \
            == mle_estimate(model, SEVEN_OF_TEN, grid)

    def test_degenerate_single_point_prior(self):
        assert map_estimate(beta_binomial_model(), SEVEN_OF_TEN, [0.25]) == 0.25

    def test_informative_prior_shifts_map(self):
        flat = map_estimate(beta_binomial_model(), SEVEN_OF_TEN, MILLI_GRID)
        tight = map_estimate(beta_binomial_model(alpha=50.0, beta=50.0),
                             SEVEN_OF_TEN, MILLI_GRID)
        assert tight < flat  # pulled toward the prior mean 0.5


class TestPosteriorGridAndMean:
    def test_grid_matches_conjugate_posterior(self):
        # Beta(1,1) prior with 7/10 data gives a Beta(8, 4) posterior
        grid = posterior_grid(beta_binomial_model(), SEVEN_OF_TEN, MILLI_GRID)
        mean, sd, mode = beta_moments(8, 4)
        assert grid.mean() == pytest.approx(mean, abs=1e-8)
        assert grid.sd() == pytest.approx(sd, abs=1e-8)
        assert grid.mode() == pytest.approx(mode, abs=0.001)

    def test_constant_function_mean(self):
        target = finite_target([2.0, 1.0])
        jump = finite_jump_kernel(validate_chain([[0.5, 0.5], [0.5, 0.5]]))
        trace = run_chain(target, jump, init=0, m=200, burn_in=0, seed=0)
        assert posterior_mean(trace, lambda _theta: 3.25) == 3.25

    def test_empty_trace(self):
        target = finite_target([2.0, 1.0])
        jump = finite_jump_kernel(validate_chain([[0.5, 0.5], [0.5, 0.5]]))
        trace = run_chain(target, jump, init=0, m=200, burn_in=0, seed=0)
        pruned = type(trace)(samples=trace.samples[:0], accepted=trace.accepted[:0],
                             accepted_count=0, proposed_count=0, seed=0,
                             burn_in=0, thin=1)
        with pytest.raises(EmptyTraceError):
            posterior_mean(pruned, first_coord)

    def test_mh_estimate_near_conjugate_mean(self):
        model = beta_binomial_model()
        trace = run_chain(target_from_model(model, SEVEN_OF_TEN),
                          random_walk_kernel(0.25, 1),
                          init=lambda rng: rng.uniform(size=1),
                          m=30000, burn_in=3000, seed=3)
        grid = posterior_grid(model, SEVEN_OF_TEN, MILLI_GRID)
        estimate, exact = posterior_mean(trace, first_coord, exact=grid)
        assert exact == pytest.approx(2 / 3, abs=1e-8)
        assert abs(estimate - 2 / 3) <= 0.01

    def test_finite_target_indicator_mean(self):
        # exact stationary expectation of the explicit MH kernel is 2/3
        uniform = validate_chain([[0.5, 0.5], [0.5, 0.5]])
        kernel = finite_mh_kernel([2.0, 1.0], uniform)
        assert stationary_distribution(kernel).probs[0] == pytest.approx(2 / 3)
        trace = run_chain(finite_target([2.0, 1.0]), finite_jump_kernel(uniform),
                          init=0, m=50000, burn_in=0, seed=8)
        estimate = posterior_mean(trace, lambda s: 1.0 if s == 0 else 0.0)
        assert abs(estimate - 2 / 3) <= 0.02


class TestRisk:
    @staticmethod
    def dyadic_grid(rng, size):
        """Uniform grids with power-of-two steps so window edges are exact."""
        step = float(2.0 ** -rng.integers(2, 6))
        start = float(rng.integers(-8, 8)) * step
        points = start + np.arange(size) * step
        weights = rng.dirichlet(np.ones(size))
        return PosteriorGrid(points=points, weights=weights), step

    def test_squared_risk_at_mean_is_variance(self):
        rng = np.random.default_rng(51)
        grid, _ = self.dyadic_grid(rng, 9)
        assert risk("squared", grid.mean(), grid) \
            == pytest.approx(grid.variance(), abs=1e-12)

    def test_squared_risk_decomposition(self):
        # R(mean + c) = variance + c^2
        rng = np.random.default_rng(53)
        grid, _ = self.dyadic_grid(rng, 7)
        for c in (0.5, -1.25, 2.0):
            assert risk("squared", grid.mean() + c, grid) \
                == pytest.approx(grid.variance() + c * c, abs=1e-12)

    def test_zero_one_risk_minimized_at_mode(self):
        rng = np.random.default_rng(57)
        for _ in range(25):
            grid, step = self.dyadic_grid(rng, int(rng.integers(4, 12)))
            risks = [risk("zero_one", d, grid, epsilon=step) for d in grid.points]
            best = grid.points[int(np.argmin(risks))]
            assert best == grid.mode()

    def test_squared_risk_minimized_at_nearest_point_to_mean(self):
        rng = np.random.default_rng(59)
        for _ in range(25):
            grid, _ = self.dyadic_grid(rng, int(rng.integers(4, 12)))
            risks = [risk("squared", d, grid) for d in grid.points]
            best = grid.points[int(np.argmin(risks))]
            nearest = grid.points[int(np.argmin(np.abs(grid.points - grid.mean())))]
            assert best == nearest

    def test_unknown_loss(self):
        grid = PosteriorGrid(points=np.array([0.0, 1.0]),
                             weights=np.array([0.5, 0.5]))
        with pytest.raises(UnknownLossError):
            risk("absolute", 0.5, grid)

    def test_non_normalized_posterior_rejected(self):
        with pytest.raises(NonNormalizedPosteriorError):
            PosteriorGrid(points=np.array([0.0, 1.0]),
                          weights=np.array([0.5, 0.6]))

    def test_zero_one_needs_epsilon(self):
        grid = PosteriorGrid(points=np.array([0.0, 1.0]),
                             weights=np.array([0.5, 0.5]))
        with pytest.raises(ValueError):
            risk("zero_one", 0.5, grid)


class TestDatasets:
    def test_observations_with_header(self, tmp_path):
        path = tmp_path / "obs.csv"
        path.write_text("x\n1.5\n-0.25\n3.0\n")
        assert np.array_equal(load_observations(path), [1.5, -0.25, 3.0])

    def test_observations_without_header(self, tmp_path):
        path = tmp_path / "obs.csv"
        path.write_text("1.5\n2.5\n")
        assert np.array_equal(load_observations(path), [1.5, 2.5])

    def test_observations_bad_cell(self, tmp_path):
        path = tmp_path / "obs.csv"
        path.write_text("x\n1.5\noops\n")
        with pytest.raises(ParseError, match="line 3"):
            load_observations(path)

    def test_binomial_pair(self, tmp_path):
        path = tmp_path / "binom.csv"
        path.write_text("successes,trials\n7,10\n")
        assert load_binomial(path) == (7, 10)

    def test_binomial_pair_headerless(self, tmp_path):
        path = tmp_path / "binom.csv"
        path.write_text("7,10\n")
        assert load_binomial(path) == (7, 10)

    def test_binomial_order_violation(self, tmp_path):
        path = tmp_path / "binom.csv"
        path.write_text("11,10\n")
        with pytest.raises(ParseError):
            load_binomial(path)
