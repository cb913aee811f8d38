import itertools

import numpy as np
import pytest

from mcmckit import (
    d_curve,
    distance_to_stationarity,
    fit_geometric_envelope,
    make_prob_vector,
    mixing_report,
    mixing_time,
    stationary_distribution,
    tv_distance,
    validate_chain,
)
from mcmckit.errors import DimensionMismatchError, NotIrreducibleError, PeriodicError


def sup_over_events_tv(f, g):
    """TV by its definition: the largest probability gap over all events."""
    n = len(f)
    best = 0.0
    for size in range(n + 1):
        for event in itertools.combinations(range(n), size):
            idx = list(event)
            best = max(best, abs(f[idx].sum() - g[idx].sum()))
    return best


def lazy_two_state(hold):
    return validate_chain([[hold, 1 - hold], [1 - hold, hold]])


FLAT = [[0.5, 0.5], [0.5, 0.5]]


class TestTvDistance:
    def test_identical_distributions(self):
        f = make_prob_vector([0.3, 0.7])
        assert tv_distance(f, f) == 0.0

    def test_disjoint_point_masses(self):
        f = make_prob_vector([1.0, 0.0])
        g = make_prob_vector([0.0, 1.0])
        assert tv_distance(f, g) == 1.0

    def test_quarter_gap(self):
        f = make_prob_vector([0.5, 0.5])
        g = make_prob_vector([0.75, 0.25])
        assert tv_distance(f, g) == pytest.approx(0.25)
        assert sup_over_events_tv(f.probs, g.probs) == pytest.approx(0.25)

    def test_mismatched_states(self):
        with pytest.raises(DimensionMismatchError):
            tv_distance(make_prob_vector([1.0]), make_prob_vector([0.5, 0.5]))

    def test_half_l1_equals_sup_over_events(self):
        # the identity behind the half-L1 implementation, checked by
        # enumerating every event of spaces with up to 12 states
        rng = np.random.default_rng(97)
        for trial in range(200):
            n = int(rng.integers(2, 13))
            f = make_prob_vector(rng.dirichlet(np.ones(n)))
            g = make_prob_vector(rng.dirichlet(np.ones(n)))
            assert tv_distance(f, g) == pytest.approx(
                sup_over_events_tv(f.probs, g.probs), abs=1e-12
            )


class TestDistanceToStationarity:
    def test_initial_distance_is_one_minus_smallest_mass(self):
        # TV between a point mass at x and pi is 1 - pi(x)
        chain = validate_chain([[0.8, 0.2], [0.4, 0.6]])
        pi = stationary_distribution(chain).probs
        assert distance_to_stationarity(chain, 0) == pytest.approx(1 - pi.min())

    def test_flat_chain_mixes_in_one_step(self):
        # zero up to the stationary solve's rounding noise
        assert distance_to_stationarity(validate_chain(FLAT), 1) <= 1e-14

    def test_lazy_chain_geometric_decay(self):
        chain = lazy_two_state(0.75)
        assert distance_to_stationarity(chain, 1) == pytest.approx(0.25)
        for t in range(6):
            assert distance_to_stationarity(chain, t) == pytest.approx(0.5 * 0.5**t)

    def test_requires_irreducible(self):
        with pytest.raises(NotIrreducibleError):
            distance_to_stationarity(validate_chain([[1, 0], [0, 1]]), 1)

    def test_requires_aperiodic(self):
        with pytest.raises(PeriodicError):
            distance_to_stationarity(validate_chain([[0, 1], [1, 0]]), 1)


class TestMixingTime:
    def test_flat_chain(self):
        assert mixing_time(validate_chain(FLAT), 0.25) == 1

    def test_lazy_chain(self):
        # d(t) = 0.5 * 0.5^t here: d(1) = 0.25 >= 0.2, d(2) = 0.125 < 0.2
        assert mixing_time(lazy_two_state(0.75), 0.2) == 2

    def test_zero_when_epsilon_beats_initial_distance(self):
        chain = validate_chain([[0.8, 0.2], [0.4, 0.6]])
        pi = stationary_distribution(chain).probs
        eps = (1 - pi.min()) + 0.01
        assert mixing_time(chain, eps) == 0

    def test_nonincreasing_in_epsilon(self):
        rng = np.random.default_rng(31)
        for _ in range(10):
            n = int(rng.integers(2, 6))
            chain = validate_chain(rng.dirichlet(np.ones(n), size=n))
            times = [mixing_time(chain, eps) for eps in (0.05, 0.1, 0.2, 0.4)]
            assert times == sorted(times, reverse=True)

    def test_epsilon_domain(self):
        with pytest.raises(ValueError):
            mixing_time(validate_chain(FLAT), 1.0)


class TestEnvelope:
    def test_exact_two_state_curve(self):
        env = fit_geometric_envelope(lazy_two_state(0.75), 10)
        assert env.C == pytest.approx(0.5)
        assert env.alpha == pytest.approx(0.5)
        assert not env.trivial

    def test_flat_chain_is_flagged_trivial(self):
        env = fit_geometric_envelope(validate_chain(FLAT), 10)
        assert env.trivial
        assert env.C == pytest.approx(0.5)
        assert 0.0 < env.alpha < 1.0

    def test_alpha_matches_second_eigenvalue_for_symmetric_two_state(self):
        # the 2-state symmetric chain decays at rate |2h - 1|; keep the fit
        # horizon short enough that d(t) stays far above rounding noise
        for hold in (0.6, 0.75, 0.9):
            env = fit_geometric_envelope(lazy_two_state(hold), 10)
            assert env.alpha == pytest.approx(abs(2 * hold - 1), abs=1e-6)
            curve = d_curve(lazy_two_state(hold), 30)
            for t, d in curve:
                assert d == pytest.approx(0.5 * abs(2 * hold - 1) ** t, abs=1e-12)

    def test_envelope_dominates_curve(self):
        rng = np.random.default_rng(41)
        for _ in range(20):
            n = int(rng.integers(2, 7))
            chain = validate_chain(rng.dirichlet(np.ones(n), size=n))
            env = fit_geometric_envelope(chain, 60)
            for t, d in d_curve(chain, 60):
                assert d <= env.C * env.alpha**t + 1e-12

    def test_plateau_chain_still_gets_strict_decay_rate(self):
        # d(1) == d(0) here: state 2 maps deterministically onto state 0,
        # which carries the smallest stationary mass
        chain = validate_chain([[0, 1, 0], [0, 0.5, 0.5], [1, 0, 0]])
        pi = stationary_distribution(chain).probs
        assert np.allclose(pi, [0.25, 0.5, 0.25], atol=1e-12)
        assert distance_to_stationarity(chain, 1) \
            == pytest.approx(distance_to_stationarity(chain, 0))
        env = fit_geometric_envelope(chain, 40)
        assert 0.0 < env.alpha < 1.0
        for t, d in d_curve(chain, 40):
            assert d <= env.C * env.alpha**t + 1e-12

    def test_curve_nonincreasing(self):
        rng = np.random.default_rng(43)
        for _ in range(20):
            n = int(rng.integers(2, 7))
            chain = validate_chain(rng.dirichlet(np.ones(n), size=n))
            ds = [d for _, d in d_curve(chain, 80)]
            for earlier, later in zip(ds, ds[1:]):
                assert later <= earlier + 1e-12


class TestMixingReport:
    def test_report_consistency(self):
        report = mixing_report(lazy_two_state(0.75), 0.2, t_max=10)
        assert report.t_mix == 2
        ds = dict(report.d_curve)
        assert len(report.d_curve) == 11
        assert ds[report.t_mix] < 0.2
        assert all(ds[t] >= 0.2 for t in range(report.t_mix))
        assert all(0.0 <= d <= 1.0 for d in ds.values())

    def test_report_without_tmax_stops_at_t_mix(self):
        report = mixing_report(lazy_two_state(0.75), 0.2)
        assert report.d_curve[-1][0] == report.t_mix == 2

    def test_t_mix_beyond_tmax_is_still_found(self):
        report = mixing_report(lazy_two_state(0.9), 0.01, t_max=3)
        assert report.d_curve[-1][0] == 3
        assert report.t_mix > 3
