"""Convergence diagnostics: total-variation distance, d(t), mixing time.

For finite state spaces the total-variation distance equals half the L1
distance between the probability vectors; the test suite verifies this
against the sup-over-events definition by brute-force enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain import FiniteChain, ProbVector, _check_same_states
from .chain import is_aperiodic, is_irreducible, stationary_distribution
from .errors import CapExceededError, NotIrreducibleError, PeriodicError

SCAN_CAP = 10**6


@dataclass(frozen=True)
class GeometricEnvelope:
    """A bound d(t) <= C * alpha**t valid over the fitted horizon.

    C is d(0), doubled in the rare plateau case where no alpha below one
    would otherwise dominate. `trivial` marks chains whose d(t) vanishes
    for every t >= 1, where any alpha in (0, 1) works; a fixed 0.5 is
    reported.
    """

    C: float
    alpha: float
    trivial: bool = False


@dataclass(frozen=True)
class MixingReport:
    d_curve: tuple[tuple[int, float], ...]
    t_mix: int
    envelope: GeometricEnvelope


def tv_distance(f: ProbVector, g: ProbVector) -> float:
    """Total-variation distance, computed as half the L1 distance."""
    _check_same_states(f, g)
    return 0.5 * float(np.abs(f.probs - g.probs).sum())


def _require_ergodic(chain: FiniteChain) -> None:
    if not is_irreducible(chain):
        raise NotIrreducibleError("chain must be irreducible")
    if not is_aperiodic(chain):
        raise PeriodicError("chain must be aperiodic")


def _worst_start_tv(power: np.ndarray, pi: np.ndarray) -> float:
    # max over point-mass starts x of TV(P^t(x, .), pi)
    return 0.5 * float(np.abs(power - pi[None, :]).sum(axis=1).max())


def distance_to_stationarity(chain: FiniteChain, t: int) -> float:
    """d(t): worst case over starting states of TV(P^t(x, .), pi)."""
    _require_ergodic(chain)
    if t < 0:
        raise ValueError("t must be nonnegative")
    pi = stationary_distribution(chain).probs
    power = np.linalg.matrix_power(chain.matrix, t)
    return _worst_start_tv(power, pi)


def _d_scan(chain: FiniteChain):
    """Yield (t, d(t)) for t = 0, 1, 2, ... with incremental matrix powers."""
    pi = stationary_distribution(chain).probs
    power = np.eye(chain.n)
    t = 0
    while True:
        yield t, _worst_start_tv(power, pi)
        power = power @ chain.matrix
        t += 1


def mixing_time(chain: FiniteChain, epsilon: float) -> int:
    """Smallest t with d(t) < epsilon, scanning t = 0, 1, 2, ..."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    _require_ergodic(chain)
    for t, d in _d_scan(chain):
        if d < epsilon:
            return t
        if t >= SCAN_CAP:
            raise CapExceededError(SCAN_CAP, f"d(t) never dropped below {epsilon}")


def d_curve(chain: FiniteChain, t_max: int) -> list[tuple[int, float]]:
    """The pairs (t, d(t)) for t = 0..t_max."""
    _require_ergodic(chain)
    curve = []
    for t, d in _d_scan(chain):
        curve.append((t, d))
        if t >= t_max:
            return curve


# computed d(t) carries the stationary solve's rounding noise, so values at
# or below this floor count as zero for the trivial-envelope decision
_D_ZERO_FLOOR = 1e-14


def _fit_envelope(curve: list[tuple[int, float]]) -> GeometricEnvelope:
    d0 = curve[0][1]
    positive = [(t, d) for t, d in curve[1:] if d > _D_ZERO_FLOOR]
    if not positive:
        return GeometricEnvelope(C=d0, alpha=0.5, trivial=True)
    alpha = max((d / d0) ** (1.0 / t) for t, d in positive)
    C = d0
    if alpha >= 1.0:
        # d plateaus at d(0) for a while (some row is a point mass on a
        # lowest-mass state); doubling C leaves every ratio strictly below
        # one while still dominating the observed curve
        C = 2.0 * d0
        alpha = max((d / C) ** (1.0 / t) for t, d in positive)
    return GeometricEnvelope(C=C, alpha=alpha, trivial=False)


def fit_geometric_envelope(chain: FiniteChain, t_max: int) -> GeometricEnvelope:
    """The minimal-alpha geometric envelope of d over the horizon [0, t_max].

    alpha is the largest per-step decay ratio (d(t)/d(0))^(1/t) observed for
    1 <= t <= t_max, so C * alpha**t dominates every observed d(t) with
    C = d(0).
    """
    if t_max < 2:
        raise ValueError("t_max must be at least 2")
    return _fit_envelope(d_curve(chain, t_max))


def mixing_report(chain: FiniteChain, epsilon: float,
                  t_max: int | None = None) -> MixingReport:
    """d-curve, mixing time, and fitted envelope in one pass.

    With t_max given the curve spans 0..t_max; otherwise it stops at the
    first t with d(t) < epsilon. The envelope is fitted over the emitted
    curve, extended to horizon 2 when the curve is shorter.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    _require_ergodic(chain)

    curve: list[tuple[int, float]] = []
    t_mix = None
    for t, d in _d_scan(chain):
        if t_max is None or t <= t_max:
            curve.append((t, d))
        if t_mix is None and d < epsilon:
            t_mix = t
        curve_done = t_max is not None and t >= t_max
        if t_mix is not None and (t_max is None or curve_done):
            break
        if t >= SCAN_CAP:
            raise CapExceededError(SCAN_CAP, f"d(t) never dropped below {epsilon}")

    fit_curve = curve if len(curve) >= 3 else d_curve(chain, 2)
    return MixingReport(d_curve=tuple(curve), t_mix=t_mix,
                        envelope=_fit_envelope(fit_curve))
