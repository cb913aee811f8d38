"""Point estimation: likelihood and posterior assembly, MLE, MAP, risk.

Continuous argmax problems are realized as exhaustive searches over a
declared finite grid; ties break toward the smallest grid index. The two
built-in model families (beta-binomial and normal with known variance)
have conjugate closed forms that the test suite uses as oracles.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    AllDegenerateError,
    EmptyGridError,
    EmptyTraceError,
    NonNormalizedPosteriorError,
    OutOfDomainError,
    ParseError,
    UnknownLossError,
)
from .metropolis import Box, TargetDensity, Trace


@dataclass(frozen=True)
class BayesModel:
    """Log-likelihood and log-prior over a declared parameter space.

    The likelihood of an empty dataset is zero by convention (an empty
    product), so the posterior then reduces to the prior.
    """

    log_likelihood: Callable[..., float]   # (params, data) -> float
    log_prior: Callable[..., float]        # (params,) -> float
    space: Box


@dataclass(frozen=True)
class PosteriorGrid:
    """A discrete posterior surrogate: grid points with normalized masses."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        total = float(self.weights.sum())
        if abs(total - 1.0) > 1e-9:
            raise NonNormalizedPosteriorError(f"weights sum to {total!r}")

    def mean(self) -> float:
        return float(self.weights @ self.points)

    def variance(self) -> float:
        mu = self.mean()
        return float(self.weights @ (self.points - mu) ** 2)

    def sd(self) -> float:
        return math.sqrt(self.variance())

    def mode(self) -> float:
        return float(self.points[int(np.argmax(self.weights))])


def log_posterior_unnorm(model: BayesModel, params, data) -> float:
    """log P(data | params) + log P(params), up to the evidence constant."""
    if not model.space.contains(params):
        raise OutOfDomainError(f"{params!r} is outside the declared space")
    return float(model.log_likelihood(params, data)) + float(model.log_prior(params))


def _grid_argmax(values: np.ndarray, grid) -> float:
    if len(grid) == 0:
        raise EmptyGridError("grid search needs at least one point")
    if np.all(np.isneginf(values)):
        raise AllDegenerateError("every grid point has zero density")
    # np.argmax takes the first maximum, which is the smallest-index tie-break
    return grid[int(np.argmax(values))]


def mle_estimate(model: BayesModel, data, grid):
    """argmax of the log-likelihood over the grid."""
    values = np.array([model.log_likelihood(p, data) for p in grid], dtype=float)
    return _grid_argmax(values, grid)


def map_estimate(model: BayesModel, data, grid):
    """argmax of the unnormalized log-posterior over the grid."""
    values = np.array([log_posterior_unnorm(model, p, data) for p in grid], dtype=float)
    return _grid_argmax(values, grid)


def posterior_grid(model: BayesModel, data, grid) -> PosteriorGrid:
    """Normalized posterior masses on the grid, stabilized via log-sum-exp."""
    points = np.asarray(grid, dtype=float)
    if points.size == 0:
        raise EmptyGridError("grid search needs at least one point")
    logs = np.array([log_posterior_unnorm(model, p, data) for p in grid], dtype=float)
    if np.all(np.isneginf(logs)):
        raise AllDegenerateError("every grid point has zero density")
    logs -= logs.max()
    weights = np.exp(logs)
    weights /= weights.sum()
    return PosteriorGrid(points=points, weights=weights)


def posterior_mean(trace: Trace, g: Callable[..., float],
                   exact: PosteriorGrid | None = None):
    """Ergodic estimate of E[g] over the trace.

    Returns the sample mean; with an exact grid supplied, returns the pair
    (sample mean, exact grid expectation) for comparison.
    """
    if len(trace) == 0:
        raise EmptyTraceError("trace holds no samples")
    estimate = float(np.mean([g(x) for x in trace.samples]))
    if exact is None:
        return estimate
    exact_value = float(exact.weights @ np.array([g(p) for p in exact.points]))
    return estimate, exact_value


def target_from_model(model: BayesModel, data) -> TargetDensity:
    """The unnormalized posterior as a sampling target.

    Points outside the declared space get density zero (log -inf) rather
    than an error, so random-walk proposals can wander and be rejected.
    """
    def log_f(params) -> float:
        if not model.space.contains(params):
            return float("-inf")
        return log_posterior_unnorm(model, params, data)

    return TargetDensity(log_f=log_f, space=model.space)


def risk(loss: str, decision: float, posterior: PosteriorGrid,
         epsilon: float | None = None) -> float:
    """Expected posterior loss of a decision.

    loss="squared": sum of weights * (decision - theta)^2.
    loss="zero_one": 1 - (posterior mass within epsilon of the decision),
    using the strict window |theta - decision| < epsilon.
    """
    if loss == "squared":
        return float(posterior.weights @ (decision - posterior.points) ** 2)
    if loss == "zero_one":
        if epsilon is None or epsilon <= 0.0:
            raise ValueError("zero_one loss needs a positive epsilon")
        near = np.abs(posterior.points - decision) < epsilon
        return 1.0 - float(posterior.weights[near].sum())
    raise UnknownLossError(f"unknown loss {loss!r}")


# -- built-in model families --------------------------------------------------

def beta_binomial_model(alpha: float = 1.0, beta: float = 1.0) -> BayesModel:
    """Binomial likelihood for (successes, trials) data with a Beta prior."""
    if alpha <= 0.0 or beta <= 0.0:
        raise ValueError("Beta prior parameters must be positive")
    log_beta_norm = (
        math.lgamma(alpha + beta) - math.lgamma(alpha) - math.lgamma(beta)
    )

    def log_likelihood(theta, data) -> float:
        successes, trials = data
        if trials == 0:
            return 0.0
        t = float(np.asarray(theta).reshape(()))
        if (t <= 0.0 and successes > 0) or (t >= 1.0 and successes < trials):
            return float("-inf")
        if not 0.0 <= t <= 1.0:
            return float("-inf")
        out = math.lgamma(trials + 1) - math.lgamma(successes + 1) \
            - math.lgamma(trials - successes + 1)
        if successes > 0:
            out += successes * math.log(t)
        if successes < trials:
            out += (trials - successes) * math.log1p(-t)
        return out

    def log_prior(theta) -> float:
        t = float(np.asarray(theta).reshape(()))
        if not 0.0 < t < 1.0:
            return float("-inf")
        return log_beta_norm + (alpha - 1.0) * math.log(t) \
            + (beta - 1.0) * math.log1p(-t)

    return BayesModel(
        log_likelihood=log_likelihood,
        log_prior=log_prior,
        space=Box(lows=(0.0,), highs=(1.0,)),
    )


def normal_model(sigma: float = 1.0, prior_mean: float = 0.0,
                 prior_sd: float | None = None,
                 support: tuple[float, float] = (-1e6, 1e6)) -> BayesModel:
    """Normal likelihood with known sigma; the unknown parameter is the mean.

    With prior_sd None the prior is flat over the support, so MAP and MLE
    coincide; otherwise the prior is Normal(prior_mean, prior_sd).
    """
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")

    def log_likelihood(theta, data) -> float:
        xs = np.asarray(data, dtype=float)
        if xs.size == 0:
            return 0.0
        t = float(np.asarray(theta).reshape(()))
        z = (xs - t) / sigma
        return -0.5 * float(z @ z) - xs.size * math.log(sigma * math.sqrt(2 * math.pi))

    def log_prior(theta) -> float:
        if prior_sd is None:
            return 0.0
        t = float(np.asarray(theta).reshape(()))
        z = (t - prior_mean) / prior_sd
        return -0.5 * z * z - math.log(prior_sd * math.sqrt(2 * math.pi))

    return BayesModel(
        log_likelihood=log_likelihood,
        log_prior=log_prior,
        space=Box(lows=(support[0],), highs=(support[1],)),
    )


def unit_interval_grid(step: float) -> np.ndarray:
    """The grid step, 2*step, ..., inside the open interval (0, 1)."""
    if not 0.0 < step < 1.0:
        raise ValueError("step must lie in (0, 1)")
    count = int(round(1.0 / step)) - 1
    return np.arange(1, count + 1) * step


def centered_grid(center: float, half_width: float, step: float) -> np.ndarray:
    if step <= 0.0 or half_width <= 0.0:
        raise ValueError("step and half_width must be positive")
    k = int(math.ceil(half_width / step))
    return center + np.arange(-k, k + 1) * step


# -- dataset files -------------------------------------------------------------

def load_observations(path) -> np.ndarray:
    """Read a single-column CSV of real observations; a header row is allowed."""
    values = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 1:
                raise ParseError(f"{path}: line {lineno}: expected one column")
            cell = row[0].strip()
            if lineno == 1 and not _is_number(cell):
                continue
            if not _is_number(cell):
                raise ParseError(f"{path}: line {lineno}: not a number: {cell!r}")
            values.append(float(cell))
    if not values:
        raise ParseError(f"{path}: no observations found")
    return np.array(values)


def load_binomial(path) -> tuple[int, int]:
    """Read a successes,trials pair; a header row is allowed."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = [(i, row) for i, row in enumerate(csv.reader(fh), start=1)
                if row and any(cell.strip() for cell in row)]
    for lineno, row in rows:
        cells = [cell.strip() for cell in row]
        if len(cells) != 2:
            raise ParseError(f"{path}: line {lineno}: expected successes,trials")
        if not all(_is_number(c) for c in cells):
            if lineno == rows[0][0]:
                continue
            raise ParseError(f"{path}: line {lineno}: not a number pair: {cells}")
        successes, trials = int(float(cells[0])), int(float(cells[1]))
        if not 0 <= successes <= trials:
            raise ParseError(
                f"{path}: line {lineno}: need 0 <= successes <= trials"
            )
        return successes, trials
    raise ParseError(f"{path}: no successes,trials pair found")


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True
