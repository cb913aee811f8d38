"""Metropolis-Hastings sampling from unnormalized targets.

All density arithmetic happens in log space; the acceptance ratio is never
exponentiated. A candidate is accepted when log U < min(0, log r) with U
drawn uniformly on [0, 1), so ratios at or above one are always accepted.
Rejected proposals consume the same two random draws (candidate, uniform)
as accepted ones, which keeps traces reproducible across refactors.

Randomness comes from numpy's seedable PCG64 generator
(``np.random.default_rng(seed)``); numpy pins the bit stream for a given
seed, so traces are deterministic within this implementation. No
cross-language stream compatibility is promised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .chain import FiniteChain, make_prob_vector, detailed_balance_residual, validate_chain
from .errors import (
    DimensionMismatchError,
    EmptyTraceError,
    InitFailureError,
    NaNDensityError,
    NonPositiveScaleError,
    ZeroWeightError,
)

NEG_INF = float("-inf")


@dataclass(frozen=True)
class Box:
    """An axis-aligned box in R^d."""

    lows: tuple[float, ...]
    highs: tuple[float, ...]

    def contains(self, point) -> bool:
        p = np.atleast_1d(np.asarray(point, dtype=float))
        if p.size != len(self.lows):
            return False
        return bool(np.all(p >= self.lows) and np.all(p <= self.highs))


@dataclass(frozen=True)
class FiniteSpace:
    """An explicit finite label set; points are integer state indices."""

    labels: tuple[str, ...]

    def contains(self, point) -> bool:
        return isinstance(point, (int, np.integer)) and 0 <= int(point) < len(self.labels)


@dataclass(frozen=True)
class TargetDensity:
    """An unnormalized log-density over a parameter space.

    `log_f` may return -inf for zero-density points but never NaN; every
    evaluation goes through `log_density`, which enforces that.
    """

    log_f: Callable[..., float]
    space: Box | FiniteSpace

    def log_density(self, point) -> float:
        value = float(self.log_f(point))
        if math.isnan(value):
            raise NaNDensityError(f"target density is NaN at {point!r}")
        return value


@dataclass(frozen=True)
class JumpKernel:
    """A proposal sampler plus the log-density of proposing `to` from `from`.

    When `symmetric` is set, log_density(a, b) == log_density(b, a) and the
    jump terms are skipped in the acceptance ratio.
    """

    sample: Callable[..., object]          # (current, rng) -> candidate
    log_density: Callable[..., float]      # (to, frm) -> log J(to | frm)
    symmetric: bool


@dataclass(frozen=True)
class Trace:
    """Kept states of one MH run, after burn-in and thinning.

    `samples` has one row per kept iteration; `accepted` flags whether the
    proposal at that iteration was taken. Counts cover all `proposed_count`
    iterations, burn-in included.
    """

    samples: np.ndarray
    accepted: np.ndarray
    accepted_count: int
    proposed_count: int
    seed: int
    burn_in: int
    thin: int

    def __len__(self) -> int:
        return len(self.samples)


def log_mh_ratio(target: TargetDensity, jump: JumpKernel, current, candidate) -> float:
    """log of the acceptance ratio r for moving current -> candidate.

    r = f(candidate) J(current | candidate) / (f(current) J(candidate | current)).
    Returns -inf for zero-density candidates; jump terms cancel and are not
    evaluated for symmetric kernels.
    """
    log_f_cand = target.log_density(candidate)
    if log_f_cand == NEG_INF:
        return NEG_INF
    log_r = log_f_cand - target.log_density(current)
    if not jump.symmetric:
        back = float(jump.log_density(current, candidate))
        fwd = float(jump.log_density(candidate, current))
        log_r = log_r + back - fwd
    if math.isnan(log_r):
        raise NaNDensityError(
            f"acceptance ratio is NaN for move {current!r} -> {candidate!r}"
        )
    return log_r


def mh_step(current, target: TargetDensity, jump: JumpKernel,
            rng: np.random.Generator):
    """One MH transition; returns (next_point, accepted)."""
    candidate = jump.sample(current, rng)
    log_r = log_mh_ratio(target, jump, current, candidate)
    u = rng.random()
    log_u = math.log(u) if u > 0.0 else NEG_INF
    if log_u < min(0.0, log_r):
        return candidate, True
    return current, False


_INIT_RETRIES = 1000


def _draw_init(target: TargetDensity, init, rng: np.random.Generator):
    if callable(init):
        for _ in range(_INIT_RETRIES):
            point = init(rng)
            if target.log_density(point) > NEG_INF:
                return point
        raise InitFailureError(
            f"no positive-density start after {_INIT_RETRIES} draws"
        )
    if target.log_density(init) == NEG_INF:
        raise InitFailureError(f"fixed start {init!r} has zero density")
    return init


def run_chain(target: TargetDensity, jump: JumpKernel, init, m: int,
              burn_in: int | None = None, thin: int = 1, seed: int = 0) -> Trace:
    """Run m MH iterations and keep every thin-th state after burn-in.

    `init` is either a point with positive density or a callable
    ``init(rng) -> point`` retried up to 1000 times. `m` counts all
    iterations including burn-in; by convention burn_in defaults to m // 10.
    Kept iterations are t = burn_in + thin, burn_in + 2 thin, ..., so the
    trace holds floor((m - burn_in) / thin) states.
    """
    if burn_in is None:
        burn_in = m // 10
    if burn_in < 0 or m <= burn_in:
        raise ValueError(f"need m > burn_in >= 0, got m={m}, burn_in={burn_in}")
    if thin < 1:
        raise ValueError(f"thin must be >= 1, got {thin}")

    rng = np.random.default_rng(seed)
    current = _draw_init(target, init, rng)

    kept = []
    kept_accepted = []
    accepted_count = 0
    for t in range(1, m + 1):
        current, accepted = mh_step(current, target, jump, rng)
        accepted_count += accepted
        if t > burn_in and (t - burn_in) % thin == 0:
            kept.append(current)
            kept_accepted.append(accepted)

    return Trace(
        samples=np.asarray(kept),
        accepted=np.asarray(kept_accepted, dtype=bool),
        accepted_count=accepted_count,
        proposed_count=m,
        seed=seed,
        burn_in=burn_in,
        thin=thin,
    )


def acceptance_rate(trace: Trace) -> float:
    if trace.proposed_count <= 0:
        raise EmptyTraceError("trace has no proposals")
    return trace.accepted_count / trace.proposed_count


def finite_mh_kernel(target_weights, jump: FiniteChain) -> FiniteChain:
    """The explicit MH transition matrix for a finite target.

    Off the diagonal, P(x, y) = J(x, y) * min(1, w(y) J(y, x) / (w(x) J(x, y)))
    wherever J(x, y) > 0; the diagonal absorbs the leftover mass. The result
    is checked to balance in detail against the normalized weights.
    """
    w = np.asarray(target_weights, dtype=float)
    if w.ndim != 1 or w.size != jump.n:
        raise DimensionMismatchError(
            f"{w.size} weights for a {jump.n}-state jump chain"
        )
    if np.any(w <= 0.0):
        raise ZeroWeightError("target weights must be strictly positive")

    J = jump.matrix
    flow = w[:, None] * J
    with np.errstate(divide="ignore", invalid="ignore"):
        accept = np.where(J > 0.0, np.minimum(1.0, flow.T / flow), 0.0)
    P = J * accept
    np.fill_diagonal(P, 0.0)
    diag = np.clip(1.0 - P.sum(axis=1), 0.0, None)
    P = P + np.diag(diag)

    kernel = validate_chain(P, jump.states)
    pi = make_prob_vector(w / w.sum(), jump.states)
    residual = detailed_balance_residual(kernel, pi)
    if residual > 1e-12:
        raise AssertionError(
            f"MH kernel violates detailed balance, residual {residual:.3e}"
        )
    return kernel


def random_walk_kernel(scale: float, dimension: int) -> JumpKernel:
    """Gaussian random-walk proposal: candidate = current + scale * z."""
    if scale <= 0.0:
        raise NonPositiveScaleError(f"scale must be positive, got {scale}")
    if dimension < 1:
        raise ValueError(f"dimension must be >= 1, got {dimension}")

    log_norm = dimension * math.log(scale * math.sqrt(2.0 * math.pi))

    def sample(current, rng: np.random.Generator):
        return np.asarray(current, dtype=float) + scale * rng.standard_normal(dimension)

    def log_density(to, frm) -> float:
        diff = (np.asarray(to, dtype=float) - np.asarray(frm, dtype=float)) / scale
        return -0.5 * float(diff @ diff) - log_norm

    return JumpKernel(sample=sample, log_density=log_density, symmetric=True)


def finite_target(weights, labels=None) -> TargetDensity:
    """Unnormalized target over a finite state set; points are indices."""
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0.0) or not np.any(w > 0.0):
        raise ZeroWeightError("weights must be nonnegative with positive total")
    if labels is None:
        labels = tuple(str(i) for i in range(w.size))
    with np.errstate(divide="ignore"):
        log_w = np.log(w)

    return TargetDensity(
        log_f=lambda i: float(log_w[int(i)]),
        space=FiniteSpace(labels=tuple(labels)),
    )


def finite_jump_kernel(chain: FiniteChain) -> JumpKernel:
    """Jump kernel drawing from the rows of a finite chain; points are indices."""
    cumulative = np.cumsum(chain.matrix, axis=1)
    matrix = chain.matrix
    with np.errstate(divide="ignore"):
        log_matrix = np.log(matrix)

    def sample(current, rng: np.random.Generator) -> int:
        return int(np.searchsorted(cumulative[int(current)], rng.random(), side="right"))

    def log_density(to, frm) -> float:
        return float(log_matrix[int(frm), int(to)])

    return JumpKernel(
        sample=sample,
        log_density=log_density,
        symmetric=bool(np.array_equal(matrix, matrix.T)),
    )


def trace_to_csv(trace: Trace, fh) -> None:
    """Write a trace as CSV: metadata comment lines, then one row per state."""
    rate = acceptance_rate(trace)
    m = trace.proposed_count
    fh.write(f"# seed={trace.seed}\n")
    fh.write(f"# m={m}\n")
    fh.write(f"# burn_in={trace.burn_in}\n")
    fh.write(f"# thin={trace.thin}\n")
    fh.write(f"# acceptance_rate={rate:.12g}\n")

    samples = np.atleast_2d(np.asarray(trace.samples, dtype=float))
    if samples.shape[0] == 1 and len(trace) != 1:
        samples = samples.T
    d = samples.shape[1]
    header = ",".join(f"theta_{k + 1}" for k in range(d))
    fh.write(f"iteration,{header},accepted\n")
    for k in range(samples.shape[0]):
        iteration = trace.burn_in + trace.thin * (k + 1)
        values = ",".join(f"{v:.12g}" for v in samples[k])
        fh.write(f"{iteration},{values},{int(trace.accepted[k])}\n")
