"""Finite Markov chains: validation, structure, and stationary analysis.

A chain is a row-stochastic matrix over an explicit, ordered, finite state
set. All structural questions (irreducibility, periods) are answered on the
support digraph, where an edge x -> y exists exactly when the matrix entry
is > 0; validated entries are clean, so no epsilon thresholding is applied.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    DuplicateLabelError,
    NegativeEntryError,
    NoReturnPathError,
    NonSquareError,
    NotIrreducibleError,
    PowerIterationDivergedError,
    ParseError,
    RowSumViolationError,
)

ROW_SUM_TOL = 1e-9
FIXED_POINT_TOL = 1e-10
REVERSIBLE_TOL = 1e-10

# exact solve below this size, power iteration above
_DIRECT_SOLVE_MAX_N = 512
_POWER_ITER_TOL = 1e-12
_POWER_ITER_CAP = 10**6


@dataclass(frozen=True)
class FiniteChain:
    """A validated finite Markov chain.

    `states` are opaque labels; all numerics index by position. `matrix[i, j]`
    is the one-step probability of moving from state i to state j.
    """

    states: tuple[str, ...]
    matrix: np.ndarray

    @property
    def n(self) -> int:
        return len(self.states)

    def index(self, state: str) -> int:
        try:
            return self.states.index(state)
        except ValueError:
            raise KeyError(f"unknown state {state!r}") from None

    def support_edges(self) -> list[tuple[int, int]]:
        """Directed edges (i, j) of the support digraph, entry > 0 exactly."""
        rows, cols = np.nonzero(self.matrix > 0.0)
        return list(zip(rows.tolist(), cols.tolist()))


@dataclass(frozen=True)
class ProbVector:
    """A probability distribution over the same ordered state set as a chain."""

    states: tuple[str, ...]
    probs: np.ndarray

    @property
    def n(self) -> int:
        return len(self.states)


def _default_labels(n: int) -> tuple[str, ...]:
    return tuple(str(i) for i in range(n))


def validate_chain(raw_matrix, labels=None) -> FiniteChain:
    """Validate a raw transition matrix and return a FiniteChain.

    Rows whose sum deviates from 1 by at most 1e-9 are renormalized so that
    downstream arithmetic sees exactly stochastic rows; larger deviations
    raise RowSumViolationError.
    """
    matrix = np.array(raw_matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise NonSquareError(f"expected a square matrix, got shape {matrix.shape}")
    n = matrix.shape[0]
    if n < 1:
        raise NonSquareError("matrix must have at least one state")

    if labels is None:
        labels = _default_labels(n)
    labels = tuple(str(lab) for lab in labels)
    if len(labels) != n:
        raise DimensionMismatchError(f"{len(labels)} labels for a {n}-state matrix")
    if len(set(labels)) != n:
        raise DuplicateLabelError(f"duplicate state labels in {labels}")

    neg = np.argwhere(matrix < 0.0)
    if neg.size:
        r, c = map(int, neg[0])
        raise NegativeEntryError(r, c, float(matrix[r, c]))

    row_sums = matrix.sum(axis=1)
    bad = np.flatnonzero(np.abs(row_sums - 1.0) > ROW_SUM_TOL)
    if bad.size:
        r = int(bad[0])
        raise RowSumViolationError(r, float(row_sums[r]))

    matrix = matrix / row_sums[:, None]
    matrix.setflags(write=False)
    return FiniteChain(states=labels, matrix=matrix)


def make_prob_vector(probs, states=None) -> ProbVector:
    """Build a ProbVector, renormalizing sums within 1e-9 of 1."""
    probs = np.array(probs, dtype=float)
    if probs.ndim != 1:
        raise DimensionMismatchError("probability vector must be one-dimensional")
    if states is None:
        states = _default_labels(probs.size)
    states = tuple(str(s) for s in states)
    if len(states) != probs.size:
        raise DimensionMismatchError(
            f"{len(states)} labels for a length-{probs.size} vector"
        )
    if np.any(probs < 0.0):
        raise NegativeEntryError(0, int(np.argmin(probs)), float(probs.min()))
    total = probs.sum()
    if abs(total - 1.0) > ROW_SUM_TOL:
        raise RowSumViolationError(0, float(total))
    probs = probs / total
    probs.setflags(write=False)
    return ProbVector(states=states, probs=probs)


def _check_same_states(a, b) -> None:
    if a.states != b.states:
        raise DimensionMismatchError(
            f"state sets differ: {a.states} vs {b.states}"
        )


def _reachable(adj: list[list[int]], start: int) -> set[int]:
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return seen


def _adjacency(chain: FiniteChain) -> tuple[list[list[int]], list[list[int]]]:
    fwd: list[list[int]] = [[] for _ in range(chain.n)]
    rev: list[list[int]] = [[] for _ in range(chain.n)]
    for i, j in chain.support_edges():
        fwd[i].append(j)
        rev[j].append(i)
    return fwd, rev


def is_irreducible(chain: FiniteChain) -> bool:
    """True iff the support digraph is strongly connected."""
    fwd, rev = _adjacency(chain)
    n = chain.n
    return len(_reachable(fwd, 0)) == n and len(_reachable(rev, 0)) == n


def period(chain: FiniteChain, state: str) -> int:
    """The gcd of return times to `state`, via BFS levels on its SCC.

    Within a strongly connected component, every edge (u, v) satisfies
    level(u) + 1 - level(v) == 0 (mod period), so the gcd over intra-SCC
    edges of those differences is the period. A state on no cycle has an
    empty return-time set: NoReturnPathError.
    """
    x = chain.index(state)
    fwd, rev = _adjacency(chain)
    scc = _reachable(fwd, x) & _reachable(rev, x)

    level = {x: 0}
    queue = deque([x])
    while queue:
        u = queue.popleft()
        for v in fwd[u]:
            if v in scc and v not in level:
                level[v] = level[u] + 1
                queue.append(v)

    g = 0
    for u in scc:
        for v in fwd[u]:
            if v in scc:
                g = math.gcd(g, level[u] + 1 - level[v])
    if g == 0:
        raise NoReturnPathError(state)
    return g


def is_aperiodic(chain: FiniteChain) -> bool:
    """True iff every state has period 1.

    Raises NoReturnPathError if some state has no return path at all.
    """
    return all(period(chain, s) == 1 for s in chain.states)


def stationary_distribution(chain: FiniteChain) -> ProbVector:
    """The unique fixed point pi = pi P of an irreducible chain.

    Uses a direct linear solve (fixed-point equations plus the normalization
    constraint, via least squares) for n <= 512 and power iteration above.
    The returned vector satisfies the max-norm residual bound 1e-10.
    """
    if not is_irreducible(chain):
        raise NotIrreducibleError(
            "stationary distribution is not unique for a reducible chain"
        )
    P = chain.matrix
    n = chain.n
    if n <= _DIRECT_SOLVE_MAX_N:
        A = np.vstack([P.T - np.eye(n), np.ones((1, n))])
        b = np.zeros(n + 1)
        b[-1] = 1.0
        pi, *_ = np.linalg.lstsq(A, b, rcond=None)
    else:
        pi = np.full(n, 1.0 / n)
        for it in range(_POWER_ITER_CAP):
            nxt = pi @ P
            if np.abs(nxt - pi).max() < _POWER_ITER_TOL:
                pi = nxt
                break
            pi = nxt
        else:
            raise PowerIterationDivergedError(_POWER_ITER_CAP)

    pi = np.clip(pi, 0.0, None)
    pi = pi / pi.sum()
    residual = np.abs(pi @ P - pi).max()
    if residual > FIXED_POINT_TOL:
        raise PowerIterationDivergedError(_POWER_ITER_CAP)
    return ProbVector(states=chain.states, probs=pi)


def detailed_balance_residual(chain: FiniteChain, dist: ProbVector) -> float:
    """max over (x, y) of |pi(x) P(x,y) - pi(y) P(y,x)|."""
    _check_same_states(chain, dist)
    flow = dist.probs[:, None] * chain.matrix
    return float(np.abs(flow - flow.T).max())


def is_reversible(chain: FiniteChain, dist: ProbVector,
                  tol: float = REVERSIBLE_TOL) -> bool:
    """True iff the pairwise probability flows balance within `tol`."""
    return detailed_balance_residual(chain, dist) <= tol


def step_distribution(chain: FiniteChain, start: ProbVector, t: int) -> ProbVector:
    """Distribution after t steps: start . P^t, computed by repeated squaring.

    Entries above -1e-12 that round negative are clamped to zero; the result
    is renormalized to absorb accumulated rounding.
    """
    _check_same_states(chain, start)
    if t < 0:
        raise ValueError("t must be nonnegative")
    out = start.probs @ np.linalg.matrix_power(chain.matrix, t)
    out = np.clip(out, 0.0, None)
    return ProbVector(states=chain.states, probs=out / out.sum())


# -- chain spec files --------------------------------------------------------

def chain_to_dict(chain: FiniteChain) -> dict:
    return {"states": list(chain.states), "matrix": chain.matrix.tolist()}


def chain_from_dict(spec: dict) -> FiniteChain:
    try:
        return validate_chain(spec["matrix"], spec.get("states"))
    except KeyError as exc:
        raise ParseError(f"chain spec is missing key {exc}") from None


def load_chain(path) -> FiniteChain:
    """Read a chain spec file: {"states": [...], "matrix": [[...], ...]}."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            spec = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(
                f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}"
            ) from None
    if not isinstance(spec, dict):
        raise ParseError(f"{path}: expected a JSON object at the top level")
    return chain_from_dict(spec)


def save_chain(chain: FiniteChain, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(chain_to_dict(chain), fh, indent=2)
        fh.write("\n")
