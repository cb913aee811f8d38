"""Approximate counting via almost-uniform sampling on derivation trees.

A self-reducible problem builds its solutions symbol by symbol: every
partial word is a vertex of a rooted derivation tree whose depth-`length`
leaves are exactly the solutions. The shipped problem counts independent
sets of a graph (decide each vertex in or out; choosing a vertex blocks
its not-yet-decided neighbors).

Sampling uses a lazy random walk on the tree: hold with probability 1/2,
otherwise move to a uniformly chosen tree neighbor. The walk's stationary
distribution weights each vertex by its degree, and every leaf of a tree
has degree exactly one, so conditioned on sitting at a leaf the stationary
law is exactly uniform over solutions. The sampler walks a horizon chosen
from the explicit walk matrix (the first power whose leaf-conditional law
is within half the requested slack of uniform, from every start), then
emits the current vertex at checkpoint times once it is a leaf. No
polynomial-time guarantee is claimed; instances are desk scale.

The sampler-to-counter direction telescopes the count along one root-leaf
path: the count equals the product of inverse branch fractions, each
fraction estimated from almost-uniform solution samples of the current
sub-instance, always recursing into the most-sampled branch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chain import FiniteChain, validate_chain
from .errors import (
    CapExceededError,
    EmptySolutionSetError,
    NodeCapExceededError,
    ParseError,
)

NODE_CAP = 10**6
_WALK_ROUND_CAP = 100_000


# -- graphs -------------------------------------------------------------------

@dataclass(frozen=True)
class Graph:
    """An undirected simple graph on vertices 0..n_vertices-1."""

    n_vertices: int
    edges: frozenset[tuple[int, int]]

    def adjacency(self) -> tuple[frozenset[int], ...]:
        nbrs: list[set[int]] = [set() for _ in range(self.n_vertices)]
        for u, v in self.edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return tuple(frozenset(s) for s in nbrs)


def make_graph(n_vertices: int, edges) -> Graph:
    normalized = set()
    for u, v in edges:
        if u == v:
            raise ParseError(f"self-loop at vertex {u}")
        if not (0 <= u < n_vertices and 0 <= v < n_vertices):
            raise ParseError(f"edge ({u}, {v}) outside 0..{n_vertices - 1}")
        normalized.add((min(u, v), max(u, v)))
    return Graph(n_vertices=n_vertices, edges=frozenset(normalized))


def path_graph(n: int) -> Graph:
    return make_graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    return make_graph(n, [(i, (i + 1) % n) for i in range(n)])


def empty_graph(n: int) -> Graph:
    return make_graph(n, [])


def read_edge_list(path) -> Graph:
    """Parse an edge-list file: one `u v` pair per line.

    Vertices are nonnegative integers; a line with a single integer declares
    an isolated vertex; blank lines and `#` comments are skipped. The vertex
    set is 0..max mentioned id.
    """
    edges = []
    max_vertex = -1
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            tokens = text.split()
            if len(tokens) not in (1, 2) or not all(t.isdigit() for t in tokens):
                raise ParseError(
                    f"{path}: line {lineno}: expected one or two nonnegative "
                    f"integers, got {text!r}"
                )
            ids = [int(t) for t in tokens]
            max_vertex = max(max_vertex, *ids)
            if len(ids) == 2:
                if ids[0] == ids[1]:
                    raise ParseError(f"{path}: line {lineno}: self-loop at {ids[0]}")
                edges.append((ids[0], ids[1]))
    return make_graph(max_vertex + 1, edges)


# -- self-reducible instances ---------------------------------------------------

class SelfReducibleInstance:
    """Interface for problems whose solutions extend symbol by symbol.

    Subclasses provide `length` (the common solution length), `branches()`
    (admissible next symbols paired with the reduced sub-instance), and
    `atom_test()` (whether the empty word solves a length-0 instance).
    Each branch must strictly reduce `length` by one.
    """

    @property
    def length(self) -> int:
        raise NotImplementedError

    def branches(self) -> list[tuple[int, "SelfReducibleInstance"]]:
        raise NotImplementedError

    def atom_test(self) -> bool:
        return True

    def label(self) -> str:
        return f"{type(self).__name__}[{self.length}]"


@dataclass(frozen=True)
class IndependentSetInstance(SelfReducibleInstance):
    """Independent sets of a graph, decided vertex by vertex.

    A solution is a 0/1 word over `order`: symbol 1 picks the vertex, which
    is admissible only if no already-picked neighbor blocked it; picking a
    vertex blocks its undecided neighbors.
    """

    order: tuple[int, ...]
    adjacency: tuple[frozenset[int], ...]
    blocked: frozenset[int]

    @classmethod
    def from_graph(cls, graph: Graph) -> "IndependentSetInstance":
        return cls(
            order=tuple(range(graph.n_vertices)),
            adjacency=graph.adjacency(),
            blocked=frozenset(),
        )

    @property
    def length(self) -> int:
        return len(self.order)

    def branches(self) -> list[tuple[int, "IndependentSetInstance"]]:
        vertex = self.order[0]
        rest = self.order[1:]
        rest_set = frozenset(rest)
        out = [
            (0, IndependentSetInstance(rest, self.adjacency,
                                       self.blocked & rest_set)),
        ]
        if vertex not in self.blocked:
            picked_blocked = (self.blocked | self.adjacency[vertex]) & rest_set
            out.append(
                (1, IndependentSetInstance(rest, self.adjacency, picked_blocked))
            )
        return out

    def label(self) -> str:
        return f"is[{len(self.order)} undecided, {len(self.blocked)} blocked]"

    def word_to_set(self, word: tuple[int, ...]) -> frozenset[int]:
        return frozenset(v for v, bit in zip(self.order, word) if bit)


# -- derivation trees -------------------------------------------------------------

@dataclass
class DerivationTree:
    """The rooted tree of partial solutions; dead branches are pruned.

    Vertex 0 is the root (the empty word). Leaves at depth `depth` carry
    the solution words; every internal vertex kept after pruning has at
    least one child.
    """

    depth: int
    words: list[tuple[int, ...]]
    instance_labels: list[str]
    parents: list[int]
    children: list[list[int]]
    leaves: list[int]

    @property
    def n_vertices(self) -> int:
        return len(self.words)

    def neighbor_lists(self) -> list[list[int]]:
        out = [list(kids) for kids in self.children]
        for v, parent in enumerate(self.parents):
            if parent >= 0:
                out[v].append(parent)
        return out

    def leaf_words(self) -> list[tuple[int, ...]]:
        return [self.words[v] for v in self.leaves]


def build_tree(problem: SelfReducibleInstance, node_cap: int = NODE_CAP) -> DerivationTree:
    """Materialize the derivation tree, pruning branches with no completions.

    A root with no solutions is kept as a bare vertex with zero leaves so
    that callers can detect the empty solution set.
    """
    words: list[tuple[int, ...]] = []
    labels: list[str] = []
    parents: list[int] = []
    children: list[list[int]] = []
    leaves: list[int] = []

    def add_vertex(word, label, parent) -> int:
        if len(words) >= node_cap:
            raise NodeCapExceededError(node_cap)
        words.append(word)
        labels.append(label)
        parents.append(parent)
        children.append([])
        return len(words) - 1

    def grow(instance, word, parent) -> int | None:
        vertex = add_vertex(word, instance.label(), parent)
        if instance.length == 0:
            if not instance.atom_test():
                return None
            leaves.append(vertex)
            return vertex
        for symbol, sub in instance.branches():
            child = grow(sub, word + (symbol,), vertex)
            if child is not None:
                children[vertex].append(child)
        if not children[vertex]:
            return None
        return vertex

    root = grow(problem, (), -1)
    if root is None:
        # no solutions: report a bare root so the caller sees zero leaves
        return DerivationTree(depth=problem.length, words=[()],
                              instance_labels=[problem.label()],
                              parents=[-1], children=[[]], leaves=[])

    # compact away pruned vertices (grow() appended them before pruning)
    keep = [False] * len(words)
    keep[root] = True
    order = [root]
    for v in order:
        for c in children[v]:
            keep[c] = True
            order.append(c)
    remap = {old: new for new, old in enumerate(order)}
    return DerivationTree(
        depth=problem.length,
        words=[words[v] for v in order],
        instance_labels=[labels[v] for v in order],
        parents=[remap[parents[v]] if parents[v] >= 0 else -1 for v in order],
        children=[[remap[c] for c in children[v]] for v in order],
        leaves=[remap[v] for v in leaves],
    )


def brute_force_count(problem: SelfReducibleInstance, node_cap: int = NODE_CAP) -> int:
    """Exact solution count by exhaustive depth-first enumeration."""
    visited = 0

    def count(instance) -> int:
        nonlocal visited
        visited += 1
        if visited > node_cap:
            raise NodeCapExceededError(node_cap)
        if instance.length == 0:
            return 1 if instance.atom_test() else 0
        return sum(count(sub) for _, sub in instance.branches())

    return count(problem)


def tree_walk_chain(tree: DerivationTree) -> FiniteChain:
    """The lazy walk on tree vertices: hold 1/2, else uniform tree neighbor."""
    n = tree.n_vertices
    if n == 1:
        return validate_chain([[1.0]], ["0"])
    matrix = np.zeros((n, n))
    for v, nbrs in enumerate(tree.neighbor_lists()):
        matrix[v, v] = 0.5
        share = 0.5 / len(nbrs)
        for u in nbrs:
            matrix[v, u] = share
    return validate_chain(matrix, [str(v) for v in range(n)])


def _walk_horizon(tree: DerivationTree, epsilon: float) -> int:
    """Steps between checkpoints so the leaf-conditional law passes the TV gate.

    Scans powers of the explicit walk matrix for the first t at which,
    from every start, the distribution conditioned on the leaf set is
    within epsilon / 2 of uniform. Conditioning preserves convex mixtures
    of starts, so the per-start worst case also covers the off-leaf
    measures seen at later checkpoints.
    """
    chain = tree_walk_chain(tree)
    leaves = np.array(tree.leaves)
    uniform = 1.0 / leaves.size
    target = epsilon / 2.0
    power = chain.matrix.copy()
    for t in range(1, _WALK_ROUND_CAP + 1):
        leaf_mass = power[:, leaves]
        totals = leaf_mass.sum(axis=1)
        if np.all(totals > 0.0):
            conditional = leaf_mass / totals[:, None]
            worst = 0.5 * np.abs(conditional - uniform).sum(axis=1).max()
            if worst <= target:
                return t
        power = power @ chain.matrix
    raise CapExceededError(_WALK_ROUND_CAP, "leaf-conditional TV gate never met")


def _uniform_leaf_indices(tree: DerivationTree, epsilon: float,
                          rng: np.random.Generator, n_samples: int) -> np.ndarray:
    """Vertex indices of n_samples almost-uniform leaves, walked in lock step."""
    if not tree.leaves:
        raise EmptySolutionSetError("the instance has no solutions")
    if tree.n_vertices == 1 or len(tree.leaves) == 1:
        return np.full(n_samples, tree.leaves[0], dtype=np.int64)

    neighbor_lists = tree.neighbor_lists()
    degree = np.array([len(nbrs) for nbrs in neighbor_lists], dtype=np.int64)
    max_deg = int(degree.max())
    # step table: entry j < deg(v) moves to the j-th neighbor, the next
    # deg(v) entries hold, and j is always drawn below 2 deg(v)
    step_to = np.empty((tree.n_vertices, 2 * max_deg), dtype=np.int64)
    for v, nbrs in enumerate(neighbor_lists):
        step_to[v, :] = v
        step_to[v, : len(nbrs)] = nbrs
    two_deg = (2 * degree).astype(np.float64)
    is_leaf = np.zeros(tree.n_vertices, dtype=bool)
    is_leaf[tree.leaves] = True

    horizon = _walk_horizon(tree, epsilon)
    out = np.full(n_samples, -1, dtype=np.int64)
    pending = np.arange(n_samples)
    position = np.zeros(n_samples, dtype=np.int64)  # all walks start at the root

    for _ in range(_WALK_ROUND_CAP):
        if pending.size == 0:
            return out
        for _ in range(horizon):
            j = (rng.random(position.size) * two_deg[position]).astype(np.int64)
            position = step_to[position, j]
        at_leaf = is_leaf[position]
        out[pending[at_leaf]] = position[at_leaf]
        pending = pending[~at_leaf]
        position = position[~at_leaf]
    raise CapExceededError(_WALK_ROUND_CAP, "walk never settled on a leaf")


def almost_uniform_samples(problem: SelfReducibleInstance, epsilon: float,
                           n_samples: int, seed,
                           node_cap: int = NODE_CAP) -> list[tuple[int, ...]]:
    """Draw n_samples solution words almost uniformly; seeded, independent walks."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    tree = build_tree(problem, node_cap)
    rng = np.random.default_rng(seed)
    indices = _uniform_leaf_indices(tree, epsilon, rng, n_samples)
    return [tree.words[int(v)] for v in indices]


def almost_uniform_sample(problem: SelfReducibleInstance, epsilon: float,
                          seed, node_cap: int = NODE_CAP) -> tuple[int, ...]:
    """One almost-uniform solution word."""
    return almost_uniform_samples(problem, epsilon, 1, seed, node_cap)[0]


# -- the approximate counter ----------------------------------------------------

@dataclass(frozen=True)
class CountEstimate:
    estimate: float
    epsilon: float
    delta: float
    samples_per_level: int
    levels: int
    seed: int


def sample_schedule(levels: int, epsilon: float, delta: float) -> int:
    """Chernoff-style per-level sample count: ceil(27 l / eps^2 * ln(2 l / delta)).

    The constant 27 and the log term are engineering margin so that every
    level's fraction lands within its share of the ratio budget with
    probability at least 1 - delta overall.
    """
    if levels == 0:
        return 0
    return math.ceil(27.0 * levels / epsilon**2 * math.log(2.0 * levels / delta))


def approximate_count(problem: SelfReducibleInstance, epsilon: float, delta: float,
                      seed: int, node_cap: int = NODE_CAP) -> CountEstimate:
    """Estimate the solution count from almost-uniform samples.

    Walks one root-leaf path of the derivation structure: at each level the
    fraction of solutions taking each next symbol is estimated by sampling,
    the most-sampled branch is followed, and the estimate multiplies the
    inverse fractions. Levels with a single admissible symbol contribute a
    factor of exactly one without spending samples, so the estimate is
    exact whenever every branch fraction is 0 or 1. Per-level seeds are
    split from the master seed with numpy's SeedSequence.spawn.
    """
    if not 0.0 < epsilon < 1.0 or not 0.0 < delta < 1.0:
        raise ValueError("epsilon and delta must lie in (0, 1)")

    levels = problem.length
    per_level = sample_schedule(levels, epsilon, delta)
    level_seeds = np.random.SeedSequence(seed).spawn(max(levels, 1))

    estimate = 1.0
    instance = problem
    for level in range(levels):
        branching = instance.branches()
        if not branching:
            estimate = 0.0
            break
        if len(branching) == 1:
            instance = branching[0][1]
            continue
        try:
            words = almost_uniform_samples(instance, epsilon / (2.0 * levels),
                                           per_level, level_seeds[level], node_cap)
        except EmptySolutionSetError:
            estimate = 0.0
            break
        symbols = np.array([w[0] for w in words])
        options = [symbol for symbol, _ in branching]
        counts = {symbol: int(np.sum(symbols == symbol)) for symbol in options}
        best = max(options, key=lambda symbol: (counts[symbol], -symbol))
        fraction = counts[best] / per_level
        estimate /= fraction
        instance = dict(branching)[best]
    else:
        if levels == 0 and not problem.atom_test():
            estimate = 0.0

    return CountEstimate(
        estimate=estimate,
        epsilon=epsilon,
        delta=delta,
        samples_per_level=per_level,
        levels=levels,
        seed=seed,
    )


# -- brute-force oracle for the secondary family ---------------------------------

def count_perfect_matchings(biadjacency) -> int:
    """Exact perfect matchings of a bipartite graph (the 0/1 permanent).

    Rows are left vertices, columns right vertices; entry 1 marks an edge.
    Exhaustive row-by-row assignment; exponential, oracle use only.
    """
    A = np.asarray(biadjacency, dtype=int)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("biadjacency must be square for perfect matchings")
    n = A.shape[0]

    def assign(row: int, used: int) -> int:
        if row == n:
            return 1
        total = 0
        for col in range(n):
            if A[row, col] and not used & (1 << col):
                total += assign(row + 1, used | (1 << col))
        return total

    return assign(0, 0)
