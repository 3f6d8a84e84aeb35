"""
Curated example graphs and random generators used by the tests, the CLI
report and the acceptance runs.
"""

import logging
import random
from fractions import Fraction
from typing import List, Optional, Sequence

from errors import GraphValidationError
from graph_core import MetricGraph, bridges, separating_pairs, validate_outer
from homology_jacobian import Marking, cycle_basis

logger = logging.getLogger('outer_space.graph_corpus')
logger.addHandler(logging.NullHandler())

THIRD = Fraction(1, 3)


def theta(a=THIRD, b=THIRD, c=THIRD) -> MetricGraph:
    """Two vertices joined by three parallel edges oriented 0 -> 1."""
    return MetricGraph.build(2, [(0, 1, a), (0, 1, b), (0, 1, c)])


def theta_marking() -> Marking:
    """The basis {e1 - e2, e3 - e2}: fundamental cycles of the tree {e2}."""
    return cycle_basis(theta(), tree_edges=[1])


def banana(*lengths) -> MetricGraph:
    lengths = lengths or (Fraction(1, 2), Fraction(1, 2))
    return MetricGraph.build(2, [(0, 1, l) for l in lengths])


def rose(*lengths) -> MetricGraph:
    """One vertex carrying one loop per length."""
    lengths = lengths or (Fraction(1, 2), Fraction(1, 2))
    return MetricGraph.build(1, [(0, 0, l) for l in lengths])


def dumbbell(first=Fraction(2, 5), bridge=Fraction(1, 5), second=Fraction(2, 5)) -> MetricGraph:
    """Two loops joined by a bridge; edge ids: loop, bridge, loop."""
    return MetricGraph.build(2, [(0, 0, first), (0, 1, bridge), (1, 1, second)])


def looped_banana(l1=Fraction(7, 20), l2=Fraction(7, 20), f1=Fraction(1, 10), f2=Fraction(1, 5)) -> MetricGraph:
    """Loops at two vertices joined by two parallel edges; ids l1, l2, f1, f2."""
    return MetricGraph.build(2, [(0, 0, l1), (1, 1, l2), (0, 1, f1), (0, 1, f2)])


def k4(lengths: Optional[Sequence] = None) -> MetricGraph:
    pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    lengths = lengths or [Fraction(1, 6)] * 6
    return MetricGraph.build(4, [(u, v, l) for (u, v), l in zip(pairs, lengths)])


def cycle_graph(vertex_count: int, lengths: Optional[Sequence] = None) -> MetricGraph:
    lengths = lengths or [Fraction(1, vertex_count)] * vertex_count
    return MetricGraph.build(vertex_count, [(i, (i + 1) % vertex_count, lengths[i])
                                            for i in range(vertex_count)])


def chain_of_loops(count: int = 3) -> MetricGraph:
    """`count` looped vertices in a row joined by bridges; loops come first."""
    share = Fraction(1, 2 * count - 1)
    loops = [(i, i, share) for i in range(count)]
    links = [(i, i + 1, share) for i in range(count - 1)]
    return MetricGraph.build(count, loops + links)


def path_of_two_thetas() -> MetricGraph:
    """Two theta graphs joined by one bridge (edge 6)."""
    share = Fraction(1, 7)
    edges = [(0, 1, share)] * 3 + [(2, 3, share)] * 3 + [(1, 2, share)]
    return MetricGraph.build(4, edges)


# Random generators --------------------------------------------------------------------

def _random_lengths(rng: random.Random, count: int, exact: bool) -> List:
    if exact:
        raw = [Fraction(rng.randint(1, 40)) for _ in range(count)]
    else:
        raw = [rng.uniform(0.05, 1.0) for _ in range(count)]
    total = sum(raw)
    return [r / total for r in raw]


def random_graph(rng: random.Random, vertex_count: int, edge_count: int,
                 loops: bool = True, exact: bool = False) -> MetricGraph:
    """Connected multigraph: a random spanning tree plus random extra edges."""
    if edge_count < vertex_count - 1:
        raise GraphValidationError("too few edges for a connected graph")
    pairs = [(rng.randrange(v), v) for v in range(1, vertex_count)]
    while len(pairs) < edge_count:
        u, v = rng.randrange(vertex_count), rng.randrange(vertex_count)
        if u == v and not loops:
            continue
        pairs.append((u, v))
    rng.shuffle(pairs)
    pairs = [(u, v) if rng.random() < 0.5 else (v, u) for u, v in pairs]
    lengths = _random_lengths(rng, edge_count, exact)
    return MetricGraph.build(vertex_count, [(u, v, l) for (u, v), l in zip(pairs, lengths)])


def random_outer_graph(rng: random.Random, rank: int, max_edges: int = 10,
                       exact: bool = False, attempts: int = 2000) -> MetricGraph:
    """Random graph of the given genus passing the outer-space conditions."""
    for _ in range(attempts):
        vertex_count = rng.randint(1, max(1, min(2 * rank - 2, max_edges - rank + 1)))
        edge_count = vertex_count + rank - 1
        if edge_count > max_edges:
            continue
        g = random_graph(rng, vertex_count, edge_count, exact=exact)
        if validate_outer(g).is_outer_space_point:
            return g
    raise GraphValidationError(f"no outer-space graph of genus {rank} found in {attempts} attempts")


def random_bridgeless_graph(rng: random.Random, rank: int, max_edges: int = 9,
                            exact: bool = False, attempts: int = 2000) -> MetricGraph:
    """Random connected bridgeless graph; valence-2 vertices allowed."""
    for _ in range(attempts):
        vertex_count = rng.randint(1, max(1, max_edges - rank + 1))
        g = random_graph(rng, vertex_count, vertex_count + rank - 1, exact=exact)
        if not bridges(g):
            return g
    raise GraphValidationError(f"no bridgeless graph of genus {rank} found in {attempts} attempts")


def random_three_edge_connected(rng: random.Random, extra_edges: int = 2,
                                exact: bool = False) -> MetricGraph:
    """K4 plus random extra edges; adding edges never lowers edge connectivity."""
    base = k4()
    pairs = list(base.incidences)
    for _ in range(extra_edges):
        pairs.append((rng.randrange(4), rng.randrange(4)))
    lengths = _random_lengths(rng, len(pairs), exact)
    g = MetricGraph.build(4, [(u, v, l) for (u, v), l in zip(pairs, lengths)])
    if bridges(g) or separating_pairs(g):
        raise GraphValidationError("generated graph is not 3-edge-connected")
    return g


def perturbed(rng: random.Random, g: MetricGraph, exact: bool = True) -> MetricGraph:
    """Same graph with fresh random lengths."""
    return g.with_lengths(_random_lengths(rng, g.edge_count, exact))


CURATED = {
    'theta': theta,
    'banana': banana,
    'rose': rose,
    'dumbbell': dumbbell,
    'looped_banana': looped_banana,
    'k4': k4,
    'chain_of_loops': chain_of_loops,
    'path_of_two_thetas': path_of_two_thetas,
}


def polynomial_corpus():
    """Ten small tropical plane polynomials as (j, k, a) term lists."""
    half = Fraction(1, 2)
    return [
        [(1, 0, 0), (0, 1, 0), (0, 0, 0)],
        [(0, 0, 0), (1, 0, 0), (2, 0, 2)],
        [(2, 0, 0), (1, 1, 0), (0, 2, 0)],
        [(0, 0, 0), (1, 0, 1), (0, 1, 1), (2, 0, 1), (1, 1, 3), (0, 2, 1)],
        [(1, 0, 2), (0, 1, -1), (0, 0, 0)],
        [(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 2)],
        [(3, 0, 0), (0, 3, 0), (0, 0, 0)],
        [(0, 0, 0), (2, 1, 1), (1, 2, 1)],
        [(0, 0, 0), (1, 0, -half), (0, 1, -half), (1, 1, -3 * half)],
        [(0, 0, 0), (4, 2, 1)],
    ]
