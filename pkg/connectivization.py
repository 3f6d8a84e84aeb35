"""
Connectivization Module

C1-sets of bridgeless graphs, 2- and 3-edge connectivization with lengths
transported by C1-set sums, cyclic equivalence of metric graphs and the
tropical Torelli comparison built on them.
"""

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, FrozenSet, List, Optional, Tuple

import networkx as nx

from errors import GraphValidationError, InternalConsistencyError
from graph_core import (MAX_CYCLE_EDGES, MetricGraph, bridges, contract_edge, cycle_edge_sets,
                        require_connected, require_positive_lengths, separating_pairs)

logger = logging.getLogger('outer_space.connectivization')
logger.addHandler(logging.NullHandler())

# Exhaustive C1-set search visits every edge subset.
MAX_EXHAUSTIVE_EDGES = 12


@dataclass(frozen=True)
class Connectivization:
    """A 3-edge-connected quotient with its C1-set correspondence.

    Attributes:
        quotient: the 3-edge-connected graph, lengths summed over C1-sets
        correspondence: C1-set of `source` (original edge ids) -> quotient edge id
        source: the graph that was connectivized
    """
    quotient: MetricGraph
    correspondence: Dict[FrozenSet[int], int] = field(hash=False)
    source: MetricGraph

    def c1_set_of(self, quotient_edge: int) -> FrozenSet[int]:
        for c1_set, edge_id in self.correspondence.items():
            if edge_id == quotient_edge:
                return c1_set
        raise KeyError(quotient_edge)


@dataclass(frozen=True)
class EdgeBijection:
    """Edge i of the first graph goes to edge mapping[i] of the second."""
    mapping: Tuple[int, ...]

    def __call__(self, edge_id: int) -> int:
        return self.mapping[edge_id]

    def to_dict(self) -> Dict[str, int]:
        return {str(i): j for i, j in enumerate(self.mapping)}


@dataclass(frozen=True)
class TorelliResult:
    equal: bool
    witness: Optional[EdgeBijection]
    quotients: Tuple[Connectivization, Connectivization]

    def __bool__(self) -> bool:
        return self.equal


def _bridgeless_view(g: MetricGraph, removed=()) -> bool:
    view = g.to_networkx(exclude=set(removed) | {e.id for e in g.edges if e.is_loop})
    return not any(True for _ in nx.bridges(view))


def _is_circle(g: MetricGraph) -> bool:
    if g.edge_count == 0:
        return False
    return (all(g.valence(v) == 2 for v in range(g.vertex_count))
            and nx.is_connected(g.to_networkx()))


def contracted_complement(g: MetricGraph, s) -> MetricGraph:
    """Collapse every component of g - s to a point and keep the edges of s.

    Components are numbered by their smallest vertex; the kept edges are
    re-densified in id order and keep their lengths.
    """
    chosen = sorted(set(s))
    if not chosen:
        raise GraphValidationError("contracted complement needs a nonempty edge set")
    if any(not 0 <= e < g.edge_count for e in chosen):
        raise GraphValidationError(f"edge set {chosen} is not a subset of the graph's edges")
    components = sorted((sorted(c) for c in nx.connected_components(g.to_networkx(exclude=chosen))),
                        key=lambda c: c[0])
    owner = {v: index for index, component in enumerate(components) for v in component}
    return MetricGraph.build(len(components),
                             ((owner[g.edges[e].src], owner[g.edges[e].dst], g.edges[e].length)
                              for e in chosen))


def is_c1_set(g: MetricGraph, s) -> bool:
    """True iff collapsing g - s leaves a circle and g - s has no bridge."""
    if bridges(g):
        raise GraphValidationError("C1-sets are defined for bridgeless graphs")
    if not s:
        return False
    return _is_circle(contracted_complement(g, s)) and _bridgeless_view(g, s)


def _c1_sets_exhaustive(g: MetricGraph) -> List[FrozenSet[int]]:
    if g.edge_count > MAX_EXHAUSTIVE_EDGES:
        raise GraphValidationError(
            f"exhaustive C1-set search is limited to {MAX_EXHAUSTIVE_EDGES} edges")
    found = []
    for size in range(1, g.edge_count + 1):
        for subset in combinations(range(g.edge_count), size):
            if is_c1_set(g, subset):
                found.append(frozenset(subset))
    return found


def c1_sets(g: MetricGraph, exhaustive: bool = False) -> List[FrozenSet[int]]:
    """All C1-sets of a connected bridgeless graph, ordered by smallest edge id.

    By default the sets are the classes of "equal or a separating pair",
    each confirmed with is_c1_set; `exhaustive` scans every edge subset instead.

    Raises:
        GraphValidationError: g is disconnected or has a bridge
        InternalConsistencyError: some edge lies in no C1-set
    """
    require_connected(g)
    if bridges(g):
        raise GraphValidationError("C1-sets are defined for bridgeless graphs")
    if exhaustive:
        found = _c1_sets_exhaustive(g)
    else:
        classes = nx.utils.UnionFind(range(g.edge_count))
        for pair in separating_pairs(g):
            classes.union(*pair)
        found = [frozenset(c) for c in classes.to_sets()]
        for candidate in found:
            if not is_c1_set(g, candidate):
                raise InternalConsistencyError(
                    f"edge class {sorted(candidate)} is not a C1-set")
    covered = [e for e in range(g.edge_count) if sum(e in c for c in found) != 1]
    if covered:
        raise InternalConsistencyError(f"edges {covered} are not in exactly one C1-set")
    return sorted(found, key=min)


def _two_edge_connectivize_tracked(g: MetricGraph) -> Tuple[MetricGraph, Dict[int, int]]:
    require_connected(g)
    current = g
    tracking = {e.id: e.id for e in g.edges}
    while True:
        found = bridges(current)
        if not found:
            return current, tracking
        target = min(found)
        logger.debug(f"two_edge_connectivize: contracting bridge {target}")
        current, step = contract_edge(current, target)
        tracking = {old: step[new] for old, new in tracking.items() if new != target}


def two_edge_connectivize(g: MetricGraph) -> MetricGraph:
    """Contract bridges until none remain; genus is unchanged."""
    return _two_edge_connectivize_tracked(g)[0]


def three_edge_connectivize(g: MetricGraph, rng: Optional[random.Random] = None) -> Connectivization:
    """3-edge connectivization with C1-set lengths.

    After removing bridges, one edge of a separating pair is contracted until
    no pair remains: the smaller edge of the lexicographically smallest pair,
    or a random pair and edge when `rng` is given. A circle ends as a single
    loop. Each surviving edge represents exactly one C1-set of `g` and gets
    the sum of that set's lengths.
    """
    current, tracking = _two_edge_connectivize_tracked(g)
    reverse = {new: old for old, new in tracking.items()}
    classes = [frozenset(reverse[e] for e in c) for c in c1_sets(current)]

    while True:
        pairs = sorted(tuple(sorted(p)) for p in separating_pairs(current))
        if not pairs:
            break
        if rng is None:
            target = pairs[0][0]
        else:
            target = rng.choice(rng.choice(pairs))
        logger.debug(f"three_edge_connectivize: contracting {target} of {len(pairs)} pairs")
        current, step = contract_edge(current, target)
        tracking = {old: step[new] for old, new in tracking.items() if new != target}

    survivors = {new: old for old, new in tracking.items()}
    correspondence = {}
    lengths = [None] * current.edge_count
    for c1_set in classes:
        represented = [new for new, old in survivors.items() if old in c1_set]
        if len(represented) != 1:
            raise InternalConsistencyError(
                f"C1-set {sorted(c1_set)} has {len(represented)} surviving edges")
        correspondence[c1_set] = represented[0]
        lengths[represented[0]] = sum(g.edges[e].length for e in sorted(c1_set))
    if any(length is None for length in lengths):
        raise InternalConsistencyError("a quotient edge represents no C1-set")
    quotient = current.with_lengths(lengths)
    logger.info(f"three_edge_connectivize: {g.edge_count} edges -> {quotient.edge_count}")
    return Connectivization(quotient, correspondence, g)


def _length_key(length):
    if isinstance(length, (int, Fraction)):
        return Fraction(length)
    return round(float(length), 12)


def cyclically_equivalent(g1: MetricGraph, g2: MetricGraph) -> Optional[EdgeBijection]:
    """A length-preserving edge bijection carrying cycle subgraphs onto cycle subgraphs.

    Backtracks over bijections within equal-length groups and rejects a
    partial assignment as soon as a fully assigned cycle of g1 lands outside
    the cycles of g2. Exact lengths compare exactly; floats at 12 decimals.
    """
    require_positive_lengths(g1)
    require_positive_lengths(g2)
    if g1.edge_count != g2.edge_count:
        return None
    if g1.edge_count > MAX_CYCLE_EDGES:
        raise GraphValidationError(f"cyclic equivalence is limited to {MAX_CYCLE_EDGES} edges")
    keys1 = [_length_key(l) for l in g1.lengths]
    keys2 = [_length_key(l) for l in g2.lengths]
    if sorted(keys1) != sorted(keys2):
        return None
    cycles1 = [frozenset(c) for c in cycle_edge_sets(g1.vertex_count, g1.incidences)]
    cycles2 = {frozenset(c) for c in cycle_edge_sets(g2.vertex_count, g2.incidences)}
    if len(cycles1) != len(cycles2):
        return None

    order = sorted(range(g1.edge_count), key=lambda e: (keys1.count(keys1[e]), e))
    position = {e: i for i, e in enumerate(order)}
    completed_at: Dict[int, List[FrozenSet[int]]] = {}
    for cycle in cycles1:
        completed_at.setdefault(max(position[e] for e in cycle), []).append(cycle)

    mapping: Dict[int, int] = {}
    used = set()

    def assign(index: int) -> bool:
        if index == len(order):
            return True
        edge = order[index]
        for image in range(g2.edge_count):
            if image in used or keys2[image] != keys1[edge]:
                continue
            mapping[edge] = image
            if all(frozenset(mapping[e] for e in cycle) in cycles2
                   for cycle in completed_at.get(index, ())):
                used.add(image)
                if assign(index + 1):
                    return True
                used.discard(image)
            del mapping[edge]
        return False

    if not assign(0):
        return None
    return EdgeBijection(tuple(mapping[e] for e in range(g1.edge_count)))


def tropical_torelli_equal(g1: MetricGraph, g2: MetricGraph) -> TorelliResult:
    """Compare tropical Jacobians through cyclic equivalence of 3-edge connectivizations."""
    first = three_edge_connectivize(g1)
    second = three_edge_connectivize(g2)
    witness = cyclically_equivalent(first.quotient, second.quotient)
    return TorelliResult(witness is not None, witness, (first, second))
