"""
Metric Graph Module

Oriented metric multigraphs with loops and parallel edges: the outer-space
validity conditions, connectivity queries (bridges, separating pairs),
edge contraction and vertex blow-up, cycle-subgraph enumeration, systole and
normalization.

Edge orientation is data: every edge carries (src, dst) fixed at construction
and every chain coefficient elsewhere in the toolkit is relative to it.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Sequence, Tuple, Union

import networkx as nx

from errors import GraphValidationError

logger = logging.getLogger('outer_space.graph_core')
logger.addHandler(logging.NullHandler())

Length = Union[int, float, Fraction]

# Cycle enumeration is a pruned subset search; beyond this it stops being desk-scale.
MAX_CYCLE_EDGES = 16


@dataclass(frozen=True)
class Edge:
    """One oriented edge of a metric graph."""
    id: int
    src: int
    dst: int
    length: Length

    @property
    def is_loop(self) -> bool:
        return self.src == self.dst


@dataclass(frozen=True)
class MetricGraph:
    """Oriented multigraph with nonnegative edge lengths.

    Edge ids are dense 0..E-1 and stored in id order. Connectivity is not
    enforced here (quotients of disconnected pieces are never built), but
    every operation that needs it checks it.
    """
    vertex_count: int
    edges: Tuple[Edge, ...]

    def __post_init__(self):
        if self.vertex_count < 1:
            raise GraphValidationError("a metric graph needs at least one vertex")
        for position, edge in enumerate(self.edges):
            if edge.id != position:
                raise GraphValidationError(
                    f"edge ids must be dense and ordered: position {position} holds id {edge.id}")
            for end in (edge.src, edge.dst):
                if not 0 <= end < self.vertex_count:
                    raise GraphValidationError(f"edge {edge.id} references missing vertex {end}")
            if edge.length < 0:
                raise GraphValidationError(f"edge {edge.id} has negative length {edge.length}")

    @classmethod
    def build(cls, vertex_count: int, incidences: Iterable[Tuple[int, int, Length]]) -> 'MetricGraph':
        """Create a graph from (src, dst, length) triples; ids follow input order."""
        edges = tuple(Edge(i, int(src), int(dst), length)
                      for i, (src, dst, length) in enumerate(incidences))
        return cls(int(vertex_count), edges)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def lengths(self) -> Tuple[Length, ...]:
        return tuple(edge.length for edge in self.edges)

    @property
    def total_length(self) -> Length:
        return sum(self.lengths)

    @property
    def incidences(self) -> Tuple[Tuple[int, int], ...]:
        """The combinatorial type: (src, dst) per edge, lengths dropped."""
        return tuple((edge.src, edge.dst) for edge in self.edges)

    @property
    def is_exact(self) -> bool:
        return all(isinstance(edge.length, (int, Fraction)) for edge in self.edges)

    def with_lengths(self, lengths: Sequence[Length]) -> 'MetricGraph':
        if len(lengths) != self.edge_count:
            raise GraphValidationError(
                f"expected {self.edge_count} lengths, got {len(lengths)}")
        return MetricGraph.build(self.vertex_count,
                                 ((e.src, e.dst, l) for e, l in zip(self.edges, lengths)))

    def valence(self, vertex: int) -> int:
        """Number of edge ends at a vertex; a loop counts twice."""
        return sum((edge.src == vertex) + (edge.dst == vertex) for edge in self.edges)

    def to_networkx(self, exclude: Iterable[int] = ()) -> nx.MultiGraph:
        """Undirected multigraph view keyed by edge id, all vertices kept."""
        skipped = set(exclude)
        view = nx.MultiGraph()
        view.add_nodes_from(range(self.vertex_count))
        for edge in self.edges:
            if edge.id not in skipped:
                view.add_edge(edge.src, edge.dst, key=edge.id, length=edge.length)
        return view

    def is_positive_length(self) -> bool:
        return all(edge.length > 0 for edge in self.edges)


@dataclass(frozen=True)
class ValidityReport:
    is_connected: bool
    min_valence: int
    separating_edges: FrozenSet[int]
    is_outer_space_point: bool


@dataclass(frozen=True)
class CycleSubgraph:
    """A connected subgraph homotopy equivalent to a circle."""
    edge_ids: Tuple[int, ...]
    total_length: Length

    @property
    def edge_set(self) -> FrozenSet[int]:
        return frozenset(self.edge_ids)


# JSON ---------------------------------------------------------------------

def parse_length(value, exact: bool = False) -> Length:
    """Parse a JSON length; exact mode keeps decimal strings as Fractions."""
    if exact:
        if isinstance(value, float):
            return Fraction(repr(value))
        return Fraction(str(value))
    if isinstance(value, str):
        return float(Fraction(value))
    return float(value)


def format_length(value: Length):
    if isinstance(value, Fraction):
        return str(value)
    return value


def graph_from_dict(data: dict, exact: bool = False) -> MetricGraph:
    """Build a graph from `{"vertices": N, "edges": [{"id", "src", "dst", "length"}]}`."""
    try:
        vertex_count = int(data['vertices'])
        raw_edges = sorted(data['edges'], key=lambda item: int(item['id']))
        edges = tuple(Edge(int(item['id']), int(item['src']), int(item['dst']),
                           parse_length(item.get('length', 1), exact))
                      for item in raw_edges)
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise GraphValidationError(f"malformed graph JSON: {exc}") from exc
    return MetricGraph(vertex_count, edges)


def graph_to_dict(g: MetricGraph) -> dict:
    return {
        'vertices': g.vertex_count,
        'edges': [{'id': e.id, 'src': e.src, 'dst': e.dst, 'length': format_length(e.length)}
                  for e in g.edges],
    }


# Preconditions --------------------------------------------------------------

def is_connected(g: MetricGraph) -> bool:
    return nx.is_connected(g.to_networkx())


def require_connected(g: MetricGraph) -> None:
    if not is_connected(g):
        raise GraphValidationError("operation requires a connected graph")


def require_positive_lengths(g: MetricGraph) -> None:
    for edge in g.edges:
        if edge.length <= 0:
            raise GraphValidationError(
                f"operation requires positive lengths; edge {edge.id} has length {edge.length}")


# Queries --------------------------------------------------------------------

def validate_outer(g: MetricGraph) -> ValidityReport:
    """Check the outer-space conditions: connected, valence >= 3, no separating edge."""
    connected = is_connected(g)
    min_valence = min(g.valence(v) for v in range(g.vertex_count))
    separating = frozenset(bridges(g)) if connected else frozenset()
    valid = connected and min_valence >= 3 and not separating
    logger.debug(f"validate_outer: connected={connected} min_valence={min_valence} "
                 f"bridges={sorted(separating)}")
    return ValidityReport(connected, min_valence, separating, valid)


def genus(g: MetricGraph) -> int:
    """First Betti number |E| - |V| + 1 of a connected graph."""
    require_connected(g)
    return g.edge_count - g.vertex_count + 1


def bridges(g: MetricGraph) -> FrozenSet[int]:
    """Edges whose removal disconnects the graph; loops and parallel edges never are."""
    simple_view = g.to_networkx(exclude=(e.id for e in g.edges if e.is_loop))
    found = set()
    for u, v in nx.bridges(simple_view):
        keys = list(simple_view[u][v])
        if len(keys) == 1:
            found.add(keys[0])
    return frozenset(found)


def separating_pairs(g: MetricGraph) -> FrozenSet[FrozenSet[int]]:
    """Pairs of non-bridge edges whose joint removal disconnects the graph."""
    if bridges(g):
        raise GraphValidationError("separating pairs are defined for bridgeless graphs")
    view = g.to_networkx()
    candidates = [e for e in g.edges if not e.is_loop]
    pairs = set()
    for first, second in combinations(candidates, 2):
        view.remove_edge(first.src, first.dst, key=first.id)
        view.remove_edge(second.src, second.dst, key=second.id)
        if not nx.is_connected(view):
            pairs.add(frozenset((first.id, second.id)))
        view.add_edge(first.src, first.dst, key=first.id)
        view.add_edge(second.src, second.dst, key=second.id)
    return frozenset(pairs)


# Contraction and blow-up ----------------------------------------------------

def contract_edge(g: MetricGraph, edge_id: int) -> Tuple[MetricGraph, Dict[int, int]]:
    """Merge the endpoints of a non-loop edge and drop it.

    Returns:
        (contracted graph, mapping old edge id -> new edge id); ids are
        re-densified in their original order.
    """
    if not 0 <= edge_id < g.edge_count:
        raise GraphValidationError(f"no edge with id {edge_id}")
    target = g.edges[edge_id]
    if target.is_loop:
        raise GraphValidationError(f"edge {edge_id} is a loop and cannot be contracted")
    keep, gone = min(target.src, target.dst), max(target.src, target.dst)

    def relabel(vertex: int) -> int:
        if vertex == gone:
            vertex = keep
        return vertex - 1 if vertex > gone else vertex

    incidences = []
    mapping = {}
    for edge in g.edges:
        if edge.id == edge_id:
            continue
        mapping[edge.id] = len(incidences)
        incidences.append((relabel(edge.src), relabel(edge.dst), edge.length))
    return MetricGraph.build(g.vertex_count - 1, incidences), mapping


def contract_edges(g: MetricGraph, edge_ids: Iterable[int]) -> Tuple[MetricGraph, Dict[int, int]]:
    """Contract a forest of edges one at a time, composing the id mappings."""
    current = g
    mapping = {e.id: e.id for e in g.edges}
    for original in sorted(set(edge_ids)):
        step_id = mapping.pop(original)
        current, step = contract_edge(current, step_id)
        mapping = {old: step[new] for old, new in mapping.items()}
    return current, mapping


def blow_up_vertex(g: MetricGraph, vertex: int, moved_ends: Iterable[Tuple[int, str]],
                   length: Length = 0) -> MetricGraph:
    """Split a vertex in two, joined by a new last edge from `vertex` to a new vertex.

    Args:
        g: graph to expand
        vertex: vertex to split
        moved_ends: (edge id, 'src' | 'dst') edge ends that move to the new vertex
        length: length of the new edge

    Returns:
        The expanded graph; contracting its last edge gives back `g`.
    """
    new_vertex = g.vertex_count
    moved = set(moved_ends)
    incidences = []
    for edge in g.edges:
        src, dst = edge.src, edge.dst
        if (edge.id, 'src') in moved:
            if src != vertex:
                raise GraphValidationError(f"edge {edge.id} does not start at vertex {vertex}")
            src = new_vertex
        if (edge.id, 'dst') in moved:
            if dst != vertex:
                raise GraphValidationError(f"edge {edge.id} does not end at vertex {vertex}")
            dst = new_vertex
        incidences.append((src, dst, edge.length))
    incidences.append((vertex, new_vertex, length))
    return MetricGraph.build(g.vertex_count + 1, incidences)


# Cycles ---------------------------------------------------------------------

@lru_cache(maxsize=256)
def cycle_edge_sets(vertex_count: int, incidences: Tuple[Tuple[int, int], ...]) -> Tuple[Tuple[int, ...], ...]:
    """All edge sets of cycle subgraphs of a combinatorial type.

    Depth-first search over edge subsets in id order, pruning as soon as a
    vertex exceeds subgraph-valence 2. Loops count twice.
    """
    edge_count = len(incidences)
    if edge_count > MAX_CYCLE_EDGES:
        raise GraphValidationError(
            f"cycle enumeration is limited to {MAX_CYCLE_EDGES} edges, got {edge_count}")
    valence = [0] * vertex_count
    chosen: List[int] = []
    found: List[Tuple[int, ...]] = []

    def is_single_cycle() -> bool:
        if any(d not in (0, 2) for d in valence):
            return False
        view = nx.MultiGraph()
        for e in chosen:
            view.add_edge(*incidences[e], key=e)
        return nx.is_connected(view)

    def search(position: int) -> None:
        if position == edge_count:
            if chosen and is_single_cycle():
                found.append(tuple(chosen))
            return
        src, dst = incidences[position]
        valence[src] += 1
        valence[dst] += 1
        if valence[src] <= 2 and valence[dst] <= 2:
            chosen.append(position)
            search(position + 1)
            chosen.pop()
        valence[src] -= 1
        valence[dst] -= 1
        search(position + 1)

    search(0)
    return tuple(found)


def enumerate_cycles(g: MetricGraph) -> List[CycleSubgraph]:
    """All cycle subgraphs, shortest first, ties broken by edge-id tuple."""
    require_positive_lengths(g)
    cycles = [CycleSubgraph(ids, sum(g.edges[e].length for e in ids))
              for ids in cycle_edge_sets(g.vertex_count, g.incidences)]
    cycles.sort(key=lambda c: (c.total_length, c.edge_ids))
    return cycles


def systole(g: MetricGraph) -> Length:
    """Length of the shortest cycle subgraph."""
    if genus(g) < 1:
        raise GraphValidationError("a tree has no cycles, so no systole")
    return enumerate_cycles(g)[0].total_length


def normalize(g: MetricGraph) -> MetricGraph:
    """Rescale lengths so they sum to 1."""
    total = g.total_length
    if total <= 0:
        raise GraphValidationError("cannot normalize a graph of zero total length")
    return g.with_lengths([length / total for length in g.lengths])
