"""
Outer Metrics Module

Points of outer space in simplex coordinates and the metrics built on them:
the simplicial distance d0, the complete distances d1, d2, dinf (reported as
lower/upper intervals), and the Riemannian tensors ds0, ds2 and ds2_eps.

A simplex is a marked combinatorial type (SimplexCell). Coordinates are edge
lengths summing to 1; intrinsic coordinates drop the last edge, so the flat
simplex metric has Gram matrix I + 11^T. Faces shared by two simplices are
found by contracting zero-length forests and matching the marked quotients.
"""

import logging
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from networkx.algorithms.isomorphism import MultiGraphMatcher

from errors import GraphValidationError, NoConnectingPathError, ParameterError
from graph_core import (MetricGraph, blow_up_vertex, contract_edges, cycle_edge_sets, genus,
                        validate_outer)
from homology_jacobian import (Marking, PeriodMatrix, cycle_basis, period_matrix,
                               validate_marking)
from spd_geometry import d_inv

logger = logging.getLogger('outer_space.outer_metrics')
logger.addHandler(logging.NullHandler())

DS0 = 'ds0'
DS2 = 'ds2'
DS2_EPS = 'ds2_eps'
TENSOR_KINDS = (DS0, DS2, DS2_EPS)

SUM_TOL = 1e-12
CLOSURE_TOL = 1e-9
MAX_ROUTE_CELLS = 2000


# ds2_eps cutoff ---------------------------------------------------------------

def validate_eps(eps: float, rank: int) -> float:
    """Cutoff scale must satisfy 0 < eps < 1/(6n) for genus n."""
    if eps is None or not 0 < eps < 1.0 / (6 * rank):
        raise ParameterError(f"eps must lie in (0, {1.0 / (6 * rank):.6g}) for genus {rank}, got {eps}")
    return float(eps)


def cutoff_length(length: float, eps: float) -> float:
    """Smoothed cycle length: l below eps, eps above 2 eps, a C1 cubic in between."""
    if length <= eps:
        return length
    if length >= 2 * eps:
        return eps
    s = (length - eps) / eps
    return eps * (1 + s * (1 - s) ** 2)


def cutoff_derivative(length: float, eps: float) -> float:
    if length <= eps:
        return 1.0
    if length >= 2 * eps:
        return 0.0
    s = (length - eps) / eps
    return (1 - s) * (1 - 3 * s)


# Simplices and points -----------------------------------------------------------

class SimplexCell:
    """Open simplex of a marked combinatorial type.

    Args:
        graph: the combinatorial type; its lengths are ignored
        marking: homology marking (the fundamental-cycle basis if omitted)
        require_outer: reject types with low valence or a separating edge
    """

    def __init__(self, graph: MetricGraph, marking: Optional[Marking] = None,
                 require_outer: bool = True):
        self.graph = graph
        self.marking = marking if marking is not None else cycle_basis(graph)
        validate_marking(graph, self.marking)
        if require_outer and not validate_outer(graph.with_lengths([1] * graph.edge_count)).is_outer_space_point:
            raise GraphValidationError("combinatorial type is not a point type of outer space")
        self.edge_count = graph.edge_count
        self.rank = genus(graph)
        if self.edge_count < 2:
            raise GraphValidationError("a simplex needs at least two edges")
        self.dimension = self.edge_count - 1

        self.basis = self.marking.as_array().astype(float)
        self.edge_forms = np.einsum('ae,be->eab', self.basis, self.basis)
        self.directions = self.edge_forms[:-1] - self.edge_forms[-1]
        self.flat_gram = np.eye(self.dimension) + np.ones((self.dimension, self.dimension))

        cycles = cycle_edge_sets(graph.vertex_count, graph.incidences)
        self.cycles: Tuple[FrozenSet[int], ...] = tuple(frozenset(c) for c in cycles)
        self.cycle_members = np.zeros((len(cycles), self.edge_count))
        for row, cycle in enumerate(cycles):
            self.cycle_members[row, list(cycle)] = 1.0
        self.cycle_gradients = self.cycle_members[:, :-1] - self.cycle_members[:, -1:]

    @property
    def key(self) -> Tuple:
        return self.graph.vertex_count, self.graph.incidences, self.marking.basis

    def same_type(self, other: 'SimplexCell') -> bool:
        return self.key == other.key

    def check_closure(self, x: Sequence[float]) -> np.ndarray:
        """Coordinates in the closure of the simplex away from missing faces."""
        coords = np.asarray(x, dtype=float)
        if coords.shape != (self.edge_count,):
            raise GraphValidationError(f"expected {self.edge_count} coordinates, got {coords.shape}")
        if np.any(coords < -CLOSURE_TOL) or abs(coords.sum() - 1.0) > CLOSURE_TOL:
            raise GraphValidationError(f"coordinates {coords.tolist()} are not in the closed simplex")
        if np.any(self.cycle_members @ coords <= 0):
            raise GraphValidationError("point lies on a missing face: some cycle has length 0")
        return coords

    def period(self, x: Sequence[float]) -> np.ndarray:
        return np.einsum('e,eab->ab', np.asarray(x, dtype=float), self.edge_forms)

    def tensor_ds0(self, x=None) -> np.ndarray:
        return self.flat_gram.copy()

    def tensor_ds2(self, x: Sequence[float]) -> np.ndarray:
        """Flat metric plus the pullback of Tr((P^-1 dP)^2) under the period map."""
        coords = self.check_closure(x)
        period = self.period(coords)
        solved = np.linalg.solve(period[None, :, :], self.directions)
        pullback = np.einsum('iab,jba->ij', solved, solved)
        return self.flat_gram + (pullback + pullback.T) / 2

    def tensor_ds2_eps(self, x: Sequence[float], eps: float) -> np.ndarray:
        """Flat metric plus sum over cycles of (grad l_eps / l_eps)^2."""
        eps = validate_eps(eps, self.rank)
        coords = self.check_closure(x)
        lengths = self.cycle_members @ coords
        weights = np.array([cutoff_derivative(l, eps) / cutoff_length(l, eps) for l in lengths])
        scaled = self.cycle_gradients * weights[:, None]
        return self.flat_gram + scaled.T @ scaled

    def tensor(self, x: Sequence[float], kind: str = DS2, eps: Optional[float] = None) -> np.ndarray:
        if kind == DS0:
            self.check_closure(x)
            return self.tensor_ds0()
        if kind == DS2:
            return self.tensor_ds2(x)
        if kind == DS2_EPS:
            return self.tensor_ds2_eps(x, eps)
        raise ParameterError(f"unknown tensor kind {kind!r}; expected one of {TENSOR_KINDS}")

    def point(self, coordinates: Sequence[float]) -> 'SimplexPoint':
        return SimplexPoint(self, tuple(float(c) for c in coordinates))

    def __repr__(self) -> str:
        return f"SimplexCell(edges={self.edge_count}, genus={self.rank})"


@dataclass
class SimplexPoint:
    """A point of an open simplex: positive edge lengths summing to 1."""
    cell: SimplexCell
    coordinates: Tuple[float, ...]

    def __post_init__(self):
        coords = np.asarray(self.coordinates, dtype=float)
        if coords.shape != (self.cell.edge_count,):
            raise GraphValidationError(
                f"expected {self.cell.edge_count} coordinates, got {len(self.coordinates)}")
        if np.any(coords <= 0):
            raise GraphValidationError("simplex points need strictly positive coordinates")
        if abs(coords.sum() - 1.0) > SUM_TOL * max(1, self.cell.edge_count):
            raise GraphValidationError(f"coordinates sum to {coords.sum()!r}, not 1")

    @classmethod
    def from_graph(cls, g: MetricGraph, marking: Optional[Marking] = None) -> 'SimplexPoint':
        """The point whose coordinates are the (normalized) edge lengths of g."""
        total = float(g.total_length)
        return SimplexCell(g, marking).point([float(l) / total for l in g.lengths])

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coordinates, dtype=float)

    @property
    def metric_graph(self) -> MetricGraph:
        return self.cell.graph.with_lengths(list(self.coordinates))


def period_map(p: SimplexPoint) -> PeriodMatrix:
    """Period matrix of the marked metric graph at p."""
    return period_matrix(p.metric_graph, p.cell.marking)


def tensor_ds2(p: SimplexPoint) -> np.ndarray:
    return p.cell.tensor_ds2(p.as_array())


def tensor_ds2_eps(p: SimplexPoint, eps: float) -> np.ndarray:
    return p.cell.tensor_ds2_eps(p.as_array(), eps)


def d0_simplex(p: SimplexPoint, q: SimplexPoint) -> float:
    """Euclidean distance in the standard simplex (vertices are sqrt(2) apart)."""
    if not p.cell.same_type(q.cell):
        raise GraphValidationError("d0_simplex needs two points of the same marked simplex")
    return float(np.linalg.norm(p.as_array() - q.as_array()))


# Faces ----------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Face:
    """Face of a simplex where `zero_edges` have length 0.

    Attributes:
        survivors: cell edge ids in the order of the contracted graph's edges
    """
    cell: SimplexCell
    zero_edges: FrozenSet[int]
    graph: MetricGraph
    survivors: Tuple[int, ...]

    @property
    def columns(self) -> np.ndarray:
        return self.cell.basis[:, list(self.survivors)]

    def embed(self, f: Sequence[float]) -> np.ndarray:
        """Cell coordinates of a face point given on the surviving edges."""
        x = np.zeros(self.cell.edge_count)
        x[list(self.survivors)] = f
        return x

    def signature(self) -> Tuple:
        columns = sorted(_normalized_column(c) for c in self.columns.T)
        degrees = sorted(self.graph.valence(v) for v in range(self.graph.vertex_count))
        return self.graph.vertex_count, self.graph.edge_count, tuple(degrees), tuple(columns)


@dataclass(frozen=True)
class FaceMatch:
    """A face common to two simplices; `edge_map` sends cell_a edge ids to cell_b edge ids."""
    face_a: Face
    face_b: Face
    edge_map: Dict[int, int] = field(hash=False)


def _normalized_column(column: np.ndarray) -> Tuple[int, ...]:
    values = tuple(int(round(v)) for v in column)
    for v in values:
        if v:
            return values if v > 0 else tuple(-c for c in values)
    return values


def face_graph(cell: SimplexCell, zero_edges) -> Face:
    """Contract a zero-length forest; a cycle among `zero_edges` is a missing face."""
    zeros = frozenset(zero_edges)
    contracted, mapping = contract_edges(cell.graph, zeros)
    survivors = tuple(old for old, _ in sorted(mapping.items(), key=lambda item: item[1]))
    return Face(cell, zeros, contracted, survivors)


def _face_view(face: Face) -> nx.MultiGraph:
    view = nx.MultiGraph()
    view.add_nodes_from(range(face.graph.vertex_count))
    columns = face.columns
    for edge in face.graph.edges:
        view.add_edge(edge.src, edge.dst, key=edge.id,
                      column=_normalized_column(columns[:, edge.id]))
    return view


def _parallel_columns(first: dict, second: dict) -> bool:
    return (sorted(a['column'] for a in first.values()) ==
            sorted(b['column'] for b in second.values()))


def faces_match(face_a: Face, face_b: Face) -> Optional[Dict[int, int]]:
    """Edge bijection identifying two faces as the same marked graph, if any.

    The vertex isomorphism fixes each edge's orientation sign s, and the
    marking columns must agree as column_b = s * column_a.
    """
    if face_a.signature() != face_b.signature():
        return None
    columns_a = np.rint(face_a.columns).astype(int)
    columns_b = np.rint(face_b.columns).astype(int)
    matcher = MultiGraphMatcher(_face_view(face_a), _face_view(face_b), edge_match=_parallel_columns)
    for vertex_map in matcher.isomorphisms_iter():
        used = set()
        edge_map = {}
        for edge in face_a.graph.edges:
            for image in face_b.graph.edges:
                if image.id in used:
                    continue
                ends = (vertex_map[edge.src], vertex_map[edge.dst])
                if edge.is_loop:
                    if not image.is_loop or image.src != ends[0]:
                        continue
                    signs = (1, -1)
                elif ends == (image.src, image.dst):
                    signs = (1,)
                elif ends == (image.dst, image.src):
                    signs = (-1,)
                else:
                    continue
                if any(np.array_equal(columns_b[:, image.id], s * columns_a[:, edge.id]) for s in signs):
                    used.add(image.id)
                    edge_map[face_a.survivors[edge.id]] = face_b.survivors[image.id]
                    break
            else:
                break
        if len(edge_map) == face_a.graph.edge_count:
            return edge_map
    return None


def _faces(cell: SimplexCell) -> Dict[int, List[Face]]:
    by_size: Dict[int, List[Face]] = {}
    for size in range(cell.edge_count):
        for zeros in combinations(range(cell.edge_count), size):
            try:
                face = face_graph(cell, zeros)
            except GraphValidationError:
                continue
            by_size.setdefault(cell.edge_count - size, []).append(face)
    return by_size


def shared_faces(cell_a: SimplexCell, cell_b: SimplexCell) -> List[FaceMatch]:
    """The largest faces common to the closures of two simplices."""
    faces_a, faces_b = _faces(cell_a), _faces(cell_b)
    for edges in sorted(set(faces_a) & set(faces_b), reverse=True):
        matches = []
        buckets: Dict[Tuple, List[Face]] = {}
        for face in faces_b[edges]:
            buckets.setdefault(face.signature(), []).append(face)
        for face in faces_a[edges]:
            for other in buckets.get(face.signature(), ()):
                edge_map = faces_match(face, other)
                if edge_map is not None:
                    matches.append(FaceMatch(face, other, edge_map))
        if matches:
            logger.debug(f"shared_faces: {len(matches)} faces with {edges} edges")
            return matches
    return []


def simplex_coordinate_descent(objective: Callable[[np.ndarray], float], x0: Sequence[float],
                               step: float = 0.05, min_step: float = 1e-7,
                               max_sweeps: int = 200, floor: float = 1e-9):
    """Minimize over the simplex by moving mass between pairs of coordinates.

    Only improving moves are accepted, so the objective never increases; the
    step halves after a sweep without improvement.

    Returns:
        (best point, best value, value after each sweep)
    """
    x = np.asarray(x0, dtype=float).copy()
    best = objective(x)
    history = [best]
    pairs = [(i, j) for i in range(len(x)) for j in range(len(x)) if i != j]
    for _ in range(max_sweeps):
        improved = False
        for i, j in pairs:
            delta = min(step, x[j] - floor)
            if delta <= 0:
                continue
            trial = x.copy()
            trial[i] += delta
            trial[j] -= delta
            value = objective(trial)
            if value < best:
                x, best, improved = trial, value, True
        history.append(best)
        if not improved:
            step /= 2
            if step < min_step:
                break
    return x, best, history


# Paths and the d-metrics -------------------------------------------------------------

@dataclass
class PathLeg:
    """Straight segment inside the closure of one simplex."""
    cell: SimplexCell
    start: np.ndarray
    end: np.ndarray

    def __post_init__(self):
        self.start = self.cell.check_closure(self.start)
        self.end = self.cell.check_closure(self.end)

    @property
    def d0_length(self) -> float:
        return float(np.linalg.norm(self.end - self.start))


@dataclass
class PLPath:
    """Piecewise-linear path; consecutive legs meet at the same point of outer space."""
    legs: Tuple[PathLeg, ...]

    def __post_init__(self):
        self.legs = tuple(self.legs)
        if not self.legs:
            raise GraphValidationError("a path needs at least one leg")
        for before, after in zip(self.legs, self.legs[1:]):
            if before.cell.same_type(after.cell):
                joined = np.allclose(before.end, after.start, atol=CLOSURE_TOL)
            else:
                joined = np.allclose(before.cell.period(before.end), after.cell.period(after.start),
                                     atol=CLOSURE_TOL)
            if not joined:
                raise GraphValidationError("consecutive path legs do not meet")

    @classmethod
    def through(cls, cell: SimplexCell, nodes: Sequence[Sequence[float]]) -> 'PLPath':
        return cls(tuple(PathLeg(cell, a, b) for a, b in zip(nodes, nodes[1:])))

    @classmethod
    def straight(cls, p: SimplexPoint, q: SimplexPoint) -> 'PLPath':
        if not p.cell.same_type(q.cell):
            raise GraphValidationError("a straight path needs both ends in one simplex")
        return cls.through(p.cell, [p.as_array(), q.as_array()])

    @property
    def d0_length(self) -> float:
        return sum(leg.d0_length for leg in self.legs)

    def starts_at(self, p: SimplexPoint) -> bool:
        first = self.legs[0]
        return first.cell.same_type(p.cell) and np.allclose(first.start, p.as_array(), atol=CLOSURE_TOL)

    def ends_at(self, q: SimplexPoint) -> bool:
        last = self.legs[-1]
        return last.cell.same_type(q.cell) and np.allclose(last.end, q.as_array(), atol=CLOSURE_TOL)


@dataclass(frozen=True)
class MetricInterval:
    lower: float
    upper: float

    def to_dict(self) -> dict:
        return {'lower': self.lower, 'upper': self.upper}


@dataclass(frozen=True)
class D0Bound:
    value: float
    path: PLPath = field(compare=False)


def _matched_embedding(match: FaceMatch) -> Callable[[np.ndarray], np.ndarray]:
    """Cell-b coordinates of a face point given on face_a's surviving edges."""
    order_b = [match.edge_map[e] for e in match.face_a.survivors]

    def embed(f: np.ndarray) -> np.ndarray:
        point = np.zeros(match.face_b.cell.edge_count)
        point[order_b] = f
        return point
    return embed


def _face_start(values: np.ndarray) -> np.ndarray:
    start = np.maximum(values, 1e-9)
    return start / start.sum()


def _route_chain(matches: Sequence[FaceMatch], p: SimplexPoint, q: SimplexPoint,
                 rounds: int = 4) -> D0Bound:
    """Shortest route found through a chain of faces, one face point per match.

    Face points are improved block by block; each block move only keeps
    improvements, so the route length never increases.
    """
    x, y = p.as_array(), q.as_array()
    enter = [m.face_a.embed for m in matches]
    leave = [_matched_embedding(m) for m in matches]
    count = len(matches)

    def total(fs: List[np.ndarray]) -> float:
        length = np.linalg.norm(x - enter[0](fs[0])) + np.linalg.norm(leave[-1](fs[-1]) - y)
        for i in range(count - 1):
            length += np.linalg.norm(leave[i](fs[i]) - enter[i + 1](fs[i + 1]))
        return float(length)

    uniform = [np.full(len(m.face_a.survivors), 1.0 / len(m.face_a.survivors)) for m in matches]
    last = matches[-1]
    from_p = list(uniform)
    from_p[0] = _face_start(x[list(matches[0].face_a.survivors)])
    from_q = list(uniform)
    from_q[-1] = _face_start(y[[last.edge_map[e] for e in last.face_a.survivors]])

    best = None
    for fs in (from_p, from_q):
        fs = list(fs)
        value = total(fs)
        for _ in range(rounds if count > 1 else 1):
            before = value
            for i in range(count):
                def objective(f: np.ndarray, i=i) -> float:
                    return total(fs[:i] + [f] + fs[i + 1:])
                fs[i], value, _ = simplex_coordinate_descent(objective, fs[i])
            if value >= before:
                break
        if best is None or value < best[1]:
            best = (fs, value)
    fs = best[0]

    legs = [PathLeg(p.cell, x, enter[0](fs[0]))]
    for i in range(count - 1):
        legs.append(PathLeg(matches[i].face_b.cell, leave[i](fs[i]), enter[i + 1](fs[i + 1])))
    legs.append(PathLeg(q.cell, leave[-1](fs[-1]), y))
    path = PLPath(tuple(legs))
    return D0Bound(path.d0_length, path)


def _route_through(match: FaceMatch, p: SimplexPoint, q: SimplexPoint) -> D0Bound:
    return _route_chain([match], p, q)


def adjacent_cells(cell: SimplexCell) -> Iterator[SimplexCell]:
    """Simplices sharing a codimension-one face with `cell`.

    Each non-loop edge is contracted and every vertex of the face that can
    be split is blown up in all ways leaving both halves with two or more
    edge ends. Types with a separating edge are skipped; `cell` itself and
    repeats can appear.
    """
    for edge in cell.graph.edges:
        if edge.is_loop:
            continue
        try:
            face = face_graph(cell, {edge.id})
            rows = np.rint(face.columns).astype(int).tolist()
            face_cell = SimplexCell(face.graph, Marking.from_rows(rows), require_outer=False)
        except GraphValidationError:
            continue
        for vertex in range(face.graph.vertex_count):
            ends = ([(e.id, 'src') for e in face.graph.edges if e.src == vertex] +
                    [(e.id, 'dst') for e in face.graph.edges if e.dst == vertex])
            if len(ends) < 4:
                continue
            # the first end stays put so each split is produced once
            for size in range(2, len(ends) - 1):
                for moved in combinations(ends[1:], size):
                    try:
                        yield blow_up_cell(face_cell, vertex, moved)
                    except GraphValidationError:
                        continue


class _CellRegistry:
    """Marked simplices seen so far, compared up to edge relabeling."""

    def __init__(self):
        self.buckets: Dict[Tuple, List[Face]] = {}
        self.size = 0

    def add(self, cell: SimplexCell) -> bool:
        whole = face_graph(cell, ())
        bucket = self.buckets.setdefault(whole.signature(), [])
        if any(faces_match(whole, seen) is not None for seen in bucket):
            return False
        bucket.append(whole)
        self.size += 1
        return True


def _face_chain(start: SimplexCell, target: SimplexCell, budget: int,
                max_cells: int) -> Optional[List[FaceMatch]]:
    """Breadth-first search for the fewest simplex changes from start to target.

    Only called once the two simplices share no face, so every chain found
    has at least one intermediate simplex.
    """
    registry = _CellRegistry()
    registry.add(start)
    frontier: List[Tuple[SimplexCell, ...]] = [(start,)]
    for depth in range(1, budget):
        following = []
        for chain in frontier:
            for cell in adjacent_cells(chain[-1]):
                if not registry.add(cell):
                    continue
                if registry.size > max_cells:
                    raise NoConnectingPathError(
                        f"searched {max_cells} simplices without reaching the target simplex")
                route = chain + (cell,)
                last = shared_faces(cell, target)
                if last:
                    logger.debug(f"face chain through {depth} intermediate simplices")
                    return [shared_faces(a, b)[0] for a, b in zip(route, route[1:])] + [last[0]]
                following.append(route)
        frontier = following
    return None


def d0_upper_bound(p: SimplexPoint, q: SimplexPoint, path: Optional[PLPath] = None,
                   budget: int = 1, max_cells: int = MAX_ROUTE_CELLS) -> D0Bound:
    """Upper bound on d0: exact inside one simplex, else through a hinted path or a chain of faces.

    With budget 1 every face shared by the two simplices is tried. Larger
    budgets search face-adjacent simplices breadth first and route through
    the first chain with the fewest simplex changes.

    Raises:
        NoConnectingPathError: no route within `budget` simplex changes
    """
    if path is not None:
        if not (path.starts_at(p) and path.ends_at(q)):
            raise GraphValidationError("path hint does not join the two points")
        return D0Bound(path.d0_length, path)
    if p.cell.same_type(q.cell):
        straight = PLPath.straight(p, q)
        return D0Bound(straight.d0_length, straight)
    if budget < 1:
        raise NoConnectingPathError("points lie in different simplices and the budget allows no change")
    routes = [_route_through(match, p, q) for match in shared_faces(p.cell, q.cell)]
    if routes:
        return min(routes, key=lambda r: r.value)
    chain = _face_chain(p.cell, q.cell, budget, max_cells) if budget > 1 else None
    if chain is None:
        raise NoConnectingPathError(
            f"no chain of at most {budget} simplex changes joins the two simplices; pass a path hint")
    return _route_chain(chain, p, q)


def _interval(p, q, combine, path=None, budget=1) -> MetricInterval:
    invariant = d_inv(period_map(p), period_map(q))
    simplicial = d0_upper_bound(p, q, path, budget).value
    return MetricInterval(invariant, combine(simplicial, invariant))


def d1(p: SimplexPoint, q: SimplexPoint, path: Optional[PLPath] = None, budget: int = 1) -> MetricInterval:
    """d1 = d0 + d_inv(periods), bracketed by d_inv below and the d0 bound above."""
    return _interval(p, q, lambda a, b: a + b, path, budget)


def d2(p: SimplexPoint, q: SimplexPoint, path: Optional[PLPath] = None, budget: int = 1) -> MetricInterval:
    return _interval(p, q, math.hypot, path, budget)


def dinf(p: SimplexPoint, q: SimplexPoint, path: Optional[PLPath] = None, budget: int = 1) -> MetricInterval:
    return _interval(p, q, max, path, budget)


METRICS = {'d1': d1, 'd2': d2, 'dinf': dinf}


# Blow-ups ------------------------------------------------------------------------

def blow_up_cell(cell: SimplexCell, vertex: int, moved_ends) -> SimplexCell:
    """Simplex of a vertex blow-up, with the marking lifted across the new last edge.

    Each basis cycle gets the coefficient on the new edge that cancels its
    boundary at the new vertex, so the original simplex is a face of the result.
    """
    expanded = blow_up_vertex(cell.graph, vertex, moved_ends, length=1)
    moved = set(moved_ends)
    rows = []
    for row in cell.marking.basis:
        at_new = sum(c * ((e, 'dst') in moved) - c * ((e, 'src') in moved) for e, c in enumerate(row))
        rows.append(tuple(row) + (-at_new,))
    return SimplexCell(expanded, Marking.from_rows(rows))
