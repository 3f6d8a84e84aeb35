"""
Homology and Jacobian Module

Chains and cycles on a metric graph, the edge-length quadratic form Q,
homology markings, period matrices, tropical 1-forms with their periods, and
the principality check of the cycle lattice.

A chain or a 1-form is stored as a tuple of coefficients in edge-id order,
relative to each edge's (src, dst) orientation. Under the identification of a
cycle with the 1-form carrying the same coefficients, the vertex balancing
condition of a form is exactly the cycle condition of a chain.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from numbers import Integral
from typing import List, Sequence, Tuple

import networkx as nx
import numpy as np
from networkx.utils import UnionFind
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form

from errors import GraphValidationError, MarkingError, NotPositiveDefiniteError
from graph_core import MetricGraph, genus, require_connected, require_positive_lengths

logger = logging.getLogger('outer_space.homology_jacobian')
logger.addHandler(logging.NullHandler())

OneChain = Tuple
OneForm = Tuple


@dataclass(frozen=True)
class Marking:
    """Ordered integer cycle basis identifying H1(G, Z) with Z^n."""
    basis: Tuple[Tuple[int, ...], ...]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> 'Marking':
        return cls(tuple(tuple(int(c) for c in row) for row in rows))

    @property
    def rank(self) -> int:
        return len(self.basis)

    def as_array(self) -> np.ndarray:
        """Basis as an n x E integer matrix (row i is sigma_i)."""
        return np.array(self.basis, dtype=np.int64).reshape(self.rank, -1)

    def to_dict(self) -> dict:
        return {'basis': [list(row) for row in self.basis]}

    @classmethod
    def from_dict(cls, data: dict) -> 'Marking':
        try:
            return cls.from_rows(data['basis'])
        except (KeyError, TypeError, ValueError) as exc:
            raise MarkingError(f"malformed marking JSON: {exc}") from exc


@dataclass(frozen=True)
class PeriodMatrix:
    """Symmetric positive-definite Gram matrix of Q on a marked cycle basis.

    Entries keep the arithmetic of the lengths: Fractions in exact mode.
    """
    entries: Tuple[Tuple, ...]

    @property
    def size(self) -> int:
        return len(self.entries)

    def as_array(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.entries], dtype=float)

    def is_positive_definite(self) -> bool:
        try:
            np.linalg.cholesky(self.as_array())
        except np.linalg.LinAlgError:
            return False
        return True

    def determinant(self):
        return Matrix(self.entries).det()

    def to_list(self) -> List[List]:
        return [list(row) for row in self.entries]


# Chains -----------------------------------------------------------------------

def _coefficients(g: MetricGraph, c: Sequence) -> Tuple:
    if len(c) != g.edge_count:
        raise GraphValidationError(
            f"coefficient vector has {len(c)} entries, graph has {g.edge_count} edges")
    return tuple(c)


def _is_integral(c: Sequence) -> bool:
    return all(isinstance(x, Integral) or (isinstance(x, Fraction) and x.denominator == 1)
               or (isinstance(x, float) and x.is_integer()) for x in c)


def boundary(g: MetricGraph, c: OneChain) -> List:
    """Incoming minus outgoing coefficients at each vertex; loops contribute 0."""
    coefficients = _coefficients(g, c)
    result = [0] * g.vertex_count
    for edge, x in zip(g.edges, coefficients):
        result[edge.dst] += x
        result[edge.src] -= x
    return result


def is_cycle(g: MetricGraph, c: OneChain) -> bool:
    return all(value == 0 for value in boundary(g, c))


def cycle_basis(g: MetricGraph, tree_edges: Sequence[int] = ()) -> Marking:
    """Fundamental cycles of a spanning tree; the non-tree edge carries +1.

    The tree is grown greedily: preferred `tree_edges` first, then all other
    edges by id, skipping loops and edges that would close a cycle.
    """
    require_connected(g)
    components = UnionFind(range(g.vertex_count))
    order = list(dict.fromkeys(list(tree_edges) + [e.id for e in g.edges]))
    tree = set()
    for edge_id in order:
        edge = g.edges[edge_id]
        if edge.is_loop or components[edge.src] == components[edge.dst]:
            continue
        components.union(edge.src, edge.dst)
        tree.add(edge_id)

    tree_view = nx.Graph()
    tree_view.add_nodes_from(range(g.vertex_count))
    tree_view.add_edges_from((g.edges[e].src, g.edges[e].dst, {'id': e}) for e in tree)

    rows = []
    for edge in g.edges:
        if edge.id in tree:
            continue
        row = [0] * g.edge_count
        row[edge.id] = 1
        if not edge.is_loop:
            walk = nx.shortest_path(tree_view, edge.dst, edge.src)
            for u, v in zip(walk, walk[1:]):
                tree_edge = g.edges[tree_view[u][v]['id']]
                row[tree_edge.id] += 1 if (tree_edge.src, tree_edge.dst) == (u, v) else -1
        rows.append(row)
    logger.debug(f"cycle_basis: tree={sorted(tree)} rank={len(rows)}")
    return Marking.from_rows(rows)


def q_pairing(g: MetricGraph, c1: OneChain, c2: OneChain):
    """Q(c1, c2) = sum over edges of c1_e * c2_e * length(e)."""
    require_positive_lengths(g)
    first, second = _coefficients(g, c1), _coefficients(g, c2)
    return sum(x * y * edge.length for x, y, edge in zip(first, second, g.edges))


def invariant_factors(rows: Sequence[Sequence[int]]) -> List[int]:
    """Nonzero elementary divisors of an integer matrix (Smith normal form over ZZ)."""
    if not rows:
        return []
    diagonal = smith_normal_form(Matrix(rows), domain=ZZ)
    size = min(diagonal.shape)
    return [abs(int(diagonal[i, i])) for i in range(size) if diagonal[i, i] != 0]


def marking_problems(g: MetricGraph, m: Marking) -> List[str]:
    """Reasons why `m` is not a marking of `g`; empty when it is one."""
    problems = []
    n = genus(g)
    if m.rank != n:
        problems.append(f"marking has {m.rank} cycles, genus is {n}")
    for index, row in enumerate(m.basis):
        if len(row) != g.edge_count:
            problems.append(f"basis element {index} has {len(row)} coefficients, expected {g.edge_count}")
        elif not is_cycle(g, row):
            problems.append(f"basis element {index} has nonzero boundary")
    if not problems:
        factors = invariant_factors(m.basis)
        if len(factors) != n or any(f != 1 for f in factors):
            problems.append(f"basis spans a sublattice with elementary divisors {factors}")
    return problems


def validate_marking(g: MetricGraph, m: Marking) -> None:
    problems = marking_problems(g, m)
    if problems:
        raise MarkingError("; ".join(problems))


def period_entries(basis: Sequence[Sequence[int]], lengths: Sequence) -> Tuple[Tuple, ...]:
    """Q(sigma_i, sigma_j) for every pair of basis cycles, in the arithmetic of `lengths`."""
    return tuple(
        tuple(sum(a * b * l for a, b, l in zip(row_i, row_j, lengths)) for row_j in basis)
        for row_i in basis)


def period_matrix(g: MetricGraph, m: Marking) -> PeriodMatrix:
    """Period matrix P_ij = Q(sigma_i, sigma_j) of a marked metric graph."""
    require_positive_lengths(g)
    validate_marking(g, m)
    result = PeriodMatrix(period_entries(m.basis, g.lengths))
    if not result.is_positive_definite():
        raise NotPositiveDefiniteError("period matrix failed the Cholesky test")
    return result


# 1-forms ----------------------------------------------------------------------

def is_one_form(g: MetricGraph, w: OneForm) -> bool:
    """Balancing: outgoing minus incoming coefficients vanish at every vertex."""
    return is_cycle(g, w)


def integrate(g: MetricGraph, w: OneForm, c: OneChain):
    """Period of the 1-form w over the cycle c."""
    if not is_one_form(g, w):
        raise GraphValidationError("integrand is not balanced, so it is not a 1-form")
    if not is_cycle(g, c):
        raise GraphValidationError("integration domain is not a cycle")
    return q_pairing(g, w, c)


def cycle_to_form(g: MetricGraph, c: OneChain) -> OneForm:
    """The 1-form attached to an integer cycle: same coefficient on every edge."""
    coefficients = _coefficients(g, c)
    if not _is_integral(coefficients):
        raise GraphValidationError("only integer cycles correspond to integral 1-forms")
    if not is_cycle(g, coefficients):
        raise GraphValidationError("chain has nonzero boundary")
    return tuple(int(x) for x in coefficients)


def principality_check(g: MetricGraph, m: Marking) -> bool:
    """True iff every integral cycle lies in the Z-span of the marking.

    The integer cycle lattice is saturated in Z^E, so a rank-n family of
    cycles spans it exactly when all its elementary divisors are 1.
    """
    problems = marking_problems(g, m)
    if problems:
        logger.info(f"principality_check failed: {'; '.join(problems)}")
    return not problems


def express_in_marking(m: Marking, c: OneChain) -> Tuple[int, ...]:
    """Integer coordinates x with sum_i x_i * sigma_i = c."""
    basis = Matrix(m.basis).T
    target = Matrix(list(c))
    try:
        solution, free = basis.gauss_jordan_solve(target)
    except ValueError as exc:
        raise MarkingError("chain is not in the span of the marking") from exc
    if free.shape[0]:
        raise MarkingError("marking rows are linearly dependent")
    if any(not value.is_integer for value in solution):
        raise MarkingError("chain has non-integral coordinates in the marking")
    return tuple(int(value) for value in solution)


def change_marking(p: PeriodMatrix, u: Sequence[Sequence[int]]) -> PeriodMatrix:
    """Period matrix of the same graph in the marking transformed by u: u p u^T."""
    unimodular = Matrix(u)
    if unimodular.shape != (p.size, p.size) or abs(unimodular.det()) != 1:
        raise MarkingError("change of marking must be an integer matrix with determinant +-1")
    rows = [[int(x) for x in row] for row in u]
    n = p.size
    entries = tuple(
        tuple(sum(rows[i][a] * p.entries[a][b] * rows[j][b] for a in range(n) for b in range(n))
              for j in range(n))
        for i in range(n))
    return PeriodMatrix(entries)
