"""
Tropical Plane Curve Module

Tropical polynomials in two variables, max(j*x + k*y + a), their corner
locus computed exactly over the rationals, edge weights and primitive
directions, the balancing condition at vertices, and the edge metric that
makes a primitive vector of a weight-W edge have length 1/W.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from errors import ParameterError

logger = logging.getLogger('outer_space.tropical_plane')
logger.addHandler(logging.NullHandler())

MAX_MONOMIALS = 12

Point = Tuple[Fraction, Fraction]
Vector = Tuple[int, int]


@dataclass(frozen=True)
class Monomial:
    """The affine function j*x + k*y + a."""
    j: int
    k: int
    a: Fraction

    @property
    def exponent(self) -> Vector:
        return self.j, self.k

    def value(self, x, y):
        return self.j * x + self.k * y + self.a


@dataclass(frozen=True)
class TropicalPolynomial2:
    monomials: Tuple[Monomial, ...]

    def __post_init__(self):
        if len(self.monomials) < 2:
            raise ParameterError("a tropical polynomial needs at least two monomials")
        exponents = [m.exponent for m in self.monomials]
        if len(set(exponents)) != len(exponents):
            raise ParameterError(f"monomials must have distinct exponents, got {exponents}")

    @classmethod
    def from_terms(cls, terms: Sequence[Tuple[int, int, object]]) -> 'TropicalPolynomial2':
        """Build from (j, k, a) triples; a may be an int, Fraction or decimal string."""
        return cls(tuple(Monomial(int(j), int(k), Fraction(str(a)) if isinstance(a, float)
                                  else Fraction(a)) for j, k, a in terms))

    @classmethod
    def from_dict(cls, data: dict) -> 'TropicalPolynomial2':
        try:
            return cls.from_terms([(item['j'], item['k'], item.get('a', 0))
                                   for item in data['monomials']])
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise ParameterError(f"malformed polynomial JSON: {exc}") from exc

    def to_dict(self) -> dict:
        return {'monomials': [{'j': m.j, 'k': m.k, 'a': str(m.a)} for m in self.monomials]}

    def shifted(self, dj: int, dk: int, da) -> 'TropicalPolynomial2':
        """Tropical product with the monomial da*x^dj*y^dk; the corner locus is unchanged."""
        return TropicalPolynomial2(tuple(Monomial(m.j + dj, m.k + dk, m.a + Fraction(da))
                                         for m in self.monomials))


@dataclass(frozen=True)
class VertexStar:
    vertex: Point
    rays: Tuple[Tuple[Vector, int], ...]


@dataclass(frozen=True)
class CornerEdge:
    """A maximal segment or ray where the same set of monomials ties for the max.

    `start` and `end` are None at infinity; `direction` is primitive and
    points from start to end; `monomials` are the two extreme tied monomials.
    """
    start: Optional[Point]
    end: Optional[Point]
    direction: Vector
    weight: int
    monomials: Tuple[Monomial, Monomial]

    @property
    def is_bounded(self) -> bool:
        return self.start is not None and self.end is not None


@dataclass(frozen=True)
class CornerLocus:
    vertices: Tuple[VertexStar, ...]
    edges: Tuple[CornerEdge, ...]


def evaluate(p: TropicalPolynomial2, x, y):
    """Maximum over monomials of j*x + k*y + a."""
    return max(m.value(x, y) for m in p.monomials)


def weight(m1: Monomial, m2: Monomial) -> int:
    """gcd(|j1 - j2|, |k1 - k2|), the lattice length of the exponent difference."""
    if m1.exponent == m2.exponent:
        raise ParameterError("weight needs monomials with different exponents")
    return gcd(abs(m1.j - m2.j), abs(m1.k - m2.k))


def primitive(vector: Sequence[int]) -> Vector:
    divisor = gcd(int(vector[0]), int(vector[1]))
    if divisor == 0:
        raise ParameterError("the zero vector has no primitive direction")
    return int(vector[0]) // divisor, int(vector[1]) // divisor


def check_balancing(v: VertexStar) -> bool:
    """True iff the weighted primitive directions sum to zero."""
    return (sum(w * d[0] for d, w in v.rays) == 0 and
            sum(w * d[1] for d, w in v.rays) == 0)


def induced_edge_scale(edge_weight) -> Fraction:
    """Length the induced metric gives a primitive vector of an edge of this weight."""
    w = edge_weight.weight if isinstance(edge_weight, CornerEdge) else int(edge_weight)
    if w < 1:
        raise ParameterError(f"edge weights are positive integers, got {w}")
    return Fraction(1, w)


def _pair_edge(p: TropicalPolynomial2, first: Monomial, second: Monomial):
    """Interval of the tie line of two monomials where nothing else exceeds them."""
    dj, dk = first.j - second.j, first.k - second.k
    da = first.a - second.a
    direction = (-dk, dj)
    anchor = (-da / dj, Fraction(0)) if dj else (Fraction(0), -da / dk)
    base = first.value(*anchor)
    slope = first.j * direction[0] + first.k * direction[1]

    low: Optional[Fraction] = None
    high: Optional[Fraction] = None
    tied = []
    for other in p.monomials:
        offset = other.value(*anchor) - base
        rate = other.j * direction[0] + other.k * direction[1] - slope
        if rate == 0:
            if offset > 0:
                return None
            if offset == 0:
                tied.append(other)
            continue
        bound = -offset / rate
        if rate > 0:
            high = bound if high is None else min(high, bound)
        else:
            low = bound if low is None else max(low, bound)
    if low is not None and high is not None and low >= high:
        return None
    return anchor, direction, low, high, tied


def corner_locus(p: TropicalPolynomial2) -> CornerLocus:
    """Exact corner locus: where the maximum is attained at least twice.

    Every pair of monomials gives a candidate line, clipped to where no other
    monomial dominates; lines are merged by their full set of tied monomials.
    """
    if len(p.monomials) > MAX_MONOMIALS:
        raise ParameterError(f"corner locus supports at most {MAX_MONOMIALS} monomials")
    seen: Dict[FrozenSet[Vector], CornerEdge] = {}
    for first, second in combinations(p.monomials, 2):
        found = _pair_edge(p, first, second)
        if found is None:
            continue
        anchor, direction, low, high, tied = found
        key = frozenset(m.exponent for m in tied)
        if key in seen:
            continue

        def at(t: Optional[Fraction]) -> Optional[Point]:
            if t is None:
                return None
            return anchor[0] + t * direction[0], anchor[1] + t * direction[1]

        extremes = sorted(tied, key=lambda m: m.exponent)
        ends = (extremes[0], extremes[-1])
        seen[key] = CornerEdge(at(low), at(high), primitive(direction), weight(*ends), ends)

    edges = tuple(seen.values())
    stars: Dict[Point, List[Tuple[Vector, int]]] = {}
    for edge in edges:
        if edge.start is not None:
            stars.setdefault(edge.start, []).append((edge.direction, edge.weight))
        if edge.end is not None:
            stars.setdefault(edge.end, []).append(((-edge.direction[0], -edge.direction[1]), edge.weight))
    vertices = tuple(VertexStar(point, tuple(rays)) for point, rays in sorted(stars.items()))
    logger.debug(f"corner_locus: {len(vertices)} vertices, {len(edges)} edges")
    return CornerLocus(vertices, edges)


def bounded_edge_lengths(p: TropicalPolynomial2) -> List[Tuple[CornerEdge, Fraction]]:
    """Induced metric length of every bounded edge: lattice length divided by weight."""
    result = []
    for edge in corner_locus(p).edges:
        if not edge.is_bounded:
            continue
        delta = (edge.end[0] - edge.start[0], edge.end[1] - edge.start[1])
        index = 0 if edge.direction[0] else 1
        lattice_length = delta[index] / edge.direction[index]
        result.append((edge, lattice_length * induced_edge_scale(edge)))
    return result


def _on_locus(locus: CornerLocus, xs: np.ndarray, ys: np.ndarray, tol: float) -> np.ndarray:
    inside = np.zeros(xs.shape, dtype=bool)
    for edge in locus.edges:
        dx, dy = float(edge.direction[0]), float(edge.direction[1])
        origin = edge.start if edge.start is not None else edge.end
        if origin is None:
            m1, m2 = edge.monomials
            dj, dk = m1.j - m2.j, m1.k - m2.k
            da = float(m1.a - m2.a)
            ox, oy = (-da / dj, 0.0) if dj else (0.0, -da / dk)
        else:
            ox, oy = float(origin[0]), float(origin[1])
        norm = np.hypot(dx, dy)
        across = np.abs((xs - ox) * dy - (ys - oy) * dx) / norm
        along = ((xs - ox) * dx + (ys - oy) * dy) / norm
        hit = across < tol
        if edge.start is not None:
            hit &= along > -tol
        if edge.end is not None:
            span = (float(edge.end[0]) - ox) * dx / norm + (float(edge.end[1]) - oy) * dy / norm
            if edge.start is None:
                hit &= along < tol
            else:
                hit &= along < span + tol
        inside |= hit
    return inside


def grid_cross_check(p: TropicalPolynomial2, n: int = 200, step: float = 0.125,
                     center: Tuple[float, float] = (0.0, 0.0), tol: float = 1e-9) -> float:
    """Fraction of an n x n grid where the exact locus and a numeric double-max test agree."""
    locus = corner_locus(p)
    offsets = (np.arange(n) - n // 2) * step
    xs, ys = np.meshgrid(center[0] + offsets, center[1] + offsets)
    j = np.array([m.j for m in p.monomials], dtype=float)[:, None, None]
    k = np.array([m.k for m in p.monomials], dtype=float)[:, None, None]
    a = np.array([float(m.a) for m in p.monomials])[:, None, None]
    values = np.sort(j * xs + k * ys + a, axis=0)
    numeric = (values[-1] - values[-2]) < tol
    exact = _on_locus(locus, xs, ys, tol)
    agreement = float(np.mean(numeric == exact))
    if agreement < 1.0:
        logger.warning(f"grid_cross_check: agreement {agreement:.6f} on {n}x{n} grid")
    return agreement
