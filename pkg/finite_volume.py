"""
Finite Volume Module

Area of a 2-dimensional simplex of outer space under ds2 or ds2_eps. The
area density sqrt(det G) blows up at the three vertices of the simplex
(where a cycle collapses), so the triangle is split into the three regions
nearest each vertex and each region is integrated in polar-like coordinates
with dyadic refinement toward its vertex.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np

from errors import GraphValidationError, NonConvergenceError, ParameterError
from outer_metrics import DS2, DS2_EPS, SimplexCell, validate_eps
from path_length import worker_count

logger = logging.getLogger('outer_space.finite_volume')
logger.addHandler(logging.NullHandler())


@dataclass
class VolumeResult:
    """Area estimate, last change between depths, and the estimate at every depth."""
    value: float
    error_estimate: float
    depth: int
    trace: List[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {'value': self.value, 'error_estimate': self.error_estimate,
                'depth': self.depth, 'trace': self.trace}


def _corner_coordinates(corner: int, s: float, t: float) -> np.ndarray:
    """Point with x_corner = 1 - s and the other two coordinates s*t, s*(1-t)."""
    others = [i for i in range(3) if i != corner]
    x = np.empty(3)
    x[corner] = 1.0 - s
    x[others[0]] = s * t
    x[others[1]] = s * (1.0 - t)
    return x


def _region_reach(t: float) -> float:
    """Largest s for which the corner coordinate stays the largest."""
    return 1.0 / (2.0 - t) if t <= 0.5 else 1.0 / (1.0 + t)


class VolumeCalculator:
    """Adaptive area of a triangle simplex (three edges, genus 2).

    Each region is integrated over (sigma, t) in [0,1]^2 with s = sigma * reach(t).
    Sigma is cut into dyadic cells [2^-(d+1), 2^-d] plus an inner cell
    [0, 2^-D]; t is split at 1/2 where the reach has a kink. Depth D grows
    until the total changes by less than `tol` relative.
    """

    DEFAULT_TOL = 1e-3
    DEFAULT_MAX_DEPTH = 60
    DEFAULT_MIN_DEPTH = 4
    DEFAULT_ORDER = 7

    def __init__(self, tol: Optional[float] = None, max_depth: Optional[int] = None,
                 workers: Optional[int] = None):
        self.tol = tol if tol is not None else self.DEFAULT_TOL
        self.max_depth = max_depth if max_depth is not None else self.DEFAULT_MAX_DEPTH
        self.workers = workers if workers is not None else worker_count()
        if not 0 < self.tol < 1:
            raise ParameterError(f"tolerance must lie in (0, 1), got {self.tol}")
        self.nodes, self.weights = np.polynomial.legendre.leggauss(self.DEFAULT_ORDER)

    @staticmethod
    def _check_cell(cell: SimplexCell) -> None:
        if cell.edge_count != 3 or cell.rank != 2:
            raise GraphValidationError("area computations need a 2-simplex of genus 2")

    @staticmethod
    def density(cell: SimplexCell, x: np.ndarray, kind: str, eps: Optional[float]) -> float:
        """sqrt(det G) in intrinsic coordinates."""
        return float(np.sqrt(np.linalg.det(cell.tensor(x, kind, eps))))

    def _cell_integral(self, integrand: Callable[[float, float], float],
                       box: Tuple[float, float, float, float]) -> float:
        s0, s1, t0, t1 = box
        hs, ms = (s1 - s0) / 2, (s0 + s1) / 2
        ht, mt = (t1 - t0) / 2, (t0 + t1) / 2
        total = 0.0
        for xs, ws in zip(self.nodes, self.weights):
            for xt, wt in zip(self.nodes, self.weights):
                total += ws * wt * integrand(ms + hs * xs, mt + ht * xt)
        return hs * ht * total

    def _sum_cells(self, integrand, boxes) -> float:
        if self.workers > 1 and len(boxes) > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                values = list(pool.map(lambda box: self._cell_integral(integrand, box), boxes))
        else:
            values = [self._cell_integral(integrand, box) for box in boxes]
        return float(sum(values))

    def _dyadic(self, integrands: List[Callable[[float, float], float]]) -> VolumeResult:
        """Integrate over [0,1]^2 cells refined toward sigma = 0, summed over integrands."""
        halves = [(0.0, 0.5), (0.5, 1.0)]
        shells = 0.0
        trace: List[float] = []
        for depth in range(self.max_depth + 1):
            inner = 2.0 ** -depth
            if depth > 0:
                boxes = [(inner, 2 * inner, t0, t1) for t0, t1 in halves]
                shells += sum(self._sum_cells(f, boxes) for f in integrands)
            core = sum(self._sum_cells(f, [(0.0, inner, t0, t1) for t0, t1 in halves])
                       for f in integrands)
            trace.append(shells + core)
            logger.debug(f"volume depth {depth}: {trace[-1]:.9g}")
            if depth >= self.DEFAULT_MIN_DEPTH:
                change = abs(trace[-1] - trace[-2])
                if change < self.tol * abs(trace[-1]):
                    logger.info(f"volume converged at depth {depth}: {trace[-1]:.9g}")
                    return VolumeResult(trace[-1], change, depth, trace)
        raise NonConvergenceError(f"area did not converge within depth {self.max_depth}", trace)

    def area(self, cell: SimplexCell, kind: str = DS2, eps: Optional[float] = None) -> VolumeResult:
        """Area of the whole open triangle."""
        self._check_cell(cell)
        if kind == DS2_EPS:
            validate_eps(eps, cell.rank)

        def region(corner: int) -> Callable[[float, float], float]:
            def integrand(sigma: float, t: float) -> float:
                reach = _region_reach(t)
                x = _corner_coordinates(corner, sigma * reach, t)
                return self.density(cell, x, kind, eps) * sigma * reach * reach
            return integrand

        return self._dyadic([region(corner) for corner in range(3)])

    def corner_area(self, cell: SimplexCell, radius: float, kind: str = DS2,
                    eps: Optional[float] = None, corner: int = 2) -> VolumeResult:
        """Area of the corner {x_i + x_j <= radius} at the vertex x_corner = 1."""
        self._check_cell(cell)
        if not 0 < radius < 0.5:
            raise ParameterError(f"corner radius must lie in (0, 0.5), got {radius}")

        def integrand(sigma: float, t: float) -> float:
            x = _corner_coordinates(corner, sigma * radius, t)
            return self.density(cell, x, kind, eps) * sigma * radius * radius

        return self._dyadic([integrand])

    def integrand_slope(self, cell: SimplexCell, kind: str = DS2, eps: Optional[float] = None,
                        corner: int = 2, t: float = 0.5,
                        scales: Optional[np.ndarray] = None) -> float:
        """Log-log slope of sqrt(det G) against the collapsing cycle length near a vertex."""
        self._check_cell(cell)
        s = np.asarray(scales if scales is not None else np.logspace(-3, -6, 7))
        values = [self.density(cell, _corner_coordinates(corner, v, t), kind, eps) for v in s]
        return float(np.polyfit(np.log(s), np.log(values), 1)[0])


def area_ds2_n2(cell: SimplexCell, tol: float = VolumeCalculator.DEFAULT_TOL) -> VolumeResult:
    return VolumeCalculator(tol=tol).area(cell, DS2)


def area_ds2_eps_n2(cell: SimplexCell, eps: float, tol: float = VolumeCalculator.DEFAULT_TOL) -> VolumeResult:
    return VolumeCalculator(tol=tol).area(cell, DS2_EPS, eps)


def corner_area(cell: SimplexCell, radius: float, tol: float = VolumeCalculator.DEFAULT_TOL,
                kind: str = DS2, eps: Optional[float] = None) -> VolumeResult:
    return VolumeCalculator(tol=tol).corner_area(cell, radius, kind, eps)
