"""
Path Length Module

Riemannian length of piecewise-linear paths in outer space under ds0, ds2 or
ds2_eps, upper bounds for the induced length distance by optimizing interior
path nodes, and empirical ratio tables between the distance notions.
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from errors import NonConvergenceError, ParameterError
from outer_metrics import (DS2, DS2_EPS, TENSOR_KINDS, PathLeg, PLPath, SimplexPoint, d0_upper_bound, d1)

logger = logging.getLogger('outer_space.path_length')
logger.addHandler(logging.NullHandler())


def worker_count(default: int = 1) -> int:
    """Worker threads from OUTER_SPACE_WORKERS; results never depend on it."""
    try:
        return max(1, int(os.environ.get('OUTER_SPACE_WORKERS', default)))
    except ValueError:
        logger.warning("ignoring non-integer OUTER_SPACE_WORKERS")
        return default


@dataclass
class LengthResult:
    """Length with an error estimate and the estimate after each refinement pass."""
    value: float
    error_estimate: float
    trace: List[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {'value': self.value, 'error_estimate': self.error_estimate, 'trace': self.trace}


class PathLengthIntegrator:
    """Adaptive Gauss-Legendre integration of sqrt(v^T G v) along each leg.

    Panels are bisected until the two-half estimate agrees with the whole-panel
    estimate to `rel_tol`. A path that keeps needing refinement after
    `max_depth` passes is reported with its partial sums.
    """

    DEFAULT_REL_TOL = 1e-6
    DEFAULT_MAX_DEPTH = 60
    DEFAULT_ORDER = 7

    def __init__(self, kind: str = DS2, eps: Optional[float] = None, rel_tol: Optional[float] = None,
                 max_depth: Optional[int] = None, workers: Optional[int] = None):
        if kind not in TENSOR_KINDS:
            raise ParameterError(f"unknown tensor kind {kind!r}")
        self.kind = kind
        self.eps = eps
        self.rel_tol = rel_tol if rel_tol is not None else self.DEFAULT_REL_TOL
        self.max_depth = max_depth if max_depth is not None else self.DEFAULT_MAX_DEPTH
        self.workers = workers if workers is not None else worker_count()
        if self.rel_tol <= 0:
            raise ParameterError(f"tolerance must be positive, got {self.rel_tol}")
        self.nodes, self.weights = np.polynomial.legendre.leggauss(self.DEFAULT_ORDER)

    def speed(self, leg: PathLeg, t: float) -> float:
        velocity = leg.end - leg.start
        gram = leg.cell.tensor(leg.start + t * velocity, self.kind, self.eps)
        intrinsic = velocity[:-1]
        return float(np.sqrt(max(intrinsic @ gram @ intrinsic, 0.0)))

    def _panel(self, leg: PathLeg, a: float, b: float) -> float:
        half, middle = (b - a) / 2, (a + b) / 2
        return half * sum(w * self.speed(leg, middle + half * x) for x, w in zip(self.nodes, self.weights))

    def leg_length(self, leg: PathLeg) -> LengthResult:
        if np.allclose(leg.start, leg.end, atol=0.0, rtol=0.0):
            return LengthResult(0.0, 0.0, [0.0])
        active = [(0.0, 1.0, self._panel(leg, 0.0, 1.0))]
        done, error = 0.0, 0.0
        trace = [active[0][2]]
        for _ in range(self.max_depth):
            refined = []
            for a, b, whole in active:
                middle = (a + b) / 2
                left, right = self._panel(leg, a, middle), self._panel(leg, middle, b)
                change = abs(left + right - whole)
                if change <= self.rel_tol * abs(left + right) or change < 1e-15:
                    done += left + right
                    error += change
                else:
                    refined.extend([(a, middle, left), (middle, b, right)])
            active = refined
            trace.append(done + sum(panel[2] for panel in active))
            if not active:
                return LengthResult(done, error, trace)
        raise NonConvergenceError(
            f"leg length did not settle after {self.max_depth} refinement passes", trace)

    def length(self, path: PLPath) -> LengthResult:
        """Sum of leg lengths; legs are independent and may run on worker threads."""
        if self.workers > 1 and len(path.legs) > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                results = list(pool.map(self.leg_length, path.legs))
        else:
            results = [self.leg_length(leg) for leg in path.legs]
        depth = max(len(r.trace) for r in results)
        trace = [sum(r.trace[min(i, len(r.trace) - 1)] for r in results) for i in range(depth)]
        return LengthResult(sum(r.value for r in results), sum(r.error_estimate for r in results), trace)


def path_length(path: PLPath, kind: str = DS2, eps: Optional[float] = None,
                rel_tol: Optional[float] = None) -> float:
    return PathLengthIntegrator(kind, eps, rel_tol).length(path).value


@dataclass
class OptimizedPath:
    """Best path found, its length, and the best length after each sweep."""
    length: float
    path: PLPath
    history: List[float]

    def refined(self) -> List[Tuple[object, List[np.ndarray]]]:
        """Same geometric path with a midpoint inserted into every leg."""
        segments = []
        for cell, nodes in _segments(self.path):
            doubled = [nodes[0]]
            for a, b in zip(nodes, nodes[1:]):
                doubled.extend([(a + b) / 2, b])
            segments.append((cell, doubled))
        return segments


def _segments(path: PLPath) -> List[Tuple[object, List[np.ndarray]]]:
    """Group consecutive legs of the same simplex into node lists."""
    segments = []
    for leg in path.legs:
        if segments and segments[-1][0].same_type(leg.cell):
            segments[-1][1].append(leg.end)
        else:
            segments.append((leg.cell, [leg.start, leg.end]))
    return segments


def _assemble(segments) -> PLPath:
    return PLPath(tuple(PathLeg(cell, a, b) for cell, nodes in segments for a, b in zip(nodes, nodes[1:])))


class PathOptimizer:
    """Upper bounds for the ds2 / ds2_eps length distance.

    Interior nodes of a piecewise-linear route are moved one at a time by
    pairwise mass transfers inside their simplex; a move is kept only when it
    shortens the path, so reported lengths never increase across sweeps.
    """

    DEFAULT_BUDGET = 20
    DEFAULT_NODES = 3
    DEFAULT_INITIAL_STEP = 0.02
    DEFAULT_MIN_STEP = 1e-5
    DEFAULT_FLOOR = 1e-9

    def __init__(self, kind: str = DS2, eps: Optional[float] = None, budget: Optional[int] = None,
                 initial_step: Optional[float] = None, min_step: Optional[float] = None,
                 integrator: Optional[PathLengthIntegrator] = None):
        self.kind = kind
        self.eps = eps
        self.budget = budget if budget is not None else self.DEFAULT_BUDGET
        self.initial_step = initial_step if initial_step is not None else self.DEFAULT_INITIAL_STEP
        self.min_step = min_step if min_step is not None else self.DEFAULT_MIN_STEP
        self.integrator = integrator or PathLengthIntegrator(kind, eps)
        if self.budget < 0:
            raise ParameterError(f"budget must be nonnegative, got {self.budget}")

    def _leg(self, cell, a, b) -> float:
        return self.integrator.leg_length(PathLeg(cell, a, b)).value

    def optimize_segments(self, segments) -> OptimizedPath:
        segments = [(cell, [np.asarray(n, dtype=float) for n in nodes]) for cell, nodes in segments]
        legs = [[self._leg(cell, a, b) for a, b in zip(nodes, nodes[1:])] for cell, nodes in segments]
        best = sum(map(sum, legs))
        history = [best]
        step = self.initial_step
        for sweep in range(self.budget):
            improved = False
            for index, (cell, nodes) in enumerate(segments):
                for k in range(1, len(nodes) - 1):
                    node = nodes[k]
                    for i in range(len(node)):
                        for j in range(len(node)):
                            delta = min(step, node[j] - self.DEFAULT_FLOOR)
                            if i == j or delta <= 0:
                                continue
                            trial = node.copy()
                            trial[i] += delta
                            trial[j] -= delta
                            before = legs[index][k - 1] + legs[index][k]
                            left = self._leg(cell, nodes[k - 1], trial)
                            right = self._leg(cell, trial, nodes[k + 1])
                            if left + right < before:
                                node = nodes[k] = trial
                                legs[index][k - 1], legs[index][k] = left, right
                                best += left + right - before
                                improved = True
            history.append(best)
            logger.debug(f"PathOptimizer sweep {sweep}: length {best:.9g} step {step:.3g}")
            if not improved:
                step /= 2
                if step < self.min_step:
                    break
        return OptimizedPath(best, _assemble(segments), history)

    def optimize(self, p: SimplexPoint, q: SimplexPoint, nodes: Optional[int] = None,
                 initial: Optional[OptimizedPath] = None, budget: int = 1) -> OptimizedPath:
        """Shorten a route from p to q.

        Args:
            nodes: interior nodes inserted into each straight leg of the d0 route
            initial: continue from a previous result with every leg halved
            budget: simplex changes allowed when routing across simplices
        """
        if initial is not None:
            return self.optimize_segments(initial.refined())
        count = nodes if nodes is not None else self.DEFAULT_NODES
        route = d0_upper_bound(p, q, budget=budget).path
        segments = []
        for cell, ends in _segments(route):
            points = [ends[0]]
            for a, b in zip(ends, ends[1:]):
                points.extend(a + (b - a) * (i / (count + 1)) for i in range(1, count + 2))
            segments.append((cell, points))
        return self.optimize_segments(segments)


def distance_upper_bound(p: SimplexPoint, q: SimplexPoint, kind: str = DS2, budget: int = 1,
                         eps: Optional[float] = None, nodes: Optional[int] = None,
                         sweeps: Optional[int] = None) -> float:
    """Best path length found from p to q under the given tensor."""
    if p.cell.same_type(q.cell) and np.allclose(p.as_array(), q.as_array(), atol=0.0, rtol=0.0):
        return 0.0
    optimizer = PathOptimizer(kind, eps, budget=sweeps)
    return optimizer.optimize(p, q, nodes=nodes, budget=budget).length


def ratio_table(pairs: Sequence[Tuple[SimplexPoint, SimplexPoint]], eps: float,
                sweeps: int = 5, nodes: int = 2) -> pd.DataFrame:
    """d1 upper bounds against ds2 and ds2_eps length upper bounds, one row per pair."""
    rows = []
    for index, (p, q) in enumerate(pairs):
        metric = d1(p, q).upper
        ds2_bound = distance_upper_bound(p, q, DS2, nodes=nodes, sweeps=sweeps)
        eps_bound = distance_upper_bound(p, q, DS2_EPS, eps=eps, nodes=nodes, sweeps=sweeps)
        rows.append({
            'pair': index,
            'd1_upper': metric,
            'ds2_upper': ds2_bound,
            'ds2_eps_upper': eps_bound,
            'ds2_over_d1': ds2_bound / metric if metric else np.nan,
            'ds2_eps_over_d1': eps_bound / metric if metric else np.nan,
        })
    frame = pd.DataFrame(rows, columns=['pair', 'd1_upper', 'ds2_upper', 'ds2_eps_upper',
                                        'ds2_over_d1', 'ds2_eps_over_d1'])
    logger.info(f"ratio_table: {len(frame)} pairs")
    return frame
