"""
Acceptance Report Module

Runs the acceptance checks of the toolkit end to end and collects one row per
criterion (passed flag, headline value, detail text, runtime) in a pandas
DataFrame that the CLI prints, exports or stores.
"""

import logging
import random
import time
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from connectivization import (c1_sets, cyclically_equivalent, three_edge_connectivize,
                              tropical_torelli_equal)
from errors import GraphValidationError, NotPositiveDefiniteError, OuterSpaceError
from finite_volume import VolumeCalculator
from graph_core import genus
from graph_corpus import (banana, k4, looped_banana, perturbed, polynomial_corpus, random_bridgeless_graph,
                          random_outer_graph, random_three_edge_connected, rose, theta, theta_marking)
from homology_jacobian import Marking, cycle_basis, period_matrix, principality_check
from outer_metrics import DS2, DS2_EPS, METRICS, PLPath, SimplexCell, blow_up_cell, shared_faces
from path_length import PathLengthIntegrator
from spd_geometry import d_inv, glnz_equivalent
from tropical_plane import TropicalPolynomial2, check_balancing, corner_locus, grid_cross_check

logger = logging.getLogger('outer_space.report')
logger.addHandler(logging.NullHandler())

COLUMNS = ['criterion', 'name', 'passed', 'value', 'detail', 'runtime']

CheckResult = Tuple[bool, float, str]


class AcceptanceReport:
    """
    Runs the ten acceptance criteria with configurable sample sizes.

    The defaults are the full-size runs; tests pass smaller sizes. Every
    random draw comes from a Random seeded by `seed`, so two runs with the
    same arguments produce the same table apart from the runtime column.
    """

    DEFAULT_SEED = 20240601
    DEFAULT_PD_GRAPHS = 1000
    DEFAULT_PERTURBED_PAIRS = 20
    DEFAULT_BRIDGELESS_GRAPHS = 50
    DEFAULT_ORDERS = 5
    DEFAULT_THREE_CONNECTED = 10
    DEFAULT_PROBE_DEPTH = 8
    DEFAULT_VOLUME_TOL = 1e-3
    DEFAULT_VOLUME_EPS = 0.05
    DEFAULT_CORNER_SCALES = (1e-2, 1e-3, 1e-4)
    DEFAULT_GRID = 200
    DEFAULT_TRIPLES = 200
    DEFAULT_FACES = 50
    DEFAULT_PRINCIPAL_GRAPHS = 100
    AXIOM_TOL = 1e-9

    def __init__(self, seed: Optional[int] = None, pd_graphs: Optional[int] = None,
                 perturbed_pairs: Optional[int] = None, bridgeless_graphs: Optional[int] = None,
                 orders: Optional[int] = None, three_connected: Optional[int] = None,
                 probe_depth: Optional[int] = None, volume_tol: Optional[float] = None,
                 volume_eps: Optional[float] = None, grid: Optional[int] = None,
                 triples: Optional[int] = None, faces: Optional[int] = None,
                 principal_graphs: Optional[int] = None):
        """
        Initialize the report with its sample sizes.

        Args:
            seed: seed for every random draw
            pd_graphs: random graphs checked for positive definite periods
            perturbed_pairs: same-graph pairs expected to fail the Torelli test
            bridgeless_graphs: graphs connectivized in several random orders
            orders: random contraction orders per bridgeless graph
            three_connected: random 3-edge-connected graphs for the C1-set check
            probe_depth: last exponent k of the divergence probe t = 10^-k
            volume_tol: relative convergence tolerance of the area quadrature
            volume_eps: cutoff scale for the ds2_eps area
            grid: side of the grid used by the tropical cross-check
            triples: same-simplex triples for the metric axioms
            faces: random blow-ups for the tensor gluing check
            principal_graphs: random graphs for the principality check
        """
        self.seed = seed if seed is not None else self.DEFAULT_SEED
        self.pd_graphs = pd_graphs if pd_graphs is not None else self.DEFAULT_PD_GRAPHS
        self.perturbed_pairs = perturbed_pairs if perturbed_pairs is not None else self.DEFAULT_PERTURBED_PAIRS
        self.bridgeless_graphs = (bridgeless_graphs if bridgeless_graphs is not None
                                  else self.DEFAULT_BRIDGELESS_GRAPHS)
        self.orders = orders if orders is not None else self.DEFAULT_ORDERS
        self.three_connected = three_connected if three_connected is not None else self.DEFAULT_THREE_CONNECTED
        self.probe_depth = probe_depth if probe_depth is not None else self.DEFAULT_PROBE_DEPTH
        self.volume_tol = volume_tol if volume_tol is not None else self.DEFAULT_VOLUME_TOL
        self.volume_eps = volume_eps if volume_eps is not None else self.DEFAULT_VOLUME_EPS
        self.grid = grid if grid is not None else self.DEFAULT_GRID
        self.triples = triples if triples is not None else self.DEFAULT_TRIPLES
        self.faces = faces if faces is not None else self.DEFAULT_FACES
        self.principal_graphs = (principal_graphs if principal_graphs is not None
                                 else self.DEFAULT_PRINCIPAL_GRAPHS)

    def _rng(self, offset: int) -> random.Random:
        return random.Random(self.seed + offset)

    @property
    def criteria(self) -> Dict[int, Tuple[str, Callable[[], CheckResult]]]:
        return {
            1: ('theta period matrix', self.check_theta_period),
            2: ('positive definiteness', self.check_positive_definite),
            3: ('torelli suite', self.check_torelli),
            4: ('connectivization order independence', self.check_order_independence),
            5: ('c1-set structure', self.check_c1_structure),
            6: ('divergence probe', self.check_divergence),
            7: ('finite volume', self.check_volume),
            8: ('balancing', self.check_balancing),
            9: ('metric axioms and gluing', self.check_metric_axioms),
            10: ('principality', self.check_principality),
        }

    # Criteria -----------------------------------------------------------------

    def check_theta_period(self) -> CheckResult:
        """Exact period matrix [[a+b, b], [b, 1-a]] for the tree {e2} basis."""
        samples = [(Fraction(1, 3),) * 3, (Fraction(1, 2), Fraction(3, 10), Fraction(1, 5)),
                   (Fraction(1, 10), Fraction(7, 10), Fraction(1, 5))]
        marking = theta_marking()
        failures = []
        for a, b, c in samples:
            found = period_matrix(theta(a, b, c), marking).to_list()
            expected = [[a + b, b], [b, 1 - a]]
            if found != expected:
                failures.append(f"({a}, {b}, {c}): {found}")
        return not failures, float(len(samples) - len(failures)), '; '.join(failures) or 'exact match'

    def check_positive_definite(self) -> CheckResult:
        """Every random period matrix factors; reports the smallest eigenvalue seen."""
        rng = self._rng(2)
        margin = np.inf
        for _ in range(self.pd_graphs):
            g = random_outer_graph(rng, rng.randint(2, 4), max_edges=10)
            try:
                p = period_matrix(g, cycle_basis(g))
            except NotPositiveDefiniteError as exc:
                return False, 0.0, str(exc)
            margin = min(margin, float(np.linalg.eigvalsh(p.as_array())[0]))
        return margin > 0, margin, f"{self.pd_graphs} graphs, minimum eigenvalue {margin:.6g}"

    def check_torelli(self) -> CheckResult:
        """Looped-banana pair is Torelli-equal but not cyclically equivalent; perturbations are not."""
        g1 = looped_banana(f1=Fraction(1, 10), f2=Fraction(1, 5))
        g2 = looped_banana(f1=Fraction(3, 20), f2=Fraction(3, 20))
        torelli = tropical_torelli_equal(g1, g2).equal
        cyclic = cyclically_equivalent(g1, g2) is not None
        witness = glnz_equivalent(period_matrix(g1, cycle_basis(g1)).as_array(),
                                  period_matrix(g2, cycle_basis(g2)).as_array(), 3)
        rng = self._rng(3)
        distinguished = 0
        for _ in range(self.perturbed_pairs):
            g = random_outer_graph(rng, rng.randint(2, 3), max_edges=8, exact=True)
            if not tropical_torelli_equal(g, perturbed(rng, g)).equal:
                distinguished += 1
        passed = torelli and not cyclic and witness is not None and distinguished == self.perturbed_pairs
        detail = (f"torelli={torelli} cyclic={cyclic} witness={witness is not None} "
                  f"perturbed distinguished {distinguished}/{self.perturbed_pairs}")
        return passed, float(distinguished), detail

    def check_order_independence(self) -> CheckResult:
        """Random contraction orders give cyclically equivalent quotients of the same genus."""
        rng = self._rng(4)
        agreeing = 0
        for index in range(self.bridgeless_graphs):
            g = random_bridgeless_graph(rng, rng.randint(2, 3), max_edges=8, exact=True)
            quotients = [three_edge_connectivize(g, rng=random.Random(self.seed + 1000 * index + k)).quotient
                         for k in range(self.orders)]
            same_genus = all(genus(q) == genus(g) for q in quotients)
            if same_genus and all(cyclically_equivalent(quotients[0], q) is not None for q in quotients[1:]):
                agreeing += 1
            else:
                logger.warning(f"connectivization order dependence on graph {index}")
        return (agreeing == self.bridgeless_graphs, float(agreeing),
                f"{agreeing}/{self.bridgeless_graphs} graphs, {self.orders} orders each")

    def check_c1_structure(self) -> CheckResult:
        rng = self._rng(5)
        graphs = [k4()] + [random_three_edge_connected(rng, exact=True) for _ in range(self.three_connected)]
        failures = []
        for index, g in enumerate(graphs):
            sets = c1_sets(g)
            if sets != [frozenset({e}) for e in range(g.edge_count)]:
                failures.append(f"3-edge-connected graph {index}: {sets}")
        curated = {
            'theta': (theta(), [frozenset({0}), frozenset({1}), frozenset({2})]),
            'banana': (banana(), [frozenset({0, 1})]),
            'looped_banana': (looped_banana(), [frozenset({0}), frozenset({1}), frozenset({2, 3})]),
        }
        for name, (g, expected) in curated.items():
            sets = c1_sets(g)
            if sets != expected or sets != c1_sets(g, exhaustive=True):
                failures.append(f"{name}: {sets}")
        checked = len(graphs) + len(curated)
        return not failures, float(checked - len(failures)), '; '.join(failures) or f"{checked} graphs"

    def check_divergence(self) -> CheckResult:
        """d_inv and ds2 length toward the collapsing cycle of theta grow without bound."""
        cell = SimplexCell(theta())
        origin = cell.period(np.full(3, 1.0 / 3))
        start = np.array([0.25, 0.25, 0.5])
        integrator = PathLengthIntegrator(DS2)
        distances, lengths = [], []
        for k in range(1, self.probe_depth + 1):
            t = 10.0 ** -k
            target = np.array([t, t, 1 - 2 * t])
            distances.append(d_inv(origin, cell.period(target)))
            lengths.append(integrator.length(PLPath.through(cell, [start, target])).value)
        increasing = all(b > a for a, b in zip(distances, distances[1:]))
        growing = all(b > a for a, b in zip(lengths, lengths[1:]))
        passed = increasing and growing
        if self.probe_depth >= 8:
            passed = passed and distances[-1] > 10 and lengths[-1] > 10
        detail = f"d_inv {distances[-1]:.6g}, ds2 length {lengths[-1]:.6g} at t=1e-{self.probe_depth}"
        return passed, float(lengths[-1]), detail

    def check_volume(self) -> CheckResult:
        """Theta simplex areas converge; the corner area scales like sqrt(radius)."""
        cell = SimplexCell(theta())
        calculator = VolumeCalculator(tol=self.volume_tol)
        area = calculator.area(cell, DS2)
        eps_area = calculator.area(cell, DS2_EPS, self.volume_eps)
        converged = all(r.error_estimate < 0.01 * r.value for r in (area, eps_area))
        scaled = [calculator.corner_area(cell, r).value / np.sqrt(r) for r in self.DEFAULT_CORNER_SCALES]
        spread = (max(scaled) - min(scaled)) / max(scaled)
        slope = calculator.integrand_slope(cell, DS2)
        passed = converged and spread < 0.25 and slope >= -1.6
        detail = (f"ds2 area {area.value:.6g}, ds2_eps area {eps_area.value:.6g}, "
                  f"corner/sqrt spread {spread:.3g}, slope {slope:.4g}")
        return passed, float(area.value), detail

    def check_balancing(self) -> CheckResult:
        stars = 0
        unbalanced = 0
        worst = 1.0
        for terms in polynomial_corpus():
            p = TropicalPolynomial2.from_terms(terms)
            for star in corner_locus(p).vertices:
                stars += 1
                unbalanced += not check_balancing(star)
            worst = min(worst, grid_cross_check(p, n=self.grid))
        passed = unbalanced == 0 and worst == 1.0
        return passed, worst, f"{stars} vertices, {unbalanced} unbalanced, grid agreement {worst:.6f}"

    def check_metric_axioms(self) -> CheckResult:
        """Symmetry and triangle inequality of the d-bounds, and ds2 agreement across blow-up faces."""
        nprng = np.random.default_rng(self.seed + 9)
        cell = SimplexCell(k4())
        violations = 0
        for _ in range(self.triples):
            p, q, r = (cell.point(nprng.dirichlet(np.ones(cell.edge_count))) for _ in range(3))
            for metric in METRICS.values():
                pq, qp = metric(p, q).upper, metric(q, p).upper
                pr, qr = metric(p, r).upper, metric(q, r).upper
                if abs(pq - qp) > self.AXIOM_TOL or pr > pq + qr + self.AXIOM_TOL:
                    violations += 1
        gap = self._gluing_gap(self._rng(9), nprng)
        passed = violations == 0 and gap <= self.AXIOM_TOL
        return passed, gap, f"{violations} axiom violations, largest gluing gap {gap:.3g}"

    def _gluing_gap(self, rng: random.Random, nprng: np.random.Generator) -> float:
        bases = [SimplexCell(rose(*([Fraction(1, n)] * n))) for n in (2, 3, 4)]
        gap = 0.0
        checked = 0
        while checked < self.faces:
            base = rng.choice(bases)
            ends = [(e, side) for e in range(base.edge_count) for side in ('src', 'dst')]
            moved = rng.sample(ends, rng.randint(2, len(ends) - 2))
            try:
                expanded = blow_up_cell(base, 0, moved)
            except GraphValidationError:
                continue
            if not any(not m.face_a.zero_edges for m in shared_faces(base, expanded)):
                return np.inf
            x = nprng.dirichlet(np.ones(base.edge_count))
            u = nprng.standard_normal(base.edge_count)
            u -= u.mean()
            flat = u[:-1] @ base.tensor_ds2(x) @ u[:-1]
            glued = u @ expanded.tensor_ds2(np.append(x, 0.0)) @ u
            gap = max(gap, abs(flat - glued) / max(1.0, abs(flat)))
            checked += 1
        return gap

    def check_principality(self) -> CheckResult:
        """Fundamental-cycle bases are principal; a basis with one row doubled is not."""
        rng = self._rng(10)
        failures = 0
        for _ in range(self.principal_graphs):
            g = random_outer_graph(rng, rng.randint(2, 4), max_edges=10)
            marking = cycle_basis(g)
            scaled = Marking.from_rows([[2 * c for c in marking.basis[0]]] + list(marking.basis[1:]))
            if not principality_check(g, marking) or principality_check(g, scaled):
                failures += 1
        return failures == 0, float(failures), f"{failures}/{self.principal_graphs} graphs misjudged"

    # Running ------------------------------------------------------------------

    def run(self, criteria: Optional[List[int]] = None) -> pd.DataFrame:
        """Run the selected criteria (all by default) and return one row per criterion."""
        selected = criteria or sorted(self.criteria)
        rows = []
        for number in selected:
            if number not in self.criteria:
                raise GraphValidationError(f"unknown acceptance criterion {number}")
            name, check = self.criteria[number]
            started = time.perf_counter()
            try:
                passed, value, detail = check()
            except OuterSpaceError as exc:
                logger.error(f"criterion {number} ({name}) raised {type(exc).__name__}: {exc}")
                passed, value, detail = False, float('nan'), f"{type(exc).__name__}: {exc}"
            runtime = time.perf_counter() - started
            logger.info(f"criterion {number} ({name}): passed={passed} in {runtime:.2f}s")
            rows.append({'criterion': number, 'name': name, 'passed': bool(passed),
                         'value': float(value), 'detail': detail, 'runtime': runtime})
        return pd.DataFrame(rows, columns=COLUMNS)


def run_report(criteria: Optional[List[int]] = None, **sizes) -> pd.DataFrame:
    return AcceptanceReport(**sizes).run(criteria)
