"""
Command-line front end.

Every subcommand reads JSON files, prints one JSON document on standard
output (or writes it to --output) and returns an exit code: 0 on success,
2 for invalid input, 3 when a numerical search or integral did not settle,
1 for any other toolkit error.

Graph files look like {"vertices": 2, "edges": [{"id": 0, "src": 0, "dst": 1,
"length": 0.5}, ...]}. Point files are either a graph or {"graph": ...,
"marking": {"basis": [[...], ...]}}. With --exact, lengths are read as
rationals and exact results are printed as "p/q" strings.
"""

import argparse
import json
import logging
import math
import random
import sys
from fractions import Fraction
from typing import Callable, List, Optional, Tuple

import numpy as np

from connectivization import c1_sets, cyclically_equivalent, three_edge_connectivize, tropical_torelli_equal
from db_handler import DatabaseHandler
from errors import (EnumerationOverflowError, GraphValidationError, MarkingError, NonConvergenceError,
                    OuterSpaceError, ParameterError)
from export_utils import DataExporter
from finite_volume import VolumeCalculator
from graph_core import genus, graph_from_dict, graph_to_dict, parse_length, validate_outer
from graph_corpus import theta
from homology_jacobian import Marking, cycle_basis, period_matrix
from outer_metrics import DS2, DS2_EPS, METRICS, TENSOR_KINDS, PLPath, SimplexCell, SimplexPoint, validate_eps
from path_length import PathLengthIntegrator, distance_upper_bound, ratio_table
from report import AcceptanceReport
from spd_geometry import d_inv, glnz_equivalent, shortest_vector
from tropical_plane import TropicalPolynomial2, check_balancing, corner_locus, evaluate

logger = logging.getLogger('outer_space.cli')
logger.addHandler(logging.NullHandler())

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INVALID = 2
EXIT_NUMERIC = 3

SIGNIFICANT_DIGITS = 15

# Sample sizes for `report --quick`.
QUICK_SIZES = dict(pd_graphs=50, perturbed_pairs=5, bridgeless_graphs=5, orders=3, three_connected=3,
                   probe_depth=4, volume_tol=1e-2, grid=40, triples=20, faces=5, principal_graphs=10)


class InputError(OuterSpaceError, ValueError):
    """Unreadable or malformed input file."""

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


# Output ---------------------------------------------------------------------------

def to_json_value(value):
    """Plain JSON value: floats at 15 significant digits, Fractions as "p/q"."""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            return None
        return float(f"{value:.{SIGNIFICANT_DIGITS}g}")
    if isinstance(value, np.ndarray):
        return to_json_value(value.tolist())
    if isinstance(value, dict):
        return {str(k): to_json_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, frozenset, set)):
        items = sorted(value) if isinstance(value, (frozenset, set)) else value
        return [to_json_value(v) for v in items]
    if value is None or isinstance(value, str):
        return value
    return str(value)


def emit(result, output: Optional[str] = None) -> None:
    text = json.dumps(to_json_value(result), indent=2)
    if output:
        with open(output, 'w') as handle:
            handle.write(text + '\n')
    else:
        sys.stdout.write(text + '\n')


# Input ----------------------------------------------------------------------------

def load_json(path: str):
    try:
        with open(path) as handle:
            return json.load(handle)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON: {exc.msg}", f"{path}:{exc.lineno}:{exc.colno}") from exc
    except OSError as exc:
        raise InputError(f"cannot read input: {exc.strerror}", path) from exc


def load_graph(path: str, exact: bool = False):
    data = load_json(path)
    if isinstance(data, dict) and 'graph' in data:
        data = data['graph']
    return graph_from_dict(data, exact)


def load_marking(path: Optional[str]) -> Optional[Marking]:
    return Marking.from_dict(load_json(path)) if path else None


def load_point(path: str, marking_path: Optional[str] = None) -> SimplexPoint:
    """A point of outer space from a graph file with an optional marking."""
    data = load_json(path)
    marking = load_marking(marking_path)
    if isinstance(data, dict) and 'graph' in data:
        if marking is None and 'marking' in data:
            marking = Marking.from_dict(data['marking'])
        data = data['graph']
    return SimplexPoint.from_graph(graph_from_dict(data), marking)


def load_matrix(path: str, exact: bool = False):
    """A symmetric matrix given directly, or the period matrix of a graph file."""
    data = load_json(path)
    if isinstance(data, dict):
        if 'graph' in data:
            g = graph_from_dict(data['graph'], exact)
            marking = Marking.from_dict(data['marking']) if 'marking' in data else cycle_basis(g)
        else:
            g = graph_from_dict(data, exact)
            marking = cycle_basis(g)
        return period_matrix(g, marking).entries
    try:
        return tuple(tuple(parse_length(x, exact) for x in row) for row in data)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"malformed matrix: {exc}", path) from exc


def load_polynomial(path: str) -> TropicalPolynomial2:
    data = load_json(path)
    if isinstance(data, list):
        return TropicalPolynomial2.from_terms(data)
    return TropicalPolynomial2.from_dict(data)


# Subcommands ----------------------------------------------------------------------

def cmd_validate(args):
    report = validate_outer(load_graph(args.graph, args.exact))
    return {'is_outer_space_point': report.is_outer_space_point, 'is_connected': report.is_connected,
            'min_valence': report.min_valence, 'separating_edges': report.separating_edges}


def cmd_genus(args):
    return {'genus': genus(load_graph(args.graph, args.exact))}


def cmd_period(args):
    g = load_graph(args.graph, args.exact)
    marking = load_marking(args.marking) or cycle_basis(g)
    return period_matrix(g, marking).to_list()


def cmd_jacobian_dist(args):
    return {'d_inv': d_inv(load_matrix(args.first), load_matrix(args.second))}


def cmd_shortest_vector(args):
    found = shortest_vector(load_matrix(args.matrix, args.exact))
    return {'value': found.value, 'witness': found.witness}


def cmd_glnz(args):
    witness = glnz_equivalent(load_matrix(args.first), load_matrix(args.second), args.radius)
    return {'found': witness is not None, 'witness': witness, 'radius': args.radius}


def cmd_c1sets(args):
    return c1_sets(load_graph(args.graph, args.exact), exhaustive=args.exhaustive)


def cmd_connectivize(args):
    rng = random.Random(args.seed) if args.seed is not None else None
    result = three_edge_connectivize(load_graph(args.graph, args.exact), rng=rng)
    correspondence = sorted(result.correspondence.items(), key=lambda item: item[1])
    return {'quotient': graph_to_dict(result.quotient),
            'c1_sets': [{'edge': edge, 'c1_set': c1_set} for c1_set, edge in correspondence]}


def cmd_cyclic_eq(args):
    witness = cyclically_equivalent(load_graph(args.first, args.exact), load_graph(args.second, args.exact))
    return {'equivalent': witness is not None, 'witness': witness.to_dict() if witness else None}


def cmd_torelli(args):
    result = tropical_torelli_equal(load_graph(args.first, args.exact), load_graph(args.second, args.exact))
    return {'equal': result.equal,
            'witness': result.witness.to_dict() if result.witness else None,
            'quotients': [graph_to_dict(c.quotient) for c in result.quotients]}


def cmd_tensor(args):
    point = load_point(args.point, args.marking)
    if args.kind == DS2_EPS:
        validate_eps(args.eps, point.cell.rank)
    return {'kind': args.kind, 'coordinates': point.coordinates,
            'tensor': point.cell.tensor(point.as_array(), args.kind, args.eps)}


def cmd_pathlen(args):
    """Path file: {"graph": ..., "marking": optional, "nodes": [[x_0, ...], ...]}."""
    data = load_json(args.path)
    try:
        g = graph_from_dict(data['graph'])
        nodes = data['nodes']
    except (KeyError, TypeError) as exc:
        raise InputError(f"path file needs 'graph' and 'nodes': {exc}", args.path) from exc
    marking = Marking.from_dict(data['marking']) if 'marking' in data else None
    cell = SimplexCell(g, marking)
    if args.kind == DS2_EPS:
        validate_eps(args.eps, cell.rank)
    path = PLPath.through(cell, nodes)
    result = PathLengthIntegrator(args.kind, args.eps, args.tol).length(path)
    return result.to_dict()


def cmd_dist(args):
    p, q = load_point(args.first), load_point(args.second)
    if args.metric in METRICS:
        return {'metric': args.metric, **METRICS[args.metric](p, q, budget=args.budget).to_dict()}
    if args.metric == DS2_EPS:
        validate_eps(args.eps, p.cell.rank)
    bound = distance_upper_bound(p, q, args.metric, budget=args.budget, eps=args.eps)
    return {'metric': args.metric, 'upper': bound}


def cmd_volume(args):
    cell = SimplexCell(load_graph(args.graph) if args.graph else theta())
    calculator = VolumeCalculator(tol=args.tol)
    if args.kind == DS2_EPS:
        validate_eps(args.eps, cell.rank)
    if args.radius is not None:
        result = calculator.corner_area(cell, args.radius, args.kind, args.eps)
    else:
        result = calculator.area(cell, args.kind, args.eps)
    return result.to_dict()


def cmd_tropical_eval(args):
    p = load_polynomial(args.polynomial)
    x, y = parse_length(args.x, args.exact), parse_length(args.y, args.exact)
    return {'value': evaluate(p, x, y)}


def cmd_tropical_corners(args):
    locus = corner_locus(load_polynomial(args.polynomial))
    return {
        'vertices': [{'point': star.vertex, 'balanced': check_balancing(star),
                      'rays': [{'direction': d, 'weight': w} for d, w in star.rays]}
                     for star in locus.vertices],
        'edges': [{'start': e.start, 'end': e.end, 'direction': e.direction, 'weight': e.weight}
                  for e in locus.edges],
    }


def _store_and_export(args, frame, kind: str) -> dict:
    extra = {}
    if args.export:
        exporter = DataExporter(args.export_dir)
        export = exporter.export_report if kind == 'report' else exporter.export_ratios
        filepath, message = export(frame, format=args.export)
        if filepath is None:
            raise OuterSpaceError(message)
        extra['export'] = filepath
    if getattr(args, 'store', None):
        run_id = DatabaseHandler(args.store).save_report(frame, label=args.label, exact_mode=args.exact)
        if run_id is None:
            raise OuterSpaceError(f"could not store report in {args.store}")
        extra['run_id'] = run_id
    return extra


def cmd_report(args):
    sizes = dict(QUICK_SIZES) if args.quick else {}
    report = AcceptanceReport(seed=args.seed, **sizes)
    frame = report.run(args.criteria)
    records = frame.drop(columns=['runtime']).to_dict('records') if args.no_runtime else frame.to_dict('records')
    return {'passed': bool(frame['passed'].all()), 'criteria': records, **_store_and_export(args, frame, 'report')}


def cmd_ratios(args):
    cell = SimplexCell(theta())
    rng = np.random.default_rng(args.seed if args.seed is not None else 0)
    pairs = [(cell.point(rng.dirichlet(np.ones(3))), cell.point(rng.dirichlet(np.ones(3))))
             for _ in range(args.pairs)]
    frame = ratio_table(pairs, args.eps, sweeps=args.sweeps)
    return {'rows': frame.to_dict('records'), **_store_and_export(args, frame, 'ratios')}


# Parser ---------------------------------------------------------------------------

def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _nonnegative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text}")
    return value


def _unit_interval(text: str) -> float:
    value = float(text)
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError(f"expected a number in (0, 1), got {text}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


class JsonArgumentParser(argparse.ArgumentParser):
    """Argument errors become InputError so they are reported as JSON like any other."""

    def error(self, message):
        raise InputError(message, 'arguments')


def build_parser() -> argparse.ArgumentParser:
    common = JsonArgumentParser(add_help=False)
    common.add_argument('--exact', action='store_true', help='read lengths as rationals')
    common.add_argument('--output', help='write the JSON result to this file')
    common.add_argument('--verbose', '-v', action='count', default=0, help='log INFO (-vv: DEBUG)')
    common.add_argument('--log-file', help='also write the log to this file')

    parser = JsonArgumentParser(prog='outer_space', description='Metric graphs, tropical Jacobians and '
                                'the geometry of outer space')
    commands = parser.add_subparsers(dest='command', parser_class=JsonArgumentParser)
    commands.required = True

    def add(name: str, handler: Callable, help_text: str, *inputs: str) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, parents=[common], help=help_text)
        for item in inputs:
            sub.add_argument(item)
        sub.set_defaults(handler=handler)
        return sub

    add('validate', cmd_validate, 'check the outer-space conditions', 'graph')
    add('genus', cmd_genus, 'first Betti number', 'graph')
    sub = add('period', cmd_period, 'period matrix in a marking', 'graph')
    sub.add_argument('--marking', help='marking JSON {"basis": [[...], ...]}')
    add('jacobian-dist', cmd_jacobian_dist, 'invariant distance of two period matrices', 'first', 'second')
    add('shortest-vector', cmd_shortest_vector, 'minimum of a positive definite form', 'matrix')
    sub = add('glnz', cmd_glnz, 'search a GL(n, Z) equivalence', 'first', 'second')
    sub.add_argument('--radius', type=_positive_int, default=3)
    sub = add('c1sets', cmd_c1sets, 'C1-sets of a bridgeless graph', 'graph')
    sub.add_argument('--exhaustive', action='store_true', help='check every edge subset')
    sub = add('connectivize', cmd_connectivize, '3-edge connectivization', 'graph')
    sub.add_argument('--seed', type=int, help='random contraction order')
    add('cyclic-eq', cmd_cyclic_eq, 'cyclic equivalence of two graphs', 'first', 'second')
    add('torelli', cmd_torelli, 'compare tropical Jacobians', 'first', 'second')

    sub = add('tensor', cmd_tensor, 'Riemannian tensor at a point', 'point')
    sub.add_argument('--kind', choices=TENSOR_KINDS, default=DS2)
    sub.add_argument('--eps', type=_positive_float)
    sub.add_argument('--marking')
    sub = add('pathlen', cmd_pathlen, 'length of a piecewise-linear path', 'path')
    sub.add_argument('--kind', choices=TENSOR_KINDS, default=DS2)
    sub.add_argument('--eps', type=_positive_float)
    sub.add_argument('--tol', type=_unit_interval)
    sub = add('dist', cmd_dist, 'distance bounds between two points', 'first', 'second')
    sub.add_argument('--metric', choices=sorted(METRICS) + [DS2, DS2_EPS], default='d1')
    sub.add_argument('--eps', type=_positive_float)
    sub.add_argument('--budget', type=_nonnegative_int, default=1, help='simplex changes allowed')
    sub = add('volume', cmd_volume, 'area of a genus-2 triangle simplex')
    sub.add_argument('graph', nargs='?', help='three-edge genus-2 graph (theta by default)')
    sub.add_argument('--kind', choices=[DS2, DS2_EPS], default=DS2)
    sub.add_argument('--eps', type=_positive_float)
    sub.add_argument('--tol', type=_unit_interval)
    sub.add_argument('--radius', type=float, help='corner area within this radius instead')

    add('tropical-eval', cmd_tropical_eval, 'evaluate a tropical polynomial', 'polynomial', 'x', 'y')
    add('tropical-corners', cmd_tropical_corners, 'corner locus of a tropical polynomial', 'polynomial')

    for name, handler, help_text in (('report', cmd_report, 'run the acceptance report'),
                                     ('ratios', cmd_ratios, 'd1 against ds2 length bounds')):
        sub = add(name, handler, help_text)
        sub.add_argument('--seed', type=int)
        sub.add_argument('--export', choices=['csv', 'excel'])
        sub.add_argument('--export-dir')
        sub.add_argument('--store', help='SQLAlchemy URL, e.g. sqlite:///reports.db')
        sub.add_argument('--label')
    report = commands.choices['report']
    report.add_argument('--criteria', type=_positive_int, nargs='+')
    report.add_argument('--quick', action='store_true', help='small sample sizes')
    report.add_argument('--no-runtime', action='store_true', help='omit the runtime column')
    ratios = commands.choices['ratios']
    ratios.add_argument('--eps', type=_positive_float, default=0.05)
    ratios.add_argument('--pairs', type=_positive_int, default=5)
    ratios.add_argument('--sweeps', type=_nonnegative_int, default=5)
    return parser


def _failure(exc: Exception) -> Tuple[int, dict]:
    if isinstance(exc, (InputError, GraphValidationError, MarkingError, ParameterError)):
        code = EXIT_INVALID
    elif isinstance(exc, (NonConvergenceError, EnumerationOverflowError)):
        code = EXIT_NUMERIC
    else:
        code = EXIT_ERROR
    payload = {'error': type(exc).__name__, 'message': str(exc), 'location': getattr(exc, 'location', None)}
    if isinstance(exc, NonConvergenceError):
        payload['partial_sums'] = exc.partial_sums
    return code, payload


def run(argv: Optional[List[str]] = None,
        configure_logging: Optional[Callable[[int, Optional[str]], None]] = None) -> int:
    """Parse arguments, run one subcommand and print its JSON result.

    Returns:
        The process exit code
    """
    output = None
    try:
        args = build_parser().parse_args(argv)
        output = args.output
        if configure_logging is not None:
            configure_logging(args.verbose, args.log_file)
        logger.info(f"running {args.command}")
        emit(args.handler(args), output)
        return EXIT_OK
    except OuterSpaceError as exc:
        code, payload = _failure(exc)
        logger.error(f"{payload['error']}: {payload['message']}")
        emit(payload, output)
        return code
