"""
SPD Geometry Module

The symmetric space of positive-definite matrices with its invariant metric
Tr((Y^-1 dY)^2): tensor evaluation, the invariant distance, exact short
lattice vectors of a positive quadratic form, and a bounded search for
GL(n, Z)-equivalence of two forms.
"""

import logging
import math
from dataclasses import dataclass
from itertools import product
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg
from sympy import Matrix

from errors import EnumerationOverflowError, NotPositiveDefiniteError, ParameterError

logger = logging.getLogger('outer_space.spd_geometry')
logger.addHandler(logging.NullHandler())

SYMMETRY_TOL = 1e-12
EQUIVALENCE_TOL = 1e-9


@dataclass(frozen=True)
class ShortVector:
    """Minimum of v^T q v over nonzero integer v, with one minimizing v."""
    value: float
    witness: Tuple[int, ...]


def _entries(y) -> Optional[Sequence[Sequence]]:
    """Raw entries of a matrix-like value, keeping exact numbers when present."""
    if hasattr(y, 'entries'):
        return y.entries
    if isinstance(y, np.ndarray):
        return None
    return y


def to_array(y) -> np.ndarray:
    """Float array of a PeriodMatrix, nested sequence or ndarray."""
    entries = _entries(y)
    if entries is None:
        return np.asarray(y, dtype=float)
    return np.array([[float(x) for x in row] for row in entries], dtype=float)


def is_spd(y) -> bool:
    matrix = to_array(y)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        return False
    if not np.allclose(matrix, matrix.T, rtol=0.0, atol=SYMMETRY_TOL):
        return False
    try:
        np.linalg.cholesky(matrix)
    except np.linalg.LinAlgError:
        return False
    return True


def require_spd(y, name: str = 'matrix') -> np.ndarray:
    matrix = to_array(y)
    if not is_spd(matrix):
        raise NotPositiveDefiniteError(f"{name} is not symmetric positive definite")
    return matrix


def tensor_eval(y, h1, h2) -> float:
    """Invariant inner product Tr(y^-1 h1 y^-1 h2) of two tangent vectors at y."""
    point = require_spd(y, 'base point')
    first = linalg.solve(point, to_array(h1), assume_a='pos')
    second = linalg.solve(point, to_array(h2), assume_a='pos')
    return float(np.trace(first @ second))


def d_inv(a, b) -> float:
    """Affine-invariant distance sqrt(sum log^2 lambda_i), lambda_i the eigenvalues of a^-1 b."""
    left = require_spd(a, 'first point')
    right = require_spd(b, 'second point')
    if left.shape != right.shape:
        raise ParameterError(f"dimension mismatch: {left.shape} vs {right.shape}")
    if np.array_equal(left, right):
        return 0.0
    eigenvalues = linalg.eigh(right, left, eigvals_only=True)
    return float(np.sqrt(np.sum(np.log(eigenvalues) ** 2)))


def d_inv_reference(a, b) -> float:
    """Same distance through ||log(a^-1/2 b a^-1/2)||_F; slower, used as a cross-check."""
    left = require_spd(a, 'first point')
    right = require_spd(b, 'second point')
    inv_root = linalg.inv(np.real(linalg.sqrtm(left)))
    middle = inv_root @ right @ inv_root
    return float(np.linalg.norm(np.real(linalg.logm((middle + middle.T) / 2)), 'fro'))


def _quadratic_value(entries: Sequence[Sequence], v: Sequence[int]):
    n = len(v)
    return sum(v[i] * entries[i][j] * v[j] for i in range(n) for j in range(n) if v[i] and v[j])


def _canonical_sign(v: Tuple[int, ...]) -> Tuple[int, ...]:
    for c in v:
        if c:
            return v if c > 0 else tuple(-x for x in v)
    return v


def _witness_order(v: Tuple[int, ...]):
    leading_zeros = next(i for i, c in enumerate(v) if c)
    return leading_zeros, sum(abs(c) for c in v), tuple(-c for c in v)


def enumerate_short_vectors(q, bound: float,
                            max_nodes: int = 200000) -> List[Tuple[int, ...]]:
    """Nonzero integer v (up to sign) with v^T q v <= bound, by Fincke-Pohst enumeration.

    Raises:
        EnumerationOverflowError: the search tree exceeds `max_nodes` nodes
    """
    matrix = require_spd(q, 'quadratic form')
    n = matrix.shape[0]
    upper = linalg.cholesky(matrix, lower=False)
    diagonal = np.diag(upper) ** 2
    ratios = upper / np.diag(upper)[:, None]

    found = set()
    x = [0] * n
    visited = 0

    def search(level: int, remaining: float) -> None:
        nonlocal visited
        visited += 1
        if visited > max_nodes:
            raise EnumerationOverflowError(
                f"short vector search exceeded {max_nodes} nodes; form is too ill-conditioned")
        center = -sum(ratios[level, j] * x[j] for j in range(level + 1, n))
        radius = math.sqrt(max(remaining, 0.0) / diagonal[level])
        for value in range(math.ceil(center - radius), math.floor(center + radius) + 1):
            x[level] = value
            rest = remaining - diagonal[level] * (value - center) ** 2
            if rest < -1e-12 * max(bound, 1.0):
                continue
            if level == 0:
                if any(x):
                    found.add(_canonical_sign(tuple(x)))
            else:
                search(level - 1, rest)
        x[level] = 0

    search(n - 1, bound)
    logger.debug(f"enumerate_short_vectors: n={n} bound={bound:.6g} nodes={visited} found={len(found)}")
    return sorted(found, key=_witness_order)


def shortest_vector(q, max_nodes: int = 200000) -> ShortVector:
    """Exact minimum of v^T q v over nonzero integer vectors.

    The smallest diagonal entry bounds the search, since coordinate vectors
    are candidates. The value keeps the arithmetic of the entries (Fractions
    stay exact). Among minimizers the witness with the fewest leading zeros,
    then the smallest l1 norm, is returned with its first nonzero entry positive.
    """
    matrix = require_spd(q, 'quadratic form')
    entries = _entries(q)
    if entries is None:
        entries = matrix.tolist()
    bound = float(np.min(np.diag(matrix)))
    candidates = enumerate_short_vectors(matrix, bound * (1 + 1e-9) + 1e-15, max_nodes)
    scored = [(_quadratic_value(entries, v), v) for v in candidates]
    best = min(value for value, _ in scored)
    slack = 1e-12 * max(1.0, abs(float(best)))
    ties = [v for value, v in scored if abs(float(value - best)) <= slack]
    witness = min(ties, key=_witness_order)
    return ShortVector(best, witness)


def _candidate_rows(a: np.ndarray, target: float, radius: int) -> List[Tuple[int, ...]]:
    n = a.shape[0]
    rows = []
    for v in product(range(-radius, radius + 1), repeat=n):
        if any(v) and abs(float(np.asarray(v) @ a @ np.asarray(v)) - target) < EQUIVALENCE_TOL:
            rows.append(v)
    rows.sort(key=lambda v: (max(abs(c) for c in v), tuple(-c for c in v)))
    return rows


def glnz_equivalent(a, b, radius: int) -> Optional[Tuple[Tuple[int, ...], ...]]:
    """Search an integer u with |det u| = 1 and u a u^T = b, entries in [-radius, radius].

    Witnesses are tried by increasing largest entry. None means nothing was
    found inside the box; it does not prove inequivalence.
    """
    if radius < 1:
        raise ParameterError(f"radius must be at least 1, got {radius}")
    left = require_spd(a, 'first form')
    right = require_spd(b, 'second form')
    if left.shape != right.shape:
        raise ParameterError(f"dimension mismatch: {left.shape} vs {right.shape}")
    det_left, det_right = np.linalg.det(left), np.linalg.det(right)
    if abs(det_left - det_right) > EQUIVALENCE_TOL * max(1.0, abs(det_right)):
        logger.debug(f"glnz_equivalent: determinants differ ({det_left:.6g} vs {det_right:.6g})")
        return None
    n = left.shape[0]

    for box in range(1, radius + 1):
        candidates = [_candidate_rows(left, right[i, i], box) for i in range(n)]
        rows: List[Tuple[int, ...]] = []

        def extend(i: int) -> bool:
            if i == n:
                return abs(Matrix(rows).det()) == 1
            for v in candidates[i]:
                vector = np.asarray(v)
                if all(abs(float(np.asarray(rows[j]) @ left @ vector) - right[j, i]) < EQUIVALENCE_TOL
                       for j in range(i)):
                    rows.append(v)
                    if extend(i + 1):
                        return True
                    rows.pop()
            return False

        if extend(0):
            logger.debug(f"glnz_equivalent: witness {rows} at box {box}")
            return tuple(rows)
    return None
