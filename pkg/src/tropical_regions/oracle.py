"""Exact region counting plus independent cross-checking oracles.

`count_regions_exact` enumerates term configurations and keeps those whose
defining direction test passes strictly — the dual view on the Newton
polytopes.  `count_arrangement_regions` recounts rank-2 layers directly as
a hyperplane arrangement in input space, and `count_by_input_sampling`
lower-bounds the count from observed argmax patterns.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import rng, simplex
from .errors import EnumerationCapExceeded, SolverError, ValidationError
from .geometry import DEFAULT_CAP, feasible_direction, first_coordinate_reach
from .tropical import DEFAULT_TOL, Configuration, LayerSpec, layer_patterns_batch


@dataclass(frozen=True, eq=False)
class ExactCount:
    """Regions counted exactly: one configuration + input-space witness per
    region, and the number of boundary-only (zero-margin) patterns seen."""

    count: int
    configurations: tuple[Configuration, ...]
    witnesses: tuple[np.ndarray, ...]
    degenerate: int


def count_regions_exact(
    layer: LayerSpec, tol: float = DEFAULT_TOL, cap: int = DEFAULT_CAP
) -> ExactCount:
    """Enumerate every configuration; count those realizable on a
    full-dimensional region (strict margin), with a witness input point.

    Patterns realizable only on measure-zero boundaries are tallied as
    degenerate, not counted."""
    mats = [np.asarray(u.newton_points) for u in layer.units]
    ranks = [V.shape[0] for V in mats]
    total = math.prod(ranks)
    if total > cap:
        raise EnumerationCapExceeded(total, cap)
    dim = layer.input_dim + 1

    # Difference rows target - competitor, precomputed per unit and choice.
    blocks: list[list[np.ndarray]] = []
    for V in mats:
        unit_blocks = []
        for j in range(V.shape[0]):
            unit_blocks.append(V[j] - np.delete(V, j, axis=0))
        blocks.append(unit_blocks)

    kept: list[Configuration] = []
    witnesses: list[np.ndarray] = []
    degenerate = 0
    for choice in itertools.product(*(range(k) for k in ranks)):
        rows = [blocks[i][j] for i, j in enumerate(choice) if ranks[i] > 1]
        rows = np.vstack(rows) if rows else np.empty((0, dim))
        try:
            res = feasible_direction(rows, dim, require_first_positive=True, tol=tol)
        except SolverError as exc:
            raise SolverError(f"{exc}; configuration {choice}") from exc
        if res.feasible:
            kept.append(Configuration(choice))
            witnesses.append(res.witness[1:] / res.witness[0])
        elif first_coordinate_reach(rows, dim) > tol:
            degenerate += 1
    return ExactCount(len(kept), tuple(kept), tuple(witnesses), degenerate)


def _unit_hyperplanes(layer: LayerSpec) -> tuple[np.ndarray, np.ndarray]:
    W, b = [], []
    for i, unit in enumerate(layer.units):
        if unit.rank != 2:
            raise ValidationError(
                f"arrangement counting needs rank-2 units; unit {i} has rank {unit.rank}"
            )
        diff = unit.newton_points[1] - unit.newton_points[0]
        b.append(diff[0])
        W.append(diff[1:])
    return np.array(W), np.array(b)


def count_arrangement_regions(
    layer: LayerSpec, tol: float = DEFAULT_TOL, cap: int = DEFAULT_CAP
) -> int:
    """Count sign vectors s with {x : s_i (w_i . x + b_i) > 0 for all i}
    nonempty, via a margin LP per pattern directly in input space."""
    W, b = _unit_hyperplanes(layer)
    m, n = W.shape
    if 2**m > cap:
        raise EnumerationCapExceeded(2**m, cap)

    count = 0
    for signs in itertools.product((-1.0, 1.0), repeat=m):
        s = np.asarray(signs)
        # Maximize t s.t. s_i (w_i . x + b_i) >= t and t <= 1, x and t free.
        # Variables: x+ (n), x- (n), t+ , t-.
        A = np.zeros((m + 1, 2 * n + 2))
        rhs = np.zeros(m + 1)
        A[:m, :n] = -(s[:, None] * W)
        A[:m, n : 2 * n] = s[:, None] * W
        A[:m, 2 * n] = 1.0
        A[:m, 2 * n + 1] = -1.0
        rhs[:m] = s * b
        A[m, 2 * n] = 1.0
        A[m, 2 * n + 1] = -1.0
        rhs[m] = 1.0
        obj = np.zeros(2 * n + 2)
        obj[2 * n] = 1.0
        obj[2 * n + 1] = -1.0
        res = simplex.solve(obj, A_ub=A, b_ub=rhs)
        if res.status != simplex.OPTIMAL:
            raise SolverError(f"arrangement LP ended with status {res.status} for signs {signs}")
        if res.value > tol:
            count += 1
    return count


def count_by_input_sampling(
    layer: LayerSpec, K: int, seed: int = 0, input_scale: float = 10.0
) -> int:
    """Distinct argmax patterns over K gaussian inputs (scaled by
    input_scale); a lower bound on the exact region count."""
    if K < 1:
        raise ValidationError(f"K must be >= 1, got {K}")
    X = rng.standard_normal(seed, 0, K, layer.input_dim) * float(input_scale)
    patterns = layer_patterns_batch(layer, X)
    return int(np.unique(patterns, axis=0).shape[0])
