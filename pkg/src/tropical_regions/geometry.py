"""V-represented polytopes and the feasibility engine behind region counting.

Points live in R^{n+1} for Newton polytopes (bias coordinate first).  All
vertex-hood / region-defining tests reduce to one primitive: find a
direction c maximizing a margin t with ``c . row >= t`` per constraint row
under the box ``|c|_inf <= 1``; "strict" means optimal margin > tol.
Region-defining directions additionally satisfy ``c_1 >= t``, i.e. they
normalize to (1, x) for an input-space witness x.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import simplex
from .errors import EnumerationCapExceeded, SolverError, ValidationError
from .tropical import DEFAULT_TOL, Configuration, LayerSpec, TropicalPolynomial

# Guardrail on exhaustive candidate enumeration (product of point counts).
DEFAULT_CAP = 10_000_000

# Fixed stream for the vertex prefilter; results stay deterministic.
_PREFILTER_SEED = 0x7E0B


@dataclass(eq=False)
class Polytope:
    """Convex hull of a point list; `is_reduced` means the list is the vertex set."""

    ambient_dim: int
    points: np.ndarray
    is_reduced: bool = False

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise ValidationError("a polytope needs a nonempty 2-D point array")
        if pts.shape[1] != self.ambient_dim:
            raise ValidationError(
                f"points have dimension {pts.shape[1]}, expected {self.ambient_dim}"
            )
        if not np.isfinite(pts).all():
            raise ValidationError("polytope points must be finite")
        pts = pts.copy()
        pts.flags.writeable = False
        self.points = pts

    def __len__(self) -> int:
        return self.points.shape[0]

    def __repr__(self) -> str:
        tag = "reduced" if self.is_reduced else "raw"
        return f"Polytope(dim={self.ambient_dim}, points={len(self)}, {tag})"


@dataclass(frozen=True)
class FeasibilityResult:
    """Outcome of a margin-maximization feasibility test.

    When feasible, `witness` satisfies every constraint row with slack at
    least `margin` (and first coordinate >= margin for region tests)."""

    feasible: bool
    witness: np.ndarray | None
    margin: float


def feasible_direction(
    rows: np.ndarray,
    dim: int,
    require_first_positive: bool = False,
    tol: float = DEFAULT_TOL,
) -> FeasibilityResult:
    """Maximize t over directions c with c.row >= t per row and |c|_inf <= 1.

    `require_first_positive` adds c_1 >= t, so a strictly feasible witness
    normalizes to a region-defining direction (1, c[1:]/c[0])."""
    rows = np.atleast_2d(np.asarray(rows, dtype=float)) if len(rows) else np.empty((0, dim))
    if rows.size and rows.shape[1] != dim:
        raise ValidationError(f"constraint rows have dimension {rows.shape[1]}, expected {dim}")

    if rows.shape[0] == 0 and not require_first_positive:
        witness = np.zeros(dim)
        witness[0] = 1.0
        return FeasibilityResult(True, witness, 1.0)

    # Variables: c = u - v (u, v >= 0) and the margin t.
    nv = 2 * dim + 1
    n_rows = rows.shape[0] + (1 if require_first_positive else 0)
    A = np.zeros((n_rows + 2 * dim, nv))
    b = np.zeros(n_rows + 2 * dim)
    r = 0
    for a in rows:
        A[r, :dim] = -a
        A[r, dim : 2 * dim] = a
        A[r, -1] = 1.0
        r += 1
    if require_first_positive:
        A[r, 0] = -1.0
        A[r, dim] = 1.0
        A[r, -1] = 1.0
        r += 1
    for j in range(dim):
        A[r, j] = 1.0
        A[r, dim + j] = -1.0
        b[r] = 1.0
        A[r + 1, j] = -1.0
        A[r + 1, dim + j] = 1.0
        b[r + 1] = 1.0
        r += 2

    obj = np.zeros(nv)
    obj[-1] = 1.0
    res = simplex.solve(obj, A_ub=A, b_ub=b)
    if res.status != simplex.OPTIMAL:
        raise SolverError(f"margin LP ended with status {res.status}")
    c = res.x[:dim] - res.x[dim : 2 * dim]
    margin = float(res.value)
    if margin > tol:
        return FeasibilityResult(True, c, margin)
    return FeasibilityResult(False, None, margin)


def strict_feasibility(
    targets,
    competitors,
    fix_first: bool = False,
    tol: float = DEFAULT_TOL,
) -> FeasibilityResult:
    """Does some direction c strictly prefer each target over its competitors?

    `targets` is one point or one point per summand; `competitors` the
    matching competitor list(s).  With `fix_first`, c is a region-defining
    direction (first coordinate positive, normalizable to (1, x))."""
    targets, competitors = _normalize_targets(targets, competitors)
    dim = targets[0].shape[0]
    rows = []
    for tgt, comps in zip(targets, competitors):
        if tgt.shape[0] != dim:
            raise ValidationError("all target points must share one dimension")
        for u in comps:
            u = np.asarray(u, dtype=float).ravel()
            if u.shape[0] != dim:
                raise ValidationError("competitor dimension mismatch")
            rows.append(tgt - u)
    try:
        return feasible_direction(np.array(rows) if rows else [], dim, fix_first, tol)
    except SolverError as exc:
        raise SolverError(f"{exc}; targets={[t.tolist() for t in targets]}") from exc


def _normalize_targets(targets, competitors):
    first = np.asarray(targets, dtype=float)
    if first.ndim == 1:
        targets = [first]
        competitors = [list(competitors)]
    else:
        targets = [np.asarray(t, dtype=float).ravel() for t in targets]
        competitors = [list(c) for c in competitors]
    if len(targets) != len(competitors):
        raise ValidationError("need one competitor list per target point")
    return targets, competitors


def first_coordinate_reach(rows: np.ndarray, dim: int) -> float:
    """Max c_1 over directions c with c.row >= 0 per row and |c|_inf <= 1.

    Positive reach means the constraint system is at least weakly
    realizable by a direction with positive first coordinate."""
    rows = np.atleast_2d(np.asarray(rows, dtype=float)) if len(rows) else np.empty((0, dim))
    nv = 2 * dim
    A = np.zeros((rows.shape[0] + 2 * dim, nv))
    b = np.zeros(rows.shape[0] + 2 * dim)
    r = 0
    for a in rows:
        A[r, :dim] = -a
        A[r, dim:] = a
        r += 1
    for j in range(dim):
        A[r, j] = 1.0
        A[r, dim + j] = -1.0
        b[r] = 1.0
        A[r + 1, j] = -1.0
        A[r + 1, dim + j] = 1.0
        b[r + 1] = 1.0
        r += 2
    obj = np.zeros(nv)
    obj[0] = 1.0
    obj[dim] = -1.0
    res = simplex.solve(obj, A_ub=A, b_ub=b)
    if res.status != simplex.OPTIMAL:
        raise SolverError(f"weak-feasibility LP ended with status {res.status}")
    return float(res.value)


def newton_polytope(p: TropicalPolynomial) -> Polytope:
    """Stacked (bias; coeffs) rows of p's terms, in R^{n+1}; not yet reduced."""
    return Polytope(p.input_dim + 1, p.newton_points, is_reduced=False)


def layer_polytopes(layer: LayerSpec) -> list[Polytope]:
    return [newton_polytope(u) for u in layer.units]


def _dedup_within(points: np.ndarray, tol: float) -> np.ndarray:
    """Indices of representatives after merging points within `tol` (max-norm)."""
    keep: list[int] = []
    for i, p in enumerate(points):
        if not any(np.max(np.abs(points[j] - p)) <= tol for j in keep):
            keep.append(i)
    return np.array(keep, dtype=int)


def _in_convex_hull(point: np.ndarray, others: np.ndarray, tol: float) -> bool:
    """Phase-1 LP: is `point` a convex combination of `others` within tol?"""
    k = others.shape[0]
    if k == 0:
        return False
    A_eq = np.vstack([others.T, np.ones((1, k))])
    b_eq = np.concatenate([point, [1.0]])
    res = simplex.solve(np.zeros(k), A_eq=A_eq, b_eq=b_eq, feas_tol=tol)
    return res.status == simplex.OPTIMAL


def eliminate_redundant(P: Polytope, tol: float = DEFAULT_TOL) -> Polytope:
    """Minimal V-representation: keep a point iff it is not a convex
    combination of the others within tol (one small LP per undecided point).

    Near-duplicate points are merged first (first occurrence kept), then a
    random-direction sweep confirms clear vertices cheaply; only the rest
    hit the LP."""
    reps = _dedup_within(P.points, max(tol, 0.0))
    pts = P.points[reps]
    n = pts.shape[0]
    if n == 1:
        return Polytope(P.ambient_dim, pts, is_reduced=True)

    confirmed = np.zeros(n, dtype=bool)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(_PREFILTER_SEED)))
    dirs = rng.standard_normal((64 + 32 * P.ambient_dim, P.ambient_dim))
    scores = dirs @ pts.T
    order = np.argsort(scores, axis=1)
    top, second = order[:, -1], order[:, -2]
    gaps = scores[np.arange(len(dirs)), top] - scores[np.arange(len(dirs)), second]
    scale = max(1.0, float(np.max(np.abs(pts))))
    confirmed[top[gaps > max(tol, 1e-12 * scale)]] = True

    keep = []
    for i in range(n):
        if confirmed[i]:
            keep.append(i)
            continue
        others = np.delete(pts, i, axis=0)
        if not _in_convex_hull(pts[i], others, tol):
            keep.append(i)
    return Polytope(P.ambient_dim, pts[keep], is_reduced=True)


def minkowski_candidates(
    polytopes: Sequence[Polytope], cap: int = DEFAULT_CAP
) -> tuple[Polytope, dict[tuple[float, ...], list[Configuration]]]:
    """All sums of one point per summand, tagged with their configurations.

    Duplicate sum points are merged in the returned polytope but keep every
    originating configuration in the map."""
    if not polytopes:
        raise ValidationError("need at least one summand polytope")
    dim = polytopes[0].ambient_dim
    if any(P.ambient_dim != dim for P in polytopes):
        raise ValidationError("summand polytopes must share one ambient dimension")
    counts = [len(P) for P in polytopes]
    total = math.prod(counts)
    if total > cap:
        raise EnumerationCapExceeded(total, cap)

    sums = polytopes[0].points
    for P in polytopes[1:]:
        sums = (sums[:, None, :] + P.points[None, :, :]).reshape(-1, dim)
    index_grids = np.indices(counts).reshape(len(counts), -1).T

    origin: dict[tuple[float, ...], list[Configuration]] = {}
    order: list[tuple[float, ...]] = []
    for row, idx in zip(sums, index_grids):
        key = tuple(row)
        if key not in origin:
            origin[key] = []
            order.append(key)
        origin[key].append(Configuration(tuple(int(i) for i in idx)))
    unique = np.array(order, dtype=float)
    return Polytope(dim, unique, is_reduced=False), origin


def upper_hull_vertices(P: Polytope, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Region-defining vertices: points strictly maximizing some direction
    with positive first (bias) coordinate over the rest of P."""
    if P.ambient_dim < 2:
        raise ValidationError("upper-hull test needs ambient dimension >= 2")
    reps = _dedup_within(P.points, 0.0)
    pts = P.points[reps]
    kept = []
    for i in range(pts.shape[0]):
        others = np.delete(pts, i, axis=0)
        res = feasible_direction(pts[i] - others, P.ambient_dim, True, tol)
        if res.feasible:
            kept.append(pts[i])
    return np.array(kept) if kept else np.empty((0, P.ambient_dim))


def normal_cone_contains(
    P: Polytope, v, c, tol: float = DEFAULT_TOL
) -> bool:
    """True iff c.(z - v) <= tol for every point z of P."""
    v = np.asarray(v, dtype=float).ravel()
    c = np.asarray(c, dtype=float).ravel()
    if v.shape[0] != P.ambient_dim or c.shape[0] != P.ambient_dim:
        raise ValidationError("v and c must match the polytope's ambient dimension")
    if not np.any(np.max(np.abs(P.points - v), axis=1) <= 1e-12):
        raise ValidationError("v is not a listed point of the polytope")
    return bool(np.all((P.points - v) @ c <= tol))


def nonparallel_generator_count(
    segments: Iterable[tuple[Sequence[float], Sequence[float]]],
    tol: float = DEFAULT_TOL,
) -> int:
    """Number of pairwise non-parallel direction classes among the segments.

    Antiparallel directions count as parallel; zero-length segments are
    excluded with a warning."""
    dirs = []
    for a, b in segments:
        d = np.asarray(b, dtype=float) - np.asarray(a, dtype=float)
        length = float(np.linalg.norm(d))
        if length <= tol:
            warnings.warn("zero-length segment excluded from generator count", stacklevel=2)
            continue
        dirs.append(d / length)
    classes: list[np.ndarray] = []
    for d in dirs:
        if not any(abs(float(d @ r)) >= 1.0 - max(tol, 1e-12) for r in classes):
            classes.append(d)
    return len(classes)
