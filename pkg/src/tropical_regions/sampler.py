"""Randomized vertex/configuration counting and solid-angle estimation.

Each trial draws a standard-normal direction and records, per summand
polytope, the index of the point maximizing it (and minimizing it, in
`full` mode).  In `upper` mode directions are flipped to nonnegative first
coordinate and only maximizers are recorded, which finds exactly the
region-defining (upper-hull) vertices of the Minkowski sum.

Directions come from deterministic per-chunk substreams (see `rng`), so
the configuration set found by the first K samples never changes when K
grows and is independent of chunk-level parallelism.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import rng
from .errors import UnboundedSampleSizeError, ValidationError
from .geometry import Polytope
from .tropical import DEFAULT_TOL, Configuration, LayerSpec

MODES = ("full", "upper")


@dataclass(frozen=True)
class SamplePlan:
    """How to run a sampling count: K trials at failure budget delta."""

    K: int
    delta: float = 0.01
    mode: str = "upper"
    seed: int = 0

    def __post_init__(self):
        if self.K < 1:
            raise ValidationError(f"K must be >= 1, got {self.K}")
        if not (0.0 < self.delta < 1.0):
            raise ValidationError(f"delta must lie in (0, 1), got {self.delta}")
        if self.mode not in MODES:
            raise ValidationError(f"mode must be one of {MODES}, got {self.mode!r}")


@dataclass(frozen=True)
class CountResult:
    """Distinct configurations found, plus the degenerate-tie tally."""

    configurations: frozenset[Configuration]
    samples: int
    degenerate_ties: int
    mode: str
    seed: int

    @property
    def count(self) -> int:
        return len(self.configurations)


@dataclass(frozen=True)
class AngleSpectrum:
    """Monte-Carlo solid-angle estimates for normal cones at given vertices.

    `full[i]` estimates the gaussian mass of the normal cone at vertex i;
    `truncated[i]` the mass of its restriction to nonnegative first
    coordinate.  Standard errors are binomial."""

    vertices: np.ndarray
    full: np.ndarray
    truncated: np.ndarray
    stderr_full: np.ndarray
    stderr_truncated: np.ndarray
    samples: int
    seed: int


def _point_matrices(subject) -> list[np.ndarray]:
    if isinstance(subject, LayerSpec):
        return [np.asarray(u.newton_points) for u in subject.units]
    mats = []
    dim = None
    for P in subject:
        if not isinstance(P, Polytope):
            raise ValidationError("subject must be a LayerSpec or a list of Polytopes")
        if dim is None:
            dim = P.ambient_dim
        elif P.ambient_dim != dim:
            raise ValidationError("summand polytopes must share one ambient dimension")
        mats.append(np.asarray(P.points))
    if not mats:
        raise ValidationError("need at least one summand polytope")
    return mats


def upper_directions(seed: int, start: int, count: int, dim: int) -> np.ndarray:
    """Directions used in upper mode: standard normals with negative first
    coordinate flipped.  The flip leaves the distribution invariant."""
    G = rng.standard_normal(seed, start, count, dim)
    G[G[:, 0] < 0] *= -1.0
    return G


def _scan_span(mats, dim, plan, tol, start, count):
    if plan.mode == "upper":
        G = upper_directions(plan.seed, start, count, dim)
    else:
        G = rng.standard_normal(plan.seed, start, count, dim)
    tie = np.zeros(count, dtype=bool)
    max_cols, min_cols = [], []
    for V in mats:
        S = G @ V.T
        max_cols.append(np.argmax(S, axis=1))
        if plan.mode == "full":
            # z_min record: the argmax under the negated direction.
            min_cols.append(np.argmax(-S, axis=1))
        k = V.shape[0]
        if k > 1:
            # kth spots pin the second-smallest and second-largest entries.
            part = np.partition(S, [1] if k <= 3 else [1, k - 2], axis=1)
            tie |= part[:, -1] - part[:, -2] <= tol
            if plan.mode == "full":
                tie |= part[:, 1] - part[:, 0] <= tol
    found = np.unique(np.column_stack(max_cols), axis=0)
    configs = {tuple(int(i) for i in row) for row in found}
    if min_cols:
        found_min = np.unique(np.column_stack(min_cols), axis=0)
        configs |= {tuple(int(i) for i in row) for row in found_min}
    return configs, int(np.count_nonzero(tie))


def sample_configurations(
    subject,
    plan: SamplePlan,
    tol: float = DEFAULT_TOL,
    threads: int = 1,
) -> CountResult:
    """Run the sampling count on a layer or a list of V-represented polytopes.

    Ties inside an argmax resolve to the lowest index and increment the
    degenerate-tie tally (one per affected sample)."""
    mats = _point_matrices(subject)
    dim = mats[0].shape[1]
    spans = rng.chunk_ranges(0, plan.K)
    if threads > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda s: _scan_span(mats, dim, plan, tol, *s), spans))
    else:
        parts = [_scan_span(mats, dim, plan, tol, *s) for s in spans]
    configs: set[tuple[int, ...]] = set()
    ties = 0
    for found, t in parts:
        configs |= found
        ties += t
    return CountResult(
        configurations=frozenset(Configuration(c) for c in configs),
        samples=plan.K,
        degenerate_ties=ties,
        mode=plan.mode,
        seed=plan.seed,
    )


def _angle_span(points, seed, start, count):
    G = rng.standard_normal(seed, start, count, points.shape[1])
    win = np.argmax(G @ points.T, axis=1)
    n = points.shape[0]
    hits_full = np.bincount(win, minlength=n)
    hits_trunc = np.bincount(win[G[:, 0] >= 0], minlength=n)
    return hits_full, hits_trunc


def estimate_solid_angles(
    P: Polytope,
    vertices=None,
    samples: int = 1_000_000,
    seed: int = 0,
    threads: int = 1,
) -> AngleSpectrum:
    """Monte-Carlo frequencies of gaussian directions landing in each
    vertex's normal cone, and in its first-coordinate-nonnegative part.

    P must be reduced (its point list the vertex set), otherwise cone
    membership by argmax is ill-defined."""
    if not P.is_reduced:
        raise ValidationError("estimate_solid_angles needs a reduced polytope; "
                              "run eliminate_redundant first")
    if samples < 1:
        raise ValidationError(f"samples must be >= 1, got {samples}")
    rows = _resolve_vertex_rows(P, vertices)

    spans = rng.chunk_ranges(0, samples)
    if threads > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda s: _angle_span(P.points, seed, *s), spans))
    else:
        parts = [_angle_span(P.points, seed, *s) for s in spans]
    hits_full = sum(p[0] for p in parts)
    hits_trunc = sum(p[1] for p in parts)

    full = hits_full[rows] / samples
    trunc = hits_trunc[rows] / samples
    return AngleSpectrum(
        vertices=P.points[rows],
        full=full,
        truncated=trunc,
        stderr_full=np.sqrt(full * (1.0 - full) / samples),
        stderr_truncated=np.sqrt(trunc * (1.0 - trunc) / samples),
        samples=samples,
        seed=seed,
    )


def _resolve_vertex_rows(P: Polytope, vertices) -> np.ndarray:
    if vertices is None:
        return np.arange(len(P))
    rows = []
    for v in vertices:
        v = np.asarray(v, dtype=float).ravel()
        match = np.nonzero(np.max(np.abs(P.points - v), axis=1) <= 1e-12)[0]
        if match.size == 0:
            raise ValidationError(f"vertex {v.tolist()} is not a point of the polytope")
        rows.append(int(match[0]))
    return np.array(rows, dtype=int)


def _smallest_k(N: int, delta: float, q: float) -> int:
    """Smallest K >= 1 with N * q**K <= delta (q in [0, 1))."""
    if N < 1:
        raise ValidationError(f"vertex count N must be >= 1, got {N}")
    if delta <= 0:
        raise ValidationError(f"delta must be > 0, got {delta}")
    if q <= 0.0 or N <= delta:
        return 1
    k = max(1, math.ceil(math.log(N / delta) / -math.log(q)))
    while k > 1 and N * q ** (k - 1) <= delta:
        k -= 1
    while N * q**k > delta:
        k += 1
    return k


def required_samples_full(angles: AngleSpectrum, N: int, delta: float) -> int:
    """Smallest K with N * max_k(1 - 2*omega_k)^K <= delta: enough samples
    for the full-hull count to find every vertex with probability 1-delta."""
    q = 1.0 - 2.0 * np.asarray(angles.full, dtype=float)
    offenders = np.nonzero(q >= 1.0)[0]
    if offenders.size:
        raise UnboundedSampleSizeError(offenders)
    return _smallest_k(N, delta, float(np.max(q)))


def required_samples_upper(angles: AngleSpectrum, N: int, delta: float) -> int:
    """Smallest K with N * max_k(1 - omega'_k)^K <= delta, over truncated
    cones of upper-hull vertices."""
    q = 1.0 - np.asarray(angles.truncated, dtype=float)
    offenders = np.nonzero(q >= 1.0)[0]
    if offenders.size:
        raise UnboundedSampleSizeError(offenders)
    return _smallest_k(N, delta, float(np.max(q)))


def required_samples_eta(eta: float, N: int, delta: float) -> int:
    """K = ceil(log(N/delta) / (2*eta)), clamped to >= 1: enough samples to
    find every vertex whose normal-cone angle is at least eta."""
    if not (0.0 < eta < 0.5):
        raise ValidationError(f"eta must lie in (0, 1/2), got {eta}")
    if N < 1:
        raise ValidationError(f"vertex count N must be >= 1, got {N}")
    if delta <= 0:
        raise ValidationError(f"delta must be > 0, got {delta}")
    return max(1, math.ceil(math.log(N / delta) / (2.0 * eta)))
