"""Closed-form combinatorial upper bounds on linear-region counts.

All arithmetic is exact (Python big integers) — the binomial sums overflow
64-bit quickly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

from .errors import ValidationError


@dataclass(frozen=True)
class BoundReport:
    bound: int
    formula_branch: str
    parameters: dict = field(default_factory=dict)
    # A sharper rank-2 bound, reported alongside the generic maxout bound.
    relu_refinement: int | None = None


def _binomial_tail(top: int, upto: int) -> int:
    # comb(top, j) is 0 for j > top, so the sum saturates at 2**top.
    return sum(comb(top, j) for j in range(0, min(upto, top) + 1))


def relu_layer_bound(n: int, m: int) -> BoundReport:
    """min(2^m, sum_{j<=n} C(m, j)) for a layer of m rank-2 units on n inputs."""
    if n < 1 or m < 1:
        raise ValidationError(f"need n, m >= 1, got n={n}, m={m}")
    pattern_cap = 2**m
    hull_sum = _binomial_tail(m, n)
    if hull_sum < pattern_cap:
        bound, branch = hull_sum, "binomial-sum"
    else:
        bound, branch = pattern_cap, "pattern-cap"
    return BoundReport(bound, branch, {"n": n, "m": m})


def maxout_layer_bound(n: int, m: int, k: int) -> BoundReport:
    """min(k^m, 2 * sum_{j<=n} C(m*k*(k-1)/2, j)) for rank-k units.

    For k = 2 the rank-2-specific bound is sharper (the sum polytope is
    then centrally symmetric); it is attached as `relu_refinement`."""
    if n < 1 or m < 1:
        raise ValidationError(f"need n, m >= 1, got n={n}, m={m}")
    if k < 2:
        raise ValidationError(f"maxout rank must be >= 2, got k={k}")
    pattern_cap = k**m
    generators = m * k * (k - 1) // 2
    hull_sum = 2 * _binomial_tail(generators, n)
    if hull_sum < pattern_cap:
        bound, branch = hull_sum, "binomial-sum"
    else:
        bound, branch = pattern_cap, "pattern-cap"
    refinement = relu_layer_bound(n, m).bound if k == 2 else None
    return BoundReport(bound, branch, {"n": n, "m": m, "k": k}, relu_refinement=refinement)


def conv_layer_bound(d: int, k: int, p: int) -> BoundReport:
    """Single-channel, stride-1 convolution with ReLU activations on d x d
    images: the rank-2 layer bound with n = d^2 inputs and
    m = (d - k + 2p + 1)^2 outputs."""
    if d < 1:
        raise ValidationError(f"image side must be >= 1, got d={d}")
    if p < 0:
        raise ValidationError(f"padding must be >= 0, got p={p}")
    if not (1 <= k <= d + 2 * p):
        raise ValidationError(f"filter size k={k} must lie in [1, d + 2p = {d + 2 * p}]")
    side = d - k + 2 * p + 1
    if side < 1:
        raise ValidationError(f"nonpositive output side for d={d}, k={k}, p={p}")
    inner = relu_layer_bound(d * d, side * side)
    params = {"d": d, "k": k, "p": p, "n": d * d, "m": side * side}
    return BoundReport(inner.bound, inner.formula_branch, params)


def zonotope_face_bound(m: int, ambient: int, i: int) -> int:
    """Upper bound on i-faces of a Minkowski sum with m nonparallel edge
    directions in the given ambient dimension:
    2 * C(m, i) * sum_{j<=ambient-1-i} C(m-1-i, j)."""
    if m < 1:
        raise ValidationError(f"need m >= 1 generators, got {m}")
    if not (0 <= i <= ambient - 1):
        raise ValidationError(f"face index i={i} out of range [0, {ambient - 1}]")
    if m - 1 - i < 0:
        # comb(m, i) vanishes for i > m; i == m leaves the bare 2*C(m, m).
        return 2 * comb(m, i)
    return 2 * comb(m, i) * _binomial_tail(m - 1 - i, ambient - 1 - i)
