"""Max-plus polynomial arithmetic and piecewise-linear layer models.

A max-plus (tropical) polynomial is a finite maximum of affine terms
``b_i + c_i . x``.  ReLU, leaky-ReLU and maxout units are exactly such
polynomials, so a layer is a list of them over a common input dimension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import ValidationError

# Absolute tolerance used wherever a `tol` parameter has a default.
DEFAULT_TOL = 1e-9


def _as_float_vector(values, what: str) -> tuple[float, ...]:
    vec = tuple(float(v) for v in np.asarray(values, dtype=float).ravel())
    if not all(math.isfinite(v) for v in vec):
        raise ValidationError(f"{what} must be finite, got {values!r}")
    return vec


@dataclass(frozen=True)
class TropicalTerm:
    """One affine term ``bias + coeffs . x`` under the max."""

    bias: float
    coeffs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "bias", float(self.bias))
        object.__setattr__(self, "coeffs", _as_float_vector(self.coeffs, "term coefficients"))
        if not math.isfinite(self.bias):
            raise ValidationError(f"term bias must be finite, got {self.bias!r}")

    def __call__(self, x: Sequence[float]) -> float:
        return self.bias + float(np.dot(self.coeffs, x))


@dataclass(frozen=True)
class TropicalPolynomial:
    """Maximum of affine terms over a fixed input dimension.

    Exact-duplicate terms are dropped at construction (first occurrence
    kept), so ``rank == len(terms)``.  Near-duplicates survive here; the
    geometry layer's redundancy elimination owns tolerance policy.
    """

    input_dim: int
    terms: tuple[TropicalTerm, ...]

    def __post_init__(self):
        if self.input_dim < 1:
            raise ValidationError(f"input_dim must be >= 1, got {self.input_dim}")
        terms = tuple(
            t if isinstance(t, TropicalTerm) else TropicalTerm(t[0], tuple(t[1]))
            for t in self.terms
        )
        if not terms:
            raise ValidationError("a tropical polynomial needs at least one term")
        for t in terms:
            if len(t.coeffs) != self.input_dim:
                raise ValidationError(
                    f"term {t} has {len(t.coeffs)} coefficients, expected {self.input_dim}"
                )
        seen: set[tuple] = set()
        unique = []
        for t in terms:
            key = (t.bias, t.coeffs)
            if key not in seen:
                seen.add(key)
                unique.append(t)
        object.__setattr__(self, "terms", tuple(unique))

    @property
    def rank(self) -> int:
        return len(self.terms)

    @property
    def is_degenerate(self) -> bool:
        """True when all terms share one gradient: the function is affine
        (a zero-weight ReLU is the canonical case) and has exactly one
        linear region."""
        first = self.terms[0].coeffs
        return all(t.coeffs == first for t in self.terms)

    @cached_property
    def bias_vector(self) -> np.ndarray:
        arr = np.array([t.bias for t in self.terms], dtype=float)
        arr.flags.writeable = False
        return arr

    @cached_property
    def coeff_matrix(self) -> np.ndarray:
        arr = np.array([t.coeffs for t in self.terms], dtype=float)
        arr.flags.writeable = False
        return arr

    @cached_property
    def newton_points(self) -> np.ndarray:
        """Stacked ``(bias; coeffs)`` rows in R^{n+1}, bias coordinate first."""
        arr = np.column_stack([self.bias_vector, self.coeff_matrix])
        arr.flags.writeable = False
        return arr


@dataclass(frozen=True)
class UnitInfo:
    """How a unit was built; `degenerate` marks affine (single-region) units."""

    kind: str = "raw"
    alpha: float | None = None
    k: int | None = None
    degenerate: bool = False


@dataclass(frozen=True)
class LayerSpec:
    """A layer: m max-plus polynomials over a shared input dimension."""

    input_dim: int
    units: tuple[TropicalPolynomial, ...]
    info: tuple[UnitInfo, ...] = field(default=())

    def __post_init__(self):
        units = tuple(self.units)
        if not units:
            raise ValidationError("a layer needs at least one unit")
        for i, u in enumerate(units):
            if u.input_dim != self.input_dim:
                raise ValidationError(
                    f"unit {i} has input_dim {u.input_dim}, layer expects {self.input_dim}"
                )
        object.__setattr__(self, "units", units)
        info = tuple(self.info)
        if not info:
            info = tuple(UnitInfo(degenerate=u.is_degenerate) for u in units)
        elif len(info) != len(units):
            raise ValidationError("info must have one entry per unit")
        object.__setattr__(self, "info", info)

    @property
    def width(self) -> int:
        return len(self.units)

    @property
    def ranks(self) -> tuple[int, ...]:
        return tuple(u.rank for u in self.units)


@dataclass(frozen=True)
class Configuration:
    """One chosen term index per unit; the combinatorial identity of a
    candidate linear region / Minkowski-sum vertex."""

    indices: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if any(i < 0 for i in idx):
            raise ValidationError(f"configuration indices must be >= 0, got {idx}")
        object.__setattr__(self, "indices", idx)

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)


def make_relu(w: Sequence[float], b: float) -> TropicalPolynomial:
    """max(0, w.x + b) as a rank-2 polynomial: terms (0, 0) and (b, w)."""
    w = _as_float_vector(w, "relu weights")
    if not w:
        raise ValidationError("relu weights must have length >= 1")
    if not math.isfinite(float(b)):
        raise ValidationError(f"relu bias must be finite, got {b!r}")
    zero = TropicalTerm(0.0, tuple(0.0 for _ in w))
    return TropicalPolynomial(len(w), (zero, TropicalTerm(float(b), w)))


def make_leaky_relu(w: Sequence[float], b: float, alpha: float) -> TropicalPolynomial:
    """max(alpha*(w.x + b), w.x + b) with 0 < alpha < 1."""
    alpha = float(alpha)
    if not (0.0 < alpha < 1.0):
        raise ValidationError(f"alpha must lie strictly in (0, 1), got {alpha}")
    w = _as_float_vector(w, "leaky relu weights")
    if not w:
        raise ValidationError("leaky relu weights must have length >= 1")
    b = float(b)
    if not math.isfinite(b):
        raise ValidationError(f"leaky relu bias must be finite, got {b!r}")
    low = TropicalTerm(alpha * b, tuple(alpha * wi for wi in w))
    return TropicalPolynomial(len(w), (low, TropicalTerm(b, w)))


def make_maxout(W, b: Sequence[float]) -> TropicalPolynomial:
    """max_j (W_j . x + b_j) from a k x n weight matrix and k biases."""
    W = np.asarray(W, dtype=float)
    b = np.asarray(b, dtype=float).ravel()
    if W.ndim != 2 or W.shape[0] < 1:
        raise ValidationError(f"maxout weights must be a k x n matrix, got shape {W.shape}")
    if b.shape[0] != W.shape[0]:
        raise ValidationError(
            f"maxout needs one bias per row: {W.shape[0]} rows, {b.shape[0]} biases"
        )
    if not (np.isfinite(W).all() and np.isfinite(b).all()):
        raise ValidationError("maxout weights and biases must be finite")
    terms = tuple(TropicalTerm(float(bj), tuple(row)) for row, bj in zip(W, b))
    return TropicalPolynomial(W.shape[1], terms)


def evaluate(p: TropicalPolynomial, x: Sequence[float]) -> float:
    """max_i (b_i + c_i . x)."""
    x = np.asarray(x, dtype=float).ravel()
    if x.shape[0] != p.input_dim:
        raise ValidationError(f"expected input of dimension {p.input_dim}, got {x.shape[0]}")
    return float(np.max(p.bias_vector + p.coeff_matrix @ x))


def evaluate_batch(p: TropicalPolynomial, X: np.ndarray) -> np.ndarray:
    """Vectorized evaluate over rows of X (shape (N, input_dim))."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != p.input_dim:
        raise ValidationError(f"expected inputs of shape (N, {p.input_dim}), got {X.shape}")
    return np.max(X @ p.coeff_matrix.T + p.bias_vector, axis=1)


def active_terms(p: TropicalPolynomial, x: Sequence[float], tol: float = DEFAULT_TOL) -> frozenset[int]:
    """Indices of terms within `tol` of the maximum at x.

    Two or more active terms means x lies on the polynomial's tropical
    hypersurface (up to tol)."""
    if tol < 0:
        raise ValidationError(f"tol must be >= 0, got {tol}")
    x = np.asarray(x, dtype=float).ravel()
    if x.shape[0] != p.input_dim:
        raise ValidationError(f"expected input of dimension {p.input_dim}, got {x.shape[0]}")
    vals = p.bias_vector + p.coeff_matrix @ x
    return frozenset(int(i) for i in np.nonzero(vals >= vals.max() - tol)[0])


def trop_add(p: TropicalPolynomial, q: TropicalPolynomial) -> TropicalPolynomial:
    """Tropical sum: pointwise max; the term list is the (deduplicated) union."""
    if p.input_dim != q.input_dim:
        raise ValidationError(f"dimension mismatch: {p.input_dim} vs {q.input_dim}")
    return TropicalPolynomial(p.input_dim, p.terms + q.terms)


def trop_mul(p: TropicalPolynomial, q: TropicalPolynomial) -> TropicalPolynomial:
    """Tropical product: ordinary sum of functions; terms are all pairwise sums."""
    if p.input_dim != q.input_dim:
        raise ValidationError(f"dimension mismatch: {p.input_dim} vs {q.input_dim}")
    terms = tuple(
        TropicalTerm(tp.bias + tq.bias, tuple(a + b for a, b in zip(tp.coeffs, tq.coeffs)))
        for tp in p.terms
        for tq in q.terms
    )
    return TropicalPolynomial(p.input_dim, terms)


def layer_pattern(
    layer: LayerSpec, x: Sequence[float], tol: float = DEFAULT_TOL
) -> tuple[Configuration, bool]:
    """Per-unit argmax term indices at x, ties broken to the smallest index.

    Returns (configuration, tied) where `tied` reports whether any unit had
    two terms within tol of its maximum."""
    x = np.asarray(x, dtype=float).ravel()
    if x.shape[0] != layer.input_dim:
        raise ValidationError(
            f"expected input of dimension {layer.input_dim}, got {x.shape[0]}"
        )
    if not np.isfinite(x).all():
        raise ValidationError("input must be finite")
    indices = []
    tied = False
    for unit in layer.units:
        vals = unit.bias_vector + unit.coeff_matrix @ x
        best = int(np.argmax(vals))
        indices.append(best)
        if np.count_nonzero(vals >= vals[best] - tol) > 1:
            tied = True
    return Configuration(tuple(indices)), tied


def layer_patterns_batch(layer: LayerSpec, X: np.ndarray) -> np.ndarray:
    """Argmax pattern matrix (N, m) over rows of X; ties to smallest index."""
    X = np.asarray(X, dtype=float)
    cols = [
        np.argmax(X @ unit.coeff_matrix.T + unit.bias_vector, axis=1)
        for unit in layer.units
    ]
    return np.column_stack(cols)


def layer_from_units(
    units: Iterable[TropicalPolynomial], info: Iterable[UnitInfo] | None = None
) -> LayerSpec:
    units = tuple(units)
    return LayerSpec(units[0].input_dim, units, tuple(info) if info is not None else ())
