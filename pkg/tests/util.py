"""Shared helpers for the test suite: fixture layers and independent oracles.

The oracles here deliberately avoid the package's own LP engine (scipy
linprog / qhull instead), so cross-checks stay two-sided.
"""

import numpy as np
from scipy.optimize import linprog

import tropical_regions as tr
from tropical_regions import rng as trng


def canon(points) -> np.ndarray:
    """Rows sorted lexicographically, for set-style comparison."""
    arr = np.atleast_2d(np.asarray(points, dtype=float))
    if arr.shape[0] == 0:
        return arr
    return arr[np.lexsort(arr.T[::-1])]


def triangle_maxout() -> tr.TropicalPolynomial:
    """max(x, y, 0): three flat-bias terms, three sectors."""
    return tr.make_maxout([[1, 0], [0, 1], [0, 0]], [0, 0, 0])


def two_maxout_product_layer() -> tr.LayerSpec:
    """The rank-3 pair max(x+y, 2x, x+2y), max(0, -y, 2x-2y)."""
    p1 = tr.make_maxout([[1, 1], [2, 0], [1, 2]], [0, 0, 0])
    p2 = tr.make_maxout([[0, 0], [0, -1], [2, -2]], [0, 0, 0])
    return tr.layer_from_units([p1, p2])


def random_relu_layer(seed: int, n: int, m: int) -> tr.LayerSpec:
    draws = trng.standard_normal(seed, 0, m, n + 1)
    return tr.layer_from_units([tr.make_relu(row[:n], row[n]) for row in draws])


def random_polynomial(seed: int, n: int, k: int) -> tr.TropicalPolynomial:
    draws = trng.standard_normal(seed, 0, k, n + 1)
    return tr.TropicalPolynomial(
        n, tuple(tr.TropicalTerm(row[0], tuple(row[1:])) for row in draws)
    )


def scipy_in_hull(point, others, tol=1e-9) -> bool:
    """Independent convex-combination feasibility via scipy's HiGHS."""
    others = np.atleast_2d(np.asarray(others, dtype=float))
    k = others.shape[0]
    A_eq = np.vstack([others.T, np.ones((1, k))])
    b_eq = np.concatenate([np.asarray(point, dtype=float).ravel(), [1.0]])
    res = linprog(np.zeros(k), A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if not res.success:
        return False
    residual = np.abs(A_eq @ res.x - b_eq).max()
    return residual <= max(tol, 1e-7)


def scipy_vertex_rows(points, tol=1e-9) -> list[int]:
    points = np.atleast_2d(np.asarray(points, dtype=float))
    return [
        i
        for i in range(points.shape[0])
        if not scipy_in_hull(points[i], np.delete(points, i, axis=0), tol)
    ]


def scipy_sign_pattern_feasible(W, b, signs, tol=1e-7) -> bool:
    """Is {x : s_i (w_i.x + b_i) > 0} nonempty?  Margin LP via HiGHS:
    maximize t subject to s_i(w_i.x + b_i) >= t, t <= 1."""
    W = np.asarray(W, dtype=float)
    b = np.asarray(b, dtype=float)
    s = np.asarray(signs, dtype=float)
    m, n = W.shape
    # variables (x, t); linprog minimizes, so objective -t
    A_ub = np.hstack([-(s[:, None] * W), np.ones((m, 1))])
    b_ub = s * b
    A_cap = np.zeros((1, n + 1))
    A_cap[0, n] = 1.0
    res = linprog(
        np.concatenate([np.zeros(n), [-1.0]]),
        A_ub=np.vstack([A_ub, A_cap]),
        b_ub=np.concatenate([b_ub, [1.0]]),
        bounds=[(None, None)] * (n + 1),
        method="highs",
    )
    return bool(res.success and -res.fun > tol)


def scipy_count_sign_regions(layer: tr.LayerSpec) -> int:
    import itertools

    W = np.array([u.newton_points[1][1:] - u.newton_points[0][1:] for u in layer.units])
    b = np.array([u.newton_points[1][0] - u.newton_points[0][0] for u in layer.units])
    count = 0
    for signs in itertools.product((-1.0, 1.0), repeat=W.shape[0]):
        if scipy_sign_pattern_feasible(W, b, signs):
            count += 1
    return count


def comb_by_factorials(n: int, k: int) -> int:
    """Binomial coefficient via plain factorials (independent of math.comb)."""
    import math

    if k < 0 or k > n:
        return 0
    return math.factorial(n) // (math.factorial(k) * math.factorial(n - k))
