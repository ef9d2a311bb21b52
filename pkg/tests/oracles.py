"""Independent brute-force references used by the test suite.

These deliberately avoid the constructions under test: Fermat points come
from fixed-point descent on the convex total-length objective, full
4-terminal trees from alternating descent over the two branch points, and
geometric extremes from dense sampling.
"""

import numpy as np


def star_length(x, terminals):
    t = np.asarray(terminals, dtype=float)
    return float(np.linalg.norm(t - np.asarray(x)[None, :], axis=1).sum())


def weiszfeld(terminals, iters=2000, x0=None):
    """Geometric median of the terminals by damped fixed-point iteration."""
    t = np.asarray(terminals, dtype=float)
    x = t.mean(axis=0) if x0 is None else np.asarray(x0, dtype=float)
    for _ in range(iters):
        d = np.linalg.norm(t - x[None, :], axis=1)
        if (d < 1e-14).any():
            x = t[np.argmin(d)]
            break
        w = 1.0 / d
        x_new = (t * w[:, None]).sum(axis=0) / w.sum()
        if np.linalg.norm(x_new - x) < 1e-15:
            x = x_new
            break
        x = x_new
    return x


def fermat_oracle_length(p1, p2, p3):
    """Minimal total length of a star connecting three points.

    Descent from the centroid, then compare against the three terminals
    themselves (the convex objective attains its minimum at a terminal
    exactly when that terminal's angle is at least 2*pi/3).
    """
    ts = [np.asarray(p, dtype=float) for p in (p1, p2, p3)]
    x = weiszfeld(ts)
    cands = [star_length(x, ts)] + [star_length(t, ts) for t in ts]
    return min(cands)


def full4_oracle_length(a, b, c, d, iters=300):
    """Minimal length of a two-branch tree (a,b)-(v1)-(v2)-(c,d).

    The objective |av1|+|bv1|+|v1v2|+|cv2|+|dv2| is convex in (v1, v2).
    Alternating Weiszfeld steps give a warm start; the coupling term can
    stall coordinate descent, so a Nelder-Mead polish finishes the job.
    """
    from scipy.optimize import minimize

    a, b, c, d = (np.asarray(p, dtype=float) for p in (a, b, c, d))

    def f(x):
        v1, v2 = x[:2], x[2:]
        return (np.linalg.norm(a - v1) + np.linalg.norm(b - v1)
                + np.linalg.norm(v1 - v2)
                + np.linalg.norm(c - v2) + np.linalg.norm(d - v2))

    v1 = (a + b) / 2.0
    v2 = (c + d) / 2.0
    for _ in range(iters):
        v1n = weiszfeld([a, b, v2], iters=3, x0=v1)
        v2n = weiszfeld([c, d, v1n], iters=3, x0=v2)
        if max(np.linalg.norm(v1n - v1), np.linalg.norm(v2n - v2)) < 1e-14:
            v1, v2 = v1n, v2n
            break
        v1, v2 = v1n, v2n
    res = minimize(f, np.concatenate([v1, v2]), method="Nelder-Mead",
                   options={"xatol": 1e-12, "fatol": 1e-14,
                            "maxiter": 20000, "maxfev": 20000})
    if res.fun <= f(np.concatenate([v1, v2])):
        v1, v2 = res.x[:2], res.x[2:]
    return float(f(np.concatenate([v1, v2]))), v1, v2


def gradient_descent_star(terminals, x0, steps=20000, lr=None):
    """Plain projected gradient descent on the star length, for cross-checks."""
    t = np.asarray(terminals, dtype=float)
    x = np.asarray(x0, dtype=float).copy()
    scale = np.linalg.norm(t.std(axis=0)) + 1e-9
    lr = lr or 1e-3 * scale
    for k in range(steps):
        d = t - x[None, :]
        dist = np.linalg.norm(d, axis=1)
        if (dist < 1e-12).any():
            break
        g = -(d / dist[:, None]).sum(axis=0)
        x = x - lr * g / (1 + 0.01 * k) ** 0.5
    return x
