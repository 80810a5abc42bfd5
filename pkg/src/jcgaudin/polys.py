"""Polynomial helpers shared across the package.

Coefficient arrays follow the numpy convention: descending powers, index 0
holds the leading coefficient. Root finding uses the Aberth-Ehrlich
simultaneous iteration followed by a Newton polish; ``numpy.roots`` stays
out of production paths so the tests can use it as an independent oracle.
"""

from __future__ import annotations

import numpy as np

from .errors import NoConvergence

__all__ = [
    "poly_from_roots",
    "aberth",
    "newton_polish",
    "syndiv",
    "min_pairwise_distance",
]


def poly_from_roots(roots) -> np.ndarray:
    """Monic coefficients (descending) of the polynomial with the given roots.

    Always returns a complex array; callers that know the coefficients are
    real take the real part themselves. ``roots`` may be empty.
    """
    c = np.ones(1, dtype=complex)
    for r in np.atleast_1d(np.asarray(roots, dtype=complex)):
        c = np.convolve(c, np.array([1.0, -r], dtype=complex))
    return c


def aberth(coeffs, tol: float = 1e-13, maxiter: int = 200) -> np.ndarray:
    """All roots of a polynomial by Aberth-Ehrlich simultaneous iteration.

    Initial points sit on a spiral inside the Cauchy bound; radii are spread
    so that symmetric polynomials do not stall on a symmetric configuration.
    A point also counts as converged once its residual drops below the
    rounding floor of evaluating the polynomial there, which is as far as
    any method can push a multiple root.  Raises :class:`NoConvergence`
    when ``maxiter`` sweeps are not enough.
    """
    c = np.asarray(coeffs, dtype=complex)
    c = np.trim_zeros(c, "f")
    if c.size == 0:
        raise ValueError("zero polynomial has no roots")
    deg = c.size - 1
    if deg == 0:
        return np.zeros(0, dtype=complex)
    cn = c / c[0]
    dcn = np.polyder(cn)

    radius = 1.0 + np.max(np.abs(cn[1:]))
    k = np.arange(deg)
    angles = 2.0 * np.pi * k / deg + 0.5
    radii = radius * (0.55 + 0.4 * (k + 1.0) / deg)
    z = radii * np.exp(1j * angles)

    acn = np.abs(cn)
    for _ in range(maxiter):
        p = np.polyval(cn, z)
        dp = np.polyval(dcn, z)
        dp = np.where(dp == 0, 1e-300, dp)
        w = p / dp
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        s = np.sum(1.0 / diff, axis=1)
        denom = 1.0 - w * s
        denom = np.where(denom == 0, 1e-300, denom)
        dz = w / denom
        floor = np.polyval(acn, np.abs(z)) * np.finfo(float).eps * 8.0
        settled = np.abs(p) <= floor
        z = z - np.where(settled, 0.0, dz)
        if np.all(settled | (np.abs(dz) <= tol * (1.0 + np.abs(z)))):
            return z
    raise NoConvergence(
        f"Aberth iteration did not converge in {maxiter} sweeps (degree {deg})"
    )


def newton_polish(coeffs, roots, iters: int = 3) -> np.ndarray:
    """A few Newton steps on each root of the given polynomial."""
    c = np.asarray(coeffs, dtype=complex)
    dc = np.polyder(c)
    z = np.asarray(roots, dtype=complex).copy()
    for _ in range(iters):
        dp = np.polyval(dc, z)
        dp = np.where(dp == 0, 1e-300, dp)
        z = z - np.polyval(c, z) / dp
    return z


def syndiv(coeffs, r):
    """Synthetic division by (x - r): returns (quotient, remainder)."""
    c = np.asarray(coeffs, dtype=complex)
    q = np.empty(c.size - 1, dtype=complex)
    acc = c[0]
    for i in range(c.size - 1):
        q[i] = acc
        acc = acc * r + c[i + 1]
    return q, acc


def min_pairwise_distance(points) -> float:
    pts = np.asarray(points, dtype=complex)
    if pts.size < 2:
        return np.inf
    diff = np.abs(pts[:, None] - pts[None, :])
    np.fill_diagonal(diff, np.inf)
    return float(diff.min())
