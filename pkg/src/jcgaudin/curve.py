"""Spectral curve of a state and action integrals over its cycles.

Every state carries the hyperelliptic curve y^2 = Lambda(lambda), where
Lambda is the spectral invariant of the Lax matrix.  Clearing the double
poles gives y^2 = Q(lambda) / prod(lambda - eps_j)^2 with Q a polynomial of
degree 2n+2; its 2n+2 roots are the branch points.  On a critical fiber the
branch points coalesce pairwise onto the n+1 roots of the classifying
function, and a nearby fiber splits each double point into a close pair.

Two families of contour integrals of sqrt(Lambda) are computed here with a
continuously tracked square root:

* A-cycles: small loops around one coalescing pair.  The integral vanishes
  with the fiber and, around the lower-half-plane pair of a focus-focus
  block, reproduces the quadratic normal-form data K + iL to first order.
* B-cycles: user-specified closed polygons threading two cuts.  Their value
  diverges logarithmically as the fiber degenerates; the divergence rate is
  the subject of the symplectic invariants.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import bethe as bethe_mod
from . import model, polys
from .errors import (BranchTrackingLoss, ContourCollision, RootConditioning,
                     SingularFiber)

# Relative root residual above which the branch points are rejected.
RESIDUAL_TOL = 1e-6

# Pair half-separations below this (relative) threshold count as coalesced.
COALESCED_TOL = 1e-12

# Clearance, relative to the curve scale, required between any contour and
# the branch points / pole locations it is not meant to touch.
CLEARANCE_TOL = 1e-6

_MAX_NODES = 1 << 17


@dataclass(frozen=True)
class SpectralCurve:
    """Branch data of y^2 = Q(lambda) together with the generating state."""

    params: model.ModelParams
    state: model.PhaseState
    Q: np.ndarray
    branch_points: np.ndarray
    pairs: tuple
    me: int
    mff: int

    @property
    def a_pairs(self):
        """Index pairs of the lower-half-plane focus clusters, one per block."""
        return tuple(self.pairs[self.me + self.mff + l] for l in range(self.mff))


@dataclass(frozen=True)
class ActionResult:
    value: complex
    converged: bool
    samples_used: int

    def __complex__(self) -> complex:
        return complex(self.value)


def _greedy_pairs(points: np.ndarray):
    """Pair 2k points by repeatedly joining the globally closest unused two."""
    k = points.size
    used = np.zeros(k, dtype=bool)
    dist = np.abs(points[:, None] - points[None, :])
    np.fill_diagonal(dist, np.inf)
    out = []
    for _ in range(k // 2):
        dist[used, :] = np.inf
        dist[:, used] = np.inf
        i, j = np.unravel_index(np.argmin(dist), dist.shape)
        used[i] = used[j] = True
        out.append((int(min(i, j)), int(max(i, j))))
    return out


def build_curve(params: model.ModelParams, state: model.PhaseState,
                bethe: bethe_mod.BetheData | None = None) -> SpectralCurve:
    """Root the spectral polynomial and pair branch points by proximity.

    The pairs are reported in the root order of the reference critical
    fiber: when `bethe` is omitted it is recomputed from the signs of the
    spin z-components of `state`, which is the natural choice for states
    obtained by perturbing a critical point.
    """
    Q = model.spectral_polynomial(params, state)
    if abs(Q[0] - 4.0) > 1e-10:
        raise RootConditioning("spectral polynomial leading coefficient "
                               f"{Q[0]!r} differs from 4")
    roots = polys.newton_polish(Q, polys.aberth(Q.astype(complex)))
    scale = max(1.0, float(np.max(np.abs(roots))))
    res = np.abs(np.polyval(Q, roots)) / (4.0 * scale ** (Q.size - 1))
    if np.max(res) > RESIDUAL_TOL:
        raise RootConditioning("branch point residual "
                               f"{np.max(res):.3e} exceeds {RESIDUAL_TOL:g}")
    if bethe is None:
        signs = tuple(1 if sz >= 0.0 else -1 for sz in state.spins[:, 2])
        bethe = bethe_mod.solve_bethe(params, signs)
    raw = _greedy_pairs(roots)
    mids = np.array([0.5 * (roots[i] + roots[j]) for i, j in raw])
    order = []
    taken = np.zeros(len(raw), dtype=bool)
    for target in bethe.roots:
        d = np.where(taken, np.inf, np.abs(mids - target))
        pick = int(np.argmin(d))
        taken[pick] = True
        order.append(raw[pick])
    return SpectralCurve(params=params, state=state, Q=Q, branch_points=roots,
                         pairs=tuple(order), me=bethe.me, mff=bethe.mff)


def _sqrt_lambda(curve: SpectralCurve, lam: np.ndarray) -> np.ndarray:
    eps = curve.params.epsilon
    denom = np.prod(lam[..., None] - eps[None, :], axis=-1)
    return np.sqrt(np.polyval(curve.Q, lam) / denom ** 2)


def _track(curve: SpectralCurve, pts: np.ndarray):
    """Follow one sheet of sqrt(Lambda) along an ordered list of points.

    Returns (values, ok); ok is False when a step was too ambiguous to
    resolve (nearly orthogonal jump), which callers treat as a request for
    finer sampling.  The initial sheet is the one closest to the diagonal
    Lax entry of the generating state, so that near a critical fiber the
    tracked root agrees with the classifying function rather than its
    negative.
    """
    f = _sqrt_lambda(curve, pts)
    a0 = model.lax_entries(curve.params, curve.state, complex(pts[0])).A
    if abs(f[0] - a0) > abs(f[0] + a0):
        f = -f
    out = np.empty_like(f)
    out[0] = f[0]
    for k in range(1, f.size):
        if abs(f[k] - out[k - 1]) <= abs(f[k] + out[k - 1]):
            out[k] = f[k]
        else:
            out[k] = -f[k]
        dot = (out[k] * np.conj(out[k - 1])).real
        if dot < 0.05 * abs(out[k]) * abs(out[k - 1]):
            return out, False
    return out, True


def _closure_ok(curve: SpectralCurve, last: complex, first: complex,
                point) -> bool:
    f = _sqrt_lambda(curve, np.asarray([point], dtype=complex))[0]
    if abs(f - last) > abs(f + last):
        f = -f
    return abs(f - first) <= abs(f + first)


def a_cycle_action(curve: SpectralCurve, pair_index: int,
                   samples: int = 2048, radius_scale: float = 1.0,
                   tol: float = 1e-9) -> ActionResult:
    """(1/2i pi) of the loop integral of sqrt(Lambda) around one focus pair.

    The contour is a circle centered between the two paired branch points,
    sized to stay well clear of every other branch point and pole; the
    trapezoid value is doubled in resolution until stable.  The result is
    normalized so that near a critical fiber it converges to K + iL of the
    selected focus-focus block.
    """
    if not 0 <= pair_index < curve.mff:
        raise ContourCollision(f"no focus pair with index {pair_index}")
    i, j = curve.a_pairs[pair_index]
    p, q = curve.branch_points[i], curve.branch_points[j]
    center = 0.5 * (p + q)
    halfsep = 0.5 * abs(p - q)
    scale = max(1.0, float(np.max(np.abs(curve.branch_points))))
    if halfsep < COALESCED_TOL * scale:
        return ActionResult(value=0j, converged=True, samples_used=0)
    others = np.delete(curve.branch_points, [i, j])
    foreign = np.concatenate([others, curve.params.epsilon.astype(complex)])
    dmin = float(np.min(np.abs(foreign - center)))
    radius = radius_scale * np.sqrt(halfsep * dmin)
    if radius < 2.0 * halfsep or radius > 0.5 * dmin:
        raise ContourCollision(
            f"cannot isolate pair {pair_index}: half-separation {halfsep:.3e},"
            f" nearest foreign point {dmin:.3e}, radius {radius:.3e}")
    n = max(64, int(samples))
    prev = None
    while True:
        theta = 2.0 * np.pi * np.arange(n) / n
        pts = center + radius * np.exp(1j * theta)
        f, ok = _track(curve, pts)
        if ok and not _closure_ok(curve, f[-1], f[0], pts[0]):
            raise BranchTrackingLoss(
                "square root did not return to its sheet around pair "
                f"{pair_index}")
        if ok:
            raw = radius / n * np.sum(f * np.exp(1j * theta))
            if prev is not None and abs(raw - prev) < tol:
                return ActionResult(value=-2j * raw, converged=True,
                                    samples_used=n)
            prev = raw
        if 2 * n > _MAX_NODES:
            if prev is None:
                raise BranchTrackingLoss(
                    "sheet tracking stayed ambiguous at the finest sampling "
                    f"around pair {pair_index}")
            return ActionResult(value=-2j * prev, converged=False,
                                samples_used=n)
        n *= 2


def _segment_distance(a: complex, b: complex, pts: np.ndarray) -> np.ndarray:
    d = b - a
    L2 = abs(d) ** 2
    if L2 == 0.0:
        return np.abs(pts - a)
    t = np.clip(((pts - a) * np.conj(d)).real / L2, 0.0, 1.0)
    return np.abs(pts - (a + t * d))


def b_cycle_action(curve: SpectralCurve, waypoints,
                   samples: int = 2048, tol: float = 1e-9) -> ActionResult:
    """(1/2i pi) of the integral of sqrt(Lambda) along a closed polygon.

    Each edge is integrated with composite Gauss-Legendre panels, tracking
    the square root continuously through the whole circuit; panel counts
    double until the value is stable.  The polygon must keep a relative
    clearance of CLEARANCE_TOL from every branch point and pole.
    """
    w = np.asarray(waypoints, dtype=complex).ravel()
    if w.size < 3:
        raise ContourCollision("a closed contour needs at least 3 waypoints")
    if abs(w[-1] - w[0]) > 0.0:
        w = np.append(w, w[0])
    sing = np.concatenate([curve.branch_points,
                           curve.params.epsilon.astype(complex)])
    scale = max(1.0, float(np.max(np.abs(curve.branch_points))))
    for a, b in zip(w[:-1], w[1:]):
        d = float(np.min(_segment_distance(a, b, sing)))
        if d < CLEARANCE_TOL * scale:
            raise ContourCollision(
                f"contour edge passes {d:.3e} from a branch point or pole")
    edges = list(zip(w[:-1], w[1:]))
    lengths = np.array([abs(b - a) for a, b in edges])
    total = float(np.sum(lengths))
    if total == 0.0:
        return ActionResult(value=0j, converged=True, samples_used=0)
    gl_x, gl_w = np.polynomial.legendre.leggauss(16)
    panels = max(1, int(samples) // (16 * len(edges)))
    prev = None
    while True:
        pts, weights = [], []
        for (a, b), length in zip(edges, lengths):
            k = max(1, int(round(panels * length * len(edges) / total)))
            for piece in range(k):
                lo = a + (b - a) * piece / k
                hi = a + (b - a) * (piece + 1) / k
                mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
                pts.append(mid + half * gl_x)
                weights.append(half * gl_w)
        pts = np.concatenate(pts)
        weights = np.concatenate(weights)
        f, ok = _track(curve, pts)
        if ok and not _closure_ok(curve, f[-1], f[0], pts[0]):
            raise BranchTrackingLoss(
                "square root did not return to its sheet along the contour")
        if ok:
            raw = np.sum(f * weights) / (2j * np.pi)
            if prev is not None and abs(raw - prev) < tol:
                return ActionResult(value=raw, converged=True,
                                    samples_used=pts.size)
            prev = raw
        if pts.size * 2 > _MAX_NODES:
            if prev is None:
                raise BranchTrackingLoss(
                    "sheet tracking stayed ambiguous at the finest sampling "
                    "along the contour")
            return ActionResult(value=prev, converged=False,
                                samples_used=pts.size)
        panels *= 2


def default_b_waypoints(curve: SpectralCurve, pair_index: int) -> np.ndarray:
    """Rectangle threading the two cuts of one focus-focus block.

    The loop encloses exactly one branch point of the upper cluster and one
    of the lower cluster of the selected block (an even count, so the
    square root closes up) while excluding every other branch point and
    pole; its value therefore changes by the residue structure of the block
    alone, which is what the invariant extraction differentiates.
    """
    if not 0 <= pair_index < curve.mff:
        raise ContourCollision(f"no focus pair with index {pair_index}")
    iu, ju = curve.pairs[curve.me + pair_index]
    il, jl = curve.pairs[curve.me + curve.mff + pair_index]
    upper = curve.branch_points[[iu, ju]]
    lower = curve.branch_points[[il, jl]]
    mid_u, mid_l = np.mean(upper), np.mean(lower)
    u = upper[int(np.argmin(np.abs(upper - mid_l)))]
    l = lower[int(np.argmin(np.abs(lower - mid_u)))]
    if abs(l - u) == 0.0:
        raise SingularFiber("focus block clusters coincide")
    keep = {int(np.argmin(np.abs(curve.branch_points - u))),
            int(np.argmin(np.abs(curve.branch_points - l)))}
    others = np.delete(curve.branch_points, sorted(keep))
    foreign = np.concatenate([others, curve.params.epsilon.astype(complex)])
    dmin = float(np.min(_segment_distance(u, l, foreign)))
    scale = max(1.0, float(np.max(np.abs(curve.branch_points))))
    width = 0.6 * dmin
    if width < 2.0 * CLEARANCE_TOL * scale:
        raise ContourCollision(
            f"foreign point {dmin:.3e} from the thread segment; the cuts "
            "cannot be threaded with the required clearance")
    d = (l - u) / abs(l - u)
    nrm = 1j * d
    return np.array([u - width * d + width * nrm,
                     l + width * d + width * nrm,
                     l + width * d - width * nrm,
                     u - width * d - width * nrm,
                     u - width * d + width * nrm])
