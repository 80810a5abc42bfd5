"""Critical points of the commuting family and their classical Bethe roots.

Static points have b = 0 and every spin pinned to a pole, s_j = (0, 0, s e_j)
with e_j = +-1. Around such a point the spectral invariant degenerates and
its double roots solve a(E) = 0 with

    a(lam) = 2 lam + sum_j s e_j / (lam - eps_j),

equivalently the vanishing of the degree n+1 polynomial

    2 lam prod_k (lam - eps_k) + s sum_j e_j prod_{k != j} (lam - eps_k).

Real roots carry elliptic blocks, conjugate pairs carry focus-focus blocks;
hyperbolic blocks cannot occur here, so m_e + 2 m_ff = n + 1 always.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass

import numpy as np

from . import model, polys
from .errors import DegenerateRoots, RootConditioning, ValidationError

logger = logging.getLogger(__name__)

# a root counts as real when its imaginary part is below this relative level
REAL_ROOT_TOL = 1e-9

# Bethe roots closer than this (relative) are treated as degenerate
ROOT_SEPARATION_TOL = 1e-7


@dataclass(frozen=True, eq=False)
class BetheData:
    """Roots of a(lam) with their pairing and block bookkeeping.

    ``roots`` holds the m_e real roots first (ascending), then the m_ff
    canonical representatives (Im > 0, sorted by real part then imaginary
    part), then their conjugates in matching order. ``pairing[i]`` is the
    index of the conjugate partner (i itself for a real root).
    """

    signs: np.ndarray      # (n,) of +-1
    roots: np.ndarray      # (n+1,) complex
    pairing: np.ndarray    # (n+1,) int
    aprime: np.ndarray     # (n+1,) complex
    me: int
    mff: int

    def pair_indices(self, l: int):
        """Index pair (upper, lower) of focus-focus pair l, 0-based."""
        if not (0 <= l < self.mff):
            raise ValidationError(f"focus pair index {l} out of range 0..{self.mff - 1}")
        return self.me + l, self.me + self.mff + l


@dataclass(frozen=True, eq=False)
class CriticalPoint:
    signs: np.ndarray
    state: model.PhaseState
    energies: np.ndarray   # (n+1,) critical values [H_1..H_n, H_{n+1}]


def check_signs(params: model.ModelParams, signs) -> np.ndarray:
    e = np.asarray(signs, dtype=int)
    if e.shape != (params.n,) or not np.all(np.abs(e) == 1):
        raise ValidationError(
            f"signs must be {params.n} entries of +-1, got {signs!r}"
        )
    return e


def static_state(params: model.ModelParams, signs) -> model.PhaseState:
    e = check_signs(params, signs)
    spins = np.zeros((params.n, 3))
    spins[:, 2] = params.s * e
    return model.make_state(params, 0.0, spins)


def critical_energies(params: model.ModelParams, signs) -> np.ndarray:
    """Values [H_1..H_n, H_{n+1}] at the static point with the given signs."""
    e = check_signs(params, signs)
    n = params.n
    eps = params.epsilon
    s = params.s
    out = np.empty(n + 1)
    for j in range(n):
        pair = 0.0
        for k in range(n):
            if k != j:
                pair += s * e[k] / (eps[j] - eps[k])
        out[j] = s * e[j] * (2.0 * eps[j] + pair)
    out[n] = s * float(np.sum(e))
    return out


def enumerate_critical_points(params: model.ModelParams):
    """Yield every static point (2^n sign choices) with its energies."""
    for combo in itertools.product((1, -1), repeat=params.n):
        e = np.asarray(combo, dtype=int)
        yield CriticalPoint(
            signs=e,
            state=static_state(params, e),
            energies=critical_energies(params, e),
        )


def a_of(params: model.ModelParams, signs, lam):
    e = check_signs(params, signs)
    lam = np.asarray(lam, dtype=complex)
    terms = (params.s * e) / (lam[..., None] - params.epsilon)
    return 2.0 * lam + np.sum(terms, axis=-1)


def a_prime(params: model.ModelParams, signs, lam):
    e = check_signs(params, signs)
    lam = np.asarray(lam, dtype=complex)
    terms = (params.s * e) / (lam[..., None] - params.epsilon) ** 2
    return 2.0 - np.sum(terms, axis=-1)


def bethe_polynomial(params: model.ModelParams, signs) -> np.ndarray:
    """Descending real coefficients of the degree n+1 Bethe polynomial."""
    e = check_signs(params, signs)
    eps = params.epsilon
    E = polys.poly_from_roots(eps)
    acc = np.convolve(np.array([2.0, 0.0], dtype=complex), E)
    for j in range(params.n):
        Ej = polys.poly_from_roots(np.delete(eps, j))
        acc = np.polyadd(acc, params.s * e[j] * Ej)
    return np.real(acc)


def solve_bethe(params: model.ModelParams, signs) -> BetheData:
    """Find, polish, classify, and pair the n+1 classical Bethe roots."""
    e = check_signs(params, signs)
    coeffs = bethe_polynomial(params, e)
    roots = polys.aberth(coeffs.astype(complex))
    # polish on the rational function a(lam) itself, not the expanded poly
    for _ in range(5):
        roots = roots - a_of(params, e, roots) / a_prime(params, e, roots)

    scale = 1.0 + float(np.max(np.abs(roots)))
    if polys.min_pairwise_distance(roots) < ROOT_SEPARATION_TOL * scale:
        raise DegenerateRoots(
            "Bethe roots closer than the resolvable separation threshold"
        )

    real_mask = np.abs(roots.imag) < REAL_ROOT_TOL * (1.0 + np.abs(roots.real))
    reals = np.sort(roots[real_mask].real)
    upper = roots[~real_mask & (roots.imag > 0)]
    lower = roots[~real_mask & (roots.imag < 0)]
    if upper.size != lower.size:
        raise RootConditioning(
            "complex Bethe roots do not split into conjugate pairs"
        )
    order = np.lexsort((upper.imag, upper.real))
    upper = upper[order]
    # match each lower root to the conjugate of an upper root and snap
    used = np.zeros(lower.size, dtype=bool)
    for z in upper:
        d = np.where(used, np.inf, np.abs(lower - np.conj(z)))
        k = int(np.argmin(d))
        if not np.isfinite(d[k]) or d[k] > 1e-6 * scale:
            raise RootConditioning(
                "conjugate partner of a Bethe root could not be identified"
            )
        used[k] = True
    me = reals.size
    mff = upper.size

    full = np.concatenate([reals.astype(complex), upper, np.conj(upper)])
    pairing = np.empty(me + 2 * mff, dtype=int)
    pairing[:me] = np.arange(me)
    pairing[me:me + mff] = me + mff + np.arange(mff)
    pairing[me + mff:] = me + np.arange(mff)

    logger.info("bethe: n=%d signs=%s me=%d mff=%d", params.n, e.tolist(), me, mff)
    return BetheData(
        signs=e,
        roots=full,
        pairing=pairing,
        aprime=a_prime(params, e, full),
        me=me,
        mff=mff,
    )


def residue_identity_check(params: model.ModelParams, bethe: BetheData) -> float:
    """Max deviation of 2 prod_k (eps_j - E_k) / prod_{k!=j} (eps_j - eps_k)
    from s e_j; an exact identity of the root set."""
    worst = 0.0
    eps = params.epsilon
    for j in range(params.n):
        num = 2.0 * np.prod(eps[j] - bethe.roots)
        den = np.prod(np.delete(eps[j] - eps, j))
        worst = max(worst, abs(num / den - params.s * bethe.signs[j]))
    return float(worst)
