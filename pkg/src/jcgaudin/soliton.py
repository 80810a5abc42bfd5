"""Exact solutions on the pinched torus of a purely focus-focus critical point.

When every Bethe root is complex (m_e = 0, n + 1 = 2m) the level set of the
critical values is a product of m two dimensional pinched tori. Points on it
are parametrized by 2m amplitudes X_l, one per root E_l, obeying the pairing
constraint conj(X_l) X_lbar = -1/4. The commuting flows act diagonally:

    X_l(t) = X_l(0) exp( i sum_i s e_i t_i/(E_l - eps_i) - i t_{n+1} ),

and the normal flow of pair j scales X_j -> e^a X_j, X_jbar -> e^{-a} X_jbar
(K_j) or rotates both by e^{i theta} (L_j), leaving every other amplitude
unchanged. Normal-flow maps are therefore stored as accumulated real
exponents and applied lazily, so composing many maps never erodes the
pairing constraint.

Reconstruction of the phase-space point solves the interpolation conditions

    Pminus(E_l) = bbar X_l Pplus(E_l),   l = 1..2m,

for the monic polynomials Pminus (degree m) and bbar Pplus (degree m-1);
the divisor of the state is the joint root set of Pminus and Pplus. The Lax
entry C also has a closed determinant form built from the bordered
Vandermonde matrices D_1(lambda), D_2(lambda) and the corner determinant
D_{n+1}, together with large-amplitude asymptotics used to probe the
pinch.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np

from . import bethe as bethe_mod
from . import model, polys
from .errors import (
    DivisionResidue,
    NegativeBBbar,
    NoConvergence,
    NotFocusFocus,
    OscillatorVanishes,
    PoleAtEpsilon,
    SingularDeterminant,
    ValidationError,
    ZeroAmplitude,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SolitonState:
    bethe: bethe_mod.BetheData
    x0: np.ndarray          # (2m,) complex amplitudes at zero times
    shift_a: np.ndarray     # (m,) accumulated hyperbolic exponents
    shift_theta: np.ndarray # (m,) accumulated rotation angles


@dataclass(frozen=True, eq=False)
class SolitonPolys:
    pminus: np.ndarray      # (m+1,) monic descending
    pplus: np.ndarray       # (m,)   monic descending
    d0: complex
    dn1: complex


def _frozen(arr) -> np.ndarray:
    arr = np.array(arr)
    arr.setflags(write=False)
    return arr


def init_soliton(params: model.ModelParams, bd: bethe_mod.BetheData,
                 x0) -> SolitonState:
    """Build a pinched-torus point from m upper-half amplitudes (partners are
    filled from the pairing constraint) or all 2m amplitudes (then checked)."""
    if bd.me != 0:
        raise NotFocusFocus(
            "the pinched torus needs a purely focus-focus critical point "
            f"(found {bd.me} elliptic blocks)"
        )
    m = bd.mff
    x0 = np.asarray(x0, dtype=complex)
    if x0.shape == (m,):
        if np.any(np.abs(x0) < 1e-150):
            raise ZeroAmplitude("soliton amplitudes must be nonzero")
        x0 = np.concatenate([x0, -0.25 / np.conj(x0)])
    elif x0.shape == (2 * m,):
        if np.any(np.abs(x0) < 1e-150):
            raise ZeroAmplitude("soliton amplitudes must be nonzero")
        viol = np.abs(np.conj(x0[:m]) * x0[m:] + 0.25)
        if np.any(viol > 1e-9):
            raise ValidationError(
                "amplitudes violate the pairing constraint conj(X) Xbar = -1/4"
            )
    else:
        raise ValidationError(
            f"x0 must carry {m} or {2 * m} amplitudes, got shape {x0.shape}"
        )
    return SolitonState(
        bethe=bd,
        x0=_frozen(x0),
        shift_a=_frozen(np.zeros(m)),
        shift_theta=_frozen(np.zeros(m)),
    )


def normal_flow_map(sol: SolitonState, pair: int, a: float = 0.0,
                    theta: float = 0.0) -> SolitonState:
    """Compose the K_pair flow by a and the L_pair flow by theta (lazily)."""
    m = sol.bethe.mff
    if not (0 <= pair < m):
        raise ValidationError(f"pair index {pair} out of range 0..{m - 1}")
    sa = sol.shift_a.copy()
    st = sol.shift_theta.copy()
    sa[pair] += a
    st[pair] += theta
    return replace(sol, shift_a=_frozen(sa), shift_theta=_frozen(st))


def amplitudes_at(params: model.ModelParams, sol: SolitonState,
                  times) -> np.ndarray:
    """Amplitudes after flowing each commuting Hamiltonian by times[i].

    Evaluated fresh from X(0) and the accumulated normal shifts on every
    call; repeated normal_flow_map compositions therefore cost nothing in
    accuracy."""
    t = np.asarray(times, dtype=float)
    if t.shape != (params.n + 1,):
        raise ValidationError(
            f"times must have shape ({params.n + 1},), got {t.shape}"
        )
    bd = sol.bethe
    m = bd.mff
    se = params.s * bd.signs
    phase = (se * t[:params.n] / (bd.roots[:, None] - params.epsilon)).sum(axis=1)
    phase = phase - t[params.n]
    shift = np.concatenate([
        sol.shift_a + 1j * sol.shift_theta,
        -sol.shift_a + 1j * sol.shift_theta,
    ])
    return sol.x0 * np.exp(1j * phase + shift)


def _solve_interpolation(bd: bethe_mod.BetheData, X: np.ndarray):
    """Monic Pminus and q = bbar Pplus from the 2m interpolation conditions."""
    m = bd.mff
    roots = bd.roots
    powers = roots[:, None] ** np.arange(m)[None, :]
    A = np.empty((2 * m, 2 * m), dtype=complex)
    A[:, :m] = powers
    A[:, m:] = -X[:, None] * powers
    rhs = -roots**m
    # row equilibration: keeps the system well scaled at extreme amplitudes
    rs = np.max(np.abs(A), axis=1)
    rs = np.where(rs == 0, 1.0, rs)
    try:
        sol = np.linalg.solve(A / rs[:, None], rhs / rs)
    except np.linalg.LinAlgError as exc:
        raise SingularDeterminant(f"soliton interpolation system: {exc}") from exc
    resid = np.max(np.abs(A @ sol - rhs) / (1.0 + np.abs(rhs)))
    if resid > 1e-6:
        raise SingularDeterminant(
            f"soliton interpolation residual {resid:.3e} too large"
        )
    pminus = np.concatenate([[1.0], sol[:m][::-1]])    # descending, monic
    q = sol[m:][::-1]                                  # descending, degree m-1
    return pminus, q


def reconstruct_state(params: model.ModelParams, sol: SolitonState, times):
    """Phase-space point of the soliton at the given times.

    Returns (state, polys). The oscillator weight bbar b is recomputed from
    an independent residue sum over the Pminus divisor and must agree with
    |bbar|^2; the spins come from residues of the reconstructed A and C."""
    bd = sol.bethe
    m = bd.mff
    n = params.n
    eps = params.epsilon
    X = amplitudes_at(params, sol, times)
    pminus, q = _solve_interpolation(bd, X)
    bbar = complex(q[0])
    if abs(bbar) < 1e-150:
        raise OscillatorVanishes("reconstructed oscillator amplitude is zero")
    pplus = q / bbar

    lam_minus = polys.newton_polish(pminus, polys.aberth(pminus))
    lam_plus = (
        polys.newton_polish(pplus, polys.aberth(pplus)) if m > 1
        else np.zeros(0, dtype=complex)
    )

    dpminus = np.polyder(pminus)
    weights = np.array([
        np.prod(lam - bd.roots)
        / (np.polyval(dpminus, lam) * np.polyval(pplus, lam))
        for lam in lam_minus
    ])
    bb = 4.0 * np.sum(weights)
    if bb.real <= 0.0 or abs(bb - abs(bbar) ** 2) > 1e-6 * (1.0 + abs(bbar) ** 2):
        raise NegativeBBbar(
            f"oscillator weight routes disagree: sum {bb}, |bbar|^2 {abs(bbar)**2}"
        )

    # Splus: degree m-1 interpolant carrying the upper triangular entry
    splus = np.zeros(m, dtype=complex)
    for i, lam in enumerate(lam_minus):
        splus = np.polyadd(
            splus, weights[i] * polys.poly_from_roots(np.delete(lam_minus, i))
        )
    P = np.polyadd(
        2.0 * polys.poly_from_roots(bd.roots), -4.0 * np.convolve(splus, pplus)
    )

    sz_c = np.array([
        np.polyval(P, eps[j]) / np.prod(np.delete(eps[j] - eps, j))
        for j in range(n)
    ])
    scale = 1.0 + float(np.max(np.abs(sz_c)))
    if float(np.max(np.abs(sz_c.imag))) > 1e-7 * scale:
        raise DivisionResidue(
            "reconstructed s^z values failed to come out real"
        )

    lam_all = np.concatenate([lam_minus, lam_plus])
    sp = np.array([
        2.0 * bbar * np.prod(eps[j] - lam_all)
        / np.prod(np.delete(eps[j] - eps, j))
        for j in range(n)
    ])
    spins = np.column_stack([sp.real, sp.imag, sz_c.real])
    state = model.make_state(params, np.conj(bbar), spins, casimir_tol=1e-7)
    return state, SolitonPolys(
        pminus=pminus,
        pplus=pplus,
        d0=_corner_det(bd.roots, X, kind="d0"),
        dn1=_corner_det(bd.roots, X, kind="dn1"),
    )


def _corner_det(roots: np.ndarray, X: np.ndarray, kind: str) -> complex:
    m = roots.size // 2
    if kind == "d0":
        pow_cols = np.arange(m + 1)
        x_cols = np.arange(max(m - 1, 0))
    elif kind == "dn1":
        pow_cols = np.arange(m)
        x_cols = np.arange(m)
    else:
        raise ValueError(kind)
    A = np.empty((2 * m, pow_cols.size + x_cols.size), dtype=complex)
    A[:, :pow_cols.size] = roots[:, None] ** pow_cols[None, :]
    A[:, pow_cols.size:] = X[:, None] * roots[:, None] ** x_cols[None, :]
    return complex(np.linalg.det(A))


def _bordered_det(roots: np.ndarray, X: np.ndarray, lam: complex,
                  which: str) -> complex:
    """D_1(lambda) ('first') or D_2(lambda) ('second'): (2m+1) x (2m+1)."""
    m = roots.size // 2
    size = 2 * m + 1
    A = np.zeros((size, size), dtype=complex)
    if which == "first":
        A[0, :m + 1] = lam ** np.arange(m + 1)
    elif which == "second":
        A[0, m + 1:] = lam ** np.arange(m)
    else:
        raise ValueError(which)
    A[1:, :m + 1] = roots[:, None] ** np.arange(m + 1)[None, :]
    A[1:, m + 1:] = X[:, None] * roots[:, None] ** np.arange(m)[None, :]
    return complex(np.linalg.det(A))


def full_determinants(params: model.ModelParams, sol: SolitonState, times,
                      lam: complex):
    """(D_1(lam), D_2(lam), D_{n+1}) evaluated exactly."""
    X = amplitudes_at(params, sol, times)
    roots = sol.bethe.roots
    return (
        _bordered_det(roots, X, complex(lam), "first"),
        _bordered_det(roots, X, complex(lam), "second"),
        _corner_det(roots, X, "dn1"),
    )


def c_of_lambda(params: model.ModelParams, sol: SolitonState, times,
                lam) -> complex:
    """Lax entry C(lambda) from the determinant route:
    C = -2 D_1 D_2 / (prod_j (lambda - eps_j) D_{n+1}^2)."""
    lam = complex(lam)
    d = np.abs(lam - params.epsilon)
    if np.any(d < model.POLE_GUARD * (1.0 + np.abs(params.epsilon))):
        raise PoleAtEpsilon(f"lambda={lam} sits on a pole of C")
    d1, d2, dn1 = full_determinants(params, sol, times, lam)
    if abs(dn1) == 0.0:
        raise SingularDeterminant("corner determinant vanished")
    return -2.0 * d1 * d2 / (np.prod(lam - params.epsilon) * dn1**2)


def asymptotic_determinants(params: model.ModelParams, sol: SolitonState,
                            times, lam: complex):
    """Leading forms of (D_1, D_2, D_{n+1}) as the canonical amplitudes grow.

    Valid when |X_j| -> infinity for the m upper roots (their partners then
    shrink through the pairing constraint); relative errors fall off like
    |X|^-2."""
    bd = sol.bethe
    m = bd.mff
    lam = complex(lam)
    X = amplitudes_at(params, sol, times)[:m]
    E = bd.roots[:m]
    Eb = bd.roots[m:]
    vsq = 1.0
    for i in range(m):
        for j in range(i + 1, m):
            vsq *= abs(E[j] - E[i]) ** 2
    xprod = np.prod(X)
    d1 = vsq * np.prod(lam - Eb) * xprod
    ssum = 0.0 + 0.0j
    for j in range(m):
        term = (Eb[j] - E[j]) / ((lam - E[j]) * X[j])
        for k in range(m):
            if k != j:
                term *= (Eb[k] - E[j]) / (E[k] - E[j])
        ssum += term
    d2 = vsq * np.prod(lam - E) * ssum * xprod
    dn1 = (-1.0) ** m * vsq * xprod
    return complex(d1), complex(d2), complex(dn1)


def asymptotic_c(params: model.ModelParams, sol: SolitonState, times,
                 lam) -> complex:
    """C(lambda) built from the asymptotic determinants (same combination)."""
    lam = complex(lam)
    d1, d2, dn1 = asymptotic_determinants(params, sol, times, lam)
    return -2.0 * d1 * d2 / (np.prod(lam - params.epsilon) * dn1**2)


def asymptotic_c_at_root(params: model.ModelParams, sol: SolitonState,
                         times, j: int) -> complex:
    """Leading C(E_j) when the canonical amplitudes are large (X_j -> inf):

        C(E_j) ~ +2 prod_k (E_j - Ebar_k)^2 / (X_j prod_i (E_j - eps_i))
    """
    bd = sol.bethe
    m = bd.mff
    if not (0 <= j < m):
        raise ValidationError(f"root index {j} out of range 0..{m - 1}")
    X = amplitudes_at(params, sol, times)[:m]
    E = bd.roots[:m]
    Eb = bd.roots[m:]
    num = np.prod((E[j] - Eb) ** 2)
    return 2.0 * num / (X[j] * np.prod(E[j] - params.epsilon))


def asymptotic_b_at_root(params: model.ModelParams, sol: SolitonState,
                         times, j: int) -> complex:
    """Leading B(E_j) in the opposite regime (X_j -> 0, partner large):

        B(E_j) ~ -8 X_j prod_k (E_j - Ebar_k)^2 / prod_i (E_j - eps_i)
    """
    bd = sol.bethe
    m = bd.mff
    if not (0 <= j < m):
        raise ValidationError(f"root index {j} out of range 0..{m - 1}")
    X = amplitudes_at(params, sol, times)[:m]
    E = bd.roots[:m]
    Eb = bd.roots[m:]
    num = np.prod((E[j] - Eb) ** 2)
    return -8.0 * X[j] * num / np.prod(E[j] - params.epsilon)


def divisor_at(params: model.ModelParams, sol: SolitonState,
               times) -> np.ndarray:
    """The n divisor points: joint roots of Pminus and Pplus at these times."""
    bd = sol.bethe
    m = bd.mff
    X = amplitudes_at(params, sol, times)
    pminus, q = _solve_interpolation(bd, X)
    bbar = complex(q[0])
    if abs(bbar) < 1e-150:
        raise OscillatorVanishes("divisor undefined where the oscillator dies")
    pplus = q / bbar
    lam_minus = polys.newton_polish(pminus, polys.aberth(pminus))
    lam_plus = (
        polys.newton_polish(pplus, polys.aberth(pplus)) if m > 1
        else np.zeros(0, dtype=complex)
    )
    return np.concatenate([lam_minus, lam_plus])


def divisor_trajectory(params: model.ModelParams, sol: SolitonState,
                       times_rows: np.ndarray):
    """Divisor motion along a precomputed schedule of time vectors.

    Rows where the reconstruction degenerates are recorded as gaps. The n
    points of each row are ordered by continuity against the last good row
    (greedy nearest matching), so columns trace individual branches."""
    times_rows = np.asarray(times_rows, dtype=float)
    k = times_rows.shape[0]
    n = params.n
    out = np.full((k, n), np.nan + 1j * np.nan, dtype=complex)
    gaps = np.zeros(k, dtype=bool)
    prev = None
    for r in range(k):
        try:
            pts = divisor_at(params, sol, times_rows[r])
        except (SingularDeterminant, OscillatorVanishes, NoConvergence):
            gaps[r] = True
            continue
        if prev is None:
            order = np.lexsort((pts.imag, pts.real))
            pts = pts[order]
        else:
            arranged = np.empty(n, dtype=complex)
            used = np.zeros(n, dtype=bool)
            # assign most-constrained first: largest minimum distance last
            for value in sorted(pts, key=lambda z: (z.real, z.imag)):
                d = np.where(used, np.inf, np.abs(prev - value))
                slot = int(np.argmin(d))
                arranged[slot] = value
                used[slot] = True
            pts = arranged
        out[r] = pts
        prev = pts
    return out, gaps
