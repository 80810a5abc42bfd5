"""Normal coordinates and quadratic generators near a static critical point.

For each focus-focus pair (E_j, Ebar_j) of Bethe roots the complex normal
coordinates of a nearby state are read off the Lax entry B:

    z_j = i B(E_j) / a'(E_j),        w_j = B(Ebar_j),

and K_j + i L_j = w_j conj(z_j). The same quantities follow quadratically
from the Lax product:

    K_j = (i/2) [BC/a'](E_j) - (i/2) [BC/a'](Ebar_j)
    L_j = -(1/2) [BC/a'](E_j) - (1/2) [BC/a'](Ebar_j)

which agrees with the coordinate route identically on real states. The
generators K_j, L_j expand over the commuting family: with dH_i the
deviations of H_1..H_{n+1} from their critical values,

    K_j = sum_i coeffsK[j, i] dH_i,     L_j = sum_i coeffsL[j, i] dH_i

to quadratic order, with the real matrices built from 1/(a'(E_j)(E_j-eps_i)).
K_j flows scale (z_j, w_j) -> (e^a z_j, e^{-a} w_j); L_j flows rotate both
by a common phase.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import bethe as bethe_mod
from . import model
from .errors import LeftNeighborhood, NotFocusFocus, SingularDeterminant

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class NormalCoords:
    z: np.ndarray          # (mff,) complex
    w: np.ndarray          # (mff,) complex
    residual: float        # conjugation cross-check on the C entry


@dataclass(frozen=True, eq=False)
class NormalGenerators:
    coeffsK: np.ndarray    # (mff, n+1) real
    coeffsL: np.ndarray    # (mff, n+1) real


def _require_pairs(bd: bethe_mod.BetheData) -> None:
    if bd.mff == 0:
        raise NotFocusFocus("the critical point has no focus-focus pair")


def normal_coordinates(params: model.ModelParams, state: model.PhaseState,
                       bd: bethe_mod.BetheData) -> NormalCoords:
    _require_pairs(bd)
    m = bd.mff
    z = np.empty(m, dtype=complex)
    w = np.empty(m, dtype=complex)
    residual = 0.0
    for l in range(m):
        iu, il = bd.pair_indices(l)
        E, Ebar = bd.roots[iu], bd.roots[il]
        su = model.lax_entries(params, state, E)
        sl = model.lax_entries(params, state, Ebar)
        z[l] = 1j * su.B / bd.aprime[iu]
        w[l] = sl.B
        # on a real state C is the conjugate-reflected B; keep the residual
        scale = 1.0 + abs(su.B) + abs(sl.B)
        residual = max(residual, abs(su.C - np.conj(w[l])) / scale)
        residual = max(
            residual, abs(sl.C - 1j * bd.aprime[il] * np.conj(z[l])) / scale
        )
    return NormalCoords(z=z, w=w, residual=float(residual))


def kl_from_normal(coords: NormalCoords):
    c = coords.w * np.conj(coords.z)
    return c.real.copy(), c.imag.copy()


def kl_quadratic(params: model.ModelParams, state: model.PhaseState,
                 bd: bethe_mod.BetheData):
    """(K, L) from BC/a' at the root pair; real-state imaginary parts checked."""
    _require_pairs(bd)
    m = bd.mff
    K = np.empty(m)
    L = np.empty(m)
    for l in range(m):
        iu, il = bd.pair_indices(l)
        su = model.lax_entries(params, state, bd.roots[iu])
        sl = model.lax_entries(params, state, bd.roots[il])
        up = su.B * su.C / bd.aprime[iu]
        lo = sl.B * sl.C / bd.aprime[il]
        Kc = 0.5j * (up - lo)
        Lc = -0.5 * (up + lo)
        scale = 1.0 + abs(Kc) + abs(Lc)
        if abs(Kc.imag) > 1e-9 * scale or abs(Lc.imag) > 1e-9 * scale:
            raise LeftNeighborhood(
                "quadratic K, L came out complex; state is not a real phase point"
            )
        K[l] = Kc.real
        L[l] = Lc.real
    return K, L


def normal_generator_coeffs(params: model.ModelParams,
                            bd: bethe_mod.BetheData) -> NormalGenerators:
    """Real matrices expanding K_j, L_j over the commuting deviations."""
    _require_pairs(bd)
    n = params.n
    m = bd.mff
    cK = np.empty((m, n + 1), dtype=complex)
    cL = np.empty((m, n + 1), dtype=complex)
    for l in range(m):
        iu, il = bd.pair_indices(l)
        E, Ebar = bd.roots[iu], bd.roots[il]
        au, al = bd.aprime[iu], bd.aprime[il]
        fu = 1.0 / (au * (E - params.epsilon))
        fl = 1.0 / (al * (Ebar - params.epsilon))
        cK[l, :n] = 1j * (fu - fl)
        cL[l, :n] = -(fu + fl)
        cK[l, n] = 1j * (2.0 / au - 2.0 / al)
        cL[l, n] = -(2.0 / au + 2.0 / al)
    worst = max(float(np.max(np.abs(cK.imag))), float(np.max(np.abs(cL.imag))))
    if worst > 1e-12 * (1.0 + float(np.max(np.abs(cK.real)))):
        raise SingularDeterminant(
            "generator matrices failed to come out real; root pairing is broken"
        )
    return NormalGenerators(coeffsK=np.real(cK), coeffsL=np.real(cL))


def classify_blocks(params: model.ModelParams, bd: bethe_mod.BetheData):
    """Williamson block list at the static point.

    Real roots give elliptic blocks with index eta = -sign(a'(E)); conjugate
    pairs give focus-focus blocks. Hyperbolic blocks cannot occur, so the
    counts satisfy m_e + 2 m_ff = n + 1 and m_h = 0.
    """
    blocks = []
    for i in range(bd.me):
        ap = bd.aprime[i].real
        blocks.append({
            "type": "elliptic",
            "root": complex(bd.roots[i]),
            "eta": -1 if ap > 0 else 1,
        })
    for l in range(bd.mff):
        iu, il = bd.pair_indices(l)
        blocks.append({
            "type": "focus-focus",
            "pair": (complex(bd.roots[iu]), complex(bd.roots[il])),
        })
    assert bd.me + 2 * bd.mff == params.n + 1
    return blocks


def synthesize_from_normal(params: model.ModelParams, bd: bethe_mod.BetheData,
                           z, w) -> model.PhaseState:
    """Build the real state whose normal coordinates are exactly (z, w).

    B is a rational function with n+1 free complex parameters (2b and the
    residues s_j^-); prescribing B at all n+1 Bethe roots pins them by one
    linear solve. At elliptic (real) roots B is prescribed to vanish. The
    s_j^z are then slaved by the Casimirs with the static orientation signs,
    which keeps the synthesized point on the real phase space.
    """
    _require_pairs(bd)
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if z.shape != (bd.mff,) or w.shape != (bd.mff,):
        raise LeftNeighborhood(
            f"need {bd.mff} normal coordinates per family, got {z.shape}, {w.shape}"
        )
    n = params.n
    targets = np.zeros(n + 1, dtype=complex)
    for l in range(bd.mff):
        iu, il = bd.pair_indices(l)
        targets[iu] = -1j * bd.aprime[iu] * z[l]
        targets[il] = w[l]
    Amat = np.empty((n + 1, n + 1), dtype=complex)
    Amat[:, 0] = 2.0
    Amat[:, 1:] = 1.0 / (bd.roots[:, None] - params.epsilon[None, :])
    try:
        sol = np.linalg.solve(Amat, targets)
    except np.linalg.LinAlgError as exc:
        raise SingularDeterminant(f"normal synthesis system: {exc}") from exc
    b = complex(sol[0])
    sm = sol[1:]
    sp = np.conj(sm)
    mod2 = np.real(sp * sm)
    if np.any(mod2 > params.s**2):
        raise LeftNeighborhood(
            "requested normal coordinates push a spin off its sphere"
        )
    sz = bd.signs * np.sqrt(params.s**2 - mod2)
    spins = np.column_stack([sm.real, -sm.imag, sz])
    # s^- = s^x - i s^y, so x = Re s^-, y = -Im s^-
    return model.make_state(params, b, spins)
