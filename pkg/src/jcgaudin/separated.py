"""Separation of variables on the open stratum where the oscillator is excited.

The separation coordinates are the n zeros lambda_k of the Lax entry C,

    C(lam) = 2 bbar prod_k (lam - lambda_k) / prod_j (lam - eps_j),

with conjugate momenta mu_k = A(lambda_k); the bracket is
{lambda_k, mu_l} = -i delta_{kl}. Knowing (lambda, mu, bbar) rebuilds the
state on the real slice: the polynomial P = A prod(lam - eps) interpolates
as

    P(lam) = 2 lam prod_j (lam - eps_j)
             + sum_i (mu_i - 2 lambda_i) prod_k (lambda_i - eps_k) ell_i(lam)

with ell_i the Lagrange basis on the lambda grid, and the spins follow from
residues of A and C at the poles. Each mu_k also sits on the spectral curve:

    mu_k^2 = 4 lambda_k^2 + 4 H_{n+1} + sum_j 2 H_j/(lambda_k - eps_j)
             + sum_j s^2/(lambda_k - eps_j)^2,

which turns into a linear solve for H_1..H_n once H_{n+1} is supplied.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import model, polys
from .errors import (
    CasimirViolation,
    CoincidentLambdas,
    DivisionResidue,
    OscillatorVanishes,
    SingularDeterminant,
    ValidationError,
)

logger = logging.getLogger(__name__)

LAMBDA_SEPARATION_TOL = 1e-7


@dataclass(frozen=True, eq=False)
class SeparatedCoords:
    lambdas: np.ndarray    # (n,) complex
    mus: np.ndarray        # (n,) complex
    bbar: complex


def _check_distinct(lambdas: np.ndarray) -> None:
    scale = 1.0 + float(np.max(np.abs(lambdas))) if lambdas.size else 1.0
    if polys.min_pairwise_distance(lambdas) < LAMBDA_SEPARATION_TOL * scale:
        raise CoincidentLambdas(
            "separation coordinates closer than the Lagrange threshold"
        )


def separated_coords(params: model.ModelParams,
                     state: model.PhaseState) -> SeparatedCoords:
    """Zeros of C and their momenta mu_k = A(lambda_k)."""
    n = params.n
    eps = params.epsilon
    sx, sy, _ = state.spins.T
    sp = sx + 1j * sy
    bbar = np.conj(state.b)
    # numerator of C/2: leading coefficient bbar, degree n
    acc = bbar * polys.poly_from_roots(eps)
    for j in range(n):
        acc = np.polyadd(acc, 0.5 * sp[j] * polys.poly_from_roots(np.delete(eps, j)))
    if abs(bbar) < 1e-12 * (1.0 + float(np.max(np.abs(sp)))):
        raise OscillatorVanishes(
            "oscillator amplitude vanishes; C has no degree-n zero set"
        )
    lambdas = polys.newton_polish(acc, polys.aberth(acc))
    order = np.lexsort((lambdas.imag, lambdas.real))
    lambdas = lambdas[order]
    _check_distinct(lambdas)
    mus = np.array(
        [model.lax_entries(params, state, lam).A for lam in lambdas]
    )
    return SeparatedCoords(lambdas=lambdas, mus=mus, bbar=complex(bbar))


def reconstruct_from_separated(params: model.ModelParams,
                               sep: SeparatedCoords,
                               residue_tol: float = 1e-8) -> model.PhaseState:
    """Rebuild the real-slice state from (lambda, mu, bbar).

    The complexified correspondence is a bijection on the open stratum, so
    the failure modes are exactly reality of the interpolated s_j^z (raises
    :class:`DivisionResidue` for off-curve momenta) and the Casimir
    constraint on the rebuilt spins.
    """
    n = params.n
    eps = params.epsilon
    lambdas = np.asarray(sep.lambdas, dtype=complex)
    mus = np.asarray(sep.mus, dtype=complex)
    if lambdas.shape != (n,) or mus.shape != (n,):
        raise ValidationError(f"need {n} separation pairs")
    _check_distinct(lambdas)
    bbar = complex(sep.bbar)
    if abs(bbar) == 0.0:
        raise OscillatorVanishes("bbar must be nonzero on the open stratum")

    # P(eps_j) via the Lagrange correction evaluated at the poles
    weights = (mus - 2.0 * lambdas) * np.array(
        [np.prod(lam - eps) for lam in lambdas]
    )
    sz_c = np.empty(n, dtype=complex)
    for j in range(n):
        acc = 0.0 + 0.0j
        for i in range(n):
            li = np.prod(np.delete(eps[j] - lambdas, i)) / np.prod(
                np.delete(lambdas[i] - lambdas, i)
            )
            acc += weights[i] * li
        sz_c[j] = acc / np.prod(np.delete(eps[j] - eps, j))
    scale = 1.0 + float(np.max(np.abs(sz_c)))
    if float(np.max(np.abs(sz_c.imag))) > residue_tol * scale:
        raise DivisionResidue(
            "interpolated s^z values are not real; momenta do not sit on a "
            "common real-slice curve"
        )
    sz = sz_c.real

    sp = np.empty(n, dtype=complex)
    for j in range(n):
        sp[j] = 2.0 * bbar * np.prod(eps[j] - lambdas) / np.prod(
            np.delete(eps[j] - eps, j)
        )
    spins = np.column_stack([sp.real, sp.imag, sz])
    # make_state enforces the Casimir budget and raises CasimirViolation
    return model.make_state(params, np.conj(bbar), spins, casimir_tol=1e-8)


def hamiltonians_from_separated(params: model.ModelParams, sep: SeparatedCoords,
                                h_np1: float) -> np.ndarray:
    """Solve the curve relations for H_1..H_n given H_{n+1}; returns complex."""
    n = params.n
    eps = params.epsilon
    lambdas = np.asarray(sep.lambdas, dtype=complex)
    mus = np.asarray(sep.mus, dtype=complex)
    _check_distinct(lambdas)
    Amat = 2.0 / (lambdas[:, None] - eps[None, :])
    rhs = (
        mus**2
        - 4.0 * lambdas**2
        - 4.0 * h_np1
        - np.sum(params.s**2 / (lambdas[:, None] - eps[None, :]) ** 2, axis=1)
    )
    try:
        return np.linalg.solve(Amat, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularDeterminant(f"separated curve system: {exc}") from exc


def interpolation_inverse(params: model.ModelParams,
                          lambdas: np.ndarray) -> np.ndarray:
    """Closed-form inverse of the Cauchy matrix 1/(lambda_k - eps_j).

    Entry (j, p) is prod_{l != p}(eps_j - lambda_l) prod_i (lambda_p - eps_i)
    divided by prod_{i != j}(eps_j - eps_i) prod_{l != p}(lambda_p - lambda_l).
    """
    n = params.n
    eps = params.epsilon
    lambdas = np.asarray(lambdas, dtype=complex)
    out = np.empty((n, n), dtype=complex)
    for j in range(n):
        denj = np.prod(np.delete(eps[j] - eps, j))
        for p in range(n):
            num = np.prod(np.delete(eps[j] - lambdas, p)) * np.prod(
                lambdas[p] - eps
            )
            den = denj * np.prod(np.delete(lambdas[p] - lambdas, p))
            out[j, p] = num / den
    return out


def separated_flow_field(params: model.ModelParams, sep: SeparatedCoords,
                         which: int):
    """(lambdadot, bbardot) under the flow of H_{which+1} (0-based index).

    ``which == n`` selects H_{n+1}, which leaves every lambda_k fixed and
    rotates bbar. For the spin flows the motion is
    d/dt_j lambda_k = i mu_k (Binv)_{j k} with the closed-form Cauchy inverse.
    """
    n = params.n
    if not (0 <= which <= n):
        raise ValidationError(f"flow index must be in 0..{n}")
    lambdas = np.asarray(sep.lambdas, dtype=complex)
    mus = np.asarray(sep.mus, dtype=complex)
    bbar = complex(sep.bbar)
    if which == n:
        return np.zeros(n, dtype=complex), 1j * bbar
    _check_distinct(lambdas)
    binv = interpolation_inverse(params, lambdas)
    lambdadot = 1j * mus * binv[which, :]
    eps = params.epsilon
    bbardot = (
        2j * bbar * np.prod(eps[which] - lambdas)
        / np.prod(np.delete(eps[which] - eps, which))
    )
    return lambdadot, complex(bbardot)
