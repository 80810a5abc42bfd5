"""Core phase space of the classical Jaynes-Cummings-Gaudin model.

The model couples n classical spins to one harmonic oscillator. With
b = u + iv and spin components s_j = (s_j^x, s_j^y, s_j^z) the brackets are

    {s_j^a, s_j^b} = -eps_{abc} s_j^c,      {b, bbar} = i  <=>  {u, v} = -1/2

and the convention for time evolution is xdot = {H, x}. The n+1 commuting
Hamiltonians are

    H_{n+1} = bbar b + sum_j s_j^z
    H_j     = 2 eps_j s_j^z + (b s_j^+ + bbar s_j^-)
              + sum_{k != j} s_j . s_k / (eps_j - eps_k)

and the physical Hamiltonian is omega H_{n+1} + sum_j H_j. The Lax entries

    A(lam) = 2 lam + sum_j s_j^z / (lam - eps_j)
    B(lam) = 2 b    + sum_j s_j^- / (lam - eps_j)
    C(lam) = 2 bbar + sum_j s_j^+ / (lam - eps_j)

combine into the spectral invariant Lambda(lam) = A^2 + BC whose numerator
Q(lam) = Lambda(lam) prod_j (lam - eps_j)^2 is a polynomial of degree 2n+2
with leading coefficient 4. Flows are generated through

    udot = +1/2 dG/dv,   vdot = -1/2 dG/du,   sdot_j = grad_{s_j} G x s_j

for any real combination G = sum_i c_i H_i + c_{n+1} H_{n+1}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from . import polys
from .errors import (
    CasimirViolation,
    DegenerateRoots,
    IntegratorFailure,
    PoleAtEpsilon,
    StepSizeUnderflow,
    TooManySpins,
    ValidationError,
)

MAX_SPINS = 20

# relative guard for evaluating rational expressions near a pole
POLE_GUARD = 1e-9


@dataclass(frozen=True, eq=False)
class ModelParams:
    n: int
    s: float
    omega: float
    epsilon: np.ndarray


@dataclass(frozen=True, eq=False)
class PhaseState:
    b: complex
    spins: np.ndarray  # shape (n, 3)


@dataclass(frozen=True, eq=False)
class LaxSample:
    lam: complex
    A: complex
    B: complex
    C: complex


@dataclass(frozen=True, eq=False)
class HamiltonianVector:
    bdot: complex
    spindot: np.ndarray  # shape (n, 3)


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    b: np.ndarray          # (k,) complex
    spins: np.ndarray      # (k, n, 3)

    def state(self, i: int) -> PhaseState:
        return PhaseState(b=complex(self.b[i]), spins=self.spins[i].copy())


def make_params(n: int, s: float, omega: float, epsilon) -> ModelParams:
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValidationError(f"spin count must be a positive integer, got {n!r}")
    if n > MAX_SPINS:
        raise TooManySpins(f"n={n} exceeds the supported maximum {MAX_SPINS}")
    eps = np.asarray(epsilon, dtype=float)
    if eps.shape != (n,):
        raise ValidationError(f"epsilon must have shape ({n},), got {eps.shape}")
    if not np.all(np.isfinite(eps)):
        raise ValidationError("epsilon entries must be finite")
    scale = 1.0 + float(np.max(np.abs(eps)))
    if polys.min_pairwise_distance(eps) < 1e-9 * scale:
        raise DegenerateRoots("level splittings epsilon_j must be distinct")
    s = float(s)
    if not (np.isfinite(s) and s > 0):
        raise ValidationError(f"spin length s must be positive, got {s}")
    omega = float(omega)
    if not np.isfinite(omega):
        raise ValidationError("omega must be finite")
    eps = eps.copy()
    eps.setflags(write=False)
    return ModelParams(n=int(n), s=s, omega=omega, epsilon=eps)


def casimir_residuals(params: ModelParams, spins: np.ndarray) -> np.ndarray:
    return np.abs(np.sum(spins * spins, axis=1) - params.s**2)


def make_state(params: ModelParams, b, spins, casimir_tol: float = 1e-9) -> PhaseState:
    spins = np.asarray(spins, dtype=float)
    if spins.shape != (params.n, 3):
        raise ValidationError(
            f"spins must have shape ({params.n}, 3), got {spins.shape}"
        )
    if not np.all(np.isfinite(spins)):
        raise ValidationError("spin components must be finite")
    b = complex(b)
    res = casimir_residuals(params, spins)
    budget = casimir_tol * (1.0 + params.s**2)
    if np.any(res > budget):
        j = int(np.argmax(res))
        raise CasimirViolation(
            f"|s_{j+1}|^2 - s^2 = {res[j]:.3e} exceeds {budget:.3e}"
        )
    spins = spins.copy()
    spins.setflags(write=False)
    return PhaseState(b=b, spins=spins)


def _check_pole(params: ModelParams, lam: complex) -> None:
    d = np.abs(lam - params.epsilon)
    guard = POLE_GUARD * (1.0 + np.abs(params.epsilon))
    if np.any(d < guard):
        j = int(np.argmin(d - guard))
        raise PoleAtEpsilon(
            f"lambda={lam} is within the guard of the pole at epsilon_{j+1}"
        )


def lax_entries(params: ModelParams, state: PhaseState, lam) -> LaxSample:
    lam = complex(lam)
    _check_pole(params, lam)
    inv = 1.0 / (lam - params.epsilon)
    sx, sy, sz = state.spins.T
    sp = sx + 1j * sy
    sm = sx - 1j * sy
    A = 2.0 * lam + np.dot(sz, inv)
    B = 2.0 * state.b + np.dot(sm, inv)
    C = 2.0 * np.conj(state.b) + np.dot(sp, inv)
    return LaxSample(lam=lam, A=complex(A), B=complex(B), C=complex(C))


def spectral_invariant(params: ModelParams, state: PhaseState, lam) -> complex:
    smp = lax_entries(params, state, lam)
    return smp.A * smp.A + smp.B * smp.C


def hamiltonians(params: ModelParams, state: PhaseState) -> np.ndarray:
    """The n+1 commuting values [H_1, ..., H_n, H_{n+1}]."""
    n = params.n
    eps = params.epsilon
    spins = state.spins
    sx, sy, sz = spins.T
    u, v = state.b.real, state.b.imag
    out = np.empty(n + 1)
    # b s^+ + bbar s^- = 2 (u s^x - v s^y)
    drive = 2.0 * (u * sx - v * sy)
    gram = spins @ spins.T
    for j in range(n):
        pair = 0.0
        for k in range(n):
            if k != j:
                pair += gram[j, k] / (eps[j] - eps[k])
        out[j] = 2.0 * eps[j] * sz[j] + drive[j] + pair
    out[n] = u * u + v * v + np.sum(sz)
    return out


def physical_coeffs(params: ModelParams) -> np.ndarray:
    """Coefficient vector of the physical Hamiltonian omega H_{n+1} + sum H_j."""
    c = np.ones(params.n + 1)
    c[params.n] = params.omega
    return c


def spectral_polynomial(params: ModelParams, state: PhaseState) -> np.ndarray:
    """Coefficients (descending) of Q(lam) = Lambda(lam) prod (lam-eps_j)^2.

    Assembled exactly from the commuting values and Casimirs:

        Q = (4 lam^2 + 4 H_{n+1}) E^2 + sum_j 2 H_j E E_j + sum_j s^2 E_j^2

    with E = prod_k (lam - eps_k) and E_j = E / (lam - eps_j). Degree 2n+2,
    leading coefficient 4, real coefficients.
    """
    n = params.n
    eps = params.epsilon
    H = hamiltonians(params, state)
    E = polys.poly_from_roots(eps)
    acc = np.convolve(np.array([4.0, 0.0, 4.0 * H[n]], dtype=complex),
                      np.convolve(E, E))
    for j in range(n):
        Ej = polys.poly_from_roots(np.delete(eps, j))
        acc = np.polyadd(acc, 2.0 * H[j] * np.convolve(E, Ej))
        acc = np.polyadd(acc, params.s**2 * np.convolve(Ej, Ej))
    return np.real(acc)


def _gradients(params: ModelParams, b: complex, spins: np.ndarray, c: np.ndarray):
    """(dG/du, dG/dv, grad_{s_j} G) for G = sum c_i H_i + c_{n+1} H_{n+1}."""
    n = params.n
    eps = params.epsilon
    u, v = b.real, b.imag
    sx, sy, sz = spins.T
    ci = c[:n]
    dGdu = 2.0 * np.dot(ci, sx) + 2.0 * c[n] * u
    dGdv = -2.0 * np.dot(ci, sy) + 2.0 * c[n] * v
    grads = np.empty((n, 3))
    grads[:, 0] = 2.0 * u * ci
    grads[:, 1] = -2.0 * v * ci
    grads[:, 2] = 2.0 * eps * ci + c[n]
    # pairwise exchange part: sum_{k != j} (c_j - c_k)/(eps_j - eps_k) s_k
    diff_c = ci[:, None] - ci[None, :]
    diff_e = eps[:, None] - eps[None, :]
    np.fill_diagonal(diff_e, 1.0)
    M = diff_c / diff_e
    np.fill_diagonal(M, 0.0)
    grads += M @ spins
    return dGdu, dGdv, grads


def flow_field(params: ModelParams, state: PhaseState, coeffs) -> HamiltonianVector:
    """Hamiltonian vector field of G = sum_i coeffs[i] H_i + coeffs[n] H_{n+1}."""
    c = np.asarray(coeffs, dtype=float)
    if c.shape != (params.n + 1,):
        raise ValidationError(
            f"coeffs must have shape ({params.n + 1},), got {c.shape}"
        )
    dGdu, dGdv, grads = _gradients(params, state.b, state.spins, c)
    udot = 0.5 * dGdv
    vdot = -0.5 * dGdu
    sdot = np.cross(grads, state.spins)
    return HamiltonianVector(bdot=complex(udot + 1j * vdot), spindot=sdot)


def poisson_bracket(params: ModelParams, state: PhaseState, cF, cG) -> float:
    """{F, G} for two real combinations of the commuting family.

    Contraction of the analytic gradients:
    {F,G} = -1/2 (F_u G_v - F_v G_u) - sum_j s_j . (grad_j F x grad_j G).
    """
    cF = np.asarray(cF, dtype=float)
    cG = np.asarray(cG, dtype=float)
    Fu, Fv, gF = _gradients(params, state.b, state.spins, cF)
    Gu, Gv, gG = _gradients(params, state.b, state.spins, cG)
    osc = -0.5 * (Fu * Gv - Fv * Gu)
    spin = -np.sum(state.spins * np.cross(gF, gG))
    return float(osc + spin)


def poisson_commutation_residual(params: ModelParams, state: PhaseState,
                                 i: int, j: int) -> float:
    """|{H_i, H_j}| evaluated at the state; indices are 0-based, n = last."""
    m = params.n + 1
    if not (0 <= i < m and 0 <= j < m):
        raise ValidationError(f"flow indices must be in 0..{m - 1}")
    cF = np.zeros(m)
    cG = np.zeros(m)
    cF[i] = 1.0
    cG[j] = 1.0
    return abs(poisson_bracket(params, state, cF, cG))


def _pack(b: complex, spins: np.ndarray) -> np.ndarray:
    return np.concatenate(([b.real, b.imag], spins.ravel()))


def _unpack(params: ModelParams, y: np.ndarray):
    b = complex(y[0], y[1])
    spins = y[2:].reshape(params.n, 3)
    return b, spins


def evolve(params: ModelParams, state: PhaseState, coeffs, duration: float,
           samples: int = 2, rtol: float = 1e-10, atol: float = 1e-12,
           casimir_alarm: float = 1e-9) -> Trajectory:
    """Integrate the flow of G = sum coeffs[i] H_i for the given duration.

    Uses DOP853. ``samples`` output rows span [0, duration] inclusive
    (duration may be negative). The Casimirs are monitored on the output
    rows; drifting off the spin spheres beyond ``casimir_alarm`` raises.
    """
    c = np.asarray(coeffs, dtype=float)
    if c.shape != (params.n + 1,):
        raise ValidationError(
            f"coeffs must have shape ({params.n + 1},), got {c.shape}"
        )
    if samples < 2:
        raise ValidationError("samples must be at least 2")
    n = params.n
    eps = params.epsilon
    ci = c[:n]
    cn = c[n]
    diff_c = ci[:, None] - ci[None, :]
    diff_e = eps[:, None] - eps[None, :]
    np.fill_diagonal(diff_e, 1.0)
    M = diff_c / diff_e
    np.fill_diagonal(M, 0.0)
    two_eps_c = 2.0 * eps * ci

    def rhs(_t, y):
        u, v = y[0], y[1]
        spins = y[2:].reshape(n, 3)
        sx = spins[:, 0]
        sy = spins[:, 1]
        udot = 0.5 * (-2.0 * np.dot(ci, sy) + 2.0 * cn * v)
        vdot = -0.5 * (2.0 * np.dot(ci, sx) + 2.0 * cn * u)
        grads = np.empty((n, 3))
        grads[:, 0] = 2.0 * u * ci
        grads[:, 1] = -2.0 * v * ci
        grads[:, 2] = two_eps_c + cn
        grads += M @ spins
        sdot = np.cross(grads, spins)
        return np.concatenate(([udot, vdot], sdot.ravel()))

    t_eval = np.linspace(0.0, duration, samples)
    sol = solve_ivp(
        rhs,
        (0.0, duration),
        _pack(state.b, state.spins),
        method="DOP853",
        t_eval=t_eval,
        rtol=rtol,
        atol=atol,
        dense_output=False,
    )
    if not sol.success:
        msg = sol.message or "integration failed"
        if "step size" in msg.lower():
            raise StepSizeUnderflow(msg)
        raise IntegratorFailure(msg)

    k = sol.t.size
    b = sol.y[0] + 1j * sol.y[1]
    spins = sol.y[2:].T.reshape(k, n, 3)
    worst = 0.0
    for row in spins:
        worst = max(worst, float(np.max(casimir_residuals(params, row))))
    if worst > casimir_alarm * (1.0 + params.s**2):
        raise CasimirViolation(
            f"Casimir drift {worst:.3e} along the trajectory exceeds the alarm"
        )
    return Trajectory(times=sol.t.copy(), b=b, spins=spins)
