"""Symplectic invariants of a focus-focus fiber and their flow validation.

A focus-focus block j of a critical point carries two kinds of invariants.
The diagonal pair (rho_j, gamma_j) is the modulus and phase of a closed
product over the classifying roots; it controls how the return map of the
unstable flow twists a fiber with normal-form value c_j = K_j + iL_j.  The
off-diagonal multipliers rho_z, rho_w record how the spectator pairs are
scaled by one passage along the pinch.  Together they fix the coefficients
(alpha_k, beta_k) that make a linear combination of the normal generators
2pi-periodic, the regularized one-form Omega^reg on the base, and the
monodromy jump of the action around the critical value.

Everything here is cross-checked dynamically by `in_out_experiment`, which
builds a nearby fiber, runs the large solitonic excursion with the physical
flows, and reads the multipliers off the normal coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from . import bethe as bethe_mod
from . import model, normal_form
from .errors import (LeftNeighborhood, NotFocusFocus, SingularFiber,
                     ValidationError)


@dataclass(frozen=True)
class InvariantReport:
    """Invariant data of one focus-focus block.

    alpha/beta are evaluated at the basepoint fiber c_j = rho e^{i gamma}
    unless the caller supplies another c; omega_reg lists the dK_1..dK_m
    coefficients followed by the dL_1..dL_m coefficients.  phi0 is only
    populated by the in-out experiment, together with its time lapse.
    """

    j: int
    rho: float
    gamma: float
    rho_z: np.ndarray
    rho_w: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    omega_reg: np.ndarray
    phi0: complex | None = None
    time_lapse: float | None = None


@dataclass(frozen=True)
class InOutReport:
    """Measured data of one run of the in-out experiment."""

    delta: float
    c_requested: np.ndarray
    c1_in: complex
    c1_out: complex
    phi0: complex
    time_lapse: float
    tau: float
    rho_z: np.ndarray
    rho_w: np.ndarray
    phi0_predicted: complex


def _focus_roots(bd: bethe_mod.BetheData, j: int):
    if bd.mff == 0:
        raise NotFocusFocus("critical point has no focus-focus block")
    if not 0 <= j < bd.mff:
        raise NotFocusFocus(f"focus pair index {j} out of range "
                            f"(m = {bd.mff})")
    up = bd.me + j
    lo = bd.me + bd.mff + j
    return bd.roots[up], bd.roots[lo], bd.aprime[lo]


def diagonal_invariant(params: model.ModelParams, bd: bethe_mod.BetheData,
                       j: int = 0):
    """Modulus and phase (rho_j, gamma_j) of the diagonal invariant.

    rho e^{i gamma} = -(16 / (i a'(Ebar))) (Ebar - E)^4
                      prod_{k != j} (Ebar - Ebar_k)^2 (Ebar - E_k)^2
                      / prod_i (Ebar - eps_i)^2
    with E the upper root of block j and Ebar its conjugate; gamma is
    reduced to (-pi, pi].
    """
    E, Eb, apb = _focus_roots(bd, j)
    val = -16.0 / (1j * apb) * (Eb - E) ** 4
    for k in range(bd.mff):
        if k == j:
            continue
        Ek = bd.roots[bd.me + k]
        Ebk = bd.roots[bd.me + bd.mff + k]
        val *= (Eb - Ebk) ** 2 * (Eb - Ek) ** 2
    val /= np.prod((Eb - params.epsilon) ** 2)
    return float(np.abs(val)), float(np.angle(val))


def one_spin_closed_form(s: float, eps1: float) -> complex:
    """Closed form of rho e^{i gamma} for a single spin.

    Evaluating the diagonal product at the one-spin roots
    (eps1 +- i sqrt(2s - eps1^2))/2 gives
    (8/s) (2s - eps1^2)^{3/2} (eps1 - i sqrt(2s - eps1^2)).
    A variant reading with base (2s - eps1) and opposite orientation
    circulates; it agrees with this one only at eps1 = 0, and only the
    form above reproduces the general product for eps1 != 0.
    """
    disc = 2.0 * s - eps1 ** 2
    if disc <= 0.0:
        raise NotFocusFocus("one-spin critical point is not focus-focus: "
                            f"2s - eps1^2 = {disc:g} <= 0")
    return (8.0 / s) * disc ** 1.5 * (eps1 - 1j * np.sqrt(disc))


def offdiagonal_invariants(params: model.ModelParams,
                           bd: bethe_mod.BetheData, j: int = 0):
    """Spectator multipliers (rho_z, rho_w) of block j, one pair per k != j.

    rho_z,k = ((E_k - E_j) / (E_k - Ebar_j))^2 and rho_w,k is fixed by the
    exact product identity rho_z,k conj(rho_w,k) = 1.
    """
    E, Eb, _ = _focus_roots(bd, j)
    rho_z, rho_w = [], []
    for k in range(bd.mff):
        if k == j:
            continue
        Ek = bd.roots[bd.me + k]
        rz = ((Ek - E) / (Ek - Eb)) ** 2
        rho_z.append(rz)
        rho_w.append(np.conj(1.0 / rz))
    return np.asarray(rho_z, dtype=complex), np.asarray(rho_w, dtype=complex)


def periodic_coeffs(params: model.ModelParams, bd: bethe_mod.BetheData,
                    j: int, c: complex):
    """Coefficients (alpha_k, beta_k) making the joint normal flow periodic.

    On the fiber with c_j = c the combination sum_k alpha_k K_k + beta_k L_k
    closes up after parameter 2pi: the block itself requires
    alpha_j = -(1/2pi) log(|c|/rho_j), beta_j = (arg c - gamma_j)/2pi,
    and each spectator must undo its multiplier,
    e^{-2pi (alpha_k + i beta_k)} = rho_z,k, with beta_k in (-1/2, 1/2].
    """
    c = complex(c)
    if c == 0:
        raise SingularFiber("periodic coefficients are undefined on the "
                            "critical fiber (c = 0)")
    rho, gamma = diagonal_invariant(params, bd, j)
    rho_z, _ = offdiagonal_invariants(params, bd, j)
    alpha = np.empty(bd.mff)
    beta = np.empty(bd.mff)
    alpha[j] = -np.log(np.abs(c) / rho) / (2.0 * np.pi)
    beta[j] = (np.angle(c) - gamma) / (2.0 * np.pi)
    spect = [k for k in range(bd.mff) if k != j]
    for rz, k in zip(rho_z, spect):
        alpha[k] = -np.log(np.abs(rz)) / (2.0 * np.pi)
        bk = -np.angle(rz) / (2.0 * np.pi)
        if bk <= -0.5:
            bk += 1.0
        beta[k] = bk
    return alpha, beta


def omega_form(params: model.ModelParams, bd: bethe_mod.BetheData, j: int,
               point):
    """One-form coefficients at a base point and the regularized part.

    `point` lists (K_1..K_m, L_1..L_m).  Returns (full, reg), both of
    length 2m ordered dK_1..dK_m, dL_1..dL_m: `full` are the alpha/beta
    coefficients of the one-form at the point, `reg` is what remains after
    removing the universal logarithmic singularity in c_j, evaluated in the
    critical limit: (1/2pi) log rho_j on dK_j, -gamma_j/2pi on dL_j, and
    the unchanged spectator coefficients.
    """
    pt = np.asarray(point, dtype=float).ravel()
    if pt.size != 2 * bd.mff:
        raise ValidationError(f"point must list {2 * bd.mff} values "
                              "(K_1..K_m, L_1..L_m)")
    cj = pt[j] + 1j * pt[bd.mff + j]
    alpha, beta = periodic_coeffs(params, bd, j, cj)
    rho, gamma = diagonal_invariant(params, bd, j)
    reg_a = alpha.copy()
    reg_b = beta.copy()
    reg_a[j] = np.log(rho) / (2.0 * np.pi)
    reg_b[j] = -gamma / (2.0 * np.pi)
    return np.concatenate([alpha, beta]), np.concatenate([reg_a, reg_b])


def monodromy_integral(params: model.ModelParams, bd: bethe_mod.BetheData,
                       j: int, loop_index: int, radius: float,
                       samples: int = 4096) -> float:
    """Integral of the one-form of block j around a circle in the c_k plane.

    The loop is c_k = radius e^{i a}, a from gamma_k to gamma_k + 2pi, with
    the block coefficient beta_j lifted continuously (it increases by 1
    around the loop) rather than branch-reduced.  For k = j the integral
    equals radius sin(gamma_j), the monodromy jump of the action; for
    k != j the coefficients are constants and the integral vanishes.
    """
    if radius <= 0.0:
        raise ValidationError("monodromy loop radius must be positive")
    if not 0 <= loop_index < bd.mff:
        raise NotFocusFocus(f"loop index {loop_index} out of range "
                            f"(m = {bd.mff})")
    rho, gamma = diagonal_invariant(params, bd, j)
    npts = int(samples) + 1 if int(samples) % 2 == 0 else int(samples)
    npts = max(npts, 9)
    if loop_index == j:
        a = np.linspace(gamma, gamma + 2.0 * np.pi, npts)
        coef_k = -np.log(radius / rho) / (2.0 * np.pi) * np.ones(npts)
        coef_l = (a - gamma) / (2.0 * np.pi)
    else:
        rho_z, _ = offdiagonal_invariants(params, bd, j)
        spect = [k for k in range(bd.mff) if k != j]
        rz = rho_z[spect.index(loop_index)]
        base = float(np.angle(rz))
        a = np.linspace(base, base + 2.0 * np.pi, npts)
        coef_k = -np.log(np.abs(rz)) / (2.0 * np.pi) * np.ones(npts)
        bk = -np.angle(rz) / (2.0 * np.pi)
        if bk <= -0.5:
            bk += 1.0
        coef_l = bk * np.ones(npts)
    integrand = coef_k * (-radius * np.sin(a)) + coef_l * (radius * np.cos(a))
    return float(simpson(integrand, x=a))


def invariant_report(params: model.ModelParams, bd: bethe_mod.BetheData,
                     j: int = 0, c: complex | None = None) -> InvariantReport:
    """Assemble the full invariant data of block j.

    With no fiber supplied, alpha/beta are taken at the basepoint
    c = rho e^{i gamma}, where both coefficients of the block vanish.
    """
    rho, gamma = diagonal_invariant(params, bd, j)
    rho_z, rho_w = offdiagonal_invariants(params, bd, j)
    if c is None:
        c = rho * np.exp(1j * gamma)
    alpha, beta = periodic_coeffs(params, bd, j, c)
    point = np.zeros(2 * bd.mff)
    point[j] = np.real(c)
    point[bd.mff + j] = np.imag(c)
    _, reg = omega_form(params, bd, j, point)
    return InvariantReport(j=j, rho=rho, gamma=gamma, rho_z=rho_z,
                           rho_w=rho_w, alpha=alpha, beta=beta,
                           omega_reg=reg)


def periodic_flow_times(params: model.ModelParams, bd: bethe_mod.BetheData,
                        c: complex, u, j: int = 0) -> np.ndarray:
    """Hamiltonian time vector of the periodic flow at loop parameter u.

    Combines all normal generators with the periodic coefficients of the
    fiber c_j = c, so that u in [-pi, pi] runs once along the closed
    trajectory through the pinch of block j.
    """
    gens = normal_form.normal_generator_coeffs(params, bd)
    alpha, beta = periodic_coeffs(params, bd, j, c)
    direction = alpha @ gens.coeffsK + beta @ gens.coeffsL
    return float(u) * direction


def in_out_experiment(params: model.ModelParams, bd: bethe_mod.BetheData,
                      delta: float, c_values, tol: float = 1e-8) -> InOutReport:
    """Run the large excursion numerically and measure the multipliers.

    A fiber is synthesized with z_1 = delta on the expanding direction of
    block 1 (index 0) and spectator pairs set from c_values; the flow
    alpha_1 K_1 + beta_1 L_1 is integrated for the lapse 2T that brings the
    trajectory back to |w_1| ~ delta on the contracting direction.  The
    readout reports Phi0 = w1_out conj(z1_in), the measured spectator
    multipliers z_out/z_in and w_out/w_in, and the closure prediction
    Phi0 = c_1 e^{(alpha_1 - i beta_1) tau} with tau the remainder of the
    2pi period.
    """
    if bd.me != 0:
        raise NotFocusFocus("in-out experiment needs a fully focus-focus "
                            "critical point")
    m = bd.mff
    cvals = np.asarray(c_values, dtype=complex).ravel()
    if cvals.size != m:
        raise ValidationError(f"c_values must supply {m} fiber values")
    c1 = complex(cvals[0])
    delta = float(delta)
    if delta <= 0.0:
        raise ValidationError("delta must be positive")
    if c1 == 0:
        raise SingularFiber("in-out experiment needs a regular fiber "
                            "(c_1 != 0)")
    if np.abs(c1) > delta ** 2 * (1.0 + 1e-12):
        raise ValidationError(
            f"|c_1| = {np.abs(c1):.3e} must not exceed delta^2 = "
            f"{delta ** 2:.3e}: the excursion would overrun the period")
    z = np.zeros(m, dtype=complex)
    w = np.zeros(m, dtype=complex)
    z[0] = delta
    w[0] = c1 / delta
    for k in range(1, m):
        if cvals[k] != 0:
            z[k] = np.sqrt(np.abs(cvals[k]))
            w[k] = cvals[k] / z[k]
    state_in = normal_form.synthesize_from_normal(params, bd, z, w)
    coords_in = normal_form.normal_coordinates(params, state_in, bd)
    c1_in = complex(np.conj(coords_in.z[0]) * coords_in.w[0])
    rho, gamma = diagonal_invariant(params, bd, 0)
    alpha1 = -np.log(np.abs(c1_in) / rho) / (2.0 * np.pi)
    beta1 = (np.angle(c1_in) - gamma) / (2.0 * np.pi)
    if alpha1 <= 0.0:
        raise ValidationError("fiber is not inside the unstable "
                              f"neighborhood: alpha_1 = {alpha1:g} <= 0")
    T = np.log(rho / delta ** 2) / (2.0 * alpha1)
    tau = 2.0 * np.pi - 2.0 * T
    if tau < -1e-9:
        raise ValidationError(f"negative remainder tau = {tau:g}; "
                              "reduce |c_1| or enlarge delta")
    gens = normal_form.normal_generator_coeffs(params, bd)
    direction = alpha1 * gens.coeffsK[0] + beta1 * gens.coeffsL[0]
    traj = model.evolve(params, state_in, direction, duration=2.0 * T,
                        samples=2, rtol=1e-11, atol=1e-13)
    state_out = traj.state(-1)
    coords_out = normal_form.normal_coordinates(params, state_out, bd)
    ball = 2.0 * delta
    if np.abs(coords_out.z[0]) > ball or np.abs(coords_out.w[0]) > ball:
        raise LeftNeighborhood(
            "readout point left the normal-form ball: |z1| = "
            f"{np.abs(coords_out.z[0]):.3e}, |w1| = "
            f"{np.abs(coords_out.w[0]):.3e}, 2 delta = {ball:.3e}")
    phi0 = complex(coords_out.w[0] * np.conj(coords_in.z[0]))
    c1_out = complex(np.conj(coords_out.z[0]) * coords_out.w[0])
    rho_z = np.array([coords_out.z[k] / coords_in.z[k] if coords_in.z[k] != 0
                      else np.nan + 0j for k in range(1, m)], dtype=complex)
    rho_w = np.array([coords_out.w[k] / coords_in.w[k] if coords_in.w[k] != 0
                      else np.nan + 0j for k in range(1, m)], dtype=complex)
    phi0_pred = c1_in * np.exp((alpha1 - 1j * beta1) * tau)
    return InOutReport(delta=delta, c_requested=cvals, c1_in=c1_in,
                       c1_out=c1_out, phi0=phi0, time_lapse=T, tau=tau,
                       rho_z=rho_z, rho_w=rho_w, phi0_predicted=phi0_pred)
