"""Request handlers shared by the HTTP endpoints and the CLI.

Indices in requests (focus pair, A-cycle pair, monodromy loop) are 1-based
to match the command-line documentation; everything internal is 0-based.
"""

from __future__ import annotations

import logging

import numpy as np

from .. import bethe as bethe_mod
from .. import curve as curve_mod
from .. import invariants as inv_mod
from .. import model, normal_form, soliton
from ..errors import UsageError, ValidationError
from . import schemas as S

log = logging.getLogger("jcgaudin.service")


def _params(mc: S.ModelConfig) -> model.ModelParams:
    return model.make_params(mc.n, mc.s, mc.omega, mc.epsilon)


def _signs(mc: S.ModelConfig, default=None):
    if mc.signs is not None:
        return tuple(mc.signs)
    if default is not None:
        return tuple(default)
    return tuple([1] * mc.n)


def _state(params: model.ModelParams, sd: S.StateDoc) -> model.PhaseState:
    spins = np.asarray(sd.spins, dtype=float)
    if spins.shape != (params.n, 3):
        raise ValidationError(f"state needs {params.n} spin rows of 3 "
                              f"components, got shape {spins.shape}")
    return model.make_state(params, sd.b.value(), spins)


def _state_doc(state: model.PhaseState) -> S.StateDoc:
    return S.StateDoc(b=S.Complex.of(state.b),
                      spins=[[float(v) for v in row] for row in state.spins])


def _signs_for_state(mc: S.ModelConfig, state: model.PhaseState):
    if mc.signs is not None:
        return tuple(mc.signs)
    return tuple(1 if sz >= 0.0 else -1 for sz in state.spins[:, 2])


def _bethe_response(bd: bethe_mod.BetheData) -> S.BetheResponse:
    return S.BetheResponse(
        roots=S.complex_list(bd.roots),
        pairing=[int(i) for i in bd.pairing],
        williamson=S.WilliamsonDoc(me=bd.me, mff=bd.mff),
        aprime=S.complex_list(bd.aprime),
        signs=[int(e) for e in bd.signs])


def handle_bethe(req: S.BetheRequest) -> S.BetheResponse:
    params = _params(req.model)
    bd = bethe_mod.solve_bethe(params, _signs(req.model))
    return _bethe_response(bd)


def handle_normal(req: S.NormalRequest) -> S.NormalResponse:
    params = _params(req.model)
    state = _state(params, req.state)
    bd = bethe_mod.solve_bethe(params, _signs_for_state(req.model, state))
    coords = normal_form.normal_coordinates(params, state, bd)
    K, L = normal_form.kl_quadratic(params, state, bd)
    return S.NormalResponse(z=S.complex_list(coords.z),
                            w=S.complex_list(coords.w),
                            K=[float(v) for v in K],
                            L=[float(v) for v in L])


def handle_evolve(req: S.EvolveRequest) -> S.EvolveResponse:
    params = _params(req.model)
    state = _state(params, req.state)
    coeffs = (np.asarray(req.coeffs, dtype=float) if req.coeffs is not None
              else model.physical_coeffs(params))
    if coeffs.size != params.n + 1:
        raise ValidationError(f"coeffs must list {params.n + 1} values")
    if req.samples < 2:
        raise ValidationError("samples must be at least 2")
    traj = model.evolve(params, state, coeffs, req.duration,
                        samples=req.samples, rtol=req.rtol, atol=req.atol)
    states = [traj.state(i) for i in range(len(traj.times))]
    hams = [[float(h) for h in model.hamiltonians(params, st)]
            for st in states]
    return S.EvolveResponse(times=[float(t) for t in traj.times],
                            states=[_state_doc(st) for st in states],
                            hamiltonians=hams)


def _soliton_setup(mc: S.ModelConfig, doc: S.SolitonDoc):
    params = _params(mc)
    if mc.signs is None:
        raise ValidationError("soliton commands need the sign pattern of "
                              "the critical fiber in the model config")
    bd = bethe_mod.solve_bethe(params, tuple(mc.signs))
    x0 = np.array([z.value() for z in doc.x0])
    sol = soliton.init_soliton(params, bd, x0)
    return params, bd, sol


def handle_soliton(req: S.SolitonRequest) -> S.SolitonResponse:
    params, bd, sol = _soliton_setup(req.model, req.soliton)
    times = np.asarray(req.times, dtype=float)
    if times.size != params.n + 1:
        raise ValidationError(f"times must list {params.n + 1} values "
                              "(one per commuting flow)")
    state, _ = soliton.reconstruct_state(params, sol, times)
    hams = [float(h) for h in model.hamiltonians(params, state)]
    return S.SolitonResponse(state=_state_doc(state), hamiltonians=hams)


def handle_divisor(req: S.DivisorRequest) -> S.DivisorResponse:
    params, bd, sol = _soliton_setup(req.model, req.soliton)
    if req.samples < 2:
        raise ValidationError("samples must be at least 2")
    c1 = req.c1.value()
    us = np.linspace(-0.5 * req.duration, 0.5 * req.duration, req.samples)
    rows = np.array([inv_mod.periodic_flow_times(params, bd, c1, u)
                     for u in us])
    points, gaps = soliton.divisor_trajectory(params, sol, rows)
    out = []
    for i, u in enumerate(us):
        lams = [] if gaps[i] else list(points[i])
        out.append(S.DivisorRow(t=float(u), gap=bool(gaps[i]),
                                lambdas=S.complex_list(lams)))
    return S.DivisorResponse(rows=out)


def handle_actions(req: S.ActionsRequest) -> S.ActionsResponse:
    params = _params(req.model)
    state = _state(params, req.state)
    bd = bethe_mod.solve_bethe(params, _signs_for_state(req.model, state))
    cv = curve_mod.build_curve(params, state, bd)
    kind = req.cycle.strip().upper()
    if kind == "A":
        if req.pair < 1:
            raise UsageError("A-cycle pair index is 1-based")
        res = curve_mod.a_cycle_action(cv, req.pair - 1,
                                       samples=req.samples)
    elif kind == "B":
        if not req.waypoints:
            raise UsageError("B-cycle requests need waypoints")
        wp = np.array([z.value() for z in req.waypoints])
        res = curve_mod.b_cycle_action(cv, wp, samples=req.samples)
    else:
        raise UsageError(f"unknown cycle kind {req.cycle!r}; use A or B")
    return S.ActionsResponse(value=S.Complex.of(res.value),
                             converged=res.converged,
                             samples_used=res.samples_used)


def handle_invariants(req: S.InvariantsRequest) -> S.InvariantsResponse:
    params = _params(req.model)
    bd = bethe_mod.solve_bethe(params, _signs(req.model))
    rep = inv_mod.invariant_report(params, bd, req.focus - 1)
    return S.InvariantsResponse(
        j=rep.j + 1, rho=rep.rho, gamma=rep.gamma,
        rho_z=S.complex_list(rep.rho_z), rho_w=S.complex_list(rep.rho_w),
        alpha=[float(v) for v in rep.alpha],
        beta=[float(v) for v in rep.beta],
        omega_reg=[float(v) for v in rep.omega_reg],
        phi0=None if rep.phi0 is None else S.Complex.of(rep.phi0),
        time_lapse=rep.time_lapse)


def handle_monodromy(req: S.MonodromyRequest) -> S.MonodromyResponse:
    params = _params(req.model)
    bd = bethe_mod.solve_bethe(params, _signs(req.model))
    j = req.focus - 1
    radius = req.radius
    if radius is None:
        radius, _ = inv_mod.diagonal_invariant(params, bd, j)
    value = inv_mod.monodromy_integral(params, bd, j, req.loop - 1,
                                       float(radius), req.samples)
    return S.MonodromyResponse(value=float(value), focus=req.focus,
                               loop=req.loop, radius=float(radius),
                               samples=req.samples)


def handle_inout(req: S.InOutRequest) -> S.InOutResponse:
    params = _params(req.model)
    bd = bethe_mod.solve_bethe(params, _signs(req.model))
    m = bd.mff
    if req.spectators is None:
        spect = [1e-10] * (m - 1)
    else:
        spect = [z.value() for z in req.spectators]
    if len(spect) != m - 1:
        raise ValidationError(f"spectators must list {m - 1} values")
    cvals = np.array([req.c1.value()] + list(spect), dtype=complex)
    rep = inv_mod.in_out_experiment(params, bd, req.delta, cvals)
    rz_exact, _ = inv_mod.offdiagonal_invariants(params, bd, 0)
    return S.InOutResponse(
        delta=rep.delta, c1_in=S.Complex.of(rep.c1_in),
        c1_out=S.Complex.of(rep.c1_out), phi0=S.Complex.of(rep.phi0),
        phi0_predicted=S.Complex.of(rep.phi0_predicted),
        time_lapse=rep.time_lapse, tau=rep.tau,
        rho_z=S.complex_list(rep.rho_z), rho_w=S.complex_list(rep.rho_w),
        rho_z_exact=S.complex_list(rz_exact))


FIG3_MODEL = S.ModelConfig(n=3, s=1.0, omega=0.0,
                           epsilon=[-1.0, 0.0, 1.0], signs=[1, -1, 1])
FIG3_SOLITON = S.SolitonDoc(x0=[S.Complex(re=0.5), S.Complex(re=0.5)])


def handle_reproduce_one_spin() -> S.ReproduceResponse:
    params = model.make_params(1, 1.0, 1.0, [0.0])
    bd = bethe_mod.solve_bethe(params, (1,))
    rho, gamma = inv_mod.diagonal_invariant(params, bd, 0)
    rep = inv_mod.invariant_report(params, bd, 0)
    closed = inv_mod.one_spin_closed_form(1.0, 0.0)
    mono = inv_mod.monodromy_integral(params, bd, 0, 0, rho, 4096)
    two_pi = 2.0 * np.pi
    checks = [
        ("log rho = 5 log 2", float(np.log(rho)), float(5.0 * np.log(2.0)),
         1e-10),
        ("gamma = -pi/2", float(gamma), float(-np.pi / 2.0), 1e-10),
        ("omega_reg dK = (5 log 2)/2pi", float(rep.omega_reg[0]),
         float(5.0 * np.log(2.0) / two_pi), 1e-10),
        ("omega_reg dL = (pi/2)/2pi", float(rep.omega_reg[1]),
         float((np.pi / 2.0) / two_pi), 1e-10),
        ("closed form matches product", float(abs(rho * np.exp(1j * gamma)
                                                  - closed)), 0.0, 1e-10),
        ("monodromy = rho sin gamma", float(mono),
         float(rho * np.sin(gamma)), 1e-6 * (1.0 + abs(rho))),
    ]
    out = []
    all_ok = True
    for name, measured, expected, tol in checks:
        ok = abs(measured - expected) <= tol
        all_ok = all_ok and ok
        out.append(S.ReproduceCheck(name=name, measured=measured,
                                    expected=expected, passed=ok))
    return S.ReproduceResponse(target="one-spin", passed=all_ok, checks=out)


def handle_reproduce_fig3(samples: int = 400) -> S.DivisorResponse:
    req = S.DivisorRequest(model=FIG3_MODEL, soliton=FIG3_SOLITON,
                           duration=2.0 * np.pi, samples=samples,
                           c1=S.Complex(re=1e-8, im=0.0))
    return handle_divisor(req)
