"""Acceptance gate: one test per release criterion, at the stated tolerances.

Each test prints its measured numbers so a failing run shows how far off it
was, not just that it was off.  Runtime budgets are asserted where the
criterion states one.
"""

import time

import numpy as np
import pytest

from jcgaudin import bethe, curve, invariants, model, normal_form, soliton
from conftest import SEED, random_state


def test_criterion_01_one_spin_invariant_closed_form():
    t0 = time.perf_counter()
    p = model.make_params(1, 1.0, 1.0, [0.0])
    bd = bethe.solve_bethe(p, (1,))
    rho, gamma = invariants.diagonal_invariant(p, bd, 0)
    rep = invariants.invariant_report(p, bd, 0)
    elapsed = time.perf_counter() - t0
    two_pi = 2.0 * np.pi
    print(f"log rho = {np.log(rho):.15f} (5 log 2 = {5 * np.log(2):.15f}), "
          f"gamma = {gamma:.15f}, omega_reg = {rep.omega_reg[:2]}, "
          f"elapsed = {elapsed:.3f} s")
    assert abs(np.log(rho) - 5.0 * np.log(2.0)) < 1e-10
    assert abs(gamma + np.pi / 2.0) < 1e-10
    assert abs(rep.omega_reg[0] - 5.0 * np.log(2.0) / two_pi) < 1e-10
    assert abs(rep.omega_reg[1] - (np.pi / 2.0) / two_pi) < 1e-10
    assert elapsed < 1.0


def test_criterion_02_monodromy_jump(three_spin, three_bethe):
    t0 = time.perf_counter()
    rho, gamma = invariants.diagonal_invariant(three_spin, three_bethe, 0)
    own = invariants.monodromy_integral(three_spin, three_bethe, 0, 0,
                                        rho, 4096)
    other = invariants.monodromy_integral(three_spin, three_bethe, 0, 1,
                                          rho, 4096)
    elapsed = time.perf_counter() - t0
    rel = abs(own - rho * np.sin(gamma)) / abs(rho * np.sin(gamma))
    print(f"own-loop = {own:.12f} vs rho sin gamma = "
          f"{rho * np.sin(gamma):.12f} (rel {rel:.2e}); "
          f"spectator loop = {other:.2e}; elapsed = {elapsed:.2f} s")
    assert rel < 1e-6
    assert abs(other) < 1e-8
    assert elapsed < 10.0


def test_criterion_03_commuting_integrability_suite():
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED)
    cases = {
        1: model.make_params(1, 1.0, 0.5, [0.0]),
        3: model.make_params(3, 1.0, 0.0, [-1.0, 0.0, 1.0]),
        5: model.make_params(5, 0.7, 0.3, [-2.0, -0.9, 0.1, 1.1, 2.3]),
    }
    worst_poisson = 0.0
    worst_drift = 0.0
    for n, p in cases.items():
        coeffs = model.physical_coeffs(p)
        for _ in range(50):
            st = random_state(p, rng)
            for i in range(p.n + 1):
                for j in range(i + 1, p.n + 1):
                    worst_poisson = max(
                        worst_poisson,
                        model.poisson_commutation_residual(p, st, i, j))
            traj = model.evolve(p, st, coeffs, 10.0, samples=6,
                                rtol=1e-10, atol=1e-12)
            H0 = model.hamiltonians(p, traj.state(0))
            for k in range(1, 6):
                drift = np.max(np.abs(
                    model.hamiltonians(p, traj.state(k)) - H0))
                worst_drift = max(worst_drift, drift)
    elapsed = time.perf_counter() - t0
    print(f"worst Poisson residual = {worst_poisson:.2e}, worst H drift "
          f"over duration 10 = {worst_drift:.2e}, elapsed = {elapsed:.1f} s")
    assert worst_poisson < 1e-9
    assert worst_drift < 1e-7
    assert elapsed < 120.0


def test_criterion_04_soliton_exactness(three_spin, three_bethe):
    rng = np.random.default_rng(SEED + 4)
    p, bd = three_spin, three_bethe
    target = 4.0 * np.real(np.polymul(np.poly(bd.roots), np.poly(bd.roots)))
    scale = np.max(np.abs(target))
    worst_q = 0.0
    worst_eom = 0.0
    h = 1e-5
    for _ in range(10):
        m = bd.mff
        x0 = np.exp(rng.normal(size=m) + 1j * rng.uniform(0, 2 * np.pi, m))
        sol = soliton.init_soliton(p, bd, x0)
        for _ in range(20):
            t = rng.normal(size=p.n + 1)
            state, _ = soliton.reconstruct_state(p, sol, t)
            Q = model.spectral_polynomial(p, state)
            worst_q = max(worst_q, float(np.max(np.abs(Q - target)) / scale))
        # EOM check at a couple of times per initial condition
        for _ in range(2):
            t = rng.normal(size=p.n + 1)
            for i in range(p.n + 1):
                e = np.eye(p.n + 1)[i]
                sp, _ = soliton.reconstruct_state(p, sol, t + h * e)
                sm, _ = soliton.reconstruct_state(p, sol, t - h * e)
                st0, _ = soliton.reconstruct_state(p, sol, t)
                field = model.flow_field(p, st0, e)
                res = max(
                    abs((sp.b - sm.b) / (2 * h) - field.bdot),
                    float(np.max(np.abs(
                        (sp.spins - sm.spins) / (2 * h) - field.spindot))))
                worst_eom = max(worst_eom, res)
    print(f"worst spectral-coefficient mismatch = {worst_q:.2e}, "
          f"worst EOM finite-difference residual = {worst_eom:.2e}")
    assert worst_q < 1e-7
    assert worst_eom < 1e-6


def test_criterion_05_reality_invariance(three_spin, three_bethe):
    rng = np.random.default_rng(SEED + 5)
    p, bd = three_spin, three_bethe
    m = bd.mff
    sol = soliton.init_soliton(
        p, bd, np.exp(rng.normal(size=m)
                      + 1j * rng.uniform(0, 2 * np.pi, m)))
    worst = 0.0
    for _ in range(10_000):
        pair = int(rng.integers(m))
        sol = soliton.normal_flow_map(sol, pair,
                                      a=float(rng.normal(scale=0.05)),
                                      theta=float(rng.normal(scale=0.05)))
        t = rng.normal(size=p.n + 1)
        X = soliton.amplitudes_at(p, sol, t)
        worst = max(worst, float(np.max(np.abs(
            np.conj(X[:m]) * X[m:] + 0.25))))
    print(f"worst pairing-constraint drift over 10^4 steps = {worst:.2e}")
    assert worst < 1e-14


def test_criterion_06_asymptotic_determinant_convergence(three_spin,
                                                         three_bethe):
    p, bd = three_spin, three_bethe
    rng = np.random.default_rng(SEED + 6)
    base = np.exp(1j * rng.uniform(0, 2 * np.pi, bd.mff))
    t = np.zeros(p.n + 1)
    lam = 0.37 + 0.52j
    scales = np.array([10.0, 20.0, 40.0, 80.0, 160.0])
    errs = {"D": [], "D1": [], "D2": [], "C": []}
    for X in scales:
        sol = soliton.init_soliton(p, bd, X * base)
        d1, d2, dn1 = soliton.full_determinants(p, sol, t, lam)
        a1, a2, an1 = soliton.asymptotic_determinants(p, sol, t, lam)
        errs["D1"].append(abs(d1 / a1 - 1.0))
        errs["D2"].append(abs(d2 / a2 - 1.0))
        errs["D"].append(abs(dn1 / an1 - 1.0))
        errs["C"].append(abs(soliton.c_of_lambda(p, sol, t, lam)
                             / soliton.asymptotic_c(p, sol, t, lam) - 1.0))
    slopes = {}
    for name, vals in errs.items():
        slopes[name] = np.polyfit(np.log(scales), np.log(vals), 1)[0]
    print("log-log slopes of |full/asymptotic - 1|: "
          + ", ".join(f"{k} = {v:+.3f}" for k, v in slopes.items()))
    for name, slope in slopes.items():
        assert abs(slope + 2.0) < 0.2, (name, slope)


def test_criterion_07_in_out_experiment(three_spin, three_bethe):
    t0 = time.perf_counter()
    p, bd = three_spin, three_bethe
    rho_z_exact, _ = invariants.offdiagonal_invariants(p, bd, 0)
    rels = []
    for c1 in (1e-4, 1e-5):
        rep = invariants.in_out_experiment(p, bd, 1e-2, [c1, 1e-10])
        rels.append(float(abs(rep.rho_z[0] - rho_z_exact[0])
                          / abs(rho_z_exact[0])))
    elapsed = time.perf_counter() - t0
    print(f"measured rho_z2 relative error: {rels[0]:.2%} at |c1| = 1e-4, "
          f"{rels[1]:.2%} at 1e-5; elapsed = {elapsed:.1f} s")
    assert rels[0] < 0.05
    assert rels[1] < rels[0]
    assert elapsed < 60.0


def test_criterion_08_action_integral_consistency(three_spin, three_bethe):
    p, bd = three_spin, three_bethe
    cvals = np.array([1e-2, 1e-3, 1e-4])
    rels = []
    for c in cvals:
        z = np.array([np.sqrt(c), 1e-6], dtype=complex)
        w = np.array([np.sqrt(c), 1e-6], dtype=complex)
        st = normal_form.synthesize_from_normal(p, bd, z, w)
        cv = curve.build_curve(p, st, bd)
        K, L = normal_form.kl_quadratic(p, st, bd)
        res = curve.a_cycle_action(cv, 0)
        assert res.converged
        want = K[0] + 1j * L[0]
        rels.append(float(abs(res.value - want) / abs(want)))
    slope = np.polyfit(np.log(cvals), np.log(rels), 1)[0]
    print("A-cycle vs K+iL relative errors: "
          + ", ".join(f"{r:.2e}" for r in rels)
          + f"; fitted slope = {slope:+.3f}")
    assert abs(slope - 1.0) < 0.3


def test_criterion_09_divisor_endpoint_reproduction(three_spin, three_bethe):
    p, bd = three_spin, three_bethe
    sol = soliton.init_soliton(p, bd, np.array([0.5, 0.5], dtype=complex))
    c1 = 1e-8
    E1 = bd.roots[0]
    E1bar = bd.roots[bd.mff]
    us = np.linspace(-np.pi, np.pi, 101)
    rows = np.array([invariants.periodic_flow_times(p, bd, c1, u)
                     for u in us])
    points, gaps = soliton.divisor_trajectory(p, sol, rows)
    assert not np.any(gaps)
    dist = []
    for end in (0, -1):
        d_lower = float(np.min(np.abs(points[end] - E1)))
        d_upper = float(np.min(np.abs(points[end] - E1bar)))
        dist.append((d_lower, d_upper))
    print("endpoint distances to (E_1, conj E_1): "
          f"u=-pi: ({dist[0][0]:.2e}, {dist[0][1]:.2e}), "
          f"u=+pi: ({dist[1][0]:.2e}, {dist[1][1]:.2e})")
    for d_lower, d_upper in dist:
        assert d_lower < 1e-3
        assert d_upper < 1e-3
