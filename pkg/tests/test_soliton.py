"""Exact trajectories on the pinched torus and their determinant identities."""

import numpy as np
import pytest

from jcgaudin import bethe, model, soliton
from jcgaudin.errors import NotFocusFocus, ValidationError, ZeroAmplitude


@pytest.fixture
def torus(three_spin, three_bethe):
    return three_spin, three_bethe


def _sol(params, bd, rng, scale=1.0):
    m = bd.mff
    x0 = scale * np.exp(rng.normal(size=m) + 1j * rng.uniform(0, 2 * np.pi, m))
    return soliton.init_soliton(params, bd, x0)


def test_init_validation(torus, rng):
    params, bd = torus
    with pytest.raises(ZeroAmplitude):
        soliton.init_soliton(params, bd, [0.0, 1.0])
    with pytest.raises(ValidationError):
        soliton.init_soliton(params, bd, [1.0, 1.0, 1.0])
    with pytest.raises(ValidationError):
        soliton.init_soliton(params, bd, [1.0, 1.0, 1.0, 1.0])  # bad pairing
    full = np.array([1.0, 2.0, -0.25, -0.125])
    sol = soliton.init_soliton(params, bd, full)
    assert np.allclose(sol.x0, full)


def test_init_requires_pinched_torus():
    p = model.make_params(2, 1.0, 0.0, [-1.0, 1.0])
    bd = bethe.solve_bethe(p, (-1, -1))
    with pytest.raises(NotFocusFocus):
        soliton.init_soliton(p, bd, [1.0])


def test_reality_pairing_preserved(torus, rng):
    params, bd = torus
    sol = _sol(params, bd, rng)
    m = bd.mff
    for _ in range(20):
        t = rng.normal(size=params.n + 1)
        X = soliton.amplitudes_at(params, sol, t)
        viol = np.abs(np.conj(X[:m]) * X[m:] + 0.25)
        assert np.max(viol) < 1e-15


def test_lazy_shifts_compose_exactly(torus, rng):
    params, bd = torus
    sol = _sol(params, bd, rng)
    stepped = soliton.normal_flow_map(sol, 0, a=0.3, theta=-0.7)
    stepped = soliton.normal_flow_map(stepped, 0, a=0.2, theta=0.1)
    stepped = soliton.normal_flow_map(stepped, 1, a=-0.5, theta=0.4)
    once = soliton.normal_flow_map(
        soliton.normal_flow_map(sol, 0, a=0.5, theta=-0.6), 1, a=-0.5,
        theta=0.4)
    t = rng.normal(size=params.n + 1)
    assert np.allclose(soliton.amplitudes_at(params, stepped, t),
                       soliton.amplitudes_at(params, once, t), rtol=1e-15)


def test_reconstructed_state_sits_on_the_critical_fiber(torus, rng):
    """Spectral polynomial of the rebuilt state is 4 prod (lam - E)^2."""
    params, bd = torus
    sol = _sol(params, bd, rng)
    target = 4.0 * np.real(np.polymul(
        np.poly(bd.roots), np.poly(bd.roots)))
    for _ in range(5):
        t = rng.normal(size=params.n + 1)
        state, polys_out = soliton.reconstruct_state(params, sol, t)
        Q = model.spectral_polynomial(params, state)
        assert np.max(np.abs(Q - target)) < 1e-9 * np.max(np.abs(target))
        # energies equal the critical values
        H = model.hamiltonians(params, state)
        ce = bethe.critical_energies(params, bd.signs)
        assert np.allclose(H, ce, rtol=1e-9, atol=1e-9)


def test_reconstruction_matches_integrated_flow(torus, rng):
    """Closed-form motion against the ODE integrator over a finite leap."""
    params, bd = torus
    sol = _sol(params, bd, rng)
    t0 = np.array([0.1, -0.2, 0.15, 0.05])
    dt = 0.6
    direction = np.array([1.0, 0.5, -0.25, 0.75])
    s0, _ = soliton.reconstruct_state(params, sol, t0)
    s1, _ = soliton.reconstruct_state(params, sol, t0 + dt * direction)
    integ = model.evolve(params, s0, direction, dt,
                         rtol=1e-12, atol=1e-13).state(1)
    assert abs(integ.b - s1.b) < 1e-8
    assert np.max(np.abs(integ.spins - s1.spins)) < 1e-8


def test_determinant_route_reproduces_lax_C(torus, rng):
    """C(lam) assembled from bordered determinants vs the direct Lax entry."""
    params, bd = torus
    sol = _sol(params, bd, rng)
    t = rng.normal(size=params.n + 1)
    state, _ = soliton.reconstruct_state(params, sol, t)
    for lam in (0.4 + 0.3j, -1.4 - 0.2j, 2.1 + 0.05j):
        via_det = soliton.c_of_lambda(params, sol, t, lam)
        direct = model.lax_entries(params, state, lam).C
        assert abs(via_det - direct) < 1e-9 * (1.0 + abs(direct))


def test_divisor_endpoints_count(torus, rng):
    params, bd = torus
    sol = _sol(params, bd, rng)
    t = rng.normal(size=params.n + 1)
    pts = soliton.divisor_at(params, sol, t)
    assert pts.shape == (2 * bd.mff - 1,)


def test_divisor_points_annihilate_the_interpolation(torus, rng):
    """Divisor = combined zero set of the two interpolation polynomials."""
    params, bd = torus
    sol = _sol(params, bd, rng)
    t = rng.normal(size=params.n + 1)
    _, polys_out = soliton.reconstruct_state(params, sol, t)
    pts = soliton.divisor_at(params, sol, t)
    vals = [min(abs(np.polyval(polys_out.pminus, z)),
                abs(np.polyval(polys_out.pplus, z))) for z in pts]
    assert max(vals) < 1e-8


def test_asymptotic_amplitude_regimes(torus, rng):
    """Bordered-determinant values approach their stated large/small-X forms."""
    params, bd = torus
    t = np.zeros(params.n + 1)
    base = np.exp(1j * rng.uniform(0, 2 * np.pi, bd.mff))
    rel = []
    for X in (40.0, 160.0):
        sol = soliton.init_soliton(params, bd, X * base)
        got = soliton.c_of_lambda(params, sol, t, complex(bd.roots[0]))
        want = soliton.asymptotic_c_at_root(params, sol, t, 0)
        rel.append(abs(got / want - 1.0))
    assert rel[0] < 0.05
    assert rel[1] < rel[0]
