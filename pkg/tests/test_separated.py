"""Separation coordinates: extraction, reconstruction, and their flows."""

import numpy as np
import pytest

from jcgaudin import model, separated
from jcgaudin.errors import OscillatorVanishes, ValidationError
from conftest import random_state


def test_lambdas_are_zeros_of_C(three_spin, rng):
    st = random_state(three_spin, rng)
    sep = separated.separated_coords(three_spin, st)
    assert sep.lambdas.shape == (3,)
    for lam, mu in zip(sep.lambdas, sep.mus):
        sample = model.lax_entries(three_spin, st, lam)
        assert abs(sample.C) < 1e-9 * (1.0 + abs(sample.A))
        assert mu == pytest.approx(sample.A, rel=1e-13)
    assert sep.bbar == pytest.approx(np.conj(st.b), rel=1e-15)


def test_round_trip_reconstruction(three_spin, five_spin, rng):
    for p in (three_spin, five_spin):
        for _ in range(5):
            st = random_state(p, rng)
            sep = separated.separated_coords(p, st)
            back = separated.reconstruct_from_separated(p, sep)
            assert abs(back.b - st.b) < 1e-8 * (1.0 + abs(st.b))
            assert np.max(np.abs(back.spins - st.spins)) < 1e-8


def test_reconstruction_rejects_off_curve_momenta(three_spin, rng):
    st = random_state(three_spin, rng)
    sep = separated.separated_coords(three_spin, st)
    bad = separated.SeparatedCoords(lambdas=sep.lambdas,
                                    mus=sep.mus + 0.1, bbar=sep.bbar)
    with pytest.raises(Exception) as info:
        separated.reconstruct_from_separated(three_spin, bad)
    from jcgaudin.errors import JcgError
    assert isinstance(info.value, JcgError)


def test_hamiltonians_from_separated(three_spin, rng):
    st = random_state(three_spin, rng)
    H = model.hamiltonians(three_spin, st)
    sep = separated.separated_coords(three_spin, st)
    got = separated.hamiltonians_from_separated(three_spin, sep, H[-1])
    assert np.max(np.abs(got.imag)) < 1e-8
    assert np.allclose(got.real, H[:-1], rtol=1e-8, atol=1e-8)


def test_interpolation_inverse_is_cauchy_inverse(three_spin, rng):
    lambdas = rng.normal(size=3) + 1j * rng.normal(size=3)
    binv = separated.interpolation_inverse(three_spin, lambdas)
    cauchy = 1.0 / (lambdas[:, None] - three_spin.epsilon[None, :])
    assert np.max(np.abs(binv @ cauchy - np.eye(3))) < 1e-10


def test_separated_flow_matches_finite_difference(three_spin, rng):
    """lambda-dot from the closed form vs numerically evolved zeros of C."""
    p = three_spin
    st = random_state(p, rng)
    sep = separated.separated_coords(p, st)
    h = 1e-6
    for which in range(p.n + 1):
        ldot, bbardot = separated.separated_flow_field(p, sep, which)
        coeffs = np.eye(p.n + 1)[which]
        plus = separated.separated_coords(
            p, model.evolve(p, st, coeffs, h).state(1))
        minus = separated.separated_coords(
            p, model.evolve(p, st, coeffs, -h).state(1))
        # zeros keep their sort order over an h-step away from collisions
        fd_l = (plus.lambdas - minus.lambdas) / (2 * h)
        fd_b = (plus.bbar - minus.bbar) / (2 * h)
        assert np.max(np.abs(ldot - fd_l)) < 1e-5 * (1 + np.max(np.abs(fd_l)))
        assert abs(bbardot - fd_b) < 1e-5 * (1.0 + abs(fd_b))


def test_oscillator_flow_freezes_lambdas(three_spin, rng):
    st = random_state(three_spin, rng)
    sep = separated.separated_coords(three_spin, st)
    ldot, bbardot = separated.separated_flow_field(three_spin, sep, 3)
    assert np.all(ldot == 0)
    assert bbardot == pytest.approx(1j * sep.bbar, rel=1e-15)
    with pytest.raises(ValidationError):
        separated.separated_flow_field(three_spin, sep, 4)


def test_vanishing_oscillator_guard(three_spin):
    spins = np.zeros((3, 3))
    spins[:, 2] = [1.0, -1.0, 1.0]
    st = model.make_state(three_spin, 0.0, spins)
    with pytest.raises(OscillatorVanishes):
        separated.separated_coords(three_spin, st)
