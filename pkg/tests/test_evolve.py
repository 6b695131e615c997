import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import oracle_monodromy
from zs_spectra.evolve import (constant_monodromy, free_monodromy, lyapunov, monodromy, picard_approx,
                               trajectories, trajectory)
from zs_spectra.potential import Potential, apply_transform, random_trig_potential


def test_free_monodromy_is_rotation():
    lam = np.linspace(-40, 40, 57)
    m = monodromy(Potential.zero(), lam)
    assert np.allclose(m.matrix(), np.moveaxis(free_monodromy(lam), -1, 0), atol=1e-12, rtol=0)
    assert lyapunov(Potential.zero(), np.pi) == pytest.approx(-1.0, abs=1e-12)


@pytest.mark.parametrize("a,b", [(1.0, 0.0), (0.3, 0.4), (-0.7, 1.2)])
def test_constant_potential_matches_closed_form(a, b):
    lam = np.concatenate([np.linspace(-30, 30, 61), [a, np.hypot(a, b), -np.hypot(a, b)]])
    m = monodromy(Potential.constant(a, b), lam)
    ref = np.moveaxis(oracle_monodromy(a, b, lam), -1, 0)
    assert np.max(np.abs(m.matrix() - ref)) < 1e-10
    assert np.max(np.abs(constant_monodromy(a, b, lam) - ref)) < 1e-14


@settings(max_examples=15, deadline=None)
@given(st.floats(-60, 60, allow_nan=False), st.integers(0, 2 ** 31))
def test_unit_determinant(lam, seed):
    v = random_trig_potential(np.random.default_rng(seed), degree=4, max_norm=1.0)
    assert abs(monodromy(v, lam).det() - 1.0) < 1e-10


def test_entries_bounded_by_exponential_of_norm(small_trig):
    lam = np.linspace(-50, 50, 201)
    m = monodromy(small_trig, lam)
    assert np.max(np.abs(m.matrix())) <= np.exp(small_trig.norm())


def test_lambda_derivative_against_central_difference(small_trig):
    lam = np.array([-7.3, -0.4, 0.9, 12.5])
    m = monodromy(small_trig, lam, want_deriv=True)
    h = 1e-5
    fd = (monodromy(small_trig, lam + h).matrix() - monodromy(small_trig, lam - h).matrix()) / (2 * h)
    scale = np.maximum(np.abs(fd), 1e-3)
    assert np.max(np.abs(m.deriv_matrix() - fd) / scale) < 1e-6


def test_lyapunov_even_in_potential(small_trig):
    lam = np.linspace(-20, 20, 41)
    assert np.allclose(lyapunov(small_trig, lam), lyapunov(apply_transform(small_trig, "F0"), lam),
                       atol=1e-12, rtol=0)


def test_picard_series_matches_for_small_potential():
    v = Potential.constant(0.01, 0.0)
    assert np.max(np.abs(picard_approx(v, 1.0, 6) - monodromy(v, 1.0).matrix())) < 1e-8
    w = Potential.trig([0.0, 0.02], [0.0, 0.01], [0.01], [0.0, -0.02])
    assert np.max(np.abs(picard_approx(w, 2.5, 6) - monodromy(w, 2.5).matrix())) < 1e-8


def test_picard_leading_term_is_free():
    v = Potential.trig([0.3, 0.1])
    assert np.allclose(picard_approx(v, 1.7, 1), free_monodromy(1.7), atol=1e-15)
    assert np.allclose(picard_approx(Potential.zero(), 1.7, 4), free_monodromy(1.7), atol=1e-15)


def test_trajectory_ends_at_monodromy(small_trig):
    t = trajectory(small_trig, 3.3)
    assert t.y.shape == (small_trig.cells + 1, 2, 2)
    assert np.allclose(t.y[0], np.eye(2))
    assert np.max(np.abs(t.y[-1] - monodromy(small_trig, 3.3).matrix())) < 1e-13
    det = t.y[:, 0, 0] * t.y[:, 1, 1] - t.y[:, 0, 1] * t.y[:, 1, 0]
    assert np.max(np.abs(det - 1)) < 1e-9


def test_trajectory_of_constant_potential_at_interior_nodes():
    v = Potential.constant(0.3, 0.4, cells=256)
    y = trajectories(v, [2.0])[0]
    x = v.grid[::64]
    for xi, yi in zip(x, y[::64]):
        lam = 2.0
        w = np.sqrt(lam ** 2 - 0.25)
        M = np.array([[0.4, -0.3 - lam], [lam - 0.3, -0.4]])
        ref = np.cos(w * xi) * np.eye(2) + np.sin(w * xi) / w * M
        assert np.max(np.abs(yi - ref)) < 1e-9


def test_evaluation_order_is_bitwise_irrelevant(small_trig):
    lam = np.linspace(-25, 25, 37)
    batch = monodromy(small_trig, lam, want_deriv=True)
    rev = monodromy(small_trig, lam[::-1], want_deriv=True)
    single = monodromy(small_trig, lam[5], want_deriv=True)
    assert np.array_equal(batch.matrix(), rev.matrix()[::-1])
    assert np.array_equal(batch.deriv_matrix(), rev.deriv_matrix()[::-1])
    assert np.array_equal(batch.matrix()[5], single.matrix())


def test_threads_do_not_change_results(small_trig, monkeypatch):
    lam = np.linspace(-40, 40, 400)
    one = monodromy(small_trig, lam).matrix()
    monkeypatch.setenv("ZS_SPECTRA_THREADS", "3")
    assert np.array_equal(monodromy(small_trig, lam).matrix(), one)


def test_flattening_along_lattice(small_trig):
    k = np.arange(8, 65)
    dev = np.max(np.abs(monodromy(small_trig, np.pi * k).matrix()
                        - np.moveaxis(free_monodromy(np.pi * k), -1, 0)), axis=(1, 2))
    # envelope decays: the tail maximum shrinks as the start index grows
    env = np.maximum.accumulate(dev[::-1])[::-1]
    assert env[-1] < env[0]
    assert np.all(np.diff(env) <= 0)


def test_rejects_non_finite_lambda(small_trig):
    with pytest.raises(ValueError):
        monodromy(small_trig, np.nan)
    with pytest.raises(ValueError):
        monodromy(small_trig, 1.0).deriv_matrix()
