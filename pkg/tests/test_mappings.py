import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zs_spectra.errors import AlternationViolation, UnsupportedSigma
from zs_spectra.mappings import (SigmaSequence, asymptotic_residuals, estimates, four_spectra, gap_maps,
                                 lamplighter_explicit, replace_map, shift_map, signature_distance,
                                 sobolev_energy, star_map, uniqueness_signature)
from zs_spectra.norming import normalizing_constants
from zs_spectra.potential import Potential, apply_transform, distance
from zs_spectra.spectra import BOUNDARY_KINDS, SpectrumKind, SpectrumWindow, spectral_data


@pytest.fixture(scope="module")
def data(small_trig):
    return spectral_data(small_trig, 8)


def test_four_spectra_of_zero_is_zero():
    f = four_spectra(spectral_data(Potential.zero(), 6))
    assert f.norm < 1e-10 and f.indices[0] == -12 and f.indices[-1] == 12


def test_four_spectra_definition(data):
    f = four_spectra(data)
    assert f.at(4) == pytest.approx(0.5 * (data.nu.at(2) - data.mu.at(2)))
    assert f.at(3) == pytest.approx(0.5 * (data.rho.at(2) - data.tau.at(2)))
    lo, mid, hi = f.bounds()
    assert lo <= mid <= hi


def test_star_map_interleaves(data):
    s = star_map(data.tau, data.mu)
    assert s.length == 2 and s.is_increasing()
    assert s.values[list(s.indices).index(5)] == data.tau.at(3)
    assert s.values[list(s.indices).index(6)] == data.mu.at(3)


def test_star_map_rejects_non_alternating():
    a = SpectrumWindow(SpectrumKind.MIXED1, np.arange(0, 3), np.array([0.0, 1.0, 2.0]))
    b = SpectrumWindow(SpectrumKind.DIRICHLET, np.arange(0, 3), np.array([0.5, 2.5, 2.7]))
    with pytest.raises(AlternationViolation):
        star_map(a, b)


def test_shift_map(data):
    s = shift_map(data.mu)
    assert s.kind is SpectrumKind.MIXED1
    assert np.allclose(s.values, data.mu.values - np.pi / 2)
    with pytest.raises(ValueError):
        shift_map(data.tau)


@pytest.mark.parametrize("pattern,t", [("minus", "F0"), ("alternating", "F1"), ("neg_alternating", "F2")])
def test_lamplighter_patterns(small_trig, pattern, t):
    sigma = SigmaSequence.from_pattern(pattern, 4)
    assert sigma.pattern() == pattern
    assert distance(lamplighter_explicit(small_trig, sigma), apply_transform(small_trig, t)) == 0.0


def test_lamplighter_rejects_other_patterns(small_trig):
    m = np.arange(-4, 5)
    sigma = SigmaSequence(m, np.where(m == 1, -1, 1))
    with pytest.raises(UnsupportedSigma):
        lamplighter_explicit(small_trig, sigma)
    with pytest.raises(ValueError):
        SigmaSequence(m, np.zeros(m.size))


@settings(max_examples=20, deadline=None)
@given(st.sets(st.integers(-7, 8)), st.sets(st.integers(-8, 8)))
def test_replace_map_sigma(data, y1, y2):
    w, sigma = replace_map(data, y1, y2)
    for j in range(-7, 9):
        assert (sigma.at(2 * j - 1) == -1) == (j in y1)
        pos = list(w.indices).index(2 * j - 1)
        assert w.values[pos] == (data.rho.at(j) if j in y1 else data.tau.at(j))
    for j in range(-8, 9):
        assert (sigma.at(2 * j) == -1) == (j in y2)


def test_gap_maps_invariants(data):
    g = gap_maps(data, normalizing_constants(data))
    dev = g.invariant_deviations()
    assert dev["psi_modulus"] < 1e-10 and dev["h_cosh"] < 1e-10
    assert dev["h_dominates"] < 1e-10 and dev["gh_dominates"] < 1e-10
    assert np.array_equal(g.h_s, normalizing_constants(data)["r"].at(g.indices))


def test_gap_maps_need_periodic():
    with pytest.raises(ValueError):
        gap_maps(spectral_data(Potential.constant(0.2, 0.1), 4, periodic=False))


def test_estimates_hold(data):
    est = estimates(data)
    assert [e.name for e in est] == ["four_spectra_norm", "critical_gap_norm", "gap_norm", "gap_sobolev"]
    for e in est:
        assert e.margin >= 0, e


def test_sobolev_energy_quadrature():
    v = Potential.trig([0.0, 0.5])
    # v' = -pi sin(2 pi x), |v|^4 = cos^4/16
    expected = np.pi ** 2 / 2 + 3 / 128
    assert sobolev_energy(v) == pytest.approx(expected, rel=1e-10)
    s = Potential.from_function(v, 1, 4096)
    assert sobolev_energy(s) == pytest.approx(expected, rel=1e-5)


def test_residuals_of_zero_vanish():
    d = spectral_data(Potential.zero(), 8, periodic=False)
    for kind in BOUNDARY_KINDS:
        assert np.max(np.abs(asymptotic_residuals(d, kind).residuals)) < 1e-10


def test_residuals_remove_first_order_term():
    # for a tiny potential the residual is quadratic in its size
    sizes, worst = (1e-2, 2e-2), []
    for eps in sizes:
        v = Potential.trig([0.0, eps], [0.0, 0.5 * eps], [eps], [0.0, -eps])
        d = spectral_data(v, 6, periodic=False)
        worst.append(max(np.max(np.abs(asymptotic_residuals(d, k).residuals)) for k in BOUNDARY_KINDS))
    assert worst[1] / worst[0] == pytest.approx(4.0, rel=0.1)


def test_uniqueness_signature(data, small_trig):
    other = spectral_data(apply_transform(small_trig, "R"), 8)
    a, b = uniqueness_signature(data), uniqueness_signature(other)
    assert signature_distance(a, a) == 0.0
    assert signature_distance(a, b) > 1e-6


def test_constant_potential_closed_forms(const10):
    d = spectral_data(const10, 8)
    f = four_spectra(d)
    assert f.at(0) == pytest.approx(1.0, abs=1e-9)
    assert np.max(np.abs(np.delete(f.values, list(f.indices).index(0)))) < 1e-9
    g = gap_maps(d, normalizing_constants(d))
    i = list(g.indices).index(0)
    assert (g.psi_c[i], g.psi_s[i]) == (pytest.approx(1.0, abs=1e-8), pytest.approx(0.0, abs=1e-4))
    assert g.abs_h[i] == pytest.approx(1.0, abs=1e-9)
    assert g.h_s[i] == pytest.approx(0.0, abs=1e-9) and g.h_c[i] == pytest.approx(1.0, abs=1e-8)


def test_four_spectra_flip_under_negation(data, small_trig):
    f = four_spectra(data)
    fm = four_spectra(spectral_data(apply_transform(small_trig, "F0"), 8))
    assert np.max(np.abs(fm.values + f.values)) < 1e-9


def test_first_order_term_dominates_single_mode():
    v = Potential.trig([0.0, 1.0])
    d = spectral_data(v, 4, periodic=False)
    r = asymptotic_residuals(d, "dirichlet")
    i = list(r.indices).index(1)
    assert abs(r.residuals[i, 0]) < 0.1 * abs(d.mu.at(1) - np.pi)
