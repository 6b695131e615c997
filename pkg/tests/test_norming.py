import numpy as np
import pytest

from conftest import oracle_monodromy
from zs_spectra.errors import CrossCheckFailure, DegenerateEntry
from zs_spectra.norming import (NAMES, Sequence, eigenfunction_norms, norming_constants, normalizing_constants,
                                star_decay_report, tail_mass)
from zs_spectra.potential import Potential, apply_transform
from zs_spectra.spectra import spectral_data


def test_free_operator_constants_vanish():
    z = normalizing_constants(spectral_data(Potential.zero(), 6, periodic=False))
    for name in ("r", "s", "t", "u", "a", "b", "c", "d", "a_star", "b_star", "c_star", "d_star"):
        assert np.max(np.abs(z[name].values)) < 1e-10, name


def test_green_identity_agrees_with_quadrature(small_trig):
    d = spectral_data(small_trig, 8, periodic=False)
    z = normalizing_constants(d)
    for kind, (_, a, _) in NAMES.items():
        quad = eigenfunction_norms(d, kind)
        assert np.allclose(-np.log(quad), z[a].values, atol=1e-9, rtol=0)


def test_star_constants_for_constant_potential(const10):
    d = spectral_data(const10, 8, periodic=False)
    z = normalizing_constants(d)
    # derivative of phi1 = -(lambda + 1) sin(w) / w by central differences of the oracle
    mu = d.mu.values
    h = 1e-6
    dphi1 = (oracle_monodromy(1, 0, mu + h)[0, 1] - oracle_monodromy(1, 0, mu - h)[0, 1]) / (2 * h)
    assert np.allclose(z["a_star"].values, np.log(np.abs(dphi1)), atol=1e-7)
    assert all(r.passed for r in star_decay_report(z))


def test_normalizing_gauge_under_negation(small_trig):
    z = normalizing_constants(spectral_data(small_trig, 8, periodic=False))
    zm = normalizing_constants(spectral_data(apply_transform(small_trig, "F0"), 8, periodic=False))
    assert np.max(np.abs(zm["a"].values - z["b"].values)) < 1e-7
    assert np.max(np.abs(zm["r"].values - z["s"].values)) < 1e-7


def test_cross_check_failure_is_raised(small_trig):
    d = spectral_data(small_trig, 6, periodic=False)
    with pytest.raises(CrossCheckFailure):
        normalizing_constants(d, rtol=1e-18)


def test_degenerate_entry(small_trig, monkeypatch):
    d = spectral_data(small_trig, 6, periodic=False)
    monkeypatch.setattr("zs_spectra.norming.ENTRY_FLOOR", 1e6)
    with pytest.raises(DegenerateEntry):
        norming_constants(d)


def test_csv_layout(small_trig):
    z = normalizing_constants(spectral_data(small_trig, 4, periodic=False))
    lines = z.to_csv().splitlines()
    assert lines[0] == "n,r,s,t,u,a,b,c,d,a_star,b_star,c_star,d_star"
    assert len(lines) == 1 + 9
    # the mixed columns are empty at n = -N
    assert lines[1].split(",")[3] == "" and lines[1].split(",")[1] != ""
    assert z.to_csv() == normalizing_constants(spectral_data(small_trig, 4, periodic=False)).to_csv()


def test_tail_mass_and_report():
    s = Sequence(np.arange(-4, 5), np.arange(-4, 5, dtype=float))
    assert tail_mass(s, 2) == 2 * (9 + 16)
