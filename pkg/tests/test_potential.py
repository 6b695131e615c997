import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zs_spectra.errors import PotentialConfigError
from zs_spectra.potential import (Potential, TransformKind, apply_transform, distance, eo_projection,
                                  extend_even_odd, fourier_pair, load_potential, membership_eo,
                                  parse_potential_config, perturb, potential_from_tokens,
                                  random_trig_potential, rotate)

coef = st.floats(-1.0, 1.0, allow_nan=False)
trig_coeffs = st.lists(st.tuples(coef, coef, coef, coef), min_size=1, max_size=4)


def _trig(rows):
    return Potential.trig(*np.array(rows).T, cells=256)


def test_constant_values_and_norm():
    v = Potential.constant(0.3, 0.4)
    x = np.array([0.0, 0.25, 1.0])
    assert np.allclose(v(x), [[0.3] * 3, [0.4] * 3])
    assert v.norm() == pytest.approx(0.5, abs=1e-14)


def test_trig_norm_matches_parseval():
    v = Potential.trig([0.2, 0.3], [0.0, 0.1], [0.0, -0.4], [0.0, 0.2])
    expected = 0.2 ** 2 + 0.5 * (0.3 ** 2 + 0.1 ** 2 + 0.4 ** 2 + 0.2 ** 2)
    assert v.norm_squared() == pytest.approx(expected, abs=1e-14)


def test_trig_derivative_against_central_difference():
    v = Potential.trig([0.0, 0.3, -0.2], [0.0, 0.1, 0.4], [0.5, 0.0, 0.1], [0.0, -0.2, 0.3])
    x = np.linspace(0.05, 0.95, 7)
    h = 1e-6
    fd = (v(x + h) - v(x - h)) / (2 * h)
    assert np.allclose(v.derivative(x), fd, atol=1e-8)


@pytest.mark.parametrize("cells", [63, 10, 65])
def test_cells_validation(cells):
    with pytest.raises(ValueError):
        Potential.zero(cells=cells)


def test_default_cells_scale_with_length():
    assert Potential.zero().cells == 2048
    assert Potential.zero(length=2).cells == 4096


@settings(max_examples=25, deadline=None)
@given(trig_coeffs)
def test_gauges_are_involutions(rows):
    v = _trig(rows)
    for t in ("F0", "F1", "F2", "R"):
        assert distance(v, apply_transform(apply_transform(v, t), t)) < 1e-12


@settings(max_examples=25, deadline=None)
@given(trig_coeffs)
def test_transforms_preserve_norm(rows):
    v = _trig(rows)
    for t in ("F0", "F1", "F2", "R", "Rotate"):
        assert apply_transform(v, t).norm() == pytest.approx(v.norm(), abs=1e-12)


def test_transform_pointwise_definitions(small_trig):
    v = small_trig
    x = np.linspace(0, 1, 9)
    p, q = v(x)
    pr, qr = v(1 - x)
    assert np.allclose(apply_transform(v, "F0")(x), [-p, -q])
    assert np.allclose(apply_transform(v, "F1")(x), [pr, -qr])
    assert np.allclose(apply_transform(v, "F2")(x), [-pr, qr])
    assert np.allclose(apply_transform(v, "R")(x), [pr, qr])


def test_rotation_and_inverse(small_trig):
    v = small_trig
    back = rotate(rotate(v), inverse=True)
    assert distance(v, back) < 1e-14
    x = np.array([0.5])
    # at x = 1/2 the rotation is a quarter turn: (p, q) -> (q, -p)
    p, q = v(x)
    assert np.allclose(rotate(v)(x), [q, -p])


def test_extension_symmetry_and_norm(small_trig):
    e = extend_even_odd(small_trig)
    assert e.length == 2 and e.cells == 2 * small_trig.cells
    x = np.linspace(0, 1, 11)
    a, b = e(2 - x)
    p, q = small_trig(x)
    assert np.allclose(a, p) and np.allclose(b[1:-1], -q[1:-1])
    assert e.norm_squared() == pytest.approx(2 * small_trig.norm_squared(), rel=1e-12)


def test_transforms_reject_wrong_length():
    with pytest.raises(ValueError):
        apply_transform(Potential.zero(length=2), "F0")
    assert TransformKind("ExtendEO") is TransformKind.EXTEND_EO


def test_even_odd_projection(small_trig):
    e = eo_projection(small_trig)
    assert membership_eo(e)
    assert not membership_eo(small_trig)
    f = Potential.from_function(small_trig, 1, small_trig.cells)
    assert distance(eo_projection(f), e) < 1e-12


def test_fourier_pair_of_single_mode():
    # v = (cos 2 pi x, 0): integral of exp(2 pi n x J) v has components (1/2, 0) at n = 1
    v = Potential.trig([0.0, 1.0], [], [], [])
    assert np.allclose(fourier_pair(v, 1), (0.5, 0.0), atol=1e-14)
    assert np.allclose(fourier_pair(v, 2), (0.0, 0.0), atol=1e-14)
    w = Potential.trig([], [], [0.0, 0.0], [0.0, 1.0])
    assert np.allclose(fourier_pair(w, 1), (0.5, 0.0), atol=1e-14)


def test_perturb_stays_trig(small_trig):
    w = Potential.constant(0.1, 0.2)
    u = perturb(small_trig, w, 0.5)
    assert u.kind == "trig"
    x = np.linspace(0, 1, 5)
    assert np.allclose(u(x), small_trig(x) + 0.5 * w(x))
    g = perturb(Potential.from_function(small_trig), w, -1.0)
    assert np.allclose(g(x), small_trig(x) - w(x))


def test_random_trig_potential_norm_range():
    rng = np.random.default_rng(0)
    for _ in range(10):
        v = random_trig_potential(rng, degree=4, max_norm=1.0)
        assert 0.25 - 1e-12 <= v.norm() <= 1.0 + 1e-12
    assert random_trig_potential(rng, norm=0.5).norm() == pytest.approx(0.5, abs=1e-12)


def test_config_parsing(tmp_path):
    v = parse_potential_config(["kind=trig  # comment", "c1_0=0.5", "s2_2=0.25", "", "M=128"])
    assert v.cells == 128
    assert np.allclose(v.coeffs[:, 0], [0.5, 0, 0, 0]) and v.coeffs[3, 2] == 0.25
    c = parse_potential_config(["kind=constant", "a=1", "L=2"])
    assert c.length == 2 and c.a == 1.0 and c.cells == 4096


@pytest.mark.parametrize("lines,where", [
    (["kind=trig", "c1_1=oops"], "line 2"),
    (["kind=constant", "a=1", "a=2"], "line 3"),
    (["kind=zero", "colour=red"], "line 2"),
    (["kind=wave"], "line 1"),
    (["kind=constant", "missing"], "line 2"),
    (["kind=constant", "M=12"], "line 2"),
])
def test_config_errors_report_line(lines, where):
    with pytest.raises(PotentialConfigError, match=where):
        parse_potential_config(lines)


def test_samples_file_roundtrip(tmp_path):
    x = np.linspace(0, 1, 65)
    rows = "\n".join(f"{float(a)!r},{float(np.cos(a))!r},{float(np.sin(a))!r}" for a in x)
    (tmp_path / "v.csv").write_text("x,v1,v2\n" + rows + "\n")
    (tmp_path / "v.cfg").write_text("kind=samples\nfile=v.csv\n")
    v = load_potential(tmp_path / "v.cfg")
    assert v.kind == "samples"
    assert np.allclose(v(np.array([0.5])), [[np.cos(0.5)], [np.sin(0.5)]], atol=1e-4)
    (tmp_path / "bad.csv").write_text("x,v1,v2\n0,1,2\n0.5,1\n")
    (tmp_path / "bad.cfg").write_text("kind=samples\nfile=bad.csv\n")
    with pytest.raises(PotentialConfigError, match="line 3"):
        load_potential(tmp_path / "bad.cfg")


def test_tokens():
    assert potential_from_tokens(["constant", "a=0.3", "b=0.4"]).norm() == pytest.approx(0.5)
    assert potential_from_tokens(["zero"]).kind == "zero"
    with pytest.raises(PotentialConfigError):
        potential_from_tokens([])
    with pytest.raises(PotentialConfigError):
        potential_from_tokens(["/nonexistent/file.cfg"])
