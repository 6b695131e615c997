"""End-to-end acceptance criteria, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line with the measured quantity;
run with ``pytest -s tests/test_acceptance.py`` to see them.
"""
import time

import numpy as np
import pytest
from scipy.optimize import brentq

from conftest import oracle_monodromy
from zs_spectra.evolve import lyapunov
from zs_spectra.potential import Potential
from zs_spectra.spectra import BOUNDARY_KINDS, ENTRY, spectral_data
from zs_spectra.verify import SUITES, run_suite

_POS = {"theta1": (0, 0), "phi1": (0, 1), "theta2": (1, 0), "phi2": (1, 1)}


def _announce(number, title, ok, detail):
    print(f"\n{'PASS' if ok else 'FAIL'} criterion {number:2d} {title}: {detail}")
    return ok


@pytest.fixture(scope="session")
def suite_results(verify_context):
    """Every identity suite on the shared five random potentials, timed as one run."""
    start = time.perf_counter()
    results = {name: run_suite(name, verify_context) for name in SUITES}
    return results, time.perf_counter() - start


def _select(results, suite, prefix=None):
    checks = results[0][suite]
    return [c for c in checks if prefix is None or c.name.startswith(prefix)]


def _summary(checks):
    bad = [c.name for c in checks if not c.passed]
    worst = max((c.value for c in checks if not c.inequality), default=0.0)
    return bad, f"{len(checks)} checks, worst deviation {worst:.2e}" + (f", failing {bad}" if bad else "")


def test_criterion_01_free_operator():
    start = time.perf_counter()
    v = Potential.zero()
    d = spectral_data(v, 32, periodic=False)
    dev = max(float(np.max(np.abs(d.windows[k].residuals))) for k in BOUNDARY_KINDS)
    lam = np.linspace(-100.0, 100.0, 100)
    ddev = float(np.max(np.abs(lyapunov(v, lam) - np.cos(lam))))
    elapsed = time.perf_counter() - start
    ok = dev < 1e-10 and ddev < 1e-10 and elapsed < 5.0
    assert _announce(1, "free operator", ok, f"eigenvalue dev {dev:.2e}, Lyapunov dev {ddev:.2e}, {elapsed:.2f} s")


def _oracle_roots(a, b, entry, lo, hi):
    f = lambda x: oracle_monodromy(a, b, x)[_POS[entry]]  # noqa: E731
    x = np.linspace(lo, hi, 40001)
    y = f(x)
    idx = np.nonzero(np.sign(y[:-1]) * np.sign(y[1:]) < 0)[0]
    return np.sort([brentq(f, x[i], x[i + 1], xtol=1e-15) for i in idx])


@pytest.mark.parametrize("a,b", [(1.0, 0.0), (0.3, 0.4)])
def test_criterion_02_constant_potential(a, b):
    d = spectral_data(Potential.constant(a, b), 16)
    dev = 0.0
    for kind in BOUNDARY_KINDS:
        w = d.windows[kind]
        ref = _oracle_roots(a, b, ENTRY[kind], w.values[0] - 0.3, w.values[-1] + 0.3)
        dev = max(dev, float(np.max(np.abs(ref - w.values))) if ref.size == w.values.size else np.inf)
    r = np.hypot(a, b)
    p = d.periodic
    n = np.array([k for k in range(-16, 17) if k])
    open_dev = max(abs(p.minus.at(0) + r), abs(p.plus.at(0) - r))
    closed = float(np.max(p.plus.at(n) - p.minus.at(n)))
    ok = dev < 1e-8 and open_dev < 1e-8 and closed < 1e-8
    assert _announce(2, f"constant potential ({a}, {b})", ok,
                     f"spectra dev {dev:.2e}, open gap dev {open_dev:.2e}, widest closed gap {closed:.2e}")


def test_criterion_03_wronskian_and_bounds(suite_results):
    checks = [c for c in _select(suite_results, "structure") if c.name in ("wronskian", "entry_bound")]
    bad, text = _summary(checks)
    assert _announce(3, "Wronskian and entry bound", not bad and len(checks) == 2, text)


def test_criterion_04_gauge(suite_results):
    checks = _select(suite_results, "gauge")
    bad, text = _summary(checks)
    assert _announce(4, "reflection gauges", not bad and len(checks) == 9, text)


def test_criterion_05_shift(suite_results):
    checks = _select(suite_results, "shift")
    bad, text = _summary(checks)
    assert _announce(5, "rotation shift", not bad, text)


def test_criterion_06_extension(suite_results):
    checks = _select(suite_results, "extension")
    bad, text = _summary(checks)
    assert _announce(6, "even-odd extension", not bad, text)


def test_criterion_07_estimates(suite_results):
    checks = _select(suite_results, "estimates", "estimates.")
    margin = min(c.value for c in checks)
    ok = all(c.passed for c in checks) and len(checks) == 4
    assert _announce(7, "norm estimates", ok, f"smallest margin {margin:.3e} over 10 random and 2 constant potentials")


def test_criterion_08_lamplighter(suite_results):
    checks = _select(suite_results, "lamplighter")
    bad, text = _summary(checks)
    exact = all(c.value == 0.0 for c in checks if c.name.startswith("lamplighter.norm"))
    assert _announce(8, "explicit lamplighter maps", not bad and exact, text + f", exact norms {exact}")


def test_criterion_09_canonical(suite_results):
    checks = _select(suite_results, "canonical")
    bad, text = _summary(checks)
    assert _announce(9, "canonical relations and gradients", not bad, text)


def test_criterion_10_asymptotics(suite_results):
    checks = _select(suite_results, "asymptotics", "asymptotics.tail_ratio")
    ratios = ", ".join(f"{c.name.split('/')[1]} {0.5 - c.value:.3f}" for c in checks)
    ok = all(c.passed for c in checks) and len(checks) == 4
    assert _announce(10, "residual tails", ok, f"worst tail ratios {ratios}")


def test_criterion_11_interlacing_and_runtime(suite_results, verify_context):
    checks = _select(suite_results, "audit") + [c for c in _select(suite_results, "structure")
                                                if c.name in ("interlacing", "sign_conditions", "enclosure")]
    elapsed = suite_results[1]
    bad, _ = _summary(checks)
    ok = not bad and elapsed < 120.0
    assert _announce(11, "interlacing, sign conditions and runtime", ok,
                     f"{len(verify_context.seen)} spectral data sets audited, suite time {elapsed:.1f} s"
                     + (f", failing {bad}" if bad else ""))
