"""Boundary, periodic and critical-point spectra extracted from the monodromy.

Roots are bracketed on a uniform lambda grid, refined by a vectorized
safeguarded Newton iteration, and labelled by aligning them with the
unperturbed lattice at minimal total displacement.
"""
from __future__ import annotations

import csv
import enum
import io
import math
import weakref
from dataclasses import dataclass, field

import numpy as np

from .errors import (ConvergenceFailure, CountMismatch, GapResolutionFailure,
                     WindowMismatch)
from .evolve import Monodromy, monodromy
from .potential import Potential


class SpectrumKind(str, enum.Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"
    MIXED1 = "mixed1"
    MIXED2 = "mixed2"
    PERIODIC_MINUS = "periodic_minus"
    PERIODIC_PLUS = "periodic_plus"
    CRITICAL = "critical"

    @property
    def is_mixed(self) -> bool:
        return self in (SpectrumKind.MIXED1, SpectrumKind.MIXED2)


BOUNDARY_KINDS = (SpectrumKind.DIRICHLET, SpectrumKind.NEUMANN,
                  SpectrumKind.MIXED1, SpectrumKind.MIXED2)

# monodromy entry whose zeros form each boundary spectrum
ENTRY = {SpectrumKind.DIRICHLET: "phi1", SpectrumKind.NEUMANN: "theta2",
         SpectrumKind.MIXED1: "phi2", SpectrumKind.MIXED2: "theta1"}

# entry magnitude defining the norming constant at each eigenvalue
COMPLEMENT = {SpectrumKind.DIRICHLET: "phi2", SpectrumKind.NEUMANN: "theta1",
              SpectrumKind.MIXED1: "phi1", SpectrumKind.MIXED2: "theta2"}

_NAMES = ("theta1", "phi1", "theta2", "phi2")
_XTOL = 1e-11
_MAX_ITER = 100
CLOSED_GAP_WIDTH = 1e-8


def unperturbed(kind: SpectrumKind, n, length: int = 1):
    n = np.asarray(n, dtype=float)
    shift = 0.5 if SpectrumKind(kind).is_mixed else 0.0
    return np.pi * (n - shift) / length


def index_range(kind: SpectrumKind, N: int) -> np.ndarray:
    lo = -N + 1 if SpectrumKind(kind).is_mixed else -N
    return np.arange(lo, N + 1)


@dataclass(frozen=True)
class SpectrumWindow:
    """Labelled eigenvalues s_n for consecutive indices n."""

    kind: SpectrumKind
    indices: np.ndarray
    values: np.ndarray
    length: int = 1
    count: int = -1
    n0: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def unperturbed(self) -> np.ndarray:
        return unperturbed(self.kind, self.indices, self.length)

    @property
    def residuals(self) -> np.ndarray:
        return self.values - self.unperturbed

    def __len__(self) -> int:
        return self.values.size

    def at(self, n):
        """Values at index n (integer or integer array)."""
        pos = np.asarray(n) - self.indices[0]
        if np.any(pos < 0) or np.any(pos >= self.values.size):
            raise WindowMismatch(f"index outside window [{self.indices[0]}, {self.indices[-1]}]")
        return self.values[pos]

    def restrict(self, lo: int, hi: int) -> SpectrumWindow:
        keep = (self.indices >= lo) & (self.indices <= hi)
        return SpectrumWindow(self.kind, self.indices[keep], self.values[keep], self.length,
                              self.count, self.n0, dict(self.meta))

    def is_increasing(self) -> bool:
        return bool(np.all(np.diff(self.values) > 0))

    def csv_rows(self):
        for n, s, s0 in zip(self.indices, self.values, self.unperturbed):
            yield self.kind.value, int(n), repr(float(s)), repr(float(s0)), repr(float(s - s0))


def windows_to_csv(windows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["kind", "n", "value", "unperturbed", "residual"])
    for win in windows:
        w.writerows(win.csv_rows())
    return buf.getvalue()


# -- root finding -------------------------------------------------------------

def _sign_brackets(x, f):
    """Exact grid zeros and sign-change intervals of sampled f."""
    exact = np.flatnonzero(f == 0.0)
    change = np.flatnonzero(f[:-1] * f[1:] < 0)
    return x[exact], change


def safeguarded_newton(fun, a, b, fa, fb, x0=None, indexed=False):
    """Vectorized Newton iteration kept inside sign-change brackets [a, b].

    ``fun(x)`` returns (f, df) for an array x; with ``indexed`` it is called
    as ``fun(x, idx)`` where idx locates x among all roots.  A step leaving the bracket is
    replaced by bisection, as is every step after three consecutive steps that
    failed to halve the previous step.
    """
    a, b = np.array(a, dtype=float), np.array(b, dtype=float)
    fa = np.array(fa, dtype=float)
    if x0 is None:
        fb = np.asarray(fb, dtype=float)
        x = a - fa * (b - a) / (fb - fa)
    else:
        x = np.array(x0, dtype=float)
    x = np.clip(x, a, b)
    last = np.full(x.shape, np.inf)
    bad = np.zeros(x.shape, dtype=int)
    active = np.ones(x.shape, dtype=bool)
    for _ in range(_MAX_ITER):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            return x
        f, df = fun(x[idx], idx) if indexed else fun(x[idx])
        zero = f == 0.0
        left = np.sign(f) == np.sign(fa[idx])
        a[idx] = np.where(left & ~zero, x[idx], a[idx])
        fa[idx] = np.where(left & ~zero, f, fa[idx])
        b[idx] = np.where(~left & ~zero, x[idx], b[idx])
        with np.errstate(divide="ignore", invalid="ignore"):
            step = -f / df
        xn = x[idx] + step
        inside = np.isfinite(xn) & (xn >= a[idx]) & (xn <= b[idx])
        slow = np.abs(step) > 0.5 * last[idx]
        bad[idx] = np.where(slow, bad[idx] + 1, 0)
        bisect = ~inside | (bad[idx] >= 3)
        mid = 0.5 * (a[idx] + b[idx])
        xn = np.where(bisect, mid, xn)
        bad[idx] = np.where(bisect, 0, bad[idx])
        move = np.abs(xn - x[idx])
        last[idx] = np.where(bisect, np.inf, move)
        scale = 1.0 + np.abs(xn)
        # a small Newton move means the iterate is already far more accurate;
        # a bisection step only certifies half the bracket width
        done = zero | (~bisect & (move <= _XTOL * scale)) | (b[idx] - a[idx] <= 1e-13 * scale)
        x[idx] = np.where(zero, x[idx], xn)
        active[idx[done]] = False
    raise ConvergenceFailure(f"{int(active.sum())} roots failed to converge")


def illinois(fun, a, b, fa, fb):
    """Vectorized Illinois (modified regula falsi) on sign-change brackets."""
    a, b = np.array(a, dtype=float), np.array(b, dtype=float)
    fa, fb = np.array(fa, dtype=float), np.array(fb, dtype=float)
    side = np.zeros(a.shape, dtype=int)
    x = np.where(fa == fb, 0.5 * (a + b), a - fa * (b - a) / (fb - fa))
    active = np.ones(a.shape, dtype=bool)
    for _ in range(_MAX_ITER):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            return x
        f = fun(x[idx])
        same = np.sign(f) == np.sign(fa[idx])
        # replace the endpoint with the same sign; halve the stale one twice in a row
        a_i, b_i, fa_i, fb_i, s_i = a[idx], b[idx], fa[idx], fb[idx], side[idx]
        a_i = np.where(same, x[idx], a_i)
        fa_i = np.where(same, f, fa_i)
        b_i = np.where(~same, x[idx], b_i)
        fb_i = np.where(~same, f, fb_i)
        fb_i = np.where(same & (s_i == 1), 0.5 * fb_i, fb_i)
        fa_i = np.where(~same & (s_i == -1), 0.5 * fa_i, fa_i)
        s_i = np.where(same, 1, -1)
        xn = a_i - fa_i * (b_i - a_i) / (fb_i - fa_i)
        xn = np.where(np.isfinite(xn), xn, 0.5 * (a_i + b_i))
        scale = 1.0 + np.abs(xn)
        done = (f == 0.0) | (np.abs(xn - x[idx]) <= 0.1 * _XTOL * scale) | (b_i - a_i <= _XTOL * scale)
        a[idx], b[idx], fa[idx], fb[idx], side[idx] = a_i, b_i, fa_i, fb_i, s_i
        x[idx] = np.where(f == 0.0, x[idx], xn)
        active[idx[done]] = False
    raise ConvergenceFailure(f"{int(active.sum())} critical points failed to converge")


def refine_root(v: Potential, kind, guess: float, max_iter: int = 30) -> float:
    """Newton iteration for one boundary eigenvalue of ``v`` started at ``guess``."""
    name = ENTRY[SpectrumKind(kind)]
    x = float(guess)
    for _ in range(max_iter):
        m = monodromy(v, x, want_deriv=True)
        step = -getattr(m, name) / getattr(m, "d" + name)
        x += step
        if abs(step) <= _XTOL * (1.0 + abs(x)):
            m = monodromy(v, x, want_deriv=True)
            return x - getattr(m, name) / getattr(m, "d" + name)
    raise ConvergenceFailure(f"Newton refinement of {SpectrumKind(kind).value} root stalled near {guess}")


def anchor(roots: np.ndarray, kind: SpectrumKind, length: int = 1) -> np.ndarray:
    """Index labels for sorted roots by minimal total displacement to the lattice."""
    roots = np.sort(roots)
    K = roots.size
    step = np.pi / length
    shift = 0.5 if SpectrumKind(kind).is_mixed else 0.0
    k0 = int(round(roots[0] / step + shift))
    best, best_cost = k0, math.inf
    for k in range(k0 - 4, k0 + 5):
        cost = np.abs(roots - step * (np.arange(k, k + K) - shift)).sum()
        if cost < best_cost - 1e-12:
            best, best_cost = k, cost
    return np.arange(best, best + K)


def _n0(indices, residuals) -> int:
    far = np.abs(indices[np.abs(residuals) >= 1.0])
    return int(far.max()) + 1 if far.size else 0


# -- boundary spectra ---------------------------------------------------------

def _grid(v: Potential, N: int, extra: float) -> np.ndarray:
    R = np.pi * (N + extra) / v.length + v.norm() + 1.0
    h = np.pi / (8 * v.length)
    K = 2 * int(math.ceil(R / h)) + 1
    return np.linspace(-R, R, K)


def _boundary_from_grid(v, N, kinds, lam, mono: Monodromy):
    """Refine every bracketed root of every requested kind in one batch."""
    a, b, fa, fb, tags, exact = [], [], [], [], [], []
    for t, kind in enumerate(kinds):
        f = getattr(mono, ENTRY[kind])
        ex, ch = _sign_brackets(lam, f)
        exact.append(ex)
        a.append(lam[ch])
        b.append(lam[ch + 1])
        fa.append(f[ch])
        fb.append(f[ch + 1])
        tags.append(np.full(ch.size, t))
    a, b, fa, fb, tags = map(np.concatenate, (a, b, fa, fb, tags))

    def fun(x, idx):
        m = monodromy(v, x, want_deriv=True)
        tag = tags[idx]
        rows = np.arange(x.size)
        vals = np.stack([getattr(m, ENTRY[k]) for k in kinds])[tag, rows]
        ders = np.stack([getattr(m, "d" + ENTRY[k]) for k in kinds])[tag, rows]
        return vals, ders

    roots = safeguarded_newton(fun, a, b, fa, fb, indexed=True)
    out = {}
    for t, kind in enumerate(kinds):
        r = np.sort(np.concatenate([roots[tags == t], exact[t]]))
        out[kind] = _label(v, N, kind, r)
    return out


def _label(v: Potential, N: int, kind: SpectrumKind, roots: np.ndarray) -> SpectrumWindow:
    L = v.length
    if roots.size == 0:
        raise CountMismatch(f"no {kind.value} roots bracketed")
    labels = anchor(roots, kind, L)
    idx = index_range(kind, N)
    limit = np.pi * (N if kind.is_mixed else N + 0.5) / L
    count = int(np.sum(np.abs(roots) < limit))
    if count != idx.size:
        raise CountMismatch(f"{kind.value}: {count} roots in |lambda| < {limit:.6g}, expected {idx.size}")
    keep = (labels >= idx[0]) & (labels <= idx[-1])
    if keep.sum() != idx.size:
        raise CountMismatch(f"{kind.value}: anchored window incomplete")
    vals = roots[keep]
    res = vals - unperturbed(kind, idx, L)
    meta = {"index_convention": f"{idx[0]}..{idx[-1]}", "entry": ENTRY[kind]}
    return SpectrumWindow(kind, idx, vals, L, count, _n0(idx, res), meta)


def boundary_spectra(v: Potential, N: int, kinds=BOUNDARY_KINDS) -> dict:
    """Several boundary spectra sharing a single grid evaluation."""
    if N < 1:
        raise ValueError("N must be >= 1")
    kinds = tuple(SpectrumKind(k) for k in kinds)
    lam = _grid(v, N, 0.75)
    return _boundary_from_grid(v, N, kinds, lam, monodromy(v, lam))


def boundary_spectrum(v: Potential, kind, N: int) -> SpectrumWindow:
    """Eigenvalues s_n, n in [-N, N] (mixed kinds: [-N+1, N])."""
    kind = SpectrumKind(kind)
    if kind not in BOUNDARY_KINDS:
        raise ValueError(f"{kind.value} is not a boundary-condition spectrum")
    return boundary_spectra(v, N, (kind,))[kind]


# -- periodic spectrum --------------------------------------------------------

@dataclass(frozen=True)
class PeriodicData:
    minus: SpectrumWindow
    plus: SpectrumWindow
    critical: SpectrumWindow
    delta_at_critical: np.ndarray
    discriminant_at_critical: np.ndarray
    closed: np.ndarray

    @property
    def log_height(self) -> np.ndarray:
        """|h_n| with cosh|h_n| = |Delta(lambda_n)|, from D = Delta^2 - 1."""
        D = np.maximum(self.discriminant_at_critical, 0.0)
        x = D / (1.0 + np.abs(self.delta_at_critical))
        return np.log1p(x + np.sqrt(x * (x + 2.0)))


def _discriminant(m: Monodromy):
    """Delta^2 - det y, written to stay accurate when y is close to +-identity."""
    return 0.25 * (m.theta1 - m.phi2) ** 2 + m.phi1 * m.theta2


def _discriminant_dot(m: Monodromy):
    return (0.5 * (m.theta1 - m.phi2) * (m.dtheta1 - m.dphi2)
            + m.dphi1 * m.theta2 + m.phi1 * m.dtheta2)


def _periodic_from_grid(v: Potential, N: int, lam, mono: Monodromy) -> PeriodicData:
    L = v.length
    dd = mono.delta_dot
    exact, ch = _sign_brackets(lam, dd)
    crit = illinois(lambda x: monodromy(v, x, want_deriv=True).delta_dot,
                    lam[ch], lam[ch + 1], dd[ch], dd[ch + 1])
    crit = np.sort(np.concatenate([crit, exact]))
    labels = anchor(crit, SpectrumKind.CRITICAL, L)
    want = np.arange(-N - 1, N + 2)
    keep = (labels >= want[0]) & (labels <= want[-1])
    if keep.sum() != want.size:
        raise CountMismatch(f"critical points: found labels {labels[0]}..{labels[-1]}, need {-N - 1}..{N + 1}")
    crit = crit[keep]
    mc = monodromy(v, crit, want_deriv=True)
    delta_c = mc.delta
    sgn = (-1.0) ** want
    if np.any(sgn * delta_c < 1.0 - 1e-9):
        raise GapResolutionFailure("(-1)^n Delta < 1 at a critical point")

    # zeros of Delta between consecutive critical points
    zs = safeguarded_newton(lambda x: (lambda m: (m.delta, m.delta_dot))(monodromy(v, x, want_deriv=True)),
                            crit[:-1], crit[1:], delta_c[:-1], delta_c[1:])

    inner = slice(1, -1)
    lc, Dc = crit[inner], _discriminant(mc)[inner]
    dc = delta_c[inner]
    zl, zr = zs[:-1], zs[1:]
    minus, plus = lc.copy(), lc.copy()
    open_ = Dc > 0
    if open_.any():
        est = np.sqrt(Dc[open_]) / np.abs(dc[open_])

        def fD(x):
            m = monodromy(v, x, want_deriv=True)
            return _discriminant(m), _discriminant_dot(m)

        o = np.flatnonzero(open_)
        c = lc[o]
        # D = -1 at the zeros of Delta and D > 0 at the critical point
        minus[o] = safeguarded_newton(fD, zl[o], c, -np.ones(o.size), Dc[o],
                                      x0=np.clip(c - est, zl[o], c))
        plus[o] = safeguarded_newton(fD, c, zr[o], Dc[o], -np.ones(o.size),
                                     x0=np.clip(c + est, c, zr[o]))
    if np.any(plus < minus):
        raise GapResolutionFailure("gap endpoints out of order")
    closed = (plus - minus) < CLOSED_GAP_WIDTH
    idx = want[inner]
    meta = {"index_convention": f"{idx[0]}..{idx[-1]}"}
    mk = lambda kind, vals: SpectrumWindow(kind, idx, vals, L, idx.size,  # noqa: E731
                                           _n0(idx, vals - np.pi * idx / L), dict(meta))
    return PeriodicData(mk(SpectrumKind.PERIODIC_MINUS, minus), mk(SpectrumKind.PERIODIC_PLUS, plus),
                        mk(SpectrumKind.CRITICAL, lc), dc, Dc, closed)


def periodic_spectrum(v: Potential, N: int) -> tuple[SpectrumWindow, SpectrumWindow]:
    """(lambda_n^-, lambda_n^+) for n in [-N, N]."""
    p = periodic_data(v, N)
    return p.minus, p.plus


def periodic_data(v: Potential, N: int) -> PeriodicData:
    if N < 1:
        raise ValueError("N must be >= 1")
    lam = _grid(v, N, 1.25)
    return _periodic_from_grid(v, N, lam, monodromy(v, lam, want_deriv=True))


def critical_points(v: Potential, N: int) -> SpectrumWindow:
    return periodic_data(v, N).critical


# -- complete spectral data -----------------------------------------------------

@dataclass(frozen=True)
class SpectralData:
    """All spectra of one potential on a common window, plus the monodromy at each eigenvalue."""

    potential: Potential
    N: int
    windows: dict
    periodic: PeriodicData | None
    at_eigen: dict

    def __getitem__(self, kind) -> SpectrumWindow:
        kind = SpectrumKind(kind)
        if kind is SpectrumKind.PERIODIC_MINUS:
            return self.periodic.minus
        if kind is SpectrumKind.PERIODIC_PLUS:
            return self.periodic.plus
        if kind is SpectrumKind.CRITICAL:
            return self.periodic.critical
        return self.windows[kind]

    @property
    def mu(self):
        return self.windows[SpectrumKind.DIRICHLET]

    @property
    def nu(self):
        return self.windows[SpectrumKind.NEUMANN]

    @property
    def tau(self):
        return self.windows[SpectrumKind.MIXED1]

    @property
    def rho(self):
        return self.windows[SpectrumKind.MIXED2]


_cache: "weakref.WeakKeyDictionary[Potential, dict]" = weakref.WeakKeyDictionary()


def spectral_data(v: Potential, N: int, periodic: bool = True, kinds=BOUNDARY_KINDS) -> SpectralData:
    """Boundary spectra and, optionally, the periodic data from one grid pass (cached per potential)."""
    kinds = tuple(SpectrumKind(k) for k in kinds)
    per = _cache.setdefault(v, {})
    for (n_, p_, k_), hit in per.items():
        if n_ == N and (p_ or not periodic) and set(kinds) <= set(k_):
            return hit
    lam = _grid(v, N, 1.25)
    mono = monodromy(v, lam, want_deriv=periodic)
    windows = _boundary_from_grid(v, N, kinds, lam, mono)
    pdata = _periodic_from_grid(v, N, lam, mono) if periodic else None
    at = {k: monodromy(v, w.values, want_deriv=True) for k, w in windows.items()}
    data = SpectralData(v, N, windows, pdata, at)
    per[(N, periodic, kinds)] = data
    return data


# -- structural checks ----------------------------------------------------------

def interlacing_margin(data: SpectralData) -> float:
    """Smallest gap in tau_n, rho_n < mu_n, nu_n < tau_{n+1}, rho_{n+1}; positive iff strict."""
    n = np.arange(-data.N + 1, data.N)
    lo = np.maximum(data.tau.at(n), data.rho.at(n))
    mid_lo = np.minimum(data.mu.at(n), data.nu.at(n))
    mid_hi = np.maximum(data.mu.at(n), data.nu.at(n))
    hi = np.minimum(data.tau.at(n + 1), data.rho.at(n + 1))
    return float(min((mid_lo - lo).min(), (hi - mid_hi).min()))


def enclosure_violation(data: SpectralData) -> float:
    """Largest violation of mu_n, nu_n in [l_n^-, l_n^+] and tau_n, rho_n in (l_{n-1}^+, l_n^-)."""
    p = data.periodic
    n = np.arange(-data.N, data.N + 1)
    lm, lp = p.minus.at(n), p.plus.at(n)
    worst = 0.0
    for w in (data.mu, data.nu):
        s = w.at(n)
        worst = max(worst, float(np.max(lm - s)), float(np.max(s - lp)))
    m = np.arange(-data.N + 1, data.N + 1)
    for w in (data.tau, data.rho):
        s = w.at(m)
        worst = max(worst, float(np.max(p.plus.at(m - 1) - s)), float(np.max(s - p.minus.at(m))))
    return worst


def sign_condition_values(data: SpectralData) -> dict:
    """Signed complementary entries for the kinds present; all must be positive.

    (-1)^n phi2 at mu_n, (-1)^n theta1 at nu_n, (-1)^n phi1 at tau_n and
    (-1)^(n+1) theta2 at rho_n.
    """
    out = {}
    for kind, extra in ((SpectrumKind.DIRICHLET, 0), (SpectrumKind.NEUMANN, 0),
                        (SpectrumKind.MIXED1, 0), (SpectrumKind.MIXED2, 1)):
        if kind not in data.windows:
            continue
        w = data.windows[kind]
        vals = getattr(data.at_eigen[kind], COMPLEMENT[kind])
        out[kind] = (-1.0) ** (w.indices + extra) * vals
    return out


# -- Hadamard factorization -----------------------------------------------------

_FREE = {SpectrumKind.DIRICHLET: lambda x: -np.sin(x), SpectrumKind.NEUMANN: np.sin,
         SpectrumKind.MIXED1: np.cos, SpectrumKind.MIXED2: np.cos}


def hadamard_product(window: SpectrumWindow, lam) -> np.ndarray:
    """Entry reconstructed from its zeros: f0(lambda) prod_n (s_n - lambda)/(s_n^0 - lambda).

    f0 is the corresponding entry of the free monodromy; the product is the
    symmetric truncation over the window.
    """
    lam = np.asarray(lam, dtype=float)
    ratio = (window.values[:, None] - lam.ravel()) / (window.unperturbed[:, None] - lam.ravel())
    return (_FREE[window.kind](lam.ravel()) * np.prod(ratio, axis=0)).reshape(lam.shape)
