"""Fundamental solution of J y' + V y = lambda y with y(0) = identity.

Writing y' = A(x) y with A = -lambda J + J V, the frozen-coefficient matrix
satisfies A^2 = (|v|^2 - lambda^2) I, so one cell of width h is exactly

    exp(h A) = C(z) I + h S(z) A,   z = h^2 (lambda^2 - |v|^2),
    C(z) = cos(sqrt z),  S(z) = sin(sqrt z) / sqrt z,

continued to z < 0 through cosh/sinh.  C and S are entire in z and are
evaluated by a short Taylor series when |z| <= 1, which covers every
realistic step.  The per-cell matrices are multiplied with a pairwise tree
reduction, vectorized over lambda.  The lambda-derivative is carried as the
pair (E, dE/dlambda) with the product rule, which is associative, so the same
reduction applies.  Two resolutions (M and 2M cells) are combined by one
Richardson step.
"""
from __future__ import annotations

import math
import os
import weakref
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .potential import J, Potential

_TERMS = 9
_CC = [(-1) ** k / math.factorial(2 * k) for k in range(_TERMS)]
_SC = [(-1) ** k / math.factorial(2 * k + 1) for k in range(_TERMS)]
_DC = [(k + 1) * _SC[k + 1] for k in range(_TERMS - 1)]

# elements per work array; bounds peak memory to a few tens of MB
_CHUNK_ELEMS = 2 ** 19

_midpoint_cache: "weakref.WeakKeyDictionary[Potential, dict]" = weakref.WeakKeyDictionary()


def _horner(coef, z):
    r = np.full_like(z, coef[-1])
    for c in coef[-2::-1]:
        r *= z
        r += c
    return r


def _closed_form(z):
    """C, S, S' evaluated directly; used where the series is out of range."""
    C = np.empty_like(z)
    S = np.empty_like(z)
    dS = np.empty_like(z)
    pos = z > 0
    u = np.sqrt(z[pos])
    C[pos], S[pos] = np.cos(u), np.sin(u) / u
    dS[pos] = (u * np.cos(u) - np.sin(u)) / (2 * u ** 3)
    neg = ~pos
    u = np.sqrt(-z[neg])
    C[neg], S[neg] = np.cosh(u), np.sinh(u) / u
    dS[neg] = -(u * np.cosh(u) - np.sinh(u)) / (2 * u ** 3)
    return C, S, dS


def _cell_functions(z, deriv):
    C, S = _horner(_CC, z), _horner(_SC, z)
    dS = _horner(_DC, z) if deriv else None
    big = np.abs(z) > 1.0
    if big.any():
        Cb, Sb, dSb = _closed_form(z[big])
        C[big], S[big] = Cb, Sb
        if deriv:
            dS[big] = dSb
    return C, S, dS


def _midpoints(v: Potential, cells: int):
    per = _midpoint_cache.setdefault(v, {})
    if cells not in per:
        h = v.length / cells
        x = (np.arange(cells) + 0.5) * h
        p, q = v(x)
        per[cells] = (p, q, p * p + q * q)
    return per[cells]


def _mul(X, Y):
    a, b, c, d = X
    e, f, g, k = Y
    return [a * e + b * g, a * f + b * k, c * e + d * g, c * f + d * k]


def _reduce(e, d):
    """Ordered product E_m ... E_2 E_1 along axis 1, with optional derivative."""
    while e[0].shape[1] > 1:
        if e[0].shape[1] % 2:
            one = np.ones_like(e[0][:, :1])
            zero = np.zeros_like(one)
            e = [np.concatenate([x, y], 1) for x, y in zip(e, (one, zero, zero, one))]
            if d is not None:
                d = [np.concatenate([x, zero], 1) for x in d]
        first = [x[:, 0::2] for x in e]
        second = [x[:, 1::2] for x in e]
        if d is not None:
            dfirst = [x[:, 0::2] for x in d]
            dsecond = [x[:, 1::2] for x in d]
            d = [s + t for s, t in zip(_mul(dsecond, first), _mul(second, dfirst))]
        e = _mul(second, first)
    return [x[:, 0] for x in e], (None if d is None else [x[:, 0] for x in d])


def _product(lam, p, q, s, h, deriv):
    lam = lam[:, None]
    z = (lam * lam - s[None, :]) * (h * h)
    C, S, dS = _cell_functions(z, deriv)
    hS = S * h
    hSq = hS * q
    e = [C + hSq, -hS * (p + lam), hS * (lam - p), C - hSq]
    d = None
    if deriv:
        a = dS * ((2 * h ** 3) * lam)
        aq = a * q
        t = hS * (h * lam)
        d = [aq - t, -a * (p + lam) - hS, a * (lam - p) + hS, -t - aq]
    return _reduce(e, d)


def _richardson_chunk(v: Potential, lam, deriv):
    out = []
    for cells in (v.cells, 2 * v.cells):
        p, q, s = _midpoints(v, cells)
        out.append(_product(lam, p, q, s, v.length / cells, deriv))
    (e1, d1), (e2, d2) = out
    E = [(4 * b - a) / 3 for a, b in zip(e1, e2)]
    D = [(4 * b - a) / 3 for a, b in zip(d1, d2)] if deriv else None
    return E, D


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("ZS_SPECTRA_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class Monodromy:
    """y(L, lambda) = [[theta1, phi1], [theta2, phi2]] for scalar or array lambda."""

    lam: np.ndarray
    theta1: np.ndarray
    phi1: np.ndarray
    theta2: np.ndarray
    phi2: np.ndarray
    dtheta1: np.ndarray | None = None
    dphi1: np.ndarray | None = None
    dtheta2: np.ndarray | None = None
    dphi2: np.ndarray | None = None

    @property
    def has_deriv(self) -> bool:
        return self.dtheta1 is not None

    def matrix(self) -> np.ndarray:
        """Entries stacked as an array of shape (..., 2, 2)."""
        return np.stack([np.stack([self.theta1, self.phi1], -1),
                         np.stack([self.theta2, self.phi2], -1)], -2)

    def deriv_matrix(self) -> np.ndarray:
        if not self.has_deriv:
            raise ValueError("monodromy was computed without the lambda-derivative")
        return np.stack([np.stack([self.dtheta1, self.dphi1], -1),
                         np.stack([self.dtheta2, self.dphi2], -1)], -2)

    def det(self):
        return self.theta1 * self.phi2 - self.theta2 * self.phi1

    @property
    def delta(self):
        return 0.5 * (self.theta1 + self.phi2)

    @property
    def delta_dot(self):
        return 0.5 * (self.dtheta1 + self.dphi2)

    def entry(self, name: str):
        return getattr(self, name)


def monodromy(v: Potential, lam, want_deriv: bool = False) -> Monodromy:
    """Monodromy y(L, lambda) for scalar or 1-D array ``lam``."""
    lam_arr = np.asarray(lam, dtype=float)
    scalar = lam_arr.ndim == 0
    flat = np.atleast_1d(lam_arr).ravel()
    if not np.all(np.isfinite(flat)):
        raise ValueError("lambda must be finite")
    step = max(1, _CHUNK_ELEMS // (2 * v.cells))
    chunks = [flat[i:i + step] for i in range(0, flat.size, step)]
    work = lambda c: _richardson_chunk(v, c, want_deriv)  # noqa: E731
    nthreads = min(_threads(), len(chunks))
    if nthreads > 1:
        _midpoints(v, v.cells), _midpoints(v, 2 * v.cells)
        with ThreadPoolExecutor(nthreads) as pool:
            parts = list(pool.map(work, chunks))
    else:
        parts = [work(c) for c in chunks]
    E = [np.concatenate([p[0][i] for p in parts]) for i in range(4)]
    D = [np.concatenate([p[1][i] for p in parts]) for i in range(4)] if want_deriv else [None] * 4

    def shape(x):
        if x is None:
            return None
        return x[0] if scalar else x.reshape(lam_arr.shape)

    return Monodromy(lam_arr if not scalar else float(lam_arr), *(shape(x) for x in E),
                     *(shape(x) for x in D))


def lyapunov(v: Potential, lam):
    """Delta(lambda) = trace(y(L, lambda)) / 2."""
    return monodromy(v, lam).delta


def free_monodromy(lam, x=1.0) -> np.ndarray:
    """exp(-lambda x J) = [[cos, -sin], [sin, cos]] evaluated at lambda x."""
    c, s = np.cos(lam * x), np.sin(lam * x)
    return np.array([[c, -s], [s, c]])


def constant_monodromy(a: float, b: float, lam, x: float = 1.0) -> np.ndarray:
    """Closed-form y(x, lambda) for the constant potential (a, b), shape (..., 2, 2)."""
    lam = np.asarray(lam, dtype=float)
    w2 = (lam * lam - a * a - b * b) * x * x
    C, S, _ = _cell_functions(np.atleast_1d(w2).astype(float), False)
    C, S = C.reshape(lam.shape), S.reshape(lam.shape) * x
    M = np.stack([np.stack([np.full(lam.shape, b), -a - lam], -1),
                  np.stack([lam - a, np.full(lam.shape, -b)], -1)], -2)
    return C[..., None, None] * np.eye(2) + S[..., None, None] * M


@dataclass(frozen=True)
class Trajectory:
    """Fundamental matrix sampled at the grid nodes, shape (cells + 1, 2, 2)."""

    x: np.ndarray
    lam: float
    y: np.ndarray


def _cell_entries(v: Potential, lam: np.ndarray, cells: int):
    p, q, s = _midpoints(v, cells)
    h = v.length / cells
    lam = lam[:, None]
    C, S, _ = _cell_functions((lam * lam - s[None, :]) * (h * h), False)
    hS = h * S
    return C + hS * q, -hS * (p + lam), hS * (lam - p), C - hS * q


def _cumulative(lam: np.ndarray, v: Potential, cells: int) -> np.ndarray:
    """Running products y(x_k) for all lambda at once, shape (n_lambda, cells + 1, 2, 2)."""
    e11, e12, e21, e22 = _cell_entries(v, lam, cells)
    out = np.empty((lam.size, cells + 1, 2, 2))
    a, b = np.ones(lam.size), np.zeros(lam.size)
    c, d = np.zeros(lam.size), np.ones(lam.size)
    out[:, 0] = np.eye(2)
    for k in range(cells):
        a, b, c, d = (e11[:, k] * a + e12[:, k] * c, e11[:, k] * b + e12[:, k] * d,
                      e21[:, k] * a + e22[:, k] * c, e21[:, k] * b + e22[:, k] * d)
        out[:, k + 1, 0, 0], out[:, k + 1, 0, 1] = a, b
        out[:, k + 1, 1, 0], out[:, k + 1, 1, 1] = c, d
    return out


def trajectories(v: Potential, lam) -> np.ndarray:
    """y(x_k, lambda) at the grid nodes for each lambda, shape (n_lambda, cells + 1, 2, 2).

    Uses the cell exponentials of :func:`monodromy` and the same Richardson
    combination, so the last node agrees with the monodromy.
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    if not np.all(np.isfinite(lam)):
        raise ValueError("lambda must be finite")
    coarse = _cumulative(lam, v, v.cells)
    fine = _cumulative(lam, v, 2 * v.cells)[:, ::2]
    return (4 * fine - coarse) / 3


def trajectory(v: Potential, lam: float) -> Trajectory:
    """Fundamental matrix at every node for a single lambda."""
    lam = float(lam)
    return Trajectory(v.grid, lam, trajectories(v, lam)[0])


def picard_approx(v: Potential, lam: float, terms: int) -> np.ndarray:
    """Partial sum of the Picard series for y(L, lambda), shape (2, 2).

    y_0 = exp(-lambda x J) and y_n(x) = y_0(x) int_0^x y_0(s)^{-1} J V(s) y_{n-1}(s) ds.
    The nested integrals use the cumulative trapezoid rule on two resolutions
    with a Richardson combination.  Intended as an independent oracle for
    small potentials.
    """
    if terms < 1:
        raise ValueError("terms must be >= 1")
    results = []
    for cells in (v.cells, 2 * v.cells):
        x = np.linspace(0.0, float(v.length), cells + 1)
        p, q = v(x)
        y0 = np.moveaxis(free_monodromy(lam, x), -1, 0)  # (n, 2, 2)
        y0inv = np.transpose(y0, (0, 2, 1))
        V = np.stack([np.stack([p, q], -1), np.stack([q, -p], -1)], -2)
        kernel = y0inv @ (J @ V)
        total = y0.copy()
        term = y0
        for _ in range(terms - 1):
            integrand = kernel @ term
            term = y0 @ cumulative_trapezoid(integrand, x, axis=0, initial=0.0)
            total = total + term
        results.append(total[-1])
    return (4 * results[1] - results[0]) / 3
