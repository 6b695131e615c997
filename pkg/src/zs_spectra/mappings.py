"""Composite spectral maps assembled from precomputed spectral windows."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AlternationViolation, NegativeDiscriminant, UnsupportedSigma, WindowMismatch
from .norming import NormingData, norming_constants
from .potential import Potential, TransformKind, apply_transform, fourier_pair, rotate
from .spectra import SpectralData, SpectrumKind, SpectrumWindow

DISCRIMINANT_SLACK = 1e-10


# -- 4-spectra map ---------------------------------------------------------------

@dataclass(frozen=True)
class FourSpectra:
    """f_{2n-1} = (rho_n - tau_n)/2 and f_{2n} = (nu_n - mu_n)/2 on m in [-2N, 2N]."""

    indices: np.ndarray
    values: np.ndarray
    potential_norm: float

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.values))

    def at(self, m):
        return self.values[np.asarray(m) - self.indices[0]]

    def bounds(self) -> tuple[float, float, float]:
        """(|f|/sqrt2, |v|, 2|f|(1+|f|)); the middle lies between the outer two."""
        f = self.norm
        return f / math.sqrt(2.0), self.potential_norm, 2.0 * f * (1.0 + f)


def four_spectra(data: SpectralData) -> FourSpectra:
    N = data.N
    m = np.arange(-2 * N, 2 * N + 1)
    vals = np.zeros(m.size)
    n_even = np.arange(-N, N + 1)
    vals[2 * n_even + 2 * N] = 0.5 * (data.nu.at(n_even) - data.mu.at(n_even))
    n_odd = np.arange(-N + 1, N + 1)
    vals[2 * n_odd - 1 + 2 * N] = 0.5 * (data.rho.at(n_odd) - data.tau.at(n_odd))
    return FourSpectra(m, vals, data.potential.norm())


# -- star, shift and replacing maps ------------------------------------------------

def star_map(A: SpectrumWindow, B: SpectrumWindow) -> SpectrumWindow:
    """Interleave ... < A_n < B_n < A_{n+1} < ... as indices 2n-1 (A) and 2n (B).

    The result is labelled against the lattice pi m / 2 of an interval of length 2.
    """
    lo = max(A.indices[0], B.indices[0])
    hi = min(A.indices[-1], B.indices[-1])
    if lo > hi:
        raise WindowMismatch("windows share no index")
    n = np.arange(lo, hi + 1)
    out = np.empty(2 * n.size)
    out[0::2], out[1::2] = A.at(n), B.at(n)
    if np.any(np.diff(out) <= 0):
        k = int(np.argmin(np.diff(out)))
        raise AlternationViolation(f"{A.kind.value}/{B.kind.value} do not alternate near n={n[k // 2]}")
    m = np.empty(2 * n.size, dtype=int)
    m[0::2], m[1::2] = 2 * n - 1, 2 * n
    return SpectrumWindow(SpectrumKind.DIRICHLET, m, out, length=2,
                          meta={"star": f"{A.kind.value}*{B.kind.value}"})


_SHIFTED = {SpectrumKind.DIRICHLET: SpectrumKind.MIXED1, SpectrumKind.NEUMANN: SpectrumKind.MIXED2}


def shift_map(w: SpectrumWindow) -> SpectrumWindow:
    """(S z)_n = z_n - pi/2, relabelled to the mixed lattice."""
    if w.kind not in _SHIFTED:
        raise ValueError("shift map acts on Dirichlet or Neumann windows")
    return SpectrumWindow(_SHIFTED[w.kind], w.indices.copy(), w.values - np.pi / 2, w.length,
                          meta={"shifted": w.kind.value})


@dataclass(frozen=True)
class SigmaSequence:
    """Signs sigma_m in {-1, +1} for m in [lo, hi]."""

    indices: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if not np.all(np.isin(self.values, (-1, 1))):
            raise ValueError("sigma entries must be +1 or -1")

    @classmethod
    def from_pattern(cls, pattern: str, N: int) -> SigmaSequence:
        m = np.arange(-2 * N, 2 * N + 1)
        alt = np.where(m % 2 == 0, 1, -1)
        table = {"minus": -np.ones(m.size, dtype=int), "alternating": alt, "neg_alternating": -alt}
        if pattern not in table:
            raise UnsupportedSigma(f"unknown sigma pattern {pattern!r}")
        return cls(m, table[pattern])

    def at(self, m):
        return self.values[np.asarray(m) - self.indices[0]]

    def pattern(self) -> str | None:
        alt = np.where(self.indices % 2 == 0, 1, -1)
        if np.all(self.values == -1):
            return "minus"
        if np.array_equal(self.values, alt):
            return "alternating"
        if np.array_equal(self.values, -alt):
            return "neg_alternating"
        return None


_PATTERN_TRANSFORM = {"minus": TransformKind.F0, "alternating": TransformKind.F1,
                      "neg_alternating": TransformKind.F2}


def lamplighter_explicit(v: Potential, sigma: SigmaSequence) -> Potential:
    """The potential whose 4-spectra sequence is sigma times that of v, for the three explicit patterns."""
    pattern = sigma.pattern()
    if pattern is None:
        raise UnsupportedSigma("only all -1, (-1)^m and -(-1)^m have an explicit transform")
    return apply_transform(v, _PATTERN_TRANSFORM[pattern])


def replace_map(data: SpectralData, Y1, Y2) -> tuple[SpectrumWindow, SigmaSequence]:
    """zeta * phi with zeta_n = rho_n (n in Y1) else tau_n and phi_n = nu_n (n in Y2) else mu_n.

    Also returns sigma with sigma_{2j-1} = -1 iff j in Y1 and sigma_{2j} = -1 iff j in Y2.
    """
    Y1, Y2 = set(int(j) for j in Y1), set(int(j) for j in Y2)
    tau, rho, mu, nu = data.tau, data.rho, data.mu, data.nu
    zeta = np.array([rho.at(n) if n in Y1 else tau.at(n) for n in tau.indices])
    phi = np.array([nu.at(n) if n in Y2 else mu.at(n) for n in mu.indices])
    A = SpectrumWindow(SpectrumKind.MIXED1, tau.indices, zeta, meta={"replaced": sorted(Y1)})
    B = SpectrumWindow(SpectrumKind.DIRICHLET, mu.indices, phi, meta={"replaced": sorted(Y2)})
    m = np.arange(-2 * data.N, 2 * data.N + 1)
    j = (m + 1) // 2
    sig = np.where(m % 2 == 1, np.where(np.isin(j, list(Y1)), -1, 1),
                   np.where(np.isin(m // 2, list(Y2)), -1, 1))
    return star_map(A, B), SigmaSequence(m, sig)


# -- gap maps ------------------------------------------------------------------------

@dataclass(frozen=True)
class GapMapData:
    indices: np.ndarray
    half_width: np.ndarray
    psi_c: np.ndarray
    psi_s: np.ndarray
    gp_c: np.ndarray
    gp_s: np.ndarray
    h_c: np.ndarray
    h_s: np.ndarray
    gh_c: np.ndarray
    gh_s: np.ndarray
    abs_h: np.ndarray
    delta_at_critical: np.ndarray

    @staticmethod
    def _norm(c, s) -> float:
        return math.sqrt(float(np.sum(c * c + s * s)))

    @property
    def psi_norm(self) -> float:
        return self._norm(self.psi_c, self.psi_s)

    @property
    def h_norm(self) -> float:
        return self._norm(self.h_c, self.h_s)

    def psi_sobolev_norm_sq(self) -> float:
        """|psi|^2 + sum (2 pi n)^2 |psi_n|^2."""
        sq = self.psi_c ** 2 + self.psi_s ** 2
        return float(np.sum(sq) + np.sum((2 * np.pi * self.indices) ** 2 * sq))

    def invariant_deviations(self) -> dict:
        return {
            "psi_modulus": float(np.max(np.abs(self.psi_c ** 2 + self.psi_s ** 2 - self.half_width ** 2))),
            "gp_modulus": float(np.max(np.abs(self.gp_c ** 2 + self.gp_s ** 2 - self.half_width ** 2))),
            "h_cosh": float(np.max(np.abs(np.cosh(self.abs_h) - np.abs(self.delta_at_critical)))),
            "h_dominates": float(max(0.0, np.max(np.abs(self.h_s) - self.abs_h))),
            "gh_dominates": float(max(0.0, np.max(np.abs(self.gh_s) - self.abs_h))),
        }


def _complement(total_sq, part, sign, what):
    disc = total_sq - part ** 2
    if np.any(disc < -DISCRIMINANT_SLACK):
        raise NegativeDiscriminant(f"{what}: squared component {disc.min():.3e} below zero")
    return np.sqrt(np.maximum(disc, 0.0)) * sign


def gap_maps(data: SpectralData, norming: NormingData | None = None) -> GapMapData:
    """psi, gp (gap endpoints with Dirichlet/Neumann data) and h, gh (critical values)."""
    if data.periodic is None:
        raise ValueError("gap maps need the periodic spectrum")
    norming = norming_constants(data) if norming is None else norming
    N = data.N
    n = np.arange(-N, N + 1)
    p = data.periodic
    lm, lp, lc = p.minus.at(n), p.plus.at(n), p.critical.at(n)
    mu, nu = data.mu.at(n), data.nu.at(n)
    r, s = norming["r"].at(n), norming["s"].at(n)
    half = 0.5 * (lp - lm)
    mid = 0.5 * (lp + lm)
    psi_c = mid - mu
    # the angular sign follows log|phi2(mu_n)| = -r_n
    psi_s = _complement(half ** 2, psi_c, np.sign(-r), "psi")
    gp_c = mid - nu
    gp_s = _complement(half ** 2, gp_c, np.sign(-s), "gp")
    abs_h = p.log_height
    h_c = _complement(abs_h ** 2, r, np.sign(lc - mu), "h")
    gh_c = _complement(abs_h ** 2, s, np.sign(lc - nu), "gh")
    return GapMapData(n, half, psi_c, psi_s, gp_c, gp_s, h_c, r.copy(), gh_c, s.copy(),
                      abs_h, p.delta_at_critical)


# -- estimates -------------------------------------------------------------------------

@dataclass(frozen=True)
class Estimate:
    name: str
    lower: float
    middle: float
    upper: float

    @property
    def margin(self) -> float:
        return min(self.middle - self.lower, self.upper - self.middle)


def sobolev_energy(v: Potential) -> float:
    """Q2 = int (|v'|^2 + |v|^4) dx by trapezoid quadrature on the grid."""
    x = v.grid
    val = v(x)
    try:
        dv = v.derivative(x)
    except NotImplementedError:
        dv = np.gradient(val, x, axis=1, edge_order=2)
    integrand = np.sum(dv ** 2, axis=0) + np.sum(val ** 2, axis=0) ** 2
    return float(np.trapezoid(integrand, x))


def estimates(data: SpectralData, norming: NormingData | None = None, with_q2: bool = True) -> list[Estimate]:
    """The four-spectra and gap-map two-sided norm estimates on the window."""
    v = data.potential
    vn = v.norm()
    f = four_spectra(data)
    g = gap_maps(data, norming)
    out = [Estimate("four_spectra_norm", *f.bounds()),
           Estimate("critical_gap_norm", 0.5 * vn, g.h_norm, 3.0 * vn * math.sqrt(1.0 + vn))]
    pn = g.psi_norm
    out.append(Estimate("gap_norm", pn / math.sqrt(2.0), vn, 2.0 * pn * (1.0 + pn)))
    if with_q2:
        p1 = g.psi_sobolev_norm_sq()
        out.append(Estimate("gap_sobolev", p1 / 24.0, sobolev_energy(v),
                            8.0 * ((np.pi + vn ** 2) * p1 + vn ** 2)))
    return out


# -- asymptotics -------------------------------------------------------------------------

_RESIDUAL_SPEC = {
    SpectrumKind.DIRICHLET: ("r", +1.0, False),
    SpectrumKind.NEUMANN: ("s", -1.0, False),
    SpectrumKind.MIXED1: ("t", +1.0, True),
    SpectrumKind.MIXED2: ("u", -1.0, True),
}


@dataclass(frozen=True)
class ResidualReport:
    kind: SpectrumKind
    indices: np.ndarray
    residuals: np.ndarray  # shape (n, 2)
    N: int

    def tail(self, lo: float, hi: float) -> float:
        a = np.abs(self.indices)
        sel = (a >= lo) & (a <= hi)
        return float(np.sum(self.residuals[sel] ** 2))

    @property
    def tail_far(self) -> float:
        return self.tail(self.N / 2, self.N)

    @property
    def tail_near(self) -> float:
        return self.tail(self.N / 4, self.N / 2)

    @property
    def ratio(self) -> float:
        return self.tail_far / self.tail_near if self.tail_near > 0 else 0.0


def asymptotic_residuals(data: SpectralData, kind, norming: NormingData | None = None) -> ResidualReport:
    """Eigenvalue and norming-constant residuals after the first-order Fourier term.

    Dirichlet: (mu_n - pi n, r_n) + J1 F_n(v); Neumann: (nu_n - pi n, s_n) - J1 F_n(v);
    the mixed kinds use w = exp(-pi x J) v in place of v.
    """
    kind = SpectrumKind(kind)
    name, sign, use_rot = _RESIDUAL_SPEC[kind]
    norming = norming_constants(data) if norming is None else norming
    w = data.windows[kind]
    v = data.potential
    src = rotate(v, inverse=True) if use_rot else v
    four = np.array([fourier_pair(src, int(n)) for n in w.indices])
    j1f = four * np.array([1.0, -1.0])
    res = np.column_stack([w.residuals, norming[name].at(w.indices)]) + sign * j1f
    return ResidualReport(kind, w.indices, res, data.N)


# -- uniqueness signature ------------------------------------------------------------------

def uniqueness_signature(data: SpectralData) -> dict:
    """Periodic eigenvalues, mixed eigenvalues and the Dirichlet/Neumann ordering signs."""
    p = data.periodic
    n = np.arange(-data.N, data.N + 1)
    return {"lambda_minus": p.minus.at(n), "lambda_plus": p.plus.at(n),
            "tau": data.tau.values.copy(), "order_sign": np.sign(data.mu.at(n) - data.nu.at(n))}


def signature_distance(a: dict, b: dict) -> float:
    """Largest entrywise difference between two uniqueness signatures."""
    return max(float(np.max(np.abs(a[k] - b[k]))) for k in a)
