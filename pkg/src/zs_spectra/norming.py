"""Norming, normalizing and star constants at the four boundary spectra.

For an eigenvalue s of one boundary problem let f be the eigenfunction column
of y(x, s) (phi for Dirichlet and mixed1, theta for Neumann and mixed2).  Green's
identity int |f|^2 = (J f_dot, f) evaluated between 0 and 1 gives

    |phi(., mu)|^2    = -phi1_dot  * phi2      at mu
    |theta(., nu)|^2  =  theta2_dot * theta1   at nu
    |phi(., tau)|^2   =  phi2_dot  * phi1      at tau
    |theta(., rho)|^2 = -theta1_dot * theta2   at rho

and each normalizing constant is minus the log of that squared norm.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson

from .errors import CrossCheckFailure, DegenerateEntry, WindowMismatch
from .evolve import trajectories
from .spectra import COMPLEMENT, SpectralData, SpectrumKind

D, N_, M1, M2 = (SpectrumKind.DIRICHLET, SpectrumKind.NEUMANN,
                 SpectrumKind.MIXED1, SpectrumKind.MIXED2)

# kind -> (norming, normalizing, star) names
NAMES = {D: ("r", "a", "a_star"), N_: ("s", "b", "b_star"),
         M1: ("t", "c", "c_star"), M2: ("u", "d", "d_star")}

# column of y(x, lambda) holding the eigenfunction
_COLUMN = {D: 1, N_: 0, M1: 1, M2: 0}

# derivative entry and sign in the Green identity
_GREEN = {D: ("dphi1", -1.0), N_: ("dtheta2", 1.0), M1: ("dphi2", 1.0), M2: ("dtheta1", -1.0)}

ENTRY_FLOOR = 1e-13
CROSS_CHECK_RTOL = 1e-6


@dataclass(frozen=True)
class Sequence:
    indices: np.ndarray
    values: np.ndarray

    def at(self, n):
        pos = np.asarray(n) - self.indices[0]
        if np.any(pos < 0) or np.any(pos >= self.values.size):
            raise WindowMismatch(f"index outside [{self.indices[0]}, {self.indices[-1]}]")
        return self.values[pos]


@dataclass(frozen=True)
class NormingData:
    """Sequences keyed by name: r s t u (norming), a b c d (normalizing), *_star."""

    N: int
    seq: dict = field(default_factory=dict)
    squared_norms_quadrature: dict = field(default_factory=dict)

    def __getitem__(self, name: str) -> Sequence:
        return self.seq[name]

    def to_csv(self) -> str:
        cols = ["r", "s", "t", "u", "a", "b", "c", "d", "a_star", "b_star", "c_star", "d_star"]
        cols = [c for c in cols if c in self.seq]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", *cols])
        for n in range(-self.N, self.N + 1):
            row = [n]
            for c in cols:
                s = self.seq[c]
                row.append(repr(float(s.at(n))) if s.indices[0] <= n <= s.indices[-1] else "")
            w.writerow(row)
        return buf.getvalue()


def norming_constants(data: SpectralData) -> NormingData:
    """r_n = -log|phi2(mu_n)|, s_n = -log|theta1(nu_n)|, t_n = -log|phi1(tau_n)|, u_n = -log|theta2(rho_n)|."""
    seq = {}
    for kind, (name, _, _) in NAMES.items():
        w = data.windows[kind]
        entry = np.abs(getattr(data.at_eigen[kind], COMPLEMENT[kind]))
        if np.any(entry < ENTRY_FLOOR):
            n = w.indices[np.argmin(entry)]
            raise DegenerateEntry(f"{COMPLEMENT[kind]} vanishes at {kind.value} eigenvalue n={n}")
        seq[name] = Sequence(w.indices, -np.log(entry))
    return NormingData(data.N, seq)


def _green_norms(data: SpectralData, kind) -> np.ndarray:
    m = data.at_eigen[kind]
    dname, sign = _GREEN[kind]
    return sign * getattr(m, dname) * getattr(m, COMPLEMENT[kind])


def eigenfunction_norms(data: SpectralData, kind) -> np.ndarray:
    """Squared L2 norms of the eigenfunctions by Simpson quadrature of trajectories."""
    v = data.potential
    w = data.windows[SpectrumKind(kind)]
    y = trajectories(v, w.values)[..., _COLUMN[SpectrumKind(kind)]]
    return simpson(np.sum(y * y, axis=-1), x=v.grid, axis=1)


def normalizing_constants(data: SpectralData, rtol: float = CROSS_CHECK_RTOL) -> NormingData:
    """Norming data completed with normalizing and star constants.

    The squared eigenfunction norm is computed by quadrature and by the
    Green-identity product; the two must agree to ``rtol``.
    """
    base = norming_constants(data)
    seq = dict(base.seq)
    quad = {}
    for kind, (name, norm_name, star_name) in NAMES.items():
        w = data.windows[kind]
        green = _green_norms(data, kind)
        q = eigenfunction_norms(data, kind)
        quad[norm_name] = q
        if np.any(green <= 0):
            n = w.indices[np.argmin(green)]
            raise CrossCheckFailure(f"Green-identity norm not positive for {kind.value} n={n}")
        rel = np.abs(q - green) / green
        if rel.max() > rtol:
            n = w.indices[np.argmax(rel)]
            raise CrossCheckFailure(f"{norm_name}: quadrature and product disagree at n={n} "
                                    f"(relative {rel.max():.2e})")
        seq[norm_name] = Sequence(w.indices, -np.log(green))
        dname = _GREEN[kind][0]
        seq[star_name] = Sequence(w.indices, np.log(np.abs(getattr(data.at_eigen[kind], dname))))
    return NormingData(data.N, seq, quad)


@dataclass(frozen=True)
class DecayReport:
    name: str
    k_quarter: int
    k_half: int
    tail_quarter: float
    tail_half: float

    @property
    def ratio(self) -> float:
        return self.tail_quarter / self.tail_half if self.tail_half > 0 else np.inf

    @property
    def passed(self) -> bool:
        # tails at round-off level carry no decay information
        return self.tail_half <= 0.5 * self.tail_quarter or self.tail_quarter < 1e-18


def tail_mass(seq: Sequence, k: int) -> float:
    """Sum of squares over |n| > k within the window."""
    return float(np.sum(seq.values[np.abs(seq.indices) > k] ** 2))


def star_decay_report(norming: NormingData, N: int | None = None) -> list[DecayReport]:
    """Tail sums of squared star constants beyond N/4 and N/2."""
    N = norming.N if N is None else N
    out = []
    for name in ("a_star", "b_star", "c_star", "d_star"):
        seq = norming[name]
        out.append(DecayReport(name, N // 4, N // 2, tail_mass(seq, N // 4), tail_mass(seq, N // 2)))
    return out
