"""Gradients of eigenvalues, norming constants and monodromy entries with respect to v.

A gradient is a pair of functions (g1, g2) on the grid such that the
directional derivative along w is int (g1 w1 + g2 w2) dx.  For an
eigenfunction f with eigenvalue s, the Hellmann-Feynman formula gives

    ds/dv = ((f, f)_1, (f, f)_2) / |f|^2,   (a, b)_j = (J_j a, b),

and the monodromy derivative at fixed lambda is

    d y(1) / d v_j(x) = y(1) J [[(th, th)_j, (th, ph)_j], [(ph, th)_j, (ph, ph)_j]](x),

with th, ph the two columns of y(x, lambda).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .errors import GridMismatch
from .evolve import monodromy, trajectories
from .potential import Potential, perturb
from .spectra import COMPLEMENT, ENTRY, SpectralData, SpectrumKind, refine_root, spectral_data

# eigenfunction column of y(x, lambda) per kind (0 = theta, 1 = phi)
_COLUMN = {SpectrumKind.DIRICHLET: 1, SpectrumKind.NEUMANN: 0,
           SpectrumKind.MIXED1: 1, SpectrumKind.MIXED2: 0}

NORMING_OF = {SpectrumKind.DIRICHLET: "r", SpectrumKind.NEUMANN: "s",
              SpectrumKind.MIXED1: "t", SpectrumKind.MIXED2: "u"}

_ENTRY_POS = {"theta1": (0, 0), "phi1": (0, 1), "theta2": (1, 0), "phi2": (1, 1)}


@dataclass(frozen=True)
class GradientField:
    x: np.ndarray
    g1: np.ndarray
    g2: np.ndarray

    def _check(self, other: GradientField):
        if self.x.shape != other.x.shape or not np.array_equal(self.x, other.x):
            raise GridMismatch("gradient fields sampled on different grids")

    def pair(self, w: Potential) -> float:
        """Directional derivative along w."""
        w1, w2 = w(self.x)
        return float(simpson(self.g1 * w1 + self.g2 * w2, x=self.x))

    def __add__(self, other: GradientField) -> GradientField:
        self._check(other)
        return GradientField(self.x, self.g1 + other.g1, self.g2 + other.g2)

    def scale(self, c: float) -> GradientField:
        return GradientField(self.x, c * self.g1, c * self.g2)


def symplectic_form(f: GradientField, g: GradientField) -> float:
    """f ^ g = int (f1 g2 - f2 g1) dx."""
    f._check(g)
    return float(simpson(f.g1 * g.g2 - f.g2 * g.g1, x=f.x))


def _forms(a: np.ndarray, b: np.ndarray):
    """((a, b)_1, (a, b)_2) along the last axis."""
    return a[..., 0] * b[..., 0] - a[..., 1] * b[..., 1], a[..., 1] * b[..., 0] + a[..., 0] * b[..., 1]


def _eigen_gradients(v: Potential, lams: np.ndarray, column: int) -> list[GradientField]:
    x = v.grid
    y = trajectories(v, lams)[..., column]  # (n, nodes, 2)
    norm = simpson(np.sum(y * y, axis=-1), x=x, axis=1)
    g1, g2 = _forms(y, y)
    return [GradientField(x, g1[i] / norm[i], g2[i] / norm[i]) for i in range(lams.size)]


def _frechet_many(v: Potential, lams: np.ndarray) -> list[dict]:
    x = v.grid
    Y = trajectories(v, lams)
    out = []
    for k in range(lams.size):
        th, ph = Y[k, :, :, 0], Y[k, :, :, 1]
        G = np.empty((2, x.size, 2, 2))
        for j, (tt, tp, pp) in enumerate(zip(_forms(th, th), _forms(th, ph), _forms(ph, ph))):
            G[j, :, 0, 0], G[j, :, 0, 1], G[j, :, 1, 0], G[j, :, 1, 1] = tt, tp, tp, pp
        # J G = [[G10, G11], [-G00, -G01]], then left-multiply by y(1)
        JG = np.stack([np.stack([G[..., 1, 0], G[..., 1, 1]], -1),
                       np.stack([-G[..., 0, 0], -G[..., 0, 1]], -1)], -2)
        K = np.einsum("ab,jxbc->jxac", Y[k, -1], JG)
        out.append({name: GradientField(x, K[0, :, i, c], K[1, :, i, c])
                    for name, (i, c) in _ENTRY_POS.items()})
    return out


def monodromy_frechet(v: Potential, lam: float) -> dict:
    """Kernels of d theta1, d phi1, d theta2, d phi2 (entries of y(1, lambda)) with respect to v."""
    return _frechet_many(v, np.array([float(lam)]))[0]


def _data(v: Potential, n: int, data: SpectralData | None) -> SpectralData:
    if data is not None:
        return data
    return spectral_data(v, max(4, abs(int(n)) + 2), periodic=False)


def eigenvalue_gradient(v: Potential, n: int, kind=SpectrumKind.DIRICHLET,
                        data: SpectralData | None = None) -> GradientField:
    kind = SpectrumKind(kind)
    data = _data(v, n, data)
    s = np.array([data.windows[kind].at(n)])
    return _eigen_gradients(v, s, _COLUMN[kind])[0]


def _norming_from(eig: GradientField, frechet: dict, m, kind) -> GradientField:
    comp = COMPLEMENT[kind]
    val = getattr(m, comp)
    dval = getattr(m, "d" + comp)
    return (eig.scale(dval) + frechet[comp]).scale(-1.0 / val)


def norming_gradient(v: Potential, n: int, kind=SpectrumKind.DIRICHLET,
                     data: SpectralData | None = None) -> GradientField:
    """Gradient of the norming constant -log|c(1, s_n)|, c the complementary entry.

    Differentiating through the eigenvalue gives -(c_dot ds/dv + dc/dv) / c.
    """
    kind = SpectrumKind(kind)
    data = _data(v, n, data)
    s = float(data.windows[kind].at(n))
    eig = _eigen_gradients(v, np.array([s]), _COLUMN[kind])[0]
    return _norming_from(eig, monodromy_frechet(v, s), monodromy(v, s, want_deriv=True), kind)


@dataclass(frozen=True)
class CanonicalBlock:
    """Eigenvalue and norming gradients for one kind on the indices ``n``."""

    kind: SpectrumKind
    indices: np.ndarray
    eig: list
    norming: list

    def matrices(self) -> dict:
        """Symplectic pairings: norming^eig, eig^eig, norming^norming."""
        k = len(self.indices)
        out = {"norming_eig": np.empty((k, k)), "eig_eig": np.empty((k, k)),
               "norming_norming": np.empty((k, k))}
        for i in range(k):
            for j in range(k):
                out["norming_eig"][i, j] = symplectic_form(self.norming[i], self.eig[j])
                out["eig_eig"][i, j] = symplectic_form(self.eig[i], self.eig[j])
                out["norming_norming"][i, j] = symplectic_form(self.norming[i], self.norming[j])
        return out


def canonical_block(data: SpectralData, kind, indices) -> CanonicalBlock:
    kind = SpectrumKind(kind)
    v = data.potential
    idx = np.asarray(list(indices))
    s = data.windows[kind].at(idx)
    eig = _eigen_gradients(v, s, _COLUMN[kind])
    fre = _frechet_many(v, s)
    m = monodromy(v, s, want_deriv=True)
    norm = []
    for i in range(idx.size):
        mi = type(m)(*(None if f is None else f[i] for f in (m.lam, m.theta1, m.phi1, m.theta2, m.phi2,
                                                              m.dtheta1, m.dphi1, m.dtheta2, m.dphi2)))
        norm.append(_norming_from(eig[i], fre[i], mi, kind))
    return CanonicalBlock(kind, idx, eig, norm)


# -- finite-difference oracles ---------------------------------------------------

def fd_eigenvalue(v: Potential, w: Potential, n: int, kind, eps: float = 1e-4,
                  data: SpectralData | None = None) -> float:
    """Central difference of s_n along w."""
    kind = SpectrumKind(kind)
    s0 = float(_data(v, n, data).windows[kind].at(n))
    plus = refine_root(perturb(v, w, eps), kind, s0)
    minus = refine_root(perturb(v, w, -eps), kind, s0)
    return (plus - minus) / (2 * eps)


def fd_norming(v: Potential, w: Potential, n: int, kind, eps: float = 1e-4,
               data: SpectralData | None = None) -> float:
    """Central difference of the norming constant along w."""
    kind = SpectrumKind(kind)
    s0 = float(_data(v, n, data).windows[kind].at(n))
    vals = []
    for e in (eps, -eps):
        u = perturb(v, w, e)
        s = refine_root(u, kind, s0)
        vals.append(-np.log(abs(getattr(monodromy(u, s), COMPLEMENT[kind]))))
    return (vals[0] - vals[1]) / (2 * eps)


def fd_monodromy(v: Potential, w: Potential, lam: float, eps: float = 1e-4) -> dict:
    up = monodromy(perturb(v, w, eps), lam)
    dn = monodromy(perturb(v, w, -eps), lam)
    return {name: (getattr(up, name) - getattr(dn, name)) / (2 * eps) for name in _ENTRY_POS}


__all__ = ["GradientField", "symplectic_form", "eigenvalue_gradient", "norming_gradient",
           "monodromy_frechet", "canonical_block", "CanonicalBlock", "fd_eigenvalue",
           "fd_norming", "fd_monodromy", "NORMING_OF", "ENTRY"]
