"""Identity suites: each check compares two independently computed quantities.

A :class:`Check` records the largest deviation (identities) or the smallest
margin (inequalities) together with its tolerance.  Suites share a
:class:`Context` so that spectra of the same potential are computed once.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .evolve import monodromy
from .gradients import (canonical_block, eigenvalue_gradient, fd_eigenvalue, fd_monodromy,
                        fd_norming, monodromy_frechet, norming_gradient)
from .mappings import (SigmaSequence, asymptotic_residuals, estimates, four_spectra, gap_maps,
                       lamplighter_explicit, replace_map, shift_map, signature_distance, star_map,
                       uniqueness_signature)
from .norming import normalizing_constants, star_decay_report
from .potential import (Potential, TransformKind, apply_transform, distance, eo_projection,
                        membership_eo, random_trig_potential)
from .spectra import (BOUNDARY_KINDS, SpectralData, enclosure_violation,
                      interlacing_margin, sign_condition_values, spectral_data)

IDENTITY_TOL = 1e-7
CANONICAL_TOL = 2e-4
FD_RTOL = 1e-4
EDGE_GUARD = 2

SUITES = ("structure", "gauge", "shift", "extension", "isomorphism", "lamplighter",
          "estimates", "canonical", "asymptotics", "audit")

D, NE, T1, T2 = BOUNDARY_KINDS


@dataclass(frozen=True)
class Check:
    name: str
    anchor: str
    value: float
    tol: float
    inequality: bool = False

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.value):
            return False
        return self.value >= -self.tol if self.inequality else self.value < self.tol

    def line(self) -> str:
        label = "margin" if self.inequality else "max_dev"
        return f'{"PASS" if self.passed else "FAIL"} {self.name} {label}={self.value:.3e} anchor="{self.anchor}"'


@dataclass
class Context:
    """Potentials under test plus caches of derived potentials and data."""

    potentials: list
    N: int = 16
    _derived: dict = field(default_factory=dict)
    _norming: dict = field(default_factory=dict)
    seen: list = field(default_factory=list)

    def spectra(self, v: Potential, N: int, periodic: bool = True, kinds=BOUNDARY_KINDS) -> SpectralData:
        """Cached spectral data, remembered for the final window audit."""
        d = spectral_data(v, N, periodic=periodic, kinds=kinds)
        if not any(d is s for s in self.seen):
            self.seen.append(d)
        return d

    def transformed(self, i: int, *chain) -> Potential:
        key = (i, chain)
        if key not in self._derived:
            v = self.pot(i, *chain[:-1])
            self._derived[key] = apply_transform(v, chain[-1])
        return self._derived[key]

    def pot(self, i: int, *chain) -> Potential:
        return self.transformed(i, *chain) if chain else self.potentials[i]

    def data(self, i: int, *chain, periodic: bool = True, N: int | None = None) -> SpectralData:
        return self.spectra(self.pot(i, *chain), self.N if N is None else N, periodic=periodic)

    def norming(self, i: int, *chain):
        key = (i, chain)
        if key not in self._norming:
            self._norming[key] = normalizing_constants(self.data(i, *chain, periodic=False))
        return self._norming[key]

    @property
    def guard(self) -> int:
        return self.N - EDGE_GUARD


def random_context(seed: int, count: int = 5, N: int = 16, max_norm: float = 1.0) -> Context:
    rng = np.random.default_rng(seed)
    return Context([random_trig_potential(rng, degree=4, max_norm=max_norm) for _ in range(count)], N)


def _dev(a, b) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def _idx(ctx: Context, mixed: bool = False) -> np.ndarray:
    g = ctx.guard
    return np.arange(-g + 1 if mixed else -g, g + 1)


def _spectra_tuple(data: SpectralData, n, m):
    return data.mu.at(n), data.nu.at(n), data.tau.at(m), data.rho.at(m)


def _pick(window, m):
    """Values of an interleaved window at the indices m."""
    return window.values[np.searchsorted(window.indices, m)]


def _collect(checks: list, name: str, anchor: str, devs, tol=IDENTITY_TOL, inequality=False):
    devs = list(devs)
    value = min(devs) if inequality else max(devs)
    checks.append(Check(name, anchor, float(value), tol, inequality))


# -- suites -----------------------------------------------------------------------------

def suite_structure(ctx: Context) -> list[Check]:
    """Wronskian, entry bound, interlacing, enclosure, sign conditions, critical values."""
    out = []
    det, bound, inter, encl, signs, crit = [], [], [], [], [], []
    for i, v in enumerate(ctx.potentials):
        R = np.pi * (ctx.N + 1.25) + v.norm() + 1.0
        lam = np.linspace(-R, R, 1001)
        m = monodromy(v, lam)
        det.append(_dev(m.det(), 1.0))
        bound.append(math.exp(v.norm()) - float(np.max(np.abs(m.matrix()))))
        d = ctx.data(i)
        inter.append(interlacing_margin(d))
        encl.append(-enclosure_violation(d))
        signs.append(min(float(x.min()) for x in sign_condition_values(d).values()))
        crit.append(float(np.min((-1.0) ** d.periodic.critical.indices * d.periodic.delta_at_critical)) - 1.0)
    _collect(out, "wronskian", "unit determinant of the monodromy", det, 1e-10)
    _collect(out, "entry_bound", "entries bounded by exp(|v|)", bound, 0.0, True)
    _collect(out, "interlacing", "strict interlacing of the four spectra", inter, 0.0, True)
    _collect(out, "enclosure", "boundary eigenvalues inside periodic gaps", encl, 1e-9, True)
    _collect(out, "sign_conditions", "signs of complementary entries", signs, 0.0, True)
    _collect(out, "critical_values", "(-1)^n Delta >= 1 at critical points", crit, 1e-12, True)
    return out


_EIG_GAUGE = {  # (mu, nu, tau, rho) of the transformed potential in terms of v
    "F0": ("nu", "mu", "rho", "tau"),
    "F1": ("mu", "nu", "rho", "tau"),
    "F2": ("nu", "mu", "tau", "rho"),
}
_NORMING_GAUGE = {  # (r, s, t, u) of the transformed potential: (sign, name)
    "F0": ((1, "s"), (1, "r"), (1, "u"), (1, "t")),
    "F1": ((-1, "r"), (-1, "s"), (-1, "u"), (-1, "t")),
    "F2": ((-1, "s"), (-1, "r"), (-1, "t"), (-1, "u")),
}
_NORMALIZING_GAUGE = {  # (a, b, c, d) of the transformed potential: (name, norming subtracted twice)
    "F0": (("b", None), ("a", None), ("d", None), ("c", None)),
    "F1": (("a", "r"), ("b", "s"), ("d", "u"), ("c", "t")),
    "F2": (("b", "s"), ("a", "r"), ("c", "t"), ("d", "u")),
}


def suite_gauge(ctx: Context) -> list[Check]:
    out = []
    n, m = _idx(ctx), _idx(ctx, True)
    for t in ("F0", "F1", "F2"):
        eig, nrm, nz = [], [], []
        for i in range(len(ctx.potentials)):
            d0, d1 = ctx.data(i), ctx.data(i, t)
            base = dict(zip(("mu", "nu", "tau", "rho"), _spectra_tuple(d0, n, m)))
            got = _spectra_tuple(d1, n, m)
            eig.append(max(_dev(g, base[k]) for g, k in zip(got, _EIG_GAUGE[t])))
            z0, z1 = ctx.norming(i), ctx.norming(i, t)
            for (sgn, k), name in zip(_NORMING_GAUGE[t], "rstu"):
                idx = m if name in "tu" else n
                nrm.append(_dev(z1[name].at(idx), sgn * z0[k].at(idx)))
            for (k, sub), name in zip(_NORMALIZING_GAUGE[t], "abcd"):
                idx = m if name in "cd" else n
                ref = z0[k].at(idx) - (2 * z0[sub].at(idx) if sub else 0.0)
                nz.append(_dev(z1[name].at(idx), ref))
        _collect(out, f"gauge.eigenvalues/{t}", "reflection gauge of the four spectra", eig)
        _collect(out, f"gauge.norming/{t}", "reflection gauge of norming constants", nrm)
        _collect(out, f"gauge.normalizing/{t}", "reflection gauge of normalizing constants", nz)
    return out


def suite_shift(ctx: Context) -> list[Check]:
    """Rotation by exp(pi x J) shifts Dirichlet/Neumann data onto the mixed data."""
    out = []
    n = np.arange(-ctx.guard + 1, ctx.guard + 1)
    tau_mu, rho_nu, t_r, u_s, c_a, d_b, chain = [], [], [], [], [], [], []
    R = TransformKind.ROTATE
    for i in range(len(ctx.potentials)):
        d0, dr = ctx.data(i, periodic=False), ctx.data(i, R, periodic=False)
        z0, zr = ctx.norming(i), ctx.norming(i, R)
        Smu, Snu = shift_map(d0.mu), shift_map(d0.nu)
        tau_mu.append(_dev(dr.tau.at(n), Smu.at(n)))
        rho_nu.append(_dev(dr.rho.at(n), Snu.at(n)))
        t_r.append(_dev(zr["t"].at(n), z0["r"].at(n)))
        u_s.append(_dev(zr["u"].at(n), z0["s"].at(n)))
        c_a.append(_dev(zr["c"].at(n), z0["a"].at(n)))
        d_b.append(_dev(zr["d"].at(n), z0["b"].at(n)))
        # (S mu) x r = (tau x t) o Rot = ((S nu) x s) o F0 = (rho x u) o F0 o Rot
        df0, zf0 = ctx.data(i, "F0", periodic=False), ctx.norming(i, "F0")
        dfr, zfr = ctx.data(i, R, "F0", periodic=False), ctx.norming(i, R, "F0")
        ref = np.concatenate([Smu.at(n), z0["r"].at(n)])
        for other in (np.concatenate([dr.tau.at(n), zr["t"].at(n)]),
                      np.concatenate([shift_map(df0.nu).at(n), zf0["s"].at(n)]),
                      np.concatenate([dfr.rho.at(n), zfr["u"].at(n)])):
            chain.append(_dev(other, ref))
    _collect(out, "shift.tau_vs_mu", "rotation shifts Dirichlet onto mixed1", tau_mu)
    _collect(out, "shift.rho_vs_nu", "rotation shifts Neumann onto mixed2", rho_nu)
    _collect(out, "shift.t_vs_r", "rotation carries norming r onto t", t_r)
    _collect(out, "shift.u_vs_s", "rotation carries norming s onto u", u_s)
    _collect(out, "shift.c_vs_a", "rotation carries normalizing a onto c", c_a)
    _collect(out, "shift.d_vs_b", "rotation carries normalizing b onto d", d_b)
    _collect(out, "shift.spectral_products", "four equal eigenvalue-norming products", chain)

    # even-odd subspace: rotation lands in the odd-even subspace and the shifted spectra coincide
    eo_dev, member = [], []
    for v in ctx.potentials[:2]:
        e = eo_projection(v)
        re = apply_transform(e, R)
        member.append(0.0 if membership_eo(e) else 1.0)
        # odd-even potentials are the fixed points of F2
        member.append(distance(re, apply_transform(re, "F2")))
        de = ctx.spectra(e, ctx.N, periodic=False)
        dre = ctx.spectra(re, ctx.N, periodic=False)
        dfe = ctx.spectra(apply_transform(e, "F0"), ctx.N, periodic=False)
        dfre = ctx.spectra(apply_transform(re, "F0"), ctx.N, periodic=False)
        Smu = shift_map(de.mu).at(n)
        eo_dev.append(max(_dev(shift_map(dfe.nu).at(n), Smu), _dev(dre.tau.at(n), Smu),
                          _dev(dfre.rho.at(n), Smu)))
    _collect(out, "shift.eo_subspace_map", "rotation maps even-odd onto odd-even potentials", member, 1e-9)
    _collect(out, "shift.eo_spectra", "shifted spectra coincide on even-odd potentials", eo_dev)
    return out


def suite_extension(ctx: Context, count: int = 2) -> list[Check]:
    """Dirichlet, Neumann and periodic spectra of the even-odd extension to [0, 2]."""
    out = []
    n = np.arange(-ctx.guard + 1, ctx.guard + 1)
    mu_t, nu_t, gaps, star, norm2 = [], [], [], [], []
    for i in range(min(count, len(ctx.potentials))):
        v = ctx.potentials[i]
        d = ctx.data(i)
        ext = ctx.transformed(i, TransformKind.EXTEND_EO)
        norm2.append(abs(ext.norm_squared() - 2 * v.norm_squared()))
        de = ctx.spectra(ext, 2 * ctx.N, kinds=(D, NE))
        mu_t.append(max(_dev(de.mu.at(2 * n - 1), d.tau.at(n)), _dev(de.mu.at(2 * n), d.mu.at(n))))
        nu_t.append(max(_dev(de.nu.at(2 * n - 1), d.rho.at(n)), _dev(de.nu.at(2 * n), d.nu.at(n))))
        p = de.periodic
        odd = np.sort(np.stack([d.tau.at(n), d.rho.at(n)]), axis=0)
        even = np.sort(np.stack([d.mu.at(n), d.nu.at(n)]), axis=0)
        gaps.append(max(_dev(p.minus.at(2 * n - 1), odd[0]), _dev(p.plus.at(2 * n - 1), odd[1]),
                        _dev(p.minus.at(2 * n), even[0]), _dev(p.plus.at(2 * n), even[1])))
        m = np.arange(-2 * ctx.guard + 1, 2 * ctx.guard + 1)
        star.append(_dev(_pick(star_map(d.tau, d.mu), m), de.mu.at(m)))
    _collect(out, "extension.dirichlet", "Dirichlet spectrum of the extension interleaves tau, mu", mu_t)
    _collect(out, "extension.neumann", "Neumann spectrum of the extension interleaves rho, nu", nu_t)
    _collect(out, "extension.periodic_pairs", "4-periodic gap endpoints are the unordered pairs", gaps)
    _collect(out, "extension.star_map", "tau*mu equals the extension's Dirichlet spectrum", star)
    _collect(out, "extension.norm", "extension doubles the squared norm", norm2, 1e-12)
    return out


def suite_isomorphism(ctx: Context) -> list[Check]:
    """Two-spectra maps related through the gauges; replacing maps with full swaps."""
    out = []
    g = ctx.guard
    m = np.arange(-2 * g + 1, 2 * g + 1)
    dev_enm, dev_rep, dev_empty = [], [], []
    for i in range(len(ctx.potentials)):
        d = ctx.data(i, periodic=False)
        r = _pick(star_map(d.tau, d.mu), m)
        d0 = ctx.data(i, "F0", periodic=False)
        d1 = ctx.data(i, "F1", periodic=False)
        d2 = ctx.data(i, "F2", periodic=False)
        dev_enm.append(max(_dev(_pick(star_map(d0.rho, d0.nu), m), r),
                           _dev(_pick(star_map(d1.rho, d1.mu), m), r),
                           _dev(_pick(star_map(d2.tau, d2.nu), m), r)))
        everything = range(-ctx.N, ctx.N + 1)
        full, sigma = replace_map(d0, everything, everything)
        dev_rep.append(_dev(_pick(full, m), r) + (0.0 if sigma.pattern() == "minus" else 1.0))
        empty, _ = replace_map(d, [], [])
        dev_empty.append(_dev(_pick(empty, m), r))
    _collect(out, "isomorphism.two_spectra", "tau*mu = (rho*nu)F0 = (rho*mu)F1 = (tau*nu)F2", dev_enm)
    _collect(out, "isomorphism.replacing_full", "full replacement composed with F0 returns tau*mu", dev_rep)
    _collect(out, "isomorphism.replacing_empty", "empty replacement is tau*mu", dev_empty, 1e-15)
    return out


_PATTERN_T = {"minus": "F0", "alternating": "F1", "neg_alternating": "F2"}


def suite_lamplighter(ctx: Context) -> list[Check]:
    """Explicit sign flips of the 4-spectra sequence: norm, periodic spectrum, swap rules."""
    out = []
    N, g = ctx.N, ctx.guard
    n = np.arange(-g, g + 1)
    for pattern, t in _PATTERN_T.items():
        sigma = SigmaSequence.from_pattern(pattern, N)
        norm_dev, per_dev, swap_dev, flip_dev = [], [], [], []
        for i, v in enumerate(ctx.potentials):
            u = lamplighter_explicit(v, sigma)
            norm_dev.append(abs(u.norm() - v.norm()) + distance(u, ctx.pot(i, t)))
            d0, du = ctx.data(i), ctx.data(i, t)
            per_dev.append(max(_dev(du.periodic.minus.at(n), d0.periodic.minus.at(n)),
                               _dev(du.periodic.plus.at(n), d0.periodic.plus.at(n))))
            sw = []
            for j in n:
                if j > -g:
                    s_odd = sigma.at(2 * j - 1)
                    a, b = (d0.rho, d0.tau) if s_odd == -1 else (d0.tau, d0.rho)
                    sw += [abs(du.tau.at(j) - a.at(j)), abs(du.rho.at(j) - b.at(j))]
                s_even = sigma.at(2 * j)
                a, b = (d0.nu, d0.mu) if s_even == -1 else (d0.mu, d0.nu)
                sw += [abs(du.mu.at(j) - a.at(j)), abs(du.nu.at(j) - b.at(j))]
            swap_dev.append(max(sw))
            f0, fu = four_spectra(d0), four_spectra(du)
            mm = np.arange(-2 * g + 1, 2 * g + 1)
            flip_dev.append(_dev(fu.at(mm), sigma.at(mm) * f0.at(mm)))
        _collect(out, f"lamplighter.norm/{pattern}", "explicit lamplighter maps keep the norm", norm_dev, 1e-12)
        _collect(out, f"lamplighter.periodic/{pattern}", "periodic spectrum invariant", per_dev)
        _collect(out, f"lamplighter.swap_rules/{pattern}", "eigenvalue swaps follow the sign pattern", swap_dev)
        _collect(out, f"lamplighter.four_spectra/{pattern}", "4-spectra sequence multiplied by sigma", flip_dev)
    return out


def suite_estimates(ctx: Context, extra: int = 5, seed: int = 0) -> list[Check]:
    """Two-sided norm estimates, gap-map invariants and the uniqueness signature."""
    out = []
    pots = list(ctx.potentials)
    rng = np.random.default_rng(seed + 1000)
    pots += [random_trig_potential(rng, degree=4) for _ in range(extra)]
    pots += [Potential.constant(1.0, 0.0), Potential.constant(0.3, 0.4)]
    margins: dict[str, list] = {}
    inv: dict[str, list] = {}
    sigs = []
    for v in pots:
        d = ctx.spectra(v, ctx.N)
        z = normalizing_constants(d)
        for e in estimates(d, z, with_q2=True):
            margins.setdefault(e.name, []).append(e.margin)
        for k, val in gap_maps(d, z).invariant_deviations().items():
            inv.setdefault(k, []).append(val)
        if v.kind == "trig":
            sigs.append(uniqueness_signature(d))
    anchors = {"four_spectra_norm": "4-spectra norm estimate", "critical_gap_norm": "critical-value gap map estimate",
               "gap_norm": "gap map estimate", "gap_sobolev": "gap map Sobolev estimate"}
    for k, vals in margins.items():
        _collect(out, f"estimates.{k}", anchors[k], vals, 0.0, True)
    tol = {"psi_modulus": 1e-8, "gp_modulus": 1e-8, "h_cosh": 1e-8, "h_dominates": 1e-10,
           "gh_dominates": 1e-10}
    for k, vals in inv.items():
        _collect(out, f"gap_maps.{k}", "gap map invariants", vals, tol[k])
    dist = [signature_distance(a, b) for i, a in enumerate(sigs) for b in sigs[i + 1:]]
    _collect(out, "uniqueness.signatures_differ", "distinct potentials have distinct gap data",
             [x - 1e-6 for x in dist], 0.0, True)
    return out


def suite_canonical(ctx: Context, count: int = 2, block: int = 4, fd_dirs: int = 3,
                    seed: int = 0) -> list[Check]:
    """Symplectic relations between gradients and finite-difference checks of the gradients."""
    out = []
    rng = np.random.default_rng(seed + 2000)
    delta, zero, fd_eig, fd_nrm, fd_mono, transport = [], [], [], [], [], []
    for v in ctx.potentials[:count]:
        d = ctx.spectra(v, max(8, block + 4), periodic=False)
        for kind in BOUNDARY_KINDS:
            lo = -block + 1 if kind.is_mixed else -block
            b = canonical_block(d, kind, range(lo, block + 1))
            mats = b.matrices()
            delta.append(_dev(mats["norming_eig"], np.eye(len(b.indices))))
            zero.append(max(_dev(mats["eig_eig"], 0.0), _dev(mats["norming_norming"], 0.0)))
            for _ in range(fd_dirs):
                w = random_trig_potential(rng, degree=4, norm=1.0)
                j = int(rng.integers(lo, block + 1))
                ge, fe = eigenvalue_gradient(v, j, kind, d).pair(w), fd_eigenvalue(v, w, j, kind, data=d)
                gn, fn = norming_gradient(v, j, kind, d).pair(w), fd_norming(v, w, j, kind, data=d)
                fd_eig.append(abs(ge - fe) / max(abs(fe), 1e-3))
                fd_nrm.append(abs(gn - fn) / max(abs(fn), 1e-3))
        w = random_trig_potential(rng, degree=4, norm=1.0)
        lam = float(rng.uniform(-10, 10))
        fr, fd = monodromy_frechet(v, lam), fd_monodromy(v, w, lam)
        fd_mono.append(max(abs(fr[k].pair(w) - fd[k]) / max(abs(fd[k]), 1e-3) for k in fd))
        # d nu_n / dv at v equals minus d mu_n / dv evaluated at -v
        vm = apply_transform(v, "F0")
        dm = ctx.spectra(vm, d.N, periodic=False)
        for j in (-2, 1, 3):
            gnu = eigenvalue_gradient(v, j, NE, d)
            gmu = eigenvalue_gradient(vm, j, D, dm)
            transport.append(max(_dev(gnu.g1, -gmu.g1), _dev(gnu.g2, -gmu.g2)))
    _collect(out, "canonical.norming_eigenvalue", "norming and eigenvalue gradients are conjugate", delta,
             CANONICAL_TOL)
    _collect(out, "canonical.zero_relations", "eigenvalue and norming gradients commute", zero, CANONICAL_TOL)
    _collect(out, "gradients.eigenvalue_fd", "eigenvalue gradient vs central differences", fd_eig, FD_RTOL)
    _collect(out, "gradients.norming_fd", "norming gradient vs central differences", fd_nrm, FD_RTOL)
    _collect(out, "gradients.monodromy_fd", "monodromy derivative vs central differences", fd_mono, FD_RTOL)
    _collect(out, "gradients.gauge_transport", "Neumann gradient from Dirichlet gradient at -v", transport,
             1e-6)
    return out


def suite_asymptotics(ctx: Context, count: int = 2, N: int = 32) -> list[Check]:
    """Residual tails after removing the first-order Fourier term."""
    out = []
    ratios = {k: [] for k in BOUNDARY_KINDS}
    decay = []
    for v in ctx.potentials[:count]:
        d = ctx.spectra(v, N, periodic=False)
        z = normalizing_constants(d)
        for k in BOUNDARY_KINDS:
            ratios[k].append(0.5 - asymptotic_residuals(d, k, z).ratio)
        # relative margin of tail(N/2) <= tail(N/4) / 2; round-off tails count as decayed
        decay += [0.0 if r.tail_quarter < 1e-18 else (0.5 * r.tail_quarter - r.tail_half) / r.tail_quarter
                  for r in star_decay_report(z)]
    for k, vals in ratios.items():
        _collect(out, f"asymptotics.tail_ratio/{k.value}", "residual tails decay by half", vals, 0.0, True)
    _collect(out, "asymptotics.star_decay", "star constant tails decay by half", decay, 0.0, True)
    return out


def suite_audit(ctx: Context) -> list[Check]:
    """Interlacing, enclosure and sign conditions on every window the context has produced."""
    if not ctx.seen:
        for i in range(len(ctx.potentials)):
            ctx.data(i)
    inter, encl, signs, mono = [], [], [], []
    for d in ctx.seen:
        mono.append(min(float(np.min(np.diff(w.values))) for w in d.windows.values()))
        signs.append(min(float(x.min()) for x in sign_condition_values(d).values()))
        four = all(k in d.windows for k in BOUNDARY_KINDS)
        if four:
            inter.append(interlacing_margin(d))
        if d.periodic is not None:
            if four:
                encl.append(-enclosure_violation(d))
            else:
                p = d.periodic
                for w in d.windows.values():
                    n = w.indices[(w.indices >= p.minus.indices[0]) & (w.indices <= p.minus.indices[-1])]
                    s = w.at(n)
                    encl.append(float(min(np.min(s - p.minus.at(n)), np.min(p.plus.at(n) - s))))
    out = []
    _collect(out, "audit.monotone", "every window strictly increasing", mono, 0.0, True)
    _collect(out, "audit.interlacing", "interlacing on every window", inter or [0.0], 0.0, True)
    _collect(out, "audit.enclosure", "eigenvalues inside gaps on every window", encl or [0.0], 1e-9, True)
    _collect(out, "audit.sign_conditions", "sign conditions on every window", signs, 0.0, True)
    return out


_RUNNERS = {
    "structure": suite_structure, "gauge": suite_gauge, "shift": suite_shift,
    "extension": suite_extension, "isomorphism": suite_isomorphism,
    "lamplighter": suite_lamplighter, "estimates": suite_estimates,
    "canonical": suite_canonical, "asymptotics": suite_asymptotics, "audit": suite_audit,
}


def run_suite(name: str, ctx: Context) -> list[Check]:
    """Run one suite, or every suite for ``all``."""
    if name == "all":
        return [c for s in SUITES for c in _RUNNERS[s](ctx)]
    if name not in _RUNNERS:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)} or all")
    return _RUNNERS[name](ctx)


def report(checks: list[Check]) -> str:
    return "".join(c.line() + "\n" for c in checks)


__all__ = ["Check", "Context", "random_context", "run_suite", "report", "SUITES"]
