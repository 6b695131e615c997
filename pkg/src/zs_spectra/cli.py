"""Command-line front end.

Exit codes: 0 on success, 1 when a verification check fails, 2 when the
computation or the input is invalid.  Output goes to stdout unless ``--out``
names a directory, in which case one file per artifact is written there.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import sys
from pathlib import Path

import numpy as np

from .errors import SpectralError
from .evolve import monodromy
from .mappings import estimates, four_spectra, gap_maps
from .norming import normalizing_constants
from .potential import Potential, TransformKind, apply_transform, potential_from_tokens
from .spectra import BOUNDARY_KINDS, SpectrumKind, spectral_data, windows_to_csv
from .verify import IDENTITY_TOL, SUITES, Context, random_context, report, run_suite

COMMANDS = ("spectrum", "monodromy", "transform", "norming", "maps", "gradcheck", "verify")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _r(x) -> str:
    return repr(float(x))


def samples_csv(v: Potential) -> str:
    """Node samples in the x,v1,v2 format accepted by ``file=`` and ``samples`` configs."""
    x = v.grid
    p, q = v(x)
    return _csv(["x", "v1", "v2"], ((_r(a), _r(b), _r(c)) for a, b, c in zip(x, p, q)))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="zs-spectra", description="Spectral data of Zakharov-Shabat operators.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, potential_required=True):
        p.add_argument("--potential", nargs="+", required=potential_required, metavar="TOKEN",
                       help="config file, or zero | constant a=.. b=.. | trig c1_1=.. ...")
        p.add_argument("--N", type=int, default=16, help="window half-width (default 16)")
        p.add_argument("--M", type=int, help="grid cells per unit length (default 2048 or the config's M)")
        p.add_argument("--out", type=Path, help="output directory (default: stdout)")

    p = sub.add_parser("spectrum", help="eigenvalue windows as CSV")
    common(p)
    p.add_argument("--kind", default="all", choices=["all", *(k.value for k in SpectrumKind)])

    p = sub.add_parser("monodromy", help="monodromy entries at given lambda values")
    common(p)
    p.add_argument("--lam", type=float, nargs="+", required=True)
    p.add_argument("--deriv", action="store_true", help="include lambda-derivatives")

    p = sub.add_parser("transform", help="sample a transformed potential")
    common(p)
    p.add_argument("--transform", required=True, choices=[t.value for t in TransformKind])

    p = sub.add_parser("norming", help="norming, normalizing and star constants")
    common(p)

    p = sub.add_parser("maps", help="4-spectra, gap maps and norm estimates")
    common(p)

    for name, text in (("gradcheck", "gradient and canonical-relation checks"),
                       ("verify", "identity suites")):
        p = sub.add_parser(name, help=text)
        common(p, potential_required=False)
        p.add_argument("--seed", type=int, default=0, help="seed for random test potentials")
        p.add_argument("--count", type=int, default=5, help="number of random potentials")
        p.add_argument("--tol", type=float, help=f"identity tolerance (default {IDENTITY_TOL:g})")
        if name == "verify":
            p.add_argument("--suite", default="all", choices=["all", *SUITES])
    return ap


def _emit(out: Path | None, artifacts: dict, stdout) -> None:
    if out is None:
        for i, text in enumerate(artifacts.values()):
            if i:
                stdout.write("\n")
            stdout.write(text)
        return
    out.mkdir(parents=True, exist_ok=True)
    for name, text in artifacts.items():
        (out / name).write_text(text)


def _spectrum(args, v) -> dict:
    kind = args.kind
    periodic = kind == "all" or SpectrumKind(kind) not in BOUNDARY_KINDS
    data = spectral_data(v, args.N, periodic=periodic)
    if kind == "all":
        kinds = list(SpectrumKind)
    else:
        kinds = [SpectrumKind(kind)]
    return {"spectrum.csv": windows_to_csv(data[k] for k in kinds)}


def _monodromy(args, v) -> dict:
    m = monodromy(v, np.asarray(args.lam), want_deriv=args.deriv)
    names = ["theta1", "phi1", "theta2", "phi2"]
    header = ["lambda", *names, "delta", "det"]
    cols = [np.atleast_1d(m.lam), *(np.atleast_1d(getattr(m, k)) for k in names),
            np.atleast_1d(m.delta), np.atleast_1d(m.det())]
    if args.deriv:
        header += ["d" + k for k in names]
        cols += [np.atleast_1d(getattr(m, "d" + k)) for k in names]
    return {"monodromy.csv": _csv(header, ([_r(c[i]) for c in cols] for i in range(cols[0].size)))}


def _maps(args, v) -> dict:
    data = spectral_data(v, args.N)
    z = normalizing_constants(data)
    f = four_spectra(data)
    g = gap_maps(data, z)
    gap_rows = ([int(n), *(_r(a[i]) for a in (g.psi_c, g.psi_s, g.gp_c, g.gp_s, g.h_c, g.h_s, g.gh_c, g.gh_s))]
                for i, n in enumerate(g.indices))
    est = estimates(data, z, with_q2=v.kind in ("zero", "constant", "trig"))
    return {
        "four_spectra.csv": _csv(["m", "f"], ((int(m), _r(x)) for m, x in zip(f.indices, f.values))),
        "gap_maps.csv": _csv(["n", "psi_c", "psi_s", "gp_c", "gp_s", "h_c", "h_s", "gh_c", "gh_s"], gap_rows),
        "estimates.csv": _csv(["name", "lower", "middle", "upper", "margin"],
                              ((e.name, _r(e.lower), _r(e.middle), _r(e.upper), _r(e.margin)) for e in est)),
    }


def _potential(args) -> Potential:
    v = potential_from_tokens(args.potential)
    return v if args.M is None else v.with_cells(args.M * v.length)


def _checks(args, suites) -> tuple[dict, bool]:
    if args.potential:
        ctx = Context([_potential(args)], args.N)
    else:
        ctx = random_context(args.seed, args.count, args.N)
        if args.M is not None:
            ctx = Context([p.with_cells(args.M) for p in ctx.potentials], args.N)
    checks = [c for s in suites for c in run_suite(s, ctx)]
    if args.tol is not None:
        checks = [dataclasses.replace(c, tol=args.tol) if c.tol == IDENTITY_TOL else c for c in checks]
    return {"report.txt": report(checks)}, all(c.passed for c in checks)


def run(args, stdout=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    if args.N < 1:
        raise ValueError("--N must be at least 1")
    if args.M is not None and args.M < 64:
        raise ValueError("--M must be at least 64")
    ok = True
    if args.command in ("gradcheck", "verify"):
        suites = ["canonical"] if args.command == "gradcheck" else [args.suite]
        artifacts, ok = _checks(args, suites)
    else:
        v = _potential(args)
        if args.command == "spectrum":
            artifacts = _spectrum(args, v)
        elif args.command == "monodromy":
            artifacts = _monodromy(args, v)
        elif args.command == "transform":
            artifacts = {"potential.csv": samples_csv(apply_transform(v, args.transform))}
        elif args.command == "norming":
            artifacts = {"norming.csv": normalizing_constants(spectral_data(v, args.N, periodic=False)).to_csv()}
        else:
            artifacts = _maps(args, v)
    _emit(args.out, artifacts, stdout)
    return 0 if ok else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except (SpectralError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
