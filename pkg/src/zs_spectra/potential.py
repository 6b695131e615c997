"""Potentials v = (v1, v2) on [0, L] and the explicit transforms acting on them.

A :class:`Potential` is an immutable description of a real vector field.  Four
representations are supported (zero, constant, trigonometric polynomial,
sampled) plus a ``derived`` kind used for transforms without a closed form in
the source family (rotation, even-odd extension).  Every potential carries a
uniform grid of ``cells`` cells; grids are symmetric about the midpoint, so the
reflections ``x -> L - x`` map nodes onto nodes.
"""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import PotentialConfigError

J = np.array([[0.0, 1.0], [-1.0, 0.0]])
J1 = np.array([[1.0, 0.0], [0.0, -1.0]])
J2 = np.array([[0.0, 1.0], [1.0, 0.0]])

CELLS_PER_UNIT = 2048


class TransformKind(str, enum.Enum):
    F0 = "F0"
    F1 = "F1"
    F2 = "F2"
    R = "R"
    ROTATE = "Rotate"
    EXTEND_EO = "ExtendEO"


@dataclass(frozen=True, eq=False)
class Potential:
    """Real potential on [0, length].

    Use the classmethod constructors rather than the raw dataclass fields.
    ``coeffs`` holds trig coefficients as rows (c1, s1, c2, s2) indexed by the
    frequency k >= 0, i.e. v1 = sum_k c1[k] cos(2 pi k x) + s1[k] sin(2 pi k x).
    """

    kind: str
    length: int = 1
    cells: int = 0
    a: float = 0.0
    b: float = 0.0
    coeffs: np.ndarray | None = None
    nodes: np.ndarray | None = None
    values: np.ndarray | None = None
    func: Callable[[np.ndarray], np.ndarray] | None = field(default=None, repr=False)
    label: str = ""

    def __post_init__(self):
        if self.length not in (1, 2):
            raise ValueError(f"length must be 1 or 2, got {self.length}")
        if self.cells == 0:
            object.__setattr__(self, "cells", CELLS_PER_UNIT * self.length)
        if self.cells < 64 or self.cells % 2:
            raise ValueError("cells must be an even integer >= 64")

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, length: int = 1, cells: int = 0) -> Potential:
        return cls("zero", length, cells, label="zero")

    @classmethod
    def constant(cls, a: float, b: float, length: int = 1, cells: int = 0) -> Potential:
        a, b = float(a), float(b)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise ValueError("constant potential must be finite")
        return cls("constant", length, cells, a=a, b=b, label=f"constant({a:g},{b:g})")

    @classmethod
    def trig(cls, c1=(), s1=(), c2=(), s2=(), cells: int = 0, label: str = "") -> Potential:
        rows = [np.atleast_1d(np.asarray(r, dtype=float)) for r in (c1, s1, c2, s2)]
        size = max(1, max(r.size for r in rows))
        coeffs = np.zeros((4, size))
        for i, r in enumerate(rows):
            coeffs[i, : r.size] = r
        coeffs[1, 0] = coeffs[3, 0] = 0.0
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("trig coefficients must be finite")
        coeffs.setflags(write=False)
        return cls("trig", 1, cells, coeffs=coeffs, label=label or "trig")

    @classmethod
    def from_samples(cls, x, v1, v2, cells: int = 0, label: str = "samples") -> Potential:
        x = np.asarray(x, dtype=float)
        vals = np.vstack([np.asarray(v1, dtype=float), np.asarray(v2, dtype=float)])
        if x.ndim != 1 or vals.shape[1] != x.size or x.size < 2:
            raise ValueError("samples need matching 1-D x, v1, v2 arrays")
        if np.any(np.diff(x) <= 0):
            raise ValueError("sample abscissae must be strictly increasing")
        if not np.all(np.isfinite(vals)):
            raise ValueError("sample values must be finite")
        length = int(round(x[-1]))
        if abs(x[0]) > 1e-12 or abs(x[-1] - length) > 1e-12 or length not in (1, 2):
            raise ValueError("samples must span [0, 1] or [0, 2]")
        x.setflags(write=False)
        vals.setflags(write=False)
        return cls("samples", length, cells, nodes=x, values=vals, label=label)

    @classmethod
    def from_function(cls, func, length: int = 1, cells: int = 0, label: str = "derived") -> Potential:
        """Wrap ``func(x) -> array of shape (2, len(x))``."""
        return cls("derived", length, cells, func=func, label=label)

    # -- evaluation ---------------------------------------------------------
    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind == "zero":
            return np.zeros((2,) + x.shape)
        if self.kind == "constant":
            return np.stack([np.full(x.shape, self.a), np.full(x.shape, self.b)])
        if self.kind == "trig":
            k = np.arange(self.coeffs.shape[1])
            arg = 2.0 * np.pi * np.multiply.outer(x, k)
            c, s = np.cos(arg), np.sin(arg)
            c1, s1, c2, s2 = self.coeffs
            return np.stack([c @ c1 + s @ s1, c @ c2 + s @ s2])
        if self.kind == "samples":
            return np.stack([np.interp(x, self.nodes, self.values[0]),
                             np.interp(x, self.nodes, self.values[1])])
        return np.asarray(self.func(x), dtype=float)

    def derivative(self, x) -> np.ndarray:
        """x-derivative; available for the analytic families only."""
        x = np.asarray(x, dtype=float)
        if self.kind in ("zero", "constant"):
            return np.zeros((2,) + x.shape)
        if self.kind != "trig":
            raise NotImplementedError(f"no analytic derivative for kind {self.kind!r}")
        k = np.arange(self.coeffs.shape[1])
        w = 2.0 * np.pi * k
        arg = np.multiply.outer(x, w)
        c, s = np.cos(arg) * w, np.sin(arg) * w
        c1, s1, c2, s2 = self.coeffs
        return np.stack([c @ s1 - s @ c1, c @ s2 - s @ c2])

    @property
    def grid(self) -> np.ndarray:
        """Quadrature nodes k * L / cells, k = 0..cells."""
        return np.linspace(0.0, float(self.length), self.cells + 1)

    def norm_squared(self) -> float:
        x = self.grid
        v = self(x)
        return float(np.trapezoid(v[0] ** 2 + v[1] ** 2, x))

    def norm(self) -> float:
        return math.sqrt(self.norm_squared())

    def with_cells(self, cells: int) -> Potential:
        return Potential(self.kind, self.length, cells, self.a, self.b, self.coeffs,
                         self.nodes, self.values, self.func, self.label)

    def __repr__(self) -> str:
        return f"Potential({self.label}, L={self.length}, cells={self.cells})"


# -- transforms ---------------------------------------------------------------

def _negate(v: Potential) -> Potential:
    if v.kind == "zero":
        return v
    if v.kind == "constant":
        return Potential.constant(-v.a, -v.b, v.length, v.cells)
    if v.kind == "trig":
        return Potential.trig(*(-v.coeffs), cells=v.cells, label=f"-{v.label}")
    if v.kind == "samples":
        return Potential.from_samples(v.nodes, -v.values[0], -v.values[1], v.cells, f"-{v.label}")
    f = v.func
    return Potential.from_function(lambda x: -f(x), v.length, v.cells, f"-{v.label}")


def _reflect(v: Potential, sign2: float) -> Potential:
    """x -> (v1(L-x), sign2 * v2(L-x))."""
    L = v.length
    if v.kind == "zero":
        return v
    if v.kind == "constant":
        return Potential.constant(v.a, sign2 * v.b, L, v.cells)
    if v.kind == "trig":
        # cos(2 pi k (1-x)) = cos(2 pi k x), sin(2 pi k (1-x)) = -sin(2 pi k x)
        c1, s1, c2, s2 = v.coeffs
        return Potential.trig(c1, -s1, sign2 * c2, -sign2 * s2, cells=v.cells, label=f"R{v.label}")
    if v.kind == "samples":
        x = L - v.nodes[::-1]
        return Potential.from_samples(x, v.values[0, ::-1], sign2 * v.values[1, ::-1], v.cells,
                                      f"R{v.label}")
    f = v.func

    def g(x):
        y = f(L - np.asarray(x, dtype=float))
        return np.stack([y[0], sign2 * y[1]])

    return Potential.from_function(g, L, v.cells, f"R{v.label}")


def rotate(v: Potential, inverse: bool = False) -> Potential:
    """Pointwise rotation u(x) = exp(+-pi x J) v(x)."""
    if v.length != 1:
        raise ValueError("rotation is defined on [0, 1]")
    if v.kind == "zero":
        return v
    sgn = -1.0 if inverse else 1.0

    def g(x):
        x = np.asarray(x, dtype=float)
        p, q = v(x)
        c, s = np.cos(np.pi * x), sgn * np.sin(np.pi * x)
        return np.stack([p * c + q * s, -p * s + q * c])

    return Potential.from_function(g, 1, v.cells, f"{'Rot^-1' if inverse else 'Rot'}({v.label})")


def extend_even_odd(v: Potential) -> Potential:
    """Extension to [0, 2]: v on (0, 1), J1 v(2 - x) on (1, 2)."""
    if v.length != 1:
        raise ValueError("even-odd extension acts on [0, 1] potentials")

    def g(x):
        x = np.asarray(x, dtype=float)
        right = x > 1.0
        xr = np.where(right, 2.0 - x, x)
        p, q = v(xr)
        return np.stack([p, np.where(right, -q, q)])

    return Potential.from_function(g, 2, 2 * v.cells, f"E({v.label})")


def apply_transform(v: Potential, t: TransformKind | str) -> Potential:
    t = TransformKind(t)
    if v.length != 1:
        raise ValueError(f"transform {t.value} requires a potential on [0, 1]")
    if t is TransformKind.F0:
        return _negate(v)
    if t is TransformKind.F1:
        return _reflect(v, -1.0)
    if t is TransformKind.F2:
        return _negate(_reflect(v, -1.0))
    if t is TransformKind.R:
        return _reflect(v, 1.0)
    if t is TransformKind.ROTATE:
        return rotate(v)
    return extend_even_odd(v)


def fourier_pair(v: Potential, n: int) -> tuple[float, float]:
    """Components of int_0^1 exp(2 pi n x J) v(x) dx.

    Returns (v1_nc + v2_ns, -v1_ns + v2_nc), where _nc/_ns are the cosine and
    sine moments at frequency 2 pi n.  Trapezoid rule on the potential grid,
    which is exact for trig polynomials of degree below cells / 2.
    """
    if v.length != 1:
        raise ValueError("Fourier pairs are defined for potentials on [0, 1]")
    x = v.grid
    p, q = v(x)
    c, s = np.cos(2 * np.pi * n * x), np.sin(2 * np.pi * n * x)
    pc, ps = np.trapezoid(p * c, x), np.trapezoid(p * s, x)
    qc, qs = np.trapezoid(q * c, x), np.trapezoid(q * s, x)
    return float(pc + qs), float(-ps + qc)


def distance(v: Potential, w: Potential) -> float:
    """L2 distance evaluated on the grid of ``v``."""
    x = v.grid
    d = v(x) - w(x)
    return math.sqrt(float(np.trapezoid(d[0] ** 2 + d[1] ** 2, x)))


def perturb(v: Potential, w: Potential, eps: float) -> Potential:
    """v + eps w; stays a trig polynomial when both inputs are."""
    if v.length != w.length:
        raise ValueError("potentials live on different intervals")
    if v.kind in ("zero", "constant", "trig") and w.kind in ("zero", "constant", "trig") and v.length == 1:
        cv, cw = _as_coeffs(v), _as_coeffs(w)
        size = max(cv.shape[1], cw.shape[1])
        out = np.zeros((4, size))
        out[:, : cv.shape[1]] += cv
        out[:, : cw.shape[1]] += eps * cw
        return Potential.trig(*out, cells=v.cells, label=f"{v.label}+{eps:g}*{w.label}")
    return Potential.from_function(lambda x: v(x) + eps * w(x), v.length, v.cells,
                                   f"{v.label}+{eps:g}*{w.label}")


def _as_coeffs(v: Potential) -> np.ndarray:
    if v.kind == "trig":
        return np.asarray(v.coeffs)
    out = np.zeros((4, 1))
    if v.kind == "constant":
        out[0, 0], out[2, 0] = v.a, v.b
    return out


def membership_eo(v: Potential, tol: float = 1e-9) -> bool:
    """True iff v = J1 R v (v1 even and v2 odd about the midpoint)."""
    if v.length != 1:
        raise ValueError("membership test is defined on [0, 1]")
    return distance(v, apply_transform(v, TransformKind.F1)) <= tol


def eo_projection(v: Potential) -> Potential:
    """Average of v and J1 R v, which lies in the even-odd subspace."""
    if v.kind in ("zero",):
        return v
    if v.kind == "constant":
        return Potential.constant(v.a, 0.0, cells=v.cells)
    if v.kind == "trig":
        c1, _, _, s2 = v.coeffs
        return Potential.trig(c1, 0 * c1, 0 * c1, s2, cells=v.cells, label=f"eo({v.label})")
    w = apply_transform(v, TransformKind.F1)
    return Potential.from_function(lambda x: 0.5 * (v(x) + w(x)), 1, v.cells, f"eo({v.label})")


def random_trig_potential(rng: np.random.Generator, degree: int = 4, norm: float | None = None,
                          max_norm: float = 1.0, cells: int = 0) -> Potential:
    """Trig polynomial with uniform coefficients rescaled to a target L2 norm.

    When ``norm`` is None the target is drawn uniformly from [0.25, max_norm].
    """
    raw = rng.uniform(-1.0, 1.0, size=(4, degree + 1))
    raw[1, 0] = raw[3, 0] = 0.0
    target = rng.uniform(0.25, max_norm) if norm is None else norm
    # Parseval for the periodic trapezoid rule
    sq = raw[0, 0] ** 2 + raw[2, 0] ** 2 + 0.5 * np.sum(raw[:, 1:] ** 2)
    coeffs = raw * (target / math.sqrt(sq))
    return Potential.trig(*coeffs, cells=cells, label=f"trig(deg={degree},|v|={target:.3f})")


# -- configuration files ------------------------------------------------------

def _parse_float(value: str, lineno: int, key: str) -> float:
    try:
        out = float(value)
    except ValueError:
        raise PotentialConfigError(f"line {lineno}: {key}={value!r} is not a number") from None
    if not math.isfinite(out):
        raise PotentialConfigError(f"line {lineno}: {key} must be finite")
    return out


def parse_potential_config(lines: Sequence[str], base_dir: Path | None = None,
                           cells: int = 0) -> Potential:
    """Build a potential from ``key=value`` lines (see README for the keys)."""
    entries: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise PotentialConfigError(f"line {lineno}: expected key=value, got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in entries:
            raise PotentialConfigError(f"line {lineno}: duplicate key {key!r}")
        entries[key] = (value, lineno)

    kind, kline = entries.pop("kind", ("", 0))
    if kind not in ("zero", "constant", "trig", "samples"):
        raise PotentialConfigError(f"line {kline}: kind must be zero|constant|trig|samples, got {kind!r}")
    length = 1
    if "L" in entries:
        value, lineno = entries.pop("L")
        if value not in ("1", "2"):
            raise PotentialConfigError(f"line {lineno}: L must be 1 or 2")
        length = int(value)
    if "M" in entries:
        value, lineno = entries.pop("M")
        if not value.isdigit() or int(value) < 64:
            raise PotentialConfigError(f"line {lineno}: M must be an integer >= 64")
        cells = int(value) * length

    if kind == "zero":
        pot = Potential.zero(length, cells)
    elif kind == "constant":
        a = _parse_float(*entries.pop("a", ("0", kline)), "a")
        b = _parse_float(*entries.pop("b", ("0", kline)), "b")
        pot = Potential.constant(a, b, length, cells)
    elif kind == "trig":
        if length != 1:
            raise PotentialConfigError(f"line {kline}: trig potentials live on L=1")
        coef: dict[tuple[int, int], float] = {}
        for key in list(entries):
            value, lineno = entries[key]
            prefix, _, k = key.partition("_")
            if prefix in ("c1", "s1", "c2", "s2") and k.isdigit():
                row = ("c1", "s1", "c2", "s2").index(prefix)
                coef[(row, int(k))] = _parse_float(value, lineno, key)
                del entries[key]
        size = 1 + max((k for _, k in coef), default=0)
        rows = np.zeros((4, size))
        for (row, k), val in coef.items():
            rows[row, k] = val
        pot = Potential.trig(*rows, cells=cells)
    else:
        if "file" not in entries:
            raise PotentialConfigError(f"line {kline}: samples potential needs file=path.csv")
        value, lineno = entries.pop("file")
        path = Path(value)
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        pot = load_samples_csv(path, cells=cells)
    if entries:
        key, (_, lineno) = next(iter(entries.items()))
        raise PotentialConfigError(f"line {lineno}: unknown key {key!r} for kind={kind}")
    return pot


def load_samples_csv(path: Path, cells: int = 0) -> Potential:
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise PotentialConfigError(f"cannot read samples file {path}: {exc}") from None
    if not rows or [c.strip() for c in rows[0]] != ["x", "v1", "v2"]:
        raise PotentialConfigError(f"{path}: line 1: header must be x,v1,v2")
    data = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 3:
            raise PotentialConfigError(f"{path}: line {lineno}: expected 3 columns")
        data.append([_parse_float(c, lineno, name) for c, name in zip(row, ("x", "v1", "v2"))])
    arr = np.array(data)
    try:
        return Potential.from_samples(arr[:, 0], arr[:, 1], arr[:, 2], cells=cells, label=path.name)
    except (ValueError, IndexError) as exc:
        raise PotentialConfigError(f"{path}: {exc}") from None


def load_potential(path: str | Path, cells: int = 0) -> Potential:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise PotentialConfigError(f"cannot read {path}: {exc}") from None
    return parse_potential_config(text.splitlines(), path.parent, cells)


def potential_from_tokens(tokens: Sequence[str], cells: int = 0) -> Potential:
    """CLI form: a config file path, or a builtin kind followed by key=value pairs."""
    if not tokens:
        raise PotentialConfigError("empty potential specification")
    head = tokens[0]
    if head in ("zero", "constant", "trig", "samples"):
        return parse_potential_config([f"kind={head}", *tokens[1:]], Path.cwd(), cells)
    if len(tokens) > 1:
        raise PotentialConfigError("a potential file takes no extra arguments")
    return load_potential(head, cells)
