"""Floating-point jets, curvature densities and quadrature.

Jets are evaluated on whole grids at once: every entry of a
:class:`NumericJet` is a numpy array over the sample points.  Only even
parameters are supported.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
import sympy as sp

from .graded import DT, G, T, X, GradedPoly
from .jets import Signature, multi_indices
from .variational import Lagrangian, euler


class SingularityError(ArithmeticError):
    """Degenerate metric or tangent frame."""


class JetError(KeyError):
    pass


@dataclass(frozen=True)
class Tolerances:
    det_eps: float = 1e-12
    gauss_bonnet_rel: float = 1e-3
    gauss_map_rel: float = 1e-3
    grassmann_abs: float = 1e-9
    reparam_abs: float = 1e-8
    transport_abs: float = 1e-10
    brioschi_abs: float = 1e-8
    variation_abs: float = 1e-6
    sphere_delta: float = 1e-3
    resolution: int = 400

    @classmethod
    def from_dict(cls, d: dict) -> "Tolerances":
        known = {f for f in cls.__dataclass_fields__}
        bad = set(d) - known
        if bad:
            raise ValueError(f"unknown tolerance keys: {sorted(bad)}")
        return cls(**d)


DEFAULT_TOLERANCES = Tolerances()


# --------------------------------------------------------------------------
# jets

@dataclass
class NumericJet:
    """Values of x^a_sigma (and optionally t^i) at one or many points.

    ``data`` maps (a, sigma) with canonical sigma to floats or arrays of a
    common shape.  Fiber indices run 1..m.
    """

    r: int
    m: int
    order: int
    data: dict
    t: Optional[dict] = None

    def __post_init__(self):
        for k, v in self.data.items():
            if not np.all(np.isfinite(v)):
                raise ValueError(f"non-finite jet entry at {k}")

    def get(self, a: int, sigma=()) -> np.ndarray:
        key = (a, tuple(sorted(sigma)))
        try:
            return self.data[key]
        except KeyError:
            raise JetError(f"jet has no entry for x^{a}_{key[1]}") from None

    def vec(self, sigma=()) -> np.ndarray:
        """Stack x^1_sigma..x^m_sigma along a new leading axis."""
        return np.stack([np.asarray(self.get(a, sigma), dtype=float) for a in range(1, self.m + 1)])

    @classmethod
    def from_vectors(cls, vectors: dict, order: Optional[int] = None) -> "NumericJet":
        """Build from {sigma: array of shape (m, ...)}."""
        sig0 = next(iter(vectors.values()))
        m = len(sig0)
        r = max((max(s) for s in vectors if s), default=0)
        order = order if order is not None else max(len(s) for s in vectors)
        data = {}
        for sigma, v in vectors.items():
            for a in range(m):
                data[(a + 1, tuple(sorted(sigma)))] = np.asarray(v[a], dtype=float)
        return cls(r, m, order, data)


def eval_poly(L, jet: NumericJet) -> np.ndarray:
    """Evaluate a purely even polynomial Lagrangian on a numeric jet."""
    body = L.body if isinstance(L, Lagrangian) else L
    total = 0.0
    for mono, c in body.items():
        term = float(c)
        for g, e in mono:
            if g.parity:
                raise ValueError(f"cannot evaluate odd generator {g} numerically")
            if g.kind == X:
                v = jet.get(g.index, g.sigma)
            elif g.kind == T:
                if jet.t is None or g.index not in jet.t:
                    raise JetError(f"jet has no value for t^{g.index}")
                v = jet.t[g.index]
            else:
                raise ValueError(f"cannot evaluate form generator {g}")
            term = term * np.asarray(v, dtype=float) ** e
        total = total + term
    return total


# --------------------------------------------------------------------------
# closed-form charts

class Chart:
    """A map R^r -> R^m given by sympy expressions, with all partial
    derivatives to a fixed order compiled to numpy."""

    def __init__(self, exprs: Sequence, symbols: Sequence, order: int = 2):
        self.exprs = [sp.sympify(e) for e in exprs]
        self.symbols = list(symbols)
        self.r = len(self.symbols)
        self.m = len(self.exprs)
        self.order = order
        self._funcs = {}
        for k in range(order + 1):
            for sigma in itertools.combinations_with_replacement(range(1, self.r + 1), k):
                for a, e in enumerate(self.exprs, start=1):
                    d = e
                    for i in sigma:
                        d = sp.diff(d, self.symbols[i - 1])
                    self._funcs[(a, sigma)] = sp.lambdify(self.symbols, d, "numpy")

    def jet(self, *points) -> NumericJet:
        pts = [np.asarray(p, dtype=float) for p in points]
        shape = np.broadcast(*pts).shape if pts else ()
        data = {k: np.broadcast_to(np.asarray(f(*pts), dtype=float), shape).copy()
                for k, f in self._funcs.items()}
        return NumericJet(self.r, self.m, self.order, data,
                          t={i + 1: pts[i] for i in range(self.r)})

    def values(self, *points) -> np.ndarray:
        return self.jet(*points).vec(())


@dataclass
class SurfacePatch:
    """A chart together with a parameter rectangle."""

    chart: Chart
    bounds: tuple  # ((lo, hi), ...) per parameter
    resolution: int = 400

    @property
    def r(self) -> int:
        return self.chart.r


def sphere_patch(radius: float = 1.0, delta: float = DEFAULT_TOLERANCES.sphere_delta,
                 resolution: int = DEFAULT_TOLERANCES.resolution) -> SurfacePatch:
    """Unit-sphere chart (theta, phi) over [delta, pi - delta] x [0, 2 pi]."""
    th, ph = sp.symbols("theta phi")
    R = sp.nsimplify(radius)
    exprs = [R * sp.sin(th) * sp.cos(ph), R * sp.sin(th) * sp.sin(ph), R * sp.cos(th)]
    return SurfacePatch(Chart(exprs, (th, ph)), ((delta, np.pi - delta), (0.0, 2 * np.pi)), resolution)


# --------------------------------------------------------------------------
# densities

def _metric(X: np.ndarray) -> np.ndarray:
    """X has shape (r, m, ...); returns g of shape (..., r, r)."""
    return np.einsum("iA...,jA...->...ij", X, X)


def _tangents(jet: NumericJet, r: int) -> np.ndarray:
    return np.stack([jet.vec((i,)) for i in range(1, r + 1)])


def gauss_bonnet_density(jet: NumericJet, eps: float = DEFAULT_TOLERANCES.det_eps) -> np.ndarray:
    """sum_ab (x11^a x22^b - x12^a x12^b) P^ab / sqrt(det g) for a surface in R^m.

    P = 1 - x_i g^{ij} x_j is the normal projector.  For a surface this equals
    K sqrt(det g) with K the Gauss curvature.
    """
    if jet.r != 2 or jet.order < 2:
        raise ValueError("needs a 2-parameter jet of order >= 2")
    Xt = _tangents(jet, 2)                      # (2, m, ...)
    g = _metric(Xt)
    det = np.linalg.det(g)
    if np.any(det <= eps):
        raise SingularityError("degenerate metric: det g <= eps")
    ginv = np.linalg.inv(g)
    x11, x12, x22 = jet.vec((1, 1)), jet.vec((1, 2)), jet.vec((2, 2))

    def P(u, v):
        return np.einsum("A...,A...->...", u, v) - _proj_tangent(Xt, ginv, u, v)

    val = P(x11, x22) - P(x12, x12)
    return val / np.sqrt(det)


def _proj_tangent(Xt, ginv, u, v):
    """sum u^a x^a_i g^{ij} x^b_j v^b."""
    ui = np.einsum("iA...,A...->...i", Xt, u)
    vj = np.einsum("jA...,A...->...j", Xt, v)
    return np.einsum("...i,...ij,...j->...", ui, ginv, vj)


def normal_vector(cols: Sequence[np.ndarray]) -> np.ndarray:
    """N^a = det[e_a, c_1, ..., c_{m-1}] for column vectors of shape (m, ...)."""
    m = cols[0].shape[0]
    shape = cols[0].shape[1:]
    M = np.zeros(shape + (m, m))
    for k, c in enumerate(cols, start=1):
        M[..., :, k] = np.moveaxis(c, 0, -1)
    out = np.empty((m,) + shape)
    for a in range(m):
        Ma = M.copy()
        Ma[..., :, 0] = 0.0
        Ma[..., a, 0] = 1.0
        out[a] = np.linalg.det(Ma)
    return out


def gauss_map_density(jet: NumericJet, eps: float = DEFAULT_TOLERANCES.det_eps) -> np.ndarray:
    """Pullback of the unit-sphere volume under the Gauss map of a hypersurface.

    With N = det[e_a, x_1, ..., x_{m-1}] this is det[N, d_1 N, ..., d_{m-1} N] / |N|^m,
    i.e. K sqrt(det g) (Gauss-Kronecker curvature times area element).
    """
    r, m = jet.r, jet.m
    if r != m - 1 or jet.order < 2:
        raise ValueError("needs a hypersurface jet (r = m - 1) of order >= 2")
    cols = [jet.vec((i,)) for i in range(1, r + 1)]
    N = normal_vector(cols)
    n2 = np.einsum("A...,A...->...", N, N)
    if np.any(n2 <= eps):
        raise SingularityError("degenerate tangent frame")
    dN = []
    for i in range(1, r + 1):
        acc = np.zeros_like(N)
        for k in range(r):
            replaced = list(cols)
            replaced[k] = jet.vec(tuple(sorted((i, k + 1))))
            acc = acc + normal_vector(replaced)
        dN.append(acc)
    M = np.stack([N] + dN, axis=0)              # (m cols, m rows, ...)
    M = np.moveaxis(np.moveaxis(M, 0, -1), 0, -2)  # (..., rows, cols)
    return np.linalg.det(M) / n2 ** (m / 2)


def grassmann_form_pair(u1, u2, X, Y, eps: float = DEFAULT_TOLERANCES.det_eps) -> np.ndarray:
    """The 2-form sum P^ab du1^a du2^b / sqrt(det g) on pairs of frames.

    X = (X1, X2) and Y = (Y1, Y2) are tangent vectors at (u1, u2); the value
    is sum P^ab (X1^a Y2^b - Y1^a X2^b) / sqrt(det g).
    """
    u1, u2 = np.asarray(u1, float), np.asarray(u2, float)
    Xt = np.stack([u1, u2])
    g = _metric(Xt)
    det = np.linalg.det(g)
    if np.any(det <= eps):
        raise SingularityError("dependent frame")
    ginv = np.linalg.inv(g)

    def P(u, v):
        u, v = np.asarray(u, float), np.asarray(v, float)
        return np.einsum("A...,A...->...", u, v) - _proj_tangent(Xt, ginv, u, v)

    return (P(X[0], Y[1]) - P(Y[0], X[1])) / np.sqrt(det)


def grassmann_form_value(u1, u2, v, w, eps: float = DEFAULT_TOLERANCES.det_eps) -> np.ndarray:
    """The form on the variation (v, 0) of u1 and (0, w) of u2."""
    z = np.zeros_like(np.asarray(v, float))
    return grassmann_form_pair(u1, u2, (v, z), (z, w), eps)


def grassmann_composed(jet: NumericJet, eps: float = DEFAULT_TOLERANCES.det_eps) -> np.ndarray:
    """L_w o F_2: the Grassmannian form evaluated on the frame map
    (x_1, x_2) and its derivatives d_1 = (x_11, x_12), d_2 = (x_12, x_22)."""
    x1, x2 = jet.vec((1,)), jet.vec((2,))
    d1 = (jet.vec((1, 1)), jet.vec((1, 2)))
    d2 = (jet.vec((1, 2)), jet.vec((2, 2)))
    return grassmann_form_pair(x1, x2, d1, d2, eps)


@dataclass(frozen=True)
class BuiltinLagrangian:
    name: str
    evaluator: Callable
    r: int
    m: Optional[int]
    weight: int = 1
    order: int = 2

    def __call__(self, jet: NumericJet):
        return self.evaluator(jet)


GAUSS_BONNET = BuiltinLagrangian("gauss-bonnet", gauss_bonnet_density, 2, None)


def gauss_map_lagrangian(m: int) -> BuiltinLagrangian:
    return BuiltinLagrangian(f"gauss-map-{m}", gauss_map_density, m - 1, m)


# --------------------------------------------------------------------------
# quadrature

@dataclass(frozen=True)
class Integral:
    value: float
    error_estimate: float
    resolution: int
    rule: str

    def to_dict(self) -> dict:
        return asdict(self)


def _nodes(lo, hi, n, rule):
    if rule == "midpoint":
        h = (hi - lo) / n
        return lo + h * (np.arange(n) + 0.5), np.full(n, h)
    if rule == "gauss":
        x, w = np.polynomial.legendre.leggauss(n)
        return 0.5 * (hi - lo) * x + 0.5 * (hi + lo), 0.5 * (hi - lo) * w
    raise ValueError(f"unknown rule {rule!r}")


def _tensor_sum(density, chart, bounds, n, rule):
    axes = [_nodes(lo, hi, n, rule) for lo, hi in bounds]
    grids = np.meshgrid(*[a[0] for a in axes], indexing="ij")
    weights = np.ones_like(grids[0])
    for k, (_, w) in enumerate(axes):
        shape = [1] * len(axes)
        shape[k] = -1
        weights = weights * w.reshape(shape)
    vals = density(chart.jet(*grids))
    if not np.all(np.isfinite(vals)):
        raise ValueError("non-finite density sample")
    return float(np.sum(vals * weights))


def integrate(density: Callable, patch: SurfacePatch, resolution: Optional[int] = None,
              rule: str = "midpoint") -> Integral:
    """Tensor-product quadrature; the error estimate compares with half the
    resolution (Richardson, assuming second order for the midpoint rule)."""
    n = resolution or patch.resolution
    fine = _tensor_sum(density, patch.chart, patch.bounds, n, rule)
    coarse = _tensor_sum(density, patch.chart, patch.bounds, max(n // 2, 1), rule)
    err = abs(fine - coarse) / 3.0 if rule == "midpoint" else abs(fine - coarse)
    return Integral(fine, err, n, rule)


def euler_characteristic(gauss_curvature_integral: float) -> float:
    """chi from the integral of K dA (Gauss-Bonnet: 2 pi chi)."""
    return gauss_curvature_integral / (2 * np.pi)


# --------------------------------------------------------------------------
# reparametrization

def transport_jet(jx: dict, jf: dict, r: int) -> dict:
    """Second-order chain rule for y = x o f.

    ``jx`` holds sigma -> value of x (shape (m, ...)) at f(s) for |sigma| <= 2
    over the target parameters; ``jf`` holds sigma -> value of f (shape
    (r, ...)) at s.  Returns sigma -> value of y at s:
        y_i = x_a f^a_i,   y_ij = x_ab f^a_i f^b_j + x_a f^a_ij.
    """
    def xs(*idx):
        return jx[tuple(sorted(idx))]

    def fs(a, *idx):
        return jf[tuple(sorted(idx))][a - 1]

    rf = len(jf[()])
    out = {(): jx[()]}
    for i in range(1, r + 1):
        out[(i,)] = sum(xs(a) * fs(a, i) for a in range(1, rf + 1))
    for i in range(1, r + 1):
        for j in range(i, r + 1):
            v = sum(xs(a) * fs(a, i, j) for a in range(1, rf + 1))
            for a in range(1, rf + 1):
                for b in range(1, rf + 1):
                    v = v + xs(a, b) * fs(a, i) * fs(b, j)
            out[(i, j)] = v
    return out


def _vectors(jet: NumericJet, order: int = 2) -> dict:
    return {sigma: jet.vec(sigma)
            for k in range(order + 1)
            for sigma in itertools.combinations_with_replacement(range(1, jet.r + 1), k)}


@dataclass(frozen=True)
class ReparamReport:
    max_deviation: float
    min_jacobian: float
    points: int


def reparametrization_check(L: BuiltinLagrangian, patch: SurfacePatch, diffeo: Chart,
                            s_points: Sequence[np.ndarray], weight: Optional[int] = None) -> ReparamReport:
    """max |L(j(x o f))(s) - L(j x)(f(s)) J(s)^w| over the sample points s,
    where J = det Df > 0 is required.  A weight-w density picks up the w-th
    power of the Jacobian under pullback."""
    w = L.weight if weight is None else weight
    jf = diffeo.jet(*s_points)
    fv = _vectors(jf)
    t_points = [fv[()][k] for k in range(diffeo.m)]
    jac = np.linalg.det(np.moveaxis(np.stack([fv[(i,)] for i in range(1, diffeo.r + 1)], axis=0), (0, 1), (-1, -2)))
    if np.any(jac <= 0):
        raise ValueError("reparametrization must have positive Jacobian")
    jx = patch.chart.jet(*t_points)
    orig = L(jx)
    y = transport_jet(_vectors(jx), fv, diffeo.r)
    new = L(NumericJet.from_vectors(y, order=2))
    dev = np.abs(new - orig * jac ** w)
    return ReparamReport(float(np.max(dev)), float(np.min(jac)), int(np.size(dev)))


# --------------------------------------------------------------------------
# discrete first variation

@dataclass(frozen=True)
class VariationReport:
    deviation: float
    eps: float
    finite_difference: float
    predicted: float


def _path_jet(path, order, t):
    data = {}
    for a, p in enumerate(path, start=1):
        q = p
        for k in range(order + 1):
            data[(a, (1,) * k)] = q(t)
            q = q.deriv()
    return NumericJet(1, len(path), order, data, t={1: t})


def action(L: Lagrangian, path, interval=(0.0, 1.0), nquad: int = 64) -> float:
    x, w = _nodes(interval[0], interval[1], nquad, "gauss")
    return float(np.sum(eval_poly(L, _path_jet(path, max(L.order, 0), x)) * w))


def discrete_variation_check(L: Lagrangian, path, Y, eps: float = 1e-4,
                             interval=(0.0, 1.0), nquad: int = 64) -> VariationReport:
    """|(S[x + eps Y] - S[x]) / eps - int Y^a F_a(L)| for a 1-parameter path.

    ``path`` and ``Y`` are sequences of numpy Polynomials, one per fiber
    coordinate; Y should vanish with its derivatives at the ends.
    """
    sig = L.sig
    if sig.r != 1 or sig.s or any(p for _, p in sig.fiber):
        raise ValueError("discrete variation is implemented for even curves (r = 1)")
    moved = [p + eps * y for p, y in zip(path, Y)]
    fd = (action(L, moved, interval, nquad) - action(L, path, interval, nquad)) / eps
    F = euler(L)
    order = max([L.order] + [Lagrangian(f, sig).order for f in F.values()])
    x, w = _nodes(interval[0], interval[1], nquad, "gauss")
    jet = _path_jet(path, order, x)
    pred = 0.0
    for a, fa in F.items():
        if fa:
            pred = pred + Y[a - 1](x) * eval_poly(fa, jet)
    pred = float(np.sum(pred * w))
    return VariationReport(abs(fd - pred), eps, fd, pred)


# --------------------------------------------------------------------------
# output

def emit_records(records: Sequence[dict], fmt: str = "json") -> str:
    """Serialize result rows as versioned JSON or CSV."""
    if fmt == "json":
        return json.dumps({"schema": 1, "records": list(records)}, indent=2, sort_keys=True)
    if fmt == "csv":
        buf = io.StringIO()
        keys = sorted({k for r in records for k in r})
        wr = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        wr.writeheader()
        for r in records:
            wr.writerow(r)
        return buf.getvalue()
    raise ValueError(f"unknown format {fmt!r}")
