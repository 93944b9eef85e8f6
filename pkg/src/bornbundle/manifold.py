"""Base-manifold tensor algebra.

Holds the manifold description (:class:`ManifoldSpec`), pointwise tensor
evaluation (metric, connection, torsion, curvature, dual connection,
covariant derivative of the metric, Levi-Civita), the Hessian verdict and
the four-residual torsion/duality/compatibility report.

Curvature convention, fixed once for the whole package:
``R^l_ijk = d_i Gamma^l_jk - d_j Gamma^l_ik + Gamma^l_im Gamma^m_jk
- Gamma^l_jm Gamma^m_ik``.  Identities involving the curvature are checked
against both global signs elsewhere; the matching sign is recorded, never
assumed.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import expr, fields, jets
from .errors import NotPositiveDefiniteError, SpecError

CONNECTION_KINDS = ("explicit", "flat", "levi-civita", "hessian-dual")
DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class ManifoldSpec:
    """A single-chart manifold: dimension, coordinates, metric (explicit
    grid or scalar potential whose coordinate Hessian is the metric),
    connection, and the box from which sample points are drawn."""

    n: int
    coords: tuple[str, ...]
    sample_box: tuple[tuple[float, float], ...]
    connection_kind: str
    metric_exprs: tuple | None = None
    potential: expr.ExprAst | None = None
    gamma_exprs: tuple | None = None
    name: str = ""

    def __post_init__(self):
        if self.n < 1:
            raise SpecError("dimension must be at least 1")
        if len(self.coords) != self.n:
            raise SpecError(f"{self.n} coordinates expected, got {len(self.coords)}")
        if len(self.sample_box) != self.n:
            raise SpecError("sample_box must give one interval per coordinate")
        for lo, hi in self.sample_box:
            if not lo < hi:
                raise SpecError(f"empty sample interval [{lo}, {hi}]")
        if (self.metric_exprs is None) == (self.potential is None):
            raise SpecError("exactly one of metric grid and potential is required")
        if self.metric_exprs is not None and (
                len(self.metric_exprs) != self.n
                or any(len(row) != self.n for row in self.metric_exprs)):
            raise SpecError("metric grid must be n x n")
        if self.connection_kind not in CONNECTION_KINDS:
            raise SpecError(f"unknown connection kind {self.connection_kind!r}")
        if (self.connection_kind == "explicit") != (self.gamma_exprs is not None):
            raise SpecError("explicit connections need a gamma grid, others must not have one")
        if self.gamma_exprs is not None and (
                len(self.gamma_exprs) != self.n
                or any(len(plane) != self.n for plane in self.gamma_exprs)
                or any(len(row) != self.n for plane in self.gamma_exprs for row in plane)):
            raise SpecError("gamma grid must be n x n x n")

    def contains(self, p: Sequence[float]) -> bool:
        return all(lo <= x <= hi for x, (lo, hi) in zip(p, self.sample_box))


def build_spec(name: str, coordinates: Sequence[str], sample_box,
               metric: Sequence[Sequence[str]] | None = None,
               potential: str | None = None,
               connection: str = "flat",
               gamma: Sequence[Sequence[Sequence[str]]] | None = None) -> ManifoldSpec:
    """Parse expression strings into a validated spec."""
    coords = tuple(coordinates)
    n = len(coords)
    metric_exprs = None
    if metric is not None:
        metric_exprs = tuple(tuple(expr.parse(e, coords) for e in row) for row in metric)
    potential_ast = expr.parse(potential, coords) if potential is not None else None
    gamma_exprs = None
    if gamma is not None:
        gamma_exprs = tuple(tuple(tuple(expr.parse(e, coords) for e in row)
                                  for row in plane) for plane in gamma)
    box = tuple((float(lo), float(hi)) for lo, hi in sample_box)
    return ManifoldSpec(n=n, coords=coords, sample_box=box,
                        connection_kind=connection, metric_exprs=metric_exprs,
                        potential=potential_ast, gamma_exprs=gamma_exprs, name=name)


@dataclass(frozen=True)
class TensorValue:
    """Dense component array at a point, tagged with a variance signature
    ('u'/'l' per index, row-major: first index first) and a frame.  When the
    producing operation ran with jets, the jet array rides along in ``jets``.
    For bilinear forms the row (first) index is the first argument."""

    components: np.ndarray
    variance: str
    frame: str
    point: tuple
    jets: np.ndarray | None = None

    def __post_init__(self):
        if self.components.ndim != len(self.variance):
            raise ValueError("variance signature must match array rank")
        dims = set(self.components.shape)
        if len(dims) > 1:
            raise ValueError("all tensor axes must have equal length")

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.components)))


# -- sampling --------------------------------------------------------------

_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19)


def _radical_inverse(i: int, base: int) -> float:
    f = 1.0
    r = 0.0
    while i > 0:
        f /= base
        r += f * (i % base)
        i //= base
    return r


def halton_points(count: int, dim: int, seed: int, prime_offset: int = 0) -> np.ndarray:
    """Deterministic low-discrepancy points in [0, 1)^dim; the seed shifts
    the start index of the sequence."""
    if dim + prime_offset > len(_PRIMES):
        raise ValueError("halton sampler supports at most 8 dimensions")
    start = 1 + (seed % 8191) * 61
    pts = np.empty((count, dim))
    for r in range(count):
        for d in range(dim):
            pts[r, d] = _radical_inverse(start + r, _PRIMES[prime_offset + d])
    return pts


def sample_points(spec: ManifoldSpec, count: int, seed: int) -> np.ndarray:
    if count < 1:
        raise ValueError("need at least one sample point")
    unit = halton_points(count, spec.n, seed)
    box = np.asarray(spec.sample_box)
    return box[:, 0] + unit * (box[:, 1] - box[:, 0])


def sample_fibers(n: int, count: int, radius: float, seed: int) -> np.ndarray:
    """Fiber vectors in the box [-radius, radius]^n, from a Halton stream
    disjoint from the base-point stream."""
    if count < 1:
        raise ValueError("need at least one fiber sample")
    if radius <= 0:
        raise ValueError("fiber radius must be positive")
    unit = halton_points(count, n, seed, prime_offset=n)
    return (2.0 * unit - 1.0) * radius


# -- pointwise tensors -------------------------------------------------------

def check_spd(g: np.ndarray, point) -> float:
    """Cholesky-style positivity check; returns the smallest pivot."""
    a = np.array(g, dtype=float)
    n = a.shape[0]
    smallest = np.inf
    for i in range(n):
        pivot = a[i, i]
        smallest = min(smallest, pivot)
        if pivot <= 0.0:
            raise NotPositiveDefiniteError(
                f"metric is not positive definite at {tuple(point)}: "
                f"smallest pivot {pivot:.6g}", pivot)
        for j in range(i + 1, n):
            factor = a[j, i] / pivot
            a[j, i:] -= factor * a[i, i:]
    return smallest


def _require_inside(spec: ManifoldSpec, p) -> tuple:
    p = tuple(float(x) for x in p)
    if len(p) != spec.n:
        raise SpecError(f"point has {len(p)} coordinates, expected {spec.n}")
    if not spec.contains(p):
        raise SpecError(f"point {p} lies outside the sample box")
    return p


def metric_at(spec: ManifoldSpec, p, order: int = 0) -> TensorValue:
    """Metric components at p, positivity-checked.  The returned tensor
    additionally exposes the underlying jets as ``.jets``."""
    p = _require_inside(spec, p)
    g = fields.metric_jets(spec, p, order)
    values = fields.jet_values(g)
    check_spd(values, p)
    return TensorValue(values, "ll", "base-coordinate", p, jets=g)


def connection_at(spec: ManifoldSpec, p, order: int = 0) -> TensorValue:
    p = _require_inside(spec, p)
    gamma = fields.connection_jets(spec, p, order)
    return TensorValue(fields.jet_values(gamma), "ull", "base-coordinate", p, jets=gamma)


def levi_civita_at(spec: ManifoldSpec, p, order: int = 0) -> TensorValue:
    p = _require_inside(spec, p)
    gamma = fields.levi_civita_jets(spec, p, order)
    return TensorValue(fields.jet_values(gamma), "ull", "base-coordinate", p, jets=gamma)


def torsion_at(spec: ManifoldSpec, p) -> TensorValue:
    """T^k_ij = Gamma^k_ij - Gamma^k_ji."""
    p = _require_inside(spec, p)
    gamma = fields.jet_values(fields.connection_jets(spec, p, 0))
    return TensorValue(gamma - gamma.transpose(0, 2, 1), "ull", "base-coordinate", p)


def _torsion_of(gamma_values: np.ndarray) -> np.ndarray:
    return gamma_values - gamma_values.transpose(0, 2, 1)


def curvature_at(spec: ManifoldSpec, p) -> TensorValue:
    """R^l_ijk under the package convention (see module docstring)."""
    p = _require_inside(spec, p)
    gamma = fields.connection_jets(spec, p, 1)
    gv = fields.jet_values(gamma)
    dg = fields.jet_d1(gamma)  # dg[d, k, i, j] = d_d Gamma^k_ij
    half = (np.einsum("iljk->lijk", dg)
            + np.einsum("lim,mjk->lijk", gv, gv))
    r = half - half.transpose(0, 2, 1, 3)
    return TensorValue(r, "ulll", "base-coordinate", p)


def dual_connection_at(spec: ManifoldSpec, p) -> TensorValue:
    """The unique connection pairing with the declared one so that the
    metric is parallel for the pair: Gamma*^l_ik = g^{lj}(d_i g_jk -
    Gamma^m_ij g_mk)."""
    p = _require_inside(spec, p)
    dual = fields.dual_connection_jets(spec, p, 0)
    return TensorValue(fields.jet_values(dual), "ull", "base-coordinate", p)


def dual_identity_residual(spec: ManifoldSpec, p) -> float:
    """Max-norm defect of d_i g_jk = Gamma^l_ij g_lk + g_jl Gamma*^l_ik."""
    p = _require_inside(spec, p)
    g, dg = fields.metric_dg_jets(spec, p, 0)
    gv = fields.jet_values(g)
    dgv = fields.jet_values(dg)
    gamma = fields.jet_values(fields.connection_jets(spec, p, 0))
    dual = fields.jet_values(fields.dual_connection_jets(spec, p, 0))
    resid = (dgv - np.einsum("lij,lk->ijk", gamma, gv)
             - np.einsum("jl,lik->ijk", gv, dual))
    return float(np.max(np.abs(resid)))


def nabla_g_at(spec: ManifoldSpec, p) -> tuple[TensorValue, float]:
    """Covariant derivative of the metric, indexed (direction; arguments),
    and the worst asymmetry under index permutations."""
    p = _require_inside(spec, p)
    g, dg = fields.metric_dg_jets(spec, p, 0)
    gv = fields.jet_values(g)
    dgv = fields.jet_values(dg)
    gamma = fields.jet_values(fields.connection_jets(spec, p, 0))
    ng = (dgv - np.einsum("lij,lk->ijk", gamma, gv)
          - np.einsum("lik,jl->ijk", gamma, gv))
    asym = 0.0
    for perm in itertools.permutations(range(3)):
        if perm == (0, 1, 2):
            continue
        asym = max(asym, float(np.max(np.abs(ng - ng.transpose(perm)))))
    return TensorValue(ng, "lll", "base-coordinate", p), asym


@dataclass(frozen=True)
class HessianVerdict:
    is_hessian: bool
    max_curvature: float
    max_torsion: float
    max_nabla_g_asymmetry: float
    tol: float
    points: int


def hessian_verdict(spec: ManifoldSpec, points: Sequence[Sequence[float]],
                    tol: float = DEFAULT_TOL) -> HessianVerdict:
    """Flatness plus total symmetry of the metric derivative, checked on
    sampled points of this chart (pointwise certificate only)."""
    points = list(points)
    if not points:
        raise ValueError("need at least one sample point")
    max_r = max_t = max_a = 0.0
    for p in points:
        metric_at(spec, p)  # SPD gate
        max_r = max(max_r, curvature_at(spec, p).max_abs())
        max_t = max(max_t, torsion_at(spec, p).max_abs())
        max_a = max(max_a, nabla_g_at(spec, p)[1])
    return HessianVerdict(
        is_hessian=bool(max_r <= tol and max_t <= tol and max_a <= tol),
        max_curvature=max_r, max_torsion=max_t, max_nabla_g_asymmetry=max_a,
        tol=tol, points=len(points))


@dataclass(frozen=True)
class TwoOfFourReport:
    """Max residuals of: torsion of the connection, torsion of its dual,
    asymmetry of the metric derivative, and distance of the connection/dual
    mean from Levi-Civita.  Any two vanishing forces all four, so observing
    exactly two or three below tolerance indicates an internal bug."""

    residuals: dict
    holds: dict
    tol: float
    fact_violated: bool


def two_of_four_residuals(spec: ManifoldSpec, points: Sequence[Sequence[float]],
                          tol: float = DEFAULT_TOL) -> TwoOfFourReport:
    points = list(points)
    if not points:
        raise ValueError("need at least one sample point")
    keys = ("torsion", "dual_torsion", "nabla_g_asymmetry", "mean_vs_levi_civita")
    maxima = dict.fromkeys(keys, 0.0)
    for p in points:
        p = _require_inside(spec, p)
        gamma = fields.jet_values(fields.connection_jets(spec, p, 0))
        dual = fields.jet_values(fields.dual_connection_jets(spec, p, 0))
        lc = fields.jet_values(fields.levi_civita_jets(spec, p, 0))
        _, asym = nabla_g_at(spec, p)
        maxima["torsion"] = max(maxima["torsion"], float(np.max(np.abs(_torsion_of(gamma)))))
        maxima["dual_torsion"] = max(maxima["dual_torsion"], float(np.max(np.abs(_torsion_of(dual)))))
        maxima["nabla_g_asymmetry"] = max(maxima["nabla_g_asymmetry"], asym)
        maxima["mean_vs_levi_civita"] = max(
            maxima["mean_vs_levi_civita"], float(np.max(np.abs(0.5 * (gamma + dual) - lc))))
    holds = {k: bool(v <= tol) for k, v in maxima.items()}
    count = sum(holds.values())
    return TwoOfFourReport(residuals=maxima, holds=holds, tol=tol,
                           fact_violated=bool(count in (2, 3)))
