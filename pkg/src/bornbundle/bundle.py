"""Born structure induced on the tangent bundle.

Bundle coordinates are (x^1..x^n, y^1..y^n): base coordinates followed by
fiber components.  The connection determines the adapted frame

    H_i = d/dx^i - Gamma^k_ij y^j d/dy^k,    V_i = d/dy^i,

whose matrix E = [[1, 0], [-Gamma y, 1]] has frame vectors as columns.  In
the adapted frame the six tensors take constant or metric-block form; in
bundle coordinates mixed tensors conjugate through (E, E^-1) and bilinear
forms pull back through E^-1.  Row index of a bilinear form is its first
argument.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fields, jets
from .errors import SpecError
from .jets import Jet
from .manifold import ManifoldSpec, check_spd, sample_points

FRAMES = ("adapted", "bundle-coordinate")


@dataclass(frozen=True)
class BundlePoint:
    x: tuple
    y: tuple

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        object.__setattr__(self, "y", tuple(float(v) for v in self.y))
        if len(self.x) != len(self.y):
            raise SpecError("fiber vector length must match base dimension")

    @property
    def n(self) -> int:
        return len(self.x)

    def coords(self) -> tuple:
        return self.x + self.y


@dataclass(frozen=True)
class BornFrame:
    """The six tensors at one bundle point.  I, J, K map vectors to vectors;
    h, k, omega are bilinear forms."""

    I: np.ndarray
    J: np.ndarray
    K: np.ndarray
    h: np.ndarray
    k: np.ndarray
    omega: np.ndarray
    frame: str
    point: BundlePoint


def _require_point(spec: ManifoldSpec, bp: BundlePoint) -> BundlePoint:
    if bp.n != spec.n:
        raise SpecError(f"bundle point dimension {bp.n} does not match spec {spec.n}")
    if not spec.contains(bp.x):
        raise SpecError(f"base point {bp.x} lies outside the sample box")
    return bp


def _constant_blocks(n: int) -> dict[str, np.ndarray]:
    one = np.eye(n)
    zero = np.zeros((n, n))
    return {
        "I": np.block([[zero, -one], [one, zero]]),
        "J": np.block([[zero, one], [one, zero]]),
        "K": np.block([[one, zero], [zero, -one]]),
    }


def _metric_blocks(gv: np.ndarray) -> dict[str, np.ndarray]:
    zero = np.zeros_like(gv)
    return {
        "h": np.block([[gv, zero], [zero, gv]]),
        "k": np.block([[zero, gv], [gv, zero]]),
        "omega": np.block([[zero, gv], [-gv, zero]]),
    }


def standard_born_matrices(n: int) -> dict[str, np.ndarray]:
    """The constant Born matrices of flat space (identity metric)."""
    out = _constant_blocks(n)
    out.update(_metric_blocks(np.eye(n)))
    return out


# -- frames -----------------------------------------------------------------

def _frame_jets(spec: ManifoldSpec, bp: BundlePoint, order: int):
    """(E, E^-1, G) as jets over the 2n bundle coordinates."""
    n = spec.n
    nv = 2 * n
    gamma = fields.connection_jets(spec, bp.x, order, nvars=nv)
    y = jets.seed_embedded(bp.y, order, nv, offset=n)
    a = np.empty((n, n), dtype=object)  # a[k, i] = -Gamma^k_ij y^j
    for k in range(n):
        for i in range(n):
            acc = gamma[k, i, 0] * y[0]
            for j in range(1, n):
                acc = acc + gamma[k, i, j] * y[j]
            a[k, i] = -acc
    e = np.empty((nv, nv), dtype=object)
    einv = np.empty((nv, nv), dtype=object)
    for r in range(nv):
        for c in range(nv):
            const = 1.0 if r == c else 0.0
            e[r, c] = Jet.constant(const, order, nv)
            einv[r, c] = Jet.constant(const, order, nv)
    for k in range(n):
        for i in range(n):
            e[n + k, i] = a[k, i]
            einv[n + k, i] = -a[k, i]
    g = fields.metric_args(spec, jets.seed_embedded(bp.x, order, nv, 0), order)
    return e, einv, g


def adapted_frame_at(spec: ManifoldSpec, bp: BundlePoint):
    """Change-of-basis pair (E, E^-1): columns of E are H_1..H_n, V_1..V_n
    in bundle coordinates, rows of E^-1 the dual coframe."""
    bp = _require_point(spec, bp)
    e, einv, _ = _frame_jets(spec, bp, 0)
    return fields.jet_values(e), fields.jet_values(einv)


def _sym_pair(m: np.ndarray, sign: float) -> np.ndarray:
    out = np.empty_like(m)
    nv = m.shape[0]
    for r in range(nv):
        for c in range(nv):
            out[r, c] = (m[r, c] + sign * m[c, r]) * 0.5
    return out


def born_jets(spec: ManifoldSpec, bp: BundlePoint, order: int = 1) -> dict[str, np.ndarray]:
    """The six tensors in bundle coordinates as jets over the 2n coordinates."""
    bp = _require_point(spec, bp)
    n = spec.n
    e, einv, g = _frame_jets(spec, bp, order)
    proto = e[0, 0]
    zero = Jet.constant(0.0, proto.order, proto.nvars)

    consts = _constant_blocks(n)
    adapted = {name: fields.const_jet_array(m, proto.order, proto.nvars)
               for name, m in consts.items()}
    for name, (ra, ca), (rb, cb), sb in (
            ("h", (0, 0), (n, n), 1.0),
            ("k", (0, n), (n, 0), 1.0),
            ("omega", (0, n), (n, 0), -1.0)):
        grid = np.full((2 * n, 2 * n), zero, dtype=object)
        for i in range(n):
            for j in range(n):
                grid[ra + i, ca + j] = g[i, j]
                grid[rb + i, cb + j] = g[i, j] * sb
        adapted[name] = grid

    einv_t = einv.T
    out = {}
    for name in ("I", "J", "K"):
        out[name] = fields.jet_matmul(fields.jet_matmul(e, adapted[name]), einv)
    out["h"] = _sym_pair(fields.jet_matmul(fields.jet_matmul(einv_t, adapted["h"]), einv), 1.0)
    out["k"] = _sym_pair(fields.jet_matmul(fields.jet_matmul(einv_t, adapted["k"]), einv), 1.0)
    out["omega"] = _sym_pair(fields.jet_matmul(fields.jet_matmul(einv_t, adapted["omega"]), einv), -1.0)
    return out


def born_at(spec: ManifoldSpec, bp: BundlePoint,
            frame: str = "bundle-coordinate") -> BornFrame:
    """Evaluate the six tensors at a bundle point, in the requested frame."""
    bp = _require_point(spec, bp)
    if frame not in FRAMES:
        raise ValueError(f"unknown frame {frame!r}")
    n = spec.n
    if frame == "adapted":
        gv = fields.jet_values(fields.metric_jets(spec, bp.x, 0))
        check_spd(gv, bp.x)
        mats = _constant_blocks(n)
        mats.update(_metric_blocks(gv))
    else:
        jmats = born_jets(spec, bp, order=0)
        gv = fields.jet_values(fields.metric_jets(spec, bp.x, 0))
        check_spd(gv, bp.x)
        mats = {name: fields.jet_values(m) for name, m in jmats.items()}
    return BornFrame(I=mats["I"], J=mats["J"], K=mats["K"], h=mats["h"],
                     k=mats["k"], omega=mats["omega"], frame=frame, point=bp)


# -- compatibility ------------------------------------------------------------

@dataclass(frozen=True)
class BornCompatReport:
    residuals: dict
    k_signature: tuple

    def max_residual(self) -> float:
        return max(self.residuals.values())


def born_compatibility_residuals(bf: BornFrame) -> BornCompatReport:
    """Max-norm defect of every defining identity of the structure, plus the
    eigenvalue-sign signature of k."""
    nv = bf.I.shape[0]
    n = nv // 2
    ident = np.eye(nv)

    def dev(m):
        return float(np.max(np.abs(m)))

    residuals = {
        "I_squared": dev(bf.I @ bf.I + ident),
        "J_squared": dev(bf.J @ bf.J - ident),
        "K_squared": dev(bf.K @ bf.K - ident),
        "IJK": dev(bf.I @ bf.J @ bf.K + ident),
        # a form maps X to form(X, .); with the first argument on rows the
        # matrix of that map is the transpose of the component matrix
        "I_vs_h_inv_omega": dev(np.linalg.solve(bf.h.T, bf.omega.T) - bf.I),
        "J_vs_k_inv_h": dev(np.linalg.solve(bf.k.T, bf.h.T) - bf.J),
        "K_vs_omega_inv_k": dev(np.linalg.solve(bf.omega.T, bf.k.T) - bf.K),
        "h_symmetry": dev(bf.h - bf.h.T),
        "k_symmetry": dev(bf.k - bf.k.T),
        "omega_antisymmetry": dev(bf.omega + bf.omega.T),
        "anticommute_I_JK": dev(bf.J @ bf.K - bf.I),
        "anticommute_I_KJ": dev(bf.K @ bf.J + bf.I),
        "anticommute_J_KI": dev(bf.K @ bf.I + bf.J),
        "anticommute_J_IK": dev(bf.I @ bf.K - bf.J),
        "anticommute_K_IJ": dev(bf.I @ bf.J + bf.K),
        "anticommute_K_JI": dev(bf.J @ bf.I - bf.K),
        "h_positive": float(max(0.0, -np.min(np.linalg.eigvalsh(bf.h)))),
        "omega_nondegenerate": float(max(0.0, 1e-12 - abs(np.linalg.det(bf.omega)))),
    }
    eigs = np.linalg.eigvalsh(bf.k)
    signature = (int(np.sum(eigs > 0)), int(np.sum(eigs < 0)))
    return BornCompatReport(residuals=residuals, k_signature=signature)


# -- affine-chart constant form -------------------------------------------------

def affine_chart_form_check(spec: ManifoldSpec, bp: BundlePoint) -> dict[str, float]:
    """Distance of the bundle-coordinate tensors from their affine-chart
    form: constant blocks for I, J, K and metric blocks for h, k, omega.
    Requires the connection coefficients to vanish identically in this
    chart."""
    bp = _require_point(spec, bp)
    probes = [bp.x] + [tuple(0.5 * (lo + hi) for lo, hi in spec.sample_box)]
    probes += [tuple(p) for p in sample_points(spec, 4, 1)]
    for q in probes:
        gamma = fields.jet_values(fields.connection_jets(spec, q, 0))
        if np.max(np.abs(gamma)) != 0.0:
            raise SpecError(
                "connection coefficients do not vanish in this chart; "
                f"max |Gamma| = {np.max(np.abs(gamma)):.3g} at {q}")
    bf = born_at(spec, bp, "bundle-coordinate")
    want = _constant_blocks(spec.n)
    gv = fields.jet_values(fields.metric_jets(spec, bp.x, 0))
    want.update(_metric_blocks(gv))
    return {
        "I": float(np.max(np.abs(bf.I - want["I"]))),
        "J": float(np.max(np.abs(bf.J - want["J"]))),
        "K": float(np.max(np.abs(bf.K - want["K"]))),
        "h": float(np.max(np.abs(bf.h - want["h"]))),
        "k": float(np.max(np.abs(bf.k - want["k"]))),
        "omega": float(np.max(np.abs(bf.omega - want["omega"]))),
    }
