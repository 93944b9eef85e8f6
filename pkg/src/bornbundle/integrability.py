"""Integrability checks for the induced Born structure.

Nijenhuis tensors and the exterior derivative of omega are computed in
bundle coordinates, where coordinate vector fields have vanishing
brackets; for a (1,1)-tensor A the components reduce to

    N^l_ab = A^m_a d_m A^l_b - A^m_b d_m A^l_a - A^l_m (d_a A^m_b - d_b A^m_a)

with derivatives over all 2n bundle coordinates supplied by jets.  The
frame-bracket and Nijenhuis identities that tie these to curvature and
torsion are checked against both global signs and the better-matching sign
is recorded, never assumed.  Residuals of identities that grow linearly in
the fiber coordinate are normalized by (1 + |y|).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import fields, jets
from .bundle import BundlePoint, _frame_jets, _require_point, born_jets
from .manifold import (DEFAULT_TOL, HessianVerdict, ManifoldSpec, TensorValue,
                       curvature_at, hessian_verdict, sample_fibers,
                       sample_points, torsion_at)

CROSS_TOL = 1e-7  # comparisons between two independent numeric pipelines


def _norm_factor(bp: BundlePoint) -> float:
    return 1.0 + float(np.linalg.norm(bp.y))


def _nijenhuis_from_jets(a_jets: np.ndarray) -> np.ndarray:
    av = fields.jet_values(a_jets)
    da = fields.jet_d1(a_jets)  # da[m, l, b] = d_m A^l_b
    half = (np.einsum("ma,mlb->lab", av, da)
            - np.einsum("lm,amb->lab", av, da))
    return half - half.transpose(0, 2, 1)


def nijenhuis_at(spec: ManifoldSpec, which: str, bp: BundlePoint) -> TensorValue:
    """Nijenhuis tensor of the bundle-coordinate I, J or K at a bundle point."""
    if which not in ("I", "J", "K"):
        raise ValueError(f"which must be I, J or K, not {which!r}")
    bp = _require_point(spec, bp)
    a_jets = born_jets(spec, bp, order=1)[which]
    n = _nijenhuis_from_jets(a_jets)
    return TensorValue(n, "ull", "bundle-coordinate", bp.coords())


def d_omega_at(spec: ManifoldSpec, bp: BundlePoint) -> TensorValue:
    """(d omega)_abc = d_a omega_bc + d_b omega_ca + d_c omega_ab."""
    bp = _require_point(spec, bp)
    w = born_jets(spec, bp, order=1)["omega"]
    dw = fields.jet_d1(w)  # dw[a, b, c] = d_a omega_bc
    out = dw + dw.transpose(1, 2, 0) + dw.transpose(2, 0, 1)
    return TensorValue(out, "lll", "bundle-coordinate", bp.coords())


# -- proof identities ---------------------------------------------------------

def _vector_bracket(x_jets, y_jets) -> np.ndarray:
    """[X, Y]^mu = X^nu d_nu Y^mu - Y^nu d_nu X^mu for jet-valued fields."""
    xv = fields.jet_values(x_jets)
    yv = fields.jet_values(y_jets)
    dx = fields.jet_d1(x_jets)  # dx[nu, mu]
    dy = fields.jet_d1(y_jets)
    return np.einsum("n,nm->m", xv, dy) - np.einsum("n,nm->m", yv, dx)


def _frame_fields(spec: ManifoldSpec, bp: BundlePoint):
    """H_i and V_i as jet-valued vector fields in bundle coordinates."""
    e, _, _ = _frame_jets(spec, bp, order=1)
    nv = e.shape[0]
    n = nv // 2
    h = [e[:, i] for i in range(n)]
    v = [e[:, n + i] for i in range(n)]
    return h, v


def _signed_residual(lhs: np.ndarray, rhs: np.ndarray, scale: float):
    plus = float(np.max(np.abs(lhs - rhs))) / scale
    minus = float(np.max(np.abs(lhs + rhs))) / scale
    sign = 1 if plus <= minus else -1
    return {"residual_plus": plus, "residual_minus": minus,
            "sign": sign, "residual": min(plus, minus)}


def frame_bracket_residuals(spec: ManifoldSpec, bp: BundlePoint) -> dict:
    """Jet-computed brackets of the adapted frame fields against
    [H_i, H_j] = -R^l_ijk y^k V_l, [V_i, V_j] = 0, [H_i, V_j] = -Gamma^k_ij V_k,
    each up to a recorded global sign."""
    bp = _require_point(spec, bp)
    n = spec.n
    h, v = _frame_fields(spec, bp)
    r = curvature_at(spec, bp.x).components
    gamma = fields.jet_values(fields.connection_jets(spec, bp.x, 0))
    y = np.asarray(bp.y)
    scale = _norm_factor(bp)

    lhs_hh = np.stack([[_vector_bracket(h[i], h[j]) for j in range(n)] for i in range(n)])
    rhs_hh = np.zeros((n, n, 2 * n))
    rhs_hh[:, :, n:] = -np.einsum("lijk,k->ijl", r, y)
    lhs_vv = np.stack([[_vector_bracket(v[i], v[j]) for j in range(n)] for i in range(n)])
    lhs_hv = np.stack([[_vector_bracket(h[i], v[j]) for j in range(n)] for i in range(n)])
    rhs_hv = np.zeros((n, n, 2 * n))
    rhs_hv[:, :, n:] = -np.einsum("kij->ijk", gamma)

    return {
        "HH": _signed_residual(lhs_hh, rhs_hh, scale),
        "VV": {"residual": float(np.max(np.abs(lhs_vv))) / scale},
        "HV": _signed_residual(lhs_hv, rhs_hv, scale),
    }


def nijenhuis_J_identity_residuals(spec: ManifoldSpec, bp: BundlePoint) -> dict:
    """N_J on frame-field pairs against the curvature/torsion expressions
    T^k_ij H_k - R^l_ijk y^k V_l (HH and VV pairs) and
    R^l_ijk y^k H_l - T^k_ij V_k (HV pairs), up to a recorded global sign."""
    bp = _require_point(spec, bp)
    n = spec.n
    nj = _nijenhuis_from_jets(born_jets(spec, bp, order=1)["J"])
    e, einv, _ = _frame_jets(spec, bp, order=0)
    ev = fields.jet_values(e)
    einv_v = fields.jet_values(einv)
    # N in the adapted frame: pull the value index back, feed frame vectors in
    nj_ad = np.einsum("cl,lmn,ma,nb->cab", einv_v, nj, ev, ev)

    r = curvature_at(spec, bp.x).components
    t = torsion_at(spec, bp.x).components
    y = np.asarray(bp.y)
    ry = np.einsum("lijk,k->ijl", r, y)
    scale = _norm_factor(bp)

    rhs_hh = np.zeros((n, n, 2 * n))
    rhs_hh[:, :, :n] = np.einsum("kij->ijk", t)
    rhs_hh[:, :, n:] = -ry
    rhs_hv = np.zeros((n, n, 2 * n))
    rhs_hv[:, :, :n] = ry
    rhs_hv[:, :, n:] = -np.einsum("kij->ijk", t)

    lhs_hh = np.einsum("cab->abc", nj_ad[:, :n, :n])
    lhs_vv = np.einsum("cab->abc", nj_ad[:, n:, n:])
    lhs_hv = np.einsum("cab->abc", nj_ad[:, :n, n:])
    return {
        "HH": _signed_residual(lhs_hh, rhs_hh, scale),
        "VV": _signed_residual(lhs_vv, rhs_hh, scale),
        "HV": _signed_residual(lhs_hv, rhs_hv, scale),
    }


# -- verdicts -------------------------------------------------------------------

@dataclass(frozen=True)
class IntegrabilityReport:
    max_nijenhuis_I: float
    max_nijenhuis_J: float
    max_nijenhuis_K: float
    max_d_omega: float
    integrable: bool
    strongly_integrable: bool
    hessian_agreement: bool
    hessian: HessianVerdict
    tol: float
    per_point: list = field(default_factory=list)

    def residual_table(self) -> dict:
        return {"nijenhuis_I": self.max_nijenhuis_I,
                "nijenhuis_J": self.max_nijenhuis_J,
                "nijenhuis_K": self.max_nijenhuis_K,
                "d_omega": self.max_d_omega}


def point_residuals(spec: ManifoldSpec, bp: BundlePoint) -> dict:
    """Normalized max-norms of N_I, N_J, N_K and d omega at one point."""
    bp = _require_point(spec, bp)
    mats = born_jets(spec, bp, order=1)
    scale = _norm_factor(bp)
    out = {}
    for name in ("I", "J", "K"):
        out["nijenhuis_" + name] = float(
            np.max(np.abs(_nijenhuis_from_jets(mats[name])))) / scale
    dw = fields.jet_d1(mats["omega"])
    dw = dw + dw.transpose(1, 2, 0) + dw.transpose(2, 0, 1)
    out["d_omega"] = float(np.max(np.abs(dw))) / scale
    return out


def integrability_verdict(spec: ManifoldSpec, base_count: int = 32,
                          fiber_count: int = 8, fiber_radius: float = 1.0,
                          tol: float = DEFAULT_TOL, seed: int = 42) -> IntegrabilityReport:
    """Aggregate the normalized residual maxima over a base x fiber sample
    grid and compare the outcome with the Hessian verdict.  Disagreement
    contradicts the equivalence the package exists to check, so it is
    surfaced as a loud flag (implementation-bug indicator), not silently
    accepted."""
    if base_count < 1 or fiber_count < 1:
        raise ValueError("sample counts must be at least 1")
    base = sample_points(spec, base_count, seed)
    fibers = sample_fibers(spec.n, fiber_count, fiber_radius, seed)
    maxima = {"nijenhuis_I": 0.0, "nijenhuis_J": 0.0,
              "nijenhuis_K": 0.0, "d_omega": 0.0}
    per_point = []
    for x in base:
        for y in fibers:
            bp = BundlePoint(tuple(x), tuple(y))
            row = point_residuals(spec, bp)
            per_point.append({"x": list(bp.x), "y": list(bp.y), **row})
            for key in maxima:
                maxima[key] = max(maxima[key], row[key])
    integrable = all(v <= tol for v in maxima.values())
    hv = hessian_verdict(spec, [tuple(x) for x in base], tol)
    return IntegrabilityReport(
        max_nijenhuis_I=maxima["nijenhuis_I"],
        max_nijenhuis_J=maxima["nijenhuis_J"],
        max_nijenhuis_K=maxima["nijenhuis_K"],
        max_d_omega=maxima["d_omega"],
        integrable=integrable,
        # for induced structures the two integrability notions coincide;
        # the affine-chart witness provides the constructive side
        strongly_integrable=integrable,
        hessian_agreement=(integrable == hv.is_hessian),
        hessian=hv, tol=tol, per_point=per_point)


@dataclass(frozen=True)
class CrosscheckReport:
    rows: list
    all_agree: bool


def theorem_crosscheck(specs: Sequence[ManifoldSpec], base_count: int = 32,
                       fiber_count: int = 8, fiber_radius: float = 1.0,
                       tol: float = DEFAULT_TOL, seed: int = 42) -> CrosscheckReport:
    """Hessian verdict versus integrability verdict for every spec; the two
    must agree for each one."""
    specs = list(specs)
    if not specs:
        raise ValueError("crosscheck needs a non-empty corpus")
    rows = []
    for spec in specs:
        rep = integrability_verdict(spec, base_count, fiber_count,
                                    fiber_radius, tol, seed)
        rows.append({
            "name": spec.name or "<unnamed>",
            "hessian": rep.hessian.is_hessian,
            "integrable": rep.integrable,
            "agreement": rep.hessian_agreement,
            "residuals": rep.residual_table(),
            "hessian_residuals": {
                "curvature": rep.hessian.max_curvature,
                "torsion": rep.hessian.max_torsion,
                "nabla_g_asymmetry": rep.hessian.max_nabla_g_asymmetry,
            },
        })
    return CrosscheckReport(rows=rows, all_agree=all(r["agreement"] for r in rows))
