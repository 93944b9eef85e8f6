"""Constructive affine-chart witness for flat torsion-free connections.

The chart is the exponential map at a base point: straight coordinates a
are mapped to the endpoint of the geodesic with initial velocity a,
integrated with classical fourth-order Runge-Kutta over unit time.
Derivatives of the chart map come from pushing order-2 jets through the
integrator (exact for the discrete map, unlike finite differences through
an ODE).  Success criterion: the transformed connection coefficients
vanish in the constructed chart.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fields, jets
from .bundle import _constant_blocks
from .errors import SpecError
from .jets import Jet
from .manifold import ManifoldSpec, curvature_at, sample_points, torsion_at

FLATNESS_GATE_TOL = 1e-7
PUSHFORWARD_TOL = 1e-6
DEFAULT_STEPS = 64


class BoxExitError(SpecError):
    """A geodesic left the sample box."""

    def __init__(self, message: str, step: int):
        super().__init__(message)
        self.step = step


class FlatnessGateError(SpecError):
    """The connection is not flat and torsion-free, so the exponential map
    is not an affine chart."""


def _acceleration(spec: ManifoldSpec, x, u):
    gamma = fields.connection_args(spec, list(x), x[0].order)
    n = spec.n
    acc = []
    for k in range(n):
        s = None
        for i in range(n):
            for j in range(n):
                term = gamma[k, i, j] * u[i] * u[j]
                s = term if s is None else s + term
        acc.append(-s)
    return acc


def _rk4(spec: ManifoldSpec, x, u, steps: int):
    """Integrate the geodesic equation over t in [0, 1]; state entries are
    jets, so derivative seeds ride through for free."""
    h = 1.0 / steps
    n = spec.n
    for step in range(steps):
        k1x, k1u = u, _acceleration(spec, x, u)
        x2 = [x[i] + k1x[i] * (h / 2) for i in range(n)]
        u2 = [u[i] + k1u[i] * (h / 2) for i in range(n)]
        k2x, k2u = u2, _acceleration(spec, x2, u2)
        x3 = [x[i] + k2x[i] * (h / 2) for i in range(n)]
        u3 = [u[i] + k2u[i] * (h / 2) for i in range(n)]
        k3x, k3u = u3, _acceleration(spec, x3, u3)
        x4 = [x[i] + k3x[i] * h for i in range(n)]
        u4 = [u[i] + k3u[i] * h for i in range(n)]
        k4x, k4u = u4, _acceleration(spec, x4, u4)
        x = [x[i] + (k1x[i] + k2x[i] * 2 + k3x[i] * 2 + k4x[i]) * (h / 6)
             for i in range(n)]
        u = [u[i] + (k1u[i] + k2u[i] * 2 + k3u[i] * 2 + k4u[i]) * (h / 6)
             for i in range(n)]
        values = [c.value for c in x]
        if not spec.contains(values):
            raise BoxExitError(
                f"geodesic left the sample box at step {step + 1}/{steps}, "
                f"position {tuple(values)}", step + 1)
    return x


def geodesic_integrate(spec: ManifoldSpec, x0, v, steps: int = DEFAULT_STEPS) -> np.ndarray:
    """Endpoint of the unit-time geodesic from x0 with initial velocity v."""
    if steps < 1:
        raise ValueError("need at least one integration step")
    x0 = tuple(float(c) for c in x0)
    if not spec.contains(x0):
        raise SpecError(f"start point {x0} lies outside the sample box")
    n = spec.n
    x = [Jet.constant(c, 0, n) for c in x0]
    u = [Jet.constant(float(c), 0, n) for c in v]
    end = _rk4(spec, x, u, steps)
    return np.array([c.value for c in end])


@dataclass(frozen=True)
class ChartMap:
    """Forward map from straight coordinates to the original chart,
    realized by geodesic integration from ``x0``."""

    spec: ManifoldSpec
    x0: tuple
    steps: int = DEFAULT_STEPS
    radius: float = 0.0

    def point(self, a) -> np.ndarray:
        return geodesic_integrate(self.spec, self.x0, a, self.steps)

    def jets(self, a, order: int = 2) -> list[Jet]:
        """Chart-map coordinates as jets over the straight coordinates."""
        n = self.spec.n
        x = [Jet.constant(c, order, n) for c in self.x0]
        u = jets.seed_embedded(a, order, n, 0)
        return _rk4(self.spec, x, u, self.steps)

    def jacobian(self, a) -> np.ndarray:
        out = self.jets(a, order=1)
        n = self.spec.n
        return np.array([[out[k].partial(i) for i in range(n)] for k in range(n)])

    def second_derivatives(self, a) -> np.ndarray:
        out = self.jets(a, order=2)
        n = self.spec.n
        sec = np.empty((n, n, n))
        for k in range(n):
            for i in range(n):
                for j in range(n):
                    sec[k, i, j] = out[k].partial(i, j)
        return sec


def exponential_chart(spec: ManifoldSpec, x0, steps: int = DEFAULT_STEPS,
                      gate_tol: float = FLATNESS_GATE_TOL,
                      gate_points: int = 8, seed: int = 42) -> ChartMap:
    """Build the exponential chart at x0 after checking that curvature and
    torsion vanish on sampled points (otherwise the map is not affine)."""
    x0 = tuple(float(c) for c in x0)
    if not spec.contains(x0):
        raise SpecError(f"chart base point {x0} lies outside the sample box")
    max_r = max_t = 0.0
    for p in sample_points(spec, gate_points, seed):
        max_r = max(max_r, curvature_at(spec, tuple(p)).max_abs())
        max_t = max(max_t, torsion_at(spec, tuple(p)).max_abs())
    if max_r > gate_tol or max_t > gate_tol:
        raise FlatnessGateError(
            "exponential map is affine only for flat torsion-free connections: "
            f"max |curvature| = {max_r:.3g}, max |torsion| = {max_t:.3g} "
            f"(gate {gate_tol:g})")
    inradius = min((hi - lo) / 2.0 for lo, hi in spec.sample_box)
    return ChartMap(spec=spec, x0=x0, steps=steps, radius=inradius / 2.0)


def pushforward_connection_residual(spec: ManifoldSpec, chart: ChartMap,
                                    probes) -> float:
    """Max-norm of the connection coefficients transformed into the chart:
    Gamma'^c_ab = (da^c/dx^k) [ (dx^i/da^a)(dx^j/da^b) Gamma^k_ij
    + d2 x^k / da^a da^b ]."""
    worst = 0.0
    for a in probes:
        a = tuple(float(c) for c in a)
        if float(np.linalg.norm(a)) > chart.radius + 1e-12:
            raise ValueError(
                f"probe {a} lies beyond the chart validity radius {chart.radius:g}")
        cj = chart.jets(a, order=2)
        n = spec.n
        x = tuple(c.value for c in cj)
        jac = np.array([[cj[k].partial(i) for i in range(n)] for k in range(n)])
        sec = np.array([[[cj[k].partial(i, j) for j in range(n)]
                         for i in range(n)] for k in range(n)])
        gamma = fields.jet_values(fields.connection_jets(spec, x, 0))
        try:
            inv = np.linalg.inv(jac)
        except np.linalg.LinAlgError:
            raise SpecError(f"singular chart Jacobian at probe {a}") from None
        inner = np.einsum("ia,jb,kij->kab", jac, jac, gamma) + sec
        transformed = np.einsum("ck,kab->cab", inv, inner)
        worst = max(worst, float(np.max(np.abs(transformed))))
    return worst


def chart_born_block_residual(spec: ManifoldSpec, chart: ChartMap, a, y) -> float:
    """Distance of the I, J, K built from the transformed connection at a
    chart probe from their constant affine-chart blocks."""
    a = tuple(float(c) for c in a)
    y = np.asarray(y, dtype=float)
    n = spec.n
    cj = chart.jets(a, order=2)
    x = tuple(c.value for c in cj)
    jac = np.array([[cj[k].partial(i) for i in range(n)] for k in range(n)])
    sec = np.array([[[cj[k].partial(i, j) for j in range(n)]
                     for i in range(n)] for k in range(n)])
    gamma = fields.jet_values(fields.connection_jets(spec, x, 0))
    inv = np.linalg.inv(jac)
    transformed = np.einsum("ck,ia,jb,kij->cab", inv, jac, jac, gamma) \
        + np.einsum("ck,kab->cab", inv, sec)
    blocks = np.zeros((2 * n, 2 * n))
    blocks[:n, :n] = np.eye(n)
    blocks[n:, n:] = np.eye(n)
    blocks[n:, :n] = -np.einsum("kij,j->ki", transformed, y)
    e = blocks
    einv = blocks.copy()
    einv[n:, :n] = -einv[n:, :n]
    consts = _constant_blocks(n)
    worst = 0.0
    for name in ("I", "J", "K"):
        got = e @ consts[name] @ einv
        worst = max(worst, float(np.max(np.abs(got - consts[name]))))
    return worst
