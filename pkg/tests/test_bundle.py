import math

import numpy as np
import pytest

from bornbundle import corpus, fields
from bornbundle.bundle import (BornFrame, BundlePoint, adapted_frame_at,
                               affine_chart_form_check, born_at,
                               born_compatibility_residuals, born_jets,
                               standard_born_matrices)
from bornbundle.errors import SpecError
from bornbundle.manifold import sample_fibers, sample_points

EUCLID = corpus.example("euclidean2")
HESSIAN = corpus.example("hessian-exp2")
SKEW = corpus.example("flat-skew-metric")
SPHERE = corpus.example("sphere2")
TORSIONFUL = corpus.example("flat-torsionful")
PULLBACK = corpus.example("pullback-flat")
ALL = [EUCLID, HESSIAN, SKEW, SPHERE, TORSIONFUL, PULLBACK]


def bundle_points(spec, n_base=4, n_fiber=5, radius=1.0, seed=3):
    base = sample_points(spec, n_base, seed)
    fibers = sample_fibers(spec.n, n_fiber, radius, seed)
    return [BundlePoint(tuple(x), tuple(y)) for x in base for y in fibers]


def test_flat_frame_is_identity():
    e, einv = adapted_frame_at(EUCLID, BundlePoint((0.1, 0.2), (0.5, -0.5)))
    assert np.array_equal(e, np.eye(4))
    assert np.array_equal(einv, np.eye(4))


def test_sphere_frame_columns():
    th = math.pi / 4
    bp = BundlePoint((th, 0.0), (0.0, 1.0))
    e, einv = adapted_frame_at(SPHERE, bp)
    # H_theta = d_theta - Gamma^k_{theta j} y^j d_{y^k}; with y = (0, 1) the
    # only contribution is -Gamma^phi_{theta phi} = -cot(theta) = -1
    assert e[:, 0] == pytest.approx([1.0, 0.0, 0.0, -1.0], abs=1e-12)
    # H_phi picks up -Gamma^theta_{phi phi} y^phi and -Gamma^phi_{phi theta} y^theta
    assert e[:, 1] == pytest.approx(
        [0.0, 1.0, math.sin(th) * math.cos(th), 0.0], abs=1e-12)
    assert np.array_equal(e[:, 2], [0.0, 0.0, 1.0, 0.0])
    assert np.max(np.abs(e @ einv - np.eye(4))) <= 1e-12


def test_frame_block_structure():
    for spec in ALL:
        for bp in bundle_points(spec, 2, 2):
            e, einv = adapted_frame_at(spec, bp)
            n = spec.n
            assert np.array_equal(e[:n, :n], np.eye(n))
            assert np.array_equal(e[:n, n:], np.zeros((n, n)))
            assert np.array_equal(e[n:, n:], np.eye(n))
            # dual coframe rows: V*^i = Gamma^i_jk y^k dx^j + dy^i
            gamma = fields.jet_values(fields.connection_jets(spec, bp.x, 0))
            vstar = np.einsum("ijk,k->ij", gamma, np.asarray(bp.y))
            assert einv[n:, :n] == pytest.approx(vstar, abs=1e-14)


def test_euclidean_reproduces_standard_matrices():
    want = standard_born_matrices(2)
    for bp in bundle_points(EUCLID, 3, 3):
        bf = born_at(EUCLID, bp, "bundle-coordinate")
        for name in ("I", "J", "K", "h", "k", "omega"):
            got = getattr(bf, name if name != "omega" else "omega")
            assert np.max(np.abs(got - want[name])) <= 1e-12


def test_adapted_frame_gives_constant_blocks_everywhere():
    want = standard_born_matrices(2)
    for spec in ALL:
        bp = bundle_points(spec, 1, 1)[0]
        bf = born_at(spec, bp, "adapted")
        for name in ("I", "J", "K"):
            assert np.array_equal(getattr(bf, name), want[name])
        g = fields.jet_values(fields.metric_jets(spec, bp.x, 0))
        assert np.array_equal(bf.h[:2, :2], g)
        assert np.array_equal(bf.h[2:, 2:], g)
        assert np.array_equal(bf.k[:2, 2:], g)
        assert np.array_equal(bf.omega[2:, :2], -g)


def test_sphere_coordinate_frame_differs_but_conjugates():
    bp = BundlePoint((math.pi / 4, 0.0), (0.0, 1.0))
    bf_ad = born_at(SPHERE, bp, "adapted")
    bf_co = born_at(SPHERE, bp, "bundle-coordinate")
    assert np.max(np.abs(bf_co.I - bf_ad.I)) > 0.1
    e, einv = adapted_frame_at(SPHERE, bp)
    assert np.max(np.abs(e @ bf_ad.I @ einv - bf_co.I)) <= 1e-12


@pytest.mark.parametrize("spec", ALL, ids=lambda s: s.name)
def test_frame_conversion_consistency(spec):
    # conjugating / pulling back the adapted tensors reproduces the
    # bundle-coordinate ones for 20 bundle points per spec
    for bp in bundle_points(spec, 4, 5):
        bf_ad = born_at(spec, bp, "adapted")
        bf_co = born_at(spec, bp, "bundle-coordinate")
        e, einv = adapted_frame_at(spec, bp)
        for name, mixed in (("I", True), ("J", True), ("K", True),
                            ("h", False), ("k", False), ("omega", False)):
            ad = getattr(bf_ad, name)
            co = getattr(bf_co, name)
            want = e @ ad @ einv if mixed else einv.T @ ad @ einv
            assert np.max(np.abs(co - want)) <= 1e-12


@pytest.mark.parametrize("spec", ALL, ids=lambda s: s.name)
def test_born_identities_hold_for_every_pair(spec):
    for bp in bundle_points(spec, 4, 5):
        rep = born_compatibility_residuals(born_at(spec, bp))
        assert rep.max_residual() <= 1e-10, rep.residuals
        assert rep.k_signature == (spec.n, spec.n)


def test_euclidean_residuals_tiny():
    bp = BundlePoint((0.3, -0.4), (0.9, 0.1))
    rep = born_compatibility_residuals(born_at(EUCLID, bp))
    assert rep.max_residual() <= 1e-12


def test_structural_symmetries_exact():
    for bp in bundle_points(SPHERE, 3, 3):
        bf = born_at(SPHERE, bp)
        assert np.array_equal(bf.omega, -bf.omega.T)
        assert np.array_equal(bf.h, bf.h.T)
        assert np.array_equal(bf.k, bf.k.T)


def test_affine_chart_form_euclidean():
    res = affine_chart_form_check(EUCLID, BundlePoint((0.2, 0.1), (0.4, 0.6)))
    assert max(res.values()) == 0.0


def test_affine_chart_form_skew_metric():
    bp = BundlePoint((0.5, -0.3), (0.7, 0.2))
    res = affine_chart_form_check(SKEW, bp)
    assert res["I"] == res["J"] == res["K"] == 0.0
    assert max(res.values()) <= 1e-14
    # the blocks themselves carry the metric at the base point
    bf = born_at(SKEW, bp)
    g = np.diag([1.0, math.exp(0.5)])
    assert bf.h[:2, :2] == pytest.approx(g, abs=1e-12)
    assert bf.omega[:2, 2:] == pytest.approx(g, abs=1e-12)


def test_affine_chart_form_potential_metric():
    res = affine_chart_form_check(HESSIAN, BundlePoint((0.1, 0.2), (0.3, 0.4)))
    assert res["I"] == res["J"] == res["K"] == 0.0


def test_affine_chart_form_rejects_nonzero_connection():
    with pytest.raises(SpecError):
        affine_chart_form_check(SPHERE, BundlePoint((1.0, 1.0), (0.1, 0.2)))
    with pytest.raises(SpecError):
        affine_chart_form_check(PULLBACK, BundlePoint((0.0, 0.0), (0.1, 0.2)))


def test_dimension_mismatch_rejected():
    with pytest.raises(SpecError):
        born_at(EUCLID, BundlePoint((0.0, 0.0, 0.0), (0.0, 0.0, 0.0)))
    with pytest.raises(SpecError):
        BundlePoint((0.0, 0.0), (0.0,))


def test_base_point_outside_box_rejected():
    with pytest.raises(SpecError):
        born_at(EUCLID, BundlePoint((5.0, 0.0), (0.0, 0.0)))
