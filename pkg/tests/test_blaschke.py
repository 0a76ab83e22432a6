import numpy as np
import pytest
import sympy as sp

from affinesym.blaschke import (
    PointGeometry,
    affine_metric,
    apolarity_residual,
    blaschke_point,
    difference_tensor,
    shape_operator,
)
from affinesym.errors import DegenerateSurface, IndefiniteMetric
from affinesym.jets import affine_image, immersion_from_exprs, jet_eval

u, v = sp.symbols("u v", real=True)


def test_paraboloid_package(spheres):
    spec = spheres["paraboloid"].spec
    data = blaschke_point(spec, (0.0, 0.0))
    assert np.allclose(data.h, np.eye(2), atol=1e-14)
    assert np.allclose(data.xi, [0, 0, 1], atol=1e-14)
    assert np.max(np.abs(data.S)) < 1e-14
    assert abs(data.J) < 1e-14


def test_paraboloid_normal_constant_over_chart(spheres):
    spec = spheres["paraboloid"].spec
    for p in spec.grid_points((5, 5)):
        data = blaschke_point(spec, p)
        assert np.max(np.abs(data.xi - np.array([0, 0, 1]))) < 1e-10


def test_unit_sphere_round_metric_and_normal(spheres):
    spec = spheres["ellipsoid"].spec  # default params = unit sphere
    p = (1.1, 0.7)
    jet = jet_eval(spec, p, 4)
    data = blaschke_point(spec, p)
    su = np.sin(p[0])
    assert np.allclose(data.h, np.diag([1.0, su ** 2]), atol=1e-12)
    assert np.allclose(data.xi, -jet.partial((0, 0)), atol=1e-12)
    assert np.allclose(data.S, np.eye(2), atol=1e-12)
    K, J = difference_tensor(jet)
    assert np.max(np.abs(K)) < 1e-12 and abs(J) < 1e-12


def test_transversal_independence_titeica(spheres):
    # the affine metric must not depend on the provisional transversal
    spec = spheres["titeica"].spec
    for p in spec.sample_points(5, seed=2):
        jet = jet_eval(spec, p, 4)
        h_default, aux = affine_metric(jet)
        w = np.linalg.eigvalsh(h_default)
        assert w.min() > 0  # positive definite on the sheet
        N = aux["transversal"]
        T1 = jet.d(0)
        T2 = jet.d(1)
        for tau in (N + 0.3 * T1 - 0.2 * T2, 2.5 * N + T2, np.array([0.1, -0.3, 1.0])):
            h_alt, _ = affine_metric(jet, transversal=tau)
            assert np.max(np.abs(h_alt - h_default)) < 1e-9


def test_titeica_pick_invariant_constant(spheres):
    spec = spheres["titeica"].spec
    js = [blaschke_point(spec, p).J for p in spec.sample_points(8, seed=4)]
    assert min(js) > 1e-3
    assert max(js) - min(js) < 1e-8


def test_volume_weingarten_apolarity_bounds(spheres):
    for name in ("ellipsoid", "titeica", "ma_wedge", "hyperboloid_sheet"):
        spec = spheres[name].spec
        for p in spec.sample_points(5, seed=9):
            data = blaschke_point(spec, p)
            assert data.apolarity_residual < 1e-8
            assert data.volume_residual < 1e-8
            assert data.weingarten_residual < 1e-8
            # lowered cubic form is totally symmetric
            C = np.einsum("kl,kij->ijl", data.h, data.K)
            for perm in ((0, 2, 1), (1, 0, 2), (2, 1, 0)):
                assert np.max(np.abs(C - np.transpose(C, perm))) < 1e-8


def test_apolarity_detector_reports_injected_trace():
    # calibrate the detector: a tensor with trace_h K_X = 0.1 must report 0.1
    K = np.zeros((2, 2, 2))
    K[0, 0, 0] = 0.1  # trace K_{d_0} = 0.1
    assert apolarity_residual(K) == pytest.approx(0.1)


def test_degenerate_and_indefinite_errors():
    flat = immersion_from_exprs("flat", [u, v, u], [u, v], [(-1, 1)] * 2)
    with pytest.raises(DegenerateSurface):
        blaschke_point(flat, (0.1, 0.2))
    saddle = immersion_from_exprs("saddle", [u, v, u * v], [u, v], [(-1, 1)] * 2)
    with pytest.raises(IndefiniteMetric):
        blaschke_point(saddle, (0.1, 0.2))


def test_equiaffine_invariance_of_metric_and_normal(spheres):
    # h is invariant, xi transforms by the linear part, under unimodular maps
    spec = spheres["titeica"].spec
    pts = spec.sample_points(3, seed=1)
    base = [blaschke_point(spec, p) for p in pts]
    rng = np.random.default_rng(20)
    for _ in range(20):
        A = np.eye(3) + 0.3 * rng.standard_normal((3, 3))
        det = np.linalg.det(A)
        if abs(det) < 0.3:
            continue
        A /= np.sign(det) * abs(det) ** (1.0 / 3.0)
        b = 0.5 * rng.standard_normal(3)
        moved = affine_image(spec, A, b)
        for p, ref in zip(pts, base):
            data = blaschke_point(moved, p)
            assert np.max(np.abs(data.h - ref.h)) < 1e-8
            assert np.max(np.abs(data.xi - A @ ref.xi)) < 1e-8
            assert np.max(np.abs(data.S - ref.S)) < 1e-8


def test_shape_operator_of_hyperboloid_is_minus_identity(spheres):
    spec = spheres["hyperboloid_sheet"].spec
    for p in spec.sample_points(4, seed=3):
        S = shape_operator(jet_eval(spec, p, 4))
        assert np.allclose(S, -np.eye(2), atol=1e-11)


def test_unit_3_sphere_quadric_baseline(sphere3):
    p = (1.2, 1.0, 0.4)
    jet = jet_eval(sphere3, p, 4)
    data = blaschke_point(sphere3, p)
    assert np.allclose(data.S, np.eye(3), atol=1e-10)
    assert np.max(np.abs(data.K)) < 1e-10
    assert np.allclose(data.xi, -jet.partial((0, 0, 0)), atol=1e-10)
