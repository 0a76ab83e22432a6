import numpy as np
import pytest
import sympy as sp

from affinesym.errors import OrderUnsupported, PointOutsideChart
from affinesym.jets import (
    affine_image,
    fd_partial,
    immersion_from_exprs,
    jet_eval,
    multi_indices,
)

u, v = sp.symbols("u v", real=True)


@pytest.fixture(scope="module")
def paraboloid():
    return immersion_from_exprs(
        "paraboloid", [u, v, (u ** 2 + v ** 2) / 2], [u, v], [(-1.2, 1.2)] * 2
    )


def test_multi_index_counts():
    assert len(multi_indices(2, 4)) == 15
    assert len(multi_indices(3, 4)) == 35


def test_paraboloid_jet_values(paraboloid):
    jet = jet_eval(paraboloid, (0.0, 0.0), order=2)
    assert np.allclose(jet.partial((0, 0)), [0, 0, 0])
    assert np.allclose(jet.d(0), [1, 0, 0])
    assert np.allclose(jet.d(1), [0, 1, 0])
    assert np.allclose(jet.d(0, 0), [0, 0, 1])
    assert np.allclose(jet.d(0, 1), [0, 0, 0])
    assert np.allclose(jet.d(1, 1), [0, 0, 1])


def test_mixed_partials_single_storage(paraboloid):
    jet = jet_eval(paraboloid, (0.3, -0.1), order=3)
    assert jet.d(0, 1) is jet.d(1, 0)
    assert jet.d(0, 0, 1) is jet.d(1, 0, 0)


def test_order_contract(paraboloid):
    with pytest.raises(OrderUnsupported):
        jet_eval(paraboloid, (0.0, 0.0), order=5)
    jet = jet_eval(paraboloid, (0.0, 0.0), order=2)
    with pytest.raises(OrderUnsupported):
        jet.d(0, 0, 1)


def test_point_outside_chart(paraboloid):
    with pytest.raises(PointOutsideChart):
        jet_eval(paraboloid, (2.0, 0.0))


@pytest.mark.parametrize(
    "name", ["ellipsoid", "hyperboloid_sheet", "titeica", "paraboloid", "ma_wedge"]
)
def test_fd_matches_analytic_on_catalog(name, spheres):
    spec = spheres[name].spec
    pts = spec.sample_points(10, seed=11)
    for p in pts:
        exact = jet_eval(spec, p, order=4)
        for alpha in multi_indices(2, 4):
            approx = fd_partial(spec.value_fn, p, alpha)
            assert np.max(np.abs(approx - exact.partial(alpha))) < 1e-6, (name, alpha)


def test_fd_convergence_order():
    # truncation-dominated steps: one Richardson level gives ~h^4, so
    # halving the step should shrink the error by nearly 16 (>= 12 asserted)
    exprs = [sp.sin(u) * sp.cos(v), sp.exp(u / 2 + v / 3), u ** 3 * v]
    spec = immersion_from_exprs("smooth", exprs, [u, v], [(-3, 3)] * 2)
    x = np.array([0.37, -0.21])
    for alpha, h in [((2, 0), 0.2), ((1, 1), 0.2), ((2, 1), 0.2), ((2, 2), 0.25)]:
        exact = jet_eval(spec, x, 4).partial(alpha)
        err = lambda step: np.max(np.abs(fd_partial(spec.value_fn, x, alpha, step=step) - exact))
        ratio = err(h) / err(h / 2)
        assert ratio >= 12.0, (alpha, ratio)


def test_affine_image_transforms_jets(spheres):
    spec = spheres["titeica"].spec
    rng = np.random.default_rng(5)
    A = np.eye(3) + 0.2 * rng.standard_normal((3, 3))
    b = rng.standard_normal(3)
    moved = affine_image(spec, A, b)
    p = (0.2, -0.4)
    j0 = jet_eval(spec, p, 3)
    j1 = jet_eval(moved, p, 3)
    assert np.allclose(j1.partial((0, 0)), A @ j0.partial((0, 0)) + b, atol=1e-14)
    assert np.allclose(j1.d(0, 1), A @ j0.d(0, 1), atol=1e-14)
