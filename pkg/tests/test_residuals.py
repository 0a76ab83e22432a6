import numpy as np
import sympy as sp

from affinesym.jets import immersion_from_exprs
from affinesym.residuals import structure_residuals

u, v = sp.symbols("u v", real=True)


def test_catalog_spheres_satisfy_integrability(spheres):
    for name, sphere in spheres.items():
        rep = structure_residuals(sphere.spec, 10, seed=5)
        assert rep.passes(1e-6), (name, rep.as_dict())


def test_family_satisfies_integrability(families):
    spec, _ = families["case1_titeica"]
    rep = structure_residuals(spec, 10, seed=5)
    assert rep.passes(1e-6), rep.as_dict()
    assert rep.n_points == 10 and not rep.failures


def test_gradient_corruption_trips_codazzi(families):
    # a spatially varying rescale of S has a nonzero covariant antisymmetry
    spec, _ = families["case1_ellipsoid"]
    rep = structure_residuals(
        spec, 5, seed=1, s_transform=lambda x, S: (1.0 + 0.01 * x[0]) * S
    )
    assert rep.codazzi_S > 1e-3
    assert rep.gauss_nabla > 1e-3


def test_constant_scaling_trips_gauss_not_codazzi(families):
    # Codazzi is linear in S, so a constant factor cannot break it; the
    # Gauss equations compare S against curvature and do react
    spec, _ = families["case1_ellipsoid"]
    rep = structure_residuals(spec, 5, seed=1, s_transform=lambda x, S: 1.01 * S)
    assert rep.gauss_nabla > 1e-3
    assert rep.codazzi_S < 1e-6


def test_flat_graph_degenerates_everywhere():
    flat = immersion_from_exprs("flat", [u, v, u], [u, v], [(-1, 1)] * 2)
    rep = structure_residuals(flat, 6, seed=0)
    assert len(rep.failures) == 6
    assert not rep.definiteness
    assert not rep.passes()
    assert all("DegenerateSurface" in msg for _, msg in rep.failures)
