"""Shared fixtures: catalog spheres and the standard built families.

Building a family lambdifies the full jet table of a 4-component immersion,
which costs a noticeable fraction of a second, so the standard six are
session-scoped.
"""

from __future__ import annotations

import pytest

from affinesym.catalog import CurveSpec, sphere_catalog, surface3_catalog
from affinesym.families import build_family

# the six standard family configurations used across tests and acceptance;
# Case1 curves must not lie on a conic through the symmetry axis (a conic
# profile kills the mu1 part of the cubic form), and mu1 must stay away from
# zero across the whole chart so the axis field never degenerates
STANDARD_FAMILIES = {
    "case1_ellipsoid": ("Case1", ("t", "log(t)", (1.3, 2.8)), "ellipsoid", {}),
    "case1_titeica": ("Case1", ("t", "log(t)", (0.3, 0.9)), "titeica", {}),
    "case2_ma_wedge": ("Case2", ("t", "t**3", (0.5, 1.5)), "ma_wedge", {}),
    "case3_ma_wedge": ("Case3", ("t", "t**3", (0.5, 1.5)), "ma_wedge", {}),
    "case2_paraboloid": ("Case2", ("t", "t**3", (0.5, 1.5)), "paraboloid", {}),
    "case3_paraboloid": ("Case3", ("t", "t**3", (0.5, 1.5)), "paraboloid", {}),
}


def make_family(name: str):
    case, (g1, g2, t_range), sphere_name, params = STANDARD_FAMILIES[name]
    sphere = sphere_catalog(sphere_name, params)
    curve = CurveSpec.from_strings(g1, g2, t_range)
    return build_family(case, curve, sphere)


@pytest.fixture(scope="session")
def families():
    """name -> (ImmersionSpec, FamilySpec) for the six standard families."""
    return {name: make_family(name) for name in STANDARD_FAMILIES}


@pytest.fixture(scope="session")
def spheres():
    return {name: sphere_catalog(name) for name in
            ("ellipsoid", "hyperboloid_sheet", "titeica", "paraboloid", "ma_wedge")}


@pytest.fixture(scope="session")
def sphere3():
    return surface3_catalog("sphere3")
