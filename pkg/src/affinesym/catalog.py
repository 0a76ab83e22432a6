"""Catalog of 2-dimensional affine spheres and profile curves.

Proper spheres are shipped pre-scaled so the shape operator is exactly +Id
(elliptic) or -Id (hyperbolic); improper spheres are graphs (u, v, f(u, v))
with det Hess f = 1, whose affine normal is exactly (0, 0, 1).

The non-quadric entries:

* titeica: the chart (e^u, e^v, e^(-u-v)) of the surface xyz = const, the
  classical non-quadric proper (hyperbolic) affine sphere.  The prefactor
  3^(-1/2) makes S = -Id exactly.
* ma_wedge: the graph of f(u, v) = v^2 / (2 (alpha u + beta))
  + (alpha u + beta)^3 / (6 alpha^2) on the wedge alpha u + beta > 0.
  Direct computation gives det Hess f = 1 identically (the v^2 cross term
  cancels against f_uu), and the Hessian is positive definite on the wedge,
  so this is a convex non-quadric improper affine sphere.

Every constructed sphere self-checks its kind invariants on a 3 x 3 probe
grid (S = +-Id or xi = (0,0,1); Pick invariant zero iff quadric).

Curves are sympy expressions of t, so their derivatives (up to the order
the 3-fold jets need) are exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import sympy as sp

from .blaschke import PointGeometry
from .errors import ParamsOutOfRange, UnknownSurface
from .jets import ImmersionSpec, immersion_from_exprs, jet_eval

_U, _V, _T = sp.symbols("u v t", real=True)

SELF_CHECK_TOL = 1e-8


@dataclass(frozen=True)
class AffineSphereSpec:
    """A catalog 2-dimensional affine sphere with closed-form jets."""

    kind: str                     # elliptic_proper | hyperbolic_proper | improper
    spec: ImmersionSpec
    quadric: bool
    mean_curvature_normalized: bool
    exprs: tuple[sp.Expr, ...]    # sympy immersion, variables (u, v)
    name: str
    params: dict = field(default_factory=dict)

    @property
    def is_proper(self) -> bool:
        return self.kind in ("elliptic_proper", "hyperbolic_proper")

    @property
    def graph_height(self) -> sp.Expr:
        """f(u, v) for improper graph spheres (third component)."""
        if self.kind != "improper":
            raise ValueError("graph form only available for improper spheres")
        return self.exprs[2]


@dataclass(frozen=True)
class CurveSpec:
    """Planar profile curve (gamma1(t), gamma2(t)) with exact derivatives."""

    gamma1: sp.Expr
    gamma2: sp.Expr
    t_range: tuple[float, float]

    @staticmethod
    def from_strings(gamma1: str, gamma2: str, t_range) -> "CurveSpec":
        lo, hi = float(t_range[0]), float(t_range[1])
        if not np.isfinite([lo, hi]).all() or lo >= hi:
            raise ParamsOutOfRange(f"invalid t_range {t_range}")
        return CurveSpec(
            gamma1=sp.sympify(gamma1, locals={"t": _T}),
            gamma2=sp.sympify(gamma2, locals={"t": _T}),
            t_range=(lo, hi),
        )

    def derivative_fns(self, max_order: int = 4):
        fns = []
        for expr in (self.gamma1, self.gamma2):
            ders = [sp.lambdify(_T, sp.diff(expr, _T, k), modules="numpy")
                    for k in range(max_order + 1)]
            fns.append(ders)
        return fns

    def samples(self, count: int = 256) -> np.ndarray:
        lo, hi = self.t_range
        return np.linspace(lo, hi, count)

    def wronskian_values(self, ts: np.ndarray) -> np.ndarray:
        """gamma2'' gamma1' - gamma1'' gamma2' at the given parameters."""
        g1d = sp.lambdify(_T, sp.diff(self.gamma1, _T, 1), modules="numpy")
        g2d = sp.lambdify(_T, sp.diff(self.gamma2, _T, 1), modules="numpy")
        g1dd = sp.lambdify(_T, sp.diff(self.gamma1, _T, 2), modules="numpy")
        g2dd = sp.lambdify(_T, sp.diff(self.gamma2, _T, 2), modules="numpy")
        return np.broadcast_to(g2dd(ts) * g1d(ts) - g1dd(ts) * g2d(ts), ts.shape).astype(float)

    def values(self, ts: np.ndarray, order: int = 0) -> tuple[np.ndarray, np.ndarray]:
        f1 = sp.lambdify(_T, sp.diff(self.gamma1, _T, order), modules="numpy")
        f2 = sp.lambdify(_T, sp.diff(self.gamma2, _T, order), modules="numpy")
        one = np.ones_like(ts)
        return (np.asarray(f1(ts)) * one, np.asarray(f2(ts)) * one)


# ---------------------------------------------------------------------------
# sphere builders


def _ellipsoid(params):
    a = float(params.get("a", 1.0))
    b = float(params.get("b", 1.0))
    c = float(params.get("c", 1.0))
    if min(a, b, c) <= 0:
        raise ParamsOutOfRange("ellipsoid semi-axes must be positive")
    # unimodular image of the unit sphere: affine normal stays -position,
    # so S = +Id without further scaling
    s = (a * b * c) ** (sp.Rational(1, 3))
    exprs = (
        a / s * sp.sin(_U) * sp.cos(_V),
        b / s * sp.sin(_U) * sp.sin(_V),
        c / s * sp.cos(_U),
    )
    box = ((0.4, 2.7), (-2.9, 2.9))
    return exprs, box, "elliptic_proper", True, {"a": a, "b": b, "c": c}


def _hyperboloid_sheet(params):
    # upper sheet of x^2 + y^2 - z^2 = -1; S = -Id exactly
    exprs = (
        sp.sinh(_U) * sp.cos(_V),
        sp.sinh(_U) * sp.sin(_V),
        sp.cosh(_U),
    )
    box = ((0.3, 1.6), (-2.9, 2.9))
    return exprs, box, "hyperbolic_proper", True, {}


def _titeica(params):
    scale = 3 ** sp.Rational(-1, 2)
    exprs = (
        scale * sp.exp(_U),
        scale * sp.exp(_V),
        scale * sp.exp(-_U - _V),
    )
    box = ((-0.9, 0.9), (-0.9, 0.9))
    return exprs, box, "hyperbolic_proper", False, {}


def _paraboloid(params):
    exprs = (_U, _V, (_U ** 2 + _V ** 2) / 2)
    box = ((-1.2, 1.2), (-1.2, 1.2))
    return exprs, box, "improper", True, {}


def _ma_wedge(params):
    alpha = float(params.get("alpha", 1.0))
    beta = float(params.get("beta", 2.0))
    box = ((-0.5, 0.5), (-0.5, 0.5))
    if alpha == 0.0:
        raise ParamsOutOfRange("ma_wedge requires alpha != 0")
    if beta - abs(alpha) * 0.5 <= 0:
        raise ParamsOutOfRange(
            "ma_wedge requires alpha*u + beta > 0 on the chart box |u| <= 0.5"
        )
    w = alpha * _U + beta
    f = _V ** 2 / (2 * w) + w ** 3 / (6 * alpha ** 2)
    exprs = (_U, _V, f)
    return exprs, box, "improper", False, {"alpha": alpha, "beta": beta}


_SPHERES = {
    "ellipsoid": _ellipsoid,
    "hyperboloid_sheet": _hyperboloid_sheet,
    "titeica": _titeica,
    "paraboloid": _paraboloid,
    "ma_wedge": _ma_wedge,
}


def sphere_names() -> list[str]:
    return sorted(_SPHERES)


def _self_check_sphere(sphere: AffineSphereSpec) -> None:
    spec = sphere.spec
    pts = spec.grid_points((3, 3), inset=0.1)
    target = 1.0 if sphere.kind == "elliptic_proper" else -1.0
    for p in pts:
        geom = PointGeometry(jet_eval(spec, p, 4))
        if sphere.is_proper:
            dev = np.max(np.abs(geom.S - target * np.eye(2)))
            if dev > SELF_CHECK_TOL:
                raise GeometryCheckFailure(
                    f"{sphere.name}: S deviates from {target:+.0f} Id by {dev:.2e}"
                )
        else:
            dev = np.max(np.abs(geom.xi - np.array([0.0, 0.0, 1.0])))
            if dev > SELF_CHECK_TOL:
                raise GeometryCheckFailure(
                    f"{sphere.name}: affine normal deviates from (0,0,1) by {dev:.2e}"
                )
        if sphere.quadric and abs(geom.J) > SELF_CHECK_TOL:
            raise GeometryCheckFailure(f"{sphere.name}: quadric but J = {geom.J:.2e}")
        if not sphere.quadric and geom.J < 1e-6:
            raise GeometryCheckFailure(f"{sphere.name}: non-quadric but J = {geom.J:.2e}")


class GeometryCheckFailure(AssertionError):
    """A catalog surface failed its construction-time self check."""


@lru_cache(maxsize=32)
def _sphere_cached(name: str, params_key: tuple) -> AffineSphereSpec:
    builder = _SPHERES.get(name)
    if builder is None:
        raise UnknownSurface(f"unknown sphere {name!r}; have {sphere_names()}")
    params = dict(params_key)
    exprs, box, kind, quadric, norm_params = builder(params)
    spec = immersion_from_exprs(
        f"sphere:{name}", exprs, [_U, _V], box,
        meta={"catalog": name, "kind": kind, "params": norm_params},
    )
    sphere = AffineSphereSpec(
        kind=kind,
        spec=spec,
        quadric=quadric,
        mean_curvature_normalized=kind != "improper",
        exprs=tuple(sp.sympify(e) for e in exprs),
        name=name,
        params=norm_params,
    )
    _self_check_sphere(sphere)
    return sphere


def sphere_catalog(name: str, params: dict | None = None) -> AffineSphereSpec:
    """Catalog lookup; raises UnknownSurface / ParamsOutOfRange."""
    params = params or {}
    return _sphere_cached(name, tuple(sorted(params.items())))


# ---------------------------------------------------------------------------
# 3-dimensional catalog surfaces (directly classifiable)


@lru_cache(maxsize=8)
def _surface3_cached(name: str) -> ImmersionSpec:
    if name == "sphere3":
        exprs = (
            sp.cos(_T),
            sp.sin(_T) * sp.cos(_U),
            sp.sin(_T) * sp.sin(_U) * sp.cos(_V),
            sp.sin(_T) * sp.sin(_U) * sp.sin(_V),
        )
        return immersion_from_exprs(
            "sphere3", exprs, [_T, _U, _V],
            ((0.5, 2.6), (0.5, 2.6), (-2.9, 2.9)),
            meta={"catalog": "sphere3"},
        )
    raise UnknownSurface(f"unknown 3-surface {name!r}; have ['sphere3']")


def surface3_names() -> list[str]:
    return ["sphere3"]


def surface3_catalog(name: str) -> ImmersionSpec:
    return _surface3_cached(name)
