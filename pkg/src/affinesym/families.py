"""Builders for the three classified warped-product families.

Each family composes a profile curve gamma = (gamma1, gamma2) with a
2-dimensional affine sphere:

    Case1:  F(t,u,v) = (gamma1(t), gamma2(t) * phi(u,v)),   phi proper
    Case2:  F(t,u,v) = (g1 u, g1 v, g1 f(u,v) + g2, g1),    psi improper graph
    Case3:  F(t,u,v) = (u, v, f(u,v) + gamma2(t), gamma1(t))

Admissibility is the nonvanishing of the case's product on t_range
(sampled; the conditions are smooth scalar inequalities):

    Case1:  gamma2 gamma1 gamma1' W,   W = gamma2'' gamma1' - gamma1'' gamma2'
    Case2:  gamma1 gamma1' W
    Case3:  gamma1' W

Definiteness of the composed immersion reduces to a sign.  Writing the
fundamental form of the 3-fold block-diagonally gives

    Case1:  G = diag(g2^2 W D,  g1' g2^3 B)      (D, B: sphere data)
    Case2:  G = diag(-W g1^2,  -g1' g1^3 Hess f)
    Case3:  G = diag(-W,       -g1' Hess f)

so with a proper sphere normalised to S = +-Id and centered at the origin
the exact Case1 test is sign(g1' g2^3 W) = -1 (elliptic) / +1 (hyperbolic);
it coincides with the classical product test gamma1 gamma1' W < 0 (> 0)
whenever gamma1 gamma2 > 0.  For Case2/Case3 over a positive definite
improper sphere the tests are gamma1 gamma1' W > 0 and gamma1' W > 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import sympy as sp

from .catalog import _T, _U, _V, AffineSphereSpec, CurveSpec
from .errors import InadmissibleCurve, KindMismatch
from .jets import ImmersionSpec, immersion_from_exprs
from .symmetry import FamilyCase, SymmetryGroup, classify_point, nu_case

ADMISSIBLE_SAMPLES = 256
_ADMISSIBLE_FLOOR = 1e-9


@dataclass(frozen=True)
class FamilySpec:
    case: FamilyCase
    curve: CurveSpec
    sphere: AffineSphereSpec
    admissible: bool
    definite: bool
    wronskian_sign: int
    product_min: float
    product_max: float

    def as_dict(self) -> dict:
        return {
            "case": self.case.value,
            "curve": {
                "gamma1": str(self.curve.gamma1),
                "gamma2": str(self.curve.gamma2),
                "t_range": list(self.curve.t_range),
            },
            "sphere": {"name": self.sphere.name, "kind": self.sphere.kind,
                       "quadric": self.sphere.quadric, "params": self.sphere.params},
            "admissible": self.admissible,
            "definite": self.definite,
            "wronskian_sign": self.wronskian_sign,
            "product_min": self.product_min,
            "product_max": self.product_max,
        }


def admissibility_products(case: FamilyCase, curve: CurveSpec, ts: np.ndarray) -> np.ndarray:
    """The case's nondegeneracy product at the given curve parameters."""
    g1, g2 = curve.values(ts, 0)
    g1d, g2d = curve.values(ts, 1)
    W = curve.wronskian_values(ts)
    if case == FamilyCase.CASE1:
        return g2 * g1 * g1d * W
    if case == FamilyCase.CASE2:
        return g1 * g1d * W
    return g1d * W


def _definiteness(case: FamilyCase, curve: CurveSpec, sphere: AffineSphereSpec,
                  ts: np.ndarray) -> bool:
    g1, g2 = curve.values(ts, 0)
    g1d, _ = curve.values(ts, 1)
    W = curve.wronskian_values(ts)
    if case == FamilyCase.CASE1:
        prod = g1d * g2 ** 3 * W
        want = -1.0 if sphere.kind == "elliptic_proper" else 1.0
        return bool(np.all(np.sign(prod) == want))
    # improper catalog spheres are positive definite graphs
    if case == FamilyCase.CASE2:
        return bool(np.all(g1 * g1d * W > 0))
    return bool(np.all(g1d * W > 0))


def build_family(
    case: FamilyCase | str,
    curve: CurveSpec,
    sphere: AffineSphereSpec,
) -> tuple[ImmersionSpec, FamilySpec]:
    """Compose the 3-dimensional immersion and evaluate its admissibility.

    Raises KindMismatch for the wrong sphere kind and InadmissibleCurve when
    the nondegeneracy product vanishes somewhere on t_range (the offending t
    is attached to the exception).
    """
    case = FamilyCase(case)
    if case == FamilyCase.CASE1 and not sphere.is_proper:
        raise KindMismatch("Case1 requires a proper (elliptic or hyperbolic) sphere")
    if case != FamilyCase.CASE1 and sphere.kind != "improper":
        raise KindMismatch(f"{case.value} requires an improper sphere with normal (0,0,1)")

    ts = np.concatenate([curve.samples(ADMISSIBLE_SAMPLES), np.array(curve.t_range)])
    prods = admissibility_products(case, curve, ts)
    scale = max(1.0, float(np.max(np.abs(prods))))
    bad = np.abs(prods) <= _ADMISSIBLE_FLOOR * scale
    if bad.any():
        t_bad = float(ts[np.argmax(bad)])
        raise InadmissibleCurve(
            f"{case.value} nondegeneracy product vanishes near t = {t_bad:.6g}",
            t=t_bad,
        )
    definite = _definiteness(case, curve, sphere, ts)
    wsign = int(np.sign(curve.wronskian_values(ts)).sum() > 0) * 2 - 1

    g1, g2 = curve.gamma1, curve.gamma2
    if case == FamilyCase.CASE1:
        exprs = (g1,) + tuple(g2 * c for c in sphere.exprs)
    elif case == FamilyCase.CASE2:
        f = sphere.graph_height
        exprs = (g1 * _U, g1 * _V, g1 * f + g2, g1)
    else:
        f = sphere.graph_height
        exprs = (_U, _V, f + g2, g1)
    box = (curve.t_range,) + sphere.spec.chart_box
    name = f"{case.value.lower()}:{sphere.name}"
    spec = immersion_from_exprs(
        name, exprs, [_T, _U, _V], box,
        meta={
            "family": case.value,
            "sphere": sphere.name,
            "sphere_quadric": sphere.quadric,
            "gamma1": str(g1),
            "gamma2": str(g2),
        },
    )
    family = FamilySpec(
        case=case,
        curve=curve,
        sphere=sphere,
        admissible=True,
        definite=definite,
        wronskian_sign=wsign,
        product_min=float(np.min(np.abs(prods))),
        product_max=float(np.max(np.abs(prods))),
    )
    return spec, family


@dataclass
class RoundTripReport:
    """Per-sample classification of a built family against its construction."""

    expected_group: SymmetryGroup
    case: FamilyCase
    n_samples: int = 0
    group_counts: dict = field(default_factory=dict)
    case_matches: int = 0
    mismatches: list = field(default_factory=list)  # (point, got_group, got_case)

    @property
    def all_groups_match(self) -> bool:
        return self.group_counts.get(self.expected_group.value, 0) == self.n_samples

    @property
    def all_cases_match(self) -> bool:
        return self.case_matches == self.n_samples

    @property
    def ok(self) -> bool:
        return self.all_groups_match and self.all_cases_match

    def as_dict(self) -> dict:
        return {
            "expected_group": self.expected_group.value,
            "case": self.case.value,
            "n_samples": self.n_samples,
            "group_counts": dict(self.group_counts),
            "case_matches": self.case_matches,
            "ok": self.ok,
            "mismatches": [
                {"point": list(p), "group": g, "case": c} for p, g, c in self.mismatches
            ],
        }


def roundtrip_verify(
    spec: ImmersionSpec,
    family: FamilySpec,
    n_samples: int = 125,
    seed: int = 0,
) -> RoundTripReport:
    """Classify seeded samples of a built family and compare to construction.

    A quadric sphere must come back SO(2) at every point, a non-quadric one
    Z3; nu_case must reproduce the constructing case.  Mismatches are
    reported, not raised.
    """
    expected = SymmetryGroup.SO2 if family.sphere.quadric else SymmetryGroup.Z3
    report = RoundTripReport(expected_group=expected, case=family.case,
                             n_samples=n_samples)
    pts = spec.sample_points(n_samples, seed=seed)
    for p in pts:
        rep = classify_point(spec, p, compute_eta=True)
        gname = rep.group.value
        report.group_counts[gname] = report.group_counts.get(gname, 0) + 1
        got_case = None
        if rep.eta is not None and rep.mu1 is not None and rep.a is not None:
            got_case = nu_case(rep.a, rep.eta, rep.mu1)
            if got_case == family.case:
                report.case_matches += 1
        if rep.group != expected or got_case != family.case:
            report.mismatches.append(
                (tuple(float(c) for c in p), gname, got_case.value if got_case else None)
            )
    return report
