"""Integrability equations evaluated as numerical residuals.

For a genuine nondegenerate immersion the fundamental equations hold
identically; evaluating them pointwise therefore measures the numerical
quality of the whole jet pipeline (and, run over corrupted inputs, acts as a
detector).  All residuals are max-norms of the defect tensor expressed in an
h-orthonormal basis, so they are comparable across surfaces and scales.

Evaluated equations:

* Gauss for the induced connection:   R(X,Y)Z = h(Y,Z)SX - h(X,Z)SY
* Codazzi for S:                      (nabla_X S)Y = (nabla_Y S)X
* Codazzi for K (hat-covariant form)
* Gauss for the Levi-Civita connection of h
* apolarity:                          trace K_X = 0

Curvature tensors and the covariant derivative of K are exact (order-4
jets); only the derivative of S needs one finite-difference layer, since S
itself consumes the full order-4 jet.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .blaschke import PointGeometry
from .errors import GeometryError
from .jets import ImmersionSpec, jet_eval

S_FD_STEP = 1e-5  # step of the single finite-difference layer for dS

# residual bands: below the success threshold the equation counts as
# satisfied, above the hard threshold it has failed, in between the value is
# flagged as a warning (still a verification failure for exit-code purposes)
SUCCESS_TOL = 1e-6
HARD_TOL = 1e-4

_RESIDUAL_FIELDS = ("gauss_nabla", "codazzi_S", "codazzi_K", "gauss_hat", "apolarity")


@dataclass
class ResidualReport:
    """Max-norm residuals over all sampled points (h-orthonormal components)."""

    gauss_nabla: float = 0.0
    codazzi_S: float = 0.0
    codazzi_K: float = 0.0
    gauss_hat: float = 0.0
    apolarity: float = 0.0
    definiteness: bool = True
    n_points: int = 0
    failures: list = field(default_factory=list)  # (point, error string)

    @property
    def max_residual(self) -> float:
        return max(getattr(self, name) for name in _RESIDUAL_FIELDS)

    def passes(self, tol: float = SUCCESS_TOL) -> bool:
        return self.definiteness and not self.failures and self.max_residual <= tol

    def bands(self, success: float = SUCCESS_TOL, hard: float = HARD_TOL) -> dict:
        """Per-equation verdict: pass / warn / fail."""

        def band(value: float) -> str:
            if value <= success:
                return "pass"
            return "warn" if value <= hard else "fail"

        return {name: band(getattr(self, name)) for name in _RESIDUAL_FIELDS}

    def as_dict(self) -> dict:
        out = {name: getattr(self, name) for name in _RESIDUAL_FIELDS}
        out.update({
            "bands": self.bands(),
            "definiteness": self.definiteness,
            "n_points": self.n_points,
            "failures": [
                {"point": list(p), "error": msg} for p, msg in self.failures
            ],
        })
        return out


def _on_transforms(geom: PointGeometry):
    E, Einv = geom.on_basis()
    return E, Einv


def _shape_with_transform(spec, point, s_transform):
    geom = PointGeometry(jet_eval(spec, point, 4))
    S = geom.S
    if s_transform is not None:
        S = s_transform(np.asarray(point, float), S)
    return S


def point_residuals(
    spec: ImmersionSpec,
    point: Sequence[float],
    s_transform: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None,
    fd_step: float = S_FD_STEP,
) -> dict:
    """Residuals of all integrability equations at one chart point.

    s_transform, when given, replaces the shape operator field by
    s_transform(x, S(x)) everywhere (centre and finite-difference
    neighbours); the calibration tests use it to verify the detectors react.
    """
    x = np.asarray(point, dtype=float)
    geom = PointGeometry(jet_eval(spec, x, 4))
    n = geom.n
    E, Einv = _on_transforms(geom)

    S = geom.S if s_transform is None else s_transform(x, geom.S)
    h = geom.h
    K = geom.K

    # finite-difference derivative of the S field (Richardson over central)
    dS = np.empty((n, n, n))
    for d in range(n):
        e = np.zeros(n)
        e[d] = 1.0
        coarse = (
            _shape_with_transform(spec, x + fd_step * e, s_transform)
            - _shape_with_transform(spec, x - fd_step * e, s_transform)
        ) / (2 * fd_step)
        fine = (
            _shape_with_transform(spec, x + 0.5 * fd_step * e, s_transform)
            - _shape_with_transform(spec, x - 0.5 * fd_step * e, s_transform)
        ) / fd_step
        dS[d] = (4.0 * fine - coarse) / 3.0

    def to_on_13(T):  # T[l, i, j, k] -> ON components
        return np.einsum("cl,lijk,ia,jb,kd->cabd", Einv, T, E, E, E)

    def to_on_12(T):  # T[k, i, j]
        return np.einsum("ck,kij,ia,jb->cab", Einv, T, E, E)

    S_on = Einv @ S @ E
    eye = np.eye(n)

    # Gauss for the induced connection
    R = geom.R_nabla
    rhs = np.einsum("jk,li->lijk", h, S) - np.einsum("ik,lj->lijk", h, S)
    gauss_nabla = float(np.max(np.abs(to_on_13(R - rhs))))

    # Codazzi for S: (nabla_i S)_j - (nabla_j S)_i, chart components
    gn = geom.gamma_nabla
    covS = (
        np.einsum("ikj->kij", dS)
        + np.einsum("kim,mj->kij", gn, S)
        - np.einsum("mij,km->kij", gn, S)
    )
    codS = covS - np.transpose(covS, (0, 2, 1))
    codazzi_S = float(np.max(np.abs(to_on_12(codS))))

    # Codazzi for K with respect to the Levi-Civita connection of h
    gh = geom.gamma_hat
    covK = (
        np.einsum("iljk->lijk", geom.dK)  # d_i K^l_{jk}
        + np.einsum("lim,mjk->lijk", gh, K)
        - np.einsum("mij,lmk->lijk", gh, K)
        - np.einsum("mik,ljm->lijk", gh, K)
    )
    codK = covK - np.transpose(covK, (0, 2, 1, 3))
    Sh = np.einsum("mj,km->kj", S, h)  # Sh[k, j] = h(S d_j, d_k)
    rhsK = 0.5 * (
        np.einsum("jk,li->lijk", h, S)
        - np.einsum("ik,lj->lijk", h, S)
        - np.einsum("kj,li->lijk", Sh, eye)
        + np.einsum("ki,lj->lijk", Sh, eye)
    )
    codazzi_K = float(np.max(np.abs(to_on_13(codK - rhsK))))

    # Gauss for the Levi-Civita connection of h
    Rhat = geom.R_hat
    KK = np.einsum("lim,mjk->lijk", K, K) - np.einsum("ljm,mik->lijk", K, K)
    rhs_hat = (
        0.5
        * (
            np.einsum("jk,li->lijk", h, S)
            - np.einsum("ik,lj->lijk", h, S)
            + np.einsum("kj,li->lijk", Sh, eye)
            - np.einsum("ki,lj->lijk", Sh, eye)
        )
        - KK
    )
    gauss_hat = float(np.max(np.abs(to_on_13(Rhat - rhs_hat))))

    # apolarity in the orthonormal basis
    K_on = to_on_12(K)
    apolarity = float(np.max(np.abs(np.einsum("cac->a", K_on))))

    return {
        "gauss_nabla": gauss_nabla,
        "codazzi_S": codazzi_S,
        "codazzi_K": codazzi_K,
        "gauss_hat": gauss_hat,
        "apolarity": apolarity,
    }


def structure_residuals(
    spec: ImmersionSpec,
    points: Sequence[Sequence[float]] | int = 25,
    seed: int = 0,
    s_transform=None,
    fd_step: float = S_FD_STEP,
) -> ResidualReport:
    """Max residuals over sample points; per-point failures are recorded.

    `points` may be an explicit array of chart points or a count of seeded
    random samples.
    """
    if isinstance(points, int):
        pts = spec.sample_points(points, seed=seed)
    else:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
    report = ResidualReport(n_points=len(pts))
    for p in pts:
        try:
            r = point_residuals(spec, p, s_transform=s_transform, fd_step=fd_step)
        except GeometryError as exc:
            report.failures.append((tuple(float(c) for c in p), f"{type(exc).__name__}: {exc}"))
            if type(exc).__name__ in ("DegenerateSurface", "IndefiniteMetric"):
                report.definiteness = False
            continue
        report.gauss_nabla = max(report.gauss_nabla, r["gauss_nabla"])
        report.codazzi_S = max(report.codazzi_S, r["codazzi_S"])
        report.codazzi_K = max(report.codazzi_K, r["codazzi_K"])
        report.gauss_hat = max(report.gauss_hat, r["gauss_hat"])
        report.apolarity = max(report.apolarity, r["apolarity"])
    return report
