"""Pointwise Blaschke apparatus of a nondegenerate positive definite immersion.

Given the order-4 jet of F at a chart point, everything here is computed in
closed form (no internal finite differences):

* G_ij = det(F_1, ..., F_n, F_ij), the transversal-free second fundamental
  form; its normalisation h = sign * |det G|^(-1/(n+2)) G is the affine
  metric.  First and second derivatives of G (hence of h) come from
  multilinearity of the determinant and jets up to order 4.
* Levi-Civita Christoffels of h and their first derivatives (exact), hence
  the curvature of h.
* The affine normal xi = (1/n) Laplace_h F, its derivative dxi, and from it
  the shape operator S (tangential part of -dxi).
* The induced-connection Christoffels (decomposition of F_ij against the
  tangent frame and xi), their derivatives, the curvature of the induced
  connection, the difference tensor K and its covariant data.

Index layout (chart indices i, j, k, l in 0..n-1):
    h[i, j]                metric
    dh[k, i, j]            d_k h_ij            d2h[l, k, i, j]
    gamma_hat[k, i, j]     Christoffel of h, output index first
    dgamma_hat[l, k, i, j] d_l gamma_hat[k, i, j]
    S[j, i]                shape operator column i: -d_i xi = S[j, i] F_j
    K[k, i, j]             difference tensor, output index first
    R[l, i, j, k]          curvature: R(d_i, d_j) d_k = R[l,i,j,k] d_l
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eig3 import sym_eig
from .errors import (
    DegenerateSurface,
    IndefiniteMetric,
    TangentDecompositionFailure,
)
from .jets import Jet, add_indices, unit_index

_DEGENERATE_RTOL = 1e-10
_COND_LIMIT = 1e12


def _det3(m: np.ndarray) -> float:
    return (
        m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
        - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
        + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0])
    )


def generalized_cross(vectors: list[np.ndarray]) -> np.ndarray:
    """Vector c in R^m with <c, w> = det(v_1, ..., v_{m-1}, w) for all w."""
    m = len(vectors) + 1
    if m == 3:
        return np.cross(vectors[0], vectors[1])
    if m == 4:
        M = np.stack(vectors, axis=1)  # rows = ambient components
        out = np.empty(4)
        for r in range(4):
            rows = [i for i in range(4) if i != r]
            out[r] = ((-1) ** (r + 1)) * _det3(M[rows])
        return out
    raise ValueError(f"ambient dimension {m} not supported")


@dataclass(frozen=True)
class BlaschkeData:
    """Public pointwise package: metric, normal, shape operator, cubic data."""

    point: tuple[float, ...]
    h: np.ndarray          # (n, n) affine metric, chart components
    xi: np.ndarray         # (n+1,) affine normal
    S: np.ndarray          # (n, n) shape operator, S[j, i]
    K: np.ndarray          # (n, n, n) difference tensor K[k, i, j]
    J: float               # Pick invariant
    dxi: np.ndarray        # (n, n+1) d_i xi
    apolarity_residual: float
    volume_residual: float
    weingarten_residual: float


class PointGeometry:
    """Full exact geometry bundle at one point (internal workhorse).

    Built from an order-4 jet; exposes every tensor the residual suite and
    the classifier need.  Pure data, no mutation after construction.
    """

    def __init__(self, jet: Jet):
        n = jet.domain_dim
        m = jet.ambient_dim
        self.jet = jet
        self.n = n
        x = np.asarray(jet.point)

        F1 = [jet.partial(unit_index(n, i)) for i in range(n)]
        self.T = np.stack(F1, axis=1)  # (m, n)
        units = [unit_index(n, i) for i in range(n)]
        D2 = np.empty((n, n, m))
        D3 = np.empty((n, n, n, m))
        D4 = np.empty((n, n, n, n, m))
        for i in range(n):
            for j in range(n):
                D2[i, j] = jet.partial(add_indices(units[i], units[j]))
                for k in range(n):
                    D3[i, j, k] = jet.partial(add_indices(units[i], units[j], units[k]))
                    for l in range(n):
                        D4[i, j, k, l] = jet.partial(
                            add_indices(units[i], units[j], units[k], units[l])
                        )
        self.D2, self.D3, self.D4 = D2, D3, D4

        # cross-product transversal and its derivatives
        N = generalized_cross(F1)
        dN = np.empty((n, m))
        for k in range(n):
            acc = np.zeros(m)
            for a in range(n):
                args = list(F1)
                args[a] = D2[a, k]
                acc += generalized_cross(args)
            dN[k] = acc
        d2N = np.empty((n, n, m))
        for k in range(n):
            for l in range(n):
                acc = np.zeros(m)
                for a in range(n):
                    args = list(F1)
                    args[a] = D3[a, k, l]
                    acc += generalized_cross(args)
                for a in range(n):
                    for b in range(n):
                        if a == b:
                            continue
                        args = list(F1)
                        args[a] = D2[a, k]
                        args[b] = D2[b, l]
                        acc += generalized_cross(args)
                d2N[k, l] = acc
        self.N = N

        # determinant-based second fundamental form and derivatives
        G = np.einsum("a,ija->ij", N, D2)
        dG = np.einsum("ka,ija->kij", dN, D2) + np.einsum("a,ijka->kij", N, D3)
        d2G = (
            np.einsum("kla,ija->klij", d2N, D2)
            + np.einsum("ka,ijla->klij", dN, D3)
            + np.einsum("la,ijka->klij", dN, D3)
            + np.einsum("a,ijkla->klij", N, D4)
        )
        G = 0.5 * (G + G.T)
        self.G = G

        w = np.linalg.eigvalsh(G)
        scale = float(np.max(np.abs(w)))
        if scale == 0.0 or np.min(np.abs(w)) <= _DEGENERATE_RTOL * scale:
            raise DegenerateSurface(
                f"second fundamental form singular at {tuple(x)}", point=tuple(x)
            )
        if w[0] * w[-1] < 0:
            raise IndefiniteMetric(
                f"second fundamental form indefinite at {tuple(x)}", point=tuple(x)
            )
        sign = 1.0 if w[0] > 0 else -1.0
        self.sign = sign

        n_exp = -1.0 / (n + 2)
        Ginv = np.linalg.inv(G)
        detG = np.linalg.det(G)
        p = (sign ** n * detG) ** n_exp
        dL = np.einsum("ji,kij->k", Ginv, dG)  # tr(Ginv dG[k])
        GidG = np.einsum("ia,kaj->kij", Ginv, dG)
        d2L = np.einsum("ji,klij->kl", Ginv, d2G) - np.einsum(
            "kij,lji->kl", GidG, GidG
        )
        dp = n_exp * p * dL
        d2p = p * (n_exp * n_exp * np.outer(dL, dL) + n_exp * d2L)

        h = sign * p * G
        dh = sign * (dp[:, None, None] * G[None] + p * dG)
        d2h = np.empty((n, n, n, n))
        for l in range(n):
            for k in range(n):
                d2h[l, k] = sign * (
                    d2p[l, k] * G + dp[k] * dG[l] + dp[l] * dG[k] + p * d2G[l, k]
                )
        self.h = 0.5 * (h + h.T)
        self.dh = dh
        self.d2h = d2h
        self.det_h = float(np.linalg.det(self.h))
        self.hinv = np.linalg.inv(self.h)
        dhinv = np.empty((n, n, n))
        for k in range(n):
            dhinv[k] = -self.hinv @ dh[k] @ self.hinv
        self.dhinv = dhinv

        # Levi-Civita Christoffels of h and their exact first derivatives
        bracket = np.empty((n, n, n))  # [i, j, l] = d_i h_jl + d_j h_il - d_l h_ij
        for i in range(n):
            for j in range(n):
                for l in range(n):
                    bracket[i, j, l] = dh[i, j, l] + dh[j, i, l] - dh[l, i, j]
        self.gamma_hat = 0.5 * np.einsum("kl,ijl->kij", self.hinv, bracket)
        dbracket = np.empty((n, n, n, n))  # [m, i, j, l]
        for mth in range(n):
            for i in range(n):
                for j in range(n):
                    for l in range(n):
                        dbracket[mth, i, j, l] = (
                            d2h[mth, i, j, l] + d2h[mth, j, i, l] - d2h[mth, l, i, j]
                        )
        self.dgamma_hat = 0.5 * (
            np.einsum("mkl,ijl->mkij", dhinv, bracket)
            + np.einsum("kl,mijl->mkij", self.hinv, dbracket)
        )

        # affine normal and its exact derivative
        tangential = D2 - np.einsum("kij,ak->ija", self.gamma_hat, self.T)
        self.xi = np.einsum("ij,ija->a", self.hinv, tangential) / n
        dxi = np.empty((n, m))
        for l in range(n):
            term = np.einsum("ij,ija->a", dhinv[l], tangential)
            dtang = (
                D3[:, :, l]
                - np.einsum("kij,ak->ija", self.dgamma_hat[l], self.T)
                - np.einsum("kij,ak->ija", self.gamma_hat, D2[:, l].T)
            )
            term += np.einsum("ij,ija->a", self.hinv, dtang)
            dxi[l] = term / n
        self.dxi = dxi

        # decomposition frame [tangents | xi]
        M = np.column_stack([self.T, self.xi])
        cond = np.linalg.cond(M)
        if not np.isfinite(cond) or cond > _COND_LIMIT:
            raise TangentDecompositionFailure(
                f"tangent frame condition number {cond:.2e} at {tuple(x)}"
            )
        Minv = np.linalg.inv(M)
        self.frame_matrix = M

        # shape operator: -d_i xi = S[j, i] F_j (+ residual along xi)
        Y = Minv @ (-dxi.T)  # (m, n), column i
        self.S = Y[:n, :].copy()
        self.weingarten_residual = float(np.max(np.abs(Y[n, :])))

        # induced connection: F_ij = gamma_nabla[k,i,j] F_k + h_ij xi
        rhs = D2.reshape(n * n, m).T
        Z = (Minv @ rhs).reshape(m, n, n)
        self.gamma_nabla = Z[:n].copy()  # [k, i, j]
        self.h_from_decomposition = Z[n]
        dgn = np.empty((n, n, n, n))  # [l, k, i, j]
        for l in range(n):
            dM = np.column_stack(
                [np.stack([D2[i, l] for i in range(n)], axis=1), dxi[l]]
            )
            rhs_l = D3[:, :, l].reshape(n * n, m).T - dM @ Z.reshape(m, n * n)
            dZ = (Minv @ rhs_l).reshape(m, n, n)
            dgn[l] = dZ[:n]
        self.dgamma_nabla = dgn

        # difference tensor and Pick invariant
        self.K = self.gamma_nabla - self.gamma_hat
        self.dK = dgn - self.dgamma_hat
        self.C = np.einsum("kl,lij->ijk", self.h, self.K)  # fully lowered
        Craised = np.einsum(
            "ia,jb,kc,abc->ijk", self.hinv, self.hinv, self.hinv, self.C
        )
        self.J = float(np.einsum("ijk,ijk->", self.C, Craised) / (n * (n - 1)))

        trace_K = np.einsum("kik->i", self.K)
        self.apolarity_residual = float(np.max(np.abs(trace_K)))
        vol = abs(np.linalg.det(M))
        sqrt_det_h = float(np.sqrt(self.det_h))
        self.volume_residual = float(abs(vol - sqrt_det_h) / max(1.0, sqrt_det_h))

    # -- curvature tensors (exact) ------------------------------------------

    def curvature(self, gamma: np.ndarray, dgamma: np.ndarray) -> np.ndarray:
        """R[l, i, j, k] from Christoffels and their exact derivatives."""
        return (
            np.einsum("iljk->lijk", dgamma)
            - np.einsum("jlik->lijk", dgamma)
            + np.einsum("lim,mjk->lijk", gamma, gamma)
            - np.einsum("ljm,mik->lijk", gamma, gamma)
        )

    @property
    def R_nabla(self) -> np.ndarray:
        return self.curvature(self.gamma_nabla, self.dgamma_nabla)

    @property
    def R_hat(self) -> np.ndarray:
        return self.curvature(self.gamma_hat, self.dgamma_hat)

    # -- orthonormalisation ---------------------------------------------------

    def on_basis(self) -> tuple[np.ndarray, np.ndarray]:
        """(E, Einv) with E^T h E = I; E is the symmetric inverse square root."""
        w, V = sym_eig(self.h)
        E = V @ np.diag(1.0 / np.sqrt(w)) @ V.T
        Einv = V @ np.diag(np.sqrt(w)) @ V.T
        return E, Einv

    def data(self) -> BlaschkeData:
        return BlaschkeData(
            point=self.jet.point,
            h=self.h,
            xi=self.xi,
            S=self.S,
            K=self.K,
            J=self.J,
            dxi=self.dxi,
            apolarity_residual=self.apolarity_residual,
            volume_residual=self.volume_residual,
            weingarten_residual=self.weingarten_residual,
        )


# ---------------------------------------------------------------------------
# public operations (spec surface)


def affine_metric(jet: Jet, transversal: np.ndarray | None = None):
    """Affine (Blaschke) metric at the jet's point.

    Default route is the transversal-free determinant form.  Passing an
    explicit provisional transversal exercises the normalisation recipe
    directly: F_ij = gamma F_k + h0_ij tau, theta0 = det(F_1..F_n, tau),
    h = c h0 with c = (theta0^2 / det h0)^(1/(n+2)).  Both routes agree;
    the second exists as an independence oracle.
    """
    if transversal is None:
        geom = PointGeometry(jet)
        return geom.h, {"sign": geom.sign, "transversal": geom.N, "G": geom.G}
    n = jet.domain_dim
    m = jet.ambient_dim
    tau = np.asarray(transversal, dtype=float)
    T = np.stack([jet.partial(unit_index(n, i)) for i in range(n)], axis=1)
    M = np.column_stack([T, tau])
    if abs(np.linalg.det(M)) < 1e-14:
        raise TangentDecompositionFailure("provisional transversal is tangential")
    rhs = np.stack(
        [jet.partial(add_indices(unit_index(n, i), unit_index(n, j))) for i in range(n) for j in range(n)],
        axis=1,
    )
    coeffs = np.linalg.solve(M, rhs)
    h0 = coeffs[n].reshape(n, n)
    h0 = 0.5 * (h0 + h0.T)
    theta0 = np.linalg.det(M)
    w = np.linalg.eigvalsh(h0)
    scale = float(np.max(np.abs(w)))
    if scale == 0.0 or np.min(np.abs(w)) <= _DEGENERATE_RTOL * scale:
        raise DegenerateSurface("second fundamental form singular", point=jet.point)
    if w[0] * w[-1] < 0:
        raise IndefiniteMetric("second fundamental form indefinite", point=jet.point)
    if w[0] < 0:  # flip the transversal so h0 is positive definite
        h0 = -h0
        theta0 = -theta0
    c = (theta0 ** 2 / np.linalg.det(h0)) ** (1.0 / (n + 2))
    return c * h0, {"sign": 1.0 if w[0] > 0 else -1.0, "transversal": tau, "h0": h0}


def blaschke_normal(jet: Jet) -> np.ndarray:
    """Affine normal xi = (1/n) Laplace_h F (the metric is derived from the jet)."""
    return PointGeometry(jet).xi


def shape_operator(jet: Jet) -> np.ndarray:
    """Shape operator S[j, i] from the tangential decomposition of -dxi."""
    return PointGeometry(jet).S


def difference_tensor(jet: Jet) -> tuple[np.ndarray, float]:
    """Difference tensor K[k, i, j] and the Pick invariant J."""
    geom = PointGeometry(jet)
    return geom.K, geom.J


def blaschke_point(spec, point, order: int = 4) -> BlaschkeData:
    """One-shot pointwise package for an immersion spec."""
    from .jets import jet_eval

    return PointGeometry(jet_eval(spec, point, order)).data()


def apolarity_residual(K: np.ndarray) -> float:
    """max_i |trace K_{d_i}| for an arbitrary (1,2)-tensor K[k, i, j]."""
    return float(np.max(np.abs(np.einsum("kik->i", np.asarray(K, dtype=float)))))
