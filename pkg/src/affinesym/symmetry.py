"""Pointwise symmetry classification of 3-dimensional hypersurfaces.

At a point with positive definite affine metric, the difference tensor K and
shape operator S of a hypersurface with pointwise SO(2) or Z3 symmetry take
a canonical form in an adapted h-orthonormal frame {e1, e2, e3}:

    K_e1 = diag(2 mu1, -mu1, -mu1)
    K_e2 = [[0, -mu1, 0], [-mu1, mu2, 0], [0, 0, -mu2]]
    K_e3 = [[0, 0, -mu1], [0, 0, -mu2], [-mu1, -mu2, 0]]
    S    = diag(lambda, a, a)

mu2 = 0 exactly for the SO(2) case (any rotation of the e2e3-plane preserves
the form); mu2 != 0 leaves a Z3 of rotations by 2 pi/3.

The frame is found in three steps: e1 is the isolated eigendirection of the
Ricci operator of the Levi-Civita connection of h (computed algebraically
from S and K), with the shape operator as fallback when the Ricci gap
closes; e1's sign makes mu1 >= 0; the residual rotation of the e2e3-plane
is pinned by the cubic coefficients (nu1, nu2) of the complement through
theta = atan2(nu2, nu1) / 3.

The connection coefficient eta is not a pointwise algebraic invariant: it
needs the derivative of the frame field over a patch, which is obtained by
finite differences of the (gauge-aligned) canonical frame.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .blaschke import PointGeometry
from .eig3 import sym_eig
from .errors import AmbiguousAxis, FrameNotDifferentiable, GeometryError
from .jets import jet_eval

AXIS_GAP_RTOL = 1e-7       # relative eigenvalue gap needed to isolate an axis
CLASSIFY_RTOL = 1e-6       # mu1 / mu2 thresholds, relative to invariant scale
QUADRIC_RTOL = 1e-8        # ||C||_h below this times (1 + |S|) means K = 0
FRAME_STEP = 1e-4          # chart step for frame-field finite differences
FRAME_JUMP_LIMIT = 0.25    # aligned neighbour frames may not differ by more


class SymmetryGroup(str, Enum):
    SO2 = "SO2"
    Z3 = "Z3"
    NOT_APPLICABLE = "NotApplicable"


class FamilyCase(str, Enum):
    CASE1 = "Case1"
    CASE2 = "Case2"
    CASE3 = "Case3"


@dataclass(frozen=True)
class CanonicalFrame:
    """Adapted h-orthonormal frame at a point (chart components as columns)."""

    e1: np.ndarray
    e2: np.ndarray
    e3: np.ndarray
    theta: float
    nu1: float
    nu2: float
    # orthonormal-basis bookkeeping used by the frame-field differentiation
    on_matrix: np.ndarray        # columns = frame vectors in ON components
    chart_matrix: np.ndarray     # columns = frame vectors in chart components


@dataclass(frozen=True)
class SymmetryReport:
    group: SymmetryGroup
    reason: str | None
    mu1: float | None = None
    mu2: float | None = None
    lam: float | None = None
    a: float | None = None
    eta: float | None = None
    nu: float | None = None
    J: float | None = None
    frame: CanonicalFrame | None = None
    canonical_residual: float | None = None
    point: tuple[float, ...] | None = None


@dataclass(frozen=True)
class ConnectionScalars:
    """Levi-Civita coefficients of h in the canonical frame on a patch.

    gamma[i, j, k] is the e_k-component of the covariant derivative of e_j
    in the direction e_i (all indices 0-based, frame order e1, e2, e3);
    eta = gamma[1, 0, 1] = gamma[2, 0, 2] for genuinely symmetric surfaces.
    """

    gamma: np.ndarray
    eta: float
    frame: CanonicalFrame


# ---------------------------------------------------------------------------
# canonical templates


def canonical_difference_tensor(mu1: float, mu2: float) -> np.ndarray:
    """K[k, i, j] of the canonical form, in an orthonormal frame."""
    C = np.zeros((3, 3, 3))

    def put(i, j, k, val):
        for perm in {(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)}:
            C[perm] = val

    put(0, 0, 0, 2 * mu1)
    put(0, 1, 1, -mu1)
    put(0, 2, 2, -mu1)
    put(1, 1, 1, mu2)
    put(1, 2, 2, -mu2)
    return C  # lowered == mixed in an ON frame


def canonical_shape_operator(lam: float, a: float) -> np.ndarray:
    return np.diag([lam, a, a])


def ricci_hat(S_on: np.ndarray, K_on: np.ndarray, h: np.ndarray | None = None) -> np.ndarray:
    """Ricci tensor of the Levi-Civita connection of h, algebraically.

    Inputs must be expressed in an h-orthonormal basis (pass h only as a
    sanity check).  The curvature is assembled from the Gauss equation for
    the metric connection,

        Rhat(X,Y)Z = 1/2 (h(Y,Z)SX - h(X,Z)SY + h(SY,Z)X - h(SX,Z)Y)
                     - [K_X, K_Y] Z,

    and traced: Ric(X,Y) = trace { Z -> Rhat(Z,X)Y }.
    """
    S = np.asarray(S_on, dtype=float)
    K = np.asarray(K_on, dtype=float)
    n = S.shape[0]
    if h is not None and np.max(np.abs(np.asarray(h) - np.eye(n))) > 1e-9:
        raise ValueError("ricci_hat expects tensors in an h-orthonormal basis")
    eye = np.eye(n)
    rhat = 0.5 * (
        np.einsum("bc,da->dabc", eye, S)
        - np.einsum("ac,db->dabc", eye, S)
        + np.einsum("bc,da->dabc", S, eye)
        - np.einsum("ac,db->dabc", S, eye)
    )
    rhat -= np.einsum("dae,ebc->dabc", K, K) - np.einsum("dbe,eac->dabc", K, K)
    ric = np.einsum("aabc->bc", rhat)
    return 0.5 * (ric + ric.T)


def ricci_hat_closed_form(mu1: float, mu2: float, a: float, lam: float) -> np.ndarray:
    """Diagonal Ricci entries of the canonical form (independent oracle)."""
    r11 = (a + lam) + 6 * mu1 ** 2
    r22 = 1.5 * a + 0.5 * lam + 2 * (mu1 ** 2 + mu2 ** 2)
    return np.diag([r11, r22, r22])


# ---------------------------------------------------------------------------
# canonical frame construction


def _isolated_axis(matrix: np.ndarray) -> np.ndarray | None:
    """Eigendirection of the isolated eigenvalue, or None if no clear gap."""
    w, V = sym_eig(matrix)
    scale = max(np.max(np.abs(w)), 1e-300)
    gaps = [min(abs(w[i] - w[j]) for j in range(3) if j != i) for i in range(3)]
    best = int(np.argmax(gaps))
    if gaps[best] <= AXIS_GAP_RTOL * scale:
        return None
    # with one isolated and two nearly-equal eigenvalues the isolated one has
    # the strictly largest minimal gap; `best` picks it
    return V[:, best]


def canonical_frame(h: np.ndarray, S: np.ndarray, K: np.ndarray) -> CanonicalFrame:
    """Adapted frame from pointwise (h, S, K) in arbitrary chart components.

    S is the mixed (1,1) shape operator S[j, i], K the (1,2) tensor
    K[k, i, j].  Raises AmbiguousAxis when neither the Ricci operator nor S
    isolates a 1-dimensional eigendirection.
    """
    h = np.asarray(h, dtype=float)
    n = h.shape[0]
    if n != 3:
        raise GeometryError("canonical frame requires a 3-dimensional point")
    w, V = sym_eig(h)
    E = V @ np.diag(1.0 / np.sqrt(w)) @ V.T       # ON basis columns in chart
    Einv = V @ np.diag(np.sqrt(w)) @ V.T
    S_on = Einv @ np.asarray(S, dtype=float) @ E
    S_on = 0.5 * (S_on + S_on.T)
    K_on = np.einsum("ck,kij,ia,jb->cab", Einv, np.asarray(K, dtype=float), E, E)
    C_on = _symmetrize3(np.einsum("cab->abc", K_on))

    ric = ricci_hat(S_on, K_on)
    axis = _isolated_axis(ric)
    if axis is None:
        axis = _isolated_axis(S_on)
    if axis is None:
        raise AmbiguousAxis(
            "Ricci operator and shape operator are both isotropic on the complement"
        )
    e1 = axis
    c111 = float(np.einsum("abc,a,b,c->", C_on, e1, e1, e1))
    if c111 < 0:
        e1 = -e1

    # deterministic complement: first coordinate axis not aligned with e1
    for a in range(3):
        f = np.zeros(3)
        f[a] = 1.0
        if abs(f @ e1) < 0.9:
            break
    u2 = f - (f @ e1) * e1
    u2 /= np.linalg.norm(u2)
    u3 = np.cross(e1, u2)

    nu1 = float(np.einsum("abc,a,b,c->", C_on, u2, u2, u2))
    nu2 = float(np.einsum("abc,a,b,c->", C_on, u2, u2, u3))
    theta = np.arctan2(nu2, nu1) / 3.0
    e2 = np.cos(theta) * u2 + np.sin(theta) * u3
    e3 = -np.sin(theta) * u2 + np.cos(theta) * u3

    on = np.stack([e1, e2, e3], axis=1)
    chart = E @ on
    return CanonicalFrame(
        e1=chart[:, 0],
        e2=chart[:, 1],
        e3=chart[:, 2],
        theta=float(theta),
        nu1=nu1,
        nu2=nu2,
        on_matrix=on,
        chart_matrix=chart,
    )


def _symmetrize3(C: np.ndarray) -> np.ndarray:
    out = np.zeros_like(C)
    for perm in itertools.permutations((0, 1, 2)):
        out += np.transpose(C, perm)
    return out / 6.0


@dataclass(frozen=True)
class FrameScalars:
    mu1: float
    mu2: float
    lam: float
    a: float
    canonical_residual: float


def frame_scalars(h: np.ndarray, S: np.ndarray, K: np.ndarray, frame: CanonicalFrame) -> FrameScalars:
    """Structure scalars and the deviation from the canonical template."""
    h = np.asarray(h, dtype=float)
    Fr = frame.chart_matrix
    Fri = np.linalg.inv(Fr)
    S_fr = Fri @ np.asarray(S, dtype=float) @ Fr
    C = np.einsum("kl,kij->ijl", h, np.asarray(K, dtype=float))
    C_fr = np.einsum("ijk,ia,jb,kc->abc", C, Fr, Fr, Fr)
    mu1 = 0.5 * float(C_fr[0, 0, 0])
    mu2 = float(C_fr[1, 1, 1])
    lam = float(S_fr[0, 0])
    a = 0.5 * float(S_fr[1, 1] + S_fr[2, 2])
    resid = max(
        float(np.max(np.abs(C_fr - canonical_difference_tensor(mu1, mu2)))),
        float(np.max(np.abs(S_fr - canonical_shape_operator(lam, a)))),
    )
    return FrameScalars(mu1=mu1, mu2=mu2, lam=lam, a=a, canonical_residual=resid)


# ---------------------------------------------------------------------------
# frame field over a patch, connection scalars


def _frame_bundle(spec, point) -> tuple[PointGeometry, CanonicalFrame, FrameScalars]:
    geom = PointGeometry(jet_eval(spec, point, 4))
    fr = canonical_frame(geom.h, geom.S, geom.K)
    sc = frame_scalars(geom.h, geom.S, geom.K, fr)
    return geom, fr, sc


def _align_frame(
    frame: CanonicalFrame,
    ref: CanonicalFrame,
    h_ref: np.ndarray,
    so2: bool,
) -> np.ndarray:
    """Chart-component frame matrix of `frame`, gauge-aligned to `ref`.

    The e1 sign is fixed by the mu1 > 0 convention already; the residual
    e2e3 gauge is a rotation: one of the three Z3 branches, or (SO(2) case)
    the Procrustes-optimal angle against the reference.
    """
    M = frame.chart_matrix.copy()
    ref_M = ref.chart_matrix
    gram = M.T @ h_ref @ ref_M  # gram[a, b] = <e_a, e_b^ref>_h
    if gram[0, 0] < 0.7:
        raise FrameNotDifferentiable(
            f"axis field jumps between neighbouring samples (overlap {gram[0, 0]:.3f})"
        )
    if so2:
        phi = np.arctan2(gram[2, 1] - gram[1, 2], gram[1, 1] + gram[2, 2])
    else:
        candidates = [0.0, 2 * np.pi / 3, -2 * np.pi / 3]
        scores = []
        for c in candidates:
            cc, ss = np.cos(c), np.sin(c)
            e2r = cc * M[:, 1] + ss * M[:, 2]
            e3r = -ss * M[:, 1] + cc * M[:, 2]
            scores.append(
                e2r @ h_ref @ ref_M[:, 1] + e3r @ h_ref @ ref_M[:, 2]
            )
        phi = candidates[int(np.argmax(scores))]
        if max(scores) < 1.4:
            raise FrameNotDifferentiable(
                "no Z3 branch aligns the complement frame with its neighbour"
            )
    cc, ss = np.cos(phi), np.sin(phi)
    e2 = cc * M[:, 1] + ss * M[:, 2]
    e3 = -ss * M[:, 1] + cc * M[:, 2]
    out = np.stack([M[:, 0], e2, e3], axis=1)
    if np.max(np.abs(out - ref_M)) > FRAME_JUMP_LIMIT * max(1.0, np.max(np.abs(ref_M))):
        raise FrameNotDifferentiable("frame field jump exceeds the gauge freedom")
    return out


def connection_scalars(spec, point, step: float = FRAME_STEP) -> ConnectionScalars:
    """Christoffel table of h in the canonical frame at a patch point.

    The frame field is differentiated by central differences (one Richardson
    level) with neighbours gauge-aligned to the centre frame; the chart
    Christoffels entering the covariant derivative are exact.
    """
    point = np.asarray(point, dtype=float)
    geom, fr, sc = _frame_bundle(spec, point)
    scale = float(np.sqrt(sc.mu1 ** 2 + sc.mu2 ** 2 + max(geom.J, 0.0)))
    so2 = abs(sc.mu2) <= CLASSIFY_RTOL * max(scale, 1e-300)
    h = geom.h

    def aligned(x):
        _, f2, _ = _frame_bundle(spec, x)
        return _align_frame(f2, fr, h, so2)

    n = 3
    dframe = np.empty((n, 3, 3))  # [direction, ambient-chart comp, frame index]
    for d in range(n):
        e = np.zeros(n)
        e[d] = 1.0
        coarse = (aligned(point + step * e) - aligned(point - step * e)) / (2 * step)
        fine = (aligned(point + 0.5 * step * e) - aligned(point - 0.5 * step * e)) / step
        dframe[d] = (4.0 * fine - coarse) / 3.0

    Fr = fr.chart_matrix
    # nabla_{e_i} e_j = e_i^d ( d_d Fr[:, j] + GammaHat[:, d, c] Fr[c, j] )
    cov = np.einsum("di,dbj->bij", Fr, dframe) + np.einsum(
        "di,bdc,cj->bij", Fr, geom.gamma_hat, Fr
    )
    gamma = np.einsum("bij,bc,ck->ijk", cov, h, Fr)
    gamma = 0.5 * (gamma - np.transpose(gamma, (0, 2, 1)))  # metric connection
    eta = float(gamma[1, 0, 1])
    return ConnectionScalars(gamma=gamma, eta=eta, frame=fr)


# ---------------------------------------------------------------------------
# classification


def nu_case(a: float, eta: float, mu1: float) -> FamilyCase:
    """Trichotomy by nu = a + eta^2 - mu1^2 and the mu1 = eta degeneracy."""
    tol = 1e-6 * (1.0 + abs(a) + eta ** 2 + mu1 ** 2)
    nu = a + eta ** 2 - mu1 ** 2
    if abs(nu) > tol:
        return FamilyCase.CASE1
    if abs(mu1 - eta) > tol:
        return FamilyCase.CASE2
    return FamilyCase.CASE3


def classify_point(
    spec,
    point,
    compute_eta: bool = True,
    frame_step: float = FRAME_STEP,
) -> SymmetryReport:
    """Full pipeline: jets -> Blaschke data -> canonical frame -> group label.

    Degenerate, indefinite, quadric (K = 0) and axis-ambiguous points come
    back as NotApplicable with the reason; eta (and hence nu) are reported
    only when a patch computation is requested and succeeds.
    """
    point = tuple(float(p) for p in np.atleast_1d(point))
    if spec.domain_dim != 3:
        raise GeometryError("classification applies to 3-dimensional immersions")
    try:
        geom = PointGeometry(jet_eval(spec, point, 4))
    except GeometryError as exc:
        return SymmetryReport(
            group=SymmetryGroup.NOT_APPLICABLE, reason=f"{type(exc).__name__}: {exc}",
            point=point,
        )
    kscale = float(np.sqrt(max(geom.J, 0.0)))
    s_scale = float(np.max(np.abs(geom.S)))
    if kscale <= QUADRIC_RTOL * (1.0 + s_scale):
        return SymmetryReport(
            group=SymmetryGroup.NOT_APPLICABLE,
            reason="mu1 = 0 (difference tensor vanishes: quadric point)",
            J=geom.J,
            point=point,
        )
    try:
        frame = canonical_frame(geom.h, geom.S, geom.K)
    except AmbiguousAxis as exc:
        return SymmetryReport(
            group=SymmetryGroup.NOT_APPLICABLE, reason=f"AmbiguousAxis: {exc}",
            J=geom.J, point=point,
        )
    sc = frame_scalars(geom.h, geom.S, geom.K, frame)
    scale = float(np.sqrt(sc.mu1 ** 2 + sc.mu2 ** 2 + max(geom.J, 0.0)))
    if abs(sc.mu1) <= CLASSIFY_RTOL * scale:
        return SymmetryReport(
            group=SymmetryGroup.NOT_APPLICABLE,
            reason="mu1 = 0 (no canonical axis with the required cubic coefficient)",
            mu1=sc.mu1, mu2=sc.mu2, lam=sc.lam, a=sc.a, J=geom.J, frame=frame,
            canonical_residual=sc.canonical_residual, point=point,
        )
    group = (
        SymmetryGroup.SO2 if abs(sc.mu2) <= CLASSIFY_RTOL * scale else SymmetryGroup.Z3
    )
    eta = nu = None
    if compute_eta:
        try:
            cs = connection_scalars(spec, point, step=frame_step)
        except GeometryError as exc:
            return SymmetryReport(
                group=SymmetryGroup.NOT_APPLICABLE,
                reason=f"{type(exc).__name__} during eta extraction: {exc}",
                mu1=sc.mu1, mu2=sc.mu2, lam=sc.lam, a=sc.a, J=geom.J, frame=frame,
                canonical_residual=sc.canonical_residual, point=point,
            )
        eta = cs.eta
        nu = sc.a + eta ** 2 - sc.mu1 ** 2
    return SymmetryReport(
        group=group,
        reason=None,
        mu1=sc.mu1,
        mu2=sc.mu2,
        lam=sc.lam,
        a=sc.a,
        eta=eta,
        nu=nu,
        J=geom.J,
        frame=frame,
        canonical_residual=sc.canonical_residual,
        point=point,
    )
