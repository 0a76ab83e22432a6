"""Deterministic symmetric eigendecomposition for the small matrices used here.

LAPACK (numpy.linalg.eigh) does the factoring; this module pins down the
conventions the rest of the pipeline relies on:

* eigenvalues in descending order,
* orthonormal eigenvectors,
* a deterministic sign (first component above noise level is positive),
* deterministic spanning of repeated eigenspaces (coordinate axes projected
  into the eigenspace and Gram-Schmidt'ed in coordinate order), so results
  do not depend on LAPACK's arbitrary basis choice under degeneracy.
"""

from __future__ import annotations

import numpy as np

_DEGENERACY_RTOL = 1e-9
_SIGN_TOL = 1e-12


def _fix_sign(v: np.ndarray) -> np.ndarray:
    scale = np.max(np.abs(v))
    if scale == 0.0:
        return v
    for c in v:
        if abs(c) > _SIGN_TOL * scale:
            return -v if c < 0 else v
    return v


def _respan_group(vectors: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of the span of `vectors` (columns)."""
    dim, k = vectors.shape
    proj = vectors @ vectors.T  # projector onto the eigenspace
    chosen: list[np.ndarray] = []
    for axis in range(dim):
        if len(chosen) == k:
            break
        cand = proj[:, axis].copy()
        for w in chosen:
            cand -= (w @ cand) * w
        nrm = np.linalg.norm(cand)
        if nrm > 1e-8:
            chosen.append(cand / nrm)
    # fall back to the LAPACK basis if the coordinate sweep ran short
    i = 0
    while len(chosen) < k:
        cand = vectors[:, i].copy()
        for w in chosen:
            cand -= (w @ cand) * w
        nrm = np.linalg.norm(cand)
        if nrm > 1e-10:
            chosen.append(cand / nrm)
        i += 1
    return np.stack(chosen, axis=1)


def sym_eig(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Descending eigenvalues and deterministic orthonormal eigenvectors.

    Works for any small symmetric matrix; the geometry code uses it for the
    2x2 and 3x3 forms h, G, S and the Ricci operator.
    """
    m = np.asarray(m, dtype=float)
    m = 0.5 * (m + m.T)
    w, v = np.linalg.eigh(m)
    order = np.argsort(w)[::-1]
    w = w[order]
    v = v[:, order]
    scale = max(1.0, float(np.max(np.abs(w))))
    # group nearly-equal eigenvalues and re-span each group deterministically
    groups: list[list[int]] = [[0]]
    for i in range(1, len(w)):
        if abs(w[i] - w[groups[-1][0]]) <= _DEGENERACY_RTOL * scale:
            groups[-1].append(i)
        else:
            groups.append([i])
    for g in groups:
        if len(g) > 1:
            v[:, g] = _respan_group(v[:, g])
    for i in range(v.shape[1]):
        v[:, i] = _fix_sign(v[:, i])
    return w, v


def sym_eig3(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """3x3 specialisation of sym_eig (the documented public entry point)."""
    m = np.asarray(m, dtype=float)
    if m.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got {m.shape}")
    return sym_eig(m)
