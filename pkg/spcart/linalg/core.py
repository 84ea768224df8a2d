"""Dense linear-algebra primitives shared by every solver.

Sign convention: each right singular vector (or eigenvector) is flipped so
that its largest-magnitude entry is positive, the lowest index winning ties.
The paired left vector is flipped with it, so U diag(s) V^T is unchanged.
"""

from __future__ import annotations

import numpy as np
from scipy import linalg

from spcart.core.errors import ArgumentError, DegeneracyError, InputError
from spcart.models.matrix import CenteredData, InputKind, MatrixInput, PcaBasis, ThinSvd, _frozen

POLAR_MIN_SINGULAR = 1e-12
RANK_RTOL = 1e-10


def _as_matrix(m: np.ndarray, name: str = "matrix") -> np.ndarray:
    a = np.asarray(m, dtype=float)
    if a.ndim != 2:
        raise InputError(f"{name} must be 2-D, got {a.ndim}-D")
    if not np.all(np.isfinite(a)):
        raise InputError(f"{name} contains non-finite entries")
    return a


def _fix_signs(v: np.ndarray, u: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray | None]:
    cols = np.arange(v.shape[1])
    lead = np.argmax(np.abs(v), axis=0)
    signs = np.sign(v[lead, cols])
    signs[signs == 0] = 1.0
    return v * signs, (u * signs if u is not None else None)


def thin_svd(m: np.ndarray, k: int) -> ThinSvd:
    """Rank-k thin SVD with the package sign convention."""
    a = _as_matrix(m)
    kmax = min(a.shape)
    if not 1 <= k <= kmax:
        raise ArgumentError(f"rank {k} out of range for a {a.shape[0]}x{a.shape[1]} matrix",
                            flag="k", domain=f"1..{kmax}")
    u, s, vt = linalg.svd(a, full_matrices=False)
    v, u = _fix_signs(vt[:k].T, u[:, :k])
    return ThinSvd(_frozen(u), _frozen(s[:k]), _frozen(v))


def polar(b: np.ndarray) -> np.ndarray:
    """Orthonormal polar factor W Q^T of B = W D Q^T.

    For square B this is the orthogonal matrix closest to B in Frobenius
    norm, equivalently the maximizer of tr(R^T B).
    """
    a = _as_matrix(b, "polar input")
    if a.shape[0] < a.shape[1]:
        raise ArgumentError(f"polar input must be square or tall, got shape {a.shape}")
    w, d, qt = linalg.svd(a, full_matrices=False)
    if d[-1] <= POLAR_MIN_SINGULAR:
        raise DegeneracyError(f"polar factor undefined: smallest singular value {d[-1]:.3e} "
                              f"<= {POLAR_MIN_SINGULAR:g}")
    return w @ qt


def orthonormal_span(x: np.ndarray) -> np.ndarray:
    """Orthonormal basis of span(X), numerical rank at 1e-10 * sigma_max."""
    a = _as_matrix(x)
    u, s, _ = linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        raise DegeneracyError("cannot span an all-zero matrix")
    rank = int(np.sum(s > RANK_RTOL * s[0]))
    return u[:, :rank]


def center_columns(m: np.ndarray) -> CenteredData:
    """Subtract each variable's (column's) mean."""
    a = _as_matrix(m)
    if a.shape[0] < 2:
        raise ArgumentError(f"centering needs at least 2 samples, got {a.shape[0]}",
                            flag="n", domain=">= 2")
    means = a.mean(axis=0)
    return CenteredData(_frozen(a - means), _frozen(means))


def pca_loadings(inp: MatrixInput, r: int) -> PcaBasis:
    """Leading r PCA loadings: right singular vectors of A or eigenvectors of C."""
    if inp.is_data:
        kmax = min(inp.matrix.shape)
        if not 1 <= r <= kmax:
            raise ArgumentError(f"r={r} exceeds min(n, p)={kmax}", flag="--r", domain=f"1..{kmax}")
        svd = thin_svd(inp.matrix, r)
        return PcaBasis(svd.right_factor, svd.singular_values, InputKind.DATA)

    p = inp.p
    if not 1 <= r <= p:
        raise ArgumentError(f"r={r} exceeds p={p}", flag="--r", domain=f"1..{p}")
    w, vecs = linalg.eigh(inp.matrix)
    w = np.clip(w[::-1][:r], 0.0, None)
    vecs, _ = _fix_signs(vecs[:, ::-1][:, :r])
    return PcaBasis(_frozen(vecs), _frozen(w), InputKind.COVARIANCE)


def random_orthogonal(r: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed r x r orthogonal matrix."""
    q, upper = np.linalg.qr(rng.standard_normal((r, r)))
    signs = np.sign(np.diag(upper))
    signs[signs == 0] = 1.0
    return q * signs
