"""Symmetric eigendecomposition and positive-semidefinite transforms.

The eigensolver is a cyclic Jacobi iteration: unconditionally stable on
symmetric input and easy to make fully deterministic.  Columns are sorted
by descending eigenvalue and sign-fixed (largest-magnitude component of
each eigenvector non-negative), so repeated runs agree exactly.  The
two-sided square root Q diag(sqrt(L)) Q^T is additionally invariant to
any residual eigenvector sign ambiguity, which keeps correlated sampling
stable under refactoring of the solver.

Internals are float64 throughout, and everything is forward-only: no
gradients flow through any decomposition.
"""

import math
from dataclasses import dataclass

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - exercised only without numba
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(f):
            return f

        return wrap

EPS64 = float(np.finfo(np.float64).eps)
RANK_TOL_FLOOR = 1e-12
MAX_SWEEPS = 100


@dataclass(frozen=True)
class SymEig:
    """Eigendecomposition of a symmetric matrix.

    eigenvalues: descending, clamped to >= 0 (tiny negative roundoff is
    zeroed); eigenvectors: orthonormal columns aligned with eigenvalues;
    rank_tol: threshold below which an eigenvalue counts as zero.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    rank_tol: float


@njit(cache=True)
def _jacobi(a, vt, tol, max_sweeps):
    """Row-cyclic Jacobi on symmetric a (mutated to diagonal); vt accumulates
    rotations as *rows* (the eigenvector matrix transposed, for contiguous
    access).  Returns sweeps used, or -1 if the off-diagonal Frobenius norm
    did not fall below tol.

    Rotations whose pivot is too small to ever lift the off-diagonal norm
    above tol are skipped: if every |a[p,q]| <= tol / (2n) the norm is at
    most tol/2, so skipping them cannot stall convergence.
    """
    n = a.shape[0]
    skip_tol = tol / (2.0 * n)
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for i in range(n - 1):
            for j in range(i + 1, n):
                off += a[i, j] * a[i, j]
        if math.sqrt(2.0 * off) <= tol:
            return sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= skip_tol:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                theta = (aqq - app) / (2.0 * apq)
                if abs(theta) > 1e150:  # theta^2 would overflow
                    t = 0.5 / theta
                else:
                    t = 1.0 / (abs(theta) + math.sqrt(1.0 + theta * theta))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                tau = s / (1.0 + c)
                # Rotate rows p and q in place (contiguous; the identity
                # a_new = c*a_p - s*a_q is written in the tau form for
                # accuracy).  The 2x2 pivot block is fixed up after.
                for k in range(n):
                    akp = a[p, k]
                    akq = a[q, k]
                    a[p, k] = akp - s * (akq + tau * akp)
                    a[q, k] = akq + s * (akp - tau * akq)
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                # Mirror the rotated rows back into columns p and q.
                for k in range(n):
                    if k != p and k != q:
                        a[k, p] = a[p, k]
                        a[k, q] = a[q, k]
                for k in range(n):
                    vkp = vt[p, k]
                    vkq = vt[q, k]
                    vt[p, k] = vkp - s * (vkq + tau * vkp)
                    vt[q, k] = vkq + s * (vkp - tau * vkq)
    return -1


def sym_eig(m, psd=False):
    """Full eigendecomposition of a symmetric matrix.

    The input must be symmetric within 1e-9 relative Frobenius norm; it is
    symmetrized as (A + A^T)/2 before iterating.  Convergence means the
    off-diagonal Frobenius norm is below 1e-12 * (1 + ||m||_F); failure to
    get there within 100 sweeps raises LinAlgError.

    Eigenvalues come back sorted descending with roundoff negatives in
    [-rank_tol, 0) clamped to zero, where
    rank_tol = max(C * eps64 * max|eigenvalue|, 1e-12).  With psd=True an
    eigenvalue below -rank_tol raises LinAlgError; with psd=False it is
    clamped as well (callers treating near-PSD products, e.g. matrix
    sandwiches, want the projection rather than an error).
    """
    a = np.asarray(m, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise ValueError("matrix contains non-finite values")
    fro = float(np.linalg.norm(a))
    asym = float(np.linalg.norm(a - a.T))
    if asym > 1e-9 * max(fro, RANK_TOL_FLOOR):
        raise np.linalg.LinAlgError(
            f"matrix is not symmetric (||A - A^T|| = {asym:.3e}, ||A|| = {fro:.3e})"
        )
    n = a.shape[0]
    work = np.ascontiguousarray((a + a.T) / 2.0)
    vt = np.eye(n)
    tol = 1e-12 * (1.0 + float(np.linalg.norm(work)))
    sweeps = _jacobi(work, vt, tol, MAX_SWEEPS)
    if sweeps < 0:
        raise np.linalg.LinAlgError(
            f"eigendecomposition did not converge within {MAX_SWEEPS} sweeps"
        )
    vals = np.diagonal(work).copy()
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    vecs = vt.T[:, order]
    rank_tol = max(n * EPS64 * float(np.abs(vals).max()), RANK_TOL_FLOOR)
    if psd and vals[-1] < -rank_tol:
        raise np.linalg.LinAlgError(
            f"matrix is not positive semidefinite "
            f"(eigenvalue {vals[-1]:.3e} < -rank_tol {rank_tol:.3e})"
        )
    vals = np.maximum(vals, 0.0)
    idx = np.argmax(np.abs(vecs), axis=0)
    signs = np.where(vecs[idx, np.arange(n)] < 0.0, -1.0, 1.0)
    vecs = np.ascontiguousarray(vecs * signs)
    vals.setflags(write=False)
    vecs.setflags(write=False)
    return SymEig(eigenvalues=vals, eigenvectors=vecs, rank_tol=rank_tol)


def _two_sided(vecs, diag):
    """Q diag(d) Q^T, symmetrized bitwise."""
    p = (vecs * diag) @ vecs.T
    return (p + p.T) / 2.0


def psd_sqrt(eig):
    """Two-sided PSD square root P = Q diag(sqrt(L)) Q^T; P P^T = Q L Q^T.

    Invariant to eigenvector sign flips: flipping any column of Q leaves P
    unchanged, so downstream noise shaping never depends on solver sign
    conventions.
    """
    if eig.eigenvalues[-1] < 0.0:  # cannot happen after sym_eig clamping
        raise ValueError("psd_sqrt needs non-negative eigenvalues")
    return _two_sided(eig.eigenvectors, np.sqrt(eig.eigenvalues))


def pseudo_inverse(eig):
    """Moore-Penrose inverse Q diag(1/L restricted to L > rank_tol) Q^T."""
    vals = eig.eigenvalues
    inv = np.where(vals > eig.rank_tol, np.divide(1.0, np.maximum(vals, eig.rank_tol)), 0.0)
    return _two_sided(eig.eigenvectors, inv)


def pseudo_det_log(eig):
    """(log pseudo-determinant, rank): sum of log eigenvalues above rank_tol.

    Rank 0 returns (0.0, 0) -- the empty product.
    """
    vals = eig.eigenvalues
    mask = vals > eig.rank_tol
    k = int(mask.sum())
    if k == 0:
        return 0.0, 0
    return float(np.log(vals[mask]).sum()), k


def numerical_rank(eig):
    """Count of eigenvalues strictly above rank_tol."""
    return int((eig.eigenvalues > eig.rank_tol).sum())
