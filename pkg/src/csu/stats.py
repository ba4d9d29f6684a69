"""Instance-level style statistics and their batch-level distribution.

Per instance and channel, the style statistics are the spatial mean and
standard deviation of the channel plane.  Across a batch these form B x C
matrices whose channel-wise covariance (population form, divisor B) is the
object everything downstream samples from.  Because B is usually far
smaller than C, that covariance is singular by construction, so the
density helpers work on its support: pseudo-inverse quadratic forms and a
pseudo-determinant over the non-zero spectrum.
"""

from dataclasses import dataclass

import numpy as np

from .linalg import numerical_rank, pseudo_det_log

LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass(frozen=True)
class InstanceStats:
    """Per-instance channel statistics of a feature-map batch.

    mu, sigma: (B, C) float64; sigma carries the eps floor, so every entry
    is >= eps > 0.
    """

    mu: np.ndarray
    sigma: np.ndarray
    eps: float


@dataclass(frozen=True)
class StatsCovariance:
    """Channel-wise covariance of a B x C statistics matrix.

    cov is the population covariance (divisor B), symmetrized bitwise as
    (A + A^T)/2; center is the column mean the rows were centered on.
    """

    cov: np.ndarray
    center: np.ndarray
    batch_size: int

    def __post_init__(self):
        cov = np.asarray(self.cov, dtype=np.float64)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
            raise ValueError(f"cov must be square, got shape {cov.shape}")
        if not np.isfinite(cov).all():
            raise ValueError("cov contains non-finite values")
        if np.abs(cov - cov.T).max(initial=0.0) > 1e-12:
            raise ValueError("cov must be symmetric to within 1e-12")
        object.__setattr__(self, "cov", (cov + cov.T) / 2.0)


def instance_stats(fm, eps):
    """Spatial mean and (population) standard deviation per instance/channel.

    The variance divisor is H*W, and eps is added *after* the square root,
    so a constant plane yields sigma exactly equal to eps.  Computation is
    float64 regardless of the input dtype.
    """
    eps = float(eps)
    if eps <= 0.0:
        raise ValueError(f"eps must be positive, got {eps}")
    x = fm.data.astype(np.float64, copy=False)
    mu = x.mean(axis=(2, 3))
    var = ((x - mu[:, :, None, None]) ** 2).mean(axis=(2, 3))
    sigma = np.sqrt(var) + eps
    mu.setflags(write=False)
    sigma.setflags(write=False)
    return InstanceStats(mu=mu, sigma=sigma, eps=eps)


def stats_covariance(stats_matrix):
    """Population covariance of the rows of a B x C statistics matrix.

    cov = (1/B) (X - mean)^T (X - mean).  B = 1 (or identical rows) yields
    the zero matrix; the result is positive semidefinite up to roundoff.
    """
    x = np.asarray(stats_matrix, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError(f"expected a 2-D (B, C) matrix, got shape {x.shape}")
    b = x.shape[0]
    if b < 1:
        raise ValueError("need at least one row")
    center = x.mean(axis=0)
    d = x - center
    cov = d.T @ d / b
    cov = (cov + cov.T) / 2.0
    center.setflags(write=False)
    cov.setflags(write=False)
    return StatsCovariance(cov=cov, center=center, batch_size=b)


def correlation_from_covariance(cov, var_tol=None):
    """Correlation matrix from a StatsCovariance.

    Channels whose variance is at or below var_tol fall back to the
    identity pattern: 1 on the diagonal, 0 elsewhere.  The default
    tolerance is 1e-12 * max(1, largest variance).
    """
    c = cov.cov
    diag = np.diagonal(c).copy()
    if var_tol is None:
        var_tol = 1e-12 * max(1.0, float(diag.max(initial=0.0)))
    ok = diag > var_tol
    scale = np.where(ok, np.sqrt(np.maximum(diag, var_tol)), 1.0)
    corr = c / np.outer(scale, scale)
    corr[~ok, :] = 0.0
    corr[:, ~ok] = 0.0
    corr[np.diag_indices_from(corr)] = np.where(ok, np.diagonal(corr), 1.0)
    return corr


def degenerate_gaussian_logpdf(x, cov, eig):
    """Log-density of a (possibly rank-deficient) Gaussian, plus the squared
    off-support residual.

    The density lives on the support spanned by eigenvectors with
    eigenvalues above rank_tol:

        logpdf = -(k/2) log(2 pi) - (1/2) log pdet - (1/2) (x-c)^T S^+ (x-c)

    with k the rank and pdet the product of the non-zero eigenvalues.  The
    second return value is |(I - P)(x - c)|^2, the squared norm of the
    component of x - c outside the support (0 means x is on the support).
    An empty support (rank 0) is an error.
    """
    vals = eig.eigenvalues
    k = numerical_rank(eig)
    if k == 0:
        raise ValueError("degenerate Gaussian has empty support (rank 0)")
    d = np.asarray(x, dtype=np.float64) - cov.center
    if d.shape != cov.center.shape:
        raise ValueError(
            f"x has shape {np.shape(x)}, expected {cov.center.shape}"
        )
    coords = eig.eigenvectors.T @ d
    mask = vals > eig.rank_tol
    quad = float(np.sum(coords[mask] ** 2 / vals[mask]))
    logdet, _ = pseudo_det_log(eig)
    logpdf = -0.5 * (k * LOG_2PI + logdet + quad)
    residual_sq = float(np.sum(coords[~mask] ** 2))
    return logpdf, residual_sq
