"""Feature-statistics augmentation operators.

All methods share one skeleton: compute per-instance style statistics
(mu, sigma), perturb or remix them into (beta, gamma), then reassemble

    out = gamma * (x - mu) / sigma + beta

so the output carries the new statistics while keeping the normalized
spatial pattern.  They differ only in how (beta, gamma) are produced:

* csu      -- correlated noise: the batch covariance of mu (and of sigma)
              is eigendecomposed, noise is shaped by the two-sided matrix
              square root, and added at a Beta(alpha, alpha) intensity
              shared between the mu and sigma paths.  Perturbations can
              leave the convex hull of the batch statistics but stay on
              the covariance support, preserving cross-channel structure.
* dsu      -- the diagonal ("uncorrelated") counterpart: per-channel
              batch standard deviations scale independent normals.  Same
              reassembly, no cross-channel structure by construction.
* mixstyle -- convex interpolation of (mu, sigma) with a random batch
              permutation at Beta(alpha, alpha) weights; never leaves the
              convex hull of the batch statistics.
* padain   -- swaps whole (mu, sigma) rows by a random batch permutation.
* identity -- passes the input through untouched.

Gate semantics: csu, dsu and mixstyle draw one uniform per call and are
*skipped* when it falls below gate_p (the batch passes through unchanged);
padain inverts this and *applies* its permutation with probability gate_p.
Each call draws its own gate; nothing is cached across calls.

Per-call draw order is fixed and documented per operator so that a seed
pins the entire output bit-for-bit.
"""

from dataclasses import dataclass

import numpy as np

from .featuremap import FeatureMap
from .linalg import psd_sqrt, sym_eig
from .stats import instance_stats, stats_covariance

METHODS = ("csu", "dsu", "mixstyle", "padain", "identity")


@dataclass(frozen=True)
class AugmentConfig:
    """Knobs shared by every augmentation operator.

    alpha is the Beta(alpha, alpha) intensity parameter (methods that
    sample an intensity); gate_p the gate probability; eps the sigma
    floor; seed is carried for drivers that build their own streams --
    library operators always take an explicit RngStream.
    """

    method: str = "csu"
    alpha: float = 0.3
    gate_p: float = 0.5
    eps: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(
                f"unknown method {self.method!r}; expected one of {METHODS}"
            )
        if not self.alpha > 0.0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not 0.0 <= self.gate_p <= 1.0:
            raise ValueError(f"gate_p must be in [0, 1], got {self.gate_p}")
        if not self.eps > 0.0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed}")


@dataclass(frozen=True)
class AugmentedStats:
    """Augmented statistics for one batch.

    beta/gamma are the new per-instance (mu, sigma); lambda_used holds the
    sampled intensities for methods that draw one (zeros when gated or
    when the method has no intensity; ones for dsu, which applies its
    noise at full strength).  gated means the batch passed through
    unchanged.
    """

    beta: np.ndarray
    gamma: np.ndarray
    lambda_used: np.ndarray
    gated: bool


def _passthrough(stats):
    b = stats.mu.shape[0]
    return AugmentedStats(
        beta=stats.mu,
        gamma=stats.sigma,
        lambda_used=np.zeros(b),
        gated=True,
    )


def sample_standard_normal(rng, rows, cols):
    """rows x cols matrix of i.i.d. N(0, 1), row-major fill."""
    return rng.normal(rows * cols).reshape(rows, cols)


def sample_beta(rng, alpha, n):
    """n i.i.d. Beta(alpha, alpha) draws via two Gamma(alpha, 1) streams.

    lambda = G1 / (G1 + G2); the G1 block is drawn first.  A zero
    denominator (possible only through extreme underflow at tiny alpha)
    falls back to 1/2, the distribution mean.
    """
    alpha = float(alpha)
    if alpha <= 0.0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    g1 = rng.gamma(n, alpha)
    g2 = rng.gamma(n, alpha)
    den = g1 + g2
    return np.where(den > 0.0, g1 / np.where(den > 0.0, den, 1.0), 0.5)


def correlated_noise(rng, p_transform, n):
    """n rows of correlated noise: eps @ P for i.i.d. standard-normal eps.

    Rows have covariance P P^T; with same seed and P = identity the output
    is bitwise the raw normals, and matrix rank bounds the noise rank.
    """
    p = np.asarray(p_transform, dtype=np.float64)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise ValueError(f"transform must be square, got shape {p.shape}")
    eps = sample_standard_normal(rng, n, p.shape[0])
    return eps @ p


def csu_stats(stats, cfg, rng):
    """Correlated-noise augmentation of (mu, sigma).

    Draw order: gate uniform; noise for the mu path; noise for the sigma
    path; one Beta(alpha, alpha) intensity per instance, shared by both
    paths.  Noise shaping uses the two-sided square root of each
    statistic's batch covariance, so perturbations stay on the covariance
    support (rank <= min(B, C)).
    """
    if rng.uniform1() < cfg.gate_p:
        return _passthrough(stats)
    mu, sigma = stats.mu, stats.sigma
    b = mu.shape[0]
    p_mu = psd_sqrt(sym_eig(stats_covariance(mu).cov, psd=True))
    p_sigma = psd_sqrt(sym_eig(stats_covariance(sigma).cov, psd=True))
    noise_mu = correlated_noise(rng, p_mu, b)
    noise_sigma = correlated_noise(rng, p_sigma, b)
    lam = sample_beta(rng, cfg.alpha, b)
    beta = mu + lam[:, None] * noise_mu
    gamma = sigma + lam[:, None] * noise_sigma
    return AugmentedStats(beta=beta, gamma=gamma, lambda_used=lam, gated=False)


def dsu_stats(stats, cfg, rng):
    """Diagonal (per-channel, uncorrelated) noise augmentation.

    Draw order: gate uniform; normals for the mu path; normals for the
    sigma path.  Scales are the per-channel batch standard deviations of
    each statistic; there is no intensity draw (lambda_used is all ones),
    and channels are perturbed independently.
    """
    if rng.uniform1() < cfg.gate_p:
        return _passthrough(stats)
    mu, sigma = stats.mu, stats.sigma
    b = mu.shape[0]
    scale_mu = np.sqrt(np.diagonal(stats_covariance(mu).cov))
    scale_sigma = np.sqrt(np.diagonal(stats_covariance(sigma).cov))
    beta = mu + sample_standard_normal(rng, b, mu.shape[1]) * scale_mu
    gamma = sigma + sample_standard_normal(rng, b, mu.shape[1]) * scale_sigma
    return AugmentedStats(
        beta=beta, gamma=gamma, lambda_used=np.ones(b), gated=False
    )


def mixstyle_stats(stats, cfg, rng):
    """Convex interpolation with a permuted batch partner.

    Draw order: gate uniform; batch permutation; one Beta(alpha, alpha)
    weight per instance, shared between mu and sigma.  beta lies on the
    segment between mu and its partner row, so augmented statistics never
    leave the convex hull of the batch.
    """
    if rng.uniform1() < cfg.gate_p:
        return _passthrough(stats)
    mu, sigma = stats.mu, stats.sigma
    b = mu.shape[0]
    perm = rng.permutation(b)
    lam = sample_beta(rng, cfg.alpha, b)
    w = lam[:, None]
    beta = w * mu + (1.0 - w) * mu[perm]
    gamma = w * sigma + (1.0 - w) * sigma[perm]
    return AugmentedStats(beta=beta, gamma=gamma, lambda_used=lam, gated=False)


def padain_stats(stats, cfg, rng):
    """Joint permutation of whole (mu, sigma) rows.

    Inverted gate: the permutation is *applied* with probability gate_p
    and the batch passes through otherwise.  Draw order: gate uniform;
    batch permutation.  The multiset of per-instance statistics is
    preserved exactly.
    """
    if rng.uniform1() >= cfg.gate_p:
        return _passthrough(stats)
    b = stats.mu.shape[0]
    perm = rng.permutation(b)
    return AugmentedStats(
        beta=stats.mu[perm],
        gamma=stats.sigma[perm],
        lambda_used=np.ones(b),
        gated=False,
    )


def identity_stats(stats, cfg, rng):
    """No-op; consumes no randomness."""
    return _passthrough(stats)


_STATS_OPS = {
    "csu": csu_stats,
    "dsu": dsu_stats,
    "mixstyle": mixstyle_stats,
    "padain": padain_stats,
    "identity": identity_stats,
}


def reassemble(fm, stats, aug):
    """Restore a batch around augmented statistics (the shared final step).

    Gated batches return the original FeatureMap object untouched
    (bit-for-bit).  Otherwise out = gamma * (x - mu)/sigma + beta computed
    in float64 and cast back to the input dtype.
    """
    if aug.gated:
        return fm
    x = fm.data.astype(np.float64, copy=False)
    mu = stats.mu[:, :, None, None]
    sigma = stats.sigma[:, :, None, None]
    out = aug.gamma[:, :, None, None] * ((x - mu) / sigma) + aug.beta[:, :, None, None]
    return FeatureMap(out.astype(fm.dtype.type, copy=False))


def augment_stats(stats, cfg, rng):
    """Dispatch to the configured method's statistics-level operator."""
    return _STATS_OPS[cfg.method](stats, cfg, rng)


def augment_forward(fm, cfg, rng):
    """Full forward pass: stats -> augmented stats -> reassembled batch.

    Returns (FeatureMap, AugmentedStats) so drivers can report gating and
    intensities without recomputation.
    """
    stats = instance_stats(fm, cfg.eps)
    aug = augment_stats(stats, cfg, rng)
    return reassemble(fm, stats, aug), aug


def csu_forward(fm, cfg, rng):
    """Correlated-noise augmentation of a feature-map batch."""
    out, _ = augment_forward(fm, _as_method(cfg, "csu"), rng)
    return out


def dsu_forward(fm, cfg, rng):
    """Per-channel (uncorrelated) noise augmentation of a batch."""
    out, _ = augment_forward(fm, _as_method(cfg, "dsu"), rng)
    return out


def mixstyle_forward(fm, cfg, rng):
    """Convex statistics interpolation across a permuted batch."""
    out, _ = augment_forward(fm, _as_method(cfg, "mixstyle"), rng)
    return out


def padain_forward(fm, cfg, rng):
    """Joint (mu, sigma) row permutation across the batch."""
    out, _ = augment_forward(fm, _as_method(cfg, "padain"), rng)
    return out


def _as_method(cfg, method):
    if cfg.method == method:
        return cfg
    return AugmentConfig(
        method=method, alpha=cfg.alpha, gate_p=cfg.gate_p, eps=cfg.eps, seed=cfg.seed
    )
