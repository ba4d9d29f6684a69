"""Distributional analysis of style statistics and the comparison harness.

Tools to check, at desk scale, what the augmenters actually do to the
batch-level distribution of (mu, sigma): spectral concentration of the
statistics covariance, Frechet distance between Gaussian fits, convex-hull
escape in the dominant 2-D eigenprojection, and deviation of the augmented
correlation structure from the source's.  Synthetic multi-domain inputs
with a known cross-channel mixing provide ground truth.
"""

import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .augment import AugmentConfig, augment_stats
from .featuremap import FeatureMap
from .linalg import numerical_rank, psd_sqrt, sym_eig
from .rng import RngStream
from .stats import InstanceStats, correlation_from_covariance, instance_stats, stats_covariance


@dataclass(frozen=True)
class SpectrumReport:
    """Spectral summary of a statistics covariance.

    eigenvalues: full spectrum, descending; explained_variance_ratio:
    cumulative shares over the eigenvalues above rank_tol (empty when the
    rank is zero, final entry exactly 1 otherwise); rank: that count.
    """

    eigenvalues: np.ndarray
    explained_variance_ratio: np.ndarray
    rank: int
    source_tag: str = ""


def spectrum_report(cov, source_tag=""):
    """Eigen-spectrum and cumulative explained-variance of a covariance."""
    eig = sym_eig(cov.cov, psd=True)
    rank = numerical_rank(eig)
    vals = eig.eigenvalues
    if rank > 0:
        cum = np.cumsum(vals[:rank])
        ratios = cum / cum[-1]
    else:
        ratios = np.empty(0)
    vals = vals.copy()
    vals.setflags(write=False)
    ratios.setflags(write=False)
    return SpectrumReport(
        eigenvalues=vals,
        explained_variance_ratio=ratios,
        rank=rank,
        source_tag=source_tag,
    )


def gaussian_frechet_distance(mean_a, cov_a, mean_b, cov_b):
    """Frechet distance between two Gaussians.

    d^2 = |m_a - m_b|^2 + tr(C_a + C_b - 2 (C_a^1/2 C_b C_a^1/2)^1/2)

    Rank-deficient covariances are fine: the inner square root is taken
    over the clamped non-negative spectrum, which restricts the metric to
    the support.  Roundoff may push d^2 slightly negative; anything above
    -1e-8 is clamped to zero and anything below is an error.
    """
    mean_a = np.asarray(mean_a, dtype=np.float64)
    mean_b = np.asarray(mean_b, dtype=np.float64)
    if mean_a.shape != mean_b.shape:
        raise ValueError(f"mean shapes differ: {mean_a.shape} vs {mean_b.shape}")
    root_a = psd_sqrt(sym_eig(np.asarray(cov_a, dtype=np.float64)))
    inner = root_a @ np.asarray(cov_b, dtype=np.float64) @ root_a
    inner_eig = sym_eig((inner + inner.T) / 2.0)
    # restrict to the support: sqrt would amplify roundoff eigenvalues
    # (sqrt(1e-16) ~ 1e-8) into a visible negative bias on d^2
    vals = inner_eig.eigenvalues
    tr_cross = float(np.sum(np.sqrt(vals[vals > inner_eig.rank_tol])))
    d2 = (
        float(np.sum((mean_a - mean_b) ** 2))
        + float(np.trace(np.asarray(cov_a)))
        + float(np.trace(np.asarray(cov_b)))
        - 2.0 * tr_cross
    )
    if d2 < -1e-8:
        raise ValueError(f"Frechet distance squared is {d2:.3e}, below roundoff tolerance")
    return float(np.sqrt(max(d2, 0.0)))


@dataclass(frozen=True)
class DomainSpec:
    """Recipe for one synthetic domain.

    Instances are i.i.d. standard-normal planes, linearly mixed across
    channels by the C x C channel_mixing matrix, then shifted and scaled
    per channel.  The mixing controls the cross-channel correlation of the
    resulting style statistics; seed pins the data.
    """

    n_channels: int
    mean_shift: np.ndarray
    scale_shift: np.ndarray
    channel_mixing: np.ndarray
    n_instances: int
    height: int
    width: int
    seed: int

    def __post_init__(self):
        c = int(self.n_channels)
        if c < 1:
            raise ValueError("n_channels must be >= 1")
        for name in ("n_instances", "height", "width"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be >= 1")
        mean_shift = np.asarray(self.mean_shift, dtype=np.float64)
        scale_shift = np.asarray(self.scale_shift, dtype=np.float64)
        mixing = np.asarray(self.channel_mixing, dtype=np.float64)
        if mean_shift.shape != (c,):
            raise ValueError(f"mean_shift must have shape ({c},), got {mean_shift.shape}")
        if scale_shift.shape != (c,):
            raise ValueError(f"scale_shift must have shape ({c},), got {scale_shift.shape}")
        if mixing.shape != (c, c):
            raise ValueError(
                f"channel_mixing must have shape ({c}, {c}), got {mixing.shape}"
            )
        for name, arr in (
            ("mean_shift", mean_shift),
            ("scale_shift", scale_shift),
            ("channel_mixing", mixing),
        ):
            if not np.isfinite(arr).all():
                raise ValueError(f"{name} contains non-finite values")
        if not (scale_shift > 0.0).all():
            raise ValueError("scale_shift entries must be positive")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        mean_shift.setflags(write=False)
        scale_shift.setflags(write=False)
        mixing.setflags(write=False)
        object.__setattr__(self, "mean_shift", mean_shift)
        object.__setattr__(self, "scale_shift", scale_shift)
        object.__setattr__(self, "channel_mixing", mixing)

    def to_dict(self):
        return {
            "n_channels": int(self.n_channels),
            "mean_shift": self.mean_shift.tolist(),
            "scale_shift": self.scale_shift.tolist(),
            "channel_mixing": self.channel_mixing.tolist(),
            "n_instances": int(self.n_instances),
            "height": int(self.height),
            "width": int(self.width),
            "seed": int(self.seed),
        }

    @classmethod
    def from_dict(cls, d, where="domain"):
        if not isinstance(d, dict):
            raise ValueError(f"config error at {where}: expected an object")
        kwargs = {}
        for name in (
            "n_channels",
            "mean_shift",
            "scale_shift",
            "channel_mixing",
            "n_instances",
            "height",
            "width",
            "seed",
        ):
            if name not in d:
                raise ValueError(f"config error at {where}.{name}: missing field")
            kwargs[name] = d[name]
        extra = set(d) - set(kwargs)
        if extra:
            raise ValueError(
                f"config error at {where}.{sorted(extra)[0]}: unknown field"
            )
        try:
            return cls(**kwargs)
        except (TypeError, ValueError) as exc:
            raise ValueError(f"config error at {where}: {exc}") from exc


def generate_domain(spec, rng):
    """Materialize a DomainSpec into a float64 FeatureMap.

    planes ~ N(0, 1) i.i.d., mixed across channels by channel_mixing, then
    out[:, c] = scale_shift[c] * mixed[:, c] + mean_shift[c].
    """
    b, c = int(spec.n_instances), int(spec.n_channels)
    h, w = int(spec.height), int(spec.width)
    planes = rng.normal(b * c * h * w).reshape(b, c, h, w)
    mixed = np.einsum("ck,bkhw->bchw", spec.channel_mixing, planes)
    out = mixed * spec.scale_shift[None, :, None, None]
    out += spec.mean_shift[None, :, None, None]
    return FeatureMap(np.ascontiguousarray(out))


def _convex_hull_2d(points):
    """Vertices of the convex hull (monotone chain), counter-clockwise.

    Collinear input degenerates to 2 vertices, a single point to 1.
    """
    pts = np.unique(np.asarray(points, dtype=np.float64), axis=0)
    if pts.shape[0] <= 2:
        return pts
    # lexicographic sort is what np.unique on rows gives us already
    def half(iterable):
        out = []
        for p in iterable:
            while len(out) >= 2:
                o, a = out[-2], out[-1]
                if (a[0] - o[0]) * (p[1] - o[1]) - (a[1] - o[1]) * (p[0] - o[0]) > 0.0:
                    break
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(pts[::-1])
    hull = np.array(lower[:-1] + upper[:-1])
    if hull.shape[0] < 3:  # fully collinear
        return np.array([pts[0], pts[-1]])
    return hull


def out_of_hull_fraction(source_points, query_points, rel_tol=1e-9):
    """Fraction of query points strictly outside the source convex hull.

    Both inputs are (N, 2).  Points within rel_tol (scaled by the hull's
    coordinate magnitude) of the boundary count as inside, so hull
    vertices and chord points are never flagged.  Degenerate hulls
    (segment or single point) use distance to the segment/point.
    """
    source_points = np.asarray(source_points, dtype=np.float64)
    query_points = np.asarray(query_points, dtype=np.float64)
    hull = _convex_hull_2d(source_points)
    scale = max(1.0, float(np.abs(hull).max(initial=0.0)))
    tol = rel_tol * scale
    n = query_points.shape[0]
    if n == 0:
        return 0.0
    if hull.shape[0] == 1:
        dist = np.linalg.norm(query_points - hull[0], axis=1)
        return float(np.mean(dist > tol))
    if hull.shape[0] == 2:
        a, b = hull
        ab = b - a
        denom = float(ab @ ab)
        t = np.clip((query_points - a) @ ab / denom, 0.0, 1.0)
        proj = a + t[:, None] * ab
        dist = np.linalg.norm(query_points - proj, axis=1)
        return float(np.mean(dist > tol))
    outside = np.zeros(n, dtype=bool)
    for i in range(hull.shape[0]):
        a = hull[i]
        b = hull[(i + 1) % hull.shape[0]]
        cross = (b[0] - a[0]) * (query_points[:, 1] - a[1]) - (b[1] - a[1]) * (
            query_points[:, 0] - a[0]
        )
        outside |= cross < -tol  # hull is counter-clockwise
    return float(np.mean(outside))


def _pooled_source_stats(source_specs, eps):
    mus, sigmas = [], []
    for spec in source_specs:
        fm = generate_domain(spec, RngStream(spec.seed))
        st = instance_stats(fm, eps)
        mus.append(st.mu)
        sigmas.append(st.sigma)
    return InstanceStats(
        mu=np.vstack(mus), sigma=np.vstack(sigmas), eps=eps
    )


def coverage_experiment(source_specs, target_spec, method_configs, rng, n_draws=400, eps=1e-6):
    """Compare augmentation methods on synthetic source/target domains.

    Sources (at least two) are pooled into one batch of style statistics.
    Each method augments that same batch n_draws times with streams
    derived from rng, and three numbers are reported per method:

    * frechet_to_target: Frechet distance between a Gaussian fit to the
      augmented [beta, gamma] rows and one fit to the target's [mu, sigma]
      rows (handles rank-deficient fits via the support-restricted root).
    * out_of_hull_fraction: share of augmented beta rows outside the
      convex hull of the source mu rows, both projected onto the top two
      eigenvectors of the source mu covariance.
    * correlation_deviation: entrywise mean absolute difference between
      the correlation matrix of the augmented beta rows and the source mu
      correlation.  The identity method reproduces the source rows, so its
      deviation is zero by construction.

    Before comparison the additive-noise methods (csu, dsu) are rescaled
    to a common mean squared perturbation norm (the average of their raw
    energies over the concatenated [beta - mu, gamma - sigma] rows), so
    neither wins merely by perturbing harder.  Interpolation/permutation
    methods have no meaningful scale knob and are left alone.

    Deterministic given the domain seeds and rng's seed.  Returns one dict
    per method, in config order.
    """
    source_specs = list(source_specs)
    if len(source_specs) < 2:
        raise ValueError(f"need at least 2 source domains, got {len(source_specs)}")
    pooled = _pooled_source_stats(source_specs, eps)
    b = pooled.mu.shape[0]

    cov_mu = stats_covariance(pooled.mu)
    corr_source = correlation_from_covariance(cov_mu)
    eig_mu = sym_eig(cov_mu.cov, psd=True)
    basis2 = eig_mu.eigenvectors[:, :2]
    source_proj = (pooled.mu - cov_mu.center) @ basis2

    target_fm = generate_domain(target_spec, RngStream(target_spec.seed))
    target_stats = instance_stats(target_fm, eps)
    target_rows = np.hstack([target_stats.mu, target_stats.sigma])
    target_mean = target_rows.mean(axis=0)
    target_cov = stats_covariance(target_rows).cov

    collected = []
    for m_idx, cfg in enumerate(method_configs):
        method_rng = rng.child(m_idx)
        betas, gammas = [], []
        for d in range(n_draws):
            aug = augment_stats(pooled, cfg, method_rng.child(d))
            betas.append(aug.beta)
            gammas.append(aug.gamma)
        collected.append((cfg, np.vstack(betas), np.vstack(gammas)))

    mu_tiled = np.tile(pooled.mu, (n_draws, 1))
    sigma_tiled = np.tile(pooled.sigma, (n_draws, 1))

    # Energy matching across the additive-noise methods.
    energies = {}
    for i, (cfg, beta_rows, gamma_rows) in enumerate(collected):
        if cfg.method in ("csu", "dsu"):
            pert = np.hstack([beta_rows - mu_tiled, gamma_rows - sigma_tiled])
            energies[i] = float(np.mean(np.sum(pert**2, axis=1)))
    positive = [e for e in energies.values() if e > 0.0]
    target_energy = float(np.mean(positive)) if positive else 0.0

    rows = []
    for i, (cfg, beta_rows, gamma_rows) in enumerate(collected):
        if i in energies and energies[i] > 0.0 and target_energy > 0.0:
            s = float(np.sqrt(target_energy / energies[i]))
            beta_rows = mu_tiled + s * (beta_rows - mu_tiled)
            gamma_rows = sigma_tiled + s * (gamma_rows - sigma_tiled)
        fit_rows = np.hstack([beta_rows, gamma_rows])
        frechet = gaussian_frechet_distance(
            fit_rows.mean(axis=0),
            stats_covariance(fit_rows).cov,
            target_mean,
            target_cov,
        )
        beta_proj = (beta_rows - cov_mu.center) @ basis2
        hull_frac = out_of_hull_fraction(source_proj, beta_proj)
        corr_aug = correlation_from_covariance(stats_covariance(beta_rows))
        corr_dev = float(np.mean(np.abs(corr_aug - corr_source)))
        rows.append(
            {
                "method": cfg.method,
                "frechet_to_target": frechet,
                "out_of_hull_fraction": hull_frac,
                "correlation_deviation": corr_dev,
            }
        )
    return rows


def build_default_harness_config():
    """Construct the default harness setup: two strongly-mixed 16-channel
    sources, a shifted/rescaled target sharing the mixing, and all five
    methods with gating disabled (padain's inverted gate set to 1 so its
    permutation actually applies).

    The mixing is dominated by a rank-one component (sign vectors keep
    every channel equally involved), which concentrates the statistics
    covariance spectrum and gives pronounced cross-channel correlation --
    the regime that separates correlated from diagonal noise.  Domain mean
    shifts run along the same dominant direction so pooling the sources
    reinforces rather than dilutes that structure.
    """
    c = 16
    mix_rng = RngStream(9001)
    u = np.where(mix_rng.normal(c) >= 0.0, 1.0, -1.0)
    v = np.where(mix_rng.normal(c) >= 0.0, 1.0, -1.0)
    mixing = 3.0 * np.outer(u, v) / np.sqrt(c) + np.eye(c)

    def domain(shift, scale, b, seed):
        return DomainSpec(
            n_channels=c,
            mean_shift=shift * 0.75 * u,
            scale_shift=np.full(c, float(scale)),
            channel_mixing=mixing,
            n_instances=b,
            height=8,
            width=8,
            seed=seed,
        ).to_dict()

    return {
        "draws": 400,
        "sources": [
            domain(0.0, 1.0, 32, 101),
            domain(1.0, 1.2, 32, 202),
        ],
        "target": domain(2.0, 1.5, 64, 303),
        "methods": [
            {"method": "identity"},
            {"method": "mixstyle", "alpha": 0.3, "gate_p": 0.0},
            {"method": "padain", "gate_p": 1.0},
            {"method": "dsu", "gate_p": 0.0},
            {"method": "csu", "alpha": 0.3, "gate_p": 0.0},
        ],
    }


def default_harness_config():
    """The shipped harness configuration (packaged JSON)."""
    text = resources.files("csu").joinpath("data/default_harness.json").read_text()
    return json.loads(text)


def parse_harness_config(raw):
    """Validate a harness config dict into (sources, target, methods, draws).

    Field errors carry the offending path, e.g. ``sources[0].scale_shift``.
    """
    if not isinstance(raw, dict):
        raise ValueError("config error at <root>: expected an object")
    for name in ("sources", "target", "methods"):
        if name not in raw:
            raise ValueError(f"config error at {name}: missing field")
    if not isinstance(raw["sources"], list) or len(raw["sources"]) < 2:
        raise ValueError("config error at sources: expected a list of >= 2 domains")
    sources = [
        DomainSpec.from_dict(d, where=f"sources[{i}]")
        for i, d in enumerate(raw["sources"])
    ]
    target = DomainSpec.from_dict(raw["target"], where="target")
    if not isinstance(raw["methods"], list) or not raw["methods"]:
        raise ValueError("config error at methods: expected a non-empty list")
    methods = []
    for i, d in enumerate(raw["methods"]):
        if not isinstance(d, dict) or "method" not in d:
            raise ValueError(f"config error at methods[{i}].method: missing field")
        extra = set(d) - {"method", "alpha", "gate_p", "eps", "seed"}
        if extra:
            raise ValueError(
                f"config error at methods[{i}].{sorted(extra)[0]}: unknown field"
            )
        try:
            methods.append(AugmentConfig(**d))
        except (TypeError, ValueError) as exc:
            raise ValueError(f"config error at methods[{i}]: {exc}") from exc
    draws = raw.get("draws", 400)
    if not isinstance(draws, int) or draws < 1:
        raise ValueError("config error at draws: expected a positive integer")
    extra = set(raw) - {"sources", "target", "methods", "draws"}
    if extra:
        raise ValueError(f"config error at {sorted(extra)[0]}: unknown field")
    return sources, target, methods, draws
