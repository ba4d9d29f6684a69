"""Correlated style-statistics augmentation for batched feature maps.

Pure numerical operators over (B, C, H, W) arrays: per-instance style
statistics, their batch covariance and spectrum, correlated-noise
augmentation (csu) plus diagonal-noise (dsu), interpolation (mixstyle),
permutation (padain) and identity baselines, and an analysis harness that
quantifies what each method does to the statistics distribution.
"""

from .analysis import (
    DomainSpec,
    SpectrumReport,
    build_default_harness_config,
    coverage_experiment,
    default_harness_config,
    gaussian_frechet_distance,
    generate_domain,
    out_of_hull_fraction,
    parse_harness_config,
    spectrum_report,
)
from .augment import (
    METHODS,
    AugmentConfig,
    AugmentedStats,
    augment_forward,
    augment_stats,
    correlated_noise,
    csu_forward,
    csu_stats,
    dsu_forward,
    dsu_stats,
    identity_stats,
    mixstyle_forward,
    mixstyle_stats,
    padain_forward,
    padain_stats,
    reassemble,
    sample_beta,
    sample_standard_normal,
)
from .featuremap import FeatureMap, channel_plane, make_feature_map
from .fmfile import read_feature_map, write_feature_map
from .linalg import (
    SymEig,
    numerical_rank,
    psd_sqrt,
    pseudo_det_log,
    pseudo_inverse,
    sym_eig,
)
from .rng import RngStream
from .stats import (
    InstanceStats,
    StatsCovariance,
    correlation_from_covariance,
    degenerate_gaussian_logpdf,
    instance_stats,
    stats_covariance,
)

__version__ = "0.1.0"

__all__ = [
    "AugmentConfig",
    "AugmentedStats",
    "DomainSpec",
    "FeatureMap",
    "InstanceStats",
    "METHODS",
    "RngStream",
    "SpectrumReport",
    "StatsCovariance",
    "SymEig",
    "augment_forward",
    "augment_stats",
    "build_default_harness_config",
    "channel_plane",
    "correlated_noise",
    "correlation_from_covariance",
    "coverage_experiment",
    "csu_forward",
    "csu_stats",
    "default_harness_config",
    "degenerate_gaussian_logpdf",
    "dsu_forward",
    "dsu_stats",
    "gaussian_frechet_distance",
    "generate_domain",
    "identity_stats",
    "instance_stats",
    "make_feature_map",
    "mixstyle_forward",
    "mixstyle_stats",
    "numerical_rank",
    "out_of_hull_fraction",
    "padain_forward",
    "padain_stats",
    "parse_harness_config",
    "psd_sqrt",
    "pseudo_det_log",
    "pseudo_inverse",
    "read_feature_map",
    "reassemble",
    "sample_beta",
    "sample_standard_normal",
    "spectrum_report",
    "stats_covariance",
    "sym_eig",
    "write_feature_map",
    "__version__",
]
