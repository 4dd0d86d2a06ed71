"""Ranked set sampling: sampling, allocation design and inference for
balanced and unbalanced designs."""

__version__ = "0.1.0"

from .allocate import (
    StratumStats,
    adjusted_neyman,
    design_report,
    estimated_variance,
    integer_neyman,
    lrc_allocation,
    neyman_proportion,
)
from .core import (
    Allocation,
    DesignReport,
    PopulationFrame,
    RssDataset,
    RssRecord,
    TestResult,
    partition_by_rank,
    stratum_counts,
    validate_dataset,
)
from .errors import DataError, InfeasibleError, NumericalError, RankSetError
from .infer import (
    mean_summary,
    rss_auc_estimate,
    rss_auc_test,
    rss_elr_test,
    rss_prop_test,
    rss_sign_test,
    rss_t_test,
    rss_z_test,
)
from .sampling import SamplingConfig, rss_prop_sample, rss_sample
from .simulate import SimConfig, noise_variance_for_rho, rss_prop_simulate, rss_simulate
