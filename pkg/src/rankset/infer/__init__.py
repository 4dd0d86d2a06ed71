from .auc import auc_pseudo_values, rss_auc_estimate, rss_auc_test
from .elr import ElrProfile, StratifiedEL, rss_elr_test
from .means import (
    MeanSummary,
    mean_summary,
    naive_df,
    rss_t_test,
    rss_z_test,
    satterthwaite_df,
    srs_t_test,
)
from .prop import proportion_variance, rss_prop_test, rss_proportion
from .sign import balanced_sign_statistic, rss_sign_test, sign_moments, sign_statistic

__all__ = [
    "ElrProfile",
    "MeanSummary",
    "StratifiedEL",
    "auc_pseudo_values",
    "balanced_sign_statistic",
    "mean_summary",
    "naive_df",
    "proportion_variance",
    "rss_auc_estimate",
    "rss_auc_test",
    "rss_elr_test",
    "rss_prop_test",
    "rss_proportion",
    "rss_sign_test",
    "rss_t_test",
    "rss_z_test",
    "satterthwaite_df",
    "sign_moments",
    "sign_statistic",
    "srs_t_test",
]
