"""P-values and confidence limits for asymptotically pivotal statistics."""
from __future__ import annotations

import math
from typing import Callable

from ..core import normalize_alternative


def p_value(stat: float, alternative: str, sf: Callable[[float], float]) -> float:
    """``sf`` is the survival function of a symmetric reference law."""
    alt = normalize_alternative(alternative)
    if alt == "two_sided":
        return min(1.0, 2.0 * sf(abs(stat)))
    if alt == "less":
        return sf(-stat)
    return sf(stat)


def interval(
    estimate: float,
    se: float,
    alpha: float,
    alternative: str,
    quantile: Callable[[float], float],
) -> tuple[float, float]:
    """Wald-type interval; one-sided intervals are open on the untested side."""
    alt = normalize_alternative(alternative)
    if alt == "two_sided":
        q = quantile(1.0 - alpha / 2.0)
        return estimate - q * se, estimate + q * se
    q = quantile(1.0 - alpha)
    if alt == "less":
        return -math.inf, estimate + q * se
    return estimate - q * se, math.inf


def check_alpha(alpha: float) -> None:
    from ..errors import DataError

    if not 0.0 < alpha < 1.0:
        raise DataError(f"alpha must be in (0, 1), got {alpha}")
